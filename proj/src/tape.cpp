#include "grclust/tape.hpp"

#include <algorithm>
#include <cmath>

#include "grclust/errors.hpp"
#include "grclust/kernels.hpp"

namespace grclust {

namespace {

void axpy(Mat& y, const Mat& x, double a = 1.0) {
    for (std::size_t i = 0; i < y.size(); ++i) y.data()[i] += a * x.data()[i];
}

} // namespace

Tape::Id Tape::push(Mat value, bool needs_grad, std::function<void(Tape&)> backward) {
    Node node;
    if (needs_grad) node.grad = Mat(value.rows(), value.cols());
    node.value = std::move(value);
    node.needs_grad = needs_grad;
    node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    order_.emplace_back(false, nodes_.size() - 1);
    return nodes_.size() - 1;
}

Tape::SpId Tape::sp_push(SparseAdjacency value, bool needs_grad,
                         std::function<void(Tape&)> backward) {
    SpNode node;
    if (needs_grad) node.grad.assign(value.nnz(), 0.0);
    node.value = std::move(value);
    node.needs_grad = needs_grad;
    node.backward = std::move(backward);
    sp_nodes_.push_back(std::move(node));
    order_.emplace_back(true, sp_nodes_.size() - 1);
    return sp_nodes_.size() - 1;
}

Tape::Id Tape::input(Mat value) { return push(std::move(value), false, nullptr); }

Tape::Id Tape::param(Mat value) { return push(std::move(value), true, nullptr); }

Tape::Id Tape::affine(Id x, Id w, Id bias, bool has_bias, Act act, double slope) {
    const Mat& xv = nodes_[x].value;
    const Mat& wv = nodes_[w].value;
    Mat out;
    kern::gemm(xv, wv, out);
    if (has_bias) kern::add_row_vector(out, nodes_[bias].value);
    if (act == Act::relu) {
        Mat t;
        kern::relu(out, t);
        out = std::move(t);
    } else if (act == Act::lrelu) {
        Mat t;
        kern::leaky_relu(out, slope, t);
        out = std::move(t);
    }
    const bool ng = nodes_[x].needs_grad || nodes_[w].needs_grad ||
                    (has_bias && nodes_[bias].needs_grad);
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [x, w, bias, has_bias, act, slope, id](Tape& t) {
            const Mat& g = t.grad(id);
            const Mat& out = t.value(id);
            // Activation pass-through derivative recovered from the output
            // sign (valid for relu/lrelu; exact zeros take the smaller slope).
            Mat gp = g;
            if (act == Act::relu) {
                for (std::size_t i = 0; i < gp.size(); ++i) {
                    if (out.data()[i] <= 0.0) gp.data()[i] = 0.0;
                }
            } else if (act == Act::lrelu) {
                for (std::size_t i = 0; i < gp.size(); ++i) {
                    if (out.data()[i] <= 0.0) gp.data()[i] *= slope;
                }
            }
            if (t.needs_grad(x)) {
                Mat gx;
                kern::gemm_nt(gp, t.value(w), gx);
                axpy(t.grad_mut(x), gx);
            }
            if (t.needs_grad(w)) {
                Mat gw;
                kern::gemm_tn(t.value(x), gp, gw);
                axpy(t.grad_mut(w), gw);
            }
            if (has_bias && t.needs_grad(bias)) {
                Mat& gb = t.grad_mut(bias);
                for (std::size_t i = 0; i < gp.rows(); ++i) {
                    for (std::size_t j = 0; j < gp.cols(); ++j) gb(0, j) += gp(i, j);
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::add(Id a, Id b) {
    const Mat& av = nodes_[a].value;
    const Mat& bv = nodes_[b].value;
    if (!av.same_shape(bv)) {
        throw ShapeError("tape add: " + av.shape_str() + " vs " + bv.shape_str());
    }
    Mat out = av;
    axpy(out, bv);
    const bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [a, b, id](Tape& t) {
            if (t.needs_grad(a)) axpy(t.grad_mut(a), t.grad(id));
            if (t.needs_grad(b)) axpy(t.grad_mut(b), t.grad(id));
        };
    }
    return id;
}

Tape::Id Tape::scale(Id a, double s) {
    Mat out = nodes_[a].value;
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= s;
    const bool ng = nodes_[a].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [a, s, id](Tape& t) { axpy(t.grad_mut(a), t.grad(id), s); };
    }
    return id;
}

Tape::Id Tape::relu(Id x) {
    Mat out;
    kern::relu(nodes_[x].value, out);
    const bool ng = nodes_[x].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [x, id](Tape& t) {
            const Mat& g = t.grad(id);
            const Mat& xv = t.value(x);
            Mat& gx = t.grad_mut(x);
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (xv.data()[i] > 0.0) gx.data()[i] += g.data()[i];
            }
        };
    }
    return id;
}

Tape::Id Tape::leaky_relu(Id x, double slope) {
    Mat out;
    kern::leaky_relu(nodes_[x].value, slope, out);
    const bool ng = nodes_[x].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [x, slope, id](Tape& t) {
            const Mat& g = t.grad(id);
            const Mat& xv = t.value(x);
            Mat& gx = t.grad_mut(x);
            for (std::size_t i = 0; i < g.size(); ++i) {
                gx.data()[i] += g.data()[i] * (xv.data()[i] > 0.0 ? 1.0 : slope);
            }
        };
    }
    return id;
}

Tape::Id Tape::row_softmax(Id x) {
    Mat out;
    kern::row_softmax(nodes_[x].value, out);
    const bool ng = nodes_[x].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [x, id](Tape& t) {
            const Mat& g = t.grad(id);
            const Mat& y = t.value(id);
            Mat& gx = t.grad_mut(x);
            for (std::size_t i = 0; i < y.rows(); ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
                for (std::size_t j = 0; j < y.cols(); ++j) {
                    gx(i, j) += y(i, j) * (g(i, j) - dot);
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::row_l2_normalize(Id x) {
    const Mat& xv = nodes_[x].value;
    std::vector<double> norms(xv.rows());
    for (std::size_t i = 0; i < xv.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < xv.cols(); ++j) s += xv(i, j) * xv(i, j);
        norms[i] = std::sqrt(s);
    }
    Mat out;
    kern::row_l2_normalize(xv, out);
    const bool ng = nodes_[x].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [x, id, norms = std::move(norms)](Tape& t) {
            const Mat& g = t.grad(id);
            const Mat& y = t.value(id);
            Mat& gx = t.grad_mut(x);
            for (std::size_t i = 0; i < y.rows(); ++i) {
                if (norms[i] <= 1e-12) { // pass-through rows
                    for (std::size_t j = 0; j < y.cols(); ++j) gx(i, j) += g(i, j);
                    continue;
                }
                double dot = 0.0;
                for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
                for (std::size_t j = 0; j < y.cols(); ++j) {
                    gx(i, j) += (g(i, j) - dot * y(i, j)) / norms[i];
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
    std::vector<const Mat*> views;
    bool ng = false;
    for (Id p : parts) {
        views.push_back(&nodes_[p].value);
        ng = ng || nodes_[p].needs_grad;
    }
    Mat out;
    kern::concat_cols(views, out);
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [parts, id](Tape& t) {
            const Mat& g = t.grad(id);
            std::size_t off = 0;
            for (Id p : parts) {
                const std::size_t w = t.value(p).cols();
                if (t.needs_grad(p)) {
                    Mat& gp = t.grad_mut(p);
                    for (std::size_t i = 0; i < g.rows(); ++i) {
                        for (std::size_t j = 0; j < w; ++j) gp(i, j) += g(i, off + j);
                    }
                }
                off += w;
            }
        };
    }
    return id;
}

Tape::Id Tape::col_scale(Id x, Id w, std::size_t col) {
    Mat out;
    kern::col_scale(nodes_[x].value, nodes_[w].value, col, out);
    const bool ng = nodes_[x].needs_grad || nodes_[w].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [x, w, col, id](Tape& t) {
            const Mat& g = t.grad(id);
            const Mat& xv = t.value(x);
            const Mat& wv = t.value(w);
            for (std::size_t i = 0; i < g.rows(); ++i) {
                if (t.needs_grad(x)) {
                    Mat& gx = t.grad_mut(x);
                    for (std::size_t j = 0; j < g.cols(); ++j) {
                        gx(i, j) += g(i, j) * wv(i, col);
                    }
                }
                if (t.needs_grad(w)) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < g.cols(); ++j) acc += g(i, j) * xv(i, j);
                    t.grad_mut(w)(i, col) += acc;
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::slice_rows(Id x, std::size_t r0, std::size_t r1) {
    const Mat& xv = nodes_[x].value;
    if (r0 >= r1 || r1 > xv.rows()) {
        throw ShapeError("slice_rows: range [" + std::to_string(r0) + ", " + std::to_string(r1) +
                         ") of " + xv.shape_str());
    }
    Mat out(r1 - r0, xv.cols());
    for (std::size_t i = r0; i < r1; ++i) {
        for (std::size_t j = 0; j < xv.cols(); ++j) out(i - r0, j) = xv(i, j);
    }
    const bool ng = nodes_[x].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [x, r0, id](Tape& t) {
            const Mat& g = t.grad(id);
            Mat& gx = t.grad_mut(x);
            for (std::size_t i = 0; i < g.rows(); ++i) {
                for (std::size_t j = 0; j < g.cols(); ++j) gx(r0 + i, j) += g(i, j);
            }
        };
    }
    return id;
}

Tape::Id Tape::mix(Id theta, Id a, Id b) {
    const Mat& tv = nodes_[theta].value;
    if (tv.rows() != 1 || tv.cols() != 1) {
        throw ShapeError("mix: theta must be 1x1, got " + tv.shape_str());
    }
    const double th = tv(0, 0);
    const Mat& av = nodes_[a].value;
    const Mat& bv = nodes_[b].value;
    if (!av.same_shape(bv)) {
        throw ShapeError("mix: " + av.shape_str() + " vs " + bv.shape_str());
    }
    Mat out(av.rows(), av.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = (1.0 - th) * av.data()[i] + th * bv.data()[i];
    }
    const bool ng = nodes_[theta].needs_grad || nodes_[a].needs_grad || nodes_[b].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [theta, a, b, th, id](Tape& t) {
            const Mat& g = t.grad(id);
            if (t.needs_grad(a)) axpy(t.grad_mut(a), g, 1.0 - th);
            if (t.needs_grad(b)) axpy(t.grad_mut(b), g, th);
            if (t.needs_grad(theta)) {
                const Mat& av = t.value(a);
                const Mat& bv = t.value(b);
                double acc = 0.0;
                for (std::size_t i = 0; i < g.size(); ++i) {
                    acc += g.data()[i] * (bv.data()[i] - av.data()[i]);
                }
                t.grad_mut(theta)(0, 0) += acc;
            }
        };
    }
    return id;
}

Tape::SpId Tape::sp_const(SparseAdjacency value) {
    return sp_push(std::move(value), false, nullptr);
}

Tape::SpId Tape::sp_fuse(SpId az, SpId a, Id v) {
    const SparseAdjacency& azv = sp_nodes_[az].value;
    const SparseAdjacency& av = sp_nodes_[a].value;
    const Mat& vv = nodes_[v].value;
    if (vv.rows() != azv.n() || vv.cols() != 2) {
        throw ShapeError("sp_fuse: weights " + vv.shape_str() + " for n=" + std::to_string(azv.n()));
    }
    spops::UnionPattern u = spops::union_pattern(azv, av);
    const std::size_t n = azv.n();
    std::vector<double> vals(u.col_idx.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = u.row_ptr[i]; e < u.row_ptr[i + 1]; ++e) {
            const double za = u.from_a[e] >= 0 ? azv.values()[u.from_a[e]] : 0.0;
            const double aa = u.from_b[e] >= 0 ? av.values()[u.from_b[e]] : 0.0;
            vals[e] = vv(i, 0) * za + vv(i, 1) * aa;
        }
    }
    SparseAdjacency out =
        SparseAdjacency::from_csr(n, u.row_ptr, u.col_idx, std::move(vals), NormState::raw);
    const bool ng = sp_nodes_[az].needs_grad || sp_nodes_[a].needs_grad || nodes_[v].needs_grad;
    const SpId id = sp_push(std::move(out), ng, nullptr);
    if (ng) {
        sp_nodes_[id].backward = [az, a, v, id, u = std::move(u)](Tape& t) {
            const std::vector<double>& g = t.sp_grad(id);
            const SparseAdjacency& azv = t.sp_value(az);
            const SparseAdjacency& av = t.sp_value(a);
            const Mat& vv = t.value(v);
            const std::size_t n = azv.n();
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t e = u.row_ptr[i]; e < u.row_ptr[i + 1]; ++e) {
                    const double za = u.from_a[e] >= 0 ? azv.values()[u.from_a[e]] : 0.0;
                    const double aa = u.from_b[e] >= 0 ? av.values()[u.from_b[e]] : 0.0;
                    if (t.needs_grad(v)) {
                        t.grad_mut(v)(i, 0) += g[e] * za;
                        t.grad_mut(v)(i, 1) += g[e] * aa;
                    }
                    if (t.sp_nodes_[az].needs_grad && u.from_a[e] >= 0) {
                        t.sp_grad_mut(az)[u.from_a[e]] += vv(i, 0) * g[e];
                    }
                    if (t.sp_nodes_[a].needs_grad && u.from_b[e] >= 0) {
                        t.sp_grad_mut(a)[u.from_b[e]] += vv(i, 1) * g[e];
                    }
                }
            }
        };
    }
    return id;
}

Tape::SpId Tape::sp_symmetrize_mean(SpId s) {
    const SparseAdjacency& sv = sp_nodes_[s].value;
    spops::SymPattern p = spops::sym_pattern(sv);
    std::vector<double> vals(p.col_idx.size());
    for (std::size_t e = 0; e < vals.size(); ++e) {
        const double f = p.fwd[e] >= 0 ? sv.values()[p.fwd[e]] : 0.0;
        const double r = p.rev[e] >= 0 ? sv.values()[p.rev[e]] : 0.0;
        vals[e] = 0.5 * (f + r);
    }
    SparseAdjacency out =
        SparseAdjacency::from_csr(sv.n(), p.row_ptr, p.col_idx, std::move(vals), NormState::raw);
    const bool ng = sp_nodes_[s].needs_grad;
    const SpId id = sp_push(std::move(out), ng, nullptr);
    if (ng) {
        sp_nodes_[id].backward = [s, id, p = std::move(p)](Tape& t) {
            const std::vector<double>& g = t.sp_grad(id);
            std::vector<double>& gs = t.sp_grad_mut(s);
            for (std::size_t e = 0; e < g.size(); ++e) {
                if (p.fwd[e] >= 0) gs[p.fwd[e]] += 0.5 * g[e];
                if (p.rev[e] >= 0) gs[p.rev[e]] += 0.5 * g[e];
            }
        };
    }
    return id;
}

Tape::SpId Tape::sp_sym_renorm(SpId s) {
    const SparseAdjacency& sv = sp_nodes_[s].value;
    const std::size_t n = sv.n();
    spops::DiagPattern p = spops::diag_pattern(sv);
    std::vector<double> deg(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = sv.row_ptr()[i]; e < sv.row_ptr()[i + 1]; ++e) {
            deg[i] += sv.values()[e];
        }
    }
    std::vector<double> vals(p.col_idx.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
            const std::size_t j = p.col_idx[e];
            double w = p.from_s[e] >= 0 ? sv.values()[p.from_s[e]] : 0.0;
            if (i == j) w += 1.0;
            vals[e] = w / std::sqrt(deg[i] * deg[j]);
        }
    }
    SparseAdjacency out = SparseAdjacency::from_csr(n, p.row_ptr, p.col_idx, std::move(vals),
                                                    NormState::sym_renorm);
    const bool ng = sp_nodes_[s].needs_grad;
    const SpId id = sp_push(std::move(out), ng, nullptr);
    if (ng) {
        sp_nodes_[id].backward = [s, id, p = std::move(p), deg = std::move(deg)](Tape& t) {
            const std::vector<double>& g = t.sp_grad(id);
            const SparseAdjacency& out = t.sp_value(id);
            const SparseAdjacency& sv = t.sp_value(s);
            std::vector<double>& gs = t.sp_grad_mut(s);
            const std::size_t n = out.n();
            // d(loss)/d(deg_i): every output entry in row i or column i scales
            // with deg_i^{-1/2}.
            std::vector<double> ddeg(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
                    const std::size_t j = p.col_idx[e];
                    const double go = g[e] * out.values()[e];
                    ddeg[i] += -0.5 * go / deg[i];
                    ddeg[j] += -0.5 * go / deg[j];
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
                    if (p.from_s[e] >= 0) {
                        const std::size_t j = p.col_idx[e];
                        gs[p.from_s[e]] += g[e] / std::sqrt(deg[i] * deg[j]);
                    }
                }
                // Each stored entry of s in row i feeds deg_i with weight 1.
                for (std::size_t e = sv.row_ptr()[i]; e < sv.row_ptr()[i + 1]; ++e) {
                    gs[e] += ddeg[i];
                }
            }
        };
    }
    return id;
}

Tape::SpId Tape::sp_row_stochastic(SpId s) {
    const SparseAdjacency& sv = sp_nodes_[s].value;
    const std::size_t n = sv.n();
    spops::DiagPattern p = spops::diag_pattern(sv);
    std::vector<double> rsum(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = sv.row_ptr()[i]; e < sv.row_ptr()[i + 1]; ++e) {
            rsum[i] += sv.values()[e];
        }
    }
    std::vector<double> vals(p.col_idx.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
            double w = p.from_s[e] >= 0 ? sv.values()[p.from_s[e]] : 0.0;
            if (p.col_idx[e] == i) w += 1.0;
            vals[e] = w / rsum[i];
        }
    }
    SparseAdjacency out = SparseAdjacency::from_csr(n, p.row_ptr, p.col_idx, std::move(vals),
                                                    NormState::row_stochastic);
    const bool ng = sp_nodes_[s].needs_grad;
    const SpId id = sp_push(std::move(out), ng, nullptr);
    if (ng) {
        sp_nodes_[id].backward = [s, id, p = std::move(p), rsum = std::move(rsum)](Tape& t) {
            const std::vector<double>& g = t.sp_grad(id);
            const SparseAdjacency& out = t.sp_value(id);
            std::vector<double>& gs = t.sp_grad_mut(s);
            const std::size_t n = out.n();
            for (std::size_t i = 0; i < n; ++i) {
                double rowdot = 0.0;
                for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
                    rowdot += g[e] * out.values()[e];
                }
                for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
                    if (p.from_s[e] >= 0) {
                        gs[p.from_s[e]] += (g[e] - rowdot) / rsum[i];
                    }
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::spmm(SpId s, Id x) {
    const SparseAdjacency& sv = sp_nodes_[s].value;
    const Mat& xv = nodes_[x].value;
    if (xv.rows() != sv.n()) {
        throw ShapeError("spmm: graph n=" + std::to_string(sv.n()) + " against " + xv.shape_str());
    }
    Mat out;
    kern::spmm(sv.n(), sv.row_ptr(), sv.col_idx(), sv.values(), xv, out);
    const bool ng = sp_nodes_[s].needs_grad || nodes_[x].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [s, x, id](Tape& t) {
            const Mat& g = t.grad(id);
            const SparseAdjacency& sv = t.sp_value(s);
            const Mat& xv = t.value(x);
            const std::size_t cols = g.cols();
            if (t.needs_grad(x)) {
                Mat& gx = t.grad_mut(x);
                for (std::size_t i = 0; i < sv.n(); ++i) {
                    const double* gr = g.row(i);
                    for (std::size_t e = sv.row_ptr()[i]; e < sv.row_ptr()[i + 1]; ++e) {
                        double* gxr = gx.row(sv.col_idx()[e]);
                        const double v = sv.values()[e];
                        for (std::size_t c = 0; c < cols; ++c) gxr[c] += v * gr[c];
                    }
                }
            }
            if (t.sp_nodes_[s].needs_grad) {
                std::vector<double>& gs = t.sp_grad_mut(s);
                for (std::size_t i = 0; i < sv.n(); ++i) {
                    const double* gr = g.row(i);
                    for (std::size_t e = sv.row_ptr()[i]; e < sv.row_ptr()[i + 1]; ++e) {
                        const double* xr = xv.row(sv.col_idx()[e]);
                        double acc = 0.0;
                        for (std::size_t c = 0; c < cols; ++c) acc += gr[c] * xr[c];
                        gs[e] += acc;
                    }
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::student_q(Id h, Id mu) {
    const Mat& hv = nodes_[h].value;
    const Mat& mv = nodes_[mu].value;
    if (hv.cols() != mv.cols()) {
        throw ShapeError("student_q: latent " + hv.shape_str() + " vs centroids " + mv.shape_str());
    }
    const std::size_t n = hv.rows(), kk = mv.rows(), d = hv.cols();
    Mat kernel(n, kk);
    std::vector<double> rowsum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < kk; ++j) {
            double dist = 0.0;
            for (std::size_t t = 0; t < d; ++t) {
                const double diff = hv(i, t) - mv(j, t);
                dist += diff * diff;
            }
            kernel(i, j) = 1.0 / (1.0 + dist);
            rowsum[i] += kernel(i, j);
        }
    }
    Mat out(n, kk);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < kk; ++j) out(i, j) = kernel(i, j) / rowsum[i];
    }
    const bool ng = nodes_[h].needs_grad || nodes_[mu].needs_grad;
    const Id id = push(std::move(out), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [h, mu, id, kernel = std::move(kernel),
                               rowsum = std::move(rowsum)](Tape& t) {
            const Mat& g = t.grad(id);
            const Mat& q = t.value(id);
            const Mat& hv = t.value(h);
            const Mat& mv = t.value(mu);
            const std::size_t n = q.rows(), kk = q.cols(), d = hv.cols();
            for (std::size_t i = 0; i < n; ++i) {
                double gq = 0.0;
                for (std::size_t j = 0; j < kk; ++j) gq += g(i, j) * q(i, j);
                for (std::size_t j = 0; j < kk; ++j) {
                    const double dk = (g(i, j) - gq) / rowsum[i];
                    // d kernel / d dist = -kernel^2; d dist / d h = 2 (h - mu)
                    const double c = -2.0 * dk * kernel(i, j) * kernel(i, j);
                    for (std::size_t t2 = 0; t2 < d; ++t2) {
                        const double diff = hv(i, t2) - mv(j, t2);
                        if (t.needs_grad(h)) t.grad_mut(h)(i, t2) += c * diff;
                        if (t.needs_grad(mu)) t.grad_mut(mu)(j, t2) -= c * diff;
                    }
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::recon_mse(Id xhat, const Mat& x) {
    const Mat& xv = nodes_[xhat].value;
    if (!xv.same_shape(x)) {
        throw ShapeError("recon_mse: " + xv.shape_str() + " vs " + x.shape_str());
    }
    Mat diff(xv.rows(), xv.cols());
    double loss = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
        diff.data()[i] = xv.data()[i] - x.data()[i];
        loss += diff.data()[i] * diff.data()[i];
    }
    // xv dangles once push() grows the node vector; keep scalars before that
    const double inv_n = 1.0 / static_cast<double>(xv.rows());
    loss *= inv_n;
    const bool ng = nodes_[xhat].needs_grad;
    const Id id = push(Mat::from_rows(1, 1, {loss}), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [xhat, id, inv_n, diff = std::move(diff)](Tape& t) {
            const double g = t.grad(id)(0, 0);
            axpy(t.grad_mut(xhat), diff, 2.0 * g * inv_n);
        };
    }
    return id;
}

Tape::Id Tape::kl_div(Id a, Id b) {
    const Mat& av = nodes_[a].value;
    const Mat& bv = nodes_[b].value;
    if (!av.same_shape(bv)) {
        throw ShapeError("kl_div: " + av.shape_str() + " vs " + bv.shape_str());
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        const double ai = av.data()[i], bi = bv.data()[i];
        if (ai < 0.0 || bi < 0.0) {
            throw DomainError("kl_div: negative entry (a=" + std::to_string(ai) +
                              ", b=" + std::to_string(bi) + ")");
        }
        loss += ai * (std::log(std::max(ai, kProbFloor)) - std::log(std::max(bi, kProbFloor)));
    }
    const bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
    const Id id = push(Mat::from_rows(1, 1, {loss}), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [a, b, id](Tape& t) {
            const double g = t.grad(id)(0, 0);
            const Mat& av = t.value(a);
            const Mat& bv = t.value(b);
            for (std::size_t i = 0; i < av.size(); ++i) {
                const double ai = av.data()[i], bi = bv.data()[i];
                const double la = std::log(std::max(ai, kProbFloor));
                const double lb = std::log(std::max(bi, kProbFloor));
                if (t.needs_grad(a)) {
                    t.grad_mut(a).data()[i] += g * (la - lb + (ai > kProbFloor ? 1.0 : 0.0));
                }
                if (t.needs_grad(b) && bi > kProbFloor) {
                    t.grad_mut(b).data()[i] -= g * ai / bi;
                }
            }
        };
    }
    return id;
}

Tape::Id Tape::weighted_sum(const std::vector<std::pair<Id, double>>& terms) {
    double total = 0.0;
    bool ng = false;
    for (const auto& [id, c] : terms) {
        const Mat& v = nodes_[id].value;
        if (v.rows() != 1 || v.cols() != 1) {
            throw ShapeError("weighted_sum: term is " + v.shape_str() + ", expected 1x1");
        }
        total += c * v(0, 0);
        ng = ng || nodes_[id].needs_grad;
    }
    const Id id = push(Mat::from_rows(1, 1, {total}), ng, nullptr);
    if (ng) {
        nodes_[id].backward = [terms, id](Tape& t) {
            const double g = t.grad(id)(0, 0);
            for (const auto& [tid, c] : terms) {
                if (t.needs_grad(tid)) t.grad_mut(tid)(0, 0) += g * c;
            }
        };
    }
    return id;
}

void Tape::backward(Id loss) {
    if (backward_done_) throw ParameterError("tape backward called twice");
    const Mat& lv = nodes_[loss].value;
    if (lv.rows() != 1 || lv.cols() != 1) {
        throw ShapeError("backward: loss must be 1x1, got " + lv.shape_str());
    }
    if (!nodes_[loss].needs_grad) {
        throw ParameterError("backward: loss does not depend on any parameter");
    }
    backward_done_ = true;
    grad_mut(loss)(0, 0) = 1.0;
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
        const auto& [is_sparse, idx] = *it;
        if (is_sparse) {
            if (sp_nodes_[idx].needs_grad && sp_nodes_[idx].backward) sp_nodes_[idx].backward(*this);
        } else {
            if (nodes_[idx].needs_grad && nodes_[idx].backward) nodes_[idx].backward(*this);
        }
    }
}

} // namespace grclust

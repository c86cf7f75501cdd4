#include "grclust/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grclust/errors.hpp"
#include "grclust/kernels.hpp"

namespace grclust {

SparseAdjacency SparseAdjacency::from_entries(
    std::size_t n, std::vector<std::tuple<std::size_t, std::size_t, double>> entries,
    NormState state) {
    for (const auto& [i, j, w] : entries) {
        if (i >= n || j >= n) {
            throw IndexError("sparse entry (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") outside [0, " + std::to_string(n) + ")");
        }
        if (!std::isfinite(w) || w < 0.0) {
            throw ParameterError("sparse entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") has invalid weight " + std::to_string(w));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                                : std::get<1>(a) < std::get<1>(b);
    });
    SparseAdjacency s;
    s.n_ = n;
    s.norm_state_ = state;
    s.row_ptr_.assign(n + 1, 0);
    s.col_idx_.reserve(entries.size());
    s.values_.reserve(entries.size());
    for (std::size_t e = 0; e < entries.size();) {
        const std::size_t i = std::get<0>(entries[e]);
        const std::size_t j = std::get<1>(entries[e]);
        double w = 0.0;
        while (e < entries.size() && std::get<0>(entries[e]) == i && std::get<1>(entries[e]) == j) {
            w += std::get<2>(entries[e]);
            ++e;
        }
        s.col_idx_.push_back(j);
        s.values_.push_back(w);
        s.row_ptr_[i + 1] = s.col_idx_.size();
    }
    for (std::size_t i = 1; i <= n; ++i) {
        s.row_ptr_[i] = std::max(s.row_ptr_[i], s.row_ptr_[i - 1]);
    }
    return s;
}

SparseAdjacency SparseAdjacency::from_undirected_edges(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges, double w) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    entries.reserve(edges.size() * 2);
    for (const auto& [i, j] : edges) {
        if (i == j) {
            throw IndexError("undirected edge list contains self-loop at node " + std::to_string(i));
        }
        entries.emplace_back(i, j, w);
        entries.emplace_back(j, i, w);
    }
    return from_entries(n, std::move(entries));
}

SparseAdjacency SparseAdjacency::identity(std::size_t n) {
    SparseAdjacency s;
    s.n_ = n;
    s.row_ptr_.resize(n + 1);
    s.col_idx_.resize(n);
    s.values_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        s.row_ptr_[i + 1] = i + 1;
        s.col_idx_[i] = i;
    }
    return s;
}

SparseAdjacency SparseAdjacency::from_csr(std::size_t n, std::vector<std::size_t> row_ptr,
                                          std::vector<std::size_t> col_idx,
                                          std::vector<double> values, NormState state) {
    SparseAdjacency s;
    s.n_ = n;
    s.row_ptr_ = std::move(row_ptr);
    s.col_idx_ = std::move(col_idx);
    s.values_ = std::move(values);
    s.norm_state_ = state;
    return s;
}

std::ptrdiff_t SparseAdjacency::find(std::size_t i, std::size_t j) const {
    const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return -1;
    return it - col_idx_.begin();
}

double SparseAdjacency::at(std::size_t i, std::size_t j) const {
    const std::ptrdiff_t e = find(i, j);
    return e < 0 ? 0.0 : values_[static_cast<std::size_t>(e)];
}

std::vector<double> SparseAdjacency::row_sums() const {
    std::vector<double> s(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) s[i] += values_[e];
    }
    return s;
}

double SparseAdjacency::max_asymmetry() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
            m = std::max(m, std::abs(values_[e] - at(col_idx_[e], i)));
        }
    }
    return m;
}

Mat SparseAdjacency::to_dense() const {
    Mat d(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) d(i, col_idx_[e]) = values_[e];
    }
    return d;
}

bool SparseAdjacency::approx_equal(const SparseAdjacency& o, double tol) const {
    if (n_ != o.n_ || row_ptr_ != o.row_ptr_ || col_idx_ != o.col_idx_) return false;
    for (std::size_t e = 0; e < values_.size(); ++e) {
        if (std::abs(values_[e] - o.values_[e]) > tol) return false;
    }
    return true;
}

namespace spops {

UnionPattern union_pattern(const SparseAdjacency& a, const SparseAdjacency& b) {
    if (a.n() != b.n()) {
        throw ShapeError("union_pattern: node counts " + std::to_string(a.n()) + " vs " +
                         std::to_string(b.n()));
    }
    UnionPattern u;
    const std::size_t n = a.n();
    u.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ea = a.row_ptr()[i], eb = b.row_ptr()[i];
        const std::size_t ea_end = a.row_ptr()[i + 1], eb_end = b.row_ptr()[i + 1];
        while (ea < ea_end || eb < eb_end) {
            const std::size_t ca = ea < ea_end ? a.col_idx()[ea] : SIZE_MAX;
            const std::size_t cb = eb < eb_end ? b.col_idx()[eb] : SIZE_MAX;
            if (ca < cb) {
                u.col_idx.push_back(ca);
                u.from_a.push_back(static_cast<std::ptrdiff_t>(ea++));
                u.from_b.push_back(-1);
            } else if (cb < ca) {
                u.col_idx.push_back(cb);
                u.from_a.push_back(-1);
                u.from_b.push_back(static_cast<std::ptrdiff_t>(eb++));
            } else {
                u.col_idx.push_back(ca);
                u.from_a.push_back(static_cast<std::ptrdiff_t>(ea++));
                u.from_b.push_back(static_cast<std::ptrdiff_t>(eb++));
            }
        }
        u.row_ptr[i + 1] = u.col_idx.size();
    }
    return u;
}

SymPattern sym_pattern(const SparseAdjacency& s) {
    const std::size_t n = s.n();
    const TransposePattern t = transpose_pattern(n, s.row_ptr(), s.col_idx());
    SymPattern p;
    p.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ea = s.row_ptr()[i], eb = t.row_ptr[i];
        const std::size_t ea_end = s.row_ptr()[i + 1], eb_end = t.row_ptr[i + 1];
        while (ea < ea_end || eb < eb_end) {
            const std::size_t ca = ea < ea_end ? s.col_idx()[ea] : SIZE_MAX;
            const std::size_t cb = eb < eb_end ? t.col_idx[eb] : SIZE_MAX;
            if (ca < cb) {
                p.col_idx.push_back(ca);
                p.fwd.push_back(static_cast<std::ptrdiff_t>(ea++));
                p.rev.push_back(-1);
            } else if (cb < ca) {
                p.col_idx.push_back(cb);
                p.fwd.push_back(-1);
                p.rev.push_back(static_cast<std::ptrdiff_t>(t.perm[eb++]));
            } else {
                p.col_idx.push_back(ca);
                p.fwd.push_back(static_cast<std::ptrdiff_t>(ea++));
                p.rev.push_back(static_cast<std::ptrdiff_t>(t.perm[eb++]));
            }
        }
        p.row_ptr[i + 1] = p.col_idx.size();
    }
    return p;
}

DiagPattern diag_pattern(const SparseAdjacency& s) {
    const std::size_t n = s.n();
    DiagPattern p;
    p.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        bool placed_diag = false;
        for (std::size_t e = s.row_ptr()[i]; e < s.row_ptr()[i + 1]; ++e) {
            const std::size_t j = s.col_idx()[e];
            if (!placed_diag && j > i) {
                p.col_idx.push_back(i);
                p.from_s.push_back(-1);
                placed_diag = true;
            }
            if (j == i) placed_diag = true;
            p.col_idx.push_back(j);
            p.from_s.push_back(static_cast<std::ptrdiff_t>(e));
        }
        if (!placed_diag) {
            p.col_idx.push_back(i);
            p.from_s.push_back(-1);
        }
        p.row_ptr[i + 1] = p.col_idx.size();
    }
    return p;
}

TransposePattern transpose_pattern(std::size_t n, const std::vector<std::size_t>& row_ptr,
                                   const std::vector<std::size_t>& col_idx) {
    TransposePattern t;
    t.row_ptr.assign(n + 1, 0);
    t.col_idx.resize(col_idx.size());
    t.perm.resize(col_idx.size());
    for (const std::size_t j : col_idx) t.row_ptr[j + 1]++;
    for (std::size_t i = 0; i < n; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
    std::vector<std::size_t> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
            const std::size_t j = col_idx[e];
            const std::size_t slot = cursor[j]++;
            t.col_idx[slot] = i;
            t.perm[slot] = e;
        }
    }
    return t;
}

} // namespace spops

SparseAdjacency symmetrize_mean(const SparseAdjacency& s) {
    const spops::SymPattern p = spops::sym_pattern(s);
    std::vector<double> v(p.col_idx.size());
    for (std::size_t e = 0; e < v.size(); ++e) {
        const double f = p.fwd[e] >= 0 ? s.values()[static_cast<std::size_t>(p.fwd[e])] : 0.0;
        const double r = p.rev[e] >= 0 ? s.values()[static_cast<std::size_t>(p.rev[e])] : 0.0;
        v[e] = 0.5 * (f + r);
    }
    return SparseAdjacency::from_csr(s.n(), p.row_ptr, p.col_idx, std::move(v), NormState::raw);
}

SparseAdjacency symmetrize_max(const SparseAdjacency& s) {
    const spops::SymPattern p = spops::sym_pattern(s);
    std::vector<double> v(p.col_idx.size());
    for (std::size_t e = 0; e < v.size(); ++e) {
        const double f = p.fwd[e] >= 0 ? s.values()[static_cast<std::size_t>(p.fwd[e])] : 0.0;
        const double r = p.rev[e] >= 0 ? s.values()[static_cast<std::size_t>(p.rev[e])] : 0.0;
        v[e] = std::max(f, r);
    }
    return SparseAdjacency::from_csr(s.n(), p.row_ptr, p.col_idx, std::move(v), NormState::raw);
}

SparseAdjacency sym_renormalize(const SparseAdjacency& a) {
    if (a.norm_state() != NormState::raw) {
        throw ParameterError("sym_renormalize: input already normalized");
    }
    const SparseAdjacency base = a.max_asymmetry() > 1e-12 ? symmetrize_mean(a) : a;
    const spops::DiagPattern p = spops::diag_pattern(base);
    const std::size_t n = base.n();
    // Degrees from S+I: the added self-loop keeps isolated nodes at degree 1.
    std::vector<double> deg(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 1.0;
        for (std::size_t e = base.row_ptr()[i]; e < base.row_ptr()[i + 1]; ++e) {
            d += base.values()[e];
        }
        deg[i] = d;
    }
    std::vector<double> v(p.col_idx.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
            const std::size_t j = p.col_idx[e];
            double w = p.from_s[e] >= 0 ? base.values()[static_cast<std::size_t>(p.from_s[e])] : 0.0;
            if (i == j) w += 1.0;
            v[e] = w / std::sqrt(deg[i] * deg[j]);
        }
    }
    return SparseAdjacency::from_csr(n, p.row_ptr, p.col_idx, std::move(v), NormState::sym_renorm);
}

SparseAdjacency row_normalize(const SparseAdjacency& g) {
    const std::vector<double> sums = g.row_sums();
    for (std::size_t i = 0; i < g.n(); ++i) {
        if (sums[i] <= 0.0) {
            throw DegenerateRowError("row_normalize: row " + std::to_string(i) +
                                     " has nonpositive sum " + std::to_string(sums[i]));
        }
    }
    std::vector<double> v(g.values());
    for (std::size_t i = 0; i < g.n(); ++i) {
        for (std::size_t e = g.row_ptr()[i]; e < g.row_ptr()[i + 1]; ++e) v[e] /= sums[i];
    }
    return SparseAdjacency::from_csr(g.n(), g.row_ptr(), g.col_idx(), std::move(v),
                                     NormState::row_stochastic);
}

SparseAdjacency row_stochastic_with_self_loops(const SparseAdjacency& s) {
    const spops::DiagPattern p = spops::diag_pattern(s);
    std::vector<double> v(p.col_idx.size());
    for (std::size_t i = 0; i < s.n(); ++i) {
        for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
            double w = p.from_s[e] >= 0 ? s.values()[static_cast<std::size_t>(p.from_s[e])] : 0.0;
            if (p.col_idx[e] == i) w += 1.0;
            v[e] = w;
        }
    }
    return row_normalize(
        SparseAdjacency::from_csr(s.n(), p.row_ptr, p.col_idx, std::move(v), NormState::raw));
}

Mat sp_dense_mul(const SparseAdjacency& s, const Mat& x) {
    if (x.rows() != s.n()) {
        throw ShapeError("sp_dense_mul: graph n=" + std::to_string(s.n()) + " against " +
                         x.shape_str());
    }
    Mat out;
    kern::spmm(s.n(), s.row_ptr(), s.col_idx(), s.values(), x, out);
    return out;
}

} // namespace grclust

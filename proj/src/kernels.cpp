#include "grclust/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace grclust::kern {

namespace {

void check_mul(const Mat& a, const Mat& b, std::size_t ar, std::size_t ac, std::size_t br,
               std::size_t bc, const char* what) {
    if (ac != br) {
        throw ShapeError(std::string(what) + ": inner dimensions " + std::to_string(ac) +
                         " vs " + std::to_string(br) + " (operands " + a.shape_str() + ", " +
                         b.shape_str() + ")");
    }
    (void)ar;
    (void)bc;
}

} // namespace

void gemm(const Mat& a, const Mat& b, Mat& out) {
    check_mul(a, b, a.rows(), a.cols(), b.rows(), b.cols(), "gemm");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    out.resize(m, n);
    // 4-row micro kernel: each loaded row of b is reused across four rows of a.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ibs = 0; ibs < static_cast<std::ptrdiff_t>(m); ibs += 4) {
        const std::size_t i0 = static_cast<std::size_t>(ibs);
        const std::size_t iend = std::min(i0 + 4, m);
        if (iend - i0 == 4) {
            double* c0 = out.row(i0);
            double* c1 = out.row(i0 + 1);
            double* c2 = out.row(i0 + 2);
            double* c3 = out.row(i0 + 3);
            for (std::size_t p = 0; p < k; ++p) {
                const double a0 = a(i0, p), a1 = a(i0 + 1, p);
                const double a2 = a(i0 + 2, p), a3 = a(i0 + 3, p);
                const double* br = b.row(p);
#pragma omp simd
                for (std::size_t j = 0; j < n; ++j) {
                    c0[j] += a0 * br[j];
                    c1[j] += a1 * br[j];
                    c2[j] += a2 * br[j];
                    c3[j] += a3 * br[j];
                }
            }
        } else {
            for (std::size_t i = i0; i < iend; ++i) {
                double* c = out.row(i);
                for (std::size_t p = 0; p < k; ++p) {
                    const double av = a(i, p);
                    const double* br = b.row(p);
#pragma omp simd
                    for (std::size_t j = 0; j < n; ++j) c[j] += av * br[j];
                }
            }
        }
    }
}

void gemm_tn(const Mat& a, const Mat& b, Mat& out) {
    check_mul(a, b, a.cols(), a.rows(), b.rows(), b.cols(), "gemm_tn");
    const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
    out.resize(m, n);
    // Columns i..i+3 of a are adjacent in each row, so the inner loads stay
    // contiguous while four output rows share one streamed row of b.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ibs = 0; ibs < static_cast<std::ptrdiff_t>(m); ibs += 4) {
        const std::size_t i0 = static_cast<std::size_t>(ibs);
        const std::size_t iend = std::min(i0 + 4, m);
        if (iend - i0 == 4) {
            double* c0 = out.row(i0);
            double* c1 = out.row(i0 + 1);
            double* c2 = out.row(i0 + 2);
            double* c3 = out.row(i0 + 3);
            for (std::size_t p = 0; p < k; ++p) {
                const double* ar = a.row(p) + i0;
                const double a0 = ar[0], a1 = ar[1], a2 = ar[2], a3 = ar[3];
                const double* br = b.row(p);
#pragma omp simd
                for (std::size_t j = 0; j < n; ++j) {
                    c0[j] += a0 * br[j];
                    c1[j] += a1 * br[j];
                    c2[j] += a2 * br[j];
                    c3[j] += a3 * br[j];
                }
            }
        } else {
            for (std::size_t i = i0; i < iend; ++i) {
                double* c = out.row(i);
                for (std::size_t p = 0; p < k; ++p) {
                    const double av = a(p, i);
                    const double* br = b.row(p);
#pragma omp simd
                    for (std::size_t j = 0; j < n; ++j) c[j] += av * br[j];
                }
            }
        }
    }
}

void gemm_nt(const Mat& a, const Mat& b, Mat& out) {
    check_mul(a, b, a.rows(), a.cols(), b.cols(), b.rows(), "gemm_nt");
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    out.resize(m, n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double* ar = a.row(i);
        double* c = out.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* br = b.row(j);
            double acc = 0.0;
#pragma omp simd reduction(+ : acc)
            for (std::size_t p = 0; p < k; ++p) acc += ar[p] * br[p];
            c[j] = acc;
        }
    }
}

void add_row_vector(Mat& x, const Mat& b) {
    if (b.rows() != 1 || b.cols() != x.cols()) {
        throw ShapeError("add_row_vector: bias " + b.shape_str() + " against " + x.shape_str());
    }
    const double* bv = b.row(0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.rows()); ++ii) {
        double* r = x.row(static_cast<std::size_t>(ii));
#pragma omp simd
        for (std::size_t j = 0; j < x.cols(); ++j) r[j] += bv[j];
    }
}

void relu(const Mat& x, Mat& out) {
    out.resize(x.rows(), x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.size()); ++ii) {
        out.data()[ii] = x.data()[ii] > 0.0 ? x.data()[ii] : 0.0;
    }
}

void leaky_relu(const Mat& x, double slope, Mat& out) {
    out.resize(x.rows(), x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.size()); ++ii) {
        const double v = x.data()[ii];
        out.data()[ii] = v > 0.0 ? v : slope * v;
    }
}

void row_softmax(const Mat& x, Mat& out) {
    out.resize(x.rows(), x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.rows()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double* r = x.row(i);
        double* o = out.row(i);
        double mx = r[0];
        for (std::size_t j = 1; j < x.cols(); ++j) mx = std::max(mx, r[j]);
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            o[j] = std::exp(r[j] - mx);
            s += o[j];
        }
        const double inv = 1.0 / s;
        for (std::size_t j = 0; j < x.cols(); ++j) o[j] *= inv;
    }
}

void row_l2_normalize(const Mat& x, Mat& out, double eps) {
    out.resize(x.rows(), x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.rows()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double* r = x.row(i);
        double* o = out.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) s += r[j] * r[j];
        const double nrm = std::sqrt(s);
        if (nrm <= eps) {
            for (std::size_t j = 0; j < x.cols(); ++j) o[j] = r[j];
        } else {
            const double inv = 1.0 / nrm;
            for (std::size_t j = 0; j < x.cols(); ++j) o[j] = r[j] * inv;
        }
    }
}

void col_scale(const Mat& x, const Mat& w, std::size_t col, Mat& out) {
    if (w.rows() != x.rows() || col >= w.cols()) {
        throw ShapeError("col_scale: weights " + w.shape_str() + " col " + std::to_string(col) +
                         " against " + x.shape_str());
    }
    out.resize(x.rows(), x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.rows()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double s = w(i, col);
        const double* r = x.row(i);
        double* o = out.row(i);
#pragma omp simd
        for (std::size_t j = 0; j < x.cols(); ++j) o[j] = s * r[j];
    }
}

void transpose(const Mat& x, Mat& out) {
    out.resize(x.cols(), x.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(x.rows()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < x.cols(); ++j) out(j, i) = x(i, j);
    }
}

void concat_cols(const std::vector<const Mat*>& parts, Mat& out) {
    if (parts.empty()) throw ShapeError("concat_cols: no parts");
    const std::size_t rows = parts[0]->rows();
    std::size_t cols = 0;
    for (const Mat* p : parts) {
        if (p->rows() != rows) {
            throw ShapeError("concat_cols: row mismatch " + std::to_string(rows) + " vs " +
                             p->shape_str());
        }
        cols += p->cols();
    }
    out.resize(rows, cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rows); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* o = out.row(i);
        for (const Mat* p : parts) {
            std::memcpy(o, p->row(i), p->cols() * sizeof(double));
            o += p->cols();
        }
    }
}

void spmm(std::size_t n, const std::vector<std::size_t>& row_ptr,
          const std::vector<std::size_t>& col_idx, const std::vector<double>& values,
          const Mat& x, Mat& out) {
    out.resize(n, x.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* o = out.row(i);
        for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
            const double v = values[e];
            const double* r = x.row(col_idx[e]);
#pragma omp simd
            for (std::size_t j = 0; j < x.cols(); ++j) o[j] += v * r[j];
        }
    }
}

double sum(const Mat& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x.data()[i];
    return s;
}

double frobenius_sq_diff(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("frobenius_sq_diff: shapes " + a.shape_str() + " vs " + b.shape_str());
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        s += d * d;
    }
    return s;
}

namespace serial {

void gemm(const Mat& a, const Mat& b, Mat& out) {
    check_mul(a, b, a.rows(), a.cols(), b.rows(), b.cols(), "serial::gemm");
    out.resize(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* c = out.row(i);
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double av = a(i, p);
            const double* br = b.row(p);
            for (std::size_t j = 0; j < b.cols(); ++j) c[j] += av * br[j];
        }
    }
}

void gemm_tn(const Mat& a, const Mat& b, Mat& out) {
    check_mul(a, b, a.cols(), a.rows(), b.rows(), b.cols(), "serial::gemm_tn");
    out.resize(a.cols(), b.cols());
    for (std::size_t p = 0; p < a.rows(); ++p) {
        const double* ar = a.row(p);
        const double* br = b.row(p);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            double* c = out.row(i);
            const double av = ar[i];
            for (std::size_t j = 0; j < b.cols(); ++j) c[j] += av * br[j];
        }
    }
}

void gemm_nt(const Mat& a, const Mat& b, Mat& out) {
    check_mul(a, b, a.rows(), a.cols(), b.cols(), b.rows(), "serial::gemm_nt");
    out.resize(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) acc += a(i, p) * b(j, p);
            out(i, j) = acc;
        }
    }
}

void row_softmax(const Mat& x, Mat& out) {
    out.resize(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double mx = x(i, 0);
        for (std::size_t j = 1; j < x.cols(); ++j) mx = std::max(mx, x(i, j));
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            out(i, j) = std::exp(x(i, j) - mx);
            s += out(i, j);
        }
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) /= s;
    }
}

void row_l2_normalize(const Mat& x, Mat& out, double eps) {
    out.resize(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * x(i, j);
        const double nrm = std::sqrt(s);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            out(i, j) = nrm <= eps ? x(i, j) : x(i, j) / nrm;
        }
    }
}

void spmm(std::size_t n, const std::vector<std::size_t>& row_ptr,
          const std::vector<std::size_t>& col_idx, const std::vector<double>& values,
          const Mat& x, Mat& out) {
    out.resize(n, x.cols());
    for (std::size_t i = 0; i < n; ++i) {
        double* o = out.row(i);
        for (std::size_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) {
            const double v = values[e];
            const double* r = x.row(col_idx[e]);
            for (std::size_t j = 0; j < x.cols(); ++j) o[j] += v * r[j];
        }
    }
}

} // namespace serial

} // namespace grclust::kern

#include "grclust/refine.hpp"

#include <cmath>
#include <string>

#include "grclust/errors.hpp"
#include "grclust/kernels.hpp"

namespace grclust {

RefinerParams make_refiner(std::size_t n, const Rng& seed_rng) {
    Rng r = seed_rng.fork("refiner_wa");
    return RefinerParams{init_fan_uniform(2 * n, 2, r)};
}

Mat embedding_similarity(const Mat& za) {
    Mat unit;
    kern::row_l2_normalize(za, unit);
    Mat s;
    kern::gemm_nt(unit, unit, s);
    for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) = 0.0;
    return s;
}

SparseAdjacency nearest_neighbor_graph(const Mat& s) {
    if (s.rows() != s.cols()) {
        throw ShapeError("nearest_neighbor_graph: similarity must be square, got " + s.shape_str());
    }
    const std::size_t n = s.rows();
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    if (n < 2) return SparseAdjacency::from_entries(n, {});
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t arg = i == 0 ? 1 : 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && s(i, j) > s(i, arg)) arg = j;
        }
        entries.emplace_back(i, arg, s(i, arg));
    }
    return SparseAdjacency::from_entries(n, std::move(entries));
}

SparseAdjacency symmetrize_selfloop(const SparseAdjacency& g) {
    const SparseAdjacency sym = symmetrize_max(g);
    // Force unit self-loops on top of the symmetric support.
    const spops::DiagPattern p = spops::diag_pattern(sym);
    std::vector<double> v(p.col_idx.size());
    for (std::size_t i = 0; i < sym.n(); ++i) {
        for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
            v[e] = p.col_idx[e] == i
                       ? 1.0
                       : sym.values()[static_cast<std::size_t>(p.from_s[e])];
        }
    }
    return row_normalize(
        SparseAdjacency::from_csr(sym.n(), p.row_ptr, p.col_idx, std::move(v), NormState::raw));
}

SparseAdjacency induced_graph(const Mat& za) {
    const std::size_t n = za.rows();
    if (n < 2) {
        return symmetrize_selfloop(nearest_neighbor_graph(Mat(n, n)));
    }
    Mat unit;
    kern::row_l2_normalize(za, unit);
    std::vector<std::size_t> arg(n);
    std::vector<double> best(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const double* ri = unit.row(i);
        std::size_t a = i == 0 ? 1 : 0;
        double bv = -2.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double* rj = unit.row(j);
            double dot = 0.0;
#pragma omp simd reduction(+ : dot)
            for (std::size_t t = 0; t < unit.cols(); ++t) dot += ri[t] * rj[t];
            if (dot > bv) {
                bv = dot;
                a = j;
            }
        }
        arg[i] = a;
        best[i] = bv;
    }
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) entries.emplace_back(i, arg[i], best[i]);
    return symmetrize_selfloop(SparseAdjacency::from_entries(n, std::move(entries)));
}

SparseAdjacency fuse_graphs(const SparseAdjacency& az, const SparseAdjacency& a,
                            const RefinerParams& p, double slope) {
    const std::size_t n = az.n();
    if (a.n() != n) {
        throw ShapeError("fuse_graphs: node counts " + std::to_string(n) + " vs " +
                         std::to_string(a.n()));
    }
    if (p.wa.rows() != 2 * n || p.wa.cols() != 2) {
        throw ShapeError("fuse_graphs: weight " + p.wa.shape_str() + " for n=" + std::to_string(n));
    }
    // [A_z ‖ A] Wa = A_z * Wa_top + A * Wa_bottom, evaluated sparsely.
    Mat wtop(n, 2), wbot(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            wtop(i, j) = p.wa(i, j);
            wbot(i, j) = p.wa(n + i, j);
        }
    }
    Mat scores = sp_dense_mul(az, wtop);
    const Mat sb = sp_dense_mul(a, wbot);
    for (std::size_t i = 0; i < scores.size(); ++i) scores.data()[i] += sb.data()[i];
    Mat act;
    kern::leaky_relu(scores, slope, act);
    Mat soft;
    kern::row_softmax(act, soft);
    Mat v;
    kern::row_l2_normalize(soft, v);

    const spops::UnionPattern u = spops::union_pattern(az, a);
    std::vector<double> vals(u.col_idx.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = u.row_ptr[i]; e < u.row_ptr[i + 1]; ++e) {
            const double za = u.from_a[e] >= 0 ? az.values()[static_cast<std::size_t>(u.from_a[e])] : 0.0;
            const double aa = u.from_b[e] >= 0 ? a.values()[static_cast<std::size_t>(u.from_b[e])] : 0.0;
            vals[e] = v(i, 0) * za + v(i, 1) * aa;
        }
    }
    return SparseAdjacency::from_csr(n, u.row_ptr, u.col_idx, std::move(vals), NormState::raw);
}

} // namespace grclust

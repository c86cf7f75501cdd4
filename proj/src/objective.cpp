#include "grclust/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "grclust/errors.hpp"
#include "grclust/kernels.hpp"

namespace grclust {

namespace {

constexpr double kProbFloor = 1e-12;

double sq_dist(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
#pragma omp simd reduction(+ : acc)
    for (std::size_t j = 0; j < d; ++j) {
        const double t = a[j] - b[j];
        acc += t * t;
    }
    return acc;
}

} // namespace

Mat soft_assign_q(const Mat& h, const ClusterHead& head) {
    if (h.cols() != head.dim()) {
        throw ShapeError("soft_assign_q: embeddings " + h.shape_str() + " vs centroids " +
                         head.centroids.shape_str());
    }
    if (head.num_clusters() == 0) throw ParameterError("soft_assign_q: empty cluster head");
    const std::size_t n = h.rows();
    const std::size_t k = head.num_clusters();
    const double expo = -(head.alpha + 1.0) / 2.0;
    Mat q(n, k);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d2 = sq_dist(h.row(i), head.centroids.row(j), h.cols());
            const double v = std::pow(1.0 + d2 / head.alpha, expo);
            q(i, j) = v;
            rowsum += v;
        }
        const double inv = 1.0 / rowsum;
        for (std::size_t j = 0; j < k; ++j) q(i, j) *= inv;
    }
    return q;
}

Mat target_p(const Mat& za) {
    const std::size_t n = za.rows();
    const std::size_t k = za.cols();
    if (n == 0 || k == 0) throw ShapeError("target_p: empty assignment matrix");
    std::vector<double> colsum(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) colsum[j] += za(i, j);
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (colsum[j] <= 0.0) {
            throw ColumnCollapseError("target_p: cluster column " + std::to_string(j) +
                                      " has zero total mass");
        }
    }
    Mat p(n, k);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double v = za(i, j) * za(i, j) / colsum[j];
            p(i, j) = v;
            rowsum += v;
        }
        if (rowsum <= 0.0) {
            // softmax rows always carry mass; reachable only on malformed input
            p(i, 0) = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double inv = 1.0 / rowsum;
        for (std::size_t j = 0; j < k; ++j) p(i, j) *= inv;
    }
    if (!p.all_finite()) throw DegenerateRowError("target_p: a row of the assignment has no mass");
    return p;
}

double kl_divergence(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) {
        throw ShapeError("kl_divergence: " + a.shape_str() + " vs " + b.shape_str());
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double av = a.data()[i];
        const double bv = b.data()[i];
        if (av < 0.0 || bv < 0.0) {
            throw DomainError("kl_divergence: negative probability entry");
        }
        const double af = std::max(av, kProbFloor);
        const double bf = std::max(bv, kProbFloor);
        acc += av * (std::log(af) - std::log(bf));
    }
    return acc;
}

double jeffreys_divergence(const Mat& a, const Mat& b) {
    return kl_divergence(a, b) + kl_divergence(b, a);
}

LossTerms total_loss(const Mat& x, const Mat& xhat, const Mat& q, const Mat& p,
                     const Mat& za, double lambda1, double lambda2, double lambda3) {
    if (lambda1 <= 0.0 || lambda2 <= 0.0 || lambda3 <= 0.0) {
        throw ParameterError("total_loss: divergence weights must be positive");
    }
    if (!x.same_shape(xhat)) {
        throw ShapeError("total_loss: input " + x.shape_str() + " vs reconstruction " +
                         xhat.shape_str());
    }
    LossTerms t;
    t.reconstruction = kern::frobenius_sq_diff(x, xhat) / static_cast<double>(x.rows());
    t.pz = jeffreys_divergence(p, za);
    t.pq = jeffreys_divergence(p, q);
    t.zq = jeffreys_divergence(za, q);
    t.total = t.reconstruction + lambda1 * t.pz + lambda2 * t.pq + lambda3 * t.zq;
    return t;
}

std::vector<std::size_t> hard_assign(const Mat& za) {
    if (za.cols() == 0) throw ShapeError("hard_assign: empty assignment matrix");
    std::vector<std::size_t> out(za.rows());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < za.rows(); ++i) {
        std::size_t best = 0;
        double bv = za(i, 0);
        for (std::size_t j = 1; j < za.cols(); ++j) {
            if (za(i, j) > bv) { // strict keeps the lowest index on ties
                bv = za(i, j);
                best = j;
            }
        }
        out[i] = best;
    }
    return out;
}

namespace {

// One seeded Lloyd run; returns inertia, centroids written in place.
double kmeans_once(const Mat& h, std::size_t k, Rng& rng, std::size_t max_iters,
                   Mat& centroids) {
    const std::size_t n = h.rows();
    const std::size_t d = h.cols();

    // k-means++ seeding: distance-squared weighted picks.
    std::vector<std::size_t> seed_idx;
    seed_idx.push_back(rng.index(n));
    std::vector<double> dist2(n);
    for (std::size_t i = 0; i < n; ++i) {
        dist2[i] = sq_dist(h.row(i), h.row(seed_idx[0]), d);
    }
    while (seed_idx.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += dist2[i];
        std::size_t pick;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double run = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                run += dist2[i];
                if (run >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.index(n); // all remaining points coincide with a center
        }
        seed_idx.push_back(pick);
        for (std::size_t i = 0; i < n; ++i) {
            dist2[i] = std::min(dist2[i], sq_dist(h.row(i), h.row(pick), d));
        }
    }
    centroids = Mat(k, d);
    for (std::size_t c = 0; c < k; ++c) {
        const double* src = h.row(seed_idx[c]);
        std::copy(src, src + d, centroids.row(c));
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> best_d2(n, 0.0);
    double inertia = 0.0;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = sq_dist(h.row(i), centroids.row(0), d);
            for (std::size_t c = 1; c < k; ++c) {
                const double cd = sq_dist(h.row(i), centroids.row(c), d);
                if (cd < bd) { // strict keeps the lowest index on ties
                    bd = cd;
                    best = c;
                }
            }
            best_d2[i] = bd;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) inertia += best_d2[i];
        if (!changed && iter > 0) break;

        Mat sums(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = assign[i];
            ++counts[c];
            double* dst = sums.row(c);
            const double* src = h.row(i);
            for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // revive with the point farthest from its current center
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i) {
                    if (best_d2[i] > best_d2[far]) far = i;
                }
                const double* src = h.row(far);
                std::copy(src, src + d, centroids.row(c));
                best_d2[far] = 0.0;
                continue;
            }
            const double inv = 1.0 / static_cast<double>(counts[c]);
            double* dst = centroids.row(c);
            const double* src = sums.row(c);
            for (std::size_t j = 0; j < d; ++j) dst[j] = src[j] * inv;
        }
    }
    return inertia;
}

} // namespace

Mat kmeans_centroids(const Mat& h, std::size_t k, Rng& rng, std::size_t restarts,
                     std::size_t max_iters) {
    if (k == 0 || k > h.rows()) {
        throw ParameterError("kmeans_centroids: k=" + std::to_string(k) + " for n=" +
                             std::to_string(h.rows()));
    }
    if (restarts == 0) throw ParameterError("kmeans_centroids: restarts must be >= 1");
    Mat best;
    double best_inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < restarts; ++r) {
        Mat cand;
        const double inertia = kmeans_once(h, k, rng, max_iters, cand);
        if (inertia < best_inertia) {
            best_inertia = inertia;
            best = std::move(cand);
        }
    }
    return best;
}

} // namespace grclust

#pragma once

#include <cstddef>
#include <vector>

#include "grclust/mat.hpp"
#include "grclust/rng.hpp"

namespace grclust {

// Student's-t cluster head. centroids is k x d, alpha fixed at 1.
struct ClusterHead {
    Mat centroids;
    double alpha = 1.0;

    std::size_t num_clusters() const { return centroids.rows(); }
    std::size_t dim() const { return centroids.cols(); }
};

// q_ij = (1 + ||h_i - mu_j||^2 / alpha)^-((alpha+1)/2), row-normalized.
Mat soft_assign_q(const Mat& h, const ClusterHead& head);

// p_ij = (z_ij^2 / colsum_j) / rowsum_i. Throws ColumnCollapseError when a
// column of za sums to zero (no mass left to sharpen).
Mat target_p(const Mat& za);

// Elementwise sum_ij a*log(a/b) with both operands floored at 1e-12.
// Throws DomainError on negative entries, ShapeError on mismatch.
double kl_divergence(const Mat& a, const Mat& b);

// kl(a,b) + kl(b,a).
double jeffreys_divergence(const Mat& a, const Mat& b);

struct LossTerms {
    double reconstruction = 0.0;
    double pz = 0.0; // divergence between target and soft graph assignment
    double pq = 0.0; // divergence between target and cluster head
    double zq = 0.0; // divergence between graph assignment and cluster head
    double total = 0.0;
};

// total = rec + l1*J(p,za) + l2*J(p,q) + l3*J(za,q). Weights must be > 0.
LossTerms total_loss(const Mat& x, const Mat& xhat, const Mat& q, const Mat& p,
                     const Mat& za, double lambda1, double lambda2, double lambda3);

// Row argmax; ties pick the lowest column index.
std::vector<std::size_t> hard_assign(const Mat& za);

// Lloyd's algorithm with k-means++ seeding, best inertia over `restarts`
// independent runs. Returns k x d centroids.
Mat kmeans_centroids(const Mat& h, std::size_t k, Rng& rng, std::size_t restarts = 20,
                     std::size_t max_iters = 300);

} // namespace grclust

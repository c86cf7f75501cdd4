#pragma once

#include <vector>

#include "grclust/mat.hpp"
#include "grclust/rng.hpp"
#include "grclust/sparse.hpp"

namespace grclust {

// Scalable variant head: a small prediction map X -> E_0 and a learned
// teleport probability for PageRank-style propagation.
struct PropagationParams {
    std::vector<Mat> mlp_w; // [d x hidden, hidden x clusters] or [d x clusters]
    std::vector<Mat> mlp_b; // matching 1 x width biases
    Mat theta;              // 1x1, clamped to [0,1] after every optimizer step

    std::size_t num_clusters() const { return mlp_w.back().cols(); }
};

// hidden == 0 builds a single linear layer; otherwise d -> hidden (ReLU) ->
// clusters (linear). Theta is drawn uniform on [0,1).
PropagationParams make_propagation(std::size_t input_dim, std::size_t hidden,
                                   std::size_t num_clusters, const Rng& seed_rng);

Mat predict_e0(const Mat& x, const PropagationParams& p);

// E_i = softmax((1-theta) E_0 + theta * A * E_{i-1}), i = 1..tau, E_0 as the
// initial iterate. A must be row_stochastic.
Mat propagate_learned(const Mat& e0, const SparseAdjacency& a, double theta, std::size_t tau);

// Fixed-teleport baseline: E_i = softmax((1-rho) A * E_{i-1} + rho * E_0).
Mat propagate_fixed(const Mat& e0, const SparseAdjacency& a, double rho, std::size_t tau);

} // namespace grclust

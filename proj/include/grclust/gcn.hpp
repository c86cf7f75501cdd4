#pragma once

#include <utility>
#include <vector>

#include "grclust/mat.hpp"
#include "grclust/rng.hpp"
#include "grclust/sparse.hpp"

namespace grclust {

// Graph branch of the full variant: l GCN layers over the same widths as the
// encoder, per-layer fusion of the attribute and graph streams for layers
// 1..l-1 (the fused stream feeds the next GCN layer), multi-scale aggregation
// over [Z_1..Z_l, H_l], and the final simplex embedding.
struct GcnFusionParams {
    std::vector<Mat> gcn_w;  // gcn_w[i]: widths[i] x widths[i+1], no bias
    std::vector<Mat> fuse_w; // fuse_w[i]: 2*widths[i+1] x 2, for i = 0..l-2
    Mat scale_w;             // (sum of scale widths) x (l+1)
    Mat final_w;             // (sum of scale widths) x num_clusters

    std::size_t layers() const { return gcn_w.size(); }
};

GcnFusionParams make_gcn(const std::vector<std::size_t>& widths, std::size_t num_clusters,
                         const Rng& seed_rng);

// Z_i = LReLU(A_norm * Z'_{i-1} * W_i); A_norm must be sym_renorm.
Mat gcn_layer(const Mat& zprev, const SparseAdjacency& a_norm, const Mat& w, double slope);

// Per-node weights m = l2(softmax(LReLU([H‖Z] Wf))) (n x 2, strictly
// positive) and the fused stream Z' = m_1 ⊙ H + m_2 ⊙ Z.
std::pair<Mat, Mat> layer_fuse(const Mat& h, const Mat& z, const Mat& wf, double slope);

// U = l2(softmax(LReLU([scales] Ws))) and Z' = [u_1 ⊙ scale_1 ‖ ... ].
Mat multiscale_fuse(const std::vector<const Mat*>& scales, const Mat& ws, double slope);

// Z_a = row-softmax(A_norm * Z' * Wz); rows on the simplex.
Mat final_embed(const Mat& zprime, const SparseAdjacency& a_norm, const Mat& wz);

} // namespace grclust

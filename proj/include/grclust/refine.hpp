#pragma once

#include "grclust/mat.hpp"
#include "grclust/rng.hpp"
#include "grclust/sparse.hpp"

namespace grclust {

// Learned fusion weights for combining the embedding-induced graph with the
// current working graph. Transductive: the first dimension is 2n.
struct RefinerParams {
    Mat wa; // 2n x 2
};

RefinerParams make_refiner(std::size_t n, const Rng& seed_rng);

// Cosine similarity of embedding rows with the diagonal zeroed (n x n dense).
Mat embedding_similarity(const Mat& za);

// Keeps only each row's maximum entry (tie: lowest column); exactly n stored
// entries. Input must have a zero diagonal.
SparseAdjacency nearest_neighbor_graph(const Mat& s);

// max-symmetrize, set the diagonal to 1, then row-normalize.
SparseAdjacency symmetrize_selfloop(const SparseAdjacency& g);

// The three steps above without materializing the dense similarity matrix;
// value-identical to composing them.
SparseAdjacency induced_graph(const Mat& za);

// V = l2(softmax(LReLU([A_z ‖ A] Wa))) per node; A_f = v_1 ⊙ A_z + v_2 ⊙ A
// over the union support. Result state: raw.
SparseAdjacency fuse_graphs(const SparseAdjacency& az, const SparseAdjacency& a,
                            const RefinerParams& p, double slope);

} // namespace grclust

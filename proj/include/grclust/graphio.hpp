#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grclust/mat.hpp"
#include "grclust/sparse.hpp"

namespace grclust {

// Directed or undirected edge pairs over n nodes; no self-loops stored
// (normalization adds them later).
struct EdgeList {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

struct DatasetBundle {
    std::string name;
    Mat features;                            // n x d
    std::optional<std::vector<int>> labels;  // remapped to 0..num_clusters-1
    std::optional<EdgeList> graph;           // deduplicated undirected pairs
    std::size_t num_clusters = 0;

    std::size_t n() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
};

// Text formats (see docs/formats.md):
//   features: one node per line, whitespace- or comma-separated decimals
//   labels:   one nonnegative integer per line
//   graph:    one edge per line, "i j", 0-indexed; undirected edges may
//             appear once or twice (duplicates and self-loops dropped)
Mat load_feature_matrix(const std::string& path);
void save_feature_matrix(const std::string& path, const Mat& m);

std::vector<int> load_labels(const std::string& path);
void save_labels(const std::string& path, const std::vector<int>& labels);

// Distinct values mapped to 0..count-1 in sorted order.
std::vector<int> remap_labels(const std::vector<int>& raw);

EdgeList load_edge_list(const std::string& path, std::size_t n);
void save_edge_list(const std::string& path, const EdgeList& edges);

DatasetBundle load_dataset(const std::string& features_path,
                           const std::optional<std::string>& labels_path,
                           const std::optional<std::string>& graph_path, std::size_t num_clusters,
                           const std::string& name = "");

// Directed k-nearest-neighbor graph under cosine similarity on raw features;
// exactly n*k edges. Ties go to the lowest index; zero-norm rows get
// similarity 0 everywhere and fall back to the k lowest-index other nodes.
EdgeList build_knn_graph(const Mat& features, std::size_t k);

// Unweighted adjacency from an edge list: unordered pairs deduplicated, both
// directions stored with weight 1.
SparseAdjacency to_adjacency(const EdgeList& edges);

// Per-feature min-max scaling to [0, 1], applied only when the matrix has a
// negative entry (reconstruction targets must be reachable through ReLU).
// Constant features with a negative value map to 0.
Mat scale_features_unit(const Mat& x);

} // namespace grclust

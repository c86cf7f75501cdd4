#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace grclust {

// Clustering evaluation. Labels are nonnegative and need not be contiguous;
// every metric is invariant under independent relabelings of either side.
// Entropies use natural logarithms.

// Fraction of agreements under the best one-to-one cluster-to-class matching
// (Hungarian assignment on the confusion matrix).
double clustering_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

enum class NmiNorm { geometric, arithmetic };

// I(U;V) normalized by the chosen mean of the entropies. Two constant
// labelings agree perfectly (1.0); exactly one constant labeling carries no
// mutual information (0.0).
double normalized_mutual_info(const std::vector<int>& predicted, const std::vector<int>& truth,
                              NmiNorm norm = NmiNorm::geometric);

// Pair-counting index adjusted for chance; 1.0 when the partitions coincide.
double adjusted_rand_index(const std::vector<int>& predicted, const std::vector<int>& truth);

// (homogeneity, completeness): 1 - H(truth|pred)/H(truth) and
// 1 - H(pred|truth)/H(pred), with the 0-entropy conventions fixed at 1.0.
std::pair<double, double> homogeneity_completeness(const std::vector<int>& predicted,
                                                   const std::vector<int>& truth);

inline std::vector<int> to_int_labels(const std::vector<std::size_t>& v) {
    return std::vector<int>(v.begin(), v.end());
}

} // namespace grclust

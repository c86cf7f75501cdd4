#include "grclust/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "grclust/errors.hpp"

namespace grclust {

namespace {

// Contingency counts with compacted label spaces.
struct Contingency {
    std::size_t n = 0;
    std::size_t rows = 0; // distinct predicted labels
    std::size_t cols = 0; // distinct truth labels
    std::vector<std::int64_t> counts; // rows x cols
    std::vector<std::int64_t> row_sum, col_sum;

    std::int64_t at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }
};

std::vector<std::size_t> compact(const std::vector<int>& labels, std::size_t& distinct) {
    std::vector<int> sorted;
    sorted.reserve(labels.size());
    for (int v : labels) {
        if (v < 0) throw ParameterError("metrics: negative label " + std::to_string(v));
        sorted.push_back(v);
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    distinct = sorted.size();
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = static_cast<std::size_t>(
            std::lower_bound(sorted.begin(), sorted.end(), labels[i]) - sorted.begin());
    }
    return out;
}

Contingency build_contingency(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) {
        throw ShapeError("metrics: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " truths");
    }
    if (predicted.empty()) throw ShapeError("metrics: empty labelings");
    Contingency c;
    c.n = predicted.size();
    const std::vector<std::size_t> p = compact(predicted, c.rows);
    const std::vector<std::size_t> t = compact(truth, c.cols);
    c.counts.assign(c.rows * c.cols, 0);
    c.row_sum.assign(c.rows, 0);
    c.col_sum.assign(c.cols, 0);
    for (std::size_t i = 0; i < c.n; ++i) {
        ++c.counts[p[i] * c.cols + t[i]];
        ++c.row_sum[p[i]];
        ++c.col_sum[t[i]];
    }
    return c;
}

// Min-cost assignment on a square integer matrix via shortest augmenting
// paths with potentials. Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<std::int64_t>& cost, std::size_t m) {
    const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(m + 1, 0), v(m + 1, 0), minv(m + 1);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        minv.assign(m + 1, inf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            std::int64_t delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = cost[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(m);
    for (std::size_t j = 1; j <= m; ++j) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

double entropy(const std::vector<std::int64_t>& counts, std::size_t n) {
    double h = 0.0;
    for (std::int64_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    return h;
}

double mutual_info(const Contingency& c) {
    double mi = 0.0;
    const double n = static_cast<double>(c.n);
    for (std::size_t i = 0; i < c.rows; ++i) {
        for (std::size_t j = 0; j < c.cols; ++j) {
            const std::int64_t nij = c.at(i, j);
            if (nij == 0) continue;
            const double pij = static_cast<double>(nij) / n;
            mi += pij * std::log(n * static_cast<double>(nij) /
                                 (static_cast<double>(c.row_sum[i]) *
                                  static_cast<double>(c.col_sum[j])));
        }
    }
    return std::max(mi, 0.0);
}

std::int64_t pairs(std::int64_t x) { return x * (x - 1) / 2; }

} // namespace

double clustering_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
    const Contingency c = build_contingency(predicted, truth);
    const std::size_t m = std::max(c.rows, c.cols);
    // maximize matches: minimize (max_count - count) on a zero-padded square
    std::int64_t top = 0;
    for (std::int64_t v : c.counts) top = std::max(top, v);
    std::vector<std::int64_t> cost(m * m, top);
    for (std::size_t i = 0; i < c.rows; ++i) {
        for (std::size_t j = 0; j < c.cols; ++j) cost[i * m + j] = top - c.at(i, j);
    }
    const std::vector<std::size_t> match = hungarian(cost, m);
    std::int64_t agree = 0;
    for (std::size_t i = 0; i < c.rows; ++i) {
        if (match[i] < c.cols) agree += c.at(i, match[i]);
    }
    return static_cast<double>(agree) / static_cast<double>(c.n);
}

double normalized_mutual_info(const std::vector<int>& predicted, const std::vector<int>& truth,
                              NmiNorm norm) {
    const Contingency c = build_contingency(predicted, truth);
    const double hu = entropy(c.row_sum, c.n);
    const double hv = entropy(c.col_sum, c.n);
    if (hu == 0.0 && hv == 0.0) return 1.0; // two constant labelings agree
    if (hu == 0.0 || hv == 0.0) return 0.0;
    const double mi = mutual_info(c);
    const double denom =
        norm == NmiNorm::geometric ? std::sqrt(hu * hv) : 0.5 * (hu + hv);
    return std::min(mi / denom, 1.0);
}

double adjusted_rand_index(const std::vector<int>& predicted, const std::vector<int>& truth) {
    const Contingency c = build_contingency(predicted, truth);
    std::int64_t sum_ij = 0, sum_a = 0, sum_b = 0;
    for (std::int64_t v : c.counts) sum_ij += pairs(v);
    for (std::int64_t v : c.row_sum) sum_a += pairs(v);
    for (std::int64_t v : c.col_sum) sum_b += pairs(v);
    const double total = static_cast<double>(pairs(static_cast<std::int64_t>(c.n)));
    const double expected = static_cast<double>(sum_a) * static_cast<double>(sum_b) / total;
    const double maxi = 0.5 * (static_cast<double>(sum_a) + static_cast<double>(sum_b));
    if (maxi == expected) return 1.0; // both partitions trivially identical
    return (static_cast<double>(sum_ij) - expected) / (maxi - expected);
}

std::pair<double, double> homogeneity_completeness(const std::vector<int>& predicted,
                                                   const std::vector<int>& truth) {
    const Contingency c = build_contingency(predicted, truth);
    const double n = static_cast<double>(c.n);
    // H(truth | pred) and H(pred | truth) from the joint counts
    double h_t_given_p = 0.0, h_p_given_t = 0.0;
    for (std::size_t i = 0; i < c.rows; ++i) {
        for (std::size_t j = 0; j < c.cols; ++j) {
            const std::int64_t nij = c.at(i, j);
            if (nij == 0) continue;
            const double pij = static_cast<double>(nij) / n;
            h_t_given_p -= pij * std::log(static_cast<double>(nij) /
                                          static_cast<double>(c.row_sum[i]));
            h_p_given_t -= pij * std::log(static_cast<double>(nij) /
                                          static_cast<double>(c.col_sum[j]));
        }
    }
    const double ht = entropy(c.col_sum, c.n);
    const double hp = entropy(c.row_sum, c.n);
    const double homogeneity = ht == 0.0 ? 1.0 : 1.0 - h_t_given_p / ht;
    const double completeness = hp == 0.0 ? 1.0 : 1.0 - h_p_given_t / hp;
    return {homogeneity, completeness};
}

} // namespace grclust

#include "grclust/graphio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <map>
#include <set>
#include <sstream>

#include "grclust/errors.hpp"

namespace grclust {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open file: " + path);
    return in;
}

// Parses one line of decimals separated by whitespace and/or commas.
void parse_number_line(const std::string& line, std::size_t lineno, const std::string& path,
                       std::vector<double>& out) {
    out.clear();
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
        while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
        if (p >= end) break;
        double v = 0.0;
        const auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc()) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": unparsable number at '" +
                              std::string(p, std::min<std::size_t>(8, end - p)) + "'");
        }
        out.push_back(v);
        p = res.ptr;
    }
}

bool blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

} // namespace

Mat load_feature_matrix(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<double> values, row;
    std::size_t rows = 0, cols = 0, lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        parse_number_line(line, lineno, path, row);
        if (rows == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": ragged matrix, expected " +
                              std::to_string(cols) + " columns, got " + std::to_string(row.size()));
        }
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw FormatError(path + ": empty feature file");
    Mat m = Mat::from_rows(rows, cols, std::move(values));
    if (!m.all_finite()) throw FormatError(path + ": non-finite feature entry");
    return m;
}

void save_feature_matrix(const std::string& path, const Mat& m) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write file: " + path);
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            // Shortest decimal form that parses back to the same bits.
            const auto res = std::to_chars(buf, buf + sizeof buf, m(i, j));
            out << (j ? " " : "") << std::string_view(buf, res.ptr - buf);
        }
        out << '\n';
    }
}

std::vector<int> load_labels(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        int v = 0;
        const auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc() || v < 0) {
            throw FormatError(path + ":" + std::to_string(lineno) +
                              ": expected one nonnegative integer");
        }
        labels.push_back(v);
    }
    if (labels.empty()) throw FormatError(path + ": empty label file");
    return labels;
}

void save_labels(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write file: " + path);
    for (int v : labels) out << v << '\n';
}

std::vector<int> remap_labels(const std::vector<int>& raw) {
    std::map<int, int> dense;
    for (int v : raw) dense.emplace(v, 0);
    int next = 0;
    for (auto& [_, id] : dense) id = next++;
    std::vector<int> out;
    out.reserve(raw.size());
    for (int v : raw) out.push_back(dense.at(v));
    return out;
}

EdgeList load_edge_list(const std::string& path, std::size_t n) {
    std::ifstream in = open_or_throw(path);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        std::istringstream ss(line);
        long long i = -1, j = -1;
        if (!(ss >> i >> j) || i < 0 || j < 0) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected 'i j'");
        }
        if (static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n) {
            throw IndexError(path + ":" + std::to_string(lineno) + ": edge (" + std::to_string(i) +
                             ", " + std::to_string(j) + ") outside [0, " + std::to_string(n) + ")");
        }
        if (i == j) continue;
        const auto a = static_cast<std::size_t>(std::min(i, j));
        const auto b = static_cast<std::size_t>(std::max(i, j));
        seen.emplace(a, b);
    }
    EdgeList out;
    out.n = n;
    out.edges.assign(seen.begin(), seen.end());
    return out;
}

void save_edge_list(const std::string& path, const EdgeList& edges) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write file: " + path);
    for (const auto& [i, j] : edges.edges) out << i << ' ' << j << '\n';
}

DatasetBundle load_dataset(const std::string& features_path,
                           const std::optional<std::string>& labels_path,
                           const std::optional<std::string>& graph_path, std::size_t num_clusters,
                           const std::string& name) {
    DatasetBundle b;
    b.name = name;
    b.features = load_feature_matrix(features_path);
    b.num_clusters = num_clusters;
    const std::size_t n = b.features.rows();
    if (num_clusters < 2 || num_clusters > n) {
        throw ParameterError("num_clusters must satisfy 2 <= clusters <= nodes, got " +
                             std::to_string(num_clusters) + " for n=" + std::to_string(n));
    }
    if (labels_path) {
        std::vector<int> raw = load_labels(*labels_path);
        if (raw.size() != n) {
            throw ShapeError("label count " + std::to_string(raw.size()) + " != node count " +
                             std::to_string(n));
        }
        std::vector<int> remapped = remap_labels(raw);
        const int distinct = *std::max_element(remapped.begin(), remapped.end()) + 1;
        if (static_cast<std::size_t>(distinct) > num_clusters) {
            throw ParameterError("labels contain " + std::to_string(distinct) +
                                 " classes, more than num_clusters=" + std::to_string(num_clusters));
        }
        b.labels = std::move(remapped);
    }
    if (graph_path) b.graph = load_edge_list(*graph_path, n);
    return b;
}

EdgeList build_knn_graph(const Mat& features, std::size_t k) {
    const std::size_t n = features.rows(), d = features.cols();
    if (k < 1 || k >= n) {
        throw ParameterError("knn: need 1 <= k < n, got k=" + std::to_string(k) +
                             ", n=" + std::to_string(n));
    }
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const double* r = features.row(i);
        for (std::size_t j = 0; j < d; ++j) s += r[j] * r[j];
        norms[i] = std::sqrt(s);
    }
    std::vector<std::size_t> neighbors(n * k);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        // Top-k by (similarity desc, index asc), kept sorted; k is small.
        std::vector<std::pair<double, std::size_t>> best;
        best.reserve(k + 1);
        const double* ri = features.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double sim = 0.0;
            if (norms[i] > 0.0 && norms[j] > 0.0) {
                const double* rj = features.row(j);
                double dot = 0.0;
                for (std::size_t t = 0; t < d; ++t) dot += ri[t] * rj[t];
                sim = dot / (norms[i] * norms[j]);
            }
            const std::pair<double, std::size_t> cand{sim, j};
            const auto better = [](const std::pair<double, std::size_t>& a,
                                   const std::pair<double, std::size_t>& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            };
            if (best.size() < k || better(cand, best.back())) {
                best.insert(std::upper_bound(best.begin(), best.end(), cand, better), cand);
                if (best.size() > k) best.pop_back();
            }
        }
        for (std::size_t t = 0; t < k; ++t) neighbors[i * k + t] = best[t].second;
    }
    EdgeList out;
    out.n = n;
    out.edges.reserve(n * k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < k; ++t) out.edges.emplace_back(i, neighbors[i * k + t]);
    }
    return out;
}

SparseAdjacency to_adjacency(const EdgeList& edges) {
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& [i, j] : edges.edges) {
        if (i == j) continue;
        pairs.emplace(std::min(i, j), std::max(i, j));
    }
    return SparseAdjacency::from_undirected_edges(
        edges.n, std::vector<std::pair<std::size_t, std::size_t>>(pairs.begin(), pairs.end()));
}

Mat scale_features_unit(const Mat& x) {
    bool any_negative = false;
    for (std::size_t i = 0; i < x.size() && !any_negative; ++i) {
        if (x.data()[i] < 0.0) any_negative = true;
    }
    if (!any_negative) return x;
    Mat out(x.rows(), x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double lo = x(0, j), hi = x(0, j);
        for (std::size_t i = 1; i < x.rows(); ++i) {
            lo = std::min(lo, x(i, j));
            hi = std::max(hi, x(i, j));
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            out(i, j) = span > 0.0 ? (x(i, j) - lo) / span : 0.0;
        }
    }
    return out;
}

} // namespace grclust

#pragma once

#include <cstddef>
#include <tuple>
#include <utility>
#include <vector>

#include "grclust/mat.hpp"

namespace grclust {

enum class NormState { raw, sym_renorm, row_stochastic };

// Sparse n x n adjacency in CSR form with column indices sorted per row
// (equivalently a canonically sorted coordinate list). Values are finite and
// nonnegative. Instances are immutable after construction; every operation
// returns a new value, so sharing across threads is safe.
class SparseAdjacency {
public:
    SparseAdjacency() = default;

    // Duplicate (row, col) entries are summed. Explicit zeros are kept.
    static SparseAdjacency from_entries(std::size_t n,
                                        std::vector<std::tuple<std::size_t, std::size_t, double>> entries,
                                        NormState state = NormState::raw);

    // Each undirected pair {i, j} with i != j becomes entries (i,j) and (j,i)
    // of weight w. Callers pass deduplicated pairs.
    static SparseAdjacency from_undirected_edges(std::size_t n,
                                                 const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                                 double w = 1.0);

    static SparseAdjacency identity(std::size_t n);

    std::size_t n() const { return n_; }
    std::size_t nnz() const { return values_.size(); }
    NormState norm_state() const { return norm_state_; }

    const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
    const std::vector<std::size_t>& col_idx() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }

    // Entry lookup; absent entries read as 0.
    double at(std::size_t i, std::size_t j) const;

    // Index of entry (i, j) in the value array, or -1 if absent.
    std::ptrdiff_t find(std::size_t i, std::size_t j) const;

    std::vector<double> row_sums() const;
    double max_asymmetry() const; // max |a_ij - a_ji|
    Mat to_dense() const;

    // Same pattern and values within tol.
    bool approx_equal(const SparseAdjacency& o, double tol) const;

    // Internal use by ops that recompute values over an existing pattern.
    static SparseAdjacency from_csr(std::size_t n, std::vector<std::size_t> row_ptr,
                                    std::vector<std::size_t> col_idx, std::vector<double> values,
                                    NormState state);

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
    NormState norm_state_ = NormState::raw;
};

// D^{-1/2}(A+I)D^{-1/2} with degrees taken from A+I. Requires norm_state ==
// raw; an asymmetric input is first symmetrized by averaging with its
// transpose. Result state: sym_renorm.
SparseAdjacency sym_renormalize(const SparseAdjacency& a);

// D^{-1}G. Every row sum must be positive. Result state: row_stochastic.
SparseAdjacency row_normalize(const SparseAdjacency& g);

// Row-stochastic propagation operator: row_normalize(S + I).
SparseAdjacency row_stochastic_with_self_loops(const SparseAdjacency& s);

// (S + S^T) / 2 and max(S, S^T); both keep state raw.
SparseAdjacency symmetrize_mean(const SparseAdjacency& s);
SparseAdjacency symmetrize_max(const SparseAdjacency& s);

// S * X (dense result).
Mat sp_dense_mul(const SparseAdjacency& s, const Mat& x);

namespace spops {

// Pattern of the union of two CSR supports, with per-entry source indices
// (-1 where a side has no entry). Shared by the fusion op and its gradient.
struct UnionPattern {
    std::vector<std::size_t> row_ptr, col_idx;
    std::vector<std::ptrdiff_t> from_a, from_b;
};
UnionPattern union_pattern(const SparseAdjacency& a, const SparseAdjacency& b);

// Pattern of support(S) ∪ support(S^T), with per-entry indices of S(i,j) and
// S(j,i) (-1 where absent). Shared by both symmetrizations and sym_renormalize.
struct SymPattern {
    std::vector<std::size_t> row_ptr, col_idx;
    std::vector<std::ptrdiff_t> fwd, rev;
};
SymPattern sym_pattern(const SparseAdjacency& s);

// Pattern of support(S) ∪ diagonal, with per-entry source index (-1 where the
// only contribution is the added diagonal).
struct DiagPattern {
    std::vector<std::size_t> row_ptr, col_idx;
    std::vector<std::ptrdiff_t> from_s;
};
DiagPattern diag_pattern(const SparseAdjacency& s);

// CSR transpose of the pattern: entry k of the transpose corresponds to entry
// perm[k] of the input.
struct TransposePattern {
    std::vector<std::size_t> row_ptr, col_idx;
    std::vector<std::size_t> perm;
};
TransposePattern transpose_pattern(std::size_t n, const std::vector<std::size_t>& row_ptr,
                                   const std::vector<std::size_t>& col_idx);

} // namespace spops

} // namespace grclust

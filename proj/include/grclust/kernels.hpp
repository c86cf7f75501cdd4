#pragma once

#include <cstddef>
#include <vector>

#include "grclust/mat.hpp"

namespace grclust::kern {

// OpenMP-parallel dense kernels. Every output element is written by exactly
// one thread and all reductions run serially within that thread, so results
// are bit-identical for any thread count.
//
// The serial namespace holds straightforward reference implementations with
// identical contracts; tests compare the two lanes and the benchmark target
// times them against each other.

// out = a * b
void gemm(const Mat& a, const Mat& b, Mat& out);
// out = a^T * b
void gemm_tn(const Mat& a, const Mat& b, Mat& out);
// out = a * b^T
void gemm_nt(const Mat& a, const Mat& b, Mat& out);

// x += row vector b (1 x cols), broadcast over rows
void add_row_vector(Mat& x, const Mat& b);

void relu(const Mat& x, Mat& out);
void leaky_relu(const Mat& x, double slope, Mat& out);

// Row-wise softmax with max-subtraction; rows of `out` sum to 1 exactly as
// computed (used as the simplex projection throughout the model).
void row_softmax(const Mat& x, Mat& out);

// Row-wise l2 normalization; rows with norm <= eps are left unchanged.
void row_l2_normalize(const Mat& x, Mat& out, double eps = 1e-12);

// out(i, j) = x(i, j) * w(i, col); broadcasts one column of w over x's rows.
void col_scale(const Mat& x, const Mat& w, std::size_t col, Mat& out);

void transpose(const Mat& x, Mat& out);

// Horizontal concatenation; all parts share the row count.
void concat_cols(const std::vector<const Mat*>& parts, Mat& out);

// Sparse times dense: out = S * x for S in CSR form (n rows).
void spmm(std::size_t n, const std::vector<std::size_t>& row_ptr,
          const std::vector<std::size_t>& col_idx, const std::vector<double>& values,
          const Mat& x, Mat& out);

// Serial reductions (never parallelized: a single accumulation order).
double sum(const Mat& x);
double frobenius_sq_diff(const Mat& a, const Mat& b);

namespace serial {

void gemm(const Mat& a, const Mat& b, Mat& out);
void gemm_tn(const Mat& a, const Mat& b, Mat& out);
void gemm_nt(const Mat& a, const Mat& b, Mat& out);
void row_softmax(const Mat& x, Mat& out);
void row_l2_normalize(const Mat& x, Mat& out, double eps = 1e-12);
void spmm(std::size_t n, const std::vector<std::size_t>& row_ptr,
          const std::vector<std::size_t>& col_idx, const std::vector<double>& values,
          const Mat& x, Mat& out);

} // namespace serial

} // namespace grclust::kern

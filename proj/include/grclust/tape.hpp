#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "grclust/mat.hpp"
#include "grclust/sparse.hpp"

namespace grclust {

// Reverse-mode differentiation tape. A tape is built once per training step:
// leaves are registered (constants via input/sp_const, trainables via param),
// ops append nodes, backward() runs the chain rule through the creation order
// in reverse. Sparse nodes carry gradients on their stored values over a
// fixed support; patterns never change within a tape.
//
// Single use: one forward construction, one backward() call.
class Tape {
public:
    using Id = std::size_t;
    using SpId = std::size_t;

    enum class Act { none, relu, lrelu };

    // Leaves.
    Id input(Mat value);  // constant, no gradient
    Id param(Mat value);  // trainable, gradient readable after backward()

    // out = act(x * w [+ bias]); bias is a 1 x cols param or has_bias=false.
    Id affine(Id x, Id w, Id bias, bool has_bias, Act act, double slope = 0.2);

    Id add(Id a, Id b);
    Id scale(Id a, double s);
    Id relu(Id x);
    Id leaky_relu(Id x, double slope);
    Id row_softmax(Id x);
    Id row_l2_normalize(Id x);
    Id concat_cols(const std::vector<Id>& parts);
    // out(i, j) = x(i, j) * w(i, col)
    Id col_scale(Id x, Id w, std::size_t col);
    Id slice_rows(Id x, std::size_t r0, std::size_t r1);
    // out = (1 - theta) * a + theta * b, theta a 1x1 node
    Id mix(Id theta, Id a, Id b);

    // Sparse graph chain.
    SpId sp_const(SparseAdjacency value);
    // out over support(az) ∪ support(a): v(i,0)*az(i,j) + v(i,1)*a(i,j)
    SpId sp_fuse(SpId az, SpId a, Id v);
    SpId sp_symmetrize_mean(SpId s);
    // D^{-1/2}(S+I)D^{-1/2}, degrees from S+I row sums
    SpId sp_sym_renorm(SpId s);
    // row_normalize(S+I)
    SpId sp_row_stochastic(SpId s);
    Id spmm(SpId s, Id x);

    // Objective pieces (scalars are 1x1 nodes).
    // q(i,j) = (1 + ||h_i - mu_j||^2)^{-1}, row-normalized (unit alpha).
    Id student_q(Id h, Id mu);
    // sum((xhat - x)^2) / rows
    Id recon_mse(Id xhat, const Mat& x);
    // sum over entries of a * log(max(a,eps)/max(b,eps))
    Id kl_div(Id a, Id b);
    Id jeffreys_div(Id a, Id b) { return add(kl_div(a, b), kl_div(b, a)); }
    Id weighted_sum(const std::vector<std::pair<Id, double>>& terms);

    void backward(Id loss);

    const Mat& value(Id id) const { return nodes_[id].value; }
    const Mat& grad(Id id) const { return nodes_[id].grad; }
    bool needs_grad(Id id) const { return nodes_[id].needs_grad; }
    const SparseAdjacency& sp_value(SpId id) const { return sp_nodes_[id].value; }
    const std::vector<double>& sp_grad(SpId id) const { return sp_nodes_[id].grad; }

    static constexpr double kProbFloor = 1e-12;

private:
    struct Node {
        Mat value;
        Mat grad;
        bool needs_grad = false;
        std::function<void(Tape&)> backward;
    };
    struct SpNode {
        SparseAdjacency value;
        std::vector<double> grad;
        bool needs_grad = false;
        std::function<void(Tape&)> backward;
    };

    Id push(Mat value, bool needs_grad, std::function<void(Tape&)> backward);
    SpId sp_push(SparseAdjacency value, bool needs_grad, std::function<void(Tape&)> backward);

    Mat& grad_mut(Id id) { return nodes_[id].grad; }
    std::vector<double>& sp_grad_mut(SpId id) { return sp_nodes_[id].grad; }

    std::vector<Node> nodes_;
    std::vector<SpNode> sp_nodes_;
    // Reverse-topological processing needs dense and sparse nodes interleaved
    // in creation order: (is_sparse, index).
    std::vector<std::pair<bool, std::size_t>> order_;
    bool backward_done_ = false;
};

} // namespace grclust

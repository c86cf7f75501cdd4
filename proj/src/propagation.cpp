#include "grclust/propagation.hpp"

#include <cmath>
#include <string>

#include "grclust/errors.hpp"
#include "grclust/kernels.hpp"

namespace grclust {

PropagationParams make_propagation(std::size_t input_dim, std::size_t hidden,
                                   std::size_t num_clusters, const Rng& seed_rng) {
    PropagationParams p;
    const auto add_layer = [&](std::size_t in, std::size_t out, const std::string& name) {
        Rng rw = seed_rng.fork("e0_w_" + name);
        Rng rb = seed_rng.fork("e0_b_" + name);
        p.mlp_w.push_back(init_fan_uniform(in, out, rw));
        Mat b(1, out);
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (std::size_t j = 0; j < b.size(); ++j) b.data()[j] = rb.uniform(-bound, bound);
        p.mlp_b.push_back(std::move(b));
    };
    if (hidden == 0) {
        add_layer(input_dim, num_clusters, "out");
    } else {
        add_layer(input_dim, hidden, "hidden");
        add_layer(hidden, num_clusters, "out");
    }
    Rng rt = seed_rng.fork("theta");
    p.theta = Mat::from_rows(1, 1, {rt.uniform()});
    return p;
}

Mat predict_e0(const Mat& x, const PropagationParams& p) {
    if (x.cols() != p.mlp_w.front().rows()) {
        throw ShapeError("predict_e0: input " + x.shape_str() + " expects width " +
                         std::to_string(p.mlp_w.front().rows()));
    }
    Mat cur = x;
    for (std::size_t i = 0; i < p.mlp_w.size(); ++i) {
        Mat t;
        kern::gemm(cur, p.mlp_w[i], t);
        kern::add_row_vector(t, p.mlp_b[i]);
        if (i + 1 < p.mlp_w.size()) {
            kern::relu(t, cur);
        } else {
            cur = std::move(t); // final layer linear
        }
    }
    return cur;
}

namespace {

void check_propagation(const Mat& e0, const SparseAdjacency& a, double coef, std::size_t tau) {
    if (a.norm_state() != NormState::row_stochastic) {
        throw ParameterError("propagation: adjacency must be row_stochastic");
    }
    if (e0.rows() != a.n()) {
        throw ShapeError("propagation: predictions " + e0.shape_str() + " for n=" +
                         std::to_string(a.n()));
    }
    if (coef < 0.0 || coef > 1.0) {
        throw ParameterError("propagation: teleport must lie in [0,1], got " +
                             std::to_string(coef));
    }
    if (tau < 1) throw ParameterError("propagation: tau must be >= 1");
}

} // namespace

Mat propagate_learned(const Mat& e0, const SparseAdjacency& a, double theta, std::size_t tau) {
    check_propagation(e0, a, theta, tau);
    Mat cur = e0;
    for (std::size_t i = 0; i < tau; ++i) {
        Mat prop = sp_dense_mul(a, cur);
        Mat mixed(prop.rows(), prop.cols());
        for (std::size_t e = 0; e < mixed.size(); ++e) {
            mixed.data()[e] = (1.0 - theta) * e0.data()[e] + theta * prop.data()[e];
        }
        kern::row_softmax(mixed, cur);
    }
    return cur;
}

Mat propagate_fixed(const Mat& e0, const SparseAdjacency& a, double rho, std::size_t tau) {
    check_propagation(e0, a, rho, tau);
    Mat cur = e0;
    for (std::size_t i = 0; i < tau; ++i) {
        Mat prop = sp_dense_mul(a, cur);
        Mat mixed(prop.rows(), prop.cols());
        for (std::size_t e = 0; e < mixed.size(); ++e) {
            mixed.data()[e] = (1.0 - rho) * prop.data()[e] + rho * e0.data()[e];
        }
        kern::row_softmax(mixed, cur);
    }
    return cur;
}

} // namespace grclust

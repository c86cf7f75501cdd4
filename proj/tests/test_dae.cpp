#include <cmath>
#include <vector>

#include "doctest.h"
#include "grclust/dae.hpp"
#include "grclust/errors.hpp"
#include "testutil.hpp"

using grclust::DaeParams;
using grclust::Mat;
using grclust::Rng;

namespace {

// relu(x * w + b), dense double-loop oracle
Mat dense_layer(const Mat& x, const Mat& w, const Mat& b) {
    Mat out = testutil::dense_mul(x, w);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) {
            out(i, j) = std::max(out(i, j) + b(0, j), 0.0);
        }
    }
    return out;
}

} // namespace

TEST_CASE("default widths follow the 500-500-2000-10 ladder") {
    const std::vector<std::size_t> w = grclust::default_dae_widths(561);
    REQUIRE(w.size() == 5);
    CHECK(w[0] == 561);
    CHECK(w[1] == 500);
    CHECK(w[2] == 500);
    CHECK(w[3] == 2000);
    CHECK(w[4] == 10);
}

TEST_CASE("construction produces mirrored shapes within the fan-in bound") {
    const std::vector<std::size_t> widths = {7, 5, 3};
    const DaeParams p = grclust::make_dae(widths, Rng(42));
    REQUIRE(p.layers() == 2);
    CHECK(p.latent_dim() == 3);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(p.enc_w[i].rows() == widths[i]);
        CHECK(p.enc_w[i].cols() == widths[i + 1]);
        CHECK(p.enc_b[i].rows() == 1);
        CHECK(p.enc_b[i].cols() == widths[i + 1]);
        CHECK(p.dec_w[i].rows() == widths[2 - i]);
        CHECK(p.dec_w[i].cols() == widths[1 - i]);
        CHECK(p.dec_b[i].cols() == widths[1 - i]);
        const double bound = 1.0 / std::sqrt(static_cast<double>(p.enc_w[i].rows()));
        for (std::size_t e = 0; e < p.enc_w[i].size(); ++e) {
            CHECK(std::abs(p.enc_w[i].data()[e]) <= bound);
        }
    }
    CHECK_THROWS_AS(grclust::make_dae({4}, Rng(1)), grclust::ParameterError);
}

TEST_CASE("construction is seed-deterministic") {
    const std::vector<std::size_t> widths = {6, 4, 2};
    const DaeParams a = grclust::make_dae(widths, Rng(7));
    const DaeParams b = grclust::make_dae(widths, Rng(7));
    const DaeParams c = grclust::make_dae(widths, Rng(8));
    CHECK(grclust::max_abs_diff(a.enc_w[0], b.enc_w[0]) == 0.0);
    CHECK(grclust::max_abs_diff(a.dec_b[1], b.dec_b[1]) == 0.0);
    CHECK(grclust::max_abs_diff(a.enc_w[0], c.enc_w[0]) > 0.0);
}

TEST_CASE("encoding applies relu at every layer and matches the dense oracle") {
    Rng rng(11);
    const std::vector<std::size_t> widths = {4, 6, 3};
    const DaeParams p = grclust::make_dae(widths, Rng(3));
    const Mat x = testutil::random_mat(5, 4, rng);

    const std::vector<Mat> hs = grclust::dae_encode(x, p);
    REQUIRE(hs.size() == 2);
    const Mat h1 = dense_layer(x, p.enc_w[0], p.enc_b[0]);
    const Mat h2 = dense_layer(h1, p.enc_w[1], p.enc_b[1]);
    CHECK(grclust::max_abs_diff(hs[0], h1) < 1e-12);
    CHECK(grclust::max_abs_diff(hs[1], h2) < 1e-12);
    for (const Mat& h : hs) {
        for (std::size_t e = 0; e < h.size(); ++e) CHECK(h.data()[e] >= 0.0);
    }
    CHECK_THROWS_AS(grclust::dae_encode(testutil::random_mat(5, 3, rng), p),
                    grclust::ShapeError);
}

TEST_CASE("decoding mirrors the encoder and matches the dense oracle") {
    Rng rng(12);
    const std::vector<std::size_t> widths = {4, 6, 3};
    const DaeParams p = grclust::make_dae(widths, Rng(5));
    const Mat z = testutil::random_mat(5, 3, rng, 0.0, 1.0);

    const Mat xhat = grclust::dae_decode(z, p);
    const Mat d1 = dense_layer(z, p.dec_w[0], p.dec_b[0]);
    const Mat d2 = dense_layer(d1, p.dec_w[1], p.dec_b[1]);
    CHECK(grclust::max_abs_diff(xhat, d2) < 1e-12);
    CHECK(xhat.rows() == 5);
    CHECK(xhat.cols() == 4);
    CHECK_THROWS_AS(grclust::dae_decode(testutil::random_mat(5, 4, rng), p),
                    grclust::ShapeError);
}

TEST_CASE("reconstruction loss is the mean squared frobenius gap") {
    Rng rng(13);
    const Mat x = testutil::random_mat(6, 4, rng);
    CHECK(grclust::reconstruction_loss(x, x) == 0.0);

    const Mat y = testutil::random_mat(6, 4, rng);
    double want = 0.0;
    for (std::size_t e = 0; e < x.size(); ++e) {
        const double d = x.data()[e] - y.data()[e];
        want += d * d;
    }
    want /= 6.0;
    CHECK(grclust::reconstruction_loss(x, y) == doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS(grclust::reconstruction_loss(x, testutil::random_mat(5, 4, rng)),
                    grclust::ShapeError);
}

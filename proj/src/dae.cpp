#include "grclust/dae.hpp"

#include <string>

#include "grclust/errors.hpp"
#include "grclust/kernels.hpp"

namespace grclust {

std::vector<std::size_t> default_dae_widths(std::size_t input_dim) {
    return {input_dim, 500, 500, 2000, 10};
}

DaeParams make_dae(const std::vector<std::size_t>& widths, const Rng& seed_rng) {
    if (widths.size() < 2) throw ParameterError("make_dae: need at least one layer");
    DaeParams p;
    p.widths = widths;
    const std::size_t l = widths.size() - 1;
    // Biases start at zero: an all-zero input then reconstructs exactly from
    // the first step (every ReLU layer maps 0 to 0).
    for (std::size_t i = 0; i < l; ++i) {
        Rng rw = seed_rng.fork("enc_w" + std::to_string(i));
        p.enc_w.push_back(init_fan_uniform(widths[i], widths[i + 1], rw));
        p.enc_b.push_back(Mat(1, widths[i + 1]));
    }
    for (std::size_t i = 0; i < l; ++i) {
        const std::size_t in = widths[l - i], out = widths[l - i - 1];
        Rng rw = seed_rng.fork("dec_w" + std::to_string(i));
        p.dec_w.push_back(init_fan_uniform(in, out, rw));
        p.dec_b.push_back(Mat(1, out));
    }
    return p;
}

std::vector<Mat> dae_encode(const Mat& x, const DaeParams& p) {
    if (x.cols() != p.widths[0]) {
        throw ShapeError("dae_encode: input " + x.shape_str() + " expects width " +
                         std::to_string(p.widths[0]));
    }
    std::vector<Mat> hs;
    const Mat* cur = &x;
    for (std::size_t i = 0; i < p.layers(); ++i) {
        Mat t;
        kern::gemm(*cur, p.enc_w[i], t);
        kern::add_row_vector(t, p.enc_b[i]);
        Mat h;
        kern::relu(t, h);
        hs.push_back(std::move(h));
        cur = &hs.back();
    }
    return hs;
}

Mat dae_decode(const Mat& latent, const DaeParams& p) {
    if (latent.cols() != p.latent_dim()) {
        throw ShapeError("dae_decode: latent " + latent.shape_str() + " expects width " +
                         std::to_string(p.latent_dim()));
    }
    Mat cur = latent;
    for (std::size_t i = 0; i < p.layers(); ++i) {
        Mat t;
        kern::gemm(cur, p.dec_w[i], t);
        kern::add_row_vector(t, p.dec_b[i]);
        kern::relu(t, cur);
    }
    return cur;
}

double reconstruction_loss(const Mat& x, const Mat& xhat) {
    if (!x.same_shape(xhat)) {
        throw ShapeError("reconstruction_loss: " + x.shape_str() + " vs " + xhat.shape_str());
    }
    return kern::frobenius_sq_diff(x, xhat) / static_cast<double>(x.rows());
}

} // namespace grclust

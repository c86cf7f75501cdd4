#pragma once

#include <vector>

#include "grclust/mat.hpp"
#include "grclust/rng.hpp"

namespace grclust {

// Symmetric auto-encoder. widths[0] is the input dimension; the encoder maps
// widths[0] -> ... -> widths.back(), the decoder mirrors it back. Every layer
// applies ReLU, including the last encoder and decoder layers (inputs are
// preprocessed to be nonnegative, so reconstruction targets stay reachable).
struct DaeParams {
    std::vector<std::size_t> widths;
    std::vector<Mat> enc_w, enc_b; // enc_w[i]: widths[i] x widths[i+1], enc_b[i]: 1 x widths[i+1]
    std::vector<Mat> dec_w, dec_b; // mirror: widths[l-i] x widths[l-i-1]

    std::size_t layers() const { return enc_w.size(); }
    std::size_t latent_dim() const { return widths.back(); }
};

// Standard hidden widths used by the trainer.
std::vector<std::size_t> default_dae_widths(std::size_t input_dim);

DaeParams make_dae(const std::vector<std::size_t>& widths, const Rng& seed_rng);

// All layer outputs H_1..H_l (H_l is the latent representation).
std::vector<Mat> dae_encode(const Mat& x, const DaeParams& p);

// Reconstruction from the latent code.
Mat dae_decode(const Mat& latent, const DaeParams& p);

// ||x - xhat||_F^2 / n
double reconstruction_loss(const Mat& x, const Mat& xhat);

} // namespace grclust

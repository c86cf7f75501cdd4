#include "grclust/gcn.hpp"

#include <numeric>
#include <string>

#include "grclust/errors.hpp"
#include "grclust/kernels.hpp"

namespace grclust {

GcnFusionParams make_gcn(const std::vector<std::size_t>& widths, std::size_t num_clusters,
                         const Rng& seed_rng) {
    if (widths.size() < 2) throw ParameterError("make_gcn: need at least one layer");
    GcnFusionParams p;
    const std::size_t l = widths.size() - 1;
    for (std::size_t i = 0; i < l; ++i) {
        Rng r = seed_rng.fork("gcn_w" + std::to_string(i));
        p.gcn_w.push_back(init_fan_uniform(widths[i], widths[i + 1], r));
    }
    for (std::size_t i = 0; i + 1 < l; ++i) {
        Rng r = seed_rng.fork("fuse_w" + std::to_string(i));
        p.fuse_w.push_back(init_fan_uniform(2 * widths[i + 1], 2, r));
    }
    // Scales: Z_1..Z_l plus the latent H_l (width widths[l] again).
    std::size_t total = widths.back();
    for (std::size_t i = 1; i <= l; ++i) total += widths[i];
    Rng rs = seed_rng.fork("scale_w");
    p.scale_w = init_fan_uniform(total, l + 1, rs);
    Rng rz = seed_rng.fork("final_w");
    p.final_w = init_fan_uniform(total, num_clusters, rz);
    return p;
}

Mat gcn_layer(const Mat& zprev, const SparseAdjacency& a_norm, const Mat& w, double slope) {
    if (a_norm.norm_state() != NormState::sym_renorm) {
        throw ParameterError("gcn_layer: adjacency must be sym_renorm");
    }
    const Mat prop = sp_dense_mul(a_norm, zprev);
    Mat t;
    kern::gemm(prop, w, t);
    Mat out;
    kern::leaky_relu(t, slope, out);
    return out;
}

std::pair<Mat, Mat> layer_fuse(const Mat& h, const Mat& z, const Mat& wf, double slope) {
    if (!h.same_shape(z)) {
        throw ShapeError("layer_fuse: streams " + h.shape_str() + " vs " + z.shape_str());
    }
    if (wf.rows() != 2 * h.cols() || wf.cols() != 2) {
        throw ShapeError("layer_fuse: weight " + wf.shape_str() + " for stream width " +
                         std::to_string(h.cols()));
    }
    Mat hz;
    kern::concat_cols({&h, &z}, hz);
    Mat scores;
    kern::gemm(hz, wf, scores);
    Mat act;
    kern::leaky_relu(scores, slope, act);
    Mat soft;
    kern::row_softmax(act, soft);
    Mat m;
    kern::row_l2_normalize(soft, m);
    Mat a, b;
    kern::col_scale(h, m, 0, a);
    kern::col_scale(z, m, 1, b);
    Mat fused(a.rows(), a.cols());
    for (std::size_t i = 0; i < fused.size(); ++i) {
        fused.data()[i] = a.data()[i] + b.data()[i];
    }
    return {std::move(m), std::move(fused)};
}

Mat multiscale_fuse(const std::vector<const Mat*>& scales, const Mat& ws, double slope) {
    Mat all;
    kern::concat_cols(scales, all);
    if (ws.rows() != all.cols() || ws.cols() != scales.size()) {
        throw ShapeError("multiscale_fuse: weight " + ws.shape_str() + " for " +
                         std::to_string(scales.size()) + " scales of total width " +
                         std::to_string(all.cols()));
    }
    Mat scores;
    kern::gemm(all, ws, scores);
    Mat act;
    kern::leaky_relu(scores, slope, act);
    Mat soft;
    kern::row_softmax(act, soft);
    Mat u;
    kern::row_l2_normalize(soft, u);
    std::vector<Mat> scaled(scales.size());
    std::vector<const Mat*> views(scales.size());
    for (std::size_t s = 0; s < scales.size(); ++s) {
        kern::col_scale(*scales[s], u, s, scaled[s]);
        views[s] = &scaled[s];
    }
    Mat out;
    kern::concat_cols(views, out);
    return out;
}

Mat final_embed(const Mat& zprime, const SparseAdjacency& a_norm, const Mat& wz) {
    if (a_norm.norm_state() != NormState::sym_renorm) {
        throw ParameterError("final_embed: adjacency must be sym_renorm");
    }
    const Mat prop = sp_dense_mul(a_norm, zprime);
    Mat logits;
    kern::gemm(prop, wz, logits);
    Mat out;
    kern::row_softmax(logits, out);
    return out;
}

} // namespace grclust

#include "grclust/model.hpp"

#include <string>

#include "grclust/errors.hpp"

namespace grclust {

ModelState make_model(const TrainConfig& config, std::size_t input_dim,
                      std::size_t num_clusters, const SparseAdjacency& graph,
                      const Rng& seed_rng) {
    validate_config(config);
    if (input_dim < 1) throw ParameterError("make_model: input_dim must be >= 1");
    if (num_clusters < 1) throw ParameterError("make_model: num_clusters must be >= 1");
    if (graph.n() < 1) throw ParameterError("make_model: empty graph");
    if (graph.norm_state() != NormState::raw)
        throw ParameterError("make_model: input graph must be raw");

    ModelState s;
    s.config = config;
    std::vector<std::size_t> widths;
    widths.reserve(config.dae_widths.size() + 1);
    widths.push_back(input_dim);
    widths.insert(widths.end(), config.dae_widths.begin(), config.dae_widths.end());
    s.dae = make_dae(widths, seed_rng);
    if (config.variant == Variant::full_gcn) {
        s.gcn = make_gcn(widths, num_clusters, seed_rng);
    } else {
        s.prop = make_propagation(input_dim, config.iappnp_hidden, num_clusters, seed_rng);
        if (uses_fixed_teleport(config)) {
            s.prop->theta = Mat::from_rows(1, 1, {1.0 - config.fixed_teleport});
        }
    }
    s.refiner = make_refiner(graph.n(), seed_rng);
    s.head.centroids = Mat(num_clusters, widths.back());
    s.head.alpha = 1.0;
    s.working = graph;
    return s;
}

namespace {

// Single source of the parameter order; both named_params overloads and
// build_tape_forward's creation sequence go through it.
template <class State, class F>
void visit_params(State& s, F&& f) {
    const std::size_t l = s.dae.layers();
    for (std::size_t i = 0; i < l; ++i) f("enc_w" + std::to_string(i), s.dae.enc_w[i]);
    for (std::size_t i = 0; i < l; ++i) f("enc_b" + std::to_string(i), s.dae.enc_b[i]);
    for (std::size_t i = 0; i < l; ++i) f("dec_w" + std::to_string(i), s.dae.dec_w[i]);
    for (std::size_t i = 0; i < l; ++i) f("dec_b" + std::to_string(i), s.dae.dec_b[i]);
    if (s.gcn) {
        for (std::size_t i = 0; i < s.gcn->gcn_w.size(); ++i)
            f("gcn_w" + std::to_string(i), s.gcn->gcn_w[i]);
        for (std::size_t i = 0; i < s.gcn->fuse_w.size(); ++i)
            f("fuse_w" + std::to_string(i), s.gcn->fuse_w[i]);
        f("scale_w", s.gcn->scale_w);
        f("final_w", s.gcn->final_w);
    }
    if (s.prop) {
        for (std::size_t i = 0; i < s.prop->mlp_w.size(); ++i) {
            f("e0_w" + std::to_string(i), s.prop->mlp_w[i]);
            f("e0_b" + std::to_string(i), s.prop->mlp_b[i]);
        }
        f("theta", s.prop->theta);
    }
    f("refiner_wa", s.refiner.wa);
    f("centroids", s.head.centroids);
}

} // namespace

std::vector<NamedParam> named_params(ModelState& s) {
    std::vector<NamedParam> out;
    visit_params(s, [&](std::string name, Mat& m) { out.push_back({std::move(name), &m}); });
    return out;
}

std::vector<NamedParamView> named_params(const ModelState& s) {
    std::vector<NamedParamView> out;
    visit_params(s, [&](std::string name, const Mat& m) { out.push_back({std::move(name), &m}); });
    return out;
}

SparseAdjacency effective_graph(const ModelState& s) {
    const SparseAdjacency* fused = &s.working;
    SparseAdjacency fused_own;
    if (s.induced.n() > 0) {
        fused_own = fuse_graphs(s.induced, s.working, s.refiner, s.config.lrelu_slope);
        fused = &fused_own;
    }
    const SparseAdjacency sym = symmetrize_mean(*fused);
    return s.config.variant == Variant::full_gcn ? sym_renormalize(sym)
                                                 : row_stochastic_with_self_loops(sym);
}

Forward model_forward(const ModelState& s, const Mat& x) {
    if (x.rows() != s.n())
        throw ShapeError("model_forward: features " + x.shape_str() + " for n=" +
                         std::to_string(s.n()));
    Forward out;
    out.h = dae_encode(x, s.dae);
    out.xhat = dae_decode(out.h.back(), s.dae);
    const SparseAdjacency a = effective_graph(s);
    const double slope = s.config.lrelu_slope;
    if (s.config.variant == Variant::full_gcn) {
        const GcnFusionParams& g = *s.gcn;
        const std::size_t l = g.layers();
        std::vector<Mat> z(l);
        const Mat* zprev = &x;
        Mat fused_stream;
        for (std::size_t i = 0; i < l; ++i) {
            z[i] = gcn_layer(*zprev, a, g.gcn_w[i], slope);
            if (i + 1 < l) {
                fused_stream = layer_fuse(out.h[i], z[i], g.fuse_w[i], slope).second;
                zprev = &fused_stream;
            }
        }
        std::vector<const Mat*> scales;
        for (std::size_t i = 0; i < l; ++i) scales.push_back(&z[i]);
        scales.push_back(&out.h.back());
        const Mat zprime = multiscale_fuse(scales, g.scale_w, slope);
        out.za = final_embed(zprime, a, g.final_w);
    } else {
        const PropagationParams& p = *s.prop;
        const Mat e0 = predict_e0(x, p);
        out.za = propagate_learned(e0, a, p.theta(0, 0), s.config.tau);
    }
    return out;
}

TapeForward build_tape_forward(Tape& t, const ModelState& s, const Mat& x) {
    if (x.rows() != s.n())
        throw ShapeError("build_tape_forward: features " + x.shape_str() + " for n=" +
                         std::to_string(s.n()));
    const double slope = s.config.lrelu_slope;
    const std::size_t n = s.n();
    TapeForward fwd;
    fwd.x = t.input(x);

    // Parameter nodes in named_params order.
    std::vector<Tape::Id> enc_w, enc_b, dec_w, dec_b, gcn_w, fuse_w, mlp_w, mlp_b;
    Tape::Id scale_w = 0, final_w = 0, theta = 0, wa = 0, mu = 0;
    visit_params(s, [&](const std::string& name, const Mat& m) {
        const Tape::Id id = t.param(m);
        fwd.params.push_back(id);
        if (name.rfind("enc_w", 0) == 0) enc_w.push_back(id);
        else if (name.rfind("enc_b", 0) == 0) enc_b.push_back(id);
        else if (name.rfind("dec_w", 0) == 0) dec_w.push_back(id);
        else if (name.rfind("dec_b", 0) == 0) dec_b.push_back(id);
        else if (name.rfind("gcn_w", 0) == 0) gcn_w.push_back(id);
        else if (name.rfind("fuse_w", 0) == 0) fuse_w.push_back(id);
        else if (name == "scale_w") scale_w = id;
        else if (name == "final_w") final_w = id;
        else if (name.rfind("e0_w", 0) == 0) mlp_w.push_back(id);
        else if (name.rfind("e0_b", 0) == 0) mlp_b.push_back(id);
        else if (name == "theta") theta = id;
        else if (name == "refiner_wa") wa = id;
        else mu = id; // centroids
    });

    // Auto-encoder.
    std::vector<Tape::Id> h;
    Tape::Id cur = fwd.x;
    for (std::size_t i = 0; i < enc_w.size(); ++i) {
        cur = t.affine(cur, enc_w[i], enc_b[i], true, Tape::Act::relu);
        h.push_back(cur);
    }
    fwd.latent = h.back();
    cur = fwd.latent;
    for (std::size_t i = 0; i < dec_w.size(); ++i) {
        cur = t.affine(cur, dec_w[i], dec_b[i], true, Tape::Act::relu);
    }
    fwd.xhat = cur;

    // Graph: with an induced snapshot the fusion chain lives on the tape so
    // gradients reach the fusion weights; otherwise a plain constant.
    Tape::SpId eff;
    if (s.induced.n() > 0) {
        const Tape::SpId az = t.sp_const(s.induced);
        const Tape::SpId base = t.sp_const(s.working);
        const Tape::Id s1 = t.spmm(az, t.slice_rows(wa, 0, n));
        const Tape::Id s2 = t.spmm(base, t.slice_rows(wa, n, 2 * n));
        const Tape::Id v = t.row_l2_normalize(t.row_softmax(t.leaky_relu(t.add(s1, s2), slope)));
        fwd.fused_raw = t.sp_fuse(az, base, v);
        fwd.fused_on_tape = true;
        const Tape::SpId sym = t.sp_symmetrize_mean(fwd.fused_raw);
        eff = s.config.variant == Variant::full_gcn ? t.sp_sym_renorm(sym)
                                                    : t.sp_row_stochastic(sym);
    } else {
        eff = t.sp_const(effective_graph(s));
    }

    if (s.config.variant == Variant::full_gcn) {
        const std::size_t l = s.gcn->layers();
        std::vector<Tape::Id> z(l);
        Tape::Id zprev = fwd.x;
        for (std::size_t i = 0; i < l; ++i) {
            z[i] = t.affine(t.spmm(eff, zprev), gcn_w[i], 0, false, Tape::Act::lrelu, slope);
            if (i + 1 < l) {
                const Tape::Id hz = t.concat_cols({h[i], z[i]});
                const Tape::Id sc = t.affine(hz, fuse_w[i], 0, false, Tape::Act::lrelu, slope);
                const Tape::Id m = t.row_l2_normalize(t.row_softmax(sc));
                zprev = t.add(t.col_scale(h[i], m, 0), t.col_scale(z[i], m, 1));
            }
        }
        std::vector<Tape::Id> scales = z;
        scales.push_back(fwd.latent);
        const Tape::Id all = t.concat_cols(scales);
        const Tape::Id sc = t.affine(all, scale_w, 0, false, Tape::Act::lrelu, slope);
        const Tape::Id u = t.row_l2_normalize(t.row_softmax(sc));
        std::vector<Tape::Id> parts;
        for (std::size_t i = 0; i < scales.size(); ++i)
            parts.push_back(t.col_scale(scales[i], u, i));
        const Tape::Id zprime = t.concat_cols(parts);
        const Tape::Id logits = t.affine(t.spmm(eff, zprime), final_w, 0, false, Tape::Act::none);
        fwd.za = t.row_softmax(logits);
    } else {
        Tape::Id e0 = fwd.x;
        for (std::size_t i = 0; i < mlp_w.size(); ++i) {
            const Tape::Act act = i + 1 < mlp_w.size() ? Tape::Act::relu : Tape::Act::none;
            e0 = t.affine(e0, mlp_w[i], mlp_b[i], true, act);
        }
        Tape::Id zcur = e0;
        for (std::size_t step = 0; step < s.config.tau; ++step) {
            zcur = t.row_softmax(t.mix(theta, e0, t.spmm(eff, zcur)));
        }
        fwd.za = zcur;
    }

    fwd.q = t.student_q(fwd.latent, mu);
    return fwd;
}

} // namespace grclust

#include "grclust/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "grclust/errors.hpp"
#include "grclust/metrics.hpp"
#include "grclust/objective.hpp"
#include "grclust/refine.hpp"

namespace grclust {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Adaptive-moment optimizer over a fixed parameter list. A null gradient
// entry freezes that parameter for the step (moment counters still advance,
// so schedules stay aligned across configurations).
struct Adam {
    double lr;
    std::size_t t = 0;
    std::vector<Mat> m, v;

    Adam(double lr_, const std::vector<NamedParam>& params) : lr(lr_) {
        for (const auto& p : params) {
            m.emplace_back(p.mat->rows(), p.mat->cols());
            v.emplace_back(p.mat->rows(), p.mat->cols());
        }
    }

    void step(const std::vector<NamedParam>& params, const std::vector<const Mat*>& grads) {
        ++t;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (!grads[i]) continue;
            double* p = params[i].mat->data();
            double* mi = m[i].data();
            double* vi = v[i].data();
            const double* g = grads[i]->data();
            const std::size_t len = params[i].mat->size();
            for (std::size_t j = 0; j < len; ++j) {
                mi[j] = kBeta1 * mi[j] + (1.0 - kBeta1) * g[j];
                vi[j] = kBeta2 * vi[j] + (1.0 - kBeta2) * g[j] * g[j];
                p[j] -= lr * (mi[j] / c1) / (std::sqrt(vi[j] / c2) + kAdamEps);
            }
        }
    }
};

void validate_bundle(const DataBundle& d) {
    if (d.x.rows() == 0 || d.x.cols() == 0) throw ShapeError("training data is empty");
    if (d.graph.n() != d.x.rows())
        throw ShapeError("graph over " + std::to_string(d.graph.n()) + " nodes vs features " +
                         d.x.shape_str());
    if (d.graph.norm_state() != NormState::raw)
        throw ParameterError("input graph must be raw (normalization is internal)");
    if (!d.x.all_finite()) throw DomainError("features must be finite");
    if (!d.labels.empty() && d.labels.size() != d.x.rows())
        throw ShapeError("label count " + std::to_string(d.labels.size()) + " vs n=" +
                         std::to_string(d.x.rows()));
}

// Shortest decimal form that parses back to the same bits.
std::string fmt_loss(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

ModelState pretrain_dae(const DataBundle& data, const TrainConfig& config,
                        std::size_t num_clusters) {
    validate_config(config);
    validate_bundle(data);
    ModelState s = make_model(config, data.x.cols(), num_clusters, data.graph, Rng(config.seed));

    auto all = named_params(s);
    const std::size_t l = s.dae.layers();
    const std::vector<NamedParam> params(all.begin(), all.begin() + 4 * l);
    Adam opt(config.pretrain_learning_rate, params);

    for (std::size_t epoch = 1; epoch <= config.pretrain_epochs; ++epoch) {
        Tape t;
        const Tape::Id x = t.input(data.x);
        std::vector<Tape::Id> ids;
        ids.reserve(params.size());
        for (const auto& p : params) ids.push_back(t.param(*p.mat));
        Tape::Id cur = x;
        for (std::size_t i = 0; i < l; ++i)
            cur = t.affine(cur, ids[i], ids[l + i], true, Tape::Act::relu);
        for (std::size_t i = 0; i < l; ++i)
            cur = t.affine(cur, ids[2 * l + i], ids[3 * l + i], true, Tape::Act::relu);
        const Tape::Id loss = t.recon_mse(cur, data.x);
        const double lv = t.value(loss)(0, 0);
        if (!std::isfinite(lv))
            throw TrainingDivergedError("pretrain epoch " + std::to_string(epoch) +
                                        ": reconstruction loss " + fmt_loss(lv));
        t.backward(loss);
        std::vector<const Mat*> grads;
        grads.reserve(ids.size());
        for (Tape::Id id : ids) grads.push_back(&t.grad(id));
        opt.step(params, grads);
    }
    return s;
}

TrainResult train(const DataBundle& data, ModelState state, EpochObserver observer) {
    validate_config(state.config);
    validate_bundle(data);
    if (state.n() != data.x.rows())
        throw ShapeError("model built for n=" + std::to_string(state.n()) + ", data has n=" +
                         std::to_string(data.x.rows()));
    if (state.input_dim() != data.x.cols())
        throw ShapeError("model input width " + std::to_string(state.input_dim()) +
                         " vs features " + data.x.shape_str());
    const TrainConfig& cfg = state.config;

    // Centroids from k-means over the pretrained latent features, unless a
    // loaded checkpoint already carries trained ones.
    bool centroids_unset = true;
    for (std::size_t i = 0; i < state.head.centroids.size(); ++i)
        if (state.head.centroids.data()[i] != 0.0) centroids_unset = false;
    if (centroids_unset) {
        const Mat h = dae_encode(data.x, state.dae).back();
        Rng kr = Rng(cfg.seed).fork("kmeans");
        state.head.centroids = kmeans_centroids(h, state.num_clusters(), kr);
    }

    auto params = named_params(state);
    Adam opt(cfg.learning_rate, params);
    const bool freeze_theta = cfg.variant == Variant::scalable_iappnp && uses_fixed_teleport(cfg);

    TrainResult res;
    res.log.reserve(cfg.epochs);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Tape t;
        const TapeForward fwd = build_tape_forward(t, state, data.x);
        const Mat za = t.value(fwd.za);
        for (std::size_t i = 0; i < za.size(); ++i) {
            if (!std::isfinite(za.data()[i]))
                throw TrainingDivergedError("epoch " + std::to_string(epoch) +
                                            ": embedding values became non-finite");
        }

        EpochLog row;
        row.epoch = epoch;
        if (cfg.variant == Variant::scalable_iappnp) row.theta = state.prop->theta(0, 0);

        // Refinement event: the snapshots change after the forward pass, so
        // the refined graph is first consumed by the next epoch.
        if (cfg.graph_refinement && epoch % cfg.refine_interval == 0) {
            if (fwd.fused_on_tape) state.working = t.sp_value(fwd.fused_raw);
            state.induced = induced_graph(za);
            row.refined = true;
        }

        Mat p;
        try {
            p = target_p(za);
        } catch (const ColumnCollapseError& e) {
            throw ColumnCollapseError("epoch " + std::to_string(epoch) + ": " + e.what());
        }
        const Tape::Id pid = t.input(std::move(p));
        Tape::Id term_pz, term_pq, term_zq;
        if (cfg.jeffreys) {
            term_pz = t.jeffreys_div(pid, fwd.za);
            term_pq = t.jeffreys_div(pid, fwd.q);
            term_zq = t.jeffreys_div(fwd.za, fwd.q);
        } else {
            term_pz = t.kl_div(pid, fwd.za);
            term_pq = t.kl_div(pid, fwd.q);
            term_zq = t.kl_div(fwd.za, fwd.q);
        }
        const Tape::Id rec = t.recon_mse(fwd.xhat, data.x);
        const Tape::Id loss = t.weighted_sum({{rec, 1.0},
                                              {term_pz, cfg.lambda1},
                                              {term_pq, cfg.lambda2},
                                              {term_zq, cfg.lambda3}});
        row.loss_total = t.value(loss)(0, 0);
        row.loss_rec = t.value(rec)(0, 0);
        row.loss_pz = t.value(term_pz)(0, 0);
        row.loss_pq = t.value(term_pq)(0, 0);
        row.loss_zq = t.value(term_zq)(0, 0);
        if (!std::isfinite(row.loss_total))
            throw TrainingDivergedError("epoch " + std::to_string(epoch) + ": loss " +
                                        fmt_loss(row.loss_total));

        t.backward(loss);
        std::vector<const Mat*> grads(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            const bool frozen = freeze_theta && params[i].name == "theta";
            grads[i] = frozen ? nullptr : &t.grad(fwd.params[i]);
        }
        opt.step(params, grads);

        // The teleport weight parameterizes a convex mixture; project it back
        // onto [0,1] after the step.
        if (cfg.variant == Variant::scalable_iappnp && !freeze_theta) {
            double& th = state.prop->theta.data()[0];
            th = std::clamp(th, 0.0, 1.0);
        }

        if (!data.labels.empty()) {
            const auto pred = to_int_labels(hard_assign(za));
            row.acc = clustering_accuracy(pred, data.labels);
            row.nmi = normalized_mutual_info(pred, data.labels, cfg.nmi_norm);
            row.ari = adjusted_rand_index(pred, data.labels);
        }
        res.log.push_back(row);
        if (observer) observer(row, state);
    }

    const Forward last = model_forward(state, data.x);
    res.labels = hard_assign(last.za);
    res.state = std::move(state);
    return res;
}

void write_run_log(std::ostream& out, const std::vector<EpochLog>& log) {
    for (const auto& r : log) {
        out << "{\"epoch\":" << r.epoch
            << ",\"loss_total\":" << fmt_loss(r.loss_total)
            << ",\"loss_rec\":" << fmt_loss(r.loss_rec)
            << ",\"loss_pz\":" << fmt_loss(r.loss_pz)
            << ",\"loss_pq\":" << fmt_loss(r.loss_pq)
            << ",\"loss_zq\":" << fmt_loss(r.loss_zq);
        if (r.theta) out << ",\"theta\":" << fmt_loss(*r.theta);
        if (r.acc) out << ",\"acc\":" << fmt_loss(*r.acc);
        if (r.nmi) out << ",\"nmi\":" << fmt_loss(*r.nmi);
        if (r.ari) out << ",\"ari\":" << fmt_loss(*r.ari);
        out << ",\"refined\":" << (r.refined ? "true" : "false") << "}\n";
    }
}

} // namespace grclust

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grclust/config.hpp"
#include "grclust/dae.hpp"
#include "grclust/gcn.hpp"
#include "grclust/mat.hpp"
#include "grclust/objective.hpp"
#include "grclust/propagation.hpp"
#include "grclust/refine.hpp"
#include "grclust/rng.hpp"
#include "grclust/sparse.hpp"
#include "grclust/tape.hpp"

namespace grclust {

// Every trainable parameter plus the graphs maintained by the refinement
// loop. Exactly one of {gcn, prop} is engaged, selected by config.variant.
//
// Graph bookkeeping: `working` holds the raw current graph (the input graph
// until the first refinement event, thereafter the detached fused graph as of
// the latest event). `induced` holds the row-stochastic embedding-induced
// graph from the latest event and is empty (n() == 0) before the first one.
// Once `induced` exists, every forward pass recomputes the fusion from the
// two snapshots with the live fusion weights, so those weights keep receiving
// gradients between events.
struct ModelState {
    TrainConfig config;
    DaeParams dae;
    std::optional<GcnFusionParams> gcn;
    std::optional<PropagationParams> prop;
    RefinerParams refiner;
    ClusterHead head;
    SparseAdjacency working;
    SparseAdjacency induced;

    std::size_t n() const { return working.n(); }
    std::size_t input_dim() const { return dae.widths.front(); }
    std::size_t num_clusters() const { return head.num_clusters(); }
};

// Fresh model with seeded parameters. Centroids start at zero; the trainer
// replaces them with k-means centers of the pretrained latent features. For a
// fixed-teleport run the teleport parameter is pinned to 1 - fixed_teleport
// (mixing toward the prediction with weight rho equals mixing away from the
// propagation with weight 1 - rho).
ModelState make_model(const TrainConfig& config, std::size_t input_dim,
                      std::size_t num_clusters, const SparseAdjacency& graph,
                      const Rng& seed_rng);

struct NamedParam {
    std::string name;
    Mat* mat;
};
struct NamedParamView {
    std::string name;
    const Mat* mat;
};

// Fixed-order enumeration of every trainable matrix; checkpoint layout, the
// optimizer state, and the tape builder's parameter list all follow it.
std::vector<NamedParam> named_params(ModelState& s);
std::vector<NamedParamView> named_params(const ModelState& s);

// The graph the branch consumes: fusion of (induced, working) when a
// refinement event has happened, else the working graph; sym-renormalized for
// the GCN branch, self-looped row-stochastic for propagation.
SparseAdjacency effective_graph(const ModelState& s);

struct Forward {
    std::vector<Mat> h; // encoder activations H_1..H_l
    Mat xhat;
    Mat za;
};

Forward model_forward(const ModelState& s, const Mat& x);

// Differentiable forward. `params` aligns index-for-index with
// named_params(s); `fused_raw` is the raw fused-graph node when the fusion
// chain is on the tape (established refinement), so its detached value can
// become the next working graph.
struct TapeForward {
    Tape::Id x = 0;
    Tape::Id xhat = 0;
    Tape::Id latent = 0; // H_l
    Tape::Id za = 0;
    Tape::Id q = 0; // Student's-t soft assignment of H_l to the centroids
    std::vector<Tape::Id> params;
    bool fused_on_tape = false;
    Tape::SpId fused_raw = 0;
};

TapeForward build_tape_forward(Tape& t, const ModelState& s, const Mat& x);

} // namespace grclust

#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "grclust/model.hpp"

namespace grclust {

// One transductive problem instance. `labels` is ground truth for evaluation
// only (never touches training); empty means unavailable.
struct DataBundle {
    Mat x;                 // n x d node features, nonnegative
    SparseAdjacency graph; // raw symmetric input graph over the same n
    std::vector<int> labels;

    std::size_t n() const { return x.rows(); }
};

struct EpochLog {
    std::size_t epoch = 0; // 1-based
    double loss_total = 0.0;
    double loss_rec = 0.0;
    double loss_pz = 0.0; // unweighted divergence(target, graph assignment)
    double loss_pq = 0.0; // unweighted divergence(target, cluster head)
    double loss_zq = 0.0; // unweighted divergence(graph assignment, cluster head)
    bool refined = false;
    std::optional<double> theta; // scalable variant only
    std::optional<double> acc, nmi, ari;
};

struct TrainResult {
    ModelState state;
    std::vector<std::size_t> labels; // final hard assignments
    std::vector<EpochLog> log;
};

// Called after each epoch's update with the log row and the current state.
using EpochObserver = std::function<void(const EpochLog&, const ModelState&)>;

// Reconstruction-only warm-up of the auto-encoder inside a freshly seeded
// model. Throws TrainingDivergedError (with the epoch) when the loss leaves
// the finite range.
ModelState pretrain_dae(const DataBundle& data, const TrainConfig& config,
                        std::size_t num_clusters);

// Joint training: per (1-based) epoch, forward; refine the graph when
// epoch % refine_interval == 0 (takes effect next epoch); form the soft and
// target assignments; backprop; adaptive-moment update. Centroids are
// initialized by k-means on the pretrained latent features when they are
// still zero. Returns final assignments from a forward pass with the trained
// parameters.
TrainResult train(const DataBundle& data, ModelState state, EpochObserver observer = nullptr);

// One JSON object per line with fixed keys {epoch, loss_total, loss_rec,
// loss_pz, loss_pq, loss_zq, theta?, acc?, nmi?, ari?, refined}.
void write_run_log(std::ostream& out, const std::vector<EpochLog>& log);

} // namespace grclust

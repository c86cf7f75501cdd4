#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "grclust/metrics.hpp"

namespace grclust {

enum class Variant {
    full_gcn,        // DAE + GCN with per-layer and multiscale fusion
    scalable_iappnp, // DAE + learned-teleport personalized-PageRank propagation
};

// Full run description. Every field maps 1:1 onto a key in the flat
// key=value config file format; unknown keys in a file are errors.
struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t pretrain_epochs = 30;
    double learning_rate = 0.001;
    double pretrain_learning_rate = 0.001;
    double lambda1 = 10.0;
    double lambda2 = 1.0;
    double lambda3 = 0.1;
    std::size_t refine_interval = 10;
    Variant variant = Variant::full_gcn;
    std::size_t tau = 1;
    std::size_t knn_k = 3;
    std::size_t num_clusters = 0; // 0 = derive from ground-truth labels when present
    std::uint64_t seed = 0;
    bool graph_refinement = true; // false freezes the working graph
    bool jeffreys = true;         // false drops the reverse KL half of each term
    double lrelu_slope = 0.2;
    // Encoder widths after the input layer, last entry is the embedding width.
    std::vector<std::size_t> dae_widths = {500, 500, 2000, 10};
    std::size_t iappnp_hidden = 500; // hidden width of the E0 head; 0 = single linear
    double fixed_teleport = -1.0;    // -1 learns the teleport weight, [0,1] pins it
    NmiNorm nmi_norm = NmiNorm::geometric;
};

// True when the scalable variant should skip the teleport parameter's
// gradient and hold it at the configured constant.
inline bool uses_fixed_teleport(const TrainConfig& c) { return c.fixed_teleport >= 0.0; }

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);

// Validates cross-field invariants (epochs >= 1, refine_interval >= 1,
// learning_rate > 0, ...). Throws ParameterError on violation.
void validate_config(const TrainConfig& config);

// Parses "key = value" lines ('#' starts a comment, blank lines ignored).
// Unknown or repeated keys and unparsable values throw FormatError; the
// result is validated before it is returned.
TrainConfig parse_config(std::istream& in);
TrainConfig parse_config_text(const std::string& text);
TrainConfig load_config(const std::string& path);

// Writes one "key = value" line per field, parseable by parse_config.
void write_config(std::ostream& out, const TrainConfig& config);

} // namespace grclust

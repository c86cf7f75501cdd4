// Command-line driver: pretrain / train / eval / build-graph / embed.
// Exit codes: 0 success, 2 usage or input error, 3 training divergence.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "grclust/checkpoint.hpp"
#include "grclust/config.hpp"
#include "grclust/errors.hpp"
#include "grclust/graphio.hpp"
#include "grclust/metrics.hpp"
#include "grclust/model.hpp"
#include "grclust/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace grclust;

namespace {

constexpr const char* kArtifactVersion = "1.0.0";

struct DatasetArgs {
    std::string features;
    std::optional<std::string> labels;
    std::optional<std::string> graph;
};

struct TrainOverrides {
    std::optional<std::string> variant;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> epochs;
    std::optional<double> fixed_teleport;
    bool no_refine = false;
    bool no_jeffreys = false;
};

void apply_overrides(TrainConfig& cfg, const TrainOverrides& ov) {
    if (ov.variant) cfg.variant = parse_variant(*ov.variant);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.epochs) cfg.epochs = *ov.epochs;
    if (ov.fixed_teleport) cfg.fixed_teleport = *ov.fixed_teleport;
    if (ov.no_refine) cfg.graph_refinement = false;
    if (ov.no_jeffreys) cfg.jeffreys = false;
    validate_config(cfg);
}

// num_clusters = 0 in the config defers to the ground-truth label count.
std::size_t resolve_clusters(const TrainConfig& cfg, const DatasetArgs& ds) {
    if (cfg.num_clusters > 0) return cfg.num_clusters;
    if (!ds.labels) {
        throw ParameterError("num_clusters is 0 and no label file given: set num_clusters "
                             "in the config or pass --labels");
    }
    const std::vector<int> remapped = remap_labels(load_labels(*ds.labels));
    return static_cast<std::size_t>(*std::max_element(remapped.begin(), remapped.end())) + 1;
}

// Features are scaled after graph construction: neighbors are found on the
// raw rows, reconstruction targets must be reachable through the relu decoder.
DataBundle load_bundle(const TrainConfig& cfg, const DatasetArgs& ds, std::size_t num_clusters) {
    const DatasetBundle raw = load_dataset(ds.features, ds.labels, ds.graph, num_clusters);
    const EdgeList edges = raw.graph ? *raw.graph : build_knn_graph(raw.features, cfg.knn_k);
    DataBundle data;
    data.graph = to_adjacency(edges);
    data.x = scale_features_unit(raw.features);
    if (raw.labels) data.labels = *raw.labels;
    return data;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write file: " + path.string());
    out << text;
}

// Written before any training starts; the embedded config is the resolved
// one (num_clusters filled in), so replaying it needs no label file.
void write_manifest(const fs::path& out_dir, const std::string& command, const TrainConfig& cfg,
                    const DatasetArgs& ds) {
    std::ostringstream cfg_text;
    write_config(cfg_text, cfg);
    json m;
    m["artifact_version"] = kArtifactVersion;
    m["command"] = command;
    m["seed"] = cfg.seed;
    m["dataset"]["features"] = ds.features;
    m["dataset"]["labels"] = ds.labels ? json(*ds.labels) : json(nullptr);
    m["dataset"]["graph"] = ds.graph ? json(*ds.graph) : json(nullptr);
    m["output_dir"] = out_dir.string();
    m["config"] = cfg_text.str();
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

// A pretrained checkpoint warm-starts the autoencoder only; the rest of the
// skeleton is rebuilt for the requested variant and seed.
void adopt_pretrained_dae(ModelState& state, const std::string& path) {
    const ModelState loaded = load_checkpoint(path);
    if (loaded.dae.enc_w.size() != state.dae.enc_w.size())
        throw ParameterError("pretrained checkpoint has " +
                             std::to_string(loaded.dae.enc_w.size()) + " encoder layers, config (" +
                             std::to_string(state.dae.enc_w.size()) + ") disagrees");
    for (std::size_t i = 0; i < loaded.dae.enc_w.size(); ++i) {
        if (loaded.dae.enc_w[i].rows() != state.dae.enc_w[i].rows() ||
            loaded.dae.enc_w[i].cols() != state.dae.enc_w[i].cols())
            throw ParameterError("pretrained encoder layer " + std::to_string(i) + " is " +
                                 loaded.dae.enc_w[i].shape_str() + ", config expects " +
                                 state.dae.enc_w[i].shape_str());
    }
    state.dae = loaded.dae;
}

int run_pretrain(const std::string& config_path, const DatasetArgs& ds,
                 const std::string& out_dir) {
    TrainConfig cfg = load_config(config_path);
    const std::size_t k = resolve_clusters(cfg, ds);
    cfg.num_clusters = k;
    const DataBundle data = load_bundle(cfg, ds, k);
    fs::create_directories(out_dir);
    write_manifest(out_dir, "pretrain", cfg, ds);
    const ModelState state = pretrain_dae(data, cfg, k);
    save_checkpoint(state, (fs::path(out_dir) / "pretrain.grck").string());
    std::cout << (fs::path(out_dir) / "pretrain.grck").string() << "\n";
    return 0;
}

int run_train(const std::string& config_path, const DatasetArgs& ds, const std::string& out_dir,
              const std::optional<std::string>& pretrained, const TrainOverrides& ov) {
    TrainConfig cfg = load_config(config_path);
    apply_overrides(cfg, ov);
    const std::size_t k = resolve_clusters(cfg, ds);
    cfg.num_clusters = k;
    const DataBundle data = load_bundle(cfg, ds, k);
    fs::create_directories(out_dir);
    write_manifest(out_dir, "train", cfg, ds);

    ModelState state = pretrain_dae(data, cfg, k);
    if (pretrained) adopt_pretrained_dae(state, *pretrained);

    const std::size_t stride = std::max<std::size_t>(1, cfg.epochs / 10);
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult res =
        train(data, std::move(state), [&](const EpochLog& row, const ModelState&) {
            if (row.epoch % stride == 0 || row.epoch == cfg.epochs) {
                std::fprintf(stderr, "epoch %zu/%zu loss %.6f%s\n", row.epoch, cfg.epochs,
                             row.loss_total, row.refined ? " (refined)" : "");
            }
        });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path out(out_dir);
    save_checkpoint(res.state, (out / "model.grck").string());
    save_labels((out / "labels.txt").string(), to_int_labels(res.labels));
    std::ostringstream log_text;
    write_run_log(log_text, res.log);
    write_text(out / "run_log.jsonl", log_text.str());

    if (!data.labels.empty()) {
        const std::vector<int> pred = to_int_labels(res.labels);
        const auto [homo, comp] = homogeneity_completeness(pred, data.labels);
        json metrics;
        metrics["acc"] = clustering_accuracy(pred, data.labels);
        metrics["nmi"] = normalized_mutual_info(pred, data.labels, cfg.nmi_norm);
        metrics["ari"] = adjusted_rand_index(pred, data.labels);
        metrics["homogeneity"] = homo;
        metrics["completeness"] = comp;
        metrics["seconds"] = seconds;
        metrics["epochs"] = cfg.epochs;
        write_text(out / "metrics.json", metrics.dump(2) + "\n");
        std::cout << metrics.dump() << "\n";
    } else {
        std::cout << (out / "labels.txt").string() << "\n";
    }
    return 0;
}

int run_eval(const std::string& labels_path, const std::string& truth_path) {
    const std::vector<int> pred = load_labels(labels_path);
    const std::vector<int> truth = load_labels(truth_path);
    if (pred.size() != truth.size())
        throw ShapeError("label count " + std::to_string(pred.size()) + " != truth count " +
                         std::to_string(truth.size()));
    const auto [homo, comp] = homogeneity_completeness(pred, truth);
    json metrics;
    metrics["acc"] = clustering_accuracy(pred, truth);
    metrics["nmi"] = normalized_mutual_info(pred, truth);
    metrics["ari"] = adjusted_rand_index(pred, truth);
    metrics["homogeneity"] = homo;
    metrics["completeness"] = comp;
    std::cout << metrics.dump() << "\n";
    return 0;
}

int run_build_graph(const std::string& features_path, std::size_t k, const std::string& out_path) {
    const Mat x = load_feature_matrix(features_path);
    const EdgeList edges = build_knn_graph(x, k);
    save_edge_list(out_path, edges);
    std::cout << out_path << " (" << edges.edges.size() << " edges)\n";
    return 0;
}

int run_embed(const std::string& checkpoint_path, const std::string& features_path,
              const std::string& out_dir) {
    const ModelState state = load_checkpoint(checkpoint_path);
    const Mat x = scale_features_unit(load_feature_matrix(features_path));
    if (x.cols() != state.input_dim())
        throw ShapeError("feature dimension " + std::to_string(x.cols()) +
                         " != checkpoint input dimension " + std::to_string(state.input_dim()));
    const Forward f = model_forward(state, x);
    fs::create_directories(out_dir);
    save_feature_matrix((fs::path(out_dir) / "za.txt").string(), f.za);
    save_feature_matrix((fs::path(out_dir) / "latent.txt").string(), f.h.back());
    std::cout << (fs::path(out_dir) / "za.txt").string() << "\n";
    return 0;
}

template <typename F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const TrainingDivergedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised graph clustering: autoencoder + graph branch with "
                 "embedding-induced graph refinement"};
    app.require_subcommand(1);

    std::string config_path, out_dir, pretrained_path;
    DatasetArgs ds;
    std::string labels_in, graph_in;
    TrainOverrides ov;
    std::string ov_variant;
    std::uint64_t ov_seed = 0;
    std::size_t ov_epochs = 0;
    double ov_teleport = -2.0;

    auto add_dataset = [&](CLI::App* cmd) {
        cmd->add_option("--features", ds.features, "feature matrix file")->required();
        cmd->add_option("--labels", labels_in, "ground-truth label file");
        cmd->add_option("--graph", graph_in, "edge list file (default: KNN over features)");
        cmd->add_option("--out", out_dir, "output directory")->required();
    };

    CLI::App* pre = app.add_subcommand("pretrain", "train the autoencoder on reconstruction only");
    pre->add_option("config", config_path, "flat key=value config file")->required();
    add_dataset(pre);

    CLI::App* tr = app.add_subcommand("train", "joint clustering training");
    tr->add_option("config", config_path, "flat key=value config file")->required();
    add_dataset(tr);
    tr->add_option("--pretrained", pretrained_path, "autoencoder warm-start checkpoint");
    tr->add_option("--variant", ov_variant, "full_gcn or scalable_iappnp");
    tr->add_option("--seed", ov_seed, "override the run seed")->check(CLI::NonNegativeNumber);
    tr->add_option("--epochs", ov_epochs, "override the epoch count");
    tr->add_option("--fixed-teleport", ov_teleport, "pin the teleport weight to 1-rho");
    tr->add_flag("--no-refine", ov.no_refine, "disable graph refinement");
    tr->add_flag("--no-jeffreys", ov.no_jeffreys, "asymmetric divergences only");

    std::string eval_labels, eval_truth;
    CLI::App* ev = app.add_subcommand("eval", "score a label file against ground truth");
    ev->add_option("labels", eval_labels, "predicted label file")->required();
    ev->add_option("truth", eval_truth, "ground-truth label file")->required();

    std::string bg_features, bg_out;
    std::size_t bg_k = 0;
    CLI::App* bg = app.add_subcommand("build-graph", "write the directed KNN edge list");
    bg->add_option("features", bg_features, "feature matrix file")->required();
    bg->add_option("k", bg_k, "neighbors per node")->required();
    bg->add_option("out", bg_out, "output edge list path")->required();

    std::string em_ckpt, em_features, em_out;
    CLI::App* em = app.add_subcommand("embed", "export soft assignments and latent features");
    em->add_option("checkpoint", em_ckpt, "model checkpoint")->required();
    em->add_option("features", em_features, "feature matrix file")->required();
    em->add_option("out", em_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (!labels_in.empty()) ds.labels = labels_in;
    if (!graph_in.empty()) ds.graph = graph_in;
    if (tr->parsed()) {
        if (!ov_variant.empty()) ov.variant = ov_variant;
        if (tr->count("--seed")) ov.seed = ov_seed;
        if (tr->count("--epochs")) ov.epochs = ov_epochs;
        if (tr->count("--fixed-teleport")) ov.fixed_teleport = ov_teleport;
    }

    if (pre->parsed()) return guarded([&] { return run_pretrain(config_path, ds, out_dir); });
    if (tr->parsed()) {
        return guarded([&] {
            return run_train(config_path, ds, out_dir,
                             pretrained_path.empty() ? std::nullopt
                                                     : std::optional<std::string>(pretrained_path),
                             ov);
        });
    }
    if (ev->parsed()) return guarded([&] { return run_eval(eval_labels, eval_truth); });
    if (bg->parsed()) return guarded([&] { return run_build_graph(bg_features, bg_k, bg_out); });
    if (em->parsed()) return guarded([&] { return run_embed(em_ckpt, em_features, em_out); });
    return 2;
}

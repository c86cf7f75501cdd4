#include "grclust/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "grclust/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace grclust {
namespace {

constexpr char kMagic[4] = {'G', 'R', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ostream& out, const void* p, std::size_t len) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
}

void put_u32(std::ostream& out, std::uint32_t v) { put_bytes(out, &v, 4); }
void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, &v, 8); }
void put_u8(std::ostream& out, std::uint8_t v) { put_bytes(out, &v, 1); }

void put_str(std::ostream& out, const std::string& s) {
    put_u64(out, s.size());
    put_bytes(out, s.data(), s.size());
}

void put_mat(std::ostream& out, const Mat& m) {
    put_u64(out, m.rows());
    put_u64(out, m.cols());
    put_bytes(out, m.data(), m.size() * sizeof(double));
}

void put_graph(std::ostream& out, const SparseAdjacency& g) {
    put_u64(out, g.n());
    put_u64(out, g.nnz());
    put_u8(out, static_cast<std::uint8_t>(g.norm_state()));
    for (std::size_t r : g.row_ptr()) put_u64(out, r);
    for (std::size_t c : g.col_idx()) put_u64(out, c);
    put_bytes(out, g.values().data(), g.values().size() * sizeof(double));
}

void get_bytes(std::istream& in, void* p, std::size_t len) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in.gcount()) != len)
        throw CheckpointVersionError("checkpoint truncated");
}

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v;
    get_bytes(in, &v, 4);
    return v;
}

std::uint64_t get_u64(std::istream& in) {
    std::uint64_t v;
    get_bytes(in, &v, 8);
    return v;
}

std::uint8_t get_u8(std::istream& in) {
    std::uint8_t v;
    get_bytes(in, &v, 1);
    return v;
}

// Caps every deserialized count so a corrupt header fails cleanly instead of
// attempting an absurd allocation.
constexpr std::uint64_t kMaxCount = 1ull << 33;

std::uint64_t get_count(std::istream& in) {
    const std::uint64_t v = get_u64(in);
    if (v > kMaxCount) throw CheckpointVersionError("checkpoint field size implausible");
    return v;
}

std::string get_str(std::istream& in) {
    const std::uint64_t len = get_count(in);
    std::string s(len, '\0');
    get_bytes(in, s.data(), len);
    return s;
}

Mat get_mat(std::istream& in) {
    const std::uint64_t rows = get_count(in);
    const std::uint64_t cols = get_count(in);
    if (rows == 0 || cols == 0 || rows * cols > kMaxCount)
        throw CheckpointVersionError("checkpoint matrix shape implausible");
    Mat m(rows, cols);
    get_bytes(in, m.data(), m.size() * sizeof(double));
    return m;
}

SparseAdjacency get_graph(std::istream& in) {
    const std::uint64_t n = get_count(in);
    const std::uint64_t nnz = get_count(in);
    const std::uint8_t state = get_u8(in);
    if (state > 2) throw CheckpointVersionError("checkpoint graph state invalid");
    std::vector<std::size_t> row_ptr(n + 1), col_idx(nnz);
    std::vector<double> values(nnz);
    for (auto& r : row_ptr) r = get_u64(in);
    for (auto& c : col_idx) c = get_u64(in);
    get_bytes(in, values.data(), values.size() * sizeof(double));
    if (row_ptr.front() != 0 || row_ptr.back() != nnz)
        throw CheckpointVersionError("checkpoint graph index table corrupt");
    return SparseAdjacency::from_csr(n, std::move(row_ptr), std::move(col_idx),
                                     std::move(values), static_cast<NormState>(state));
}

} // namespace

void save_checkpoint(const ModelState& s, std::ostream& out) {
    put_bytes(out, kMagic, 4);
    put_u32(out, kVersion);
    std::ostringstream cfg;
    write_config(cfg, s.config);
    put_str(out, cfg.str());
    const auto params = named_params(s);
    put_u64(out, params.size());
    for (const auto& p : params) {
        put_str(out, p.name);
        put_mat(out, *p.mat);
    }
    put_graph(out, s.working);
    put_graph(out, s.induced);
}

void save_checkpoint(const ModelState& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open checkpoint for writing: " + path);
    save_checkpoint(s, out);
    out.flush();
    if (!out) throw FormatError("write failed for checkpoint: " + path);
}

ModelState load_checkpoint(std::istream& in) {
    char magic[4];
    get_bytes(in, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw CheckpointVersionError("not a checkpoint file (bad magic)");
    const std::uint32_t version = get_u32(in);
    if (version != kVersion)
        throw CheckpointVersionError("unsupported checkpoint version " + std::to_string(version));

    TrainConfig config;
    try {
        config = parse_config_text(get_str(in));
    } catch (const FormatError& e) {
        throw CheckpointVersionError(std::string("checkpoint config block corrupt: ") + e.what());
    } catch (const ParameterError& e) {
        throw CheckpointVersionError(std::string("checkpoint config block corrupt: ") + e.what());
    }

    const std::uint64_t count = get_count(in);
    std::vector<std::pair<std::string, Mat>> stored;
    stored.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::string name = get_str(in);
        stored.emplace_back(std::move(name), get_mat(in));
    }
    SparseAdjacency working = get_graph(in);
    SparseAdjacency induced = get_graph(in);

    // Rebuild the skeleton from the config, then overwrite every parameter;
    // name and shape agreement ties the array list to the declared model.
    std::size_t input_dim = 0, num_clusters = 0;
    for (const auto& [name, mat] : stored) {
        if (name == "enc_w0") input_dim = mat.rows();
        if (name == "centroids") num_clusters = mat.rows();
    }
    if (input_dim == 0 || num_clusters == 0)
        throw CheckpointVersionError("checkpoint parameter set incomplete");
    ModelState s = make_model(config, input_dim, num_clusters, working, Rng(config.seed));
    s.induced = std::move(induced);
    auto params = named_params(s);
    if (params.size() != stored.size())
        throw CheckpointVersionError("checkpoint parameter count does not match the config");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].name != stored[i].first)
            throw CheckpointVersionError("checkpoint parameter '" + stored[i].first +
                                         "' does not match expected '" + params[i].name + "'");
        if (!params[i].mat->same_shape(stored[i].second))
            throw CheckpointVersionError("checkpoint parameter '" + stored[i].first +
                                         "' has shape " + stored[i].second.shape_str() +
                                         ", expected " + params[i].mat->shape_str());
        *params[i].mat = std::move(stored[i].second);
    }
    return s;
}

ModelState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint: " + path);
    return load_checkpoint(in);
}

} // namespace grclust

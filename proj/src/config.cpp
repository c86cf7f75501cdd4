#include "grclust/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "grclust/errors.hpp"

namespace grclust {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw FormatError("config key '" + key + "': expected a number, got '" + v + "'");
    }
    if (pos != v.size())
        throw FormatError("config key '" + key + "': trailing characters in '" + v + "'");
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* first = v.data();
    const auto* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw FormatError("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw FormatError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::size_t> parse_widths(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<std::size_t>(parse_uint(key, trim(item))));
    if (out.empty()) throw FormatError("config key '" + key + "': empty width list");
    return out;
}

// Shortest decimal form that parses back to the same bits.
std::string fmt_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

const char* nmi_norm_name(NmiNorm n) {
    return n == NmiNorm::geometric ? "geometric" : "arithmetic";
}

NmiNorm parse_nmi_norm(const std::string& v) {
    if (v == "geometric") return NmiNorm::geometric;
    if (v == "arithmetic") return NmiNorm::arithmetic;
    throw FormatError("config key 'nmi_norm': expected geometric or arithmetic, got '" + v + "'");
}

} // namespace

const char* variant_name(Variant v) {
    return v == Variant::full_gcn ? "full_gcn" : "scalable_iappnp";
}

Variant parse_variant(const std::string& name) {
    if (name == "full_gcn") return Variant::full_gcn;
    if (name == "scalable_iappnp") return Variant::scalable_iappnp;
    throw FormatError("unknown variant '" + name + "' (expected full_gcn or scalable_iappnp)");
}

void validate_config(const TrainConfig& c) {
    if (c.epochs < 1) throw ParameterError("epochs must be >= 1");
    if (c.pretrain_epochs < 1) throw ParameterError("pretrain_epochs must be >= 1");
    if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate))
        throw ParameterError("learning_rate must be positive");
    if (!(c.pretrain_learning_rate > 0.0) || !std::isfinite(c.pretrain_learning_rate))
        throw ParameterError("pretrain_learning_rate must be positive");
    if (!(c.lambda1 > 0.0) || !(c.lambda2 > 0.0) || !(c.lambda3 > 0.0))
        throw ParameterError("lambda1/lambda2/lambda3 must be positive");
    if (c.refine_interval < 1) throw ParameterError("refine_interval must be >= 1");
    if (c.tau < 1) throw ParameterError("tau must be >= 1");
    if (c.knn_k < 1) throw ParameterError("knn_k must be >= 1");
    if (!(c.lrelu_slope >= 0.0 && c.lrelu_slope <= 1.0))
        throw ParameterError("lrelu_slope must lie in [0, 1]");
    if (c.dae_widths.empty()) throw ParameterError("dae_widths must be nonempty");
    for (std::size_t w : c.dae_widths)
        if (w < 1) throw ParameterError("dae_widths entries must be >= 1");
    if (c.fixed_teleport != -1.0 && !(c.fixed_teleport >= 0.0 && c.fixed_teleport <= 1.0))
        throw ParameterError("fixed_teleport must be -1 (learned) or lie in [0, 1]");
}

TrainConfig parse_config(std::istream& in) {
    TrainConfig c;
    using Setter = std::function<void(TrainConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"epochs", [](TrainConfig& t, const std::string& k, const std::string& v) { t.epochs = parse_uint(k, v); }},
        {"pretrain_epochs", [](TrainConfig& t, const std::string& k, const std::string& v) { t.pretrain_epochs = parse_uint(k, v); }},
        {"learning_rate", [](TrainConfig& t, const std::string& k, const std::string& v) { t.learning_rate = parse_double(k, v); }},
        {"pretrain_learning_rate", [](TrainConfig& t, const std::string& k, const std::string& v) { t.pretrain_learning_rate = parse_double(k, v); }},
        {"lambda1", [](TrainConfig& t, const std::string& k, const std::string& v) { t.lambda1 = parse_double(k, v); }},
        {"lambda2", [](TrainConfig& t, const std::string& k, const std::string& v) { t.lambda2 = parse_double(k, v); }},
        {"lambda3", [](TrainConfig& t, const std::string& k, const std::string& v) { t.lambda3 = parse_double(k, v); }},
        {"refine_interval", [](TrainConfig& t, const std::string& k, const std::string& v) { t.refine_interval = parse_uint(k, v); }},
        {"variant", [](TrainConfig& t, const std::string&, const std::string& v) { t.variant = parse_variant(v); }},
        {"tau", [](TrainConfig& t, const std::string& k, const std::string& v) { t.tau = parse_uint(k, v); }},
        {"knn_k", [](TrainConfig& t, const std::string& k, const std::string& v) { t.knn_k = parse_uint(k, v); }},
        {"num_clusters", [](TrainConfig& t, const std::string& k, const std::string& v) { t.num_clusters = parse_uint(k, v); }},
        {"seed", [](TrainConfig& t, const std::string& k, const std::string& v) { t.seed = parse_uint(k, v); }},
        {"graph_refinement", [](TrainConfig& t, const std::string& k, const std::string& v) { t.graph_refinement = parse_bool(k, v); }},
        {"jeffreys", [](TrainConfig& t, const std::string& k, const std::string& v) { t.jeffreys = parse_bool(k, v); }},
        {"lrelu_slope", [](TrainConfig& t, const std::string& k, const std::string& v) { t.lrelu_slope = parse_double(k, v); }},
        {"dae_widths", [](TrainConfig& t, const std::string& k, const std::string& v) { t.dae_widths = parse_widths(k, v); }},
        {"iappnp_hidden", [](TrainConfig& t, const std::string& k, const std::string& v) { t.iappnp_hidden = parse_uint(k, v); }},
        {"fixed_teleport", [](TrainConfig& t, const std::string& k, const std::string& v) { t.fixed_teleport = parse_double(k, v); }},
        {"nmi_norm", [](TrainConfig& t, const std::string&, const std::string& v) { t.nmi_norm = parse_nmi_norm(v); }},
    };

    std::map<std::string, bool> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw FormatError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (seen[key])
            throw FormatError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        seen[key] = true;
        it->second(c, key, value);
    }
    validate_config(c);
    return c;
}

TrainConfig parse_config_text(const std::string& text) {
    std::istringstream ss(text);
    return parse_config(ss);
}

TrainConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config file: " + path);
    return parse_config(in);
}

void write_config(std::ostream& out, const TrainConfig& c) {
    out << "epochs = " << c.epochs << "\n";
    out << "pretrain_epochs = " << c.pretrain_epochs << "\n";
    out << "learning_rate = " << fmt_double(c.learning_rate) << "\n";
    out << "pretrain_learning_rate = " << fmt_double(c.pretrain_learning_rate) << "\n";
    out << "lambda1 = " << fmt_double(c.lambda1) << "\n";
    out << "lambda2 = " << fmt_double(c.lambda2) << "\n";
    out << "lambda3 = " << fmt_double(c.lambda3) << "\n";
    out << "refine_interval = " << c.refine_interval << "\n";
    out << "variant = " << variant_name(c.variant) << "\n";
    out << "tau = " << c.tau << "\n";
    out << "knn_k = " << c.knn_k << "\n";
    out << "num_clusters = " << c.num_clusters << "\n";
    out << "seed = " << c.seed << "\n";
    out << "graph_refinement = " << (c.graph_refinement ? "true" : "false") << "\n";
    out << "jeffreys = " << (c.jeffreys ? "true" : "false") << "\n";
    out << "lrelu_slope = " << fmt_double(c.lrelu_slope) << "\n";
    out << "dae_widths = ";
    for (std::size_t i = 0; i < c.dae_widths.size(); ++i) out << (i ? "," : "") << c.dae_widths[i];
    out << "\n";
    out << "iappnp_hidden = " << c.iappnp_hidden << "\n";
    out << "fixed_teleport = " << fmt_double(c.fixed_teleport) << "\n";
    out << "nmi_norm = " << nmi_norm_name(c.nmi_norm) << "\n";
}

} // namespace grclust

#include "grclust/rng.hpp"

#include <cmath>

namespace grclust {

double Rng::normal(double mean, double stddev) {
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

Rng Rng::fork(std::string_view label) const {
    // FNV-1a over the label, mixed with the current state.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    return Rng(state_ ^ h);
}

Mat init_fan_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Mat m(fan_in, fan_out);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
    return m;
}

Mat init_unit_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    Mat m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform();
    return m;
}

Mat init_normal(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
    Mat m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, stddev);
    return m;
}

} // namespace grclust

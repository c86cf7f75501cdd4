// Times the OpenMP kernel lane against its serial reference lane on
// model-shaped operands. Both lanes share one contract and are compared for
// equality in the unit tests; this target answers only "how much faster".
//
// Run: kernel_bench [--benchmark_filter=gemm] (Google Benchmark flags).

#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "grclust/kernels.hpp"
#include "grclust/mat.hpp"
#include "grclust/rng.hpp"

using grclust::Mat;
using grclust::Rng;

namespace {

Mat fill(std::size_t r, std::size_t c, Rng& rng) {
    Mat m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
    return m;
}

// Row-stochastic CSR with a fixed number of neighbors per row, the shape the
// propagation variant multiplies by every epoch.
struct Csr {
    std::vector<std::size_t> row_ptr, col_idx;
    std::vector<double> values;
};

Csr random_csr(std::size_t n, std::size_t per_row, Rng& rng) {
    Csr g;
    g.row_ptr.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> cols;
        while (cols.size() < per_row) {
            const std::size_t j = rng.index(n);
            bool dup = false;
            for (std::size_t c : cols) dup = dup || c == j;
            if (!dup) cols.push_back(j);
        }
        std::sort(cols.begin(), cols.end());
        for (std::size_t c : cols) {
            g.col_idx.push_back(c);
            g.values.push_back(1.0 / static_cast<double>(per_row));
        }
        g.row_ptr.push_back(g.col_idx.size());
    }
    return g;
}

using GemmFn = void (*)(const Mat&, const Mat&, Mat&);
using RowFn = void (*)(const Mat&, Mat&);

void bm_gemm(benchmark::State& state, GemmFn fn) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const Mat a = fill(n, 500, rng);
    const Mat b = fill(500, 500, rng);
    Mat out(n, 500);
    for (auto _ : state) {
        fn(a, b, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_gemm_tn(benchmark::State& state, GemmFn fn) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    const Mat a = fill(n, 256, rng);
    const Mat b = fill(n, 256, rng);
    Mat out(256, 256);
    for (auto _ : state) {
        fn(a, b, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_gemm_nt(benchmark::State& state, GemmFn fn) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    const Mat a = fill(n, 256, rng);
    const Mat b = fill(512, 256, rng);
    Mat out(n, 512);
    for (auto _ : state) {
        fn(a, b, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_row_softmax(benchmark::State& state, RowFn fn) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(4);
    const Mat x = fill(n, 64, rng);
    Mat out(n, 64);
    for (auto _ : state) {
        fn(x, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_row_l2(benchmark::State& state, void (*fn)(const Mat&, Mat&, double)) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(5);
    const Mat x = fill(n, 64, rng);
    Mat out(n, 64);
    for (auto _ : state) {
        fn(x, out, 1e-12);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_spmm(benchmark::State& state,
             void (*fn)(std::size_t, const std::vector<std::size_t>&,
                        const std::vector<std::size_t>&, const std::vector<double>&, const Mat&,
                        Mat&)) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(6);
    const Csr g = random_csr(n, 8, rng);
    const Mat x = fill(n, 500, rng);
    Mat out(n, 500);
    for (auto _ : state) {
        fn(n, g.row_ptr, g.col_idx, g.values, x, out);
        benchmark::DoNotOptimize(out.data());
    }
}

} // namespace

BENCHMARK_CAPTURE(bm_gemm, parallel, grclust::kern::gemm)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_gemm, serial, grclust::kern::serial::gemm)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_gemm_tn, parallel, grclust::kern::gemm_tn)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_gemm_tn, serial, grclust::kern::serial::gemm_tn)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_gemm_nt, parallel, grclust::kern::gemm_nt)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_gemm_nt, serial, grclust::kern::serial::gemm_nt)->Arg(256)->Arg(1024);
BENCHMARK_CAPTURE(bm_row_softmax, parallel, grclust::kern::row_softmax)->Arg(4096);
BENCHMARK_CAPTURE(bm_row_softmax, serial, grclust::kern::serial::row_softmax)->Arg(4096);
BENCHMARK_CAPTURE(bm_row_l2, parallel, grclust::kern::row_l2_normalize)->Arg(4096);
BENCHMARK_CAPTURE(bm_row_l2, serial, grclust::kern::serial::row_l2_normalize)->Arg(4096);
BENCHMARK_CAPTURE(bm_spmm, parallel, grclust::kern::spmm)->Arg(4096);
BENCHMARK_CAPTURE(bm_spmm, serial, grclust::kern::serial::spmm)->Arg(4096);

BENCHMARK_MAIN();

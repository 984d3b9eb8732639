// Parallel kernels vs the serial reference. Set OMP_NUM_THREADS to compare
// thread counts; the reference path ignores it.

#include <benchmark/benchmark.h>

#include "dicnn/nn/engine.hpp"
#include "dicnn/nn/model.hpp"
#include "dicnn/numkit/kernels.hpp"
#include "dicnn/numkit/rng.hpp"
#include "dicnn/reference/reference.hpp"

using namespace dicnn;
using numkit::Tensor;

namespace {

Tensor random_tensor(numkit::Shape shape, std::uint64_t seed) {
    numkit::Rng rng(seed);
    std::vector<double> v(numkit::element_count(shape));
    for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
    return Tensor(std::move(shape), std::move(v));
}

void BM_matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_tensor({n, n}, 1), b = random_tensor({n, n}, 2);
    for (auto _ : state) benchmark::DoNotOptimize(numkit::matmul(a, b));
}

void BM_matmul_reference(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_tensor({n, n}, 1), b = random_tensor({n, n}, 2);
    for (auto _ : state) benchmark::DoNotOptimize(reference::matmul(a, b));
}

// Default architecture on a batch of 128 rows, width = state.range(0).
struct Batch {
    nn::DicnnModel model;
    Tensor x, y;
};

Batch make_batch(std::size_t width) {
    Batch b{nn::DicnnModel(nn::default_architecture(2), width, 3), random_tensor({128, width}, 4), Tensor::zeros({128, 2})};
    for (std::size_t i = 0; i < 128; ++i) b.y.mutable_values()[i * 2 + i % 2] = 1.0;
    return b;
}

void BM_forward(benchmark::State& state) {
    const auto b = make_batch(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(nn::forward(b.model, b.x));
}

void BM_forward_reference(benchmark::State& state) {
    const auto b = make_batch(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::forward(b.model, b.x));
}

void BM_loss_and_grads(benchmark::State& state) {
    const auto b = make_batch(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(nn::loss_and_grads(b.model, b.x, b.y));
}

void BM_loss_and_grads_reference(benchmark::State& state) {
    const auto b = make_batch(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(reference::loss_and_grads(b.model, b.x, b.y));
}

}  // namespace

BENCHMARK(BM_matmul)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_matmul_reference)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_forward)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_forward_reference)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_loss_and_grads)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_loss_and_grads_reference)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

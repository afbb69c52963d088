// Serial reference kernels against their OpenMP counterparts.
//   ./coseg_bench --benchmark_filter=Warp
// Thread count follows OMP_NUM_THREADS.

#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "coseg/fusion.hpp"
#include "coseg/grabcut.hpp"
#include "coseg/otsu.hpp"
#include "coseg/warp.hpp"

namespace {

coseg::RasterPlane random_plane(int side, int channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  coseg::RasterPlane p(side, side, channels);
  for (double& v : p.data) {
    v = unit(rng);
  }
  return p;
}

coseg::FlowField wavy_flow(int side) {
  coseg::FlowField f = coseg::FlowField::identity(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      f.du[y * side + x] = static_cast<float>(2.5 * std::sin(0.05 * y));
      f.dv[y * side + x] = static_cast<float>(1.5 * std::cos(0.04 * x));
    }
  }
  return f;
}

coseg::CandidateStack random_stack(int side, int count) {
  coseg::CandidateStack s{"key", {}};
  std::mt19937_64 rng(7);
  std::bernoulli_distribution keep(0.85);
  for (int c = 0; c < count; ++c) {
    coseg::WarpedMap w = coseg::WarpedMap::all_valid(random_plane(side, 1, 100 + c));
    for (auto& v : w.valid) {
      v = keep(rng) ? 1 : 0;
    }
    s.candidates.push_back(std::move(w));
  }
  return s;
}

template <bool Parallel>
void BM_Warp(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto src = random_plane(side, 1, 1);
  const auto flow = wavy_flow(side);
  for (auto _ : state) {
    auto out = Parallel ? coseg::warp_map(src, flow) : coseg::reference::warp_map(src, flow);
    benchmark::DoNotOptimize(out.values.data.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

template <bool Parallel>
void BM_MedianFuse(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto stack = random_stack(side, 16);
  const auto fallback = random_plane(side, 1, 99);
  for (auto _ : state) {
    auto out = Parallel ? coseg::median_fuse(stack, fallback) : coseg::reference::median_fuse(stack, fallback);
    benchmark::DoNotOptimize(out.values.data.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

template <bool Parallel>
void BM_Histogram(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto map = random_plane(side, 1, 3);
  for (auto _ : state) {
    auto h = Parallel ? coseg::histogram(map) : coseg::reference::histogram(map);
    benchmark::DoNotOptimize(h.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

template <bool Parallel>
void BM_DataTerms(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto image = random_plane(side, 3, 4);
  std::vector<coseg::Color> colors(image.pixel_count());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    colors[i] = {image.data[3 * i], image.data[3 * i + 1], image.data[3 * i + 2]};
  }
  const auto gmm = coseg::fit_gmm(colors, 5, 1);
  for (auto _ : state) {
    auto d = Parallel ? coseg::data_terms(gmm, colors) : coseg::reference::data_terms(gmm, colors);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

template <bool Parallel>
void BM_ContrastBeta(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto image = random_plane(side, 3, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? coseg::contrast_beta(image) : coseg::reference::contrast_beta(image));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}

} // namespace

BENCHMARK(BM_Warp<false>)->Name("Warp/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_Warp<true>)->Name("Warp/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_MedianFuse<false>)->Name("MedianFuse/serial")->Arg(256)->Arg(512);
BENCHMARK(BM_MedianFuse<true>)->Name("MedianFuse/omp")->Arg(256)->Arg(512);
BENCHMARK(BM_Histogram<false>)->Name("Histogram/serial")->Arg(512)->Arg(2048);
BENCHMARK(BM_Histogram<true>)->Name("Histogram/omp")->Arg(512)->Arg(2048);
BENCHMARK(BM_DataTerms<false>)->Name("GmmDataTerms/serial")->Arg(256)->Arg(512);
BENCHMARK(BM_DataTerms<true>)->Name("GmmDataTerms/omp")->Arg(256)->Arg(512);
BENCHMARK(BM_ContrastBeta<false>)->Name("ContrastBeta/serial")->Arg(512)->Arg(1024);
BENCHMARK(BM_ContrastBeta<true>)->Name("ContrastBeta/omp")->Arg(512)->Arg(1024);

BENCHMARK_MAIN();

// Serial reference kernels against their OpenMP counterparts.
//
//   ./kernels_bench --benchmark_filter=Reconstruct

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "dmdsep/kernels.h"

namespace {

using dmdsep::Complex;
using dmdsep::ComplexMatrix;
using dmdsep::ComplexVector;
using dmdsep::Image;
using dmdsep::RealMatrix;

RealMatrix Uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(lo, hi);
  RealMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = dist(rng);
  return a;
}

struct ModeSet {
  ComplexMatrix modes;
  ComplexVector amplitudes;
  ComplexVector omegas;
  std::vector<double> times;
};

ModeSet MakeModes(Eigen::Index n, Eigen::Index rank, Eigen::Index m) {
  ModeSet s;
  s.modes = ComplexMatrix(n, rank);
  s.modes.real() = Uniform(n, rank, -1, 1);
  s.modes.imag() = Uniform(n, rank, -1, 1);
  s.amplitudes = ComplexVector::Ones(rank);
  s.omegas = ComplexVector(rank);
  for (Eigen::Index j = 0; j < rank; ++j) s.omegas(j) = Complex(-0.01 * j, 0.1 * j);
  for (Eigen::Index k = 0; k < m; ++k) s.times.push_back(static_cast<double>(k));
  return s;
}

template <auto Fn>
void BM_Reconstruct(benchmark::State& state) {
  const ModeSet s = MakeModes(state.range(0), state.range(1) - 1, state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(s.modes, s.amplitudes, s.omegas, s.times));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

template <auto Fn>
void BM_Redistribute(benchmark::State& state) {
  const RealMatrix x = Uniform(state.range(0), state.range(1), 0, 1);
  const RealMatrix modulus = Uniform(state.range(0), state.range(1), 0, 1);
  RealMatrix low, sparse;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(x, modulus, &low, &sparse));
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}

template <auto Fn>
void BM_Shrink(benchmark::State& state) {
  const RealMatrix base = Uniform(state.range(0), state.range(1), -1, 1);
  RealMatrix a = base;
  for (auto _ : state) {
    state.PauseTiming();
    a = base;
    state.ResumeTiming();
    Fn(&a, 0.1);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * base.size());
}

template <auto Fn>
void BM_Downsample(benchmark::State& state) {
  const Image frame(Uniform(480, 640, 0, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(frame, state.range(0), state.range(1)));
  }
}

namespace serial = dmdsep::kernels::serial;
namespace parallel = dmdsep::kernels::parallel;

void SegmentArgs(benchmark::internal::Benchmark* b) {
  for (int n : {2880, 11520, 76800}) {
    for (int m : {30, 100}) b->Args({n, m});
  }
}

void FrameArgs(benchmark::internal::Benchmark* b) {
  b->Args({120, 96})->Args({320, 240});
}

BENCHMARK(BM_Reconstruct<serial::ReconstructModes>)->Apply(SegmentArgs);
BENCHMARK(BM_Reconstruct<parallel::ReconstructModes>)->Apply(SegmentArgs);
BENCHMARK(BM_Redistribute<serial::RedistributeResidual>)->Apply(SegmentArgs);
BENCHMARK(BM_Redistribute<parallel::RedistributeResidual>)->Apply(SegmentArgs);
BENCHMARK(BM_Shrink<serial::ShrinkInPlace>)->Apply(SegmentArgs);
BENCHMARK(BM_Shrink<parallel::ShrinkInPlace>)->Apply(SegmentArgs);
BENCHMARK(BM_Downsample<serial::BoxDownsample>)->Apply(FrameArgs);
BENCHMARK(BM_Downsample<parallel::BoxDownsample>)->Apply(FrameArgs);

}  // namespace

BENCHMARK_MAIN();

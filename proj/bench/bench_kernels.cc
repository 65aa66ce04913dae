// Copyright 2026 The BeamFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP kernels. Arg(0) is serial, Arg(1) parallel.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "beamfusion/beamformer.h"
#include "beamfusion/kernels.h"
#include "beamfusion/roomsim.h"
#include "beamfusion/stft.h"

namespace beamfusion {
namespace {

Exec ExecOf(const benchmark::State& state) {
  return state.range(0) ? Exec::kParallel : Exec::kSerial;
}

std::vector<double> Noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

CMatrix NoiseSpec(int frames, int bins, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix m(frames, bins);
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < bins; ++k) m(t, k) = Complex(g(rng), g(rng));
  }
  return m;
}

void BM_Beamform(benchmark::State& state) {
  const double nulls[] = {kPi / 2, kPi};
  const FixedFilter f = DesignDmaBank(ArrayGeometry{}, FrequencyGrid{}, 0.0, nulls).filters[0];
  std::vector<CMatrix> ch;
  for (int m = 0; m < 8; ++m) ch.push_back(NoiseSpec(1250, 257, m));
  std::vector<const CMatrix*> ptrs;
  for (const auto& c : ch) ptrs.push_back(&c);
  CMatrix out;
  for (auto _ : state) {
    kernels::Beamform(f.coeffs, ptrs, out, ExecOf(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Beamform)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FuseWeighted(benchmark::State& state) {
  std::vector<CMatrix> beams;
  for (int p = 0; p < 4; ++p) beams.push_back(NoiseSpec(1250, 257, 10 + p));
  std::vector<const CMatrix*> ptrs;
  for (const auto& b : beams) ptrs.push_back(&b);
  const auto w = Noise(1250 * 257 * 4, 20);
  CMatrix out;
  for (auto _ : state) {
    kernels::FuseWeighted(ptrs, w, out, ExecOf(state));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_FuseWeighted)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CrossCorrelate(benchmark::State& state) {
  const auto x = Noise(160000, 1), y = Noise(160000, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::CrossCorrelate(x, y, 512, ExecOf(state)));
  }
}
BENCHMARK(BM_CrossCorrelate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ConvolveDirect(benchmark::State& state) {
  const auto x = Noise(32000, 3), h = Noise(1024, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::ConvolveDirect(x, h, x.size(), ExecOf(state)));
  }
}
BENCHMARK(BM_ConvolveDirect)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ConvolveFft(benchmark::State& state) {
  const auto x = Noise(32000, 3), h = Noise(1024, 4);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ConvolveFft(x, h, x.size()));
}
BENCHMARK(BM_ConvolveFft)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& state) {
  const auto x = Noise(160000, 5);
  const StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(Analyze(x, cfg, ExecOf(state)));
}
BENCHMARK(BM_Analyze)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_IsmRirs(benchmark::State& state) {
  RoomConfig room;
  room.t60 = 0.5;
  const auto mics = MicPositions(ArrayGeometry{}, {4.0, 2.0, 1.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(IsmRirs(room, {6.0, 2.0, 1.0}, mics, ExecOf(state)));
  }
}
BENCHMARK(BM_IsmRirs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace beamfusion

BENCHMARK_MAIN();

/*
 * Copyright 2026 The clustersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "clustersim/data.hpp"
#include "clustersim/kernels.hpp"

using namespace clustersim;
using namespace clustersim::kernels;

namespace {

DenseTensor random_grid(std::vector<std::size_t> dims, std::uint64_t seed) {
  return data::gen_grid(dims, {data::GridMode::Random, 0.0, seed});
}

Variant variant(const benchmark::State& state, int arg) { return state.range(arg) ? Variant::Su : Variant::Baseline; }

void BM_stencil(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const DenseTensor g = random_grid({n, n, n}, 1);
  const StencilSpec s = StencilSpec::by_name("j3d27pt");
  for (auto _ : state) benchmark::DoNotOptimize(stencil(s, g, variant(state, 1)).report.cycles);
}
BENCHMARK(BM_stencil)->ArgsProduct({{10, 18}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_spmm(benchmark::State& state) {
  const CsrMatrix a = data::gen_random_sparse(static_cast<std::uint32_t>(state.range(0)), 256, 0.01, 2);
  const DenseTensor b = random_grid({256, 16}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(spmm(a, b, variant(state, 1)).report.cycles);
}
BENCHMARK(BM_spmm)->ArgsProduct({{512, 2048}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_spmspm(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  const CsrMatrix a = data::gen_random_sparse(n, n, 0.02, 4);
  const CsrMatrix b = data::gen_random_sparse(n, n, 0.01, 5);
  for (auto _ : state) benchmark::DoNotOptimize(spmspm(a, b, variant(state, 1)).report.cycles);
}
BENCHMARK(BM_spmspm)->ArgsProduct({{128, 400}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_peak_fma(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(peak_fma(Format::FP64, static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(BM_peak_fma)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

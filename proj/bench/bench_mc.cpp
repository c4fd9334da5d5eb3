/*
   Copyright 2026 The jumpdiff Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Serial reference vs OpenMP path simulation on the same simulator.

#include "jumpdiff/mc.hpp"
#include "jumpdiff/problem.hpp"

#include <benchmark/benchmark.h>

using namespace jumpdiff;

namespace {

PathSimulator make_sim(const ProblemSpec& p, ExitDetection mode) {
    SimConfig c;
    c.delta = 0.05;
    c.dt = 1e-3;
    c.paths = 4000;
    c.exit_mode = mode;
    return PathSimulator(p.coeffs, p.domain, c);
}

void BM_interval_serial(benchmark::State& state) {
    const ProblemSpec p = preset("interval-k0-asym");
    const PathSimulator sim = make_sim(p, ExitDetection::BridgeCorrected1D);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_paths_serial(sim, PathStart::FromPoint, p.x0));
}

void BM_interval_openmp(benchmark::State& state) {
    const ProblemSpec p = preset("interval-k0-asym");
    const PathSimulator sim = make_sim(p, ExitDetection::BridgeCorrected1D);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(sim, PathStart::FromPoint, p.x0, threads));
}

void BM_disk_serial(benchmark::State& state) {
    const ProblemSpec p = preset("disk-k0-radial");
    const PathSimulator sim = make_sim(p, ExitDetection::FirstCrossing);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_paths_serial(sim, PathStart::FromPoint, p.x0));
}

void BM_disk_openmp(benchmark::State& state) {
    const ProblemSpec p = preset("disk-k0-radial");
    const PathSimulator sim = make_sim(p, ExitDetection::FirstCrossing);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_paths(sim, PathStart::FromPoint, p.x0, threads));
}

} // namespace

BENCHMARK(BM_interval_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_interval_openmp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_disk_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_disk_openmp)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

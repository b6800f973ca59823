// Copyright 2026 The fourphoton Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference versus OpenMP kernel for the three hot loops.

#include <benchmark/benchmark.h>

#include "fourphoton/bell.h"
#include "fourphoton/experiment.h"
#include "fourphoton/qkd.h"

using namespace fourphoton;

namespace {

Exec exec_of(const benchmark::State &state) {
    return state.range(0) ? Exec::kParallel : Exec::kSerial;
}

void BM_sample_counts(benchmark::State &state) {
    auto dist = mixture_distribution(canonical_psi4(), paper_optimal_settings().quad(0).settings(), {0.793});
    DetectorBank bank;
    bank.efficiency[0] = {1.0, 0.5};
    uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_counts(dist, bank, 1 << 20, seed++, 0, exec_of(state)));
    }
    state.SetItemsProcessed(state.iterations() * (1 << 20));
}
BENCHMARK(BM_sample_counts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_settings_search(benchmark::State &state) {
    SearchOptions o;
    o.exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(settings_search(o));
    }
}
BENCHMARK(BM_settings_search)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_settings_search_reference(benchmark::State &state) {
    SearchOptions o;
    o.resolution = kPi / 6;
    o.exec = exec_of(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(o.exec == Exec::kSerial ? settings_search_reference(o) : settings_search(o));
    }
}
BENCHMARK(BM_settings_search_reference)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_run_protocol(benchmark::State &state) {
    ProtocolOptions o;
    o.eve = EveModel::intercept_resend(Arm::A, MeasurementSetting::equatorial(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_protocol(100000, o, exec_of(state)));
        o.seed++;
    }
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_run_protocol)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

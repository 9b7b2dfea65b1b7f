// Copyright 2026 The spinsq Authors
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

#include <benchmark/benchmark.h>

#include "spinsq/detector.h"
#include "spinsq/distinguishability.h"
#include "spinsq/estimation.h"
#include "spinsq/metrology.h"
#include "spinsq/states.h"

using namespace spinsq;

namespace {

void BM_IdealFringe(benchmark::State &state) {
    const auto y = yurke_state(static_cast<int>(state.range(0)));
    double phi = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(outcome_distribution(y, phi));
        phi += 1e-3;
    }
}
BENCHMARK(BM_IdealFringe)->Arg(5)->Arg(21);

void BM_MismatchStaged(benchmark::State &state) {
    double phi = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(probability_with_mismatch(5, 0.9, phi));
        phi += 1e-3;
    }
}
BENCHMARK(BM_MismatchStaged);

void BM_MismatchModel(benchmark::State &state) {
    MismatchModel model(5);
    double phi = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.distribution(0.9, 0.05, phi));
        phi += 1e-3;
    }
}
BENCHMARK(BM_MismatchModel);

void BM_FisherCurve(benchmark::State &state) {
    MismatchModel model(5);
    const DistributionFn f = [&](double phi) { return model.distribution(0.9, 0.05, phi); };
    const auto grid = PhaseGrid::default_grid();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fisher_curve(f, grid));
    }
}
BENCHMARK(BM_FisherCurve);

void BM_CoincidenceEfficiencies(benchmark::State &state) {
    const auto table = EfficiencyTable::measured();
    for (auto _ : state) {
        benchmark::DoNotOptimize(coincidence_efficiencies(table));
    }
}
BENCHMARK(BM_CoincidenceEfficiencies);

std::vector<CoincidenceRecord> noiseless_records(const EfficiencyTable &table) {
    MismatchModel model(5);
    std::vector<CoincidenceRecord> records;
    for (double label : PhaseGrid::default_grid().phases()) {
        const auto p = model.distribution(0.9, 0.05, label - 0.3);
        records.push_back({label, expected_counts(p, 500.0, table), {}});
    }
    return records;
}

void BM_GlobalFit(benchmark::State &state) {
    const auto table = EfficiencyTable::uniform(0.2);
    const auto records = noiseless_records(table);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_fringe(records, table));
    }
}
BENCHMARK(BM_GlobalFit)->Unit(benchmark::kMillisecond);

void BM_PhaseMle(benchmark::State &state) {
    const auto y = yurke_state(5);
    const DistributionFn f = [&](double phi) { return outcome_distribution(y, phi); };
    std::mt19937_64 engine(3);
    const auto counts = sample_multinomial(f(0.1), 10000, engine);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mle_phase(counts, f, -1.0, 1.0));
    }
}
BENCHMARK(BM_PhaseMle)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();

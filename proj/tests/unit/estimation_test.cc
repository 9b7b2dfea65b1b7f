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

#include "spinsq/estimation.h"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "spinsq/interferometer.h"
#include "spinsq/states.h"

using namespace spinsq;

namespace {

constexpr double kPi = std::numbers::pi;

struct Truth {
    double phi0 = 0.3;
    double indist = 0.9;
    double scale = 500.0;
    double noise = 0.05;
};

std::vector<CoincidenceRecord> synthetic(const Truth &t, const EfficiencyTable &table,
                                         const PhaseGrid &grid = PhaseGrid::default_grid(),
                                         std::optional<std::uint64_t> seed = {}) {
    MismatchModel model(5);
    std::vector<CoincidenceRecord> out;
    PoissonSampler sampler(seed.value_or(0));
    for (double label : grid.phases()) {
        const auto p = model.distribution(t.indist, t.noise, label - t.phi0);
        const auto rates = expected_counts(p, t.scale, table);
        out.push_back(seed ? sampler.sample(label, rates) : CoincidenceRecord{label, rates, {}});
    }
    return out;
}

void expect_recovered(const FitResult &fit, const Truth &t, double tol) {
    EXPECT_TRUE(fit.converged);
    EXPECT_NEAR(wrap_phase(fit.parameters.phase_offset - t.phi0), 0.0, tol);
    EXPECT_NEAR(fit.parameters.indistinguishability, t.indist, tol);
    EXPECT_NEAR(fit.parameters.scale / t.scale, 1.0, tol);
    EXPECT_NEAR(fit.parameters.noise, t.noise, tol);
}

}  // namespace

TEST(estimation, wrap_phase) {
    EXPECT_DOUBLE_EQ(wrap_phase(0.5), 0.5);
    EXPECT_NEAR(wrap_phase(kPi + 0.25), -kPi + 0.25, 1e-15);
    EXPECT_NEAR(wrap_phase(-kPi - 0.25), kPi - 0.25, 1e-15);
    EXPECT_NEAR(wrap_phase(kPi), -kPi, 1e-15);
    EXPECT_NEAR(wrap_phase(7.0 * kPi + 0.1), -kPi + 0.1, 1e-12);
}

TEST(estimation, seeds_and_quantiles) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
    const std::vector<double> v = {5.0, 1.0, 3.0, 2.0, 4.0};
    EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(quantile(v, 1.0), 5.0);
    EXPECT_DOUBLE_EQ(quantile(v, 0.125), 1.5);
    EXPECT_TRUE(std::isnan(quantile({}, 0.5)));
    EXPECT_THROW(quantile(v, 1.5), std::invalid_argument);
}

TEST(estimation, noiseless_recovery_global) {
    const Truth t;
    for (const auto &table : {EfficiencyTable::measured(), EfficiencyTable::uniform(0.2)}) {
        const auto fit = fit_fringe(synthetic(t, table), table);
        expect_recovered(fit, t, 1e-6);
        EXPECT_LT(fit.residual_sum_of_squares, 1e-12 * t.scale * t.scale);
        ASSERT_EQ(fit.phases.size(), 30u);
        EXPECT_NEAR(wrap_phase(fit.phases[3] - (PhaseGrid::default_grid()[3] - t.phi0)), 0.0, 1e-6);
    }
}

TEST(estimation, noiseless_recovery_per_point) {
    const Truth t;
    const auto table = EfficiencyTable::uniform(0.2);
    FitOptions options;
    options.mode = FitMode::PerPoint;
    const auto records = synthetic(t, table);
    const auto fit = fit_fringe(records, table, options);
    expect_recovered(fit, t, 1e-6);
    for (std::size_t i = 0; i < records.size(); ++i) {
        EXPECT_NEAR(wrap_phase(fit.phases[i] - (records[i].phase - t.phi0)), 0.0, 1e-5) << i;
    }
    EXPECT_TRUE(std::isnan(fit.standard_errors[0]));
}

TEST(estimation, objective_not_above_any_start) {
    const auto table = EfficiencyTable::uniform(0.2);
    const auto records = synthetic(Truth{}, table, PhaseGrid::default_grid(), 3);
    for (auto mode : {FitMode::Global, FitMode::PerPoint}) {
        FitOptions options;
        options.mode = mode;
        const auto fit = fit_fringe(records, table, options);
        ASSERT_FALSE(fit.start_objectives.empty());
        for (double start : fit.start_objectives) {
            EXPECT_LE(fit.residual_sum_of_squares, start * (1.0 + 1e-12));
        }
    }
    FitOptions global;
    EXPECT_EQ(fit_fringe(records, table, global).start_objectives.size(), 8u);
}

TEST(estimation, label_shift_equivariance) {
    const auto table = EfficiencyTable::uniform(0.2);
    auto records = synthetic(Truth{}, table, PhaseGrid::default_grid(), 11);
    const auto base = fit_fringe(records, table);
    const double delta = 0.4;
    for (auto &r : records) {
        r.phase += delta;
    }
    const auto shifted = fit_fringe(records, table);
    EXPECT_NEAR(wrap_phase(shifted.parameters.phase_offset - base.parameters.phase_offset - delta), 0.0, 1e-6);
    EXPECT_NEAR(shifted.parameters.indistinguishability, base.parameters.indistinguishability, 1e-6);
    EXPECT_NEAR(shifted.parameters.scale / base.parameters.scale, 1.0, 1e-6);
    EXPECT_NEAR(shifted.parameters.noise, base.parameters.noise, 1e-6);
}

TEST(estimation, count_scaling_equivariance) {
    const auto table = EfficiencyTable::uniform(0.2);
    auto records = synthetic(Truth{}, table, PhaseGrid::default_grid(), 12);
    const auto base = fit_fringe(records, table);
    const double c = 3.5;
    for (auto &r : records) {
        for (auto &d : r.counts) {
            d *= c;
        }
    }
    const auto scaled = fit_fringe(records, table);
    EXPECT_NEAR(scaled.parameters.scale / (c * base.parameters.scale), 1.0, 1e-6);
    EXPECT_NEAR(wrap_phase(scaled.parameters.phase_offset - base.parameters.phase_offset), 0.0, 1e-6);
    EXPECT_NEAR(scaled.parameters.indistinguishability, base.parameters.indistinguishability, 1e-6);
    EXPECT_NEAR(scaled.parameters.noise, base.parameters.noise, 1e-6);
}

TEST(estimation, boundary_values) {
    Truth t;
    t.indist = 1.0;
    t.noise = 0.0;
    const auto table = EfficiencyTable::uniform(0.2);
    const auto fit = fit_fringe(synthetic(t, table), table);
    EXPECT_NEAR(fit.parameters.indistinguishability, 1.0, 1e-3);
    EXPECT_NEAR(fit.parameters.noise, 0.0, 1e-3);
    EXPECT_GE(fit.parameters.indistinguishability, 0.0);
    EXPECT_LE(fit.parameters.indistinguishability, 1.0);
    EXPECT_GE(fit.parameters.noise, 0.0);
}

TEST(estimation, pinned_noise) {
    const Truth t;
    const auto table = EfficiencyTable::uniform(0.2);
    FitOptions options;
    options.pinned_noise = 0.05;
    const auto fit = fit_fringe(synthetic(t, table), table, options);
    expect_recovered(fit, t, 1e-6);
    EXPECT_EQ(fit.parameters.noise, 0.05);
    EXPECT_TRUE(std::isnan(fit.standard_errors[3]));
    options.pinned_noise = 1.5;
    EXPECT_THROW(fit_fringe(synthetic(t, table), table, options), std::invalid_argument);
}

TEST(estimation, poisson_recovery_within_errors) {
    // Twenty seeds here; the acceptance suite runs a hundred.
    Truth t;
    t.scale = 1e4;
    const auto table = EfficiencyTable::uniform(0.2);
    int inside = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto fit = fit_fringe(synthetic(t, table, PhaseGrid::default_grid(), seed), table);
        ASSERT_TRUE(fit.converged);
        const std::array<double, 4> truth = {t.phi0, t.indist, t.scale, t.noise};
        const std::array<double, 4> got = {fit.parameters.phase_offset, fit.parameters.indistinguishability,
                                           fit.parameters.scale, fit.parameters.noise};
        for (int k = 0; k < 4; ++k) {
            ASSERT_TRUE(std::isfinite(fit.standard_errors[k]));
            ++total;
            inside += std::abs(got[k] - truth[k]) <= 3.0 * fit.standard_errors[k];
        }
    }
    EXPECT_GE(inside, static_cast<int>(0.95 * total));
}

TEST(estimation, fit_errors) {
    const auto table = EfficiencyTable::uniform(0.2);
    EXPECT_THROW(fit_fringe({}, table), std::invalid_argument);
    std::vector<CoincidenceRecord> zeros(4, CoincidenceRecord{0.0, std::vector<double>(6, 0.0), {}});
    for (int i = 0; i < 4; ++i) {
        zeros[i].phase = i;
    }
    EXPECT_THROW(fit_fringe(zeros, table), std::domain_error);
    std::vector<CoincidenceRecord> ragged = {{0.0, {1, 2, 3, 4, 5, 6}, {}}, {0.1, {1, 2, 3, 4}, {}}};
    EXPECT_THROW(fit_fringe(ragged, table), std::invalid_argument);
    std::vector<CoincidenceRecord> bad = {{0.0, {1, 2, NAN, 4, 5, 6}, {}}};
    EXPECT_THROW(fit_fringe(bad, table), std::invalid_argument);
}

TEST(estimation, objective_matches_definition) {
    const auto table = EfficiencyTable::uniform(0.2);
    const auto records = synthetic(Truth{}, table);
    MismatchModel model(5);
    std::vector<double> labels;
    std::vector<std::vector<double>> rescaled;
    for (const auto &r : records) {
        labels.push_back(r.phase);
        rescaled.push_back(rescale_counts(r, table));
    }
    EXPECT_NEAR(fringe_objective(model, labels, rescaled, {0.3, 0.9, 500.0, 0.05}), 0.0, 1e-16 * 500 * 500);
    EXPECT_GT(fringe_objective(model, labels, rescaled, {0.4, 0.9, 500.0, 0.05}), 1.0);
}

TEST(estimation, monte_carlo_band) {
    const auto table = EfficiencyTable::uniform(0.2);
    Truth t;
    t.scale = 1e4;
    const auto records = synthetic(t, table);
    MonteCarloOptions options;
    options.iterations = 12;
    options.seed = 77;
    options.threads = 1;
    const auto a = monte_carlo_fisher(records, table, options);
    const auto b = monte_carlo_fisher(records, table, options);
    options.threads = 3;
    const auto c = monte_carlo_fisher(records, table, options);
    EXPECT_EQ(a.iterations, 12);
    EXPECT_EQ(a.failed, 0);
    EXPECT_EQ(a.seed, 77u);
    ASSERT_EQ(a.q50.size(), a.grid.size());
    EXPECT_EQ(a.samples, b.samples);
    EXPECT_EQ(a.samples, c.samples);
    for (std::size_t j = 0; j < a.grid.size(); ++j) {
        EXPECT_EQ(a.samples[j].size(), 12u);
        EXPECT_LE(a.q025[j], a.q50[j]);
        EXPECT_LE(a.q50[j], a.q975[j]);
        EXPECT_GT(a.q50[j], 0.0);
        EXPECT_LT(a.q975[j], 17.0);
    }
    options.seed = 78;
    EXPECT_NE(monte_carlo_fisher(records, table, options).samples, a.samples);
    options.iterations = 0;
    EXPECT_THROW(monte_carlo_fisher(records, table, options), std::invalid_argument);
}

TEST(estimation, band_narrows_with_counts) {
    const auto table = EfficiencyTable::uniform(0.2);
    MonteCarloOptions options;
    options.iterations = 10;
    options.seed = 5;
    Truth low, high;
    low.scale = 1e3;
    high.scale = 1e5;
    const auto wide = monte_carlo_fisher(synthetic(low, table), table, options);
    const auto narrow = monte_carlo_fisher(synthetic(high, table), table, options);
    for (std::size_t j = 0; j < wide.grid.size(); ++j) {
        EXPECT_LT(narrow.q975[j] - narrow.q025[j], wide.q975[j] - wide.q025[j]) << j;
    }
}

TEST(estimation, multinomial) {
    std::mt19937_64 rng(3);
    const std::vector<double> p = {0.1, 0.0, 0.4, 0.5};
    const auto draw = sample_multinomial(p, 100000, rng);
    double sum = 0.0;
    for (double d : draw) {
        sum += d;
    }
    EXPECT_EQ(sum, 100000.0);
    EXPECT_EQ(draw[1], 0.0);
    for (int m : {0, 2, 3}) {
        const double sd = std::sqrt(1e5 * p[m] * (1 - p[m]));
        EXPECT_NEAR(draw[m], 1e5 * p[m], 5.0 * sd);
    }
    EXPECT_EQ(sample_multinomial(p, 0, rng), std::vector<double>(4, 0.0));
    EXPECT_THROW(sample_multinomial(p, -1, rng), std::invalid_argument);
}

TEST(estimation, mle_recovers_phase) {
    const auto y = yurke_state(5);
    const DistributionFn model = [&](double phi) { return outcome_distribution(y, phi); };
    std::vector<double> exact;
    for (double p : model(0.1)) {
        exact.push_back(1e6 * p);
    }
    // Exact expected counts: the likelihood peaks at the true phase.
    const auto est = mle_phase(exact, model, 0.0, 0.5);
    EXPECT_NEAR(est.phase, 0.1, 1e-7);
    EXPECT_FALSE(est.at_boundary);
    const double f = fisher_information(model, 0.1).value;
    EXPECT_NEAR(est.observed_information / (1e6 * f), 1.0, 1e-3);
    EXPECT_THROW(mle_phase(exact, model, 0.5, 0.0), std::invalid_argument);
    EXPECT_THROW(mle_phase(std::vector<double>{1.0, 2.0}, model, 0.0, 0.5), std::invalid_argument);
}

TEST(estimation, mle_boundary_flag) {
    // Only m = 5 observed; on [0, 1] its probability keeps falling away from
    // phi = 0, so the maximum sits on the lower edge.
    const auto y = yurke_state(5);
    const DistributionFn model = [&](double phi) { return outcome_distribution(y, phi); };
    const std::vector<double> counts = {0, 0, 0, 0, 0, 100};
    const auto est = mle_phase(counts, model, -1.0, -0.2);
    EXPECT_TRUE(est.at_boundary);
    EXPECT_NEAR(est.phase, -1.0, 1e-6);
}

TEST(estimation, mle_consistency_and_crb) {
    const auto y = yurke_state(5);
    const DistributionFn model = [&](double phi) { return outcome_distribution(y, phi); };
    const double truth = 0.1;
    const double f = fisher_information(model, truth).value;
    const auto p = model(truth);
    std::mt19937_64 rng(99);
    const int trials = 200;
    double previous_spread = std::numeric_limits<double>::infinity();
    for (long long shots : {100LL, 1000LL, 10000LL}) {
        double sum = 0.0, sum2 = 0.0;
        for (int t = 0; t < trials; ++t) {
            const auto counts = sample_multinomial(p, shots, rng);
            const double est = mle_phase(counts, model, -1.0, 1.0).phase;
            sum += est;
            sum2 += est * est;
        }
        const double mean = sum / trials;
        const double var = sum2 / trials - mean * mean;
        const double sd = std::sqrt(var);
        const double sigma_stat = std::sqrt(2.0 / (trials - 1));
        EXPECT_GE(var * shots * f, 1.0 - 3.0 * sigma_stat) << shots;
        EXPECT_LT(std::abs(mean - truth), 3.0 * sd / std::sqrt(trials) + 0.2 * sd) << shots;
        EXPECT_LT(sd, previous_spread);
        previous_spread = sd;
    }
}

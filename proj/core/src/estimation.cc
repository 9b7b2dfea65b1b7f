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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include <Eigen/Dense>

#include "nelder_mead.h"

namespace spinsq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Bounded parameters in [0, 1] are searched as sin^2(u).
double bounded(double u) {
    const double s = std::sin(u);
    return s * s;
}

double unbounded(double v) {
    return std::asin(std::sqrt(std::clamp(v, 0.0, 1.0)));
}

struct Prepared {
    int photons = 0;
    std::vector<double> labels;
    std::vector<std::vector<double>> rescaled;
    std::vector<double> sigma;
    double mean_total = 0.0;
};

Prepared prepare(std::span<const CoincidenceRecord> records, const EfficiencyTable &table) {
    if (records.empty()) {
        throw std::invalid_argument("fit needs at least one coincidence record");
    }
    Prepared out;
    out.photons = records.front().photons();
    double total = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        validate(records[i]);
        if (records[i].photons() != out.photons) {
            throw std::invalid_argument("record " + std::to_string(i) + " has a different number of outcomes");
        }
        out.labels.push_back(records[i].phase);
        out.rescaled.push_back(rescale_counts(records[i], table));
        for (double d : out.rescaled.back()) {
            if (!std::isfinite(d)) {
                throw std::invalid_argument("rescaled counts are not finite");
            }
            total += d;
        }
    }
    if (total == 0.0) {
        throw std::domain_error("all coincidence counts are zero; nothing to fit");
    }
    out.sigma = coincidence_efficiencies(table, out.photons);
    out.mean_total = total / static_cast<double>(records.size());
    return out;
}

// Residual sum of squares with M replaced by its least-squares optimum.
double profiled_objective(const MismatchModel &model, const Prepared &data, double offset, double indist,
                          double noise, double *scale_out) {
    const std::size_t count = data.labels.size();
    std::vector<std::vector<double>> probs(count);
    double spd = 0.0, spp = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        probs[i] = model.distribution(indist, noise, data.labels[i] - offset);
        for (std::size_t m = 0; m < probs[i].size(); ++m) {
            spd += probs[i][m] * data.rescaled[i][m];
            spp += probs[i][m] * probs[i][m];
        }
    }
    const double scale = spp > 0.0 ? std::max(0.0, spd / spp) : 0.0;
    double rss = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t m = 0; m < probs[i].size(); ++m) {
            const double r = scale * probs[i][m] - data.rescaled[i][m];
            rss += r * r;
        }
    }
    if (scale_out != nullptr) {
        *scale_out = scale;
    }
    return rss;
}

struct PointFit {
    double phase;
    double value;
};

double point_objective(const MismatchModel &model, const std::vector<double> &rescaled, double indist, double noise,
                       double scale, double phi) {
    const auto p = model.distribution(indist, noise, phi);
    double g = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) {
        const double r = scale * p[m] - rescaled[m];
        g += r * r;
    }
    return g;
}

template <class F>
double golden_minimize(const F &f, double a, double b, double tolerance, int &evals) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a), d = a + ratio * (b - a);
    double fc = f(c), fd = f(d);
    evals += 2;
    while (b - a > tolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    return 0.5 * (a + b);
}

PointFit best_point_phase(const MismatchModel &model, const std::vector<double> &rescaled, double indist,
                          double noise, double scale, int &evals) {
    constexpr int kScan = 48;
    const double width = 2.0 * kPi / kScan;
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kScan; ++k) {
        const double v = point_objective(model, rescaled, indist, noise, scale, -kPi + k * width);
        if (v < best_value) {
            best_value = v;
            best = k;
        }
    }
    evals += kScan;
    const double center = -kPi + best * width;
    auto g = [&](double phi) { return point_objective(model, rescaled, indist, noise, scale, phi); };
    const double phi = golden_minimize(g, center - width, center + width, 1e-11, evals);
    const double v = g(phi);
    ++evals;
    if (v <= best_value) {
        return {wrap_phase(phi), v};
    }
    return {wrap_phase(center), best_value};
}

// Sandwich covariance for the global fit: (J'J)^-1 J' W J (J'J)^-1 with W the
// Poisson variance of each rescaled count, M P_m / Sigma_m.
void global_errors(const MismatchModel &model, const Prepared &data, const FitOptions &options, FitResult &result) {
    result.standard_errors.fill(kNaN);
    result.covariance.fill(kNaN);
    const FringeParameters &p = result.parameters;
    std::vector<int> free = {0, 1, 2};
    if (!options.pinned_noise) {
        free.push_back(3);
    }
    auto residuals_at = [&](const std::array<double, 4> &theta) {
        std::vector<double> r;
        for (std::size_t i = 0; i < data.labels.size(); ++i) {
            const auto probs = model.distribution(theta[1], theta[3], data.labels[i] - theta[0]);
            for (std::size_t m = 0; m < probs.size(); ++m) {
                r.push_back(theta[2] * probs[m] - data.rescaled[i][m]);
            }
        }
        return r;
    };
    const std::array<double, 4> theta = {p.phase_offset, p.indistinguishability, p.scale, p.noise};
    const std::size_t rows = data.labels.size() * static_cast<std::size_t>(data.photons + 1);
    Eigen::MatrixXd jac(rows, free.size());
    for (std::size_t c = 0; c < free.size(); ++c) {
        const int k = free[c];
        double h = k == 2 ? std::max(1e-6 * std::abs(theta[2]), 1e-12) : 1e-6;
        std::array<double, 4> up = theta, down = theta;
        const bool bounded_param = k == 1 || k == 3;
        double hu = h, hd = h;
        if (bounded_param) {
            hu = std::min(h, 1.0 - theta[k]);
            hd = std::min(h, theta[k]);
        }
        up[k] += hu;
        down[k] -= hd;
        if (hu + hd == 0.0) {
            return;
        }
        const auto ru = residuals_at(up);
        const auto rd = residuals_at(down);
        for (std::size_t r = 0; r < rows; ++r) {
            jac(r, c) = (ru[r] - rd[r]) / (hu + hd);
        }
    }
    Eigen::VectorXd weight(rows);
    std::size_t r = 0;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        const auto probs = model.distribution(p.indistinguishability, p.noise, data.labels[i] - p.phase_offset);
        for (std::size_t m = 0; m < probs.size(); ++m, ++r) {
            weight(r) = p.scale * probs[m] / data.sigma[m];
        }
    }
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::MatrixXd b = jac.transpose() * weight.asDiagonal() * jac;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        return;
    }
    const Eigen::MatrixXd ainv = lu.inverse();
    const Eigen::MatrixXd cov = ainv * b * ainv;
    for (std::size_t x = 0; x < free.size(); ++x) {
        for (std::size_t y = 0; y < free.size(); ++y) {
            result.covariance[free[x] * 4 + free[y]] = cov(x, y);
        }
        result.standard_errors[free[x]] = std::sqrt(std::max(0.0, cov(x, x)));
    }
}

void fill_residuals(const MismatchModel &model, const Prepared &data, FitResult &result) {
    const FringeParameters &p = result.parameters;
    result.residuals.clear();
    result.residual_sum_of_squares = 0.0;
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        const auto probs = model.distribution(p.indistinguishability, p.noise, result.phases[i]);
        std::vector<double> r(probs.size());
        for (std::size_t m = 0; m < probs.size(); ++m) {
            r[m] = p.scale * probs[m] - data.rescaled[i][m];
            result.residual_sum_of_squares += r[m] * r[m];
        }
        result.residuals.push_back(std::move(r));
    }
}

FitResult fit_global(const MismatchModel &model, const Prepared &data, const FitOptions &options) {
    const bool fit_noise = !options.pinned_noise;
    const double pinned = options.pinned_noise.value_or(0.0);
    auto unpack = [&](const std::vector<double> &x) {
        return std::array<double, 3>{x[0], bounded(x[1]), fit_noise ? bounded(x[2]) : pinned};
    };
    auto objective = [&](const std::vector<double> &x) {
        const auto q = unpack(x);
        return profiled_objective(model, data, q[0], q[1], q[2], nullptr);
    };

    std::vector<std::vector<double>> starts;
    if (options.warm_start) {
        const auto &w = *options.warm_start;
        std::vector<double> x = {w.phase_offset, unbounded(w.indistinguishability)};
        if (fit_noise) {
            x.push_back(unbounded(w.noise));
        }
        starts.push_back(std::move(x));
    } else {
        const int count = std::max(1, options.phase_starts);
        for (int k = 0; k < count; ++k) {
            std::vector<double> x = {-kPi + 2.0 * kPi * k / count, unbounded(0.8)};
            if (fit_noise) {
                x.push_back(unbounded(0.1));
            }
            starts.push_back(std::move(x));
        }
    }
    std::vector<double> step = {options.warm_start ? 0.05 : 0.4, options.warm_start ? 0.05 : 0.3};
    if (fit_noise) {
        step.push_back(options.warm_start ? 0.05 : 0.15);
    }

    detail::SimplexOptions simplex;
    simplex.relative_tolerance = options.tolerance;
    simplex.max_evaluations = options.max_evaluations;

    FitResult result;
    result.mode = FitMode::Global;
    detail::SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto &x0 : starts) {
        result.start_objectives.push_back(objective(x0));
        auto run = detail::nelder_mead(objective, x0, step, simplex);
        result.evaluations += run.evaluations + 1;
        if (run.value < best.value) {
            best = std::move(run);
        }
    }
    const auto q = unpack(best.x);
    result.parameters.phase_offset = wrap_phase(q[0]);
    result.parameters.indistinguishability = q[1];
    result.parameters.noise = q[2];
    profiled_objective(model, data, q[0], q[1], q[2], &result.parameters.scale);
    result.converged = best.converged;
    for (double label : data.labels) {
        result.phases.push_back(wrap_phase(label - result.parameters.phase_offset));
    }
    fill_residuals(model, data, result);
    global_errors(model, data, options, result);
    return result;
}

FitResult fit_per_point(const MismatchModel &model, const Prepared &data, const FitOptions &options) {
    const bool fit_noise = !options.pinned_noise;
    const double pinned = options.pinned_noise.value_or(0.0);
    int inner_evals = 0;
    auto unpack = [&](const std::vector<double> &x) {
        return std::array<double, 3>{bounded(x[0]), fit_noise ? bounded(x[1]) : pinned,
                                     std::exp(x[fit_noise ? 2 : 1])};
    };
    auto objective = [&](const std::vector<double> &x) {
        const auto q = unpack(x);
        double total = 0.0;
        for (const auto &row : data.rescaled) {
            total += best_point_phase(model, row, q[0], q[1], q[2], inner_evals).value;
        }
        return total;
    };

    std::vector<std::vector<double>> starts;
    auto make_start = [&](double indist, double noise, double scale) {
        std::vector<double> x = {unbounded(indist)};
        if (fit_noise) {
            x.push_back(unbounded(noise));
        }
        x.push_back(std::log(std::max(scale, 1e-300)));
        return x;
    };
    if (options.warm_start) {
        const auto &w = *options.warm_start;
        starts.push_back(make_start(w.indistinguishability, w.noise, w.scale));
    } else {
        starts.push_back(make_start(0.8, 0.1, data.mean_total));
        starts.push_back(make_start(0.4, 0.1, data.mean_total));
    }
    std::vector<double> step = {0.3};
    if (fit_noise) {
        step.push_back(0.15);
    }
    step.push_back(0.2);

    detail::SimplexOptions simplex;
    simplex.relative_tolerance = options.tolerance;
    simplex.max_evaluations = options.max_evaluations;

    FitResult result;
    result.mode = FitMode::PerPoint;
    detail::SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto &x0 : starts) {
        result.start_objectives.push_back(objective(x0));
        auto run = detail::nelder_mead(objective, x0, step, simplex);
        result.evaluations += run.evaluations + 1;
        if (run.value < best.value) {
            best = std::move(run);
        }
    }
    const auto q = unpack(best.x);
    result.parameters.indistinguishability = q[0];
    result.parameters.noise = q[1];
    result.parameters.scale = q[2];
    result.converged = best.converged;
    for (const auto &row : data.rescaled) {
        result.phases.push_back(best_point_phase(model, row, q[0], q[1], q[2], inner_evals).phase);
    }
    // P(phi) = P(pi - phi), so each per-record phase is only known up to that
    // reflection. Pick the offset most records agree on, fold every phase
    // onto the branch nearest to it, then average.
    const std::size_t count = result.phases.size();
    auto candidate = [&](std::size_t i, int branch) {
        const double phi = branch == 0 ? result.phases[i] : kPi - result.phases[i];
        return wrap_phase(data.labels[i] - phi);
    };
    double anchor = 0.0, best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) {
        for (int b = 0; b < 2; ++b) {
            const double c = candidate(i, b);
            double score = 0.0;
            for (std::size_t j = 0; j < count; ++j) {
                score += std::min(std::abs(wrap_phase(c - candidate(j, 0))), std::abs(wrap_phase(c - candidate(j, 1))));
            }
            if (score < best_score) {
                best_score = score;
                anchor = c;
            }
        }
    }
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const bool flip = std::abs(wrap_phase(anchor - candidate(i, 1))) < std::abs(wrap_phase(anchor - candidate(i, 0)));
        if (flip) {
            result.phases[i] = wrap_phase(kPi - result.phases[i]);
        }
        sx += std::cos(data.labels[i] - result.phases[i]);
        sy += std::sin(data.labels[i] - result.phases[i]);
    }
    result.parameters.phase_offset = std::atan2(sy, sx);
    fill_residuals(model, data, result);
    result.standard_errors.fill(kNaN);
    result.covariance.fill(kNaN);
    return result;
}

}  // namespace

double wrap_phase(double phi) {
    double w = std::fmod(phi + kPi, 2.0 * kPi);
    if (w < 0.0) {
        w += 2.0 * kPi;
    }
    return w - kPi;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double quantile(std::vector<double> samples, double q) {
    if (samples.empty()) {
        return kNaN;
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("quantile level must lie in [0, 1]");
    }
    std::sort(samples.begin(), samples.end());
    const double pos = q * static_cast<double>(samples.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
}

double fringe_objective(const MismatchModel &model, std::span<const double> labels,
                        const std::vector<std::vector<double>> &rescaled, const FringeParameters &parameters) {
    if (labels.size() != rescaled.size()) {
        throw std::invalid_argument("fringe_objective: labels and counts differ in length");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto p = model.distribution(parameters.indistinguishability, parameters.noise,
                                          labels[i] - parameters.phase_offset);
        for (std::size_t m = 0; m < p.size(); ++m) {
            const double r = parameters.scale * p[m] - rescaled[i][m];
            total += r * r;
        }
    }
    return total;
}

FitResult fit_fringe(std::span<const CoincidenceRecord> records, const EfficiencyTable &table,
                     const FitOptions &options) {
    const Prepared data = prepare(records, table);
    if (options.pinned_noise) {
        NoiseParameter check(*options.pinned_noise);
        (void)check;
    }
    const MismatchModel model(data.photons);
    return options.mode == FitMode::Global ? fit_global(model, data, options) : fit_per_point(model, data, options);
}

MonteCarloBand monte_carlo_fisher(std::span<const CoincidenceRecord> records, const EfficiencyTable &table,
                                  const MonteCarloOptions &options, const std::optional<FitResult> &base) {
    if (options.iterations < 1) {
        throw std::invalid_argument("Monte-Carlo needs at least one iteration");
    }
    const FitResult start = base ? *base : fit_fringe(records, table, options.fit);
    const int photons = records.front().photons();
    const MismatchModel model(photons);

    FitOptions refit = options.fit;
    refit.warm_start = start.parameters;

    std::vector<std::optional<std::vector<double>>> curves(options.iterations);
    auto work = [&](int index) {
        PoissonSampler sampler(derive_seed(options.seed, static_cast<std::uint64_t>(index)));
        std::vector<CoincidenceRecord> noisy;
        noisy.reserve(records.size());
        for (const auto &rec : records) {
            noisy.push_back(CoincidenceRecord{rec.phase, sampler.draw(rec.counts), rec.integration_time});
        }
        try {
            const FitResult fit = fit_fringe(noisy, table, refit);
            if (!fit.converged) {
                return;
            }
            const auto &p = fit.parameters;
            const DistributionFn fitted = [&](double phi) {
                return model.distribution(p.indistinguishability, p.noise, phi);
            };
            curves[index] = fisher_curve(fitted, options.grid, options.fisher).values;
        } catch (const std::exception &) {
            curves[index].reset();
        }
    };

    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(options.iterations));
    if (threads <= 1) {
        for (int i = 0; i < options.iterations; ++i) {
            work(i);
        }
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int i = static_cast<int>(t); i < options.iterations; i += static_cast<int>(threads)) {
                    work(i);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    MonteCarloBand band;
    band.grid = options.grid;
    band.iterations = options.iterations;
    band.seed = options.seed;
    band.samples.assign(options.grid.size(), {});
    for (const auto &c : curves) {
        if (!c) {
            ++band.failed;
            continue;
        }
        for (std::size_t j = 0; j < c->size(); ++j) {
            band.samples[j].push_back((*c)[j]);
        }
    }
    for (const auto &s : band.samples) {
        band.q025.push_back(quantile(s, 0.025));
        band.q50.push_back(quantile(s, 0.5));
        band.q975.push_back(quantile(s, 0.975));
    }
    return band;
}

namespace {

double log_likelihood(std::span<const double> counts, const std::vector<double> &p) {
    double total = 0.0;
    for (std::size_t m = 0; m < counts.size(); ++m) {
        if (counts[m] == 0.0) {
            continue;
        }
        if (!(p[m] > 0.0)) {
            return -std::numeric_limits<double>::infinity();
        }
        total += counts[m] * std::log(p[m]);
    }
    return total;
}

}  // namespace

PhaseEstimate mle_phase(std::span<const double> counts, const DistributionFn &model, double lower, double upper) {
    if (!(upper > lower)) {
        throw std::invalid_argument("MLE search interval is empty");
    }
    for (double c : counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw std::invalid_argument("outcome counts must be finite and nonnegative");
        }
    }
    PhaseEstimate est;
    auto ll = [&](double phi) {
        ++est.evaluations;
        const auto p = model(phi);
        if (p.size() != counts.size()) {
            throw std::invalid_argument("model and counts differ in the number of outcomes");
        }
        return log_likelihood(counts, p);
    };

    constexpr int kScan = 129;
    const double width = (upper - lower) / (kScan - 1);
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kScan; ++k) {
        const double v = ll(lower + k * width);
        if (v > best_value) {
            best_value = v;
            best = k;
        }
    }
    const double a = lower + std::max(0, best - 1) * width;
    const double b = lower + std::min(kScan - 1, best + 1) * width;
    int evals = 0;
    double phi = golden_minimize([&](double x) { return -ll(x); }, a, b, 1e-12 * std::max(1.0, upper - lower), evals);
    double value = ll(phi);
    if (best_value > value) {
        phi = lower + best * width;
        value = best_value;
    }

    const double h = 1e-5;
    for (int iter = 0; iter < 3; ++iter) {
        const double lp = ll(phi + h), lm = ll(phi - h);
        const double d1 = (lp - lm) / (2.0 * h);
        const double d2 = (lp - 2.0 * value + lm) / (h * h);
        if (!(d2 < 0.0) || !std::isfinite(d1)) {
            break;
        }
        const double next = std::clamp(phi - d1 / d2, lower, upper);
        const double next_value = ll(next);
        if (!(next_value > value)) {
            break;
        }
        phi = next;
        value = next_value;
    }

    est.phase = phi;
    est.log_likelihood = value;
    const double hi = 1e-4;
    est.observed_information = -(ll(phi + hi) - 2.0 * value + ll(phi - hi)) / (hi * hi);
    const double edge = 1e-6 * (upper - lower);
    est.at_boundary = (phi - lower) <= edge || (upper - phi) <= edge;
    return est;
}

std::vector<double> sample_multinomial(std::span<const double> probabilities, long long shots,
                                       std::mt19937_64 &engine) {
    if (shots < 0) {
        throw std::invalid_argument("number of shots must be nonnegative");
    }
    std::vector<double> out(probabilities.size(), 0.0);
    long long remaining = shots;
    double mass = 1.0;
    for (std::size_t m = 0; m < probabilities.size() && remaining > 0; ++m) {
        if (m + 1 == probabilities.size()) {
            out[m] = static_cast<double>(remaining);
            break;
        }
        const double p = mass > 0.0 ? std::clamp(probabilities[m] / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<long long> dist(remaining, p);
        const long long k = dist(engine);
        out[m] = static_cast<double>(k);
        remaining -= k;
        mass -= probabilities[m];
    }
    return out;
}

}  // namespace spinsq

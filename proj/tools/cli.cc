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

#include "cli.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "spinsq/detector.h"
#include "spinsq/distinguishability.h"
#include "spinsq/estimation.h"
#include "spinsq/interferometer.h"
#include "spinsq/io.h"
#include "spinsq/metrology.h"
#include "spinsq/states.h"

namespace spinsq::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridFlags {
    double start = -kPi;
    double stop = kPi;
    double step = kDefaultPhaseStep;
    double scale = 1.0;
    double offset = 0.0;

    PhaseGrid build() const {
        if (!(step > 0.0)) {
            throw UsageError("--phi-step must be positive");
        }
        if (!(stop > start)) {
            throw UsageError("--phi-stop must exceed --phi-start");
        }
        return PhaseMap{scale, offset}.apply(PhaseGrid::uniform(start, stop, step));
    }
};

struct RunConfig {
    std::string state = "yurke";
    int photons = 5;
    double indistinguishability = 1.0;
    double noise = 0.0;
    GridFlags grid;
    std::string efficiency_path;
    std::string counts_path;
    double scale = 500.0;
    double phase_offset = 0.0;
    int iterations = 200;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
    std::string output = "-";
    std::string fisher_output;
    std::string band_output;
    std::string mode = "global";
    std::optional<double> pinned_noise;
    bool noiseless = false;
    unsigned threads = 1;
};

std::uint64_t resolve_seed(const RunConfig &cfg) {
    if (cfg.seed) {
        return *cfg.seed;
    }
    if (const char *env = std::getenv("SPINSQ_SEED"); env != nullptr && *env != '\0') {
        char *end = nullptr;
        const unsigned long long value = std::strtoull(env, &end, 10);
        if (end == nullptr || *end != '\0') {
            throw UsageError("SPINSQ_SEED must be a nonnegative integer");
        }
        return value;
    }
    return 0;
}

void check_parameters(const RunConfig &cfg) {
    if (cfg.photons < 1) {
        throw UsageError("--n must be positive");
    }
    if (cfg.state == "yurke" && cfg.photons % 2 == 0) {
        throw UsageError("Yurke states need an odd photon number, got " + std::to_string(cfg.photons));
    }
    if (cfg.state == "yurke" && cfg.photons < 3) {
        throw UsageError("Yurke states need N >= 3");
    }
    if (cfg.state == "holland-burnett" && cfg.photons % 2 != 0) {
        throw UsageError("Holland-Burnett states need an even photon number, got " + std::to_string(cfg.photons));
    }
    if (!(cfg.indistinguishability >= 0.0 && cfg.indistinguishability <= 1.0)) {
        throw UsageError("--i must lie in [0, 1]");
    }
    if (!(cfg.noise >= 0.0 && cfg.noise <= 1.0)) {
        throw UsageError("--s must lie in [0, 1]");
    }
    if (cfg.state != "yurke" && cfg.indistinguishability != 1.0) {
        throw UsageError("--i applies to Yurke states only");
    }
}

TwoModeState ideal_state(const RunConfig &cfg) {
    if (cfg.state == "yurke") {
        return yurke_state(cfg.photons);
    }
    if (cfg.state == "holland-burnett") {
        return holland_burnett_state(cfg.photons);
    }
    return uncorrelated_state(cfg.photons);
}

DistributionFn make_distribution(const RunConfig &cfg) {
    const double noise = cfg.noise;
    if (cfg.state == "yurke") {
        auto model = std::make_shared<const MismatchModel>(cfg.photons);
        const double indist = cfg.indistinguishability;
        return [model, indist, noise](double phi) { return model->distribution(indist, noise, phi); };
    }
    auto state = std::make_shared<const TwoModeState>(ideal_state(cfg));
    return [state, noise](double phi) {
        const auto p = outcome_distribution(*state, phi);
        return add_phase_insensitive_noise(p, NoiseParameter(noise));
    };
}

EfficiencyTable load_efficiency(const RunConfig &cfg) {
    if (cfg.efficiency_path.empty()) {
        return EfficiencyTable::measured();
    }
    return parse_efficiency_csv(read_text_file(cfg.efficiency_path));
}

// Fails early, before any computation, if an output cannot be placed.
void check_output_path(const std::string &path) {
    if (path.empty() || path == "-") {
        return;
    }
    const std::filesystem::path p(path);
    const auto parent = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
    std::error_code ec;
    if (!std::filesystem::is_directory(parent, ec)) {
        throw IoError("output directory '" + parent.string() + "' does not exist");
    }
    if (std::filesystem::is_directory(p, ec)) {
        throw IoError("output path '" + path + "' is a directory");
    }
}

struct Output {
    std::string path;
    std::string content;
};

void commit(const std::vector<Output> &outputs, std::ostream &out) {
    for (const auto &o : outputs) {
        if (o.path.empty()) {
            continue;
        }
        if (o.path == "-") {
            out << o.content;
        } else {
            write_text_file_atomic(o.path, o.content);
        }
    }
    out.flush();
}

std::vector<Output> cmd_fringe(const RunConfig &cfg) {
    check_parameters(cfg);
    check_output_path(cfg.output);
    const PhaseGrid grid = cfg.grid.build();
    const FringeTable table = tabulate(make_distribution(cfg), cfg.photons, grid);
    return {{cfg.output, cfg.format == "json" ? format_fringe_json(table) : format_fringe_csv(table)}};
}

std::vector<Output> cmd_report(const RunConfig &cfg, std::ostream &err) {
    check_parameters(cfg);
    check_output_path(cfg.output);
    check_output_path(cfg.fisher_output);
    const PhaseGrid grid = cfg.grid.build();
    const DistributionFn dist = make_distribution(cfg);
    const FisherCurve curve = fisher_curve(dist, grid);
    SensitivityReport report;
    try {
        if (cfg.indistinguishability == 1.0 && cfg.noise == 0.0) {
            report = sensitivity_report(ideal_state(cfg), curve);
        } else {
            report = sensitivity_report(fringe_squeezing(dist, cfg.photons), cfg.photons, curve);
        }
    } catch (const std::domain_error &e) {
        err << "note: squeezing figures undefined (" << e.what() << ")\n";
        const double nan = std::numeric_limits<double>::quiet_NaN();
        FringeSqueezing undefined{0.0, 0.0, 0.0, 0.0, nan, nan, nan};
        report = sensitivity_report(undefined, cfg.photons, curve);
    }
    std::vector<Output> outputs = {{cfg.output, format_report_json(report)}};
    if (!cfg.fisher_output.empty()) {
        outputs.push_back(
            {cfg.fisher_output, cfg.format == "json" ? format_fisher_json(curve) : format_fisher_csv(curve)});
    }
    return outputs;
}

std::vector<Output> cmd_fit(const RunConfig &cfg, std::ostream &err) {
    if (cfg.counts_path.empty()) {
        throw UsageError("fit needs --counts");
    }
    if (cfg.iterations < 0) {
        throw UsageError("--iterations must be nonnegative");
    }
    check_output_path(cfg.output);
    check_output_path(cfg.fisher_output);
    check_output_path(cfg.band_output);
    const EfficiencyTable table = load_efficiency(cfg);
    const auto records = parse_counts_csv(read_text_file(cfg.counts_path));
    const int photons = records.front().photons();
    if (photons % 2 == 0 || photons < 3) {
        throw UsageError("counts file must carry N+1 outcome columns for odd N >= 3");
    }
    if (photons != kCoincidenceOrder) {
        throw UsageError("the detector model covers " + std::to_string(kCoincidenceOrder) + "-photon coincidences");
    }

    FitOptions options;
    options.mode = cfg.mode == "per-point" ? FitMode::PerPoint : FitMode::Global;
    options.pinned_noise = cfg.pinned_noise;
    if (cfg.pinned_noise && !(*cfg.pinned_noise >= 0.0 && *cfg.pinned_noise <= 1.0)) {
        throw UsageError("--pin-s must lie in [0, 1]");
    }
    FitResult fit;
    try {
        fit = fit_fringe(records, table, options);
    } catch (const std::domain_error &e) {
        throw NonConvergence(e.what());
    }
    if (!fit.converged) {
        throw NonConvergence("fringe fit did not converge within " + std::to_string(options.max_evaluations) +
                             " evaluations");
    }

    const PhaseGrid grid = cfg.grid.build();
    const MismatchModel model(photons);
    const auto &p = fit.parameters;
    const DistributionFn fitted = [&](double phi) { return model.distribution(p.indistinguishability, p.noise, phi); };
    const FisherCurve curve = fisher_curve(fitted, grid);

    std::vector<Output> outputs = {{cfg.output, format_fit_json(fit)}};
    if (!cfg.fisher_output.empty()) {
        outputs.push_back(
            {cfg.fisher_output, cfg.format == "json" ? format_fisher_json(curve) : format_fisher_csv(curve)});
    }
    if (!cfg.band_output.empty()) {
        if (cfg.iterations == 0) {
            throw UsageError("--band-output needs --iterations > 0");
        }
        MonteCarloOptions mc;
        mc.iterations = cfg.iterations;
        mc.seed = resolve_seed(cfg);
        mc.grid = grid;
        mc.fit = options;
        mc.threads = cfg.threads;
        const MonteCarloBand band = monte_carlo_fisher(records, table, mc, fit);
        if (band.failed == band.iterations) {
            throw NonConvergence("every Monte-Carlo refit failed");
        }
        if (band.failed > 0) {
            err << "note: " << band.failed << " of " << band.iterations << " Monte-Carlo refits failed\n";
        }
        outputs.push_back({cfg.band_output, cfg.format == "json" ? format_band_json(band) : format_band_csv(band)});
    }
    return outputs;
}

std::vector<Output> cmd_simulate_counts(const RunConfig &cfg) {
    RunConfig checked = cfg;
    checked.state = "yurke";
    check_parameters(checked);
    if (cfg.photons != kCoincidenceOrder) {
        throw UsageError("the detector model covers " + std::to_string(kCoincidenceOrder) + "-photon coincidences");
    }
    if (!(cfg.scale >= 0.0) || !std::isfinite(cfg.scale)) {
        throw UsageError("--m must be finite and nonnegative");
    }
    check_output_path(cfg.output);
    const EfficiencyTable table = load_efficiency(cfg);
    const PhaseGrid labels = cfg.grid.build();
    const MismatchModel model(cfg.photons);
    PoissonSampler sampler(resolve_seed(cfg));
    std::vector<CoincidenceRecord> records;
    for (double label : labels.phases()) {
        const auto probs = model.distribution(cfg.indistinguishability, cfg.noise, label - cfg.phase_offset);
        const auto rates = expected_counts(probs, cfg.scale, table);
        records.push_back(cfg.noiseless ? CoincidenceRecord{label, rates, {}} : sampler.sample(label, rates));
    }
    return {{cfg.output, format_counts_csv(records)}};
}

void add_state_flags(CLI::App *cmd, RunConfig &cfg) {
    cmd->add_option("--state", cfg.state, "yurke | uncorrelated | holland-burnett")
        ->check(CLI::IsMember({"yurke", "uncorrelated", "holland-burnett"}))
        ->capture_default_str();
    cmd->add_option("--n", cfg.photons, "photon number N")->capture_default_str();
    cmd->add_option("--i", cfg.indistinguishability, "indistinguishability I in [0, 1]")->capture_default_str();
    cmd->add_option("--s", cfg.noise, "phase-insensitive noise s in [0, 1]")->capture_default_str();
}

void add_grid_flags(CLI::App *cmd, RunConfig &cfg) {
    cmd->add_option("--phi-start", cfg.grid.start, "first grid point (rad, before the phase map)")
        ->capture_default_str();
    cmd->add_option("--phi-stop", cfg.grid.stop, "grid end, excluded")->capture_default_str();
    cmd->add_option("--phi-step", cfg.grid.step, "grid step (default pi/15)")->capture_default_str();
    cmd->add_option("--phase-scale", cfg.grid.scale, "phi = scale * x + offset (2 for a half-wave plate angle)")
        ->capture_default_str();
    cmd->add_option("--phase-offset", cfg.grid.offset, "see --phase-scale")->capture_default_str();
}

void add_output_flags(CLI::App *cmd, RunConfig &cfg, bool with_format) {
    cmd->add_option("-o,--output", cfg.output, "output path, - for stdout")->capture_default_str();
    if (with_format) {
        cmd->add_option("--format", cfg.format, "csv | json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    }
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    CLI::App app{"Five-photon spin-squeezing simulation and analysis", "spinsq"};
    app.require_subcommand(1);

    auto *fringe = app.add_subcommand("fringe", "tabulate outcome distributions p_m(phi)");
    add_state_flags(fringe, cfg);
    add_grid_flags(fringe, cfg);
    add_output_flags(fringe, cfg, true);

    auto *report = app.add_subcommand("report", "squeezing parameters and Fisher information");
    add_state_flags(report, cfg);
    add_grid_flags(report, cfg);
    add_output_flags(report, cfg, true);
    report->add_option("--fisher-output", cfg.fisher_output, "also write F(phi) here (csv or json per --format)");

    auto *fit = app.add_subcommand("fit", "fit coincidence counts and bound the Fisher information");
    fit->add_option("--counts", cfg.counts_path, "counts CSV: phi,D0..D5")->required();
    fit->add_option("--efficiency", cfg.efficiency_path, "efficiency CSV: a1..a7,b1..b7 (default: measured table)");
    fit->add_option("--mode", cfg.mode, "global | per-point")
        ->check(CLI::IsMember({"global", "per-point"}))
        ->capture_default_str();
    fit->add_option("--pin-s", cfg.pinned_noise, "hold s fixed instead of fitting it");
    fit->add_option("--iterations", cfg.iterations, "Monte-Carlo iterations")->capture_default_str();
    fit->add_option("--seed", cfg.seed, "Monte-Carlo seed (default: $SPINSQ_SEED, then 0)");
    fit->add_option("--threads", cfg.threads, "Monte-Carlo worker threads, 0 for all cores")->capture_default_str();
    fit->add_option("--fisher-output", cfg.fisher_output, "write F(phi) of the fitted model");
    fit->add_option("--band-output", cfg.band_output, "run the Monte-Carlo band and write it here");
    add_grid_flags(fit, cfg);
    add_output_flags(fit, cfg, true);

    auto *simulate = app.add_subcommand("simulate-counts", "synthesize coincidence counts");
    simulate->add_option("--n", cfg.photons, "photon number N")->capture_default_str();
    simulate->add_option("--i", cfg.indistinguishability, "indistinguishability I")->capture_default_str();
    simulate->add_option("--s", cfg.noise, "phase-insensitive noise s")->capture_default_str();
    simulate->add_option("--m", cfg.scale, "overall scale M")->capture_default_str();
    simulate->add_option("--phi0", cfg.phase_offset, "phase offset: phi = label - phi0")->capture_default_str();
    simulate->add_option("--efficiency", cfg.efficiency_path, "efficiency CSV (default: measured table)");
    simulate->add_option("--seed", cfg.seed, "Poisson seed (default: $SPINSQ_SEED, then 0)");
    simulate->add_flag("--noiseless", cfg.noiseless, "write expected counts instead of Poisson draws");
    add_grid_flags(simulate, cfg);
    add_output_flags(simulate, cfg, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        std::vector<Output> outputs;
        if (fringe->parsed()) {
            outputs = cmd_fringe(cfg);
        } else if (report->parsed()) {
            outputs = cmd_report(cfg, err);
        } else if (fit->parsed()) {
            outputs = cmd_fit(cfg, err);
        } else {
            outputs = cmd_simulate_counts(cfg);
        }
        commit(outputs, out);
        return kExitOk;
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError &e) {
        err << "error: malformed input, " << e.what() << "\n";
        return kExitInput;
    } catch (const IoError &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NonConvergence &e) {
        err << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    }
}

}  // namespace spinsq::cli

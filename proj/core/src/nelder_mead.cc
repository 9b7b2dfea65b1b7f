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

#include "nelder_mead.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spinsq::detail {

namespace {

struct Run {
    std::vector<double> x;
    double value;
    int evaluations;
    bool converged;
};

Run single_run(const std::function<double(const std::vector<double> &)> &f, const std::vector<double> &start,
               const std::vector<double> &step, const SimplexOptions &options, int budget) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double> &x) {
        ++evals;
        double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += step[i];
    }
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = eval(pts[i]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    bool converged = false;
    while (evals < budget) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                diameter = std::max(diameter, std::abs(pts[i][k] - pts[best][k]));
            }
        }
        const double spread = vals[worst] - vals[best];
        if (diameter <= options.step_tolerance ||
            (std::isfinite(spread) && spread <= options.relative_tolerance * std::abs(vals[best]) &&
             vals[best] != 0.0) ||
            spread == 0.0) {
            converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                centroid[k] += pts[i][k] / n;
            }
        }
        auto along = [&](double t, std::vector<double> &out) {
            for (std::size_t k = 0; k < n; ++k) {
                out[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
            }
        };

        along(-1.0, trial);
        const double fr = eval(trial);
        if (fr < vals[best]) {
            along(-2.0, trial2);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[worst] = trial2;
                vals[worst] = fe;
            } else {
                pts[worst] = trial;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = trial;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        along(outside ? -0.5 : 0.5, trial2);
        const double fc = eval(trial2);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = trial2;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) {
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) {
                pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
            }
            vals[i] = eval(pts[i]);
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (vals[i] < vals[best]) {
            best = i;
        }
    }
    return {pts[best], vals[best], evals, converged};
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double> &)> &objective,
                          std::vector<double> start, std::vector<double> step, const SimplexOptions &options) {
    SimplexResult result;
    Run run = single_run(objective, start, step, options, options.max_evaluations);
    result.evaluations = run.evaluations;
    for (int r = 0; r < options.restarts && result.evaluations < options.max_evaluations; ++r) {
        std::vector<double> small(step.size());
        for (std::size_t k = 0; k < step.size(); ++k) {
            small[k] = std::max(std::abs(step[k]) * 1e-2, 1e-6);
        }
        Run again = single_run(objective, run.x, small, options, options.max_evaluations - result.evaluations);
        result.evaluations += again.evaluations;
        const bool improved = again.value < run.value - options.relative_tolerance * std::abs(run.value);
        if (again.value <= run.value) {
            run.x = again.x;
            run.value = again.value;
        }
        run.converged = again.converged;
        if (!improved) {
            break;
        }
    }
    result.x = run.x;
    result.value = run.value;
    result.converged = run.converged;
    return result;
}

}  // namespace spinsq::detail

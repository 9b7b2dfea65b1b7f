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

#pragma once

#include <functional>
#include <vector>

namespace spinsq::detail {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct SimplexOptions {
    double relative_tolerance = 1e-10;  // on the spread of objective values
    double step_tolerance = 1e-10;      // on the simplex diameter
    int max_evaluations = 10000;
    int restarts = 2;
};

/// Nelder-Mead with the standard coefficients (1, 2, 0.5, 0.5). After
/// convergence the simplex is rebuilt around the best vertex and the search
/// repeated, which guards against collapse onto a non-stationary point.
SimplexResult nelder_mead(const std::function<double(const std::vector<double> &)> &objective,
                          std::vector<double> start, std::vector<double> step, const SimplexOptions &options);

}  // namespace spinsq::detail

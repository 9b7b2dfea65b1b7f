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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinsq/detector.h"
#include "spinsq/estimation.h"
#include "spinsq/interferometer.h"
#include "spinsq/metrology.h"

namespace spinsq {

/// Malformed text input. Line and column are 1-based; column counts
/// comma-separated fields.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &what, int line, int column);

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

/// Missing, unreadable or unwritable file.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path &path);
/// Writes to a sibling temporary file and renames it over `path`, so a
/// failed write never leaves partial output behind.
void write_text_file_atomic(const std::filesystem::path &path, std::string_view content);

EfficiencyTable parse_efficiency_csv(std::string_view text);
std::string format_efficiency_csv(const EfficiencyTable &table);

std::vector<CoincidenceRecord> parse_counts_csv(std::string_view text);
std::string format_counts_csv(std::span<const CoincidenceRecord> records);

std::string format_fringe_csv(const FringeTable &table);
FringeTable parse_fringe_csv(std::string_view text);
std::string format_fringe_json(const FringeTable &table);
FringeTable parse_fringe_json(std::string_view text);

std::string format_fisher_csv(const FisherCurve &curve);
std::string format_fisher_json(const FisherCurve &curve);

std::string format_report_json(const SensitivityReport &report);
std::string format_fit_json(const FitResult &fit);

std::string format_band_csv(const MonteCarloBand &band);
/// Quantiles only; the raw per-iteration samples are left out.
std::string format_band_json(const MonteCarloBand &band);

}  // namespace spinsq

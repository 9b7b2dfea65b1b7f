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

#include "spinsq/io.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include <nlohmann/json.hpp>

namespace spinsq {

namespace {

using Json = nlohmann::ordered_json;

struct CsvRow {
    int line;
    std::vector<std::string_view> cells;
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<CsvRow> split_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    int line = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        ++line;
        const auto content = trim(raw);
        if (!content.empty() && content.front() != '#') {
            CsvRow row{line, {}};
            std::size_t start = 0;
            while (true) {
                const auto comma = content.find(',', start);
                row.cells.push_back(trim(content.substr(start, comma == std::string_view::npos ? comma : comma - start)));
                if (comma == std::string_view::npos) {
                    break;
                }
                start = comma + 1;
            }
            rows.push_back(std::move(row));
        }
        if (end == std::string_view::npos) {
            break;
        }
        pos = end + 1;
    }
    return rows;
}

double parse_number(std::string_view cell, int line, int column) {
    double value = 0.0;
    if (cell.empty()) {
        throw ParseError("empty field", line, column);
    }
    const auto *first = cell.data();
    const auto *last = cell.data() + cell.size();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("not a number: '" + std::string(cell) + "'", line, column);
    }
    return value;
}

void expect_header(const CsvRow &row, const std::vector<std::string> &names) {
    if (row.cells.size() != names.size()) {
        throw ParseError("expected " + std::to_string(names.size()) + " columns, found " +
                             std::to_string(row.cells.size()),
                         row.line, static_cast<int>(std::min(row.cells.size(), names.size())) + 1);
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (row.cells[c] != names[c]) {
            throw ParseError("expected header '" + names[c] + "', found '" + std::string(row.cells[c]) + "'",
                             row.line, static_cast<int>(c) + 1);
        }
    }
}

void check_width(const CsvRow &row, std::size_t width) {
    if (row.cells.size() != width) {
        throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(row.cells.size()),
                         row.line, static_cast<int>(std::min(row.cells.size(), width)) + 1);
    }
}

// Header of the form `prefix0..prefixN` after a leading `phi` column.
int indexed_header_photons(const CsvRow &row, char prefix) {
    if (row.cells.size() < 2) {
        throw ParseError("header needs a phi column and at least one outcome column", row.line, 1);
    }
    std::vector<std::string> names = {"phi"};
    for (std::size_t m = 0; m + 1 < row.cells.size(); ++m) {
        names.push_back(std::string(1, prefix) + std::to_string(m));
    }
    expect_header(row, names);
    return static_cast<int>(row.cells.size()) - 2;
}

void emit(const Json &j, std::string &out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
        case Json::value_t::number_float:
            out += std::isfinite(j.get<double>()) ? format_double(j.get<double>()) : "null";
            return;
        case Json::value_t::array: {
            bool flat = true;
            for (const auto &v : j) {
                flat = flat && !v.is_structured();
            }
            if (j.empty()) {
                out += "[]";
                return;
            }
            if (flat) {
                out += '[';
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i > 0) {
                        out += ", ";
                    }
                    emit(j[i], out, indent);
                }
                out += ']';
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out += pad;
                emit(j[i], out, indent + 2);
                out += i + 1 < j.size() ? ",\n" : "\n";
            }
            out += close + "]";
            return;
        }
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            std::size_t i = 0;
            for (const auto &[key, value] : j.items()) {
                out += pad + Json(key).dump() + ": ";
                emit(value, out, indent + 2);
                out += ++i < j.size() ? ",\n" : "\n";
            }
            out += close + "}";
            return;
        }
        default:
            out += j.dump();
    }
}

std::string dump(const Json &j) {
    std::string out;
    emit(j, out, 0);
    out += '\n';
    return out;
}

Json parameters_json(double phase_offset, double indist, double scale, double noise) {
    Json j;
    j["phase_offset"] = phase_offset;
    j["indistinguishability"] = indist;
    j["scale"] = scale;
    j["noise"] = noise;
    return j;
}

}  // namespace

ParseError::ParseError(const std::string &what, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("error while reading '" + path.string() + "'");
    }
    return buffer.str();
}

void write_text_file_atomic(const std::filesystem::path &path, std::string_view content) {
    std::filesystem::path temp = path;
    temp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + path.string() + "' for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ignored;
            std::filesystem::remove(temp, ignored);
            throw IoError("error while writing '" + path.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(temp, ignored);
        throw IoError("cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

EfficiencyTable parse_efficiency_csv(std::string_view text) {
    const auto rows = split_csv(text);
    if (rows.empty()) {
        throw ParseError("efficiency table is empty", 1, 1);
    }
    std::vector<std::string> names;
    for (char arm : {'a', 'b'}) {
        for (int k = 1; k <= kDetectorsPerArm; ++k) {
            names.push_back(std::string(1, arm) + std::to_string(k));
        }
    }
    expect_header(rows[0], names);
    if (rows.size() < 2) {
        throw ParseError("efficiency table has no data row", rows[0].line + 1, 1);
    }
    if (rows.size() > 2) {
        throw ParseError("efficiency table has more than one data row", rows[2].line, 1);
    }
    const CsvRow &row = rows[1];
    check_width(row, names.size());
    EfficiencyTable::Arm a{}, b{};
    for (int c = 0; c < 2 * kDetectorsPerArm; ++c) {
        const double v = parse_number(row.cells[c], row.line, c + 1);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ParseError("efficiency must be a fraction in [0, 1]", row.line, c + 1);
        }
        (c < kDetectorsPerArm ? a[c] : b[c - kDetectorsPerArm]) = v;
    }
    return EfficiencyTable(a, b);
}

std::string format_efficiency_csv(const EfficiencyTable &table) {
    std::string out;
    for (int k = 1; k <= kDetectorsPerArm; ++k) {
        out += "a" + std::to_string(k) + ",";
    }
    for (int k = 1; k <= kDetectorsPerArm; ++k) {
        out += "b" + std::to_string(k) + (k < kDetectorsPerArm ? "," : "\n");
    }
    for (double v : table.arm_a()) {
        out += format_double(v) + ",";
    }
    for (int k = 0; k < kDetectorsPerArm; ++k) {
        out += format_double(table.arm_b()[k]) + (k + 1 < kDetectorsPerArm ? "," : "\n");
    }
    return out;
}

std::vector<CoincidenceRecord> parse_counts_csv(std::string_view text) {
    const auto rows = split_csv(text);
    if (rows.empty()) {
        throw ParseError("counts file is empty", 1, 1);
    }
    const int photons = indexed_header_photons(rows[0], 'D');
    std::vector<CoincidenceRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const CsvRow &row = rows[r];
        check_width(row, static_cast<std::size_t>(photons) + 2);
        CoincidenceRecord rec;
        rec.phase = parse_number(row.cells[0], row.line, 1);
        if (!std::isfinite(rec.phase)) {
            throw ParseError("phase must be finite", row.line, 1);
        }
        for (int m = 0; m <= photons; ++m) {
            const double v = parse_number(row.cells[m + 1], row.line, m + 2);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ParseError("counts must be finite and nonnegative", row.line, m + 2);
            }
            rec.counts.push_back(v);
        }
        records.push_back(std::move(rec));
    }
    if (records.empty()) {
        throw ParseError("counts file has no data rows", rows[0].line + 1, 1);
    }
    return records;
}

std::string format_counts_csv(std::span<const CoincidenceRecord> records) {
    std::string out = "phi";
    const int photons = records.empty() ? kCoincidenceOrder : records.front().photons();
    for (int m = 0; m <= photons; ++m) {
        out += ",D" + std::to_string(m);
    }
    out += '\n';
    for (const auto &rec : records) {
        out += format_double(rec.phase);
        for (double c : rec.counts) {
            out += "," + format_double(c);
        }
        out += '\n';
    }
    return out;
}

std::string format_fringe_csv(const FringeTable &table) {
    std::string out = "phi";
    for (int m = 0; m <= table.photons(); ++m) {
        out += ",p" + std::to_string(m);
    }
    out += '\n';
    for (std::size_t i = 0; i < table.grid().size(); ++i) {
        out += format_double(table.grid()[i]);
        for (double p : table.row(i)) {
            out += "," + format_double(p);
        }
        out += '\n';
    }
    return out;
}

FringeTable parse_fringe_csv(std::string_view text) {
    const auto rows = split_csv(text);
    if (rows.empty()) {
        throw ParseError("fringe table is empty", 1, 1);
    }
    const int photons = indexed_header_photons(rows[0], 'p');
    std::vector<double> phases;
    std::vector<std::vector<double>> probs;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const CsvRow &row = rows[r];
        check_width(row, static_cast<std::size_t>(photons) + 2);
        phases.push_back(parse_number(row.cells[0], row.line, 1));
        std::vector<double> p;
        for (int m = 0; m <= photons; ++m) {
            p.push_back(parse_number(row.cells[m + 1], row.line, m + 2));
        }
        probs.push_back(std::move(p));
    }
    return FringeTable(photons, PhaseGrid(std::move(phases)), std::move(probs));
}

std::string format_fringe_json(const FringeTable &table) {
    Json j;
    j["photons"] = table.photons();
    j["phi"] = table.grid().phases();
    j["p"] = table.rows();
    return dump(j);
}

FringeTable parse_fringe_json(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
        return FringeTable(j.at("photons").get<int>(), PhaseGrid(j.at("phi").get<std::vector<double>>()),
                           j.at("p").get<std::vector<std::vector<double>>>());
    } catch (const Json::parse_error &e) {
        throw ParseError(e.what(), 1, 1);
    } catch (const Json::exception &e) {
        throw ParseError(e.what(), 1, 1);
    }
}

std::string format_fisher_csv(const FisherCurve &curve) {
    std::string out = "phi,F\n";
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        out += format_double(curve.grid[i]) + "," + format_double(curve.values[i]) + "\n";
    }
    return out;
}

std::string format_fisher_json(const FisherCurve &curve) {
    Json j;
    j["step"] = curve.step;
    j["max_value"] = curve.max_value;
    j["phase_at_max"] = curve.phase_at_max;
    j["phi"] = curve.grid.phases();
    j["F"] = curve.values;
    std::vector<bool> flags(curve.ill_conditioned.begin(), curve.ill_conditioned.end());
    j["ill_conditioned"] = flags;
    return dump(j);
}

std::string format_report_json(const SensitivityReport &report) {
    Json j;
    j["photons"] = report.photons;
    j["xi_s"] = report.xi_s;
    j["xi_r"] = report.xi_r;
    j["phase_error_squeezing"] = report.phase_error_squeezing;
    j["phase_error_snl"] = report.phase_error_snl;
    j["phase_error_optimal"] = report.phase_error_optimal;
    j["fisher_max"] = report.fisher_max;
    j["phase_at_fisher_max"] = report.phase_at_fisher_max;
    j["advantage"] = report.advantage;
    return dump(j);
}

std::string format_fit_json(const FitResult &fit) {
    Json j;
    j["mode"] = fit.mode == FitMode::Global ? "global" : "per-point";
    const auto &p = fit.parameters;
    j["parameters"] = parameters_json(p.phase_offset, p.indistinguishability, p.scale, p.noise);
    const auto &se = fit.standard_errors;
    j["standard_errors"] = parameters_json(se[0], se[1], se[2], se[3]);
    Json cov = Json::array();
    for (int r = 0; r < 4; ++r) {
        cov.push_back(std::vector<double>(fit.covariance.begin() + 4 * r, fit.covariance.begin() + 4 * r + 4));
    }
    j["covariance_order"] = {"phase_offset", "indistinguishability", "scale", "noise"};
    j["covariance"] = cov;
    j["converged"] = fit.converged;
    j["evaluations"] = fit.evaluations;
    j["residual_sum_of_squares"] = fit.residual_sum_of_squares;
    j["start_objectives"] = fit.start_objectives;
    j["phases"] = fit.phases;
    j["residuals"] = fit.residuals;
    return dump(j);
}

std::string format_band_csv(const MonteCarloBand &band) {
    std::string out = "phi,q025,q50,q975\n";
    for (std::size_t i = 0; i < band.grid.size(); ++i) {
        out += format_double(band.grid[i]) + "," + format_double(band.q025[i]) + "," + format_double(band.q50[i]) +
               "," + format_double(band.q975[i]) + "\n";
    }
    return out;
}

std::string format_band_json(const MonteCarloBand &band) {
    Json j;
    j["iterations"] = band.iterations;
    j["failed"] = band.failed;
    j["seed"] = band.seed;
    j["phi"] = band.grid.phases();
    j["q025"] = band.q025;
    j["q50"] = band.q50;
    j["q975"] = band.q975;
    return dump(j);
}

}  // namespace spinsq

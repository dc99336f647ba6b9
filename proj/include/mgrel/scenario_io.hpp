#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgrel/engine.hpp"

namespace mgrel {

// ---------------------------------------------------------------------------
// Scenario files (JSON). Keys carry their units; unknown keys are rejected.
// See docs/formats.md for the field list.
// ---------------------------------------------------------------------------

/// Parses and fully validates a scenario document. Throws ConfigError.
Scenario parse_scenario(std::string_view text);

/// Serializes a scenario; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& scenario);

/// Reads a file and parses it. Throws IoError if the file cannot be read.
Scenario load_scenario_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class ReportFormat { delimited, structured };

struct LoadPointRow {
  std::string id;
  double lambda = 0.0;
  double r = 0.0;
  double u = 0.0;
  double p_res = 0.0;
  bool operator==(const LoadPointRow&) const = default;
};

struct Provenance {
  std::string scenario;
  std::uint64_t seed = 0;
  std::uint64_t years_run = 0;
  bool converged = false;
  std::string version;
  bool operator==(const Provenance&) const = default;
};

struct ReportDocument {
  Provenance provenance;
  std::vector<LoadPointRow> load_points;
  SystemIndices system;
  std::vector<SensitivityRow> sensitivity;
  bool operator==(const ReportDocument&) const = default;
};

ReportDocument make_report(const RunResult& result, std::span<const SensitivityRow> sensitivity = {});

// Emission precision: 3 decimals for lambda, r, U, SAIFI, SAIDI and AENS,
// 2 for CAIDI, whole kWh for ENS, 6 for P_RES. Values are truncated toward
// zero, which is how the published tables are printed.
inline constexpr int kDecimalsIndex = 3;
inline constexpr int kDecimalsCaidi = 2;
inline constexpr int kDecimalsEns = 0;
inline constexpr int kDecimalsPRes = 6;

/// Truncates `value` to `decimals` places and prints it without exponent.
std::string format_truncated(double value, int decimals);
double truncate_to(double value, int decimals);

/// Applies the emission precision to every numeric field.
ReportDocument quantize(const ReportDocument& doc);

std::string emit_report(const ReportDocument& doc, ReportFormat format);

/// Inverse of emit_report; returns the quantized document. Throws ConfigError
/// (syntax/schema) on malformed input.
ReportDocument parse_report(std::string_view text, ReportFormat format);

std::string_view to_string(ReportFormat format) noexcept;

/// Rows of "year,running_ens_kwh,statistic".
std::string emit_convergence_trace(std::span<const ConvergenceRow> rows);

/// One block per unit: "# unit <id>" then "day_index,resource_value,power_kw".
std::string emit_resource_trace(std::span<const UnitTrace> traces);

// ---------------------------------------------------------------------------
// Bundled study cases
// ---------------------------------------------------------------------------

/// case1 (no DGs), case2 (four turbines), case3 (two turbines + two PV),
/// case4 (case3 with a per-day load-factor vector, flat by default) and
/// sweep (case3 with the islanding-success sweep).
std::map<std::string, Scenario> bundled_scenarios();

inline constexpr std::uint64_t kDefaultSeed = 20170710;

}  // namespace mgrel

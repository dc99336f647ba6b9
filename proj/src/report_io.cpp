#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mgrel/errors.hpp"
#include "mgrel/scenario_io.hpp"

namespace mgrel {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kPow10[] = {1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9};

// Absorbs representation error such as 42380.99999999998 before truncating.
constexpr double kTruncationSlack = 1e-6;

long long truncated_units(double value, int decimals) {
  const double scaled = value * kPow10[decimals];
  const double slack = scaled >= 0.0 ? kTruncationSlack : -kTruncationSlack;
  return static_cast<long long>(std::trunc(scaled + slack));
}

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_report(ConfigErrorKind kind, const std::string& where, const std::string& reason) {
  throw ConfigError(kind, where, reason);
}

double parse_double(std::string_view text, const std::string& where) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_report(ConfigErrorKind::syntax, where, "not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_u64(std::string_view text, const std::string& where) {
  std::uint64_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_report(ConfigErrorKind::syntax, where, "not an unsigned integer: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

SystemIndices quantize(const SystemIndices& s) {
  return {truncate_to(s.saifi, kDecimalsIndex), truncate_to(s.saidi, kDecimalsIndex),
          truncate_to(s.caidi, kDecimalsCaidi), truncate_to(s.ens, kDecimalsEns),
          truncate_to(s.aens, kDecimalsIndex)};
}

std::string system_fields(const SystemIndices& s) {
  return format_truncated(s.saifi, kDecimalsIndex) + "," + format_truncated(s.saidi, kDecimalsIndex) + "," +
         format_truncated(s.caidi, kDecimalsCaidi) + "," + format_truncated(s.ens, kDecimalsEns) + "," +
         format_truncated(s.aens, kDecimalsIndex);
}

SystemIndices parse_system_fields(const std::vector<std::string>& f, std::size_t offset, const std::string& where) {
  return {parse_double(f[offset], where), parse_double(f[offset + 1], where), parse_double(f[offset + 2], where),
          parse_double(f[offset + 3], where), parse_double(f[offset + 4], where)};
}

constexpr const char* kLoadPointHeader = "load_point,lambda_per_yr,r_h,u_h_per_yr,p_res";
constexpr const char* kSystemHeader = "saifi,saidi,caidi,ens_kwh_per_yr,aens_kwh_per_yr";
constexpr const char* kSensitivityHeader = "p_islanding,saifi,saidi,caidi,ens_kwh_per_yr,aens_kwh_per_yr";

std::string emit_delimited(const ReportDocument& doc) {
  std::ostringstream out;
  const auto& p = doc.provenance;
  out << "# microgrid reliability report\n";
  out << "[provenance]\n";
  out << "scenario," << p.scenario << "\n";
  out << "seed," << p.seed << "\n";
  out << "years_run," << p.years_run << "\n";
  out << "converged," << (p.converged ? "true" : "false") << "\n";
  out << "version," << p.version << "\n";
  out << "\n[load_points]\n" << kLoadPointHeader << "\n";
  for (const auto& lp : doc.load_points) {
    out << lp.id << "," << format_truncated(lp.lambda, kDecimalsIndex) << "," << format_truncated(lp.r, kDecimalsIndex)
        << "," << format_truncated(lp.u, kDecimalsIndex) << "," << format_truncated(lp.p_res, kDecimalsPRes) << "\n";
  }
  out << "\n[system]\n" << kSystemHeader << "\n" << system_fields(doc.system) << "\n";
  if (!doc.sensitivity.empty()) {
    out << "\n[sensitivity]\n" << kSensitivityHeader << "\n";
    for (const auto& row : doc.sensitivity) out << shortest(row.p_islanding) << "," << system_fields(row.indices) << "\n";
  }
  return out.str();
}

ReportDocument parse_delimited(std::string_view text) {
  ReportDocument doc;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  bool expect_header = false;
  bool saw_system = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') bad_report(ConfigErrorKind::syntax, where, "unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section != "provenance" && section != "load_points" && section != "system" && section != "sensitivity") {
        bad_report(ConfigErrorKind::schema, where, "unknown section '" + section + "'");
      }
      expect_header = section != "provenance";
      continue;
    }
    if (expect_header) {
      const char* want = section == "load_points" ? kLoadPointHeader
                         : section == "system"    ? kSystemHeader
                                                  : kSensitivityHeader;
      if (line != want) bad_report(ConfigErrorKind::schema, where, "unexpected header for [" + section + "]");
      expect_header = false;
      continue;
    }
    const auto f = split_csv(line);
    if (section == "provenance") {
      if (f.size() != 2) bad_report(ConfigErrorKind::schema, where, "expected key,value");
      auto& p = doc.provenance;
      if (f[0] == "scenario") {
        p.scenario = f[1];
      } else if (f[0] == "seed") {
        p.seed = parse_u64(f[1], where);
      } else if (f[0] == "years_run") {
        p.years_run = parse_u64(f[1], where);
      } else if (f[0] == "converged") {
        if (f[1] != "true" && f[1] != "false") bad_report(ConfigErrorKind::schema, where, "converged must be true/false");
        p.converged = f[1] == "true";
      } else if (f[0] == "version") {
        p.version = f[1];
      } else {
        bad_report(ConfigErrorKind::schema, where, "unknown provenance key '" + f[0] + "'");
      }
    } else if (section == "load_points") {
      if (f.size() != 5) bad_report(ConfigErrorKind::schema, where, "expected 5 fields");
      doc.load_points.push_back({f[0], parse_double(f[1], where), parse_double(f[2], where), parse_double(f[3], where),
                                 parse_double(f[4], where)});
    } else if (section == "system") {
      if (f.size() != 5 || saw_system) bad_report(ConfigErrorKind::schema, where, "expected one 5-field system row");
      doc.system = parse_system_fields(f, 0, where);
      saw_system = true;
    } else if (section == "sensitivity") {
      if (f.size() != 6) bad_report(ConfigErrorKind::schema, where, "expected 6 fields");
      doc.sensitivity.push_back({parse_double(f[0], where), parse_system_fields(f, 1, where)});
    } else {
      bad_report(ConfigErrorKind::syntax, where, "data outside any section");
    }
  }
  if (!saw_system) bad_report(ConfigErrorKind::schema, "", "report has no [system] row");
  return doc;
}

ordered_json system_json(const SystemIndices& s) {
  const auto q = quantize(s);
  return {{"saifi", q.saifi}, {"saidi", q.saidi}, {"caidi", q.caidi}, {"ens_kwh_per_yr", q.ens},
          {"aens_kwh_per_yr", q.aens}};
}

std::string emit_structured(const ReportDocument& raw) {
  const auto doc = quantize(raw);
  ordered_json j;
  const auto& p = doc.provenance;
  j["provenance"] = {{"scenario", p.scenario},
                     {"seed", p.seed},
                     {"years_run", p.years_run},
                     {"converged", p.converged},
                     {"version", p.version}};
  ordered_json lps = ordered_json::array();
  for (const auto& lp : doc.load_points) {
    lps.push_back({{"load_point", lp.id},
                   {"lambda_per_yr", lp.lambda},
                   {"r_h", lp.r},
                   {"u_h_per_yr", lp.u},
                   {"p_res", lp.p_res}});
  }
  j["load_points"] = lps;
  j["system"] = system_json(doc.system);
  if (!doc.sensitivity.empty()) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : doc.sensitivity) {
      auto r = system_json(row.indices);
      ordered_json entry = {{"p_islanding", row.p_islanding}};
      entry.update(r);
      rows.push_back(entry);
    }
    j["sensitivity"] = rows;
  }
  return j.dump(2) + "\n";
}

SystemIndices system_from_json(const nlohmann::json& j) {
  return {j.at("saifi").get<double>(), j.at("saidi").get<double>(), j.at("caidi").get<double>(),
          j.at("ens_kwh_per_yr").get<double>(), j.at("aens_kwh_per_yr").get<double>()};
}

ReportDocument parse_structured(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    bad_report(ConfigErrorKind::syntax, "", e.what());
  }
  ReportDocument doc;
  try {
    const auto& p = j.at("provenance");
    doc.provenance = {p.at("scenario").get<std::string>(), p.at("seed").get<std::uint64_t>(),
                      p.at("years_run").get<std::uint64_t>(), p.at("converged").get<bool>(),
                      p.at("version").get<std::string>()};
    for (const auto& lp : j.at("load_points")) {
      doc.load_points.push_back({lp.at("load_point").get<std::string>(), lp.at("lambda_per_yr").get<double>(),
                                 lp.at("r_h").get<double>(), lp.at("u_h_per_yr").get<double>(),
                                 lp.at("p_res").get<double>()});
    }
    doc.system = system_from_json(j.at("system"));
    if (j.contains("sensitivity")) {
      for (const auto& row : j.at("sensitivity")) {
        doc.sensitivity.push_back({row.at("p_islanding").get<double>(), system_from_json(row)});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    bad_report(ConfigErrorKind::schema, "", e.what());
  }
  return doc;
}

}  // namespace

double truncate_to(double value, int decimals) {
  if (decimals < 0 || decimals > 9) throw DomainError("unsupported decimal count");
  if (!std::isfinite(value)) return value;
  return static_cast<double>(truncated_units(value, decimals)) / kPow10[decimals];
}

std::string format_truncated(double value, int decimals) {
  if (decimals < 0 || decimals > 9) throw DomainError("unsupported decimal count");
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  const long long units = truncated_units(value, decimals);
  const long long scale = static_cast<long long>(kPow10[decimals]);
  const bool negative = units < 0;
  const unsigned long long mag = negative ? static_cast<unsigned long long>(-units) : static_cast<unsigned long long>(units);
  std::string out = negative ? "-" : "";
  out += std::to_string(mag / static_cast<unsigned long long>(scale));
  if (decimals > 0) {
    std::string frac = std::to_string(mag % static_cast<unsigned long long>(scale));
    out += "." + std::string(static_cast<std::size_t>(decimals) - frac.size(), '0') + frac;
  }
  return out;
}

ReportDocument make_report(const RunResult& result, std::span<const SensitivityRow> sensitivity) {
  ReportDocument doc;
  doc.provenance = {result.scenario_name, result.seed, result.years_run, result.converged, MGREL_VERSION};
  for (std::size_t i = 0; i < result.load_points.size(); ++i) {
    const auto& idx = result.load_points[i];
    doc.load_points.push_back({idx.id, idx.lambda, idx.r, idx.u, result.p_res.p_res(idx.id)});
  }
  doc.system = result.system;
  doc.sensitivity.assign(sensitivity.begin(), sensitivity.end());
  return doc;
}

ReportDocument quantize(const ReportDocument& doc) {
  ReportDocument q = doc;
  for (auto& lp : q.load_points) {
    lp.lambda = truncate_to(lp.lambda, kDecimalsIndex);
    lp.r = truncate_to(lp.r, kDecimalsIndex);
    lp.u = truncate_to(lp.u, kDecimalsIndex);
    lp.p_res = truncate_to(lp.p_res, kDecimalsPRes);
  }
  q.system = quantize(q.system);
  for (auto& row : q.sensitivity) row.indices = quantize(row.indices);
  return q;
}

std::string_view to_string(ReportFormat format) noexcept {
  return format == ReportFormat::delimited ? "delimited" : "structured";
}

std::string emit_report(const ReportDocument& doc, ReportFormat format) {
  return format == ReportFormat::delimited ? emit_delimited(doc) : emit_structured(doc);
}

ReportDocument parse_report(std::string_view text, ReportFormat format) {
  return format == ReportFormat::delimited ? parse_delimited(text) : parse_structured(text);
}

std::string emit_convergence_trace(std::span<const ConvergenceRow> rows) {
  std::ostringstream out;
  out << "year,running_ens_kwh,statistic\n";
  for (const auto& r : rows) {
    out << r.year << "," << shortest(r.running_ens) << ",";
    if (std::isinf(r.statistic)) {
      out << "inf";
    } else {
      out << shortest(r.statistic);
    }
    out << "\n";
  }
  return out.str();
}

std::string emit_resource_trace(std::span<const UnitTrace> traces) {
  std::ostringstream out;
  bool first = true;
  for (const auto& t : traces) {
    if (!first) out << "\n";
    first = false;
    out << "# unit " << t.unit_id << "\n";
    out << "day_index,resource_value,power_kw\n";
    for (const auto& p : t.points) out << p.day_index << "," << shortest(p.resource) << "," << shortest(p.power_kw) << "\n";
  }
  return out.str();
}

}  // namespace mgrel

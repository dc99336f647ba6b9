// Command-line front end: run, sweep, sample, validate.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "mgrel/engine.hpp"
#include "mgrel/errors.hpp"
#include "mgrel/scenario_io.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kArgumentError = 2,
  kConfigError = 3,
  kNotConverged = 4,
  kIoError = 5,
};

struct CommonArgs {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "delimited";
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

mgrel::Scenario load(const CommonArgs& args) {
  auto scenario = mgrel::load_scenario_file(args.scenario_path);
  if (args.seed) scenario.seed = *args.seed;
  return scenario;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw mgrel::IoError("failed writing to standard output");
  } else {
    mgrel::write_text_file(out, text);
  }
}

mgrel::ReportFormat report_format(const std::string& name) {
  return name == "structured" ? mgrel::ReportFormat::structured : mgrel::ReportFormat::delimited;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_report) {
  cmd->add_option("scenario", args.scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "RNG seed; overrides the seed in the scenario file");
  cmd->add_option("--out", args.out, "Output file (default: standard output)");
  if (with_report) {
    cmd->add_option("--format", args.format, "Report format")
        ->check(CLI::IsMember({"delimited", "structured"}))
        ->capture_default_str();
    cmd->add_option("--workers", args.workers, "Worker threads; results do not depend on this")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Microgrid reliability assessment with renewable generation and prioritized loads.\n"
      "A --seed flag always takes precedence over the seed stored in the scenario file;\n"
      "every report records the seed that was used."};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::string trace_path;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write its reliability report");
  add_common(run_cmd, run_args, true);
  run_cmd->add_option("--trace", trace_path, "Also write the convergence trace (year,running_ens_kwh,statistic)");

  CommonArgs sweep_args;
  std::vector<double> p_values;
  auto* sweep_cmd = app.add_subcommand("sweep", "Islanding-success sensitivity table from one converged estimate");
  add_common(sweep_cmd, sweep_args, true);
  sweep_cmd->add_option("--p", p_values, "Comma-separated islanding-success probabilities (default: from file)")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));

  CommonArgs sample_args;
  std::size_t days = mgrel::kDaysPerYear;
  std::vector<std::string> units;
  auto* sample_cmd = app.add_subcommand("sample", "Emit synthetic resource and power traces for the fleet");
  add_common(sample_cmd, sample_args, false);
  sample_cmd->add_option("--days", days, "Number of days")->check(CLI::PositiveNumber)->capture_default_str();
  sample_cmd->add_option("--unit", units, "Restrict to these unit ids (repeatable or comma-separated)")->delimiter(',');

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file without simulating");
  validate_cmd->add_option("scenario", validate_path, "Scenario file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kArgumentError;
  }

  try {
    if (*validate_cmd) {
      const auto scenario = mgrel::load_scenario_file(validate_path);
      std::cerr << "ok: " << scenario.name << " (" << scenario.network.load_points.size() << " load points, "
                << scenario.fleet.turbines.size() + scenario.fleet.pv_arrays.size() << " DG units)\n";
      return kOk;
    }

    if (*run_cmd) {
      const auto scenario = load(run_args);
      mgrel::RunOptions options{run_args.workers, &std::cerr};
      const auto result = mgrel::run(scenario, options);
      const auto doc = mgrel::make_report(result, {});
      emit(run_args.out, mgrel::emit_report(doc, report_format(run_args.format)));
      if (!trace_path.empty()) mgrel::write_text_file(trace_path, mgrel::emit_convergence_trace(result.trace));
      if (!result.converged) {
        std::cerr << "not converged after " << result.years_run << " years\n";
        return kNotConverged;
      }
      return kOk;
    }

    if (*sweep_cmd) {
      const auto scenario = load(sweep_args);
      const auto& p = p_values.empty() ? scenario.sweep_p : p_values;
      if (p.empty()) {
        std::cerr << "sweep: no probabilities given (--p) and none in the scenario file\n";
        return kArgumentError;
      }
      mgrel::RunOptions options{sweep_args.workers, &std::cerr};
      const auto result = mgrel::sensitivity_sweep(scenario, p, options);
      const auto doc = mgrel::make_report(result.base, result.rows);
      emit(sweep_args.out, mgrel::emit_report(doc, report_format(sweep_args.format)));
      if (!result.base.converged) {
        std::cerr << "not converged after " << result.base.years_run << " years\n";
        return kNotConverged;
      }
      return kOk;
    }

    if (*sample_cmd) {
      const auto scenario = load(sample_args);
      // sample the whole fleet, then filter: PV streams are keyed by array position
      auto traces = mgrel::emit_trace(scenario.fleet, scenario.resources, days, scenario.seed);
      if (!units.empty()) {
        for (const auto& id : units) {
          if (std::none_of(traces.begin(), traces.end(), [&](const auto& t) { return t.unit_id == id; })) {
            std::cerr << "sample: unknown unit '" << id << "'\n";
            return kArgumentError;
          }
        }
        std::erase_if(traces, [&](const auto& t) {
          return std::find(units.begin(), units.end(), t.unit_id) == units.end();
        });
      }
      emit(sample_args.out, mgrel::emit_resource_trace(traces));
      return kOk;
    }
  } catch (const mgrel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mgrel::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const mgrel::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mgrel::TopologyError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternalError;
  }
  return kArgumentError;
}

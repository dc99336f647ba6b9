#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "mgrel/counter_rng.hpp"
#include "mgrel/engine.hpp"
#include "mgrel/errors.hpp"

namespace mgrel {

namespace {

// Prepared per-scenario state for the daily loop.
class YearSimulator {
 public:
  explicit YearSimulator(const Scenario& scenario)
      : sampler_(scenario.fleet, scenario.resources),
        rng_(scenario.seed),
        factors_(scenario.load_factors),
        policy_(scenario.dispatch),
        lp_count_(scenario.network.load_points.size()) {
    for (const auto& id : scenario.priority) {
      const auto& lps = scenario.network.load_points;
      for (std::size_t i = 0; i < lps.size(); ++i) {
        if (lps[i].id == id) {
          levels_.push_back(lps[i].level_kw);
          order_.push_back(i);
        }
      }
    }
    // Load points outside the priority list carry no load and are always met.
    for (std::size_t i = 0; i < lp_count_; ++i) {
      if (std::find(order_.begin(), order_.end(), i) == order_.end()) always_.push_back(i);
    }
  }

  std::size_t lp_count() const noexcept { return lp_count_; }

  void simulate(std::uint64_t year, std::span<std::uint64_t> counts) const {
    std::fill(counts.begin(), counts.end(), 0);
    std::vector<double> levels(levels_.size());
    std::vector<std::uint8_t> supplied(levels_.size());
    for (std::uint64_t day = 0; day < kDaysPerYear; ++day) {
      const double factor = factors_.empty() ? 1.0 : factors_[day];
      for (std::size_t k = 0; k < levels_.size(); ++k) levels[k] = levels_[k] * factor;
      const double total = sampler_.total_power_kw(rng_, year, day);
      dispatch_levels(total, levels, policy_, supplied);
      for (std::size_t k = 0; k < order_.size(); ++k) counts[order_[k]] += supplied[k];
    }
    for (auto i : always_) counts[i] = kDaysPerYear;
  }

 private:
  FleetSampler sampler_;
  CounterRng rng_;
  std::vector<double> factors_;
  DispatchPolicy policy_;
  std::size_t lp_count_;
  std::vector<double> levels_;      // priority order
  std::vector<std::size_t> order_;  // priority position -> load point index
  std::vector<std::size_t> always_;
};

// Simulates years [first, first + n) into rows of `out` (n x lp_count).
void simulate_block(const YearSimulator& sim, std::uint64_t first, std::size_t n, unsigned workers,
                    std::vector<std::uint64_t>& out) {
  const std::size_t width = sim.lp_count();
  out.assign(n * width, 0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t y = begin; y < end; ++y) {
      sim.simulate(first + y, std::span<std::uint64_t>(out.data() + y * width, width));
    }
  };
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (w == 1) {
    work(0, n);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  {
    std::vector<std::jthread> threads;
    threads.reserve(w);
    for (unsigned t = 0; t < w; ++t) {
      const std::size_t begin = n * t / w;
      const std::size_t end = n * (t + 1) / w;
      threads.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double energy_not_supplied(std::span<const LoadPointIndices> indices, std::span<const LoadPoint> lps) {
  double ens = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i) ens += indices[i].u * lps[i].level_kw;
  return ens;
}

PResEstimate empty_estimate(const NetworkModel& network) {
  PResEstimate est;
  for (const auto& lp : network.load_points) est.load_points.push_back(lp.id);
  est.supplied_days.assign(est.load_points.size(), 0);
  return est;
}

constexpr std::size_t kBlockYears = 512;
constexpr std::uint64_t kProgressEvery = 10'000;

}  // namespace

PResEstimate simulate_year(const Scenario& scenario, std::uint64_t year_index) {
  scenario.validate();
  const YearSimulator sim(scenario);
  PResEstimate est = empty_estimate(scenario.network);
  sim.simulate(year_index, est.supplied_days);
  est.total_days = kDaysPerYear;
  return est;
}

PResEstimate simulate_years(const Scenario& scenario, std::uint64_t first_year, std::uint64_t count) {
  scenario.validate();
  const YearSimulator sim(scenario);
  PResEstimate est = empty_estimate(scenario.network);
  std::vector<std::uint64_t> counts(sim.lp_count());
  for (std::uint64_t y = first_year; y < first_year + count; ++y) {
    sim.simulate(y, counts);
    for (std::size_t i = 0; i < counts.size(); ++i) est.supplied_days[i] += counts[i];
  }
  est.total_days = count * kDaysPerYear;
  return est;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const YearSimulator sim(scenario);
  const ContributionTable table = build_contribution_table(scenario.network);
  const auto& lps = scenario.network.load_points;
  const auto& ctl = scenario.simulation;

  RunResult result;
  result.scenario_name = scenario.name;
  result.seed = scenario.seed;
  result.p_res = empty_estimate(scenario.network);

  // Without generation every year is identical; one year settles it.
  const bool stochastic = !scenario.fleet.empty();
  const std::uint64_t max_years = stochastic ? ctl.max_years : 1;
  const std::uint64_t window = ctl.window_years;

  std::vector<double> ring(window + 1, 0.0);
  double window_sum = 0.0;
  bool done = false;
  std::vector<std::uint64_t> block;
  const std::size_t width = lps.size();

  for (std::uint64_t first = 0; first < max_years && !done;) {
    const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kBlockYears, max_years - first));
    simulate_block(sim, first, n, std::max(1u, options.workers), block);

    for (std::size_t y = 0; y < n && !done; ++y) {
      const std::uint64_t year = first + y + 1;  // 1-based count of simulated years
      for (std::size_t i = 0; i < width; ++i) result.p_res.supplied_days[i] += block[y * width + i];
      result.p_res.total_days += kDaysPerYear;

      const auto indices = combine_analytical(result.p_res, table, scenario.network.upstream, scenario.p_islanding);
      const double ens = energy_not_supplied(indices, lps);

      // Moving average of the running ENS over the last `window` years.
      double statistic = std::numeric_limits<double>::infinity();
      const double prev_avg = window_sum / static_cast<double>(window);
      window_sum += ens;
      if (year > window) window_sum -= ring[(year - window - 1) % (window + 1)];
      ring[(year - 1) % (window + 1)] = ens;
      if (year > window) {
        const double avg = window_sum / static_cast<double>(window);
        const double change = std::fabs(avg - prev_avg);
        statistic = prev_avg != 0.0 ? change / std::fabs(prev_avg) : change;
      }
      result.trace.push_back({year, ens, statistic});
      result.years_run = year;

      if (!stochastic) {
        result.converged = true;
        done = true;
      } else if (year >= ctl.min_years && statistic < ctl.tolerance) {
        result.converged = true;
        done = true;
      }
      if (options.diagnostics != nullptr && (year % kProgressEvery == 0 || done)) {
        *options.diagnostics << "[" << scenario.name << "] year " << year << "  ENS " << ens << "  stat "
                             << statistic << (done ? "  converged" : "") << '\n';
      }
    }
    first += n;
  }

  result.load_points = combine_analytical(result.p_res, table, scenario.network.upstream, scenario.p_islanding);
  result.system = compute_system_indices(result.load_points, lps);
  return result;
}

std::vector<SensitivityRow> recombine_sweep(const Scenario& scenario, const PResEstimate& p_res,
                                            std::span<const double> p_values) {
  const ContributionTable table = build_contribution_table(scenario.network);
  std::vector<SensitivityRow> rows;
  rows.reserve(p_values.size());
  for (double p : p_values) {
    const auto indices = combine_analytical(p_res, table, scenario.network.upstream, p);
    rows.push_back({p, compute_system_indices(indices, scenario.network.load_points)});
  }
  return rows;
}

SweepResult sensitivity_sweep(const Scenario& scenario, std::span<const double> p_values, const RunOptions& options) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sweep probabilities must lie in [0, 1]");
  }
  SweepResult out;
  out.base = run(scenario, options);
  out.rows = recombine_sweep(scenario, out.base.p_res, p_values);
  return out;
}

}  // namespace mgrel

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "mgrel/engine.hpp"
#include "mgrel/errors.hpp"
#include "mgrel/scenario_io.hpp"
#include "support/oracles.hpp"

using namespace mgrel;

namespace {

const std::vector<PriorityLoad> kLoads = {{"LP9", 500}, {"LP3", 3000}, {"LP4", 1000}, {"LP2", 1000}};

std::uint32_t mask_of(double total, const std::vector<double>& levels, DispatchPolicy policy) {
  std::vector<std::uint8_t> supplied(levels.size());
  dispatch_levels(total, levels, policy, supplied);
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) m |= supplied[i] ? (1u << i) : 0u;
  return m;
}

Scenario fixed_years(Scenario s, std::uint64_t years) {
  s.simulation.min_years = years;
  s.simulation.max_years = years;
  return s;
}

PResEstimate years_range(const Scenario& s, std::uint64_t from, std::uint64_t to) {
  return simulate_years(s, from, to - from);
}

}  // namespace

// --- Dispatch ----------------------------------------------------------------

TEST(Dispatch, WorkedExamples) {
  EXPECT_TRUE(priority_dispatch(0.0, kLoads).empty());
  EXPECT_EQ(priority_dispatch(5500.0, kLoads), (std::vector<std::string>{"LP9", "LP3", "LP4", "LP2"}));
  EXPECT_EQ(priority_dispatch(3600.0, kLoads), (std::vector<std::string>{"LP9", "LP3"}));
}

TEST(Dispatch, PoliciesDifferAfterASkip) {
  // 2000 kW: LP3 does not fit; serve-if-fits goes on to LP4, blocking stops
  EXPECT_EQ(priority_dispatch(2000.0, kLoads, DispatchPolicy::serve_if_fits),
            (std::vector<std::string>{"LP9", "LP4"}));
  EXPECT_EQ(priority_dispatch(2000.0, kLoads, DispatchPolicy::blocking), (std::vector<std::string>{"LP9"}));
}

TEST(Dispatch, ServeIfFitsIsNotMonotonePerLoad) {
  // More generation can cost a lower-priority load its supply under serve-if-fits.
  const std::vector<PriorityLoad> loads = {{"A", 500}, {"B", 600}, {"C", 400}};
  EXPECT_EQ(priority_dispatch(1000.0, loads), (std::vector<std::string>{"A", "C"}));
  EXPECT_EQ(priority_dispatch(1100.0, loads), (std::vector<std::string>{"A", "B"}));
}

TEST(Dispatch, MatchesSubsetEnumeration) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = std::uniform_int_distribution<int>(0, 6)(gen);
    std::vector<double> levels;
    // whole kW so that summing and sequential deduction round identically
    for (int i = 0; i < n; ++i) levels.push_back(50.0 * std::uniform_int_distribution<int>(0, 60)(gen));
    const double total = std::uniform_int_distribution<int>(0, 9000)(gen);
    ASSERT_EQ(mask_of(total, levels, DispatchPolicy::serve_if_fits), oracle::dispatch_serve_if_fits(total, levels));
    ASSERT_EQ(mask_of(total, levels, DispatchPolicy::blocking), oracle::dispatch_blocking(total, levels));
  }
}

TEST(Dispatch, BlockingIsMonotoneInCapacity) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> levels;
    for (int i = 0; i < 5; ++i) levels.push_back(std::uniform_real_distribution<double>(0, 2000)(gen));
    double total = 0.0;
    std::uint32_t prev = 0;
    for (int k = 0; k < 50; ++k) {
      total += std::uniform_real_distribution<double>(0, 300)(gen);
      const auto m = mask_of(total, levels, DispatchPolicy::blocking);
      ASSERT_EQ(m & prev, prev);
      prev = m;
    }
  }
}

// --- Analytical combination ----------------------------------------------------

TEST(Combine, NoGenerationReproducesPublishedCaseOne) {
  const auto data = load_calibrated_dataset();
  PResEstimate none{{"LP2", "LP3", "LP4", "LP9"}, {0, 0, 0, 0}, 365};
  const auto lp = combine_analytical(none, build_contribution_table(data.network), data.network.upstream, 1.0);
  ASSERT_EQ(lp.size(), 4u);
  // published Case 1 load-point indices (lambda, r, U)
  const double expected[4][3] = {{0.726, 11.042, 8.017}, {0.726, 10.823, 7.858}, {0.726, 10.093, 7.328}, {0.656, 10.554, 6.924}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(lp[i].lambda, expected[i][0], 1e-3) << lp[i].id;
    EXPECT_NEAR(lp[i].r, expected[i][1], 1e-3) << lp[i].id;
    EXPECT_NEAR(lp[i].u, expected[i][2], 1e-3) << lp[i].id;
  }
  const auto sys = compute_system_indices(lp, data.network.load_points);
  // published Case 1 system indices
  EXPECT_NEAR(sys.saifi, 0.721, 1e-3);
  EXPECT_NEAR(sys.saidi, 7.624, 1e-3);
  EXPECT_NEAR(sys.caidi, 10.57, 1e-2);
  EXPECT_NEAR(sys.ens, 42381.0, 1.0);
  EXPECT_NEAR(sys.aens, 60.544, 1e-3);
}

TEST(Combine, FullSupplyRemovesUpstreamTerm) {
  const auto data = load_calibrated_dataset();
  PResEstimate all{{"LP2", "LP3", "LP4", "LP9"}, {365, 365, 365, 365}, 365};
  const auto lp = combine_analytical(all, build_contribution_table(data.network), data.network.upstream, 1.0);
  EXPECT_NEAR(lp[0].lambda, 0.226, 1e-12);
  EXPECT_NEAR(lp[0].u, 3.017, 1e-12);
  // half the islanding attempts fail: half the upstream term returns
  const auto half = combine_analytical(all, build_contribution_table(data.network), data.network.upstream, 0.5);
  EXPECT_NEAR(half[3].lambda, 0.156 + 0.25, 1e-12);
  EXPECT_NEAR(half[3].u, 1.924 + 2.5, 1e-12);
}

TEST(Combine, ZeroLambdaFlagged) {
  NetworkModel net;
  net.load_points = {{"A", 10, 1, 1, "r"}};
  net.upstream = {0.0, 0.0};
  net.contributions = AggregateContributions{{"A", {0.0, 0.0}}};
  PResEstimate p{{"A"}, {0}, 365};
  const auto lp = combine_analytical(p, build_contribution_table(net), net.upstream, 1.0);
  EXPECT_TRUE(lp[0].zero_lambda);
  EXPECT_EQ(lp[0].r, 0.0);
  EXPECT_THROW(compute_system_indices(lp, net.load_points), DivisionGuardError);
}

TEST(Indices, GuardsAndIdentities) {
  std::vector<LoadPointIndices> lp = {{"A", 1.0, 5.0, 5.0, false}, {"B", 2.0, 3.0, 1.5, false}};
  std::vector<LoadPoint> loads = {{"A", 100.0, 10, 1, "r"}, {"B", 50.0, 30, 2, "r"}};
  const auto s = compute_system_indices(lp, loads);
  EXPECT_NEAR(s.saifi, (10 * 1.0 + 30 * 2.0) / 40.0, 1e-12);
  EXPECT_NEAR(s.saidi, (10 * 5.0 + 30 * 3.0) / 40.0, 1e-12);
  EXPECT_NEAR(s.caidi * s.saifi, s.saidi, 1e-9);
  EXPECT_NEAR(s.ens, 5.0 * 100 + 3.0 * 50, 1e-9);
  EXPECT_NEAR(s.aens * 40, s.ens, 1e-9);
  loads[0].customers = 0;
  loads[1].customers = 0;
  EXPECT_THROW(compute_system_indices(lp, loads), DivisionGuardError);
}

TEST(PRes, MergeAndLookup) {
  PResEstimate a{{"X", "Y"}, {10, 0}, 365};
  const PResEstimate b{{"X", "Y"}, {5, 365}, 365};
  a.merge(b);
  EXPECT_EQ(a.total_days, 730u);
  EXPECT_NEAR(a.p_res("X"), 15.0 / 730.0, 1e-15);
  EXPECT_NEAR(a.p_res(1), 0.5, 1e-15);
  EXPECT_THROW(a.p_res("Z"), std::exception);
}

// --- Simulation ------------------------------------------------------------------

TEST(Simulate, EmptyFleetSuppliesNothing) {
  const auto s = bundled_scenarios().at("case1");
  const auto y = simulate_year(s, 0);
  EXPECT_EQ(y.total_days, 365u);
  for (auto d : y.supplied_days) EXPECT_EQ(d, 0u);
}

TEST(Simulate, RangeEqualsMergedYears) {
  const auto s = bundled_scenarios().at("case3");
  PResEstimate merged = simulate_year(s, 5);
  for (std::uint64_t y = 6; y < 12; ++y) merged.merge(simulate_year(s, y));
  EXPECT_EQ(simulate_years(s, 5, 7), merged);
}

TEST(Simulate, YearIsPureFunctionOfSeedAndIndex) {
  const auto s = bundled_scenarios().at("case3");
  EXPECT_EQ(simulate_year(s, 17), simulate_year(s, 17));
  auto t = s;
  t.seed += 1;
  EXPECT_NE(simulate_year(s, 17), simulate_year(t, 17));
}

TEST(Run, CaseOneConvergesImmediately) {
  const auto r = run(bundled_scenarios().at("case1"));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.years_run, 1u);
  EXPECT_NEAR(r.system.ens, 42381.0, 1.0);
}

TEST(Run, ConvergesBetweenMinAndMax) {
  auto s = bundled_scenarios().at("case3");
  s.simulation.min_years = 300;
  s.simulation.max_years = 5000;
  const auto r = run(s);
  EXPECT_TRUE(r.converged);
  EXPECT_GE(r.years_run, 300u);
  EXPECT_LE(r.years_run, 5000u);
  ASSERT_EQ(r.trace.size(), r.years_run);
  EXPECT_TRUE(std::isinf(r.trace.front().statistic));
  EXPECT_LT(r.trace.back().statistic, s.simulation.tolerance);
}

TEST(Run, ReportsNonConvergenceAtCap) {
  auto s = bundled_scenarios().at("case3");
  s.simulation.min_years = 150;
  s.simulation.max_years = 200;
  s.simulation.tolerance = 1e-15;
  const auto r = run(s);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.years_run, 200u);
}

TEST(Run, WorkerCountDoesNotChangeResult) {
  const auto s = fixed_years(bundled_scenarios().at("case3"), 1200);
  const auto a = run(s, {1, nullptr});
  const auto b = run(s, {3, nullptr});
  const auto c = run(s, {8, nullptr});
  EXPECT_EQ(a.p_res, b.p_res);
  EXPECT_EQ(a.p_res, c.p_res);
  EXPECT_EQ(a.system, c.system);
}

TEST(Run, DiagnosticsGoToGivenStream) {
  std::ostringstream diag;
  run(bundled_scenarios().at("case1"), {1, &diag});
  EXPECT_NE(diag.str().find("converged"), std::string::npos);
}

TEST(Sweep, EndpointsAndAffinity) {
  const auto s = fixed_years(bundled_scenarios().at("sweep"), 300);
  const auto base = run(s);
  const std::vector<double> ps = {0.0, 0.5, 1.0};
  const auto rows = recombine_sweep(s, base.p_res, ps);
  ASSERT_EQ(rows.size(), 3u);
  const auto case1 = run(bundled_scenarios().at("case1"));
  EXPECT_NEAR(rows[0].indices.ens, case1.system.ens, 1e-9);
  EXPECT_NEAR(rows[0].indices.saidi, case1.system.saidi, 1e-12);
  EXPECT_NEAR(rows[2].indices.ens, base.system.ens, 1e-9);
  EXPECT_LT(std::fabs(rows[1].indices.ens - 0.5 * (rows[0].indices.ens + rows[2].indices.ens)), 1e-6 * rows[0].indices.ens);
}

// --- Properties ---------------------------------------------------------------------

TEST(Property, AddingGenerationNeverLowersPRes) {
  const auto full = bundled_scenarios().at("case3");
  auto fewer = full;
  fewer.fleet.pv_arrays.pop_back();  // keeps every remaining unit's streams
  auto wind_only = fewer;
  wind_only.fleet.pv_arrays.clear();
  for (std::uint64_t y = 0; y < 200; ++y) {
    const auto a = simulate_years(wind_only, y, 1);
    const auto b = simulate_years(fewer, y, 1);
    const auto c = simulate_years(full, y, 1);
    for (std::size_t i = 0; i < a.supplied_days.size(); ++i) {
      ASSERT_LE(a.supplied_days[i], b.supplied_days[i]);
      ASSERT_LE(b.supplied_days[i], c.supplied_days[i]);
    }
  }
}

TEST(Property, TopPriorityDominates) {
  for (const char* name : {"case2", "case3"}) {
    auto s = bundled_scenarios().at(name);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      s.seed = seed;
      const auto est = years_range(s, 0, 50);
      const double top = est.p_res("LP9");
      for (const auto& id : est.load_points) EXPECT_GE(top, est.p_res(id)) << name << " " << id;
    }
  }
}

TEST(Property, DisjointHalvesAgree) {
  const auto s = bundled_scenarios().at("case3");
  const auto first = years_range(s, 0, 10000);
  const auto second = years_range(s, 10000, 20000);
  for (std::size_t i = 0; i < first.load_points.size(); ++i) {
    const double p1 = first.p_res(i);
    const double p2 = second.p_res(i);
    const double p = 0.5 * (p1 + p2);
    const double n = static_cast<double>(first.total_days);
    const double se = std::sqrt(p * (1 - p) * 2.0 / n);
    EXPECT_LE(std::fabs(p1 - p2), 3.0 * se + 1e-15) << first.load_points[i];
  }
}

TEST(Property, LowerLoadFactorsNeverRaiseEns) {
  const auto base = fixed_years(bundled_scenarios().at("case3"), 300);
  const double ens3 = run(base).system.ens;
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 3; ++trial) {
    auto s = base;
    s.load_factors.resize(kDaysPerYear);
    double sum = 0.0;
    for (auto& f : s.load_factors) sum += (f = std::uniform_real_distribution<double>(0.4, 1.3)(gen));
    const double target = std::uniform_real_distribution<double>(0.6, 0.99)(gen);
    for (auto& f : s.load_factors) f *= target * kDaysPerYear / sum;
    EXPECT_LE(run(s).system.ens, ens3) << "trial " << trial;
  }
}

TEST(Property, FlatUnitLoadFactorsChangeNothing) {
  const auto s3 = fixed_years(bundled_scenarios().at("case3"), 100);
  const auto s4 = fixed_years(bundled_scenarios().at("case4"), 100);
  EXPECT_EQ(run(s3).p_res, run(s4).p_res);
}

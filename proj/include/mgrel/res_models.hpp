#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgrel/counter_rng.hpp"

namespace mgrel {

inline constexpr std::size_t kDaysPerYear = 365;

// ---------------------------------------------------------------------------
// Distribution parameters
// ---------------------------------------------------------------------------

// Two-parameter Weibull wind-speed model, F(v) = 1 - exp(-(v/c)^k).
struct WeibullParams {
  double scale_c = 0.0;  // m/s
  double shape_k = 0.0;
  std::string region_id;

  void validate() const;
  bool operator==(const WeibullParams&) const = default;
};

// Beta model of irradiance normalized to [0, 1]; samples are mapped back to
// W/m^2 by multiplying with scale_gmax.
struct BetaParams {
  double alpha = 0.0;
  double beta = 0.0;
  double scale_gmax = 1000.0;  // W/m^2

  void validate() const;
  bool operator==(const BetaParams&) const = default;
};

// ---------------------------------------------------------------------------
// Power curves
// ---------------------------------------------------------------------------

struct WindTurbineSpec {
  double p_rated = 0.0;    // kW
  double v_rated = 0.0;    // m/s
  double v_cut_in = 0.0;   // m/s
  double v_cut_out = 0.0;  // m/s
  std::string region_id;

  void validate() const;
  bool operator==(const WindTurbineSpec&) const = default;
};

struct PvArraySpec {
  double p_sn = 0.0;      // kW
  double g_std = 1000.0;  // W/m^2
  double r_c = 150.0;     // W/m^2

  void validate() const;
  bool operator==(const PvArraySpec&) const = default;
};

/// Inverse-transform Weibull sample: c * (-ln u)^(1/k).
/// Throws DomainError unless 0 < u < 1.
double sample_wind_speed(const WeibullParams& params, double u);

/// Piecewise turbine curve: zero outside (v_cut_in, v_cut_out), cubic
/// a*v^3 - b*P_rated up to v_rated, flat P_rated above it.
double wind_power(const WindTurbineSpec& spec, double v);

/// PV curve: quadratic below r_c, linear up to g_std, flat above.
double pv_power(const PvArraySpec& spec, double g);

// ---------------------------------------------------------------------------
// Beta distribution
// ---------------------------------------------------------------------------

inline constexpr double kBetaInverseTolerance = 1e-10;
inline constexpr int kBetaInverseMaxIterations = 200;

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

// Precomputes ln B(a, b) so repeated CDF evaluations and inversions are cheap.
class BetaDistribution {
 public:
  BetaDistribution(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  double cdf(double x) const;
  double pdf(double x) const;

  // x in [0, 1] with |cdf(x) - u| <= tol. Bracketed bisection with Newton
  // refinement; throws NumericalError if `max_iterations` is hit.
  double inverse_cdf(double u, double tol = kBetaInverseTolerance,
                     int max_iterations = kBetaInverseMaxIterations) const;

  // Same contract, starting from a caller-supplied guess x0.
  double inverse_cdf_from(double u, double x0, double tol = kBetaInverseTolerance,
                          int max_iterations = kBetaInverseMaxIterations) const;

 private:
  // Returns I_x(a, b) and writes the density at x into `density`.
  double cdf_with_density(double x, double& density) const;
  double solve_inverse(double u, double x0, double tol, int max_iterations) const;
  static void check_inverse_arguments(double u, double tol);

  double alpha_;
  double beta_;
  double log_beta_fn_;
};

double beta_inverse_cdf(const BetaParams& params, double u, double tol = kBetaInverseTolerance);

/// scale_gmax * beta_inverse_cdf(params, u, tol).
double sample_irradiance(const BetaParams& params, double u, double tol = kBetaInverseTolerance);

// ---------------------------------------------------------------------------
// Fleet
// ---------------------------------------------------------------------------

struct WindUnit {
  std::string id;
  std::string location;
  WindTurbineSpec spec;
  bool operator==(const WindUnit&) const = default;
};

struct PvUnit {
  std::string id;
  std::string location;
  PvArraySpec spec;
  bool operator==(const PvUnit&) const = default;
};

struct Fleet {
  std::vector<WindUnit> turbines;
  std::vector<PvUnit> pv_arrays;

  bool empty() const noexcept { return turbines.empty() && pv_arrays.empty(); }
  double nameplate_kw() const noexcept;
  bool operator==(const Fleet&) const = default;
};

// Whether every PV array sees the same daily irradiance draw or its own.
enum class IrradianceDraw { shared, independent };

struct ResourceParams {
  std::vector<WeibullParams> wind_regions;
  BetaParams irradiance;
  IrradianceDraw irradiance_draw = IrradianceDraw::independent;
  double inverse_tolerance = kBetaInverseTolerance;

  void validate() const;
  bool operator==(const ResourceParams&) const = default;
};

// Fitted parameters for the two study regions.
WeibullParams region1_weibull();
WeibullParams region2_weibull();
BetaParams fitted_irradiance_beta();
ResourceParams default_resource_params();

// Samples a whole fleet for one (year, day). Construction resolves region ids
// and prepares the beta inverter; sampling is const and thread-safe.
class FleetSampler {
 public:
  FleetSampler(const Fleet& fleet, const ResourceParams& params);

  struct UnitSample {
    double resource = 0.0;  // m/s for turbines, W/m^2 for PV
    double power_kw = 0.0;
  };

  // Order of `out`: turbines first, then PV arrays, both in fleet order.
  void sample_day(const CounterRng& rng, std::uint64_t year, std::uint64_t day,
                  std::span<UnitSample> out) const;

  double total_power_kw(const CounterRng& rng, std::uint64_t year, std::uint64_t day) const;

  std::size_t unit_count() const noexcept { return turbines_.size() + pv_.size(); }

 private:
  struct Turbine {
    WindTurbineSpec spec;
    std::size_t region = 0;
  };

  std::vector<WeibullParams> regions_;
  std::vector<Turbine> turbines_;
  std::vector<PvArraySpec> pv_;
  // Starting guess for inversion: linear interpolation on a uniform u grid.
  double quantile_guess(double u) const;

  BetaDistribution beta_;
  std::vector<double> quantile_grid_;
  double scale_gmax_;
  double tolerance_;
  IrradianceDraw draw_;
};

// One emitted day of a resource/power trace.
struct TracePoint {
  std::uint64_t day_index = 0;
  double resource = 0.0;
  double power_kw = 0.0;
};

struct UnitTrace {
  std::string unit_id;
  std::vector<TracePoint> points;
};

/// Per-day resource and power series for every unit of `fleet`, drawn from
/// the same streams the simulator uses (day d lives in year d / 365).
std::vector<UnitTrace> emit_trace(const Fleet& fleet, const ResourceParams& params,
                                  std::size_t n_days, std::uint64_t seed);

}  // namespace mgrel

#include "mgrel/res_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mgrel/errors.hpp"

namespace mgrel {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

constexpr std::size_t kQuantileGridCells = 4096;

}  // namespace

void WeibullParams::validate() const {
  if (!positive_finite(scale_c)) throw DomainError("Weibull scale c must be > 0 (region '" + region_id + "')");
  if (!positive_finite(shape_k)) throw DomainError("Weibull shape k must be > 0 (region '" + region_id + "')");
}

void BetaParams::validate() const {
  if (!positive_finite(alpha)) throw DomainError("beta alpha must be > 0");
  if (!positive_finite(beta)) throw DomainError("beta beta must be > 0");
  if (!positive_finite(scale_gmax)) throw DomainError("irradiance scale_gmax must be > 0");
}

void WindTurbineSpec::validate() const {
  if (!positive_finite(p_rated)) throw DomainError("turbine rated power must be > 0");
  if (!(std::isfinite(v_cut_in) && std::isfinite(v_rated) && std::isfinite(v_cut_out))) {
    throw DomainError("turbine speeds must be finite");
  }
  if (!(v_cut_in > 0.0)) throw DomainError("turbine cut-in speed must be > 0");
  if (!(v_cut_in < v_rated)) throw DomainError("turbine cut-in speed must be below rated speed");
  if (!(v_rated < v_cut_out)) throw DomainError("turbine rated speed must be below cut-out speed");
}

void PvArraySpec::validate() const {
  if (!positive_finite(p_sn)) throw DomainError("PV rated power must be > 0");
  if (!positive_finite(r_c)) throw DomainError("PV radiation breakpoint r_c must be > 0");
  if (!(std::isfinite(g_std) && r_c < g_std)) throw DomainError("PV requires r_c < g_std");
}

void ResourceParams::validate() const {
  for (std::size_t i = 0; i < wind_regions.size(); ++i) {
    wind_regions[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (wind_regions[j].region_id == wind_regions[i].region_id) {
        throw DomainError("duplicate wind region '" + wind_regions[i].region_id + "'");
      }
    }
  }
  irradiance.validate();
  if (!positive_finite(inverse_tolerance)) throw DomainError("inverse tolerance must be > 0");
}

double sample_wind_speed(const WeibullParams& params, double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("Weibull sampling requires 0 < u < 1");
  }
  params.validate();
  return params.scale_c * std::pow(-std::log(u), 1.0 / params.shape_k);
}

double wind_power(const WindTurbineSpec& spec, double v) {
  if (!(v >= 0.0)) throw DomainError("wind speed must be >= 0");
  if (v <= spec.v_cut_in || v >= spec.v_cut_out) return 0.0;
  if (v > spec.v_rated) return spec.p_rated;
  const double cut_in3 = spec.v_cut_in * spec.v_cut_in * spec.v_cut_in;
  const double span3 = spec.v_rated * spec.v_rated * spec.v_rated - cut_in3;
  const double a = spec.p_rated / span3;
  const double b = cut_in3 / span3;
  return std::clamp(a * v * v * v - b * spec.p_rated, 0.0, spec.p_rated);
}

double pv_power(const PvArraySpec& spec, double g) {
  if (!(g >= 0.0)) throw DomainError("irradiance must be >= 0");
  if (g < spec.r_c) return spec.p_sn * g * g / (spec.g_std * spec.r_c);
  if (g <= spec.g_std) return spec.p_sn * g / spec.g_std;
  return spec.p_sn;
}

double Fleet::nameplate_kw() const noexcept {
  double total = 0.0;
  for (const auto& t : turbines) total += t.spec.p_rated;
  for (const auto& p : pv_arrays) total += p.spec.p_sn;
  return total;
}

WeibullParams region1_weibull() { return {7.88, 2.62, "R1"}; }
WeibullParams region2_weibull() { return {8.46, 3.18, "R2"}; }
BetaParams fitted_irradiance_beta() { return {1.03745, 1.38279, 1000.0}; }

ResourceParams default_resource_params() {
  ResourceParams params;
  params.wind_regions = {region1_weibull(), region2_weibull()};
  params.irradiance = fitted_irradiance_beta();
  return params;
}

FleetSampler::FleetSampler(const Fleet& fleet, const ResourceParams& params)
    : regions_(params.wind_regions),
      beta_(params.irradiance.alpha, params.irradiance.beta),
      scale_gmax_(params.irradiance.scale_gmax),
      tolerance_(params.inverse_tolerance),
      draw_(params.irradiance_draw) {
  params.validate();
  turbines_.reserve(fleet.turbines.size());
  for (const auto& unit : fleet.turbines) {
    unit.spec.validate();
    auto it = std::find_if(regions_.begin(), regions_.end(),
                           [&](const WeibullParams& r) { return r.region_id == unit.spec.region_id; });
    if (it == regions_.end()) {
      throw DomainError("turbine '" + unit.id + "' references unknown wind region '" + unit.spec.region_id + "'");
    }
    turbines_.push_back({unit.spec, static_cast<std::size_t>(it - regions_.begin())});
  }
  pv_.reserve(fleet.pv_arrays.size());
  for (const auto& unit : fleet.pv_arrays) {
    unit.spec.validate();
    pv_.push_back(unit.spec);
  }
  if (!pv_.empty()) {
    quantile_grid_.resize(kQuantileGridCells + 1);
    for (std::size_t i = 0; i <= kQuantileGridCells; ++i) {
      quantile_grid_[i] = beta_.inverse_cdf(static_cast<double>(i) / kQuantileGridCells, tolerance_);
    }
  }
}

double FleetSampler::quantile_guess(double u) const {
  const double pos = u * kQuantileGridCells;
  const auto i = std::min(static_cast<std::size_t>(pos), kQuantileGridCells - 1);
  const double w = pos - static_cast<double>(i);
  return quantile_grid_[i] + w * (quantile_grid_[i + 1] - quantile_grid_[i]);
}

void FleetSampler::sample_day(const CounterRng& rng, std::uint64_t year, std::uint64_t day,
                              std::span<UnitSample> out) const {
  if (out.size() != unit_count()) throw DomainError("sample buffer size does not match fleet size");

  // Regions are few; cache each region's speed for the day.
  constexpr std::size_t kCachedRegions = 16;
  std::array<double, kCachedRegions> cache{};
  std::array<bool, kCachedRegions> cached{};

  std::size_t k = 0;
  for (const auto& t : turbines_) {
    double speed = 0.0;
    if (t.region < kCachedRegions && cached[t.region]) {
      speed = cache[t.region];
    } else {
      speed = sample_wind_speed(regions_[t.region], rng.uniform(year, day, wind_stream(t.region)));
      if (t.region < kCachedRegions) {
        cache[t.region] = speed;
        cached[t.region] = true;
      }
    }
    out[k++] = {speed, wind_power(t.spec, speed)};
  }

  double shared_g = 0.0;
  if (draw_ == IrradianceDraw::shared && !pv_.empty()) {
    const double u = rng.uniform(year, day, kSharedIrradianceStream);
    shared_g = scale_gmax_ * beta_.inverse_cdf_from(u, quantile_guess(u), tolerance_);
  }
  for (std::size_t j = 0; j < pv_.size(); ++j) {
    double g = shared_g;
    if (draw_ == IrradianceDraw::independent) {
      const double u = rng.uniform(year, day, irradiance_stream(j));
      g = scale_gmax_ * beta_.inverse_cdf_from(u, quantile_guess(u), tolerance_);
    }
    out[k++] = {g, pv_power(pv_[j], g)};
  }
}

double FleetSampler::total_power_kw(const CounterRng& rng, std::uint64_t year, std::uint64_t day) const {
  constexpr std::size_t kInline = 32;
  std::array<UnitSample, kInline> inline_buf;
  std::vector<UnitSample> heap_buf;
  std::span<UnitSample> buf;
  if (unit_count() <= kInline) {
    buf = std::span<UnitSample>(inline_buf.data(), unit_count());
  } else {
    heap_buf.resize(unit_count());
    buf = heap_buf;
  }
  sample_day(rng, year, day, buf);
  double total = 0.0;
  for (const auto& s : buf) total += s.power_kw;
  return total;
}

std::vector<UnitTrace> emit_trace(const Fleet& fleet, const ResourceParams& params,
                                  std::size_t n_days, std::uint64_t seed) {
  if (n_days < 1) throw DomainError("trace needs at least one day");
  const FleetSampler sampler(fleet, params);
  const CounterRng rng(seed);

  std::vector<UnitTrace> traces;
  for (const auto& t : fleet.turbines) traces.push_back({t.id, {}});
  for (const auto& p : fleet.pv_arrays) traces.push_back({p.id, {}});
  for (auto& tr : traces) tr.points.reserve(n_days);

  std::vector<FleetSampler::UnitSample> day_samples(sampler.unit_count());
  for (std::size_t d = 0; d < n_days; ++d) {
    sampler.sample_day(rng, d / kDaysPerYear, d % kDaysPerYear, day_samples);
    for (std::size_t u = 0; u < traces.size(); ++u) {
      traces[u].points.push_back({d, day_samples[u].resource, day_samples[u].power_kw});
    }
  }
  return traces;
}

}  // namespace mgrel

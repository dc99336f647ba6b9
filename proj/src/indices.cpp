#include <algorithm>
#include <cmath>

#include "mgrel/engine.hpp"
#include "mgrel/errors.hpp"

namespace mgrel {

double PResEstimate::p_res(std::size_t i) const noexcept {
  if (total_days == 0 || i >= supplied_days.size()) return 0.0;
  return static_cast<double>(supplied_days[i]) / static_cast<double>(total_days);
}

double PResEstimate::p_res(std::string_view load_point) const {
  for (std::size_t i = 0; i < load_points.size(); ++i) {
    if (load_points[i] == load_point) return p_res(i);
  }
  throw DomainError("no P_RES estimate for load point '" + std::string(load_point) + "'");
}

PResEstimate& PResEstimate::merge(const PResEstimate& other) {
  if (load_points.empty() && supplied_days.empty()) {
    load_points = other.load_points;
    supplied_days.assign(other.supplied_days.size(), 0);
  }
  if (other.load_points != load_points) throw DomainError("cannot merge P_RES estimates over different load points");
  for (std::size_t i = 0; i < supplied_days.size(); ++i) supplied_days[i] += other.supplied_days[i];
  total_days += other.total_days;
  return *this;
}

std::vector<LoadPointIndices> combine_analytical(const PResEstimate& p_res, const ContributionTable& contributions,
                                                 const UpstreamLink& upstream, double p_islanding) {
  if (!(p_islanding >= 0.0 && p_islanding <= 1.0)) throw DomainError("p_islanding must lie in [0, 1]");

  std::vector<LoadPointIndices> out;
  out.reserve(contributions.rows.size());
  for (const auto& row : contributions.rows) {
    const double p = p_res.p_res(row.load_point);
    const double exposure = 1.0 - p_islanding * p;
    LoadPointIndices idx;
    idx.id = row.load_point;
    idx.lambda = row.sum_lambda + exposure * upstream.failure_rate;
    idx.u = row.sum_lambda_r + exposure * upstream.failure_rate * upstream.repair_time_h;
    if (idx.lambda > 0.0) {
      idx.r = idx.u / idx.lambda;
    } else {
      idx.r = 0.0;
      idx.zero_lambda = true;
    }
    out.push_back(std::move(idx));
  }
  return out;
}

SystemIndices compute_system_indices(std::span<const LoadPointIndices> indices,
                                     std::span<const LoadPoint> load_points) {
  double customers_total = 0.0;
  double lambda_n = 0.0;
  double u_n = 0.0;
  double ens = 0.0;
  for (const auto& idx : indices) {
    auto it = std::find_if(load_points.begin(), load_points.end(),
                           [&](const LoadPoint& lp) { return lp.id == idx.id; });
    if (it == load_points.end()) throw DomainError("indices reference unknown load point '" + idx.id + "'");
    const double n = static_cast<double>(it->customers);
    customers_total += n;
    lambda_n += idx.lambda * n;
    u_n += idx.u * n;
    ens += idx.u * it->level_kw;
  }
  if (customers_total <= 0.0) throw DivisionGuardError("total customer count is zero");

  SystemIndices s;
  s.saifi = lambda_n / customers_total;
  s.saidi = u_n / customers_total;
  if (s.saifi <= 0.0) throw DivisionGuardError("SAIFI is zero; CAIDI is undefined");
  s.caidi = s.saidi / s.saifi;
  s.ens = ens;
  s.aens = ens / customers_total;
  return s;
}

}  // namespace mgrel

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mgrel/errors.hpp"
#include "mgrel/res_models.hpp"

namespace mgrel {

namespace {

constexpr int kContinuedFractionMaxTerms = 300;
constexpr double kContinuedFractionEps = 1e-16;
constexpr double kTiny = 1e-300;

double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double incomplete_beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kContinuedFractionMaxTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kContinuedFractionEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  return BetaDistribution(a, b).cdf(x);
}

BetaDistribution::BetaDistribution(double alpha, double beta)
    : alpha_(alpha), beta_(beta), log_beta_fn_(0.0) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw DomainError("beta distribution requires alpha > 0 and beta > 0");
  }
  log_beta_fn_ = log_beta_function(alpha, beta);
}

double BetaDistribution::cdf_with_density(double x, double& density) const {
  if (x <= 0.0) {
    density = alpha_ < 1.0 ? std::numeric_limits<double>::infinity() : (alpha_ == 1.0 ? std::exp(-log_beta_fn_) : 0.0);
    return 0.0;
  }
  if (x >= 1.0) {
    density = beta_ < 1.0 ? std::numeric_limits<double>::infinity() : (beta_ == 1.0 ? std::exp(-log_beta_fn_) : 0.0);
    return 1.0;
  }
  const double log_x = std::log(x);
  const double log_1mx = std::log1p(-x);
  const double front = std::exp(alpha_ * log_x + beta_ * log_1mx - log_beta_fn_);
  density = front / (x * (1.0 - x));
  if (x < (alpha_ + 1.0) / (alpha_ + beta_ + 2.0)) {
    return front * incomplete_beta_fraction(alpha_, beta_, x) / alpha_;
  }
  return 1.0 - front * incomplete_beta_fraction(beta_, alpha_, 1.0 - x) / beta_;
}

double BetaDistribution::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("beta cdf evaluated at NaN");
  double density = 0.0;
  return cdf_with_density(x, density);
}

double BetaDistribution::pdf(double x) const {
  if (std::isnan(x)) throw DomainError("beta pdf evaluated at NaN");
  double density = 0.0;
  cdf_with_density(x, density);
  return density;
}

double BetaDistribution::inverse_cdf(double u, double tol, int max_iterations) const {
  check_inverse_arguments(u, tol);
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;

  // Tail expansions I_x ~ x^a / (a B) and 1 - I_x ~ (1-x)^b / (b B) give a
  // starting point that is already close on most of the interval.
  const double from_left = std::exp((std::log(u) + std::log(alpha_) + log_beta_fn_) / alpha_);
  const double from_right = -std::expm1((std::log1p(-u) + std::log(beta_) + log_beta_fn_) / beta_);
  return solve_inverse(u, u < 0.5 ? from_left : from_right, tol, max_iterations);
}

double BetaDistribution::inverse_cdf_from(double u, double x0, double tol, int max_iterations) const {
  check_inverse_arguments(u, tol);
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  return solve_inverse(u, x0, tol, max_iterations);
}

void BetaDistribution::check_inverse_arguments(double u, double tol) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("beta inverse CDF requires 0 <= u <= 1");
  }
  if (!(tol > 0.0)) throw DomainError("beta inverse CDF requires tol > 0");
}

// Halley steps kept inside a shrinking bracket; bisection when a step leaves it.
double BetaDistribution::solve_inverse(double u, double x, double tol, int max_iterations) const {
  double lo = 0.0;
  double hi = 1.0;
  if (!(x > lo && x < hi)) x = 0.5;

  double residual = std::numeric_limits<double>::infinity();
  for (int iteration = 0; iteration < max_iterations; ++iteration) {
    double density = 0.0;
    const double f = cdf_with_density(x, density) - u;
    residual = std::fabs(f);
    if (residual <= tol) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double newton = f / density;
    // p'/p for the beta density
    const double curvature = (alpha_ - 1.0) / x - (beta_ - 1.0) / (1.0 - x);
    const double denom = 1.0 - 0.5 * newton * curvature;
    double next = denom > 0.5 ? x - newton / denom : x - newton;
    if (!std::isfinite(next) || !(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (next == x) break;
    x = next;
  }

  std::ostringstream msg;
  msg << "beta inverse CDF did not converge for u=" << u << " (alpha=" << alpha_
      << ", beta=" << beta_ << "), residual " << residual;
  throw NumericalError(msg.str(), residual);
}

double beta_inverse_cdf(const BetaParams& params, double u, double tol) {
  params.validate();
  return BetaDistribution(params.alpha, params.beta).inverse_cdf(u, tol);
}

double sample_irradiance(const BetaParams& params, double u, double tol) {
  return params.scale_gmax * beta_inverse_cdf(params, u, tol);
}

}  // namespace mgrel

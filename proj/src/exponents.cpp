#include "levelset/exponents.hpp"

#include "levelset/errors.hpp"

#include <cmath>
#include <string>

namespace levelset {

void validate(const ProblemParams &params) {
  const double n = params.n;
  if (params.n < 2)
    throw DomainError("dimension n must be at least 2");
  if (!(params.p > 1.0 && params.p < n))
    throw DomainError("growth exponent p must satisfy 1 < p < n");
  const double alpha_pprime = params.alpha * params.p / (params.p - 1.0);
  if (!(params.alpha > 0.0 && alpha_pprime < 1.0))
    throw DomainError("singularity exponent alpha must satisfy 0 < alpha < 1/p'");
  if (!(params.r > 1.0) || !std::isfinite(params.r))
    throw DomainError("source exponent r must satisfy r > 1");
  if (!(params.beta1 > 0.0) || !std::isfinite(params.beta1))
    throw DomainError("beta1 must be positive");
  if (!(params.b_const > 0.0) || !std::isfinite(params.b_const))
    throw DomainError("b_const must be positive");
}

std::string_view to_string(Regime regime) {
  switch (regime) {
  case Regime::BelowRange:
    return "BelowRange";
  case Regime::GradientMarcinkiewicz:
    return "GradientMarcinkiewicz";
  case Regime::SobolevW1p:
    return "SobolevW1p";
  case Regime::ExponentialIntegrability:
    return "ExponentialIntegrability";
  case Regime::Bounded:
    return "Bounded";
  }
  return "Unknown";
}

double sobolev_conjugate(double t, double n) {
  if (!(t >= 1.0 && t < n))
    throw DomainError("Sobolev conjugate requires 1 <= t < n, got t=" + std::to_string(t) +
                      ", n=" + std::to_string(n));
  return n * t / (n - t);
}

double holder_conjugate(double t) {
  if (!(t > 1.0))
    throw DomainError("Hoelder conjugate requires t > 1, got " + std::to_string(t));
  return t / (t - 1.0);
}

ExponentSet compute_exponents(const ProblemParams &params) {
  validate(params);
  const double n = params.n;
  const double p = params.p;
  const double alpha = params.alpha;
  const double r = params.r;
  const double ap = alpha * p;
  if (!(n - ap > 0.0))
    throw DomainError("n - alpha p must be positive");

  ExponentSet e;
  e.q = n * p * (1.0 - alpha) / (n - ap);
  e.q_star = sobolev_conjugate(e.q, n);
  e.p_star = sobolev_conjugate(p, n);
  e.r_low = holder_conjugate(e.p_star * (1.0 - alpha));
  e.r_mid = holder_conjugate(e.p_star / (1.0 + ap));
  e.r_high = n / p;

  const double q = e.q;
  const double qs = e.q_star;
  const double tail = q / n - q / r;
  e.hyp.A = ap * qs / (p - 1.0);
  e.hyp.B = (p - 1.0 + tail) * qs / (q * (p - 1.0));
  e.hyp.C = (q - 1.0 + tail) * qs / (q * (p * (1.0 - alpha) - 1.0));
  e.hyp.D = qs;

  const double numerator = n * r * (p * (1.0 - alpha) - 1.0);
  const double tol = kThresholdTolerance;
  if (r > e.r_low + tol && r < e.r_high - tol)
    e.s = numerator / (n - r * p);
  if (r > e.r_low + tol && r <= e.r_mid + tol)
    e.rho = numerator / (n - r * (1.0 + ap));
  return e;
}

Regime classify_regime(const ProblemParams &params) {
  const ExponentSet e = compute_exponents(params);
  const double r = params.r;
  const double tol = kThresholdTolerance;
  if (std::abs(r - e.r_high) <= tol)
    return Regime::ExponentialIntegrability;
  if (r > e.r_high)
    return Regime::Bounded;
  if (r <= e.r_low + tol)
    return Regime::BelowRange;
  if (r <= e.r_mid + tol)
    return Regime::GradientMarcinkiewicz;
  return Regime::SobolevW1p;
}

} // namespace levelset

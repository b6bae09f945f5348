#ifndef LEVELSET_EXPONENTS_HPP
#define LEVELSET_EXPONENTS_HPP

#include <optional>
#include <string_view>

namespace levelset {

/// Parameters of the functional
///   J(v) = int a(x,v) |grad v|^p - int f v,   a(x,s) = beta1 / (b + |s|)^(alpha p)
/// with the source f taken in the Marcinkiewicz space M^r.
struct ProblemParams {
  int n = 4;
  double p = 2.0;
  double alpha = 0.25;
  double r = 2.0;
  double beta1 = 1.0;
  double b_const = 1.0;
};

/// Throws DomainError unless 1 < p < n, 0 < alpha p' < 1, r > 1 and the
/// coefficient constants are positive.
void validate(const ProblemParams &params);

/// Exponents (A, B, C, D) of a level-set decay inequality.
struct DecayExponents {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
};

struct ExponentSet {
  double q = 0.0;      ///< relaxed energy exponent np(1-alpha)/(n-alpha p)
  double q_star = 0.0; ///< Sobolev conjugate of q
  double p_star = 0.0; ///< Sobolev conjugate of p
  double r_low = 0.0;  ///< (p*(1-alpha))'
  double r_mid = 0.0;  ///< (p*/(1+alpha p))'
  double r_high = 0.0; ///< n/p
  std::optional<double> s;   ///< M^s exponent of u, for r_low < r < r_high
  std::optional<double> rho; ///< M^rho exponent of |grad u|, for r_low < r <= r_mid
  DecayExponents hyp;
};

enum class Regime {
  BelowRange,
  GradientMarcinkiewicz,
  SobolevW1p,
  ExponentialIntegrability,
  Bounded,
};

std::string_view to_string(Regime regime);

/// Absolute tolerance used when comparing r against the regime thresholds.
inline constexpr double kThresholdTolerance = 1e-12;

/// nt/(n-t); requires 1 <= t < n.
double sobolev_conjugate(double t, double n);

/// t/(t-1); requires t > 1.
double holder_conjugate(double t);

ExponentSet compute_exponents(const ProblemParams &params);

Regime classify_regime(const ProblemParams &params);

} // namespace levelset

#endif // LEVELSET_EXPONENTS_HPP

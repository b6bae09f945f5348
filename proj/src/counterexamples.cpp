#include "levelset/counterexamples.hpp"

#include "levelset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace levelset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSweepPointsPerDecade = 64;

} // namespace

double NamedPsi::operator()(double k) const { return std::exp(log_eval(k)); }

double log_psi_log_square(double k) {
  if (!(k >= 1.0))
    throw DomainError("log-square psi is defined for k >= 1");
  const double lk = std::log(k);
  return -lk * lk;
}

double psi_log_square(double k) { return std::exp(log_psi_log_square(k)); }

double exp_power_exponent(double c_exp) {
  if (!(c_exp > 1.0))
    throw DomainError("exp-power psi requires C > 1");
  return std::log2(2.0 * c_exp);
}

double log_psi_exp_power(double k, double c_exp) {
  const double p = exp_power_exponent(c_exp);
  if (!(k >= 1.0))
    throw DomainError("exp-power psi is defined for k >= 1");
  return -std::pow(k, p);
}

double psi_exp_power(double k, double c_exp) { return std::exp(log_psi_exp_power(k, c_exp)); }

NamedPsi log_square_psi() {
  return NamedPsi{"log_square", 1.0, 0.0, [](double k) { return log_psi_log_square(k); }};
}

NamedPsi exp_power_psi(double c_exp) {
  exp_power_exponent(c_exp);
  return NamedPsi{"exp_power", 1.0, c_exp,
                  [c_exp](double k) { return log_psi_exp_power(k, c_exp); }};
}

double log_square_doubling_constant() { return std::exp2(-std::numbers::ln2); }

double log_square_doubling_constant_alt() { return 1.0 / (2.0 * std::numbers::ln2); }

double k0_for_exp_power(double d_exp, double c_exp) {
  if (!(d_exp > 0.0))
    throw DomainError("k0 search requires D > 0");
  const double p = exp_power_exponent(c_exp);
  // exp(-C k^p) <= k^{-D}  <=>  g(k) = C k^p - D ln k >= 0. g decreases up to
  // k_min = (D/(C p))^{1/p} and increases afterwards.
  const auto g = [&](double k) { return c_exp * std::pow(k, p) - d_exp * std::log(k); };
  const double k_min = std::pow(d_exp / (c_exp * p), 1.0 / p);
  if (k_min <= 1.0 || g(k_min) >= 0.0)
    return 1.0;

  double lo = k_min;
  double hi = 2.0 * k_min;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-9 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? hi : lo) = mid;
  }
  return hi;
}

double equivalence_constant(double c2, double d_exp, double c_bar, double b_exp) {
  if (!(c2 > 0.0 && d_exp > 0.0 && c_bar > 0.0 && b_exp > 0.0 && b_exp < 1.0))
    throw DomainError("equivalence constant needs positive arguments and B < 1");
  return std::max(std::pow(4.0, d_exp) * c2, std::pow(c_bar, 1.0 - b_exp));
}

std::optional<ViolationCertificate>
find_envelope_violation(const NamedPsi &psi, const DecayHypothesis &hyp,
                        const EnvelopeConstants &constants, double psi_at_k0, double k_max) {
  validate(hyp);
  switch (constants.case_class.tag) {
  case DecayCase::ExponentialDecay: {
    const double tau = constants.tau.value();
    const double theta = (hyp.D - hyp.A) / hyp.D;
    const double log_psi0 = psi_at_k0 > 0.0 ? std::log(psi_at_k0) : -kInf;
    double start = std::max(hyp.k0, psi.k0);
    if (start <= 0.0)
      start = 1.0;
    const double step = std::pow(10.0, 1.0 / kSweepPointsPerDecade);
    for (int j = 0;; ++j) {
      const double k = start * std::pow(step, j);
      if (k > k_max)
        break;
      const double log_env = log_psi0 + 1.0 - std::pow((k - hyp.k0) / tau, theta);
      const double log_value = psi.log(k);
      if (log_value > log_env)
        return ViolationCertificate{k, log_value, std::exp(log_value), std::exp(log_env)};
    }
    return std::nullopt;
  }
  case DecayCase::Vanishing: {
    const double level = 2.0 * constants.L.value();
    const double log_value = psi.log(level);
    if (log_value == -kInf)
      return std::nullopt;
    return ViolationCertificate{level, log_value, std::exp(log_value), 0.0};
  }
  default:
    throw WrongCaseError("violation search needs an ExponentialDecay or Vanishing hypothesis");
  }
}

std::optional<ViolationCertificate> find_envelope_violation(const NamedPsi &psi,
                                                            const DecayHypothesis &hyp,
                                                            double psi_at_k0, double k_max) {
  const CaseClass cc = classify(hyp);
  if (cc.tag != DecayCase::ExponentialDecay && cc.tag != DecayCase::Vanishing)
    throw WrongCaseError("violation search needs an ExponentialDecay or Vanishing hypothesis");
  return find_envelope_violation(psi, hyp, envelope_constants(hyp, psi_at_k0), psi_at_k0,
                                 k_max);
}

std::vector<double> dyadic_levels(double start, int count) {
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int j = 0; j < count; ++j)
    levels.push_back(std::ldexp(start, j));
  return levels;
}

HypothesisReport check_doubling(const NamedPsi &psi, const DecayHypothesis &hyp,
                                std::span<const double> levels) {
  std::vector<LevelPair> pairs;
  pairs.reserve(levels.size());
  for (double k : levels)
    pairs.push_back({2.0 * k, k});
  return check_hypothesis(psi.log_eval, hyp, pairs);
}

PsiTable tabulate(const NamedPsi &psi, std::span<const double> knots) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(knots.size()));
  Eigen::VectorXd v(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) {
    k[i] = knots[static_cast<std::size_t>(i)];
    v[i] = psi(k[i]);
  }
  return PsiTable(std::move(k), std::move(v), psi.k0);
}

} // namespace levelset

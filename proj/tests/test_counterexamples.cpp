#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "levelset/counterexamples.hpp"
#include "levelset/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace levelset;
using doctest::Approx;

namespace {

constexpr double kLn2 = std::numbers::ln2;

bool within_ulps(double a, double b, int ulps) {
  return std::abs(a - b) <= ulps * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
}

PsiTable table_from(const std::vector<double> &k, const std::vector<double> &v, double k0) {
  return PsiTable(Eigen::Map<const Eigen::VectorXd>(k.data(), static_cast<Eigen::Index>(k.size())),
                  Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
                  k0);
}

} // namespace

TEST_CASE("log-square function") {
  CHECK(psi_log_square(1.0) == 1.0);
  CHECK(psi_log_square(std::numbers::e) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(within_ulps(psi_log_square(2.0) * std::pow(8.0, -kLn2), psi_log_square(4.0), 4));
  CHECK_THROWS_AS(psi_log_square(0.5), DomainError);
  for (double k = 1.0; k < 1e6; k *= 1.7)
    CHECK(log_psi_log_square(2.0 * k) ==
          Approx(log_psi_log_square(k) - kLn2 * std::log(2.0 * k * k)).epsilon(1e-13));
}

TEST_CASE("exp-power function") {
  CHECK(exp_power_exponent(2.0) == 2.0);
  CHECK(psi_exp_power(1.0, 2.0) == Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(psi_exp_power(2.0, 2.0) == Approx(std::pow(psi_exp_power(1.0, 2.0), 4.0)).epsilon(1e-14));
  double prev = 0.0;
  for (double k = 1.0; k < 20.0; k += 0.5) {
    const double v = log_psi_exp_power(k, 3.0);
    CHECK(v < prev);
    prev = v;
    // psi(2k) = psi(k)^{2C}
    CHECK(log_psi_exp_power(2.0 * k, 3.0) == Approx(6.0 * log_psi_exp_power(k, 3.0)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(psi_exp_power(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(psi_exp_power(0.5, 2.0), DomainError);
}

TEST_CASE("k0 for the exp-power family") {
  CHECK(k0_for_exp_power(2.0, 2.0) == 1.0);
  CHECK(k0_for_exp_power(1e-9, 2.0) == 1.0);

  const double k0 = k0_for_exp_power(100.0, 2.0);
  CHECK(k0 > 1.0);
  // defining inequality holds from k0 on and fails just below it
  for (int i = 0; i <= 1000; ++i) {
    const double k = k0 * (1.0 + 9.0 * i / 1000.0);
    CHECK(2.0 * k * k >= 100.0 * std::log(k));
  }
  const double below = k0 - 1e-6;
  CHECK(2.0 * below * below < 100.0 * std::log(below));
}

TEST_CASE("doubling soundness in case ii") {
  const std::vector<double> levels = dyadic_levels(1.0, 41);
  for (double A : {0.1, 0.7, 1.0, 1.3}) {
    const DecayHypothesis h{log_square_doubling_constant(), A, 1.0, 1.0, 2.0 * kLn2, 1.0};
    const HypothesisReport rep = check_doubling(log_square_psi(), h, levels);
    CHECK(rep.pairs_checked == 41);
    CHECK(rep.max_ratio <= 1.0);
    DecayHypothesis alt = h;
    alt.c1 = log_square_doubling_constant_alt();
    CHECK(check_doubling(log_square_psi(), alt, levels).holds());
  }
}

TEST_CASE("doubling soundness in case iii") {
  const double k0 = k0_for_exp_power(2.0, 2.0);
  const DecayHypothesis h{1.0, 1.0, 3.0, 2.0, 2.0, k0};
  std::vector<double> levels;
  for (int i = 0; i <= 400; ++i)
    levels.push_back(k0 * std::pow(1.05, i));
  const HypothesisReport rep = check_doubling(exp_power_psi(2.0), h, levels);
  CHECK(rep.holds());
  CHECK(rep.pairs_checked == levels.size());
}

TEST_CASE("envelope violations certify the failure of the full inequality") {
  const DecayHypothesis h{log_square_doubling_constant(), 1.0, 1.0, 1.0, 2.0 * kLn2, 1.0};
  const auto from_formula = find_envelope_violation(log_square_psi(), h, 1.0, 1e60);
  REQUIRE(from_formula.has_value());
  CHECK(std::isfinite(from_formula->level));
  CHECK(from_formula->log_psi > std::log(from_formula->envelope));

  for (double tau : {1.0, 10.0, 100.0}) {
    EnvelopeConstants c;
    c.case_class.tag = DecayCase::ExponentialDecay;
    c.tau = tau;
    const auto v = find_envelope_violation(log_square_psi(), h, c, 1.0, 1e60);
    REQUIRE(v.has_value());
    // independent recheck of the certificate
    const double k = v->level;
    const double theta = (h.D - h.A) / h.D;
    CHECK(-std::log(k) * std::log(k) > 1.0 - std::pow((k - 1.0) / tau, theta));
  }

  const DecayHypothesis vanish{1.0, 1.0, 3.0, 2.0, 2.0, 1.0};
  const double psi0 = psi_exp_power(1.0, 2.0);
  const auto cert = find_envelope_violation(exp_power_psi(2.0), vanish, psi0, 1e6);
  REQUIRE(cert.has_value());
  const double L = *vanishing_level(vanish, psi0).L;
  CHECK(cert->level == 2.0 * L);
  CHECK(cert->log_psi == Approx(-std::pow(2.0 * L, 2.0)));
  CHECK(std::isfinite(cert->log_psi));

  NamedPsi zero{"zero", 1.0, 0.0, [](double) { return -std::numeric_limits<double>::infinity(); }};
  CHECK_FALSE(find_envelope_violation(zero, vanish, 0.0, 1e6).has_value());
  CHECK_FALSE(find_envelope_violation(zero, h, 0.0, 1e6).has_value());

  const DecayHypothesis power{1.0, 2.0, 0.75, 0.5, 4.0, 1.0};
  CHECK_THROWS_AS(find_envelope_violation(log_square_psi(), power, 1.0, 1e6), WrongCaseError);
}

TEST_CASE("equivalence constant") {
  CHECK(equivalence_constant(1.0, 2.0, 1.0, 0.5) == 16.0);
  CHECK(equivalence_constant(1e-300, 2.0, 9.0, 0.5) == Approx(3.0));
  CHECK_THROWS_AS(equivalence_constant(1.0, 2.0, 1.0, 1.0), DomainError);
}

TEST_CASE("doubling plus power envelope recovers the full inequality") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DecayHypothesis shape{1.0, 2.0, 0.75, 0.5, 4.0, 0.5};
  for (int trial = 0; trial < 10; ++trial) {
    const double V = 0.5 + 5.0 * unit(rng);
    const double K = 1.0 + 100.0 * unit(rng);
    std::vector<double> k;
    std::vector<double> v;
    for (int j = 0; j < 20; ++j) {
      k.push_back(std::ldexp(0.5, j));
      v.push_back(std::min(V, K * std::pow(k.back(), -8.0)));
    }
    const PsiTable t = table_from(k, v, shape.k0);

    DecayHypothesis unit_c = shape;
    const double c2 = check_hypothesis(t, unit_c, Doubling{}).max_ratio * (1.0 + 1e-12);
    DecayHypothesis doubling = shape;
    doubling.c1 = c2;
    REQUIRE(check_hypothesis(t, doubling, Doubling{}).holds());

    // psi <= K k^{-8} everywhere, so K is an admissible envelope constant
    DecayHypothesis full = shape;
    full.c1 = equivalence_constant(c2, shape.D, K, shape.B);
    CHECK(check_hypothesis(t, full, AllKnotPairs{}).holds());
  }
}

TEST_CASE("the full inequality implies the doubling one") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const DecayHypothesis shape{1.0, 1.0, 0.9, 0.6, 3.0, 0.25};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> k;
    std::vector<double> v;
    double value = 1.0 + unit(rng);
    for (int j = 0; j < 16; ++j) {
      k.push_back(std::ldexp(0.25, j));
      v.push_back(value);
      value *= unit(rng);
    }
    const PsiTable t = table_from(k, v, shape.k0);
    DecayHypothesis h = shape;
    h.c1 = check_hypothesis(t, shape, AllKnotPairs{}).max_ratio * (1.0 + 1e-12);
    REQUIRE(check_hypothesis(t, h, AllKnotPairs{}).holds());
    CHECK(check_hypothesis(t, h, Doubling{}).holds());
  }
}

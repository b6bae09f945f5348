#include "levelset/lemma.hpp"

#include "levelset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace levelset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(double v) { return std::isfinite(v); }

// log(exp(a) + exp(b)) with -inf handled.
double log_add(double a, double b) {
  if (a == -kInf)
    return b;
  if (b == -kInf)
    return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void require_case(const DecayHypothesis &hyp, DecayCase expected, double tol) {
  const CaseClass cc = classify(hyp, tol);
  if (cc.tag != expected)
    throw WrongCaseError("hypothesis classifies as " + std::string(to_string(cc.tag)) +
                         ", expected " + std::string(to_string(expected)));
}

double log_psi_table(const PsiTable &table, double k) {
  const double v = table(k);
  return v > 0.0 ? std::log(v) : -kInf;
}

} // namespace

void validate(const DecayHypothesis &hyp) {
  for (double v : {hyp.c1, hyp.A, hyp.B, hyp.C, hyp.D, hyp.k0})
    if (!finite(v))
      throw DomainError("decay hypothesis fields must be finite");
  if (!(hyp.c1 > 0.0 && hyp.A > 0.0 && hyp.B > 0.0 && hyp.C > 0.0 && hyp.D > 0.0))
    throw DomainError("decay hypothesis constants c1, A, B, C, D must be positive");
  if (!(hyp.A < hyp.D))
    throw DomainError("decay hypothesis requires A < D");
  if (!(hyp.k0 >= 0.0))
    throw DomainError("decay hypothesis requires k0 >= 0");
}

DecayHypothesis make_hypothesis(const DecayExponents &exponents, double c1, double k0) {
  DecayHypothesis hyp{c1, exponents.A, exponents.B, exponents.C, exponents.D, k0};
  validate(hyp);
  return hyp;
}

std::string_view to_string(DecayCase c) {
  switch (c) {
  case DecayCase::PowerDecay:
    return "PowerDecay";
  case DecayCase::ExponentialDecay:
    return "ExponentialDecay";
  case DecayCase::Vanishing:
    return "Vanishing";
  case DecayCase::Unclassified:
    return "Unclassified";
  }
  return "Unknown";
}

CaseClass classify(const DecayHypothesis &hyp, double tol) {
  validate(hyp);
  if (!(tol > 0.0))
    throw DomainError("classification tolerance must be positive");

  CaseClass cc;
  if (std::abs(hyp.B - 1.0) <= tol && std::abs(hyp.C - 1.0) <= tol) {
    cc.tag = DecayCase::ExponentialDecay;
  } else if (std::min(hyp.B, hyp.C) > 1.0) {
    cc.tag = DecayCase::Vanishing;
  } else if (std::max(hyp.B, hyp.C) < 1.0) {
    cc.balance_residual = (hyp.D - hyp.A) / (1.0 - hyp.B) - hyp.D / (1.0 - hyp.C);
    if (std::abs(cc.balance_residual) <= tol)
      cc.tag = DecayCase::PowerDecay;
  }
  return cc;
}

PsiTable::PsiTable(Eigen::VectorXd knots, Eigen::VectorXd values, double k0)
    : knots_(std::move(knots)), values_(std::move(values)), k0_(k0) {
  if (knots_.size() != values_.size())
    throw std::invalid_argument("psi table: knots and values differ in length");
  if (!(k0_ >= 0.0) || !finite(k0_))
    throw DomainError("psi table: k0 must be finite and nonnegative");
  for (Eigen::Index i = 0; i < knots_.size(); ++i) {
    if (!finite(knots_[i]) || !finite(values_[i]))
      throw DomainError("psi table: entries must be finite");
    if (values_[i] < 0.0)
      throw DomainError("psi table: values must be nonnegative");
    if (i == 0) {
      if (knots_[0] < k0_)
        throw DomainError("psi table: first knot lies below k0");
      continue;
    }
    if (!(knots_[i] > knots_[i - 1]))
      throw DomainError("psi table: knots must be strictly increasing");
    if (values_[i] > values_[i - 1] * (1.0 + 1e-12))
      throw DomainError("psi table: values must be nonincreasing (knot " +
                        std::to_string(knots_[i]) + ")");
  }
}

double PsiTable::operator()(double k) const {
  if (empty() || k < knots_[0])
    throw DomainError("psi table evaluated below its first knot");
  const double *first = knots_.data();
  const double *last = first + knots_.size();
  const auto it = std::upper_bound(first, last, k);
  return values_[(it - first) - 1];
}

EnvelopeConstants power_decay_constants(const DecayHypothesis &hyp, double psi_at_k0,
                                        double tol) {
  require_case(hyp, DecayCase::PowerDecay, tol);
  if (!(psi_at_k0 >= 0.0))
    throw DomainError("psi(k0) must be nonnegative");

  EnvelopeConstants out;
  out.case_class = classify(hyp, tol);
  const double one_minus_b = 1.0 - hyp.B;
  const double lambda = (hyp.D - hyp.A) / one_minus_b;
  const double c1 = std::max(hyp.c1, 1.0);
  const double rho0 = hyp.k0 > 0.0 ? std::pow(hyp.k0, lambda) * psi_at_k0 : 0.0;
  const double log2_m = std::log2(c1) / one_minus_b + (lambda + hyp.A + 1.0) / one_minus_b +
                        hyp.B * std::log2(1.0 + rho0);
  out.lambda = lambda;
  out.M = std::exp2(log2_m);
  out.c_bar = std::exp2(lambda) * *out.M;
  return out;
}

EnvelopeConstants exp_decay_tau(const DecayHypothesis &hyp, double tol) {
  require_case(hyp, DecayCase::ExponentialDecay, tol);
  const double A = hyp.A;
  const double D = hyp.D;
  const double log_inner = std::log(2.0 * hyp.c1) + 1.0 +
                           (2.0 * D - A) * A / (D - A) * std::numbers::ln2 +
                           D * std::log(D - A) - D * std::log(D);
  EnvelopeConstants out;
  out.case_class = classify(hyp, tol);
  out.tau = std::max(hyp.k0 + 1.0, std::exp(log_inner / (D - A)));
  return out;
}

EnvelopeConstants vanishing_level(const DecayHypothesis &hyp, double psi_at_k0) {
  validate(hyp);
  if (!(std::min(hyp.B, hyp.C) > 1.0))
    throw WrongCaseError("vanishing level requires min(B, C) > 1");
  if (!(psi_at_k0 >= 0.0))
    throw DomainError("psi(k0) must be nonnegative");

  // Only x^B + x^C <= 2 x^min for x <= 1 and the matching bound with max
  // for 1 + psi >= 1 are used, so the larger exponent plays B.
  const double big = std::max(hyp.B, hyp.C);
  const double small = std::min(hyp.B, hyp.C);
  const double A = hyp.A;
  const double D = hyp.D;
  const double log2_c1 = std::log2(hyp.c1);
  const double log2_psi = std::log2(1.0 + psi_at_k0);

  const double third = std::exp2((log2_c1 + 1.0 + D + big * log2_psi) / (D - A));
  const double sm1 = small - 1.0;
  const double log2_fourth_inner = small / sm1 * log2_c1 + big * log2_psi + D + 1.0 +
                                   (A + D + 1.0) / sm1 + D / (sm1 * sm1);
  const double fourth = std::exp2(log2_fourth_inner * sm1 / ((D - A) * small));

  EnvelopeConstants out;
  out.case_class.tag = DecayCase::Vanishing;
  out.L = std::max({1.0, 2.0 * hyp.k0, third, fourth});
  return out;
}

EnvelopeConstants envelope_constants(const DecayHypothesis &hyp, double psi_at_k0,
                                     double tol) {
  switch (classify(hyp, tol).tag) {
  case DecayCase::PowerDecay:
    return power_decay_constants(hyp, psi_at_k0, tol);
  case DecayCase::ExponentialDecay:
    return exp_decay_tau(hyp, tol);
  case DecayCase::Vanishing:
    return vanishing_level(hyp, psi_at_k0);
  case DecayCase::Unclassified:
    break;
  }
  throw WrongCaseError("hypothesis does not match any decay case");
}

double envelope(const DecayHypothesis &hyp, const EnvelopeConstants &constants,
                double psi_at_k0, double k) {
  if (!(k >= hyp.k0))
    throw DomainError("envelope evaluated below k0");
  switch (constants.case_class.tag) {
  case DecayCase::PowerDecay:
    if (k == 0.0)
      return kInf;
    return constants.c_bar.value() * std::pow(k, -constants.lambda.value());
  case DecayCase::ExponentialDecay: {
    const double theta = (hyp.D - hyp.A) / hyp.D;
    const double x = (k - hyp.k0) / constants.tau.value();
    return psi_at_k0 * std::exp(1.0 - std::pow(x, theta));
  }
  case DecayCase::Vanishing:
    return k < 2.0 * constants.L.value() ? psi_at_k0 : 0.0;
  case DecayCase::Unclassified:
    break;
  }
  throw WrongCaseError("no envelope for an unclassified hypothesis");
}

double envelope(const DecayHypothesis &hyp, double psi_at_k0, double k, double tol) {
  return envelope(hyp, envelope_constants(hyp, psi_at_k0, tol), psi_at_k0, k);
}

HypothesisReport check_hypothesis(const LogPsi &log_psi, const DecayHypothesis &hyp,
                                  std::span<const LevelPair> pairs) {
  validate(hyp);
  const double log_c1 = std::log(hyp.c1);
  HypothesisReport report;
  for (const LevelPair &pair : pairs) {
    if (!(pair.h > pair.k) || pair.k < hyp.k0)
      throw DomainError("hypothesis pairs need h > k >= k0");
    const double log_lhs = log_psi(pair.h);
    const double log_k = log_psi(pair.k);
    double ratio = 0.0;
    if (log_lhs != -kInf) {
      if (log_k == -kInf) {
        ratio = kInf;
      } else {
        const double log_rhs = log_c1 +
                               log_add(hyp.A * std::log(pair.h) + hyp.B * log_k, hyp.C * log_k) -
                               hyp.D * std::log(pair.h - pair.k);
        ratio = std::exp(log_lhs - log_rhs);
      }
    }
    ++report.pairs_checked;
    if (!report.worst || ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.worst = pair;
    }
    if (ratio > 1.0) {
      ++report.violation_count;
      if (report.violations.size() < kMaxRecordedViolations)
        report.violations.push_back({pair.h, pair.k, ratio});
    }
  }
  return report;
}

HypothesisReport check_hypothesis(const PsiTable &table, const DecayHypothesis &hyp,
                                  const PairStrategy &strategy) {
  if (table.empty())
    throw InsufficientDataError("hypothesis check on an empty psi table");
  validate(hyp);
  const Eigen::VectorXd &k = table.knots();
  const Eigen::Index n = k.size();
  std::vector<LevelPair> pairs;

  if (std::holds_alternative<AllKnotPairs>(strategy)) {
    pairs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (k[i] >= hyp.k0)
          pairs.push_back({k[j], k[i]});
  } else if (std::holds_alternative<Doubling>(strategy)) {
    // pairs whose doubled level leaves the table carry no information
    for (Eigen::Index i = 0; i < n; ++i)
      if (k[i] > 0.0 && k[i] >= hyp.k0 && 2.0 * k[i] <= k[n - 1])
        pairs.push_back({2.0 * k[i], k[i]});
  } else {
    const auto &random = std::get<RandomPairs>(strategy);
    if (n >= 2) {
      std::mt19937_64 rng(random.seed);
      std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
      pairs.reserve(random.count);
      while (pairs.size() < random.count) {
        Eigen::Index a = pick(rng);
        Eigen::Index b = pick(rng);
        if (a == b)
          continue;
        if (a > b)
          std::swap(a, b);
        if (k[a] >= hyp.k0)
          pairs.push_back({k[b], k[a]});
        else if (k[n - 1] < hyp.k0)
          break;
      }
    }
  }
  return check_hypothesis([&table](double level) { return log_psi_table(table, level); }, hyp,
                          pairs);
}

EnvelopeReport check_envelope(const PsiTable &table, const DecayHypothesis &hyp,
                              double psi_at_k0, double tol) {
  if (table.empty())
    throw InsufficientDataError("envelope check on an empty psi table");
  const EnvelopeConstants constants = envelope_constants(hyp, psi_at_k0, tol);
  EnvelopeReport report;
  for (Eigen::Index i = 0; i < table.size(); ++i) {
    const double k = table.knots()[i];
    if (k < hyp.k0)
      continue;
    const double psi = table.values()[i];
    const double env = envelope(hyp, constants, psi_at_k0, k);
    double ratio = 0.0;
    if (psi > 0.0)
      ratio = env > 0.0 ? psi / env : kInf;
    ++report.knots_checked;
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (ratio > 1.0 && !report.first_violation)
      report.first_violation = k;
  }
  return report;
}

double giusti_threshold(double c_bar, double m, double beta) {
  if (!(beta > 1.0 && c_bar > 0.0 && m > 1.0))
    throw DomainError("recursion requires beta > 1, c_bar > 0, m > 1");
  const double bm1 = beta - 1.0;
  return std::pow(c_bar, -1.0 / bm1) * std::pow(m, -1.0 / (bm1 * bm1));
}

GiustiSequence giusti_recursion(double c_bar, double m, double beta, double x0, int steps) {
  if (!(beta > 1.0 && c_bar > 0.0 && m > 1.0))
    throw DomainError("recursion requires beta > 1, c_bar > 0, m > 1");
  if (!(x0 >= 0.0) || !finite(x0))
    throw DomainError("recursion requires a finite x0 >= 0");
  if (steps < 0)
    throw DomainError("recursion step count must be nonnegative");

  GiustiSequence out;
  out.x.assign(static_cast<std::size_t>(steps) + 1, 0.0);
  if (x0 == 0.0) {
    out.premise_holds = true;
    out.bound_holds = true;
    return out;
  }

  // Track z_i = log x_i - log x_0 + i log(m)/(beta-1). Then z_0 = 0 and
  // z_{i+1} = beta z_i + g with g = log c_bar + (beta-1) log x_0 + log(m)/(beta-1),
  // and g <= 0 is exactly the premise. Iterating z instead of x keeps the
  // boundary case x_0 = threshold on the geometric sequence instead of
  // amplifying the rounding of x_0 by beta^i.
  const double bm1 = beta - 1.0;
  const double g = std::log(c_bar) + bm1 * std::log(x0) + std::log(m) / bm1;
  out.premise_holds = g <= 0.0;
  out.bound_holds = true;
  out.x[0] = x0;
  double z = 0.0;
  for (int i = 1; i <= steps; ++i) {
    z = beta * z + g;
    if (z > 0.0)
      out.bound_holds = false;
    out.x[static_cast<std::size_t>(i)] = x0 * std::pow(m, -i / bm1) * std::exp(z);
  }
  return out;
}

std::vector<double> level_sequence(const DecayHypothesis &hyp, const EnvelopeConstants &constants,
                                   int count) {
  if (count < 0)
    throw DomainError("level count must be nonnegative");
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(count));
  switch (constants.case_class.tag) {
  case DecayCase::ExponentialDecay: {
    const double tau = constants.tau.value();
    const double power = hyp.D / (hyp.D - hyp.A);
    for (int s = 0; s < count; ++s)
      levels.push_back(hyp.k0 + tau * std::pow(static_cast<double>(s), power));
    return levels;
  }
  case DecayCase::Vanishing: {
    const double two_l = 2.0 * constants.L.value();
    for (int i = 0; i < count; ++i)
      levels.push_back(two_l * (1.0 - std::exp2(-i - 1)));
    return levels;
  }
  default:
    throw WrongCaseError("level sequences exist only for ExponentialDecay and Vanishing");
  }
}

} // namespace levelset

#ifndef LEVELSET_LEMMA_HPP
#define LEVELSET_LEMMA_HPP

#include "levelset/exponents.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace levelset {

/// Constants of the decay inequality
///   psi(h) <= c1 (h^A psi(k)^B + psi(k)^C) / (h - k)^D,   h > k >= k0.
struct DecayHypothesis {
  double c1 = 1.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double k0 = 0.0;
};

/// Throws DomainError unless all fields are finite, c1, A, B, C, D > 0,
/// A < D and k0 >= 0.
void validate(const DecayHypothesis &hyp);

DecayHypothesis make_hypothesis(const DecayExponents &exponents, double c1, double k0);

enum class DecayCase { PowerDecay, ExponentialDecay, Vanishing, Unclassified };

std::string_view to_string(DecayCase c);

struct CaseClass {
  DecayCase tag = DecayCase::Unclassified;
  /// (D-A)/(1-B) - D/(1-C); meaningful only when max(B,C) < 1.
  double balance_residual = 0.0;
};

inline constexpr double kDefaultCaseTolerance = 1e-9;

CaseClass classify(const DecayHypothesis &hyp, double tol = kDefaultCaseTolerance);

/// A nonincreasing, nonnegative function tabulated on increasing knots.
/// Between knots it is evaluated as a right-continuous step function.
class PsiTable {
public:
  PsiTable() = default;
  PsiTable(Eigen::VectorXd knots, Eigen::VectorXd values, double k0);

  /// Value at the largest knot <= k. Throws DomainError for k below the
  /// first knot.
  double operator()(double k) const;

  const Eigen::VectorXd &knots() const noexcept { return knots_; }
  const Eigen::VectorXd &values() const noexcept { return values_; }
  double k0() const noexcept { return k0_; }
  Eigen::Index size() const noexcept { return knots_.size(); }
  bool empty() const noexcept { return knots_.size() == 0; }

private:
  Eigen::VectorXd knots_;
  Eigen::VectorXd values_;
  double k0_ = 0.0;
};

struct EnvelopeConstants {
  CaseClass case_class;
  std::optional<double> lambda; ///< power exponent (PowerDecay)
  std::optional<double> M;      ///< dyadic bound on k^lambda psi(k) (PowerDecay)
  std::optional<double> c_bar;  ///< 2^lambda M (PowerDecay)
  std::optional<double> tau;    ///< stretched-exponential scale (ExponentialDecay)
  std::optional<double> L;      ///< psi vanishes from 2L on (Vanishing)
};

EnvelopeConstants power_decay_constants(const DecayHypothesis &hyp, double psi_at_k0,
                                        double tol = kDefaultCaseTolerance);
EnvelopeConstants exp_decay_tau(const DecayHypothesis &hyp, double tol = kDefaultCaseTolerance);
EnvelopeConstants vanishing_level(const DecayHypothesis &hyp, double psi_at_k0);

/// Dispatches on classify(); throws WrongCaseError when Unclassified.
EnvelopeConstants envelope_constants(const DecayHypothesis &hyp, double psi_at_k0,
                                     double tol = kDefaultCaseTolerance);

/// Upper bound on psi(k) implied by the hypothesis, for k >= k0.
/// PowerDecay returns +infinity at k = 0.
double envelope(const DecayHypothesis &hyp, const EnvelopeConstants &constants,
                double psi_at_k0, double k);
double envelope(const DecayHypothesis &hyp, double psi_at_k0, double k,
                double tol = kDefaultCaseTolerance);

// ---------------------------------------------------------------------------
// Numerical verification on sampled functions

struct AllKnotPairs {};
/// Only pairs h = 2k.
struct Doubling {};
struct RandomPairs {
  std::size_t count = 1000;
  std::uint64_t seed = 0;
};
using PairStrategy = std::variant<AllKnotPairs, Doubling, RandomPairs>;

struct LevelPair {
  double h = 0.0;
  double k = 0.0;
};

struct PairViolation {
  double h = 0.0;
  double k = 0.0;
  double ratio = 0.0;
};

struct HypothesisReport {
  /// max over pairs of psi(h) / rhs(h, k); <= 1 means the inequality holds
  /// on every sampled pair.
  double max_ratio = 0.0;
  std::optional<LevelPair> worst;
  std::size_t pairs_checked = 0;
  std::size_t violation_count = 0;
  /// The first kMaxRecordedViolations violating pairs, in sampling order.
  std::vector<PairViolation> violations;

  bool holds() const noexcept { return max_ratio <= 1.0; }
};

inline constexpr std::size_t kMaxRecordedViolations = 64;

/// Natural logarithm of psi; -infinity where psi vanishes.
using LogPsi = std::function<double(double)>;

HypothesisReport check_hypothesis(const PsiTable &table, const DecayHypothesis &hyp,
                                  const PairStrategy &strategy);

/// Pair check against an arbitrary log-evaluated psi. Works in log space so
/// values far below the double range still compare correctly.
HypothesisReport check_hypothesis(const LogPsi &log_psi, const DecayHypothesis &hyp,
                                  std::span<const LevelPair> pairs);

struct EnvelopeReport {
  /// max over knots of psi(k) / envelope(k)
  double max_ratio = 0.0;
  std::optional<double> first_violation;
  std::size_t knots_checked = 0;

  bool holds() const noexcept { return max_ratio <= 1.0; }
};

EnvelopeReport check_envelope(const PsiTable &table, const DecayHypothesis &hyp,
                              double psi_at_k0, double tol = kDefaultCaseTolerance);

// ---------------------------------------------------------------------------
// Fast geometric convergence: x_{i+1} = c_bar m^i x_i^beta

struct GiustiSequence {
  std::vector<double> x; ///< x_0 .. x_steps
  bool premise_holds = false;
  /// x_i <= m^{-i/(beta-1)} x_0 for every computed i
  bool bound_holds = false;
};

/// Largest x_0 for which the sequence is guaranteed to decay:
/// c_bar^{-1/(beta-1)} m^{-1/(beta-1)^2}.
double giusti_threshold(double c_bar, double m, double beta);

GiustiSequence giusti_recursion(double c_bar, double m, double beta, double x0, int steps);

/// Level sequences used by the convergence arguments: k0 + tau s^{D/(D-A)}
/// for ExponentialDecay, 2L(1 - 2^{-i-1}) for Vanishing.
std::vector<double> level_sequence(const DecayHypothesis &hyp,
                                   const EnvelopeConstants &constants, int count);

} // namespace levelset

#endif // LEVELSET_LEMMA_HPP

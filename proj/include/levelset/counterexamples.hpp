#ifndef LEVELSET_COUNTEREXAMPLES_HPP
#define LEVELSET_COUNTEREXAMPLES_HPP

#include "levelset/lemma.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levelset {

/// A closed-form nonincreasing psi on [k0, inf), evaluated in log space.
struct NamedPsi {
  std::string name;
  double k0 = 1.0;
  double param = 0.0; ///< C for the exp-power family, unused otherwise
  std::function<double(double)> log_eval;

  double log(double k) const { return log_eval(k); }
  double operator()(double k) const;
};

/// exp(-(ln k)^2) on [1, inf). Satisfies psi(2k) = psi(k) (2k^2)^{-ln 2}.
double psi_log_square(double k);
double log_psi_log_square(double k);

/// exp(-k^p) on [1, inf) with p = log2(2 c_exp), so psi(2k) = psi(k)^{2 c_exp}.
double psi_exp_power(double k, double c_exp);
double log_psi_exp_power(double k, double c_exp);
double exp_power_exponent(double c_exp);

NamedPsi log_square_psi();
NamedPsi exp_power_psi(double c_exp);

/// Doubling constant certified for exp(-(ln k)^2) with D = 2 ln 2:
/// 2^{-ln 2}, the factor produced by the exact doubling identity.
double log_square_doubling_constant();
/// The value 1/(2 ln 2) quoted alongside it; also admissible since it is larger.
double log_square_doubling_constant_alt();

/// Smallest k0 >= 1 (to 1e-9) with exp(-C k^p) <= k^{-D} for every k >= k0.
double k0_for_exp_power(double d_exp, double c_exp);

/// max{4^D c2, c_bar^{1-B}}: the full-inequality constant recovered from a
/// doubling constant c2 and a power-decay envelope constant c_bar.
double equivalence_constant(double c2, double d_exp, double c_bar, double b_exp);

struct ViolationCertificate {
  double level = 0.0;    ///< k* (ExponentialDecay) or 2L (Vanishing)
  double log_psi = 0.0;  ///< ln psi(level), finite whenever psi(level) > 0
  double psi = 0.0;      ///< psi(level); may underflow to 0 even when log_psi is finite
  double envelope = 0.0; ///< the claimed bound at that level
};

/// ExponentialDecay: smallest level on a geometric sweep (64 points per
/// decade) up to k_max with psi above the envelope. Vanishing: 2L with
/// psi(2L), returned when psi(2L) > 0.
std::optional<ViolationCertificate> find_envelope_violation(const NamedPsi &psi,
                                                            const DecayHypothesis &hyp,
                                                            double psi_at_k0, double k_max);
/// Same, with explicitly supplied envelope constants (e.g. a chosen tau).
std::optional<ViolationCertificate>
find_envelope_violation(const NamedPsi &psi, const DecayHypothesis &hyp,
                        const EnvelopeConstants &constants, double psi_at_k0, double k_max);

/// start * 2^j, j = 0 .. count-1
std::vector<double> dyadic_levels(double start, int count);

/// Doubling check (h = 2k) at the given levels, evaluated in closed form.
HypothesisReport check_doubling(const NamedPsi &psi, const DecayHypothesis &hyp,
                                std::span<const double> levels);

PsiTable tabulate(const NamedPsi &psi, std::span<const double> knots);

} // namespace levelset

#endif // LEVELSET_COUNTEREXAMPLES_HPP

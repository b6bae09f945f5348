#ifndef LEVELSET_MARCINKIEWICZ_HPP
#define LEVELSET_MARCINKIEWICZ_HPP

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace levelset {

using MaskX = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Samples of k -> |{|u| >= k}|.
struct DistributionProfile {
  Eigen::VectorXd levels;
  Eigen::VectorXd measures;
  double total_measure = 0.0;
};

/// Measure of the superlevel set at k under the step convention: the
/// measure at the largest sampled level <= k, or total_measure below the
/// first level.
double measure_at(const DistributionProfile &profile, double k);

/// measures[j] = sum of weights[i] over samples with |values[i]| >= levels[j].
DistributionProfile distribution_function(const Eigen::Ref<const Eigen::VectorXd> &values,
                                          const Eigen::Ref<const Eigen::VectorXd> &weights,
                                          const Eigen::Ref<const Eigen::VectorXd> &levels);

struct WeakNormEstimate {
  double r = 0.0;
  double norm_estimate = 0.0; ///< max_k k^r |A_k|, a lower bound on ||f||_{M^r}^r
  double attained_at = 0.0;
};

WeakNormEstimate weak_norm_estimate(const DistributionProfile &profile, double r);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

inline constexpr std::size_t kMinFitPoints = 8;

/// Least squares of ln|A_k| against ln k over levels in [k_min, k_max] with
/// positive measure. The slope estimates -s for u in M^s.
LinearFit tail_exponent_fit(const DistributionProfile &profile, double k_min, double k_max);

/// Least squares of ln|A_k| against k^theta for levels >= k_min with
/// positive measure. A good fit indicates |A_k| ~ exp(-c k^theta).
LinearFit exp_integrability_fit(const DistributionProfile &profile, double theta, double k_min);

struct SummabilityResult {
  std::vector<double> partial_sums; ///< S_K for K = 1 .. k_top
  double last_decade_share = 0.0;   ///< (S_top - S_{top/10}) / S_top
  bool convergent = false;          ///< heuristic: last_decade_share < 1%
};

/// Partial sums of k^{r-1} |A_k|, whose finiteness characterizes g in L^r.
SummabilityResult summability_test(const DistributionProfile &profile, double r, long k_top);

struct IntegralBound {
  double lhs = 0.0; ///< int_E |f|
  double rhs = 0.0; ///< norm_const |E|^{1-1/r}
  double ratio = 0.0;
  bool pass = true;
};

IntegralBound integral_bound_check(const Eigen::Ref<const Eigen::VectorXd> &values,
                                   const Eigen::Ref<const Eigen::VectorXd> &weights,
                                   const Eigen::Ref<const MaskX> &subset, double r,
                                   double norm_const);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// scale |x|^{-n/r}, a canonical member of M^r that is not in L^r.
struct PowerSource {
  Eigen::VectorXd cell_values; ///< exact averages over each radial cell
  int n = 0;
  double r = 0.0;
  double scale = 0.0;

  /// |{f > t}| in the whole space: omega_n scale^r t^{-r}.
  double distribution(double t) const;
  /// The same, capped at the measure of the domain.
  double distribution(double t, double domain_measure) const;
};

/// Cell averages of scale |x|^{-n/r} over the radial shells between
/// consecutive entries of radii (which must start at >= 0 and increase).
PowerSource power_source(const Eigen::Ref<const Eigen::VectorXd> &radii, int n, double r,
                         double scale);

} // namespace levelset

#endif // LEVELSET_MARCINKIEWICZ_HPP

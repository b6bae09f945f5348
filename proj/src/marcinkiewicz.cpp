#include "levelset/marcinkiewicz.hpp"

#include "levelset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace levelset {

namespace {

void require_increasing(const Eigen::Ref<const Eigen::VectorXd> &levels) {
  for (Eigen::Index j = 1; j < levels.size(); ++j)
    if (!(levels[j] > levels[j - 1]))
      throw DomainError("levels must be strictly increasing");
}

LinearFit least_squares(const std::vector<double> &x, const std::vector<double> &y) {
  const std::size_t n = x.size();
  if (n < kMinFitPoints)
    throw InsufficientDataError("fit needs at least " + std::to_string(kMinFitPoints) +
                                " positive-measure points, got " + std::to_string(n));
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw InsufficientDataError("fit abscissae are all equal");
  LinearFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

// b^e - a^e for 0 <= a < b without cancellation when the shell is thin.
double power_difference(double a, double b, double e) {
  if (a == 0.0)
    return std::pow(b, e);
  return std::pow(a, e) * std::expm1(e * std::log1p((b - a) / a));
}

} // namespace

double measure_at(const DistributionProfile &profile, double k) {
  const double *first = profile.levels.data();
  const double *last = first + profile.levels.size();
  const auto it = std::upper_bound(first, last, k);
  if (it == first)
    return profile.total_measure;
  return profile.measures[(it - first) - 1];
}

DistributionProfile distribution_function(const Eigen::Ref<const Eigen::VectorXd> &values,
                                          const Eigen::Ref<const Eigen::VectorXd> &weights,
                                          const Eigen::Ref<const Eigen::VectorXd> &levels) {
  if (values.size() != weights.size())
    throw std::invalid_argument("distribution function: values and weights differ in length");
  if ((weights.array() <= 0.0).any())
    throw DomainError("distribution function: weights must be positive");
  require_increasing(levels);

  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(values[a]) < std::abs(values[b]);
  });

  // tail[i] = total weight of the samples from sorted position i on
  std::vector<double> sorted_abs(static_cast<std::size_t>(n));
  std::vector<double> tail(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const auto u = static_cast<std::size_t>(i);
    sorted_abs[u] = std::abs(values[order[u]]);
    tail[u] = tail[u + 1] + weights[order[u]];
  }

  DistributionProfile profile;
  profile.levels = levels;
  profile.measures.resize(levels.size());
  profile.total_measure = tail[0];
  for (Eigen::Index j = 0; j < levels.size(); ++j) {
    const auto it = std::lower_bound(sorted_abs.begin(), sorted_abs.end(), levels[j]);
    profile.measures[j] = tail[static_cast<std::size_t>(it - sorted_abs.begin())];
  }
  return profile;
}

WeakNormEstimate weak_norm_estimate(const DistributionProfile &profile, double r) {
  if (!(r > 0.0))
    throw DomainError("weak norm exponent must be positive");
  WeakNormEstimate est{r, 0.0, 0.0};
  for (Eigen::Index j = 0; j < profile.levels.size(); ++j) {
    const double v = std::pow(profile.levels[j], r) * profile.measures[j];
    if (v > est.norm_estimate) {
      est.norm_estimate = v;
      est.attained_at = profile.levels[j];
    }
  }
  return est;
}

LinearFit tail_exponent_fit(const DistributionProfile &profile, double k_min, double k_max) {
  std::vector<double> x;
  std::vector<double> y;
  for (Eigen::Index j = 0; j < profile.levels.size(); ++j) {
    const double k = profile.levels[j];
    if (k >= k_min && k <= k_max && k > 0.0 && profile.measures[j] > 0.0) {
      x.push_back(std::log(k));
      y.push_back(std::log(profile.measures[j]));
    }
  }
  return least_squares(x, y);
}

LinearFit exp_integrability_fit(const DistributionProfile &profile, double theta, double k_min) {
  if (!(theta > 0.0 && theta < 1.0))
    throw DomainError("exponential-integrability fit needs 0 < theta < 1");
  std::vector<double> x;
  std::vector<double> y;
  for (Eigen::Index j = 0; j < profile.levels.size(); ++j) {
    const double k = profile.levels[j];
    if (k >= k_min && k >= 0.0 && profile.measures[j] > 0.0) {
      x.push_back(std::pow(k, theta));
      y.push_back(std::log(profile.measures[j]));
    }
  }
  return least_squares(x, y);
}

SummabilityResult summability_test(const DistributionProfile &profile, double r, long k_top) {
  if (!(r >= 1.0))
    throw DomainError("summability test needs r >= 1");
  if (k_top < 10)
    throw DomainError("summability test needs k_top >= 10");
  SummabilityResult out;
  out.partial_sums.reserve(static_cast<std::size_t>(k_top));
  double sum = 0.0;
  for (long k = 1; k <= k_top; ++k) {
    const double kd = static_cast<double>(k);
    sum += std::pow(kd, r - 1.0) * measure_at(profile, kd);
    out.partial_sums.push_back(sum);
  }
  const double s_top = out.partial_sums.back();
  const double s_decade = out.partial_sums[static_cast<std::size_t>(k_top / 10) - 1];
  out.last_decade_share = s_top > 0.0 ? (s_top - s_decade) / s_top : 0.0;
  out.convergent = out.last_decade_share < 0.01;
  return out;
}

IntegralBound integral_bound_check(const Eigen::Ref<const Eigen::VectorXd> &values,
                                   const Eigen::Ref<const Eigen::VectorXd> &weights,
                                   const Eigen::Ref<const MaskX> &subset, double r,
                                   double norm_const) {
  if (values.size() != weights.size() || values.size() != subset.size())
    throw std::invalid_argument("integral bound: inputs differ in length");
  if (!(r > 1.0 && norm_const > 0.0))
    throw DomainError("integral bound needs r > 1 and a positive constant");
  IntegralBound out;
  double measure = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!subset[i])
      continue;
    out.lhs += std::abs(values[i]) * weights[i];
    measure += weights[i];
  }
  out.rhs = norm_const * std::pow(measure, 1.0 - 1.0 / r);
  out.ratio = out.lhs > 0.0 ? out.lhs / out.rhs : 0.0;
  out.pass = out.lhs <= out.rhs;
  return out;
}

double unit_ball_volume(int n) {
  if (n < 1)
    throw DomainError("dimension must be positive");
  const double half = 0.5 * n;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double PowerSource::distribution(double t) const {
  if (!(t > 0.0))
    throw DomainError("distribution level must be positive");
  return unit_ball_volume(n) * std::pow(scale / t, r);
}

double PowerSource::distribution(double t, double domain_measure) const {
  return std::min(distribution(t), domain_measure);
}

PowerSource power_source(const Eigen::Ref<const Eigen::VectorXd> &radii, int n, double r,
                         double scale) {
  if (!(r > 1.0))
    throw DomainError("power source needs r > 1");
  if (!(scale >= 0.0))
    throw DomainError("power source scale must be nonnegative");
  if (n < 1)
    throw DomainError("dimension must be positive");
  if (radii.size() < 2 || radii[0] < 0.0)
    throw DomainError("power source needs at least one radial cell starting at r >= 0");
  require_increasing(radii);

  PowerSource src;
  src.n = n;
  src.r = r;
  src.scale = scale;
  const double dn = n;
  const double e = dn - dn / r; // > 0 since r > 1
  src.cell_values.resize(radii.size() - 1);
  for (Eigen::Index c = 0; c + 1 < radii.size(); ++c) {
    const double a = radii[c];
    const double b = radii[c + 1];
    const double num = power_difference(a, b, e) / e;
    const double den = power_difference(a, b, dn) / dn;
    src.cell_values[c] = scale * num / den;
  }
  return src;
}

} // namespace levelset

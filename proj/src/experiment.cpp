#include "levelset/experiment.hpp"

#include "levelset/errors.hpp"

#include <algorithm>
#include <cmath>

namespace levelset {

Eigen::VectorXd profile_levels(double max_u, int decades, int per_decade) {
  if (!(max_u > 0.0))
    return Eigen::Vector2d(0.0, 1.0);
  const Eigen::VectorXd geo = geometric_levels(max_u, decades, per_decade);
  Eigen::VectorXd levels(geo.size() + 1);
  levels << 0.0, geo;
  return levels;
}

double top_positive_level(const DistributionProfile &profile) {
  double top = 0.0;
  for (Eigen::Index j = 0; j < profile.levels.size(); ++j)
    if (profile.measures[j] > 0.0)
      top = std::max(top, profile.levels[j]);
  return top;
}

ExperimentReport experiment_regularity(const ExperimentConfig &config) {
  ExperimentReport report;
  report.params = config.params;
  report.exponents = compute_exponents(config.params);
  report.regime = classify_regime(config.params);
  report.predicted_s = report.exponents.s;
  report.theta = 1.0 - config.params.alpha * config.params.p / (config.params.p - 1.0);

  for (Eigen::Index cells : config.cells) {
    GridRun run;
    run.cells = cells;
    run.grid = make_radial_grid(config.params.n, config.radius, cells);
    const FunctionalSpec spec =
        make_functional(config.params, run.grid, config.source_scale, config.epsilon);
    run.solve = minimize(run.grid, spec, DiscreteField::zero(run.grid), config.solver);
    report.any_converged = report.any_converged || run.solve.converged;
    run.max_u = run.solve.final_field.max_abs();
    run.profile = level_profile(run.solve.final_field, run.grid,
                                profile_levels(run.max_u, config.level_decades,
                                               config.level_density));
    if (run.max_u > 0.0) {
      const double bottom = run.max_u * std::pow(10.0, -config.level_decades);
      try {
        const double top = top_positive_level(run.profile);
        run.tail_fit = tail_exponent_fit(run.profile, top / 10.0, top);
      } catch (const InsufficientDataError &e) {
        run.fit_note += std::string("tail: ") + e.what() + "; ";
      }
      try {
        if (report.theta > 0.0 && report.theta < 1.0)
          run.exp_fit = exp_integrability_fit(run.profile, report.theta, bottom);
      } catch (const InsufficientDataError &e) {
        run.fit_note += std::string("exp: ") + e.what() + "; ";
      }
    } else {
      run.fit_note = "zero field";
    }
    report.runs.push_back(std::move(run));
  }

  if (report.runs.size() >= 2) {
    const double last = report.runs.back().max_u;
    const double prev = report.runs[report.runs.size() - 2].max_u;
    if (last > 0.0)
      report.stabilization_ratio = std::abs(last - prev) / last;
  }
  return report;
}

} // namespace levelset

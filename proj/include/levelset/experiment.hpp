#ifndef LEVELSET_EXPERIMENT_HPP
#define LEVELSET_EXPERIMENT_HPP

#include "levelset/exponents.hpp"
#include "levelset/marcinkiewicz.hpp"
#include "levelset/variational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace levelset {

struct ExperimentConfig {
  ProblemParams params;
  double radius = 1.0;
  double source_scale = 1.0;
  double epsilon = 1e-6;
  std::vector<Eigen::Index> cells{1024, 2048, 4096};
  SolverTolerances solver;
  int level_decades = 3;
  int level_density = 32; ///< levels per decade
};

struct GridRun {
  Eigen::Index cells = 0;
  RadialGrid grid;
  MinimizeReport solve;
  double max_u = 0.0;
  DistributionProfile profile; ///< level 0 followed by the geometric level grid
  std::optional<LinearFit> tail_fit; ///< over the largest positive-measure decade
  std::optional<LinearFit> exp_fit;  ///< against k^theta over the whole level grid
  std::string fit_note;              ///< why a fit is missing, if it is
};

struct ExperimentReport {
  ProblemParams params;
  ExponentSet exponents;
  Regime regime = Regime::BelowRange;
  std::optional<double> predicted_s;
  double theta = 0.0; ///< 1 - alpha p'
  std::vector<GridRun> runs;
  /// |max_u(finest) - max_u(previous)| / max_u(finest)
  std::optional<double> stabilization_ratio;
  bool any_converged = false;
};

/// Levels used for profiles: 0, then top * 10^{-decades} .. top geometrically.
Eigen::VectorXd profile_levels(double max_u, int decades, int per_decade);

/// Largest level with positive measure, or 0.
double top_positive_level(const DistributionProfile &profile);

/// Minimizes on every grid size with a power-law source in M^r and collects
/// the regularity diagnostics for the regime of r.
ExperimentReport experiment_regularity(const ExperimentConfig &config);

} // namespace levelset

#endif // LEVELSET_EXPERIMENT_HPP

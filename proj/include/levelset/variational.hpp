#ifndef LEVELSET_VARIATIONAL_HPP
#define LEVELSET_VARIATIONAL_HPP

#include "levelset/exponents.hpp"
#include "levelset/lemma.hpp"
#include "levelset/marcinkiewicz.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace levelset {

/// Uniform radial discretization of the ball of radius R in R^n.
struct RadialGrid {
  int n = 0;
  double radius = 0.0;
  Eigen::Index cells = 0;
  Eigen::VectorXd nodes;         ///< 0 = r_0 < ... < r_N = R
  Eigen::VectorXd cell_measures; ///< Lebesgue measure of each spherical shell

  double domain_measure() const { return cell_measures.sum(); }
};

RadialGrid make_radial_grid(int n, double radius, Eigen::Index cells);

/// Nodal values of a radial profile with zero trace at r = R.
class DiscreteField {
public:
  DiscreteField() = default;
  explicit DiscreteField(Eigen::VectorXd nodal_values);

  static DiscreteField zero(const RadialGrid &grid);

  const Eigen::VectorXd &values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }

private:
  Eigen::VectorXd values_;
};

/// Discrete version of  int a(u) j(u') - f u  over the ball, with
/// a(s) = beta1 / (b + |s|)^{alpha p} and j(xi) = (eps^2 + xi^2)^{p/2} - eps^p.
struct FunctionalSpec {
  ProblemParams params;
  Eigen::VectorXd source; ///< cell averages of f
  double epsilon = 1e-6;
  double j_exponent = 2.0;
};

/// Source scale |x|^{-n/r} with exact cell averages on the grid.
FunctionalSpec make_functional(const ProblemParams &params, const RadialGrid &grid,
                               double source_scale, double epsilon = 1e-6);

double assemble_energy(const DiscreteField &field, const RadialGrid &grid,
                       const FunctionalSpec &spec);

/// Exact derivative of assemble_energy with respect to every nodal value;
/// the boundary entry is zero.
Eigen::VectorXd energy_gradient(const DiscreteField &field, const RadialGrid &grid,
                                const FunctionalSpec &spec);

struct SolverTolerances {
  double grad_tol = 1e-9;
  int max_iters = 5000;
  double step_init = 1.0;
  double armijo_factor = 1e-4;
};

struct MinimizeReport {
  DiscreteField final_field;
  std::vector<double> energy_trace; ///< energy before the first step and after each accepted step
  int iterations = 0;
  bool converged = false;
  bool stagnated = false; ///< line search step fell below 1e-14
  double final_gradient_norm = 0.0;
};

/// Preconditioned descent with Armijo backtracking. The search direction
/// solves P d = -g where P assembles the cell Hessians of the energy, each
/// projected to be positive semidefinite; P is tridiagonal and positive
/// definite, so d is always a descent direction. Gradient norms are measured
/// as sqrt(g^T P^{-1} g).
MinimizeReport minimize(const RadialGrid &grid, const FunctionalSpec &spec,
                        const DiscreteField &initial, const SolverTolerances &tolerances);

/// Componentwise clamp to [-k, k].
DiscreteField truncate(const DiscreteField &field, double k);
/// field - truncate(field, k), adjusted by ulps so that truncate + excess
/// reproduces field exactly whenever some double makes that possible.
DiscreteField excess(const DiscreteField &field, double k);

/// |{|u| >= k}| with cell-averaged |u| as the sample value of each shell.
DistributionProfile level_profile(const DiscreteField &field, const RadialGrid &grid,
                                  const Eigen::Ref<const Eigen::VectorXd> &levels);

/// top * 10^{-decades + j/per_decade}, j = 0 .. decades*per_decade.
Eigen::VectorXd geometric_levels(double top, int decades, int per_decade);

struct LevelsetInequalityFit {
  /// Smallest c with |A_h| <= c (|A_k|^B h^A + |A_k|^C) / (h-k)^D on every used pair.
  double c_fit = 0.0;
  std::vector<double> ratios;           ///< per pair; NaN for skipped pairs
  std::vector<std::size_t> skipped;     ///< pairs with |A_k| = 0
};

LevelsetInequalityFit levelset_inequality_check(const DiscreteField &field,
                                                const RadialGrid &grid,
                                                const FunctionalSpec &spec,
                                                std::span<const LevelPair> pairs);

} // namespace levelset

#endif // LEVELSET_VARIATIONAL_HPP

#include "levelset/variational.hpp"

#include "levelset/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace levelset {

namespace {

constexpr double kStepFloor = 1e-14;
constexpr int kExcessSearchUlps = 8;

void check_consistent(const DiscreteField &field, const RadialGrid &grid,
                      const FunctionalSpec &spec) {
  if (field.size() != grid.cells + 1)
    throw std::invalid_argument("field has " + std::to_string(field.size()) +
                                " nodes, grid expects " + std::to_string(grid.cells + 1));
  if (spec.source.size() != grid.cells)
    throw std::invalid_argument("source length does not match the grid");
  if (!(spec.epsilon >= 0.0))
    throw DomainError("smoothing epsilon must be nonnegative");
}

// Integrand pieces of one cell.
struct Coefficient {
  double beta1;
  double b;
  double ap; // alpha p

  double value(double s) const { return beta1 * std::pow(b + std::abs(s), -ap); }
  double derivative(double s) const {
    if (s == 0.0)
      return 0.0;
    return -ap * beta1 * std::copysign(std::pow(b + std::abs(s), -ap - 1.0), s);
  }
};

struct Smoothed {
  double p;
  double eps;

  // (eps^2 + xi^2)^{p/2} - eps^p, free of cancellation for small xi
  double value(double xi) const {
    if (eps == 0.0)
      return std::pow(std::abs(xi), p);
    const double t = xi / eps;
    return std::pow(eps, p) * std::expm1(0.5 * p * std::log1p(t * t));
  }
  double derivative(double xi) const {
    if (xi == 0.0)
      return 0.0;
    return p * xi * std::pow(eps * eps + xi * xi, 0.5 * p - 1.0);
  }
  double second(double xi) const {
    const double s = eps * eps + xi * xi;
    return p * std::pow(s, 0.5 * p - 2.0) * (eps * eps + (p - 1.0) * xi * xi);
  }
};

Coefficient coefficient(const FunctionalSpec &spec) {
  return {spec.params.beta1, spec.params.b_const, spec.params.alpha * spec.params.p};
}

Smoothed smoothed(const FunctionalSpec &spec) { return {spec.j_exponent, spec.epsilon}; }

struct EnergyParts {
  double total = 0.0;
  double magnitude = 0.0; // sum of |cell terms|, sets the rounding floor
};

EnergyParts energy_parts(const Eigen::VectorXd &u, const RadialGrid &grid,
                         const FunctionalSpec &spec) {
  const Coefficient a = coefficient(spec);
  const Smoothed j = smoothed(spec);
  EnergyParts e;
  for (Eigen::Index c = 0; c < grid.cells; ++c) {
    const double h = grid.nodes[c + 1] - grid.nodes[c];
    const double ubar = 0.5 * (u[c] + u[c + 1]);
    const double xi = (u[c + 1] - u[c]) / h;
    const double stiff = grid.cell_measures[c] * a.value(ubar) * j.value(xi);
    const double load = grid.cell_measures[c] * spec.source[c] * ubar;
    e.total += stiff - load;
    e.magnitude += std::abs(stiff) + std::abs(load);
  }
  return e;
}

Eigen::VectorXd gradient_of(const Eigen::VectorXd &u, const RadialGrid &grid,
                            const FunctionalSpec &spec) {
  const Coefficient a = coefficient(spec);
  const Smoothed j = smoothed(spec);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(u.size());
  for (Eigen::Index c = 0; c < grid.cells; ++c) {
    const double m = grid.cell_measures[c];
    const double h = grid.nodes[c + 1] - grid.nodes[c];
    const double ubar = 0.5 * (u[c] + u[c + 1]);
    const double xi = (u[c + 1] - u[c]) / h;
    const double avg = m * (0.5 * a.derivative(ubar) * j.value(xi) - 0.5 * spec.source[c]);
    const double flux = m * a.value(ubar) * j.derivative(xi) / h;
    g[c] += avg - flux;
    g[c + 1] += avg + flux;
  }
  g[grid.cells] = 0.0;
  return g;
}

// Symmetric tridiagonal matrix on the free nodes 0..N-1; node N is held at zero.
struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off; // off[i] couples i and i+1; off[N-1] is unused

  explicit Tridiagonal(Eigen::Index n) : diag(Eigen::VectorXd::Zero(n)), off(Eigen::VectorXd::Zero(n)) {}

  // Thomas algorithm; stable for the symmetric positive definite matrices built here.
  Eigen::VectorXd solve(const Eigen::VectorXd &rhs) const {
    const Eigen::Index n = diag.size();
    Eigen::VectorXd cp(n);
    Eigen::VectorXd dp(n);
    cp[0] = off[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (Eigen::Index i = 1; i < n; ++i) {
      const double denom = diag[i] - off[i - 1] * cp[i - 1];
      cp[i] = off[i] / denom;
      dp[i] = (rhs[i] - off[i - 1] * dp[i - 1]) / denom;
    }
    Eigen::VectorXd x(n);
    x[n - 1] = dp[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i)
      x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
  }
};

double coefficient_second(const Coefficient &a, double s) {
  return a.ap * (a.ap + 1.0) * a.beta1 * std::pow(a.b + std::abs(s), -a.ap - 2.0);
}

// Sum of the cell Hessians in the variables (u_bar, xi), each projected to be
// positive semidefinite by shrinking the mixed term, mapped back to nodal
// values. The xi-xi entry is kept strictly positive so the assembled matrix
// is positive definite with the boundary node removed.
Tridiagonal preconditioner(const Eigen::VectorXd &u, const RadialGrid &grid,
                           const FunctionalSpec &spec) {
  const Coefficient a = coefficient(spec);
  const Smoothed j = smoothed(spec);
  Tridiagonal P(grid.cells);
  for (Eigen::Index c = 0; c < grid.cells; ++c) {
    const double m = grid.cell_measures[c];
    const double h = grid.nodes[c + 1] - grid.nodes[c];
    const double ubar = 0.5 * (u[c] + u[c + 1]);
    const double xi = (u[c + 1] - u[c]) / h;
    double curvature = j.second(xi);
    if (!(curvature > 0.0) || !std::isfinite(curvature))
      curvature = 1.0;
    const double hss = m * coefficient_second(a, ubar) * j.value(xi);
    const double hxx = m * a.value(ubar) * curvature;
    double hsx = m * a.derivative(ubar) * j.derivative(xi);
    const double bound = std::sqrt(hss * hxx);
    hsx = std::clamp(hsx, -bound, bound);
    // d(u_bar)/d(u_c, u_{c+1}) = (1/2, 1/2), d(xi)/d(u_c, u_{c+1}) = (-1/h, 1/h)
    const double h00 = 0.25 * hss - hsx / h + hxx / (h * h);
    const double h11 = 0.25 * hss + hsx / h + hxx / (h * h);
    const double h01 = 0.25 * hss - hxx / (h * h);
    P.diag[c] += h00;
    if (c + 1 < grid.cells) {
      P.diag[c + 1] += h11;
      P.off[c] += h01;
    }
  }
  return P;
}

} // namespace

RadialGrid make_radial_grid(int n, double radius, Eigen::Index cells) {
  if (n < 1)
    throw DomainError("grid dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw DomainError("grid radius must be positive");
  if (cells < 1)
    throw DomainError("grid needs at least one cell");
  RadialGrid grid;
  grid.n = n;
  grid.radius = radius;
  grid.cells = cells;
  grid.nodes = Eigen::VectorXd::LinSpaced(cells + 1, 0.0, radius);
  grid.nodes[cells] = radius;
  const double omega = unit_ball_volume(n);
  grid.cell_measures.resize(cells);
  for (Eigen::Index c = 0; c < cells; ++c) {
    const double a = grid.nodes[c];
    const double b = grid.nodes[c + 1];
    // b^n - a^n = (b - a) sum_{i<n} b^i a^{n-1-i}, no cancellation
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += std::pow(b, i) * std::pow(a, n - 1 - i);
    grid.cell_measures[c] = omega * (b - a) * s;
  }
  return grid;
}

DiscreteField::DiscreteField(Eigen::VectorXd nodal_values) : values_(std::move(nodal_values)) {
  if (values_.size() < 2)
    throw DomainError("a discrete field needs at least two nodes");
  if (values_[values_.size() - 1] != 0.0)
    throw DomainError("a discrete field must vanish at the outer boundary");
}

DiscreteField DiscreteField::zero(const RadialGrid &grid) {
  return DiscreteField(Eigen::VectorXd::Zero(grid.cells + 1));
}

FunctionalSpec make_functional(const ProblemParams &params, const RadialGrid &grid,
                               double source_scale, double epsilon) {
  validate(params);
  if (grid.n != params.n)
    throw std::invalid_argument("grid dimension does not match the problem");
  FunctionalSpec spec;
  spec.params = params;
  spec.epsilon = epsilon;
  spec.j_exponent = params.p;
  spec.source = power_source(grid.nodes, params.n, params.r, source_scale).cell_values;
  return spec;
}

double assemble_energy(const DiscreteField &field, const RadialGrid &grid,
                       const FunctionalSpec &spec) {
  check_consistent(field, grid, spec);
  return energy_parts(field.values(), grid, spec).total;
}

Eigen::VectorXd energy_gradient(const DiscreteField &field, const RadialGrid &grid,
                                const FunctionalSpec &spec) {
  check_consistent(field, grid, spec);
  return gradient_of(field.values(), grid, spec);
}

MinimizeReport minimize(const RadialGrid &grid, const FunctionalSpec &spec,
                        const DiscreteField &initial, const SolverTolerances &tolerances) {
  check_consistent(initial, grid, spec);
  if (!(tolerances.grad_tol > 0.0 && tolerances.max_iters >= 0 && tolerances.step_init > 0.0 &&
        tolerances.armijo_factor > 0.0 && tolerances.armijo_factor < 1.0))
    throw DomainError("invalid solver tolerances");
  if (spec.j_exponent < 2.0 && !(spec.epsilon > 0.0))
    throw DomainError("p < 2 needs a positive smoothing epsilon");

  const Eigen::Index free = grid.cells;
  Eigen::VectorXd u = initial.values();
  EnergyParts energy = energy_parts(u, grid, spec);
  if (!std::isfinite(energy.total))
    throw NonFiniteEnergyError("initial energy is not finite", 0);

  MinimizeReport report;
  report.energy_trace.push_back(energy.total);
  constexpr double kRounding = 64.0 * std::numeric_limits<double>::epsilon();

  for (int it = 0;; ++it) {
    const Eigen::VectorXd g = gradient_of(u, grid, spec);
    if (!g.allFinite())
      throw NonFiniteEnergyError("gradient is not finite", static_cast<std::size_t>(it));
    const Eigen::VectorXd gf = g.head(free);
    const Eigen::VectorXd d = -preconditioner(u, grid, spec).solve(gf);
    const double gnorm2 = std::max(-gf.dot(d), 0.0);
    report.final_gradient_norm = std::sqrt(gnorm2);
    report.iterations = it;
    if (report.final_gradient_norm <= tolerances.grad_tol) {
      report.converged = true;
      break;
    }
    if (it >= tolerances.max_iters)
      break;

    double step = tolerances.step_init;
    bool accepted = false;
    Eigen::VectorXd trial(u.size());
    while (step >= kStepFloor) {
      trial.head(free) = u.head(free) + step * d;
      trial[free] = 0.0;
      const EnergyParts next = energy_parts(trial, grid, spec);
      const double predicted = tolerances.armijo_factor * step * gnorm2;
      const bool armijo = next.total <= energy.total - predicted;
      // Below the rounding floor a sufficient decrease cannot be observed;
      // accept any non-increase there.
      const bool floor = next.total <= energy.total && predicted <= kRounding * energy.magnitude;
      if (std::isfinite(next.total) && (armijo || floor)) {
        u.swap(trial);
        energy = next;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      report.stagnated = true;
      break;
    }
    report.energy_trace.push_back(energy.total);
  }
  report.final_field = DiscreteField(std::move(u));
  return report;
}

DiscreteField truncate(const DiscreteField &field, double k) {
  if (!(k >= 0.0))
    throw DomainError("truncation level must be nonnegative");
  return DiscreteField(field.values().cwiseMax(-k).cwiseMin(k));
}

DiscreteField excess(const DiscreteField &field, double k) {
  const DiscreteField t = truncate(field, k);
  Eigen::VectorXd g = field.values() - t.values();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    // u - T_k(u) may round; look a few ulps either way for a G with T + G == u.
    // For some inputs no such double exists and the rounded difference stays.
    const double u = field.values()[i];
    const double ti = t.values()[i];
    if (ti + g[i] == u)
      continue;
    double lo = g[i];
    double hi = g[i];
    for (int step = 0; step < kExcessSearchUlps; ++step) {
      lo = std::nextafter(lo, -std::numeric_limits<double>::infinity());
      hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
      if (ti + lo == u) {
        g[i] = lo;
        break;
      }
      if (ti + hi == u) {
        g[i] = hi;
        break;
      }
    }
  }
  return DiscreteField(std::move(g));
}

DistributionProfile level_profile(const DiscreteField &field, const RadialGrid &grid,
                                  const Eigen::Ref<const Eigen::VectorXd> &levels) {
  if (field.size() != grid.cells + 1)
    throw std::invalid_argument("field does not match the grid");
  const Eigen::VectorXd a = field.values().cwiseAbs();
  const Eigen::VectorXd cell_avg = 0.5 * (a.head(grid.cells) + a.tail(grid.cells));
  return distribution_function(cell_avg, grid.cell_measures, levels);
}

Eigen::VectorXd geometric_levels(double top, int decades, int per_decade) {
  if (!(top > 0.0) || decades < 1 || per_decade < 1)
    throw DomainError("geometric levels need top > 0 and positive counts");
  const int count = decades * per_decade + 1;
  Eigen::VectorXd levels(count);
  for (int j = 0; j < count; ++j)
    levels[j] = top * std::pow(10.0, static_cast<double>(j - count + 1) / per_decade);
  levels[count - 1] = top;
  return levels;
}

LevelsetInequalityFit levelset_inequality_check(const DiscreteField &field,
                                                const RadialGrid &grid,
                                                const FunctionalSpec &spec,
                                                std::span<const LevelPair> pairs) {
  const DecayExponents ex = compute_exponents(spec.params).hyp;
  for (const LevelPair &pr : pairs)
    if (!(pr.h > pr.k && pr.k > 0.0))
      throw std::invalid_argument("level pairs need h > k > 0");

  LevelsetInequalityFit fit;
  fit.ratios.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const LevelPair &pr = pairs[i];
    Eigen::Vector2d both(pr.k, pr.h);
    const DistributionProfile prof = level_profile(field, grid, both);
    const double ak = prof.measures[0];
    const double ah = prof.measures[1];
    if (ak == 0.0) {
      fit.skipped.push_back(i);
      fit.ratios.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double rhs = (std::pow(ak, ex.B) * std::pow(pr.h, ex.A) + std::pow(ak, ex.C)) /
                       std::pow(pr.h - pr.k, ex.D);
    const double ratio = ah / rhs;
    fit.ratios.push_back(ratio);
    fit.c_fit = std::max(fit.c_fit, ratio);
  }
  return fit;
}

} // namespace levelset

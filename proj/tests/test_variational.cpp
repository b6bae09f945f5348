#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "levelset/errors.hpp"
#include "levelset/variational.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace levelset;
using doctest::Approx;

namespace {

ProblemParams desk_params(double r) {
  ProblemParams p;
  p.n = 4;
  p.p = 2.0;
  p.alpha = 0.25;
  p.r = r;
  return p;
}

// a = beta1 and j = xi^2: the energy is quadratic
FunctionalSpec quadratic_spec(const RadialGrid &grid, Eigen::VectorXd source, double beta1) {
  FunctionalSpec spec;
  spec.params.n = grid.n;
  spec.params.alpha = 0.0;
  spec.params.beta1 = beta1;
  spec.source = std::move(source);
  spec.j_exponent = 2.0;
  spec.epsilon = 1e-6;
  return spec;
}

// Minimizer of sum m_c [beta1 xi_c^2 - f_c u_bar_c] with u_N = 0, by direct
// assembly and a dense solve.
Eigen::VectorXd quadratic_minimizer(const RadialGrid &grid, const Eigen::VectorXd &f, double beta1) {
  const Eigen::Index n = grid.cells;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double h = grid.nodes[c + 1] - grid.nodes[c];
    const double k = 2.0 * grid.cell_measures[c] * beta1 / (h * h);
    K(c, c) += k;
    K(c + 1, c + 1) += k;
    K(c, c + 1) -= k;
    K(c + 1, c) -= k;
    b[c] += 0.5 * grid.cell_measures[c] * f[c];
    b[c + 1] += 0.5 * grid.cell_measures[c] * f[c];
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
  u.head(n) = K.topLeftCorner(n, n).ldlt().solve(b.head(n));
  return u;
}

Eigen::VectorXd random_field(Eigen::Index nodes, std::mt19937_64 &rng, double amplitude) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXd u(nodes);
  for (Eigen::Index i = 0; i < nodes; ++i)
    u[i] = amplitude * unit(rng);
  u[nodes - 1] = 0.0;
  return u;
}

// Whether some double g satisfies fl(t + g) == u. Any such g lies within a
// few ulps of u - t, so a wide scan is conclusive.
bool exact_split_exists(double u, double t) {
  double g = u - t;
  for (int i = 0; i < 32; ++i)
    g = std::nextafter(g, -std::numeric_limits<double>::infinity());
  for (int i = 0; i <= 64; ++i) {
    if (t + g == u)
      return true;
    g = std::nextafter(g, std::numeric_limits<double>::infinity());
  }
  return false;
}

} // namespace

TEST_CASE("radial grid") {
  const RadialGrid g = make_radial_grid(3, 2.0, 100);
  CHECK(g.nodes.size() == 101);
  CHECK(g.nodes[0] == 0.0);
  CHECK(g.nodes[100] == 2.0);
  CHECK(g.domain_measure() == Approx(4.0 / 3.0 * std::numbers::pi * 8.0).epsilon(1e-13));
  CHECK(g.cell_measures[0] == Approx(4.0 / 3.0 * std::numbers::pi * 8e-6).epsilon(1e-13));
  CHECK_THROWS_AS(make_radial_grid(0, 1.0, 10), DomainError);
  CHECK_THROWS_AS(make_radial_grid(2, -1.0, 10), DomainError);
  CHECK_THROWS_AS(make_radial_grid(2, 1.0, 0), DomainError);
}

TEST_CASE("discrete fields vanish on the boundary") {
  CHECK_THROWS_AS(DiscreteField(Eigen::Vector3d(1.0, 2.0, 3.0)), DomainError);
  CHECK_THROWS_AS(DiscreteField(Eigen::VectorXd::Zero(1)), DomainError);
  const DiscreteField f(Eigen::Vector3d(-4.0, 2.0, 0.0));
  CHECK(f.max_abs() == 4.0);
  CHECK(DiscreteField::zero(make_radial_grid(2, 1.0, 7)).size() == 8);
}

TEST_CASE("energy examples") {
  const RadialGrid grid = make_radial_grid(4, 1.0, 64);
  const FunctionalSpec spec = make_functional(desk_params(2.0), grid, 1.0);
  CHECK(assemble_energy(DiscreteField::zero(grid), grid, spec) == 0.0);

  // without a source the energy is nonnegative
  FunctionalSpec unloaded = spec;
  unloaded.source.setZero();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i)
    CHECK(assemble_energy(DiscreteField(random_field(65, rng, 10.0)), grid, unloaded) >= 0.0);

  // u = 1 - |x| in the unit disc: the gradient has length one everywhere
  const RadialGrid disc = make_radial_grid(2, 1.0, 50);
  const FunctionalSpec q = quadratic_spec(disc, Eigen::VectorXd::Zero(50), 2.5);
  const DiscreteField cone(Eigen::VectorXd::Ones(51) - disc.nodes);
  CHECK(assemble_energy(cone, disc, q) == Approx(2.5 * std::numbers::pi).epsilon(1e-12));

  CHECK_THROWS_AS(assemble_energy(DiscreteField::zero(disc), grid, spec), std::invalid_argument);
  ProblemParams wrong = desk_params(2.0);
  wrong.n = 3;
  CHECK_THROWS_AS(make_functional(wrong, grid, 1.0), std::invalid_argument);
}

TEST_CASE("gradient matches finite differences") {
  const RadialGrid grid = make_radial_grid(4, 1.0, 256);
  const FunctionalSpec spec = make_functional(desk_params(1.75), grid, 1.0);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd u = random_field(257, rng, 3.0);
    const Eigen::VectorXd g = energy_gradient(DiscreteField(u), grid, spec);
    CHECK(g[256] == 0.0);
    const double scale = g.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < 256; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(u[i]));
      Eigen::VectorXd up = u;
      Eigen::VectorXd dn = u;
      up[i] += h;
      dn[i] -= h;
      const double fd = (assemble_energy(DiscreteField(up), grid, spec) -
                         assemble_energy(DiscreteField(dn), grid, spec)) /
                        (2.0 * h);
      CHECK(std::abs(fd - g[i]) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("gradient at zero and symmetry") {
  const RadialGrid grid = make_radial_grid(4, 1.0, 32);
  const FunctionalSpec spec = make_functional(desk_params(3.0), grid, 1.0);
  const Eigen::VectorXd g0 = energy_gradient(DiscreteField::zero(grid), grid, spec);
  for (Eigen::Index i = 0; i < grid.cells; ++i) {
    double expect = 0.0;
    if (i > 0)
      expect -= 0.5 * grid.cell_measures[i - 1] * spec.source[i - 1];
    expect -= 0.5 * grid.cell_measures[i] * spec.source[i];
    CHECK(g0[i] == Approx(expect).epsilon(1e-14));
  }

  FunctionalSpec unloaded = spec;
  unloaded.source.setZero();
  std::mt19937_64 rng(4);
  const Eigen::VectorXd u = random_field(33, rng, 5.0);
  const Eigen::VectorXd gp = energy_gradient(DiscreteField(u), grid, unloaded);
  const Eigen::VectorXd gm = energy_gradient(DiscreteField(-u), grid, unloaded);
  CHECK((gp + gm).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("minimizer without a source is zero") {
  const RadialGrid grid = make_radial_grid(4, 1.0, 128);
  FunctionalSpec spec = make_functional(desk_params(2.0), grid, 0.0);
  const MinimizeReport rep = minimize(grid, spec, DiscreteField::zero(grid), SolverTolerances{});
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  CHECK(rep.final_field.max_abs() == 0.0);
}

TEST_CASE("quadratic energies are minimized exactly") {
  const RadialGrid grid = make_radial_grid(3, 1.5, 200);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  Eigen::VectorXd f(200);
  for (Eigen::Index c = 0; c < 200; ++c)
    f[c] = unit(rng);
  const FunctionalSpec spec = quadratic_spec(grid, f, 0.7);
  const Eigen::VectorXd expect = quadratic_minimizer(grid, f, 0.7);
  const MinimizeReport rep = minimize(grid, spec, DiscreteField::zero(grid), SolverTolerances{});
  CHECK(rep.converged);
  CHECK((rep.final_field.values() - expect).cwiseAbs().maxCoeff() <= 1e-10 * expect.cwiseAbs().maxCoeff());

  // linear response to the load
  for (double sigma : {1e-3, 7.0, 1e4}) {
    const FunctionalSpec scaled = quadratic_spec(grid, sigma * f, 0.7);
    const MinimizeReport s = minimize(grid, scaled, DiscreteField::zero(grid), SolverTolerances{1e-9 * sigma});
    CHECK(s.converged);
    CHECK((s.final_field.values() - sigma * rep.final_field.values()).cwiseAbs().maxCoeff() <=
          1e-8 * sigma * rep.final_field.max_abs());
  }
}

TEST_CASE("energy trace is monotone and the gradient vanishes at the minimizer") {
  const RadialGrid grid = make_radial_grid(4, 1.0, 1024);
  const FunctionalSpec spec = make_functional(desk_params(1.75), grid, 1.0);
  const MinimizeReport rep = minimize(grid, spec, DiscreteField::zero(grid), SolverTolerances{});
  CHECK(rep.converged);
  CHECK_FALSE(rep.stagnated);
  REQUIRE(rep.energy_trace.size() == static_cast<std::size_t>(rep.iterations) + 1);
  for (std::size_t i = 1; i < rep.energy_trace.size(); ++i)
    CHECK(rep.energy_trace[i] <= rep.energy_trace[i - 1]);
  CHECK(rep.energy_trace.back() < 0.0);
  CHECK(rep.final_gradient_norm <= 1e-9);

  // perturbing the minimizer never lowers the energy
  std::mt19937_64 rng(6);
  const double e = assemble_energy(rep.final_field, grid, spec);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd du = random_field(1025, rng, 1e-3);
    CHECK(assemble_energy(DiscreteField(rep.final_field.values() + du), grid, spec) >= e);
  }
}

TEST_CASE("solver argument checks") {
  const RadialGrid grid = make_radial_grid(4, 1.0, 16);
  FunctionalSpec spec = make_functional(desk_params(2.0), grid, 1.0);
  CHECK_THROWS_AS(minimize(grid, spec, DiscreteField::zero(grid), SolverTolerances{0.0}), DomainError);
  spec.j_exponent = 1.5;
  spec.epsilon = 0.0;
  CHECK_THROWS_AS(minimize(grid, spec, DiscreteField::zero(grid), SolverTolerances{}), DomainError);
  // max_iters = 0 reports without stepping
  spec = make_functional(desk_params(2.0), grid, 1.0);
  const MinimizeReport rep = minimize(grid, spec, DiscreteField::zero(grid), SolverTolerances{1e-9, 0});
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 0);
  CHECK(rep.energy_trace.size() == 1);
}

TEST_CASE("truncation and excess") {
  const DiscreteField u(Eigen::Vector4d(3.0, -0.5, -7.0, 0.0));
  const DiscreteField t = truncate(u, 1.0);
  const DiscreteField g = excess(u, 1.0);
  CHECK(t.values() == Eigen::Vector4d(1.0, -0.5, -1.0, 0.0));
  CHECK(g.values() == Eigen::Vector4d(2.0, 0.0, -6.0, 0.0));
  CHECK(truncate(u, 0.0).max_abs() == 0.0);
  CHECK(excess(u, 0.0).values() == u.values());
  CHECK(truncate(u, 10.0).values() == u.values());
  // no double G gives 1.0863875558493872 + G == 14.062728605808244
  const DiscreteField odd(Eigen::Vector2d(14.062728605808244, 0.0));
  const double split = truncate(odd, 1.0863875558493872).values()[0] + excess(odd, 1.0863875558493872).values()[0];
  CHECK(std::abs(split - 14.062728605808244) <= 4e-15);
  CHECK_THROWS_AS(truncate(u, -1.0), DomainError);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> expo(-20.0, 20.0);
  std::bernoulli_distribution sign(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd v(101);
    for (Eigen::Index i = 0; i < 100; ++i)
      v[i] = (sign(rng) ? 1.0 : -1.0) * std::pow(10.0, expo(rng));
    v[100] = 0.0;
    const DiscreteField f(v);
    const double k = std::pow(10.0, expo(rng));
    const DiscreteField tk = truncate(f, k);
    const DiscreteField gk = excess(f, k);
    CHECK(tk.max_abs() <= k);
    for (Eigen::Index i = 0; i < 101; ++i) {
      const double sum = tk.values()[i] + gk.values()[i];
      if (exact_split_exists(v[i], tk.values()[i]))
        CHECK(sum == v[i]);
      else
        CHECK(std::abs(sum - v[i]) <= std::abs(std::nextafter(v[i], 0.0) - v[i]) * 2.0);
      if (std::abs(v[i]) <= k)
        CHECK(gk.values()[i] == 0.0);
      else
        CHECK(std::signbit(gk.values()[i]) == std::signbit(v[i]));
    }
  }
}

TEST_CASE("level profile") {
  const RadialGrid grid = make_radial_grid(2, 1.0, 2);
  const DiscreteField u(Eigen::Vector3d(2.0, -1.0, 0.0));
  const DistributionProfile p = level_profile(u, grid, Eigen::Vector3d(0.0, 1.0, 2.0));
  CHECK(p.total_measure == Approx(std::numbers::pi));
  CHECK(p.measures[0] == Approx(std::numbers::pi));
  CHECK(p.measures[1] == Approx(std::numbers::pi / 4.0)); // inner cell averages 1.5
  CHECK(p.measures[2] == 0.0);

  const Eigen::VectorXd lv = geometric_levels(50.0, 2, 4);
  CHECK(lv.size() == 9);
  CHECK(lv[0] == Approx(0.5));
  CHECK(lv[8] == 50.0);
  CHECK_THROWS_AS(geometric_levels(0.0, 2, 4), DomainError);
}

TEST_CASE("level set inequality on computed minimizers") {
  {
    const RadialGrid grid = make_radial_grid(4, 1.0, 8);
    const FunctionalSpec spec = make_functional(desk_params(1.75), grid, 1.0);
    const std::vector<LevelPair> reversed{{1.0, 2.0}};
    const std::vector<LevelPair> at_zero{{1.0, 0.0}};
    CHECK_THROWS_AS(levelset_inequality_check(DiscreteField::zero(grid), grid, spec, reversed),
                    std::invalid_argument);
    CHECK_THROWS_AS(levelset_inequality_check(DiscreteField::zero(grid), grid, spec, at_zero),
                    std::invalid_argument);
  }

  // levels well inside the range resolved by the coarse grid (max |u| ~ 45)
  std::vector<LevelPair> pairs;
  for (double k = 0.125; k <= 2.0; k *= 2.0)
    pairs.push_back({2.0 * k, k});
  pairs.push_back({2e6, 1e6}); // above every value: skipped

  double fits[2] = {0.0, 0.0};
  int slot = 0;
  for (Eigen::Index cells : {1024, 4096}) {
    const RadialGrid grid = make_radial_grid(4, 1.0, cells);
    const FunctionalSpec spec = make_functional(desk_params(1.75), grid, 1.0);
    const MinimizeReport rep = minimize(grid, spec, DiscreteField::zero(grid), SolverTolerances{});
    REQUIRE(rep.converged);
    const LevelsetInequalityFit fit = levelset_inequality_check(rep.final_field, grid, spec, pairs);
    REQUIRE(fit.skipped.size() == 1);
    CHECK(fit.skipped[0] == pairs.size() - 1);
    CHECK(std::isnan(fit.ratios.back()));
    CHECK(fit.c_fit > 0.0);
    CHECK(std::isfinite(fit.c_fit));
    fits[slot++] = fit.c_fit;
  }
  CHECK(std::abs(fits[1] - fits[0]) <= 0.1 * fits[1]);
}

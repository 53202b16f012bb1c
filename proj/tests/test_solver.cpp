#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "hypcurv/hypgeo.hpp"
#include "hypcurv/solver.hpp"

using namespace hypcurv;
using solver::CurvatureSpec;
using solver::ScalarField;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

std::shared_ptr<const grid::MaskedGrid> ball_grid(double radius, double h) {
  return std::make_shared<grid::MaskedGrid>(domain::DomainSpec::ball(radius), h);
}

// Field holding the exact umbilic cap through (delta, eps).
ScalarField cap_field(std::shared_ptr<const grid::MaskedGrid> geom,
                      double sigma, double eps) {
  const double delta = geom->dom().circumradius();
  const double R = solver::cap_radius(delta, sigma, eps);
  ScalarField f(geom, eps, sigma);
  for (int k = 0; k < geom->num_inside(); ++k) {
    Vector2d x = geom->inside_pos(k);
    f.values[k] = -sigma * R + std::sqrt(R * R - x.squaredNorm());
  }
  return f;
}

}  // namespace

TEST_CASE("cap radius hits the Dirichlet level") {
  for (double sigma : {0.2, 0.5, 0.8})
    for (double eps : {0.02, 0.1}) {
      double R = solver::cap_radius(1.0, sigma, eps);
      CHECK(-sigma * R + std::sqrt(R * R - 1.0) == doctest::Approx(eps).epsilon(1e-12));
    }
}

TEST_CASE("discretize is exact on quadratics away from the band") {
  auto geom = ball_grid(1.0, 1.0 / 24);
  ScalarField f(geom, 0.5, 0.5);
  auto poly = [](const Vector2d& x) {
    return 2.0 + 0.3 * x.x() - 0.2 * x.y() + 0.5 * x.x() * x.x() +
           0.25 * x.x() * x.y() - 0.1 * x.y() * x.y();
  };
  for (int k = 0; k < geom->num_inside(); ++k)
    f.values[k] = poly(geom->inside_pos(k));

  int checked = 0;
  for (int k = 0; k < geom->num_inside(); ++k) {
    if (geom->in_band(k)) continue;
    auto s = solver::discretize(f, k);
    Vector2d x = geom->inside_pos(k);
    CHECK(s.u == doctest::Approx(poly(x)));
    CHECK(s.du[0] == doctest::Approx(0.3 + 1.0 * x.x() + 0.25 * x.y()).epsilon(1e-10));
    CHECK(s.du[1] == doctest::Approx(-0.2 + 0.25 * x.x() - 0.2 * x.y()).epsilon(1e-10));
    CHECK(s.d2u(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.d2u(1, 1) == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(s.d2u(0, 1) == doctest::Approx(0.25).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("residual vanishes identically on a constant field") {
  // u = const with matching Dirichlet value is a horosphere piece:
  // f(kappa) = f(1,...,1) = 1, so the residual is exactly 1 - sigma.
  auto geom = ball_grid(1.0, 1.0 / 16);
  const double sigma = 0.35;
  ScalarField f(geom, 0.8, sigma);
  f.values.setConstant(0.8);
  auto spec = CurvatureSpec::quotient(2, 1);
  auto rr = solver::assemble_residual(f, spec);
  CHECK(rr.ok());
  CHECK((rr.r.array() - (1.0 - sigma)).abs().maxCoeff() <= 1e-13);
}

TEST_CASE("residual on the exact cap is second order in the interior") {
  auto spec = CurvatureSpec::quotient(2, 1);
  const double sigma = 0.5, eps = 0.1;
  double prev = 0;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    auto geom = ball_grid(1.0, h);
    auto f = cap_field(geom, sigma, eps);
    auto rr = solver::assemble_residual(f, spec);
    REQUIRE(rr.ok());
    double interior_max = 0;
    for (int k = 0; k < geom->num_inside(); ++k)
      if (!geom->in_band(k))
        interior_max = std::max(interior_max, std::abs(rr.r[k]));
    CHECK(interior_max <= 20 * h * h);
    // The off-band node set reaches closer to the boundary on the finer
    // grid, where u'' is larger, so the observed order dips below 2.
    if (prev > 0) CHECK(prev / interior_max >= 2.5);
    prev = interior_max;
  }
}

TEST_CASE("analytic Jacobian matches finite differences") {
  auto geom = ball_grid(1.0, 1.0 / 16);
  const double sigma = 0.5, eps = 0.12;
  auto f = cap_field(geom, sigma, eps);
  // Perturb off the umbilic family so no special structure helps.
  for (int k = 0; k < geom->num_inside(); ++k) {
    Vector2d x = geom->inside_pos(k);
    f.values[k] += 0.01 * std::sin(3 * x.x()) * std::cos(2 * x.y());
  }
  for (auto spec : {CurvatureSpec::quotient(2, 1), CurvatureSpec::quotient(2, 0)}) {
    Eigen::SparseMatrix<double> ja =
        solver::assemble_jacobian(f, spec, solver::JacobianMode::Analytic);
    Eigen::SparseMatrix<double> jf =
        solver::assemble_jacobian(f, spec, solver::JacobianMode::FiniteDifference);
    double scale = 0;
    for (int k = 0; k < ja.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(ja, k); it; ++it)
        scale = std::max(scale, std::abs(it.value()));
    Eigen::SparseMatrix<double> d = ja - jf;
    double worst = 0;
    for (int k = 0; k < d.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
        worst = std::max(worst, std::abs(it.value()));
    CHECK(worst <= 1e-5 * scale);
  }
}

TEST_CASE("Newton converges fast from the cap initial guess") {
  auto geom = ball_grid(1.0, 1.0 / 32);
  const double sigma = 0.5, eps = 0.1;
  auto spec = CurvatureSpec::quotient(2, 1);
  auto f = solver::initial_guess(geom, sigma, eps);
  auto rep = solver::newton_solve(f, spec, solver::NewtonOptions{});
  CHECK(rep.converged);
  CHECK(rep.iterations <= 6);
  CHECK(rep.final_max_residual <= 1e-9);
  CHECK(rep.admissibility_ok);
  CHECK(rep.min_u >= eps * (1 - 1e-9));

  // On the ball the continuum solution is the umbilic cap itself.
  auto exact = cap_field(geom, sigma, eps);
  double err = (f.values - exact.values).cwiseAbs().maxCoeff();
  CHECK(err <= 5e-3);
}

TEST_CASE("grid refinement shrinks the cap error at second order") {
  const double sigma = 0.6, eps = 0.08;
  auto spec = CurvatureSpec::quotient(2, 1);
  double e_coarse = 0;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    auto geom = ball_grid(1.0, h);
    auto f = solver::initial_guess(geom, sigma, eps);
    auto rep = solver::newton_solve(f, spec, solver::NewtonOptions{});
    REQUIRE(rep.converged);
    auto exact = cap_field(geom, sigma, eps);
    double err = (f.values - exact.values).cwiseAbs().maxCoeff();
    if (e_coarse == 0) e_coarse = err;
    else CHECK(e_coarse / err >= 3.0);
  }
}

TEST_CASE("initial guess rejects an eps too large for the domain") {
  auto geom = ball_grid(1.0, 1.0 / 16);
  CHECK_THROWS_AS((void)solver::initial_guess(geom, 0.5, 0.9),
                  std::invalid_argument);
}

TEST_CASE("eps continuation reaches the target on an ellipse") {
  auto geom = std::make_shared<grid::MaskedGrid>(
      domain::DomainSpec::ellipse(1.0, 0.6), 1.0 / 32);
  solver::SolverConfig cfg;
  cfg.sigma = 0.45;
  cfg.eps_start = 0.16;
  cfg.eps_target = 0.04;
  cfg.grid_h = 1.0 / 32;
  auto res = solver::eps_continuation(CurvatureSpec::quotient(2, 1), geom, cfg);
  CHECK(res.converged);
  CHECK(res.final_eps == doctest::Approx(0.04));
  CHECK(res.stages.size() >= 3);
  for (const auto& st : res.stages) {
    CHECK(st.converged);
    CHECK(st.admissibility_ok);
  }
}

TEST_CASE("sigma sweep produces strictly ordered graphs") {
  auto geom = ball_grid(1.0, 1.0 / 32);
  solver::SolverConfig cfg;
  cfg.eps_start = 0.12;
  cfg.eps_target = 0.06;
  cfg.grid_h = 1.0 / 32;
  auto sweep = solver::sigma_sweep(CurvatureSpec::quotient(2, 1), geom,
                                   {0.3, 0.5, 0.7}, cfg);
  CHECK(sweep.all_converged);
  CHECK(sweep.ordered);
  CHECK(sweep.min_gap > 0);
  CHECK(sweep.crossing_node == -1);
  CHECK_THROWS((void)solver::sigma_sweep(CurvatureSpec::quotient(2, 1), geom,
                                         {0.5, 0.3}, cfg));
}

TEST_CASE("eps schedule halves down to the floor") {
  solver::SolverConfig cfg;
  cfg.eps_start = 0.16;
  cfg.eps_target = 0.02;
  cfg.grid_h = 1.0 / 64;
  cfg.eps_floor_mult = 1.0;
  auto sched = cfg.eps_schedule();
  REQUIRE(!sched.empty());
  CHECK(sched.front() == doctest::Approx(0.16));
  CHECK(sched.back() == doctest::Approx(0.02));
  for (std::size_t i = 1; i < sched.size(); ++i) CHECK(sched[i] < sched[i - 1]);
}

TEST_CASE("boundary slope factor approaches 1/sigma as eps shrinks") {
  auto spec = CurvatureSpec::quotient(2, 1);
  auto geom = ball_grid(1.0, 1.0 / 48);
  const double sigma = 0.5;
  double prev_gap = -1;
  for (double eps : {0.16, 0.08, 0.04}) {
    auto f = solver::initial_guess(geom, sigma, eps);
    auto rep = solver::newton_solve(f, spec, solver::NewtonOptions{});
    REQUIRE(rep.converged);
    auto ws = solver::boundary_w_samples(f);
    REQUIRE(!ws.empty());
    double mean = 0;
    for (double w : ws) mean += w;
    mean /= ws.size();
    double gap = std::abs(mean - 1 / sigma);
    if (prev_gap >= 0) CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 0.2);
}

// Acceptance suite.  Each criterion prints exactly one PASS/FAIL line;
// the exit code is the number of failed criteria.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hypcurv/hypgeo.hpp"
#include "hypcurv/radial.hpp"
#include "hypcurv/solver.hpp"
#include "hypcurv/symfunc.hpp"
#include "hypcurv/verify.hpp"

using namespace hypcurv;
using symfunc::CurvatureSpec;
using symfunc::Lambda;
using Eigen::VectorXd;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
  if (!ok) ++g_failures;
  std::printf("criterion %2d  %-34s %s   %s\n", idx, name.c_str(),
              ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double cap_height(double sigma, double eps, double r) {
  const double R = solver::cap_radius(1.0, sigma, eps);
  return -sigma * R + std::sqrt(R * R - r * r);
}

solver::SolverConfig ball_config(double sigma, double h, double eps_target) {
  solver::SolverConfig cfg;
  cfg.sigma = sigma;
  cfg.grid_h = h;
  cfg.eps_target = eps_target;
  return cfg;
}

solver::ContinuationResult solve_ball(const CurvatureSpec& spec, double sigma,
                                      double h, double eps_target) {
  auto geom = std::make_shared<grid::MaskedGrid>(domain::DomainSpec::ball(1.0), h);
  return solver::eps_continuation(spec, geom, ball_config(sigma, h, eps_target));
}

double max_error_vs_cap(const solver::ContinuationResult& run) {
  const auto& f = run.field;
  double err = 0;
  for (int k = 0; k < f.geom->num_inside(); ++k) {
    const double r = f.geom->inside_pos(k).norm();
    err = std::max(err, std::abs(f.values[k] - cap_height(f.sigma, f.dirichlet, r)));
  }
  return err;
}

// The sigma = 0.5, l = 1 disk run is shared by criteria 1, 3, 10, 11.
solver::ContinuationResult g_shared_run;

// --- 1. ball benchmark against the exact cap, with grid refinement ------

void criterion_1() {
  bool ok = true;
  double worst_err = 0, worst_ratio = 1e300;
  for (int l : {0, 1}) {
    const auto spec = CurvatureSpec::quotient(2, l);
    for (double sigma : {0.2, 0.5, 0.8}) {
      auto coarse = solve_ball(spec, sigma, 1.0 / 64, 0.02);
      if (l == 1 && sigma == 0.5) g_shared_run = coarse;
      if (!coarse.converged) {
        ok = false;
        continue;
      }
      const double e64 = max_error_vs_cap(coarse);
      worst_err = std::max(worst_err, e64);
      // The sigma = 0.2 boundary layer (slope factor 1/sigma = 5) is still
      // pre-asymptotic at 1/64, so its refinement ratio is measured one
      // dyadic level finer.
      const double hr = sigma < 0.3 ? 1.0 / 128 : 1.0 / 64;
      auto a = sigma < 0.3 ? solve_ball(spec, sigma, hr, 0.02) : coarse;
      auto b = solve_ball(spec, sigma, hr / 2, 0.02);
      if (!a.converged || !b.converged) {
        ok = false;
        continue;
      }
      const double ratio = max_error_vs_cap(a) / max_error_vs_cap(b);
      worst_ratio = std::min(worst_ratio, ratio);
      ok = ok && e64 <= 1e-2 && ratio >= 3.0;
    }
  }
  report(1, "ball_benchmark", ok,
         fmt("max_error=%.2e (<=1e-2), min_refinement_ratio=%.2f (>=3)",
             worst_err, worst_ratio));
}

// --- 2. radial oracle and 2-D cross-check -------------------------------

void criterion_2() {
  bool ok = true;
  double worst = 0;
  for (int n : {2, 3, 4})
    for (int l : {0, n - 2, n - 1}) {
      if (l == 0 && n == 2 && false) continue;
      static std::map<std::pair<int, int>, bool> seen;
      if (seen[{n, l}]) continue;
      seen[{n, l}] = true;
      auto p = radial::radial_solve(CurvatureSpec::quotient(n, l), 1.0, 0.5, 0.05);
      const double err = radial::profile_error_vs_cap(p, 1.0, 0.5, 0.05);
      worst = std::max(worst, err);
      ok = ok && p.converged && err <= 1e-6;
    }

  // cross-check the 2-D grid solver against the radial profile on the disk
  auto p = radial::radial_solve(CurvatureSpec::quotient(2, 1), 1.0, 0.5, 0.05);
  auto run = solve_ball(CurvatureSpec::quotient(2, 1), 0.5, 1.0 / 64, 0.05);
  double cross = 0;
  const int m = static_cast<int>(p.r.size()) - 1;
  for (int k = 0; k < run.field.geom->num_inside(); ++k) {
    const double r = run.field.geom->inside_pos(k).norm();
    const double s = std::min(r / (1.0 / m), double(m - 1));
    const int i = static_cast<int>(s);
    const double ur = p.u[i] + (s - i) * (p.u[i + 1] - p.u[i]);
    cross = std::max(cross, std::abs(run.field.values[k] - ur));
  }
  ok = ok && run.converged && cross <= 2e-2;
  report(2, "radial_oracle", ok,
         fmt("max_error_vs_cap=%.2e (<=1e-6), grid_vs_radial=%.2e (<=2e-2)",
             worst, cross));
}

// --- 3. boundary slope-factor law ----------------------------------------

void criterion_3() {
  const auto& run = g_shared_run;
  bool ok = run.converged && run.stages.size() >= 3;
  double prev = 1e300;
  for (const auto& st : run.stages) {
    const double gap = std::abs(st.boundary_w_mean - 1.0 / st.sigma);
    ok = ok && gap < prev;
    prev = gap;
  }
  auto chk = verify::boundary_angle_check(run.field, run.stages.back(), 1.0);
  ok = ok && chk.passed();
  report(3, "boundary_angle", ok,
         fmt("final_gap=%.3e, monotone over %zu eps stages, window_check=%s",
             prev, run.stages.size(), chk.passed() ? "pass" : "fail"));
}

// --- 4. foliation: strictly nested sigma sweep --------------------------

void criterion_4() {
  const auto spec = CurvatureSpec::quotient(2, 1);
  const std::vector<double> sigmas = {0.2, 0.4, 0.6, 0.8};
  bool ok = true;
  double min_gap = 1e300;
  {
    auto geom = std::make_shared<grid::MaskedGrid>(domain::DomainSpec::ball(1.0), 1.0 / 64);
    auto sw = solver::sigma_sweep(spec, geom, sigmas, ball_config(0.5, 1.0 / 64, 0.02));
    ok = ok && sw.all_converged && sw.ordered && sw.min_gap > 0;
    min_gap = std::min(min_gap, sw.min_gap);
  }
  {
    const double h = 1.0 / 48;
    auto geom = std::make_shared<grid::MaskedGrid>(domain::DomainSpec::ellipse(1.0, 0.5), h);
    auto sw = solver::sigma_sweep(spec, geom, sigmas, ball_config(0.5, h, 0.04));
    ok = ok && sw.all_converged && sw.ordered && sw.min_gap > 0;
    min_gap = std::min(min_gap, sw.min_gap);
  }
  report(4, "foliation_sweep", ok, fmt("min_pointwise_gap=%.3e (>0)", min_gap));
}

// --- 5. structure suite --------------------------------------------------

void criterion_5() {
  bool ok = true;
  int violations = 0;
  double worst_limit = 0;
  const std::vector<std::pair<int, int>> quots = {{2, 0}, {2, 1}, {3, 0}, {3, 1},
                                                  {3, 2}, {4, 2}, {4, 3}};
  for (auto [n, l] : quots) {
    auto rep = symfunc::check_structure(CurvatureSpec::quotient(n, l), 10000, 1234);
    violations += rep.violations;
    ok = ok && rep.pass;
    if (rep.limit_target_known) {
      const double d = std::abs(rep.limit_value - rep.limit_target);
      worst_limit = std::max(worst_limit, d);
      ok = ok && d <= 1e-3;
    }
  }
  report(5, "structure_suite", ok,
         fmt("violations=%d (=0), worst_limit_defect=%.2e (<=1e-3)", violations,
             worst_limit));
}

// --- 6. uniqueness margin -------------------------------------------------

// Direct summation of sum_i f_i / f and sum_i lambda_i^2 f_i / f in
// quadruple precision.  At the 1e4 condition spread of the cone samples
// the double-precision per-index route loses more than ten digits to
// cancellation, so the reference has to carry extra precision.
void direct_sums_quad(int n, int l, const VectorXd& lam, double& s_fi, double& s_l2fi) {
  using quad = __float128;
  std::vector<quad> e(n + 1, 0);
  e[0] = 1;
  for (int i = 0; i < n; ++i)
    for (int k = std::min(i + 1, n); k >= 1; --k) e[k] += quad(lam[i]) * e[k - 1];
  quad s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<quad> ei(n, 0);  // elementary polynomials with lambda_i deleted
    ei[0] = 1;
    for (int k = 1; k < n; ++k) ei[k] = e[k] - quad(lam[i]) * ei[k - 1];
    quad term = ei[n - 1] / e[n];  // equals 1/lambda_i
    if (l >= 1) term -= ei[l - 1] / e[l];
    s1 += term;
    s2 += quad(lam[i]) * quad(lam[i]) * term;
  }
  s_fi = double(s1 / (n - l));
  s_l2fi = double(s2 / (n - l));
}

void criterion_6() {
  bool ok = true;
  double worst_closed = 0, worst_margin = 1e300;
  const std::vector<std::pair<int, int>> quots = {{2, 1}, {3, 2}, {3, 1}, {4, 3},
                                                  {4, 2}, {5, 4}, {5, 3}};
  for (auto [n, l] : quots) {
    const auto spec = CurvatureSpec::quotient(n, l);
    for (int i = 0; i < 10000; ++i) {
      VectorXd lam = symfunc::sample_cone(n, 99, i);
      // closed forms vs the quad-precision direct summation; the common
      // factor f is divided out so fractional powers never enter
      if (i < 300) {
        Lambda L(lam);
        const double f = symfunc::f_eval(spec, L);
        double s1, s2;
        direct_sums_quad(n, l, lam, s1, s2);
        worst_closed = std::max(
            worst_closed,
            std::abs(symfunc::sum_fi_closed(spec, L) / f - s1) / std::abs(s1));
        worst_closed = std::max(
            worst_closed,
            std::abs(symfunc::sum_lambda2_fi_closed(spec, L) / f - s2) / std::abs(s2));
      }
      // rescale onto a level f < 1 and check the quantitative margin
      const double target = 0.05 + 0.90 * ((i % 97) / 96.0);
      Lambda L0(lam);
      Lambda Ls(lam * (target / symfunc::f_eval(spec, L0)));
      const double margin = symfunc::uniqueness_margin(spec, Ls);
      worst_margin = std::min(worst_margin, margin - (1 - target * target));
      ok = ok && margin >= 1 - target * target - 1e-9;
    }
  }
  ok = ok && worst_closed <= 1e-10;
  report(6, "uniqueness_margin", ok,
         fmt("closed_form_rel_err=%.2e (<=1e-10), worst margin-(1-f^2)=%.2e (>=-1e-9)",
             worst_closed, worst_margin));
}

// --- 7. gradient and Jacobian oracles ------------------------------------

void criterion_7() {
  bool ok = true;
  double worst_grad = 0;
  const std::vector<CurvatureSpec> specs = {
      CurvatureSpec::quotient(2, 0), CurvatureSpec::quotient(2, 1),
      CurvatureSpec::quotient(3, 1), CurvatureSpec::quotient(3, 2),
      CurvatureSpec::quotient(4, 2),
      CurvatureSpec::concave_sum({{0.5, CurvatureSpec::quotient(3, 1)},
                                  {0.5, CurvatureSpec::quotient(3, 2)}})};
  for (const auto& spec : specs) {
    const int n = spec.n();
    for (int i = 0; i < 100; ++i) {
      VectorXd lam = symfunc::sample_cone(n, 7, i);
      Lambda L(lam);
      const VectorXd g = symfunc::f_grad(spec, L);
      for (int a = 0; a < n; ++a) {
        const double step = 1e-6 * std::max(1.0, std::abs(lam[a]));
        VectorXd lp = lam, lm = lam;
        lp[a] += step;
        lm[a] -= step;
        const double fd =
            (symfunc::f_eval(spec, Lambda(lp)) - symfunc::f_eval(spec, Lambda(lm))) /
            (2 * step);
        worst_grad = std::max(worst_grad,
                              std::abs(g[a] - fd) / (1e-12 + std::abs(fd)));
      }
    }
  }
  ok = ok && worst_grad <= 1e-6;

  // analytic vs finite-difference solver Jacobian on a perturbed cap
  auto geom = std::make_shared<grid::MaskedGrid>(domain::DomainSpec::ball(1.0), 1.0 / 16);
  auto field = solver::initial_guess(geom, 0.5, 0.08);
  for (int k = 0; k < geom->num_inside(); ++k) {
    auto p = geom->inside_pos(k);
    field.values[k] += 1e-3 * std::sin(5 * p.x() + 1) * std::cos(4 * p.y());
  }
  const auto spec = CurvatureSpec::quotient(2, 1);
  Eigen::MatrixXd A = solver::assemble_jacobian(field, spec, solver::JacobianMode::Analytic);
  Eigen::MatrixXd F =
      solver::assemble_jacobian(field, spec, solver::JacobianMode::FiniteDifference);
  const double scale = A.cwiseAbs().maxCoeff();
  const double jerr = (A - F).cwiseAbs().maxCoeff() / scale;
  ok = ok && jerr <= 1e-5;
  report(7, "gradient_jacobian_oracles", ok,
         fmt("grad_rel_err=%.2e (<=1e-6), jacobian_rel_err=%.2e (<=1e-5)",
             worst_grad, jerr));
}

// --- 8. parallel flow ------------------------------------------------------

void criterion_8() {
  bool ok = true;
  double worst = 0;
  for (double k0 : {0.0, 0.5, 1.0, 2.0, 10.0})
    for (double t = 0; t <= 5.0 + 1e-12; t += 0.5) {
      const double d = std::abs(hypgeo::parallel_flow(k0, t) -
                                hypgeo::parallel_flow_rk4(k0, t));
      worst = std::max(worst, d);
    }
  ok = ok && worst <= 1e-8;
  for (double t : {0.1, 1.0, 5.0}) ok = ok && hypgeo::parallel_flow(1.0, t) == 1.0;
  report(8, "parallel_flow", ok, fmt("max |closed - rk4| = %.2e (<=1e-8)", worst));
}

// --- 9. covariant-Hessian identity on the umbilic oracles -----------------

void criterion_9() {
  const auto spec = CurvatureSpec::quotient(2, 1);
  double worst = 0;
  auto fold = [&](const hypgeo::IdentityResidual& r) {
    worst = std::max({worst, r.hessian_identity, r.contraction_inv_u,
                      r.contraction_nu_u});
  };
  for (int i = 0; i < 100; ++i) {
    fold(hypgeo::covariant_hessian_identity(hypgeo::horosphere_oracle(0.2 + 0.05 * i, 2), spec));
    const double ang = 2 * M_PI * i / 100.0, r = 0.8 * (0.05 + 0.009 * i);
    Eigen::Vector2d x(r * std::cos(ang), r * std::sin(ang));
    fold(hypgeo::covariant_hessian_identity(hypgeo::umbilic_sphere_oracle(1.0, 0.6, x), spec));
    Eigen::Vector2d a(0.3 + 0.002 * i, -0.1 + 0.003 * i);
    fold(hypgeo::covariant_hessian_identity(hypgeo::tilted_plane_oracle(a, 1.0 + 0.01 * i, x), spec));
  }
  report(9, "identity_oracle", worst <= 1e-10,
         fmt("max residual = %.2e (<=1e-10)", worst));
}

// --- 10. invariants along the Newton path ---------------------------------

void criterion_10() {
  const auto& run = g_shared_run;
  bool ok = run.converged;
  double min_ratio = 1e300;
  for (const auto& st : run.stages) {
    ok = ok && st.admissibility_ok;
    min_ratio = std::min(min_ratio, st.min_u / st.eps);
    ok = ok && st.min_u >= st.eps * (1 - 1e-12);
  }
  // discrete Hessian of u^2 + |x|^2 positive definite at fully interior nodes
  const auto& f = run.field;
  const auto& g = *f.geom;
  const double h2 = g.h() * g.h();
  auto phi = [&](int k) {
    return f.values[k] * f.values[k] + g.inside_pos(k).squaredNorm();
  };
  double min_eig = 1e300;
  for (int k = 0; k < g.num_inside(); ++k) {
    const auto& st = g.stencil(k);
    bool interior = true;
    for (const auto& nb : st) interior = interior && !nb.ghost();
    if (!interior) continue;
    const double pc = phi(k);
    const double pxx = (phi(st[grid::E].unknown) + phi(st[grid::W].unknown) - 2 * pc) / h2;
    const double pyy = (phi(st[grid::N].unknown) + phi(st[grid::S].unknown) - 2 * pc) / h2;
    const double pxy = (phi(st[grid::NE].unknown) + phi(st[grid::SW].unknown) -
                        phi(st[grid::SE].unknown) - phi(st[grid::NW].unknown)) /
                       (4 * h2);
    const double tr = pxx + pyy, det = pxx * pyy - pxy * pxy;
    const double lam_min = tr / 2 - std::sqrt(std::max(0.0, tr * tr / 4 - det));
    min_eig = std::min(min_eig, lam_min);
  }
  ok = ok && min_eig > 0;
  report(10, "newton_invariants", ok,
         fmt("min u/eps=%.12f (>=1-1e-12), min eig D2(u^2+|x|^2)=%.3f (>0)",
             min_ratio, min_eig));
}

// --- 11. desk-scale limits: observational trend reports -------------------

void criterion_11() {
  const auto& run = g_shared_run;
  auto dom = verify::curvature_domination_check(run.stages.back());
  auto hb = verify::interior_bound_HnHn1(run.field, CurvatureSpec::quotient(2, 1));
  std::string d = "existence for arbitrary smooth boundaries and the abstract "
                  "constants are out of desk scale; trends reported instead: ";
  for (const auto& kv : dom.measured) d += fmt("%s=%.3g ", kv.first.c_str(), kv.second);
  report(11, "observational_trends", hb.passed(), d);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("acceptance: %d of 11 criteria passed\n", 11 - g_failures);
  return g_failures;
}

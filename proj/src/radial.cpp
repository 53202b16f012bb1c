#include "hypcurv/radial.hpp"

#include <cmath>
#include <stdexcept>

#include "hypcurv/solver.hpp"

namespace hypcurv::radial {

using Eigen::VectorXd;
using symfunc::CurvatureSpec;

namespace {

// Curvature residual f(kappa) - sigma at node i given the three local
// heights, and its exact partials with respect to them.  The partials
// must be analytic: a finite-difference Jacobian carries an absolute
// truncation error ~ f''' (u/h^2)^3 s^2 that wrecks the near-cancelling
// row sums governing the smooth error modes once the mesh is fine.
struct NodeEval {
  double r = std::numeric_limits<double>::quiet_NaN();
  double d_um = 0, d_uc = 0, d_up = 0;
  bool ok = false;
};

NodeEval node_residual(const CurvatureSpec& spec, double sigma, double r, double h,
                       double um, double uc, double up, bool axis,
                       bool with_partials) {
  const int n = spec.n();
  NodeEval out;
  const double du = axis ? 0.0 : (up - um) / (2 * h);
  const double d2u = axis ? 2.0 * (up - uc) / (h * h) : (up - 2 * uc + um) / (h * h);
  const double w = std::sqrt(1.0 + du * du);
  const double w3 = w * w * w;
  const double km = uc * d2u / w3 + 1.0 / w;
  const double kp = axis ? km : uc * du / (r * w) + 1.0 / w;
  if (!(km > 0 && kp > 0 && uc > 0)) return out;
  VectorXd lam(n);
  lam[0] = km;
  for (int j = 1; j < n; ++j) lam[j] = kp;
  symfunc::Lambda L(lam);
  out.r = symfunc::f_eval(spec, L) - sigma;
  out.ok = true;
  if (!with_partials) return out;

  VectorXd fi = symfunc::f_grad(spec, L);
  const double fm = fi[0];
  const double fp = fi.tail(n - 1).sum();  // the n-1 parallel copies move together

  if (axis) {
    // km = kp = uc * d2u + 1, d2u = 2(up - uc)/h^2, du = 0.
    const double s = fm + fp;
    out.d_uc = s * (d2u - 2.0 * uc / (h * h));
    out.d_up = s * (2.0 * uc / (h * h));
    out.d_um = 0;
    return out;
  }

  const double dkm_ddu = (-3.0 * uc * d2u / (w3 * w) - 1.0 / (w * w)) * (du / w);
  const double dkm_dd2u = uc / w3;
  const double dkm_duc = d2u / w3;
  const double dkp_ddu = (uc / (r * w)) + (-uc * du / (r * w * w) - 1.0 / (w * w)) * (du / w);
  const double dkp_duc = du / (r * w);

  const double ddu_dup = 1.0 / (2 * h), ddu_dum = -1.0 / (2 * h);
  const double dd2u_dup = 1.0 / (h * h), dd2u_dum = 1.0 / (h * h);
  const double dd2u_duc = -2.0 / (h * h);

  out.d_up = fm * (dkm_ddu * ddu_dup + dkm_dd2u * dd2u_dup) + fp * (dkp_ddu * ddu_dup);
  out.d_um = fm * (dkm_ddu * ddu_dum + dkm_dd2u * dd2u_dum) + fp * (dkp_ddu * ddu_dum);
  out.d_uc = fm * (dkm_duc + dkm_dd2u * dd2u_duc) + fp * dkp_duc;
  return out;
}

// Thomas factorization for the tridiagonal Newton system.
VectorXd tridiag_solve(VectorXd a, VectorXd b, VectorXd c, VectorXd d) {
  const int m = static_cast<int>(b.size());
  for (int i = 1; i < m; ++i) {
    double f = a[i] / b[i - 1];
    b[i] -= f * c[i - 1];
    d[i] -= f * d[i - 1];
  }
  VectorXd x(m);
  x[m - 1] = d[m - 1] / b[m - 1];
  for (int i = m - 2; i >= 0; --i) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

}  // namespace

RadialProfile radial_solve(const CurvatureSpec& spec, double delta, double sigma,
                           double eps, const RadialOptions& opts) {
  if (!(sigma > 0 && sigma < 1)) throw std::invalid_argument("sigma must lie in (0,1)");
  if (!(delta > 0 && eps > 0)) throw std::invalid_argument("delta, eps must be positive");
  if (spec.n() < 2) throw std::invalid_argument("radial_solve: n >= 2 required");

  const int m = opts.num_cells;
  const double h = delta / m;
  RadialProfile p;
  p.r = VectorXd::LinSpaced(m + 1, 0.0, delta);
  p.u.resize(m + 1);
  const double R = solver::cap_radius(delta, sigma, eps);
  for (int i = 0; i <= m; ++i)
    p.u[i] = -sigma * R + std::sqrt(R * R - p.r[i] * p.r[i]);

  auto assemble = [&](const VectorXd& u, VectorXd& res) -> bool {
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      double um = (i == 0) ? u[1] : u[i - 1];  // symmetry ghost at the axis
      auto ev = node_residual(spec, sigma, p.r[i], h, um, u[i], u[i + 1],
                              i == 0, false);
      if (!ev.ok) ok = false;
      res[i] = ev.r;
    }
    res[m] = u[m] - eps;
    return ok;
  };

  VectorXd res(m + 1);
  if (!assemble(p.u, res))
    throw std::invalid_argument("radial_solve: initial profile inadmissible");
  double rnorm = res.cwiseAbs().maxCoeff();
  // The residual itself is computed through second differences, so its
  // evaluation carries roundoff ~ eps_mach / h^2; do not demand more.
  const double tol = std::max(opts.abs_tol,
                              4.0 * std::numeric_limits<double>::epsilon() / (h * h));

  VectorXd lo(m + 1), di(m + 1), up(m + 1);
  for (int it = 0; it < opts.max_iters; ++it) {
    if (rnorm <= tol) {
      p.converged = true;
      break;
    }
    // Analytic tridiagonal Jacobian.
    for (int i = 0; i <= m; ++i) {
      if (i == m) {
        lo[i] = 0;
        di[i] = 1;
        up[i] = 0;
        continue;
      }
      double um = (i == 0) ? p.u[1] : p.u[i - 1];
      auto ev = node_residual(spec, sigma, p.r[i], h, um, p.u[i], p.u[i + 1],
                              i == 0, true);
      lo[i] = (i > 0) ? ev.d_um : 0.0;
      di[i] = ev.d_uc;
      up[i] = ev.d_up + ((i == 0) ? ev.d_um : 0.0);  // axis ghost mirrors u[1]
    }
    VectorXd step = tridiag_solve(lo, di, up, -res);

    double alpha = 1.0;
    bool accepted = false;
    VectorXd trial(m + 1), tres(m + 1);
    while (alpha >= opts.damping_min) {
      trial = p.u + alpha * step;
      if (assemble(trial, tres)) {
        double tn = tres.cwiseAbs().maxCoeff();
        if (tn <= rnorm * (1.0 - 1e-4 * alpha) || tn <= tol) {
          p.u.swap(trial);
          res.swap(tres);
          rnorm = tn;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    p.iterations = it + 1;
  }
  if (rnorm <= tol) p.converged = true;
  p.final_max_residual = rnorm;
  return p;
}

void profile_curvatures(const RadialProfile& p, int i, double& kappa_meridian,
                        double& kappa_parallel) {
  const int m = static_cast<int>(p.u.size()) - 1;
  if (i < 0 || i >= m) throw std::out_of_range("profile_curvatures: interior node required");
  const double h = p.r[1] - p.r[0];
  double um = (i == 0) ? p.u[1] : p.u[i - 1];
  double du = (i == 0) ? 0.0 : (p.u[i + 1] - um) / (2 * h);
  double d2u = (i == 0) ? 2.0 * (p.u[1] - p.u[0]) / (h * h)
                        : (p.u[i + 1] - 2 * p.u[i] + um) / (h * h);
  const double w = std::sqrt(1.0 + du * du);
  kappa_meridian = p.u[i] * d2u / (w * w * w) + 1.0 / w;
  kappa_parallel = (i == 0) ? kappa_meridian : p.u[i] * du / (p.r[i] * w) + 1.0 / w;
}

double profile_error_vs_cap(const RadialProfile& p, double delta, double sigma,
                            double eps) {
  const double R = solver::cap_radius(delta, sigma, eps);
  double err = 0;
  for (int i = 0; i < p.u.size(); ++i) {
    double exact = -sigma * R + std::sqrt(R * R - p.r[i] * p.r[i]);
    err = std::max(err, std::abs(p.u[i] - exact));
  }
  return err;
}

}  // namespace hypcurv::radial

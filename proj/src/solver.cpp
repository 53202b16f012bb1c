#include "hypcurv/solver.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace hypcurv::solver {

namespace {

// Closed-form spectral decomposition of a symmetric 2x2 matrix.
// Eigenvalues ascending; columns of V are the eigenvectors.
void eig2(const Matrix2d& m, Vector2d& lam, Matrix2d& V) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double mean = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  lam[0] = mean - disc;
  lam[1] = mean + disc;
  // Two algebraically equivalent eigenvector formulas for lam[1]; each
  // degenerates to 0/0 noise when b ~ 0 and its diagonal entry is the
  // larger one, so take the better conditioned of the two.
  const Vector2d cand1(b, lam[1] - a), cand2(lam[1] - c, b);
  Vector2d v2 = cand1.squaredNorm() >= cand2.squaredNorm() ? cand1 : cand2;
  if (v2.squaredNorm() > 0) {
    v2.normalize();
    V.col(1) = v2;
    V.col(0) = Vector2d(-v2[1], v2[0]);
  } else {
    V.setIdentity();  // multiple of the identity; any frame works
  }
}

// (sqrt(1+s)-1)/s and its derivative in s, stable near s = 0.
void sqrt1p_ratio(double s, double& c, double& dc) {
  if (s < 1e-6) {
    c = 0.5 - s / 8.0 + s * s / 16.0;
    dc = -0.125 + s / 8.0 - 15.0 * s * s / 128.0;
  } else {
    const double w = std::sqrt(1.0 + s);
    c = (w - 1.0) / s;
    dc = (s / (2.0 * w) - (w - 1.0)) / (s * s);
  }
}

double inv_sqrt1p_ratio(double s) {  // (1/sqrt(1+s)-1)/s
  if (s < 1e-6) return -0.5 + 0.375 * s - 0.3125 * s * s;
  return (1.0 / std::sqrt(1.0 + s) - 1.0) / s;
}

}  // namespace

PointEval eval_point(const CurvatureSpec& spec, double u, const Vector2d& du,
                     const Matrix2d& d2u, bool with_partials) {
  PointEval out;
  const double s = du.squaredNorm();
  const double w = std::sqrt(1.0 + s);
  const double nu = 1.0 / w;
  out.w = w;
  out.nu = nu;

  const Matrix2d I = Matrix2d::Identity();
  const Matrix2d S = I + inv_sqrt1p_ratio(s) * du * du.transpose();
  const Matrix2d Ae = S * (d2u / w) * S;
  Matrix2d Ah = nu * I + u * Ae;
  Ah = 0.5 * (Ah + Ah.transpose().eval());

  Vector2d kappa;
  Matrix2d V;
  eig2(Ah, kappa, V);
  out.kappa = kappa;
  out.admissible = kappa[0] > 0;
  if (!out.admissible) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  symfunc::Lambda lam{VectorXd(kappa)};
  out.value = symfunc::f_eval(spec, lam);
  if (!with_partials) return out;

  VectorXd fi = symfunc::f_grad(spec, lam);
  const Matrix2d Fh = V * fi.asDiagonal() * V.transpose();

  out.d_u = (Fh * Ae).trace();

  const Matrix2d SFS = S * Fh * S;
  out.d_d2u(0, 0) = (u / w) * SFS(0, 0);
  out.d_d2u(1, 1) = (u / w) * SFS(1, 1);
  out.d_d2u(0, 1) = out.d_d2u(1, 0) = 2.0 * (u / w) * SFS(0, 1);

  double cT, dcT;
  sqrt1p_ratio(s, cT, dcT);  // G^{1/2} = I + cT du du^T
  const Matrix2d Mw = d2u / w;
  for (int k = 0; k < 2; ++k) {
    const double pk = du[k];
    const double dnu = -pk / (w * w * w);
    Matrix2d dT = (2.0 * pk * dcT) * du * du.transpose();
    dT.col(k) += cT * du;
    dT.row(k) += cT * du.transpose();
    const Matrix2d dS = -S * dT * S;
    Matrix2d dAe = dS * Mw * S + S * Mw * dS - (pk / (w * w)) * Ae;
    Matrix2d dAh = u * dAe + dnu * I;
    out.d_du[k] = (Fh * dAh).trace();
  }
  return out;
}

namespace {

struct SlotValues {
  double v[8];  // neighbor slot heights after ghost closure
  double c;     // center height
};

SlotValues gather_slots(const ScalarField& f, int k) {
  const MaskedGrid& g = *f.geom;
  SlotValues s;
  s.c = f.values[k];
  const auto& st = g.stencil(k);
  for (int d = 0; d < 8; ++d) {
    if (!st[d].ghost()) {
      s.v[d] = f.values[st[d].unknown];
      continue;
    }
    const double th = st[d].theta;
    const auto& ob = st[d ^ 1];  // opposite slot; directions come in pairs
    if (!ob.ghost()) {
      // Quadratic extrapolation through (-1, u_b), (0, u_c), (theta, eps),
      // evaluated at +1.  Exact for quadratics, which keeps the scheme
      // second order in the steep boundary layer; falls back to linear
      // when the domain is cut on both sides.
      const double ub = f.values[ob.unknown];
      s.v[d] = ub * (1 - th) / (1 + th) - s.c * 2 * (1 - th) / th +
               f.dirichlet * 2 / (th * (1 + th));
    } else {
      // Cut on both sides: quadratic through (-t2, eps), (0, u_c), (t1, eps).
      const double t2 = ob.theta;
      s.v[d] = f.dirichlet * ((1 - th) / (t2 * (th + t2)) + (1 + t2) / (th * (th + t2))) -
               s.c * (1 + t2) * (1 - th) / (th * t2);
    }
  }
  return s;
}

void slots_to_sample(const SlotValues& s, double h, double& u, Vector2d& du, Matrix2d& d2u) {
  using namespace grid;
  u = s.c;
  du[0] = (s.v[E] - s.v[W]) / (2 * h);
  du[1] = (s.v[N] - s.v[S]) / (2 * h);
  d2u(0, 0) = (s.v[E] - 2 * s.c + s.v[W]) / (h * h);
  d2u(1, 1) = (s.v[N] - 2 * s.c + s.v[S]) / (h * h);
  d2u(0, 1) = d2u(1, 0) = (s.v[NE] + s.v[SW] - s.v[NW] - s.v[SE]) / (4 * h * h);
}

ResidualResult assemble_residual_impl(const ScalarField& field, const CurvatureSpec& spec,
                                      bool parallel) {
  const MaskedGrid& g = *field.geom;
  const int n = g.num_inside();
  ResidualResult res;
  res.r = VectorXd::Zero(n);
  std::vector<char> bad(n, 0);

#pragma omp parallel for schedule(static) if (parallel)
  for (int k = 0; k < n; ++k) {
    SlotValues sv = gather_slots(field, k);
    double u;
    Vector2d du;
    Matrix2d d2u;
    slots_to_sample(sv, g.h(), u, du, d2u);
    if (!(u > 0)) {
      bad[k] = 1;
      continue;
    }
    PointEval pe = eval_point(spec, u, du, d2u, false);
    if (!pe.admissible) {
      bad[k] = 1;
      continue;
    }
    res.r[k] = pe.value - field.sigma;
  }
  for (int k = 0; k < n; ++k)
    if (bad[k]) res.inadmissible.push_back(k);
  return res;
}

}  // namespace

hypgeo::GraphSample discretize(const ScalarField& field, int k) {
  SlotValues sv = gather_slots(field, k);
  double u;
  Vector2d du;
  Matrix2d d2u;
  slots_to_sample(sv, field.geom->h(), u, du, d2u);
  if (!(u > 0)) throw std::domain_error("discretize: non-positive height");
  return hypgeo::GraphSample(u, VectorXd(du), Eigen::MatrixXd(d2u));
}

ResidualResult assemble_residual(const ScalarField& field, const CurvatureSpec& spec) {
  return assemble_residual_impl(field, spec, true);
}

ResidualResult assemble_residual_serial(const ScalarField& field, const CurvatureSpec& spec) {
  return assemble_residual_impl(field, spec, false);
}

Eigen::SparseMatrix<double> assemble_jacobian(const ScalarField& field,
                                              const CurvatureSpec& spec,
                                              JacobianMode mode) {
  const MaskedGrid& g = *field.geom;
  const int n = g.num_inside();
  Eigen::SparseMatrix<double> J(n, n);

  if (mode == JacobianMode::FiniteDifference) {
    // Column-wise central differences of the residual; test/verification
    // path, quadratic cost.
    std::vector<Eigen::Triplet<double>> trips;
    ScalarField work = field;
    for (int q = 0; q < n; ++q) {
      const double step = 1e-6 * std::max(1.0, std::abs(field.values[q]));
      work.values[q] = field.values[q] + step;
      VectorXd rp = assemble_residual_serial(work, spec).r;
      work.values[q] = field.values[q] - step;
      VectorXd rm = assemble_residual_serial(work, spec).r;
      work.values[q] = field.values[q];
      VectorXd col = (rp - rm) / (2 * step);
      for (int k = 0; k < n; ++k)
        if (col[k] != 0.0) trips.emplace_back(k, q, col[k]);
    }
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
  }

  const double h = g.h();
  using namespace grid;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(n) * 9);

  std::vector<std::array<double, 9>> rowvals(n);  // slot partials, C last
  bool inadmissible = false;
#pragma omp parallel for schedule(static) reduction(|| : inadmissible)
  for (int k = 0; k < n; ++k) {
    SlotValues sv = gather_slots(field, k);
    double u;
    Vector2d du;
    Matrix2d d2u;
    slots_to_sample(sv, h, u, du, d2u);
    PointEval pe = eval_point(spec, u, du, d2u, true);
    if (!pe.admissible) {
      inadmissible = true;
      continue;
    }
    auto& rv = rowvals[k];
    rv[E] = pe.d_du[0] / (2 * h) + pe.d_d2u(0, 0) / (h * h);
    rv[W] = -pe.d_du[0] / (2 * h) + pe.d_d2u(0, 0) / (h * h);
    rv[N] = pe.d_du[1] / (2 * h) + pe.d_d2u(1, 1) / (h * h);
    rv[S] = -pe.d_du[1] / (2 * h) + pe.d_d2u(1, 1) / (h * h);
    rv[NE] = pe.d_d2u(0, 1) / (4 * h * h);
    rv[SW] = pe.d_d2u(0, 1) / (4 * h * h);
    rv[NW] = -pe.d_d2u(0, 1) / (4 * h * h);
    rv[SE] = -pe.d_d2u(0, 1) / (4 * h * h);
    rv[8] = pe.d_u - 2.0 * (pe.d_d2u(0, 0) + pe.d_d2u(1, 1)) / (h * h);
  }
  if (inadmissible)
    throw std::runtime_error("assemble_jacobian: inadmissible node");

  for (int k = 0; k < n; ++k) {
    const auto& st = g.stencil(k);
    const auto& rv = rowvals[k];
    double diag = rv[8];
    for (int d = 0; d < 8; ++d) {
      if (!st[d].ghost()) {
        trips.emplace_back(k, st[d].unknown, rv[d]);
        continue;
      }
      const double th = st[d].theta;
      const auto& ob = st[d ^ 1];
      if (!ob.ghost()) {
        // mirror of the quadratic closure in gather_slots
        diag += rv[d] * (-2 * (1 - th) / th);
        trips.emplace_back(k, ob.unknown, rv[d] * (1 - th) / (1 + th));
      } else {
        diag += rv[d] * (-(1 + ob.theta) * (1 - th) / (th * ob.theta));
      }
    }
    trips.emplace_back(k, k, diag);
  }
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

namespace {

void fill_stats(const ScalarField& field, const CurvatureSpec& spec, SolveReport& rep) {
  const MaskedGrid& g = *field.geom;
  double kmin = 1e300, kmax = -1e300, band_kmax = -1e300;
  double band_w_sum = 0, band_w_max = 0, band_d2 = 0;
  double eta_int = -1e300, eta_band = -1e300;
  int band_count = 0;
  for (int k = 0; k < g.num_inside(); ++k) {
    SlotValues sv = gather_slots(field, k);
    double u;
    Vector2d du;
    Matrix2d d2u;
    slots_to_sample(sv, g.h(), u, du, d2u);
    PointEval pe = eval_point(spec, u, du, d2u, false);
    double eta = (field.sigma - pe.nu) / u;
    kmin = std::min(kmin, pe.kappa[0]);
    kmax = std::max(kmax, pe.kappa[1]);
    if (g.in_band(k)) {
      band_kmax = std::max(band_kmax, pe.kappa[1]);
      band_w_sum += pe.w;
      band_w_max = std::max(band_w_max, pe.w);
      band_d2 = std::max(band_d2, d2u.cwiseAbs().maxCoeff());
      eta_band = std::max(eta_band, eta);
      ++band_count;
    } else {
      eta_int = std::max(eta_int, eta);
    }
  }
  rep.kappa_min = kmin;
  rep.kappa_max = kmax;
  rep.band_kappa_max = band_kmax;
  rep.band_w_mean = band_count ? band_w_sum / band_count : 0;
  rep.band_w_max = band_w_max;
  rep.band_d2u_norm = band_d2;
  rep.eta_interior_max = eta_int;
  rep.eta_band_max = eta_band;
  rep.min_u = field.values.minCoeff();

  auto wb = boundary_w_samples(field);
  if (!wb.empty()) {
    double sum = 0, mx = 0;
    for (double v : wb) {
      sum += v;
      mx = std::max(mx, v);
    }
    rep.boundary_w_mean = sum / double(wb.size());
    rep.boundary_w_max = mx;
  }
}

}  // namespace

SolveReport newton_solve(ScalarField& field, const CurvatureSpec& spec,
                         const NewtonOptions& opts, JacobianMode mode) {
  SolveReport rep;
  rep.eps = field.dirichlet;
  rep.sigma = field.sigma;

  ResidualResult res = assemble_residual(field, spec);
  if (!res.ok())
    throw std::invalid_argument("newton_solve: initial field inadmissible at " +
                                std::to_string(res.inadmissible.size()) + " nodes");
  double rnorm = res.r.cwiseAbs().maxCoeff();
  const double r0 = rnorm;
  rep.residual_history.push_back(rnorm);
  const double u_floor = field.dirichlet * (1.0 - 1e-12);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int it = 0; it < opts.max_iters; ++it) {
    if (rnorm <= opts.abs_tol || rnorm <= opts.rel_tol * r0) {
      rep.converged = true;
      break;
    }
    Eigen::SparseMatrix<double> J = assemble_jacobian(field, spec, mode);
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      rep.message = "linear solver failure";
      break;
    }
    VectorXd step = lu.solve(-res.r);

    double alpha = 1.0;
    bool accepted = false;
    ScalarField trial = field;
    while (alpha >= opts.damping_min) {
      trial.values = field.values + alpha * step;
      if (trial.values.minCoeff() >= u_floor) {
        ResidualResult tr = assemble_residual(trial, spec);
        if (tr.ok() && tr.r.cwiseAbs().maxCoeff() <= rnorm * (1.0 - 1e-4 * alpha)) {
          field.values.swap(trial.values);
          res = std::move(tr);
          rnorm = res.r.cwiseAbs().maxCoeff();
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      rep.message = "damping floor reached";
      break;
    }
    rep.residual_history.push_back(rnorm);
    rep.iterations = it + 1;
  }
  if (!rep.converged && rep.message.empty() &&
      (rnorm <= opts.abs_tol || rnorm <= opts.rel_tol * r0))
    rep.converged = true;  // converged on the last allowed iteration
  if (!rep.converged && rep.message.empty()) rep.message = "iteration limit";

  rep.final_max_residual = rnorm;
  rep.admissibility_ok = res.ok();
  fill_stats(field, spec, rep);
  return rep;
}

double cap_radius(double delta, double sigma, double eps) {
  const double s2 = 1.0 - sigma * sigma;
  return (eps * sigma + std::sqrt(delta * delta * s2 + eps * eps)) / s2;
}

ScalarField initial_guess(std::shared_ptr<const MaskedGrid> geom, double sigma, double eps) {
  const auto& dom = geom->dom();
  const double dc = dom.circumradius();
  if (!(eps < 0.75 * dc))
    throw std::invalid_argument(
        "initial_guess: eps too large for this domain; start the continuation "
        "at a smaller eps (eps < 0.75 * circumradius required)");
  ScalarField f(geom, eps, sigma);
  if (dom.kind() == domain::DomainSpec::Kind::Ball) {
    // On a ball the umbilic cap through the Dirichlet level is the exact
    // continuum solution; start there.
    const double R = cap_radius(dc, sigma, eps);
    const Vector2d c = dom.circumcenter();
    for (int k = 0; k < geom->num_inside(); ++k) {
      const double r = (geom->inside_pos(k) - c).norm();
      f.values[k] = -sigma * R + std::sqrt(R * R - r * r);
    }
    // At cut nodes with a small intersection fraction the linear ghost
    // extrapolation amplifies the cap's quadratic deviation, which can
    // push the closure inadmissible on fine grids.  Fall back to the
    // flat start when that happens.
    for (int k = 0; k < geom->num_inside(); ++k) {
      if (!hypgeo::admissibility(discretize(f, k))) {
        f.values.setConstant(eps);
        break;
      }
    }
  } else {
    // Other domains: the cap is incompatible with the Dirichlet data at
    // the cuts (the ghost closure would fabricate large negative
    // curvature), so start from the flat field u = eps, which is ghost
    // consistent and trivially admissible.
    f.values.setConstant(eps);
  }
  return f;
}

void SolverConfig::validate() const {
  if (!(sigma > 0 && sigma < 1)) throw std::invalid_argument("sigma must lie in (0,1)");
  if (!(eps_target > 0 && eps_start >= eps_target))
    throw std::invalid_argument("eps schedule must decrease to a positive target");
  if (!(grid_h > 0)) throw std::invalid_argument("grid_h must be positive");
  if (!(newton.abs_tol > 0 && newton.rel_tol >= 0 && newton.damping_min > 0))
    throw std::invalid_argument("newton tolerances must be positive");
}

std::vector<double> SolverConfig::eps_schedule() const {
  const double floor = std::max(eps_floor_mult * grid_h, eps_target);
  std::vector<double> sched{std::max(eps_start, floor)};
  while (sched.back() > floor * (1.0 + 1e-9))
    sched.push_back(std::max(0.5 * sched.back(), floor));
  return sched;
}

ContinuationResult eps_continuation(const CurvatureSpec& spec,
                                    std::shared_ptr<const MaskedGrid> geom,
                                    const SolverConfig& config) {
  config.validate();
  ContinuationResult out;
  auto sched = config.eps_schedule();
  out.field = initial_guess(geom, config.sigma, sched.front());
  for (double eps : sched) {
    ScalarField stage = out.field;
    // Shift the warm start down by the eps decrement: that keeps the
    // derivatives and restores u = eps at the cuts, so the ghost closure
    // of the previous solution stays admissible at the new stage.
    stage.values.array() -= stage.dirichlet - eps;
    stage.dirichlet = eps;
    stage.values = stage.values.cwiseMax(eps);
    SolveReport rep = newton_solve(stage, spec, config.newton, config.jacobian_mode);
    out.stages.push_back(rep);
    if (!rep.converged) {
      out.converged = false;
      return out;  // keep the last converged stage in out.field
    }
    out.field = std::move(stage);
    out.final_eps = eps;
  }
  out.converged = true;
  return out;
}

SweepResult sigma_sweep(const CurvatureSpec& spec,
                        std::shared_ptr<const MaskedGrid> geom,
                        const std::vector<double>& sigma_list, SolverConfig config) {
  for (size_t i = 1; i < sigma_list.size(); ++i)
    if (!(sigma_list[i] > sigma_list[i - 1]))
      throw std::invalid_argument("sigma_sweep: sigma list must be strictly increasing");

  SweepResult sw;
  sw.sigmas = sigma_list;
  sw.all_converged = true;
  for (double s : sigma_list) {
    config.sigma = s;
    auto run = eps_continuation(spec, geom, config);
    sw.all_converged = sw.all_converged && run.converged;
    sw.fields.push_back(run.field);
    sw.runs.push_back(std::move(run));
  }

  sw.ordered = true;
  sw.min_gap = 1e300;
  for (size_t i = 0; i + 1 < sw.fields.size(); ++i) {
    VectorXd gap = sw.fields[i].values - sw.fields[i + 1].values;
    int idx;
    double g = gap.minCoeff(&idx);
    if (g < sw.min_gap) sw.min_gap = g;
    if (!(g > 0) && sw.crossing_node < 0) {
      sw.ordered = false;
      sw.crossing_node = idx;
    }
  }
  return sw;
}

std::vector<double> boundary_w_samples(const ScalarField& field) {
  const MaskedGrid& g = *field.geom;
  const double h = g.h();
  std::vector<double> out;
  for (int k = 0; k < g.num_inside(); ++k) {
    const auto& st = g.stencil(k);
    for (int d = 0; d < 4; ++d) {  // axis directions only
      if (!st[d].ghost()) continue;
      Vector2d xc = g.inside_pos(k);
      Vector2d xn(xc[0] + grid::kDirs[d][0] * h, xc[1] + grid::kDirs[d][1] * h);
      Vector2d xb = xc + st[d].theta * (xn - xc);
      Vector2d nin = -g.dom().outward_normal(xb);
      double u1, u2;
      if (!grid::interpolate(field, xb + h * nin, u1)) continue;
      if (!grid::interpolate(field, xb + 2 * h * nin, u2)) continue;
      double dudn = (-3.0 * field.dirichlet + 4.0 * u1 - u2) / (2 * h);
      out.push_back(std::sqrt(1.0 + dudn * dudn));
    }
  }
  return out;
}

}  // namespace hypcurv::solver

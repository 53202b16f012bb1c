#include "hypcurv/hypgeo.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace hypcurv::hypgeo {

GraphSample::GraphSample(double u_, VectorXd du_, MatrixXd d2u_)
    : u(u_), du(std::move(du_)), d2u(std::move(d2u_)) {
  if (!(u > 0)) throw std::domain_error("GraphSample: height must be positive");
  if (d2u.rows() != du.size() || d2u.cols() != du.size())
    throw std::invalid_argument("GraphSample: Hessian shape mismatch");
  d2u = 0.5 * (d2u + d2u.transpose().eval());
}

MatrixXd first_fundamental(const GraphSample& s) {
  const int n = s.n();
  MatrixXd g = MatrixXd::Identity(n, n) + s.du * s.du.transpose();
  return g / (s.u * s.u);
}

MatrixXd second_fundamental(const GraphSample& s) {
  const int n = s.n();
  const double w = std::sqrt(1.0 + s.du.squaredNorm());
  MatrixXd h = MatrixXd::Identity(n, n) + s.du * s.du.transpose() + s.u * s.d2u;
  return h / (s.u * s.u * w);
}

MatrixXd metric_inv_sqrt(const VectorXd& du) {
  const int n = static_cast<int>(du.size());
  const double ss = du.squaredNorm();
  // (I + p p^T)^{-1/2} = I + c(s) p p^T with c = (1/sqrt(1+s) - 1)/s.
  double c;
  if (ss < 1e-8)
    c = -0.5 + 0.375 * ss - 0.3125 * ss * ss;
  else
    c = (1.0 / std::sqrt(1.0 + ss) - 1.0) / ss;
  return MatrixXd::Identity(n, n) + c * du * du.transpose();
}

ShapePoint hyperbolic_curvatures(const GraphSample& s) {
  const int n = s.n();
  const double w = std::sqrt(1.0 + s.du.squaredNorm());
  const double nu = 1.0 / w;
  MatrixXd S = metric_inv_sqrt(s.du);
  MatrixXd Ae = S * (s.d2u / w) * S;
  Ae = 0.5 * (Ae + Ae.transpose().eval());

  Eigen::SelfAdjointEigenSolver<MatrixXd> ese(Ae);
  VectorXd ke = ese.eigenvalues();
  VectorXd kh = s.u * ke.array() + nu;

  // Independent route: eigenvalues of the symmetrized hyperbolic shape
  // matrix directly.
  MatrixXd Ah = nu * MatrixXd::Identity(n, n) + s.u * Ae;
  Eigen::SelfAdjointEigenSolver<MatrixXd> esh(Ah, Eigen::EigenvaluesOnly);
  VectorXd kh2 = esh.eigenvalues();
  double dev = (kh - kh2).cwiseAbs().maxCoeff();
  if (dev > 1e-10 * (1.0 + kh.cwiseAbs().maxCoeff()))
    throw std::logic_error("hyperbolic_curvatures: eigenvalue routes disagree");

  ShapePoint p;
  p.w = w;
  p.nu_up = nu;
  p.kappa_euclid = ke;
  p.kappa_hyp = kh;
  p.admissible = kh.minCoeff() > 0;
  return p;
}

bool admissibility(const GraphSample& s) {
  const int n = s.n();
  MatrixXd m = MatrixXd::Identity(n, n) + s.du * s.du.transpose() + s.u * s.d2u;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > 0;
}

double asymptotic_angle(const GraphSample& s, double sigma) {
  const double w = std::sqrt(1.0 + s.du.squaredNorm());
  return (sigma - 1.0 / w) / s.u;
}

double parallel_flow(double kappa0, double t) {
  // Moebius form of the tanh/coth branches; exact at the fixed point 1.
  const double T = std::tanh(t);
  return (kappa0 + T) / (1.0 + kappa0 * T);
}

VectorXd parallel_flow(const VectorXd& kappa0, double t) {
  VectorXd out(kappa0.size());
  for (int i = 0; i < kappa0.size(); ++i) out[i] = parallel_flow(kappa0[i], t);
  return out;
}

double parallel_flow_rk4(double kappa0, double t, double dt) {
  auto rhs = [](double k) { return 1.0 - k * k; };
  double k = kappa0;
  double remaining = t;
  while (remaining > 0) {
    double h = std::min(dt, remaining);
    double k1 = rhs(k);
    double k2 = rhs(k + 0.5 * h * k1);
    double k3 = rhs(k + 0.5 * h * k2);
    double k4 = rhs(k + h * k3);
    k += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    remaining -= h;
  }
  return k;
}

double umbilic_sphere_radius(double delta, double sigma) {
  if (!(sigma > 0 && sigma < 1)) throw std::domain_error("sigma must lie in (0,1)");
  return delta / std::sqrt(1.0 - sigma * sigma);
}

double umbilic_sphere_height(double delta, double sigma, double r) {
  const double R = umbilic_sphere_radius(delta, sigma);
  return -sigma * R + std::sqrt(R * R - r * r);
}

UmbilicSample umbilic_sphere_oracle(double delta, double sigma, const VectorXd& x) {
  const double r = x.norm();
  if (!(r < delta)) throw std::domain_error("umbilic_sphere_oracle: |x| >= delta");
  const int n = static_cast<int>(x.size());
  const double R = umbilic_sphere_radius(delta, sigma);
  const double q = std::sqrt(R * R - r * r);
  const double u = -sigma * R + q;
  VectorXd du = -x / q;
  MatrixXd d2u = -(MatrixXd::Identity(n, n) / q + x * x.transpose() / (q * q * q));
  UmbilicSample s;
  s.g = GraphSample(u, std::move(du), std::move(d2u));
  s.euclid_shape_const = -1.0 / R;  // upper cap curves away from the upward normal
  return s;
}

UmbilicSample horosphere_oracle(double height, int n) {
  UmbilicSample s;
  s.g = GraphSample(height, VectorXd::Zero(n), MatrixXd::Zero(n, n));
  s.euclid_shape_const = 0;
  return s;
}

UmbilicSample tilted_plane_oracle(const VectorXd& a, double b, const VectorXd& x) {
  const int n = static_cast<int>(a.size());
  UmbilicSample s;
  s.g = GraphSample(a.dot(x) + b, a, MatrixXd::Zero(n, n));
  s.euclid_shape_const = 0;
  return s;
}

IdentityResidual covariant_hessian_identity(const UmbilicSample& s,
                                     const symfunc::CurvatureSpec& spec) {
  const GraphSample& gS = s.g;
  const int n = gS.n();
  const double u = gS.u;
  const double w = std::sqrt(1.0 + gS.du.squaredNorm());
  const double nu = 1.0 / w;
  const double c = s.euclid_shape_const;

  MatrixXd I = MatrixXd::Identity(n, n);
  MatrixXd G = I + gS.du * gS.du.transpose();  // induced Euclidean metric
  MatrixXd Ginv = G.inverse();
  VectorXd Ginv_du = Ginv * gS.du;
  const double grad_u_sq = gS.du.dot(Ginv_du);  // = 1 - nu^2

  // Covariant Hessian of the height in the Euclidean surface metric,
  // from the graph-coordinate Christoffel symbols.
  MatrixXd cov_u = gS.d2u * (1.0 - grad_u_sq);

  // Route A: hyperbolic covariant Hessian of 1/u from Euclidean data.
  MatrixXd lhs = -cov_u / (u * u) + grad_u_sq / (u * u * u) * G;

  // Route B: the curvature-form expression.
  MatrixXd g_hyp = G / (u * u);
  MatrixXd h_hyp = (G + u * gS.d2u) / (u * u * w);
  MatrixXd rhs = (g_hyp - nu * h_hyp) / u;

  IdentityResidual out;
  out.hessian_identity = (lhs - rhs).cwiseAbs().maxCoeff();

  // Contractions against F^{ij} in a hyperbolic orthonormal frame.
  MatrixXd S = metric_inv_sqrt(gS.du);
  MatrixXd Ah = nu * I + u * S * (gS.d2u / w) * S;
  Ah = 0.5 * (Ah + Ah.transpose().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Ah);
  VectorXd kappa = es.eigenvalues();
  symfunc::Lambda lam(kappa);
  const double sigma_val = symfunc::f_eval(spec, lam);
  VectorXd fi = symfunc::f_grad(spec, lam);
  MatrixXd Fh = es.eigenvectors() * fi.asDiagonal() * es.eigenvectors().transpose();

  auto frame = [&](const MatrixXd& T) { return (u * u) * S * T * S; };

  double lhs1 = (Fh * frame(lhs)).trace();
  double rhs1 = -sigma_val * nu / u + fi.sum() / u;
  out.contraction_inv_u = std::abs(lhs1 - rhs1);

  // Hessian of nu/u; third derivatives close because the Euclidean second
  // fundamental form is a constant multiple of the induced metric here.
  MatrixXd cov_nu = -nu * c * c * G;
  const double cross = -c * grad_u_sq;  // g~^{kl} u_k nu_l
  MatrixXd T2 = nu * lhs + cov_nu / u - cross / (u * u) * G;
  double lhs2 = (Fh * frame(T2)).trace();
  double rhs2 = sigma_val / u - nu / u * (kappa.array().square() * fi.array()).sum();
  out.contraction_nu_u = std::abs(lhs2 - rhs2);
  return out;
}

}  // namespace hypcurv::hypgeo

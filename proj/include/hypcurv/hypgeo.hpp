#pragma once

#include <Eigen/Dense>

#include "hypcurv/symfunc.hpp"

// Pointwise geometry of vertical graphs x_{n+1} = u(x) over the ideal
// boundary of the half-space model.  All functions are pure and safe for
// data-parallel evaluation.

namespace hypcurv::hypgeo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Height, gradient and Hessian of u at a point.  u must be positive.
struct GraphSample {
  double u = 0;
  VectorXd du;
  MatrixXd d2u;

  GraphSample() = default;
  GraphSample(double u_, VectorXd du_, MatrixXd d2u_);
  int n() const { return static_cast<int>(du.size()); }
};

// Geometry bundle at a point: slope factor, normal component, Euclidean
// and hyperbolic principal curvatures, admissibility.
struct ShapePoint {
  double w = 1;        // sqrt(1 + |Du|^2)
  double nu_up = 1;    // vertical normal component, 1/w
  VectorXd kappa_euclid;
  VectorXd kappa_hyp;  // kappa_i = u * kappa_euclid_i + nu_up
  bool admissible = false;

  double eta(double sigma, double u) const { return (sigma - nu_up) / u; }
};

// (delta_ij + u_i u_j) / u^2
MatrixXd first_fundamental(const GraphSample& s);

// (delta_ij + u_i u_j + u u_ij) / (u^2 w)
MatrixXd second_fundamental(const GraphSample& s);

// G^{-1/2} with G = I + du du^T (closed form rank-one update).
MatrixXd metric_inv_sqrt(const VectorXd& du);

// Principal curvatures through the symmetrized shape matrix.  Computes
// the Euclidean eigenvalues first and maps them through the affine
// curvature relation, then cross-checks against a direct eigensolve of
// the hyperbolic shape matrix; the two routes must agree to 1e-10.
ShapePoint hyperbolic_curvatures(const GraphSample& s);

// Positive definiteness of {delta_ij + u_i u_j + u u_ij}.
bool admissibility(const GraphSample& s);

double asymptotic_angle(const GraphSample& s, double sigma);

// Normal flow of a principal curvature, kappa' = 1 - kappa^2.
// Closed form: tanh / coth branches with fixed point at 1.
double parallel_flow(double kappa0, double t);
VectorXd parallel_flow(const VectorXd& kappa0, double t);
// RK4 cross-check integrator.
double parallel_flow_rk4(double kappa0, double t, double dt = 1e-4);

// Families of umbilic graphs with exact derivatives; the oracles for the
// identity and solver tests.
struct UmbilicSample {
  GraphSample g;
  // Constant of proportionality in the Euclidean second fundamental form
  // h~_ij = c * g~_ij (1/R for spheres, 0 for planes and horospheres).
  double euclid_shape_const = 0;
};

// Equidistant-sphere graph over the ball of radius delta: the cap with
// constant hyperbolic curvature sigma hitting the ideal boundary at
// |x| = delta.  Throws std::domain_error for |x| >= delta.
UmbilicSample umbilic_sphere_oracle(double delta, double sigma, const VectorXd& x);
double umbilic_sphere_height(double delta, double sigma, double r);
// Euclidean radius of the cap.
double umbilic_sphere_radius(double delta, double sigma);

UmbilicSample horosphere_oracle(double height, int n);
// u = a . x + b
UmbilicSample tilted_plane_oracle(const VectorXd& a, double b, const VectorXd& x);

// Residuals of the covariant-Hessian identity for 1/u and of its two
// contractions with F^{ij} against the curvature function `spec`.
// Valid on umbilic oracles, where third derivatives close in terms of
// the constant Euclidean shape ratio.
struct IdentityResidual {
  double hessian_identity = 0;   // max entry deviation, two routes to grad^2(1/u)
  double contraction_inv_u = 0;  // F : grad^2(1/u) vs its curvature expression
  double contraction_nu_u = 0;   // F : grad^2(nu/u) vs its curvature expression
};

IdentityResidual covariant_hessian_identity(const UmbilicSample& s,
                                     const symfunc::CurvatureSpec& spec);

}  // namespace hypcurv::hypgeo

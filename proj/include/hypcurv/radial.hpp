#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hypcurv/symfunc.hpp"

// Radial reduction of the graph equation on a ball: collocation + damped
// Newton for the profile u(r) with u(delta) = eps and u'(0) = 0.  Works
// for any ambient dimension n >= 2, which makes it the oracle for the
// n-dependent formulas the 2-D grid cannot reach.

namespace hypcurv::radial {

struct RadialOptions {
  int num_cells = 4096;
  int max_iters = 60;
  double abs_tol = 1e-12;
  double damping_min = 1e-6;
};

struct RadialProfile {
  Eigen::VectorXd r;
  Eigen::VectorXd u;
  bool converged = false;
  int iterations = 0;
  double final_max_residual = 0;
};

RadialProfile radial_solve(const symfunc::CurvatureSpec& spec, double delta,
                           double sigma, double eps,
                           const RadialOptions& opts = {});

// Hyperbolic principal curvatures (meridian, parallel) of the discrete
// profile at node i, from second-order differences.
void profile_curvatures(const RadialProfile& p, int i, double& kappa_meridian,
                        double& kappa_parallel);

// Max-norm distance to the umbilic cap through (delta, eps).
double profile_error_vs_cap(const RadialProfile& p, double delta, double sigma,
                            double eps);

}  // namespace hypcurv::radial

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

#include "hypcurv/grid.hpp"
#include "hypcurv/hypgeo.hpp"
#include "hypcurv/symfunc.hpp"

// Discretization and damped Newton solution of the constant-curvature
// graph equation f(kappa[u]) = sigma with Dirichlet value eps, plus the
// eps-continuation and sigma-sweep drivers.

namespace hypcurv::solver {

using Eigen::Matrix2d;
using Eigen::Vector2d;
using Eigen::VectorXd;
using grid::MaskedGrid;
using grid::ScalarField;
using symfunc::CurvatureSpec;

enum class JacobianMode { Analytic, FiniteDifference };

struct NewtonOptions {
  int max_iters = 50;
  double abs_tol = 1e-9;
  double rel_tol = 1e-13;
  double damping_min = 1e-4;
};

struct SolverConfig {
  double sigma = 0.5;
  double eps_start = 0.16;
  double eps_target = 0.02;
  double grid_h = 1.0 / 64;
  // eps floor multiple of h; the schedule never goes below floor_mult*h.
  double eps_floor_mult = 1.0;
  NewtonOptions newton;
  JacobianMode jacobian_mode = JacobianMode::Analytic;

  void validate() const;
  std::vector<double> eps_schedule() const;
};

struct SolveReport {
  bool converged = false;
  double eps = 0;
  double sigma = 0;
  int iterations = 0;
  std::vector<double> residual_history;  // max-norm per accepted iterate
  double final_max_residual = 0;
  bool admissibility_ok = false;
  double min_u = 0;
  // Slope factor statistics on the boundary band and extrapolated onto
  // the boundary cuts.
  double band_w_mean = 0, band_w_max = 0;
  double boundary_w_mean = 0, boundary_w_max = 0;
  double kappa_min = 0, kappa_max = 0;
  double band_kappa_max = 0;
  double band_d2u_norm = 0;  // max |D^2 u| over the band, for slack terms
  double eta_interior_max = -1e300, eta_band_max = -1e300;
  std::string message;
};

// Pointwise curvature operator value and its exact partial derivatives
// with respect to (u, Du, D^2u).  n = 2 fast path used by assembly.
struct PointEval {
  double value = 0;  // f(kappa)
  Vector2d kappa = Vector2d::Zero();
  double w = 1, nu = 1;
  bool admissible = false;
  // partials of f(kappa); filled only when requested
  double d_u = 0;
  Vector2d d_du = Vector2d::Zero();
  Matrix2d d_d2u = Matrix2d::Zero();  // entry (a,b) is d f / d u_ab
};

PointEval eval_point(const CurvatureSpec& spec, double u, const Vector2d& du,
                     const Matrix2d& d2u, bool with_partials);

// Second-order stencil evaluation at inside node k, ghost closure applied.
hypgeo::GraphSample discretize(const ScalarField& field, int k);

struct ResidualResult {
  VectorXd r;
  std::vector<int> inadmissible;  // inside-node indices, empty when clean
  bool ok() const { return inadmissible.empty(); }
};

// Node-parallel assembly and a serial reference path used by tests and
// the benchmark; they produce identical values.
ResidualResult assemble_residual(const ScalarField& field, const CurvatureSpec& spec);
ResidualResult assemble_residual_serial(const ScalarField& field, const CurvatureSpec& spec);

Eigen::SparseMatrix<double> assemble_jacobian(const ScalarField& field,
                                              const CurvatureSpec& spec,
                                              JacobianMode mode);

SolveReport newton_solve(ScalarField& field, const CurvatureSpec& spec,
                         const NewtonOptions& opts,
                         JacobianMode mode = JacobianMode::Analytic);

// Umbilic cap over the circumscribed ball, matched so that the cap passes
// through height eps over the circumscribed circle.  Admissible and >= eps
// on the whole domain.  Throws if eps is too large for the domain.
ScalarField initial_guess(std::shared_ptr<const MaskedGrid> geom, double sigma, double eps);

// Euclidean radius of the umbilic cap through height eps over a circle of
// radius delta; u_exact(r) = -sigma*R + sqrt(R^2 - r^2).
double cap_radius(double delta, double sigma, double eps);

struct ContinuationResult {
  ScalarField field;  // last converged stage
  std::vector<SolveReport> stages;
  bool converged = false;  // all stages
  double final_eps = 0;
};

ContinuationResult eps_continuation(const CurvatureSpec& spec,
                                    std::shared_ptr<const MaskedGrid> geom,
                                    const SolverConfig& config);

struct SweepResult {
  std::vector<double> sigmas;
  std::vector<ScalarField> fields;        // converged solutions, one per sigma
  std::vector<ContinuationResult> runs;
  bool all_converged = false;
  bool ordered = false;      // strict nesting u^{sigma_i} > u^{sigma_j}, sigma_i < sigma_j
  double min_gap = 0;        // min pointwise gap over consecutive pairs
  int crossing_node = -1;    // inside-node index of the first violation
};

// Solves for each sigma in increasing order and checks the strict
// ordering of the graphs on the shared interior nodes.
SweepResult sigma_sweep(const CurvatureSpec& spec,
                        std::shared_ptr<const MaskedGrid> geom,
                        const std::vector<double>& sigma_list, SolverConfig config);

// Boundary slope factor extrapolated onto the boundary cuts with a
// second-order one-sided probe along the inward normal.  Returns all
// sampled values (used for the boundary angle law checks).
std::vector<double> boundary_w_samples(const ScalarField& field);

}  // namespace hypcurv::solver

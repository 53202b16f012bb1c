#pragma once

#include <string>
#include <vector>

#include "hypcurv/solver.hpp"
#include "hypcurv/symfunc.hpp"

// Machine-checkable reports for the estimates the solver's outputs are
// expected to satisfy.  Checks never assert non-constructive constants;
// they fit and report them.  Bounds carry an explicit discretization
// slack term 10*h*(1 + |D^2 u|_band).

namespace hypcurv::verify {

enum class Status { Pass, Fail, Observational };

struct CheckReport {
  std::string check_name;
  Status status = Status::Observational;
  std::vector<std::pair<std::string, double>> measured;
  std::string bound;    // rendered bound expression
  std::string citation; // stable tag of the law being checked

  bool passed() const { return status != Status::Fail; }
};

std::string status_name(Status s);

// Slope factor law at the boundary: |w - 1/sigma| <= C*eps + slack with a
// declared cap on C, plus the eta bound from the exterior tangent radius.
CheckReport boundary_angle_check(const solver::ScalarField& solution,
                                 const solver::SolveReport& rep, double r1,
                                 double c_cap = 30.0);

// Interior max of eta bounded by its boundary-band max.
CheckReport eta_maximum_principle(const solver::ScalarField& solution,
                                  const solver::SolveReport& rep);

// Interior max of u*w bounded by max(max u, boundary-band max of u*w).
CheckReport gradient_bound_check(const solver::ScalarField& solution);

// Observational ratio interior-max kappa / (1 + band-max kappa).
CheckReport curvature_domination_check(const solver::SolveReport& rep);

// l = n-1 identities at every node plus the truncated-height curvature
// product; theta defaults to max(u)/4 when <= 0.
CheckReport interior_bound_HnHn1(const solver::ScalarField& solution,
                                 const solver::CurvatureSpec& spec,
                                 double theta = 0.0);

// Structure suite over a list of curvature specs, including the
// uniqueness-margin sampling for the certified classes.
std::vector<CheckReport> run_structure_suite(
    const std::vector<solver::CurvatureSpec>& specs, std::uint64_t seed,
    int samples_per_spec = 10000);

// Margin sampling for one quotient spec; certified (l = n-1, n-2) specs
// get a pass/fail bound, others an observational report.
CheckReport uniqueness_margin_check(const solver::CurvatureSpec& spec,
                                    std::uint64_t seed, int samples);

std::string to_csv_row(const CheckReport& r);
std::string csv_header();

}  // namespace hypcurv::verify

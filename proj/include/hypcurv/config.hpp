#pragma once

#include <string>
#include <vector>

#include "hypcurv/domain.hpp"
#include "hypcurv/radial.hpp"
#include "hypcurv/solver.hpp"

// Sectioned key = value run configuration.  Parsing collects every error
// with its line number before reporting, so a bad file is fixed in one
// round trip.

namespace hypcurv::config {

struct RunConfig {
  domain::DomainSpec domain = domain::DomainSpec::ball(1.0);
  symfunc::CurvatureSpec spec = symfunc::CurvatureSpec::quotient(2, 1);
  solver::SolverConfig solver;
  std::vector<double> sigmas;  // sweep list; solver.sigma is the single run
  radial::RadialOptions radial;
  bool radial_mode = false;
  double radial_delta = 1.0;
  int structure_samples = 10000;
  std::uint64_t seed = 0;
};

struct ParseError {
  int line = 0;  // 0 for file-level problems
  std::string message;
};

struct ParseResult {
  RunConfig config;
  std::vector<ParseError> errors;
  bool ok() const { return errors.empty(); }
  std::string render_errors() const;
};

ParseResult parse_config_text(const std::string& text);
ParseResult parse_config_file(const std::string& path);

// Curvature spec grammar: quotient(n,l), sum(w*S, w*S, ...),
// product(w*S, ...).  Throws std::invalid_argument with a description.
symfunc::CurvatureSpec parse_spec(const std::string& text);

}  // namespace hypcurv::config

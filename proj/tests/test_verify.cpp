#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "hypcurv/verify.hpp"

using namespace hypcurv;
using solver::CurvatureSpec;

namespace {

struct Solved {
  solver::ScalarField field;
  solver::SolveReport rep;
};

Solved solve_ball(double sigma, double eps, double h) {
  auto geom = std::make_shared<grid::MaskedGrid>(domain::DomainSpec::ball(1.0), h);
  auto f = solver::initial_guess(geom, sigma, eps);
  auto rep = solver::newton_solve(f, CurvatureSpec::quotient(2, 1),
                                  solver::NewtonOptions{});
  REQUIRE(rep.converged);
  return {std::move(f), rep};
}

}  // namespace

TEST_CASE("checks pass on a converged ball solution") {
  auto s = solve_ball(0.5, 0.04, 1.0 / 48);
  double r1 = s.field.geom->dom().exterior_tangent_radius();

  auto angle = verify::boundary_angle_check(s.field, s.rep, r1);
  INFO(verify::to_csv_row(angle));
  CHECK(angle.passed());
  CHECK(angle.status == verify::Status::Pass);

  auto eta = verify::eta_maximum_principle(s.field, s.rep);
  INFO(verify::to_csv_row(eta));
  CHECK(eta.status == verify::Status::Pass);

  auto grad = verify::gradient_bound_check(s.field);
  INFO(verify::to_csv_row(grad));
  CHECK(grad.status == verify::Status::Pass);

  auto dom = verify::curvature_domination_check(s.rep);
  CHECK(dom.status == verify::Status::Observational);

  auto interior = verify::interior_bound_HnHn1(s.field, CurvatureSpec::quotient(2, 1));
  INFO(verify::to_csv_row(interior));
  CHECK(interior.status == verify::Status::Pass);
}

TEST_CASE("interior bound check is observational off the top quotient") {
  auto s = solve_ball(0.5, 0.08, 1.0 / 24);
  auto r = verify::interior_bound_HnHn1(s.field, CurvatureSpec::quotient(2, 0));
  CHECK(r.status == verify::Status::Observational);
}

TEST_CASE("uniqueness margin check certifies only the certified classes") {
  auto certified = verify::uniqueness_margin_check(CurvatureSpec::quotient(3, 2), 5u, 500);
  CHECK(certified.status == verify::Status::Pass);
  CHECK(certified.measured[0].second > 0);

  auto open = verify::uniqueness_margin_check(CurvatureSpec::quotient(4, 1), 5u, 500);
  CHECK(open.status == verify::Status::Observational);
}

TEST_CASE("structure suite emits one structure and one margin row per quotient") {
  auto reports = verify::run_structure_suite(
      {CurvatureSpec::quotient(2, 1), CurvatureSpec::quotient(3, 1)}, 9u, 500);
  REQUIRE(reports.size() == 4);
  for (const auto& r : reports) CHECK(r.passed());
}

TEST_CASE("csv rows are well formed") {
  CHECK(verify::csv_header() == "check,status,measured,bound,citation");
  auto r = verify::uniqueness_margin_check(CurvatureSpec::quotient(2, 1), 1u, 10);
  auto row = verify::to_csv_row(r);
  CHECK(row.find("uniqueness_margin") == 0);
  CHECK(row.find(",pass,") != std::string::npos);
}

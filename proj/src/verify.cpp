#include "hypcurv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypcurv/hypgeo.hpp"

namespace hypcurv::verify {

using solver::ScalarField;
using solver::SolveReport;
using symfunc::CurvatureSpec;
using symfunc::Lambda;

std::string status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    default: return "observational";
  }
}

namespace {

double slack_term(const ScalarField& f, double band_d2u_norm) {
  return 10.0 * f.geom->h() * (1.0 + band_d2u_norm);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

CheckReport boundary_angle_check(const ScalarField& solution,
                                 const SolveReport& rep, double r1,
                                 double c_cap) {
  CheckReport out;
  out.check_name = "boundary_angle";
  out.citation = "slope factor law w -> 1/sigma at the boundary";

  const double target = 1.0 / rep.sigma;
  const double window = c_cap * rep.eps + 0.05;
  const double dev_mean = std::abs(rep.boundary_w_mean - target);
  const double dev_max = std::abs(rep.boundary_w_max - target);
  const double c_fit = rep.eps > 0 ? std::max(dev_mean - 0.05, 0.0) / rep.eps : 0.0;

  out.measured = {{"boundary_w_mean", rep.boundary_w_mean},
                  {"boundary_w_max", rep.boundary_w_max},
                  {"target_1_over_sigma", target},
                  {"fitted_rate_constant", c_fit},
                  {"exterior_tangent_radius", r1},
                  {"band_eta_max", rep.eta_band_max}};
  out.bound = "|w_boundary - 1/sigma| <= " + fmt(window);
  out.status = (dev_mean <= window && dev_max <= window) ? Status::Pass
                                                         : Status::Fail;
  (void)solution;
  return out;
}

CheckReport eta_maximum_principle(const ScalarField& solution,
                                  const SolveReport& rep) {
  CheckReport out;
  out.check_name = "eta_maximum_principle";
  out.citation = "asymptotic angle attains its max on the boundary band";

  const double slack = slack_term(solution, rep.band_d2u_norm);
  out.measured = {{"eta_interior_max", rep.eta_interior_max},
                  {"eta_band_max", rep.eta_band_max},
                  {"slack", slack}};
  out.bound = "eta_interior_max <= eta_band_max + " + fmt(slack);
  out.status = rep.eta_interior_max <= rep.eta_band_max + slack
                   ? Status::Pass
                   : Status::Fail;
  return out;
}

CheckReport gradient_bound_check(const ScalarField& solution) {
  CheckReport out;
  out.check_name = "gradient_bound";
  out.citation = "u*w attains its max at the boundary band or where u is max";

  const auto& geom = *solution.geom;
  double max_u = 0, interior_uw = 0, band_uw = 0, band_d2 = 0;
  for (int k = 0; k < geom.num_inside(); ++k) {
    auto s = solver::discretize(solution, k);
    const double uw = s.u * std::sqrt(1.0 + s.du.squaredNorm());
    max_u = std::max(max_u, s.u);
    if (geom.in_band(k)) {
      band_uw = std::max(band_uw, uw);
      band_d2 = std::max(band_d2, s.d2u.norm());
    } else {
      interior_uw = std::max(interior_uw, uw);
    }
  }
  const double slack = slack_term(solution, band_d2);
  const double rhs = std::max(max_u, band_uw) + slack;
  out.measured = {{"interior_max_uw", interior_uw},
                  {"max_u", max_u},
                  {"band_max_uw", band_uw},
                  {"slack", slack}};
  out.bound = "interior_max_uw <= " + fmt(rhs);
  out.status = interior_uw <= rhs ? Status::Pass : Status::Fail;
  return out;
}

CheckReport curvature_domination_check(const SolveReport& rep) {
  CheckReport out;
  out.check_name = "curvature_domination";
  out.citation = "interior principal curvatures controlled by the boundary band";
  const double ratio = rep.kappa_max / (1.0 + rep.band_kappa_max);
  out.measured = {{"kappa_interior_max", rep.kappa_max},
                  {"kappa_band_max", rep.band_kappa_max},
                  {"ratio", ratio}};
  out.bound = "ratio reported, no asserted constant";
  out.status = Status::Observational;
  return out;
}

CheckReport interior_bound_HnHn1(const ScalarField& solution,
                                 const CurvatureSpec& spec, double theta) {
  CheckReport out;
  out.check_name = "interior_bound_top_quotient";
  out.citation = "top quotient identities: sum f_i in [1,n], sum kappa^2 f_i = f^2";

  if (!(spec.is_quotient() && spec.l() == spec.n() - 1)) {
    out.status = Status::Observational;
    out.bound = "only defined for the top quotient l = n-1";
    return out;
  }
  const int n = spec.n();
  const auto& geom = *solution.geom;
  const double sigma = solution.sigma;
  if (theta <= 0) theta = solution.values.maxCoeff() / 4.0;

  double min_sum_fi = 1e300, max_sum_fi = -1e300;
  double worst_k2_rel = 0;
  double trunc_kappa_max = 0;  // max kappa over { u >= theta }
  bool cone_ok = true;
  for (int k = 0; k < geom.num_inside(); ++k) {
    auto sp = hypgeo::hyperbolic_curvatures(solver::discretize(solution, k));
    if (sp.kappa_hyp.minCoeff() <= 0) {
      cone_ok = false;
      continue;
    }
    Lambda lam(sp.kappa_hyp);
    const double sfi = symfunc::sum_fi_closed(spec, lam);
    const double sk2 = symfunc::sum_lambda2_fi_closed(spec, lam);
    min_sum_fi = std::min(min_sum_fi, sfi);
    max_sum_fi = std::max(max_sum_fi, sfi);
    worst_k2_rel = std::max(worst_k2_rel,
                            std::abs(sk2 - sigma * sigma) / (sigma * sigma));
    if (solution.values[k] >= theta)
      trunc_kappa_max = std::max(trunc_kappa_max, sp.kappa_hyp.maxCoeff());
  }

  // sum kappa^2 f_i equals f^2; at the discrete solution f = sigma only up
  // to the residual, so the identity is checked with a matching tolerance.
  const double tol = 1e-6;
  out.measured = {{"min_sum_fi", min_sum_fi},
                  {"max_sum_fi", max_sum_fi},
                  {"worst_rel_sum_kappa2_fi", worst_k2_rel},
                  {"theta", theta},
                  {"truncated_kappa_max", trunc_kappa_max}};
  out.bound = "1 - 1e-9 <= sum f_i <= n + 1e-9, rel defect <= " + fmt(tol);
  out.status = (cone_ok && min_sum_fi >= 1.0 - 1e-9 &&
                max_sum_fi <= n + 1e-9 && worst_k2_rel <= tol)
                   ? Status::Pass
                   : Status::Fail;
  return out;
}

CheckReport uniqueness_margin_check(const CurvatureSpec& spec,
                                    std::uint64_t seed, int samples) {
  CheckReport out;
  out.check_name = "uniqueness_margin:" + spec.describe();
  out.citation = "sum f_i - sum kappa^2 f_i > 0 where f < 1, certified classes";

  const int n = spec.n();
  double min_margin = 1e300;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd lam = symfunc::sample_cone(n, seed, s);
    // The margin statement lives on {f < 1}; f is homogeneous of degree
    // one, so rescale each sample onto the level set f = 0.9.
    const double f0 = symfunc::f_eval(spec, Lambda(lam));
    lam *= 0.9 / f0;
    min_margin = std::min(min_margin,
                          symfunc::uniqueness_margin(spec, Lambda(lam)));
  }
  out.measured = {{"min_margin", min_margin},
                  {"samples", static_cast<double>(samples)}};
  if (spec.uniqueness_class()) {
    out.bound = "min_margin > 0";
    out.status = min_margin > 0 ? Status::Pass : Status::Fail;
  } else {
    out.bound = "margin reported only; class not certified";
    out.status = Status::Observational;
  }
  return out;
}

std::vector<CheckReport> run_structure_suite(
    const std::vector<CurvatureSpec>& specs, std::uint64_t seed,
    int samples_per_spec) {
  std::vector<CheckReport> out;
  std::uint64_t s = seed;
  for (const auto& spec : specs) {
    auto rep = symfunc::check_structure(spec, samples_per_spec, s++);
    CheckReport c;
    c.check_name = "structure:" + spec.describe();
    c.citation = "positivity, monotonicity, concavity, homogeneity of f";
    c.measured = {{"worst_min_grad", rep.worst_min_grad},
                  {"worst_hess_eig", rep.worst_hess_eig},
                  {"worst_homogeneity", rep.worst_homogeneity},
                  {"worst_sum_fi", rep.worst_sum_fi},
                  {"violations", static_cast<double>(rep.violations)}};
    c.bound = "all structural predicates hold on every sample";
    c.status = rep.pass ? Status::Pass : Status::Fail;
    if (!rep.pass && !rep.failures.empty()) c.bound += "; first: " + rep.failures.front();
    out.push_back(std::move(c));

    if (spec.is_quotient())
      out.push_back(uniqueness_margin_check(spec, s++, samples_per_spec));
  }
  return out;
}

std::string csv_header() { return "check,status,measured,bound,citation"; }

std::string to_csv_row(const CheckReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << r.check_name << ',' << status_name(r.status) << ",\"";
  for (std::size_t i = 0; i < r.measured.size(); ++i) {
    if (i) os << "; ";
    os << r.measured[i].first << '=' << r.measured[i].second;
  }
  os << "\",\"" << r.bound << "\",\"" << r.citation << '"';
  return os.str();
}

}  // namespace hypcurv::verify

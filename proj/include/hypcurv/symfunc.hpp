#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

// Algebra of normalized elementary symmetric polynomials and the
// curvature functions built from their quotients.  Everything here is a
// pure function of its arguments; all state is in the returned values.

namespace hypcurv::symfunc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Candidate principal curvatures.  Valid only in the positive cone
// (every entry > 0); constructors and evaluators enforce this.
struct Lambda {
  VectorXd values;

  explicit Lambda(VectorXd v);
  int n() const { return static_cast<int>(values.size()); }
};

// Throws std::domain_error unless every entry is strictly positive.
void require_positive_cone(const VectorXd& lambda);

// Curvature function: either a single quotient (H_n / H_l)^{1/(n-l)} or a
// weighted concave sum / product of sub-specs.  Weights are positive and
// sum to 1 (checked to 1e-12).
class CurvatureSpec {
 public:
  enum class Kind { Quotient, ConcaveSum, ConcaveProduct };

  static CurvatureSpec quotient(int n, int l);
  static CurvatureSpec concave_sum(std::vector<std::pair<double, CurvatureSpec>> parts);
  static CurvatureSpec concave_product(std::vector<std::pair<double, CurvatureSpec>> parts);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  int l() const { return l_; }  // quotient only
  const std::vector<std::pair<double, CurvatureSpec>>& parts() const { return parts_; }

  bool is_quotient() const { return kind_ == Kind::Quotient; }
  // True for the specs with a certified uniqueness margin: quotients with
  // l = n-1 or l = n-2.
  bool uniqueness_class() const;

  std::string describe() const;

 private:
  CurvatureSpec() = default;
  Kind kind_ = Kind::Quotient;
  int n_ = 0;
  int l_ = 0;
  std::vector<std::pair<double, CurvatureSpec>> parts_;
};

// Value, gradient and (optional) Hessian of f at lambda.
struct FEval {
  double value = 0;
  VectorXd grad;
  MatrixXd hess;  // empty unless requested
};

// e_l(lambda) / C(n,l); H_0 = 1.  Throws std::domain_error for l outside
// [0, n].  Stable product recurrence, no subset enumeration.
double normalized_elementary(const Lambda& lambda, int l);

// All normalized H_0..H_n in one recurrence pass.
VectorXd normalized_elementary_all(const VectorXd& lambda);

double f_eval(const CurvatureSpec& spec, const Lambda& lambda);

// Closed-form gradient (quotients via the log-derivative of e_n/e_l with
// one synthetic-division step per deleted variable; combinators by chain
// rule).  Entries are strictly positive in the cone.
VectorXd f_grad(const CurvatureSpec& spec, const Lambda& lambda);

// Symmetric matrix of second partials by central finite differences of
// the closed-form gradient.  Step is relative per coordinate.
MatrixXd f_hess(const CurvatureSpec& spec, const Lambda& lambda);

FEval f_full(const CurvatureSpec& spec, const Lambda& lambda, bool with_hess = false);

// Closed forms for quotient specs (throw std::invalid_argument otherwise).
// sum_i f_i and sum_i lambda_i^2 f_i without forming the gradient.
double sum_fi_closed(const CurvatureSpec& spec, const Lambda& lambda);
double sum_lambda2_fi_closed(const CurvatureSpec& spec, const Lambda& lambda);

// sum f_i - sum lambda_i^2 f_i, evaluated in closed form.  Positive on
// {f < 1} for the uniqueness-class quotients.
double uniqueness_margin(const CurvatureSpec& spec, const Lambda& lambda);

// Newton-Maclaurin chain H_{l-1}/H_l <= H_{n-1}/H_n at lambda.
bool maclaurin_check(const Lambda& lambda, int l);

// Randomized structure report: positivity, monotonicity, concavity,
// homogeneity, normalization, the Maclaurin bound, sum f_i >= 1, and the
// measured large-argument limit.  Log-uniform samples on [1e-2, 1e2]^n.
struct StructureReport {
  std::string spec;
  int samples = 0;
  int violations = 0;

  double worst_min_grad = 1e300;      // min over samples of min_i f_i
  double worst_min_f = 1e300;         // min over samples of f
  double worst_hess_eig = -1e300;     // max over samples of scaled top Hessian eigenvalue
  double worst_homogeneity = 0;       // max relative homogeneity defect
  double worst_maclaurin = -1e300;    // max of f - (1/n) sum lambda_i
  double worst_sum_fi = 1e300;        // min over samples of sum f_i
  double normalization_defect = 0;    // |f(1,...,1) - 1|
  double limit_value = 0;             // f(1,...,1,1+R) at R = 1e6
  double limit_target = 0;            // (n/l)^{1/(n-l)} for quotients with l >= 1, else 0
  bool limit_target_known = false;

  bool pass = false;
  std::vector<std::string> failures;
};

StructureReport check_structure(const CurvatureSpec& spec, int sample_count,
                                std::uint64_t rng_seed);

// Log-uniform sample in [1e-2, 1e2]^n; shared by tests and the suite.
VectorXd sample_cone(int n, std::uint64_t seed, std::uint64_t index);

}  // namespace hypcurv::symfunc

#include "hypcurv/symfunc.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hypcurv::symfunc {

namespace {

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
  return r;
}

// Unnormalized elementary symmetric polynomials e_0..e_n.
VectorXd elementary_all(const VectorXd& lambda) {
  const int n = static_cast<int>(lambda.size());
  VectorXd e = VectorXd::Zero(n + 1);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k >= 1; --k) e[k] += lambda[i] * e[k - 1];
  return e;
}

// One synthetic-division step: e_k of the set with lambda_i deleted.
VectorXd elementary_deleted(const VectorXd& e, double lam_i) {
  const int n = static_cast<int>(e.size()) - 1;
  VectorXd d = VectorXd::Zero(n);
  d[0] = 1.0;
  for (int k = 1; k < n; ++k) d[k] = e[k] - lam_i * d[k - 1];
  return d;
}

// SplitMix64; deterministic per-sample streams for parallel shards.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  return double(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace

Lambda::Lambda(VectorXd v) : values(std::move(v)) {
  if (values.size() < 1) throw std::invalid_argument("Lambda: n >= 1 required");
  require_positive_cone(values);
}

void require_positive_cone(const VectorXd& lambda) {
  for (int i = 0; i < lambda.size(); ++i)
    if (!(lambda[i] > 0.0))
      throw std::domain_error("lambda outside the positive cone (entry " +
                              std::to_string(i) + " = " + std::to_string(lambda[i]) + ")");
}

CurvatureSpec CurvatureSpec::quotient(int n, int l) {
  if (n < 1) throw std::invalid_argument("quotient: n >= 1 required");
  if (l < 0 || l >= n) throw std::invalid_argument("quotient: 0 <= l < n required");
  CurvatureSpec s;
  s.kind_ = Kind::Quotient;
  s.n_ = n;
  s.l_ = l;
  return s;
}

static void check_parts(const std::vector<std::pair<double, CurvatureSpec>>& parts) {
  if (parts.empty()) throw std::invalid_argument("combinator: no parts");
  double wsum = 0;
  const int n = parts.front().second.n();
  for (const auto& [w, sub] : parts) {
    if (!(w > 0)) throw std::invalid_argument("combinator: weights must be positive");
    if (sub.n() != n) throw std::invalid_argument("combinator: mismatched dimensions");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("combinator: weights must sum to 1");
}

CurvatureSpec CurvatureSpec::concave_sum(std::vector<std::pair<double, CurvatureSpec>> parts) {
  check_parts(parts);
  CurvatureSpec s;
  s.kind_ = Kind::ConcaveSum;
  s.n_ = parts.front().second.n();
  s.parts_ = std::move(parts);
  return s;
}

CurvatureSpec CurvatureSpec::concave_product(std::vector<std::pair<double, CurvatureSpec>> parts) {
  check_parts(parts);
  CurvatureSpec s;
  s.kind_ = Kind::ConcaveProduct;
  s.n_ = parts.front().second.n();
  s.parts_ = std::move(parts);
  return s;
}

bool CurvatureSpec::uniqueness_class() const {
  return is_quotient() && (l_ == n_ - 1 || l_ == n_ - 2);
}

std::string CurvatureSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Quotient:
      os << "quotient(" << n_ << "," << l_ << ")";
      break;
    case Kind::ConcaveSum:
    case Kind::ConcaveProduct:
      os << (kind_ == Kind::ConcaveSum ? "sum(" : "product(");
      for (size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << ",";
        os << parts_[i].first << "*" << parts_[i].second.describe();
      }
      os << ")";
      break;
  }
  return os.str();
}

double normalized_elementary(const Lambda& lambda, int l) {
  const int n = lambda.n();
  if (l < 0 || l > n) throw std::domain_error("normalized_elementary: l outside [0, n]");
  VectorXd e = elementary_all(lambda.values);
  return e[l] / binom(n, l);
}

VectorXd normalized_elementary_all(const VectorXd& lambda) {
  const int n = static_cast<int>(lambda.size());
  VectorXd e = elementary_all(lambda);
  for (int l = 0; l <= n; ++l) e[l] /= binom(n, l);
  return e;
}

static double quotient_value(int n, int l, const VectorXd& e) {
  // (H_n / H_l)^{1/(n-l)} with H_n = e_n, H_l = e_l / C(n,l).
  double hn = e[n];
  double hl = e[l] / binom(n, l);
  return std::pow(hn / hl, 1.0 / double(n - l));
}

double f_eval(const CurvatureSpec& spec, const Lambda& lambda) {
  if (lambda.n() != spec.n())
    throw std::invalid_argument("f_eval: lambda dimension mismatch");
  switch (spec.kind()) {
    case CurvatureSpec::Kind::Quotient:
      return quotient_value(spec.n(), spec.l(), elementary_all(lambda.values));
    case CurvatureSpec::Kind::ConcaveSum: {
      double v = 0;
      for (const auto& [w, sub] : spec.parts()) v += w * f_eval(sub, lambda);
      return v;
    }
    case CurvatureSpec::Kind::ConcaveProduct: {
      double v = 1;
      for (const auto& [w, sub] : spec.parts()) v *= std::pow(f_eval(sub, lambda), w);
      return v;
    }
  }
  return 0;  // unreachable
}

VectorXd f_grad(const CurvatureSpec& spec, const Lambda& lambda) {
  const int n = spec.n();
  if (lambda.n() != n) throw std::invalid_argument("f_grad: lambda dimension mismatch");
  switch (spec.kind()) {
    case CurvatureSpec::Kind::Quotient: {
      const int l = spec.l();
      VectorXd e = elementary_all(lambda.values);
      const double f = quotient_value(n, l, e);
      VectorXd g(n);
      for (int i = 0; i < n; ++i) {
        // d log f / d lambda_i = (1/lambda_i - e_{l-1;i}/e_l) / (n-l),
        // with the deleted-variable term absent at l = 0.
        double term = 1.0 / lambda.values[i];
        if (l >= 1) {
          VectorXd d = elementary_deleted(e, lambda.values[i]);
          term -= d[l - 1] / e[l];
        }
        g[i] = f / double(n - l) * term;
      }
      return g;
    }
    case CurvatureSpec::Kind::ConcaveSum: {
      VectorXd g = VectorXd::Zero(n);
      for (const auto& [w, sub] : spec.parts()) g += w * f_grad(sub, lambda);
      return g;
    }
    case CurvatureSpec::Kind::ConcaveProduct: {
      const double f = f_eval(spec, lambda);
      VectorXd g = VectorXd::Zero(n);
      for (const auto& [w, sub] : spec.parts())
        g += (w / f_eval(sub, lambda)) * f_grad(sub, lambda);
      return f * g;
    }
  }
  return VectorXd();  // unreachable
}

MatrixXd f_hess(const CurvatureSpec& spec, const Lambda& lambda) {
  const int n = spec.n();
  MatrixXd h(n, n);
  for (int j = 0; j < n; ++j) {
    const double step = 1e-5 * lambda.values[j];
    VectorXd lp = lambda.values, lm = lambda.values;
    lp[j] += step;
    lm[j] -= step;
    VectorXd col = (f_grad(spec, Lambda(lp)) - f_grad(spec, Lambda(lm))) / (2 * step);
    h.col(j) = col;
  }
  return 0.5 * (h + h.transpose());
}

FEval f_full(const CurvatureSpec& spec, const Lambda& lambda, bool with_hess) {
  FEval out;
  out.value = f_eval(spec, lambda);
  out.grad = f_grad(spec, lambda);
  if (with_hess) out.hess = f_hess(spec, lambda);
  return out;
}

static void require_quotient(const CurvatureSpec& spec, const char* who) {
  if (!spec.is_quotient())
    throw std::invalid_argument(std::string(who) + ": quotient spec required");
}

double sum_fi_closed(const CurvatureSpec& spec, const Lambda& lambda) {
  require_quotient(spec, "sum_fi_closed");
  const int n = spec.n(), l = spec.l();
  VectorXd H = normalized_elementary_all(lambda.values);
  const double f = std::pow(H[n] / H[l], 1.0 / double(n - l));
  double s = double(n) * H[n - 1] / H[n];
  if (l >= 1) s -= double(l) * H[l - 1] / H[l];
  return f / double(n - l) * s;
}

double sum_lambda2_fi_closed(const CurvatureSpec& spec, const Lambda& lambda) {
  require_quotient(spec, "sum_lambda2_fi_closed");
  const int n = spec.n(), l = spec.l();
  VectorXd H = normalized_elementary_all(lambda.values);
  const double f = std::pow(H[n] / H[l], 1.0 / double(n - l));
  return f * H[l + 1] / H[l];
}

double uniqueness_margin(const CurvatureSpec& spec, const Lambda& lambda) {
  require_quotient(spec, "uniqueness_margin");
  const int n = spec.n(), l = spec.l();
  VectorXd H = normalized_elementary_all(lambda.values);
  const double f = std::pow(H[n] / H[l], 1.0 / double(n - l));
  double s = double(n) * H[n - 1] / H[n];
  if (l >= 1) s -= double(l) * H[l - 1] / H[l];
  s -= double(n - l) * H[l + 1] / H[l];
  return f / double(n - l) * s;
}

bool maclaurin_check(const Lambda& lambda, int l) {
  const int n = lambda.n();
  if (l < 1 || l > n - 1) throw std::domain_error("maclaurin_check: 1 <= l <= n-1 required");
  VectorXd H = normalized_elementary_all(lambda.values);
  // H_{l-1}/H_l <= H_{n-1}/H_n, equality at the umbilic point only.
  return H[l - 1] / H[l] <= H[n - 1] / H[n] * (1 + 1e-12);
}

VectorXd sample_cone(int n, std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  VectorXd lam(n);
  for (int i = 0; i < n; ++i) {
    double t = uniform01(state);  // log-uniform on [1e-2, 1e2]
    lam[i] = std::pow(10.0, -2.0 + 4.0 * t);
  }
  return lam;
}

StructureReport check_structure(const CurvatureSpec& spec, int sample_count,
                                std::uint64_t rng_seed) {
  if (sample_count < 1) throw std::invalid_argument("check_structure: sample_count >= 1");
  const int n = spec.n();
  StructureReport rep;
  rep.spec = spec.describe();
  rep.samples = sample_count;

  int violations = 0;
  double worst_min_grad = 1e300, worst_min_f = 1e300, worst_hess = -1e300;
  double worst_hom = 0, worst_mac = -1e300, worst_sumfi = 1e300;

#pragma omp parallel for schedule(static)                                          \
    reduction(+ : violations) reduction(min : worst_min_grad, worst_min_f, worst_sumfi) \
    reduction(max : worst_hess, worst_hom, worst_mac)
  for (int k = 0; k < sample_count; ++k) {
    Lambda lam(sample_cone(n, rng_seed, std::uint64_t(k)));
    const double f = f_eval(spec, lam);
    VectorXd g = f_grad(spec, lam);
    bool bad = false;

    worst_min_f = std::min(worst_min_f, f);
    worst_min_grad = std::min(worst_min_grad, g.minCoeff());
    if (!(f > 0) || !(g.minCoeff() > 0)) bad = true;

    for (double t : {0.5, 2.0}) {
      double ft = f_eval(spec, Lambda(t * lam.values));
      double defect = std::abs(ft - t * f) / (t * f);
      worst_hom = std::max(worst_hom, defect);
      if (defect > 1e-10) bad = true;
    }

    double mac = f - lam.values.mean();
    worst_mac = std::max(worst_mac, mac);
    if (mac > 1e-12 * lam.values.mean()) bad = true;

    double sfi = g.sum();
    worst_sumfi = std::min(worst_sumfi, sfi);
    if (sfi < 1.0 - 1e-9) bad = true;

    MatrixXd h = f_hess(spec, lam);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h, Eigen::EigenvaluesOnly);
    double hnorm = es.eigenvalues().cwiseAbs().maxCoeff();
    double scaled = es.eigenvalues().maxCoeff() / (1.0 + hnorm);
    worst_hess = std::max(worst_hess, scaled);
    if (scaled > 1e-8) bad = true;

    if (bad) ++violations;
  }

  rep.violations = violations;
  rep.worst_min_grad = worst_min_grad;
  rep.worst_min_f = worst_min_f;
  rep.worst_hess_eig = worst_hess;
  rep.worst_homogeneity = worst_hom;
  rep.worst_maclaurin = worst_mac;
  rep.worst_sum_fi = worst_sumfi;

  rep.normalization_defect = std::abs(f_eval(spec, Lambda(VectorXd::Ones(n))) - 1.0);
  if (rep.normalization_defect > 1e-12) {
    rep.failures.push_back("normalization defect " + std::to_string(rep.normalization_defect));
  }

  {
    VectorXd lam = VectorXd::Ones(n);
    lam[n - 1] += 1e6;
    rep.limit_value = f_eval(spec, Lambda(lam));
    if (spec.is_quotient() && spec.l() >= 1) {
      rep.limit_target = std::pow(double(n) / double(spec.l()), 1.0 / double(n - spec.l()));
      rep.limit_target_known = true;
      if (std::abs(rep.limit_value - rep.limit_target) > 1e-3)
        rep.failures.push_back("large-argument limit off target");
    }
  }

  if (violations > 0)
    rep.failures.push_back(std::to_string(violations) + " sample violations");
  rep.pass = rep.failures.empty();
  return rep;
}

}  // namespace hypcurv::symfunc

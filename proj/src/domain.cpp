#include "hypcurv/domain.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hypcurv::domain {

namespace {

Vector2d level_grad_fd(const DomainSpec& d, const Vector2d& x) {
  const double h = 1e-7 * (1.0 + x.norm());
  Vector2d g;
  for (int k = 0; k < 2; ++k) {
    Vector2d xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (d.level(xp) - d.level(xm)) / (2 * h);
  }
  return g;
}

double point_segment_distance(const Vector2d& p, const Vector2d& a, const Vector2d& b) {
  Vector2d ab = b - a;
  double t = ab.squaredNorm() > 0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

DomainSpec DomainSpec::ball(double radius) {
  if (!(radius > 0)) throw std::invalid_argument("ball: radius > 0 required");
  DomainSpec d;
  d.kind_ = Kind::Ball;
  d.a_ = radius;
  d.box_lo_ = Vector2d(-radius, -radius);
  d.box_hi_ = Vector2d(radius, radius);
  d.center_ = Vector2d::Zero();
  d.circumradius_ = radius;
  d.r1_ = radius;
  return d;
}

DomainSpec DomainSpec::ellipse(double a, double b) {
  if (!(a > 0 && b > 0)) throw std::invalid_argument("ellipse: semi-axes > 0 required");
  DomainSpec d;
  d.kind_ = Kind::Ellipse;
  d.a_ = a;
  d.b_ = b;
  d.box_lo_ = Vector2d(-a, -b);
  d.box_hi_ = Vector2d(a, b);
  d.center_ = Vector2d::Zero();
  d.circumradius_ = std::max(a, b);
  // Curvature radius at the blunt end; an exterior sphere of this radius
  // rolls around the whole boundary.
  double mx = std::max(a, b), mn = std::min(a, b);
  d.r1_ = mn * mn / mx;
  return d;
}

DomainSpec DomainSpec::superellipse(double a, double b, double p) {
  if (!(a > 0 && b > 0 && p >= 2))
    throw std::invalid_argument("superellipse: a,b > 0 and p >= 2 required");
  DomainSpec d;
  d.kind_ = Kind::Superellipse;
  d.a_ = a;
  d.b_ = b;
  d.p_ = p;
  d.box_lo_ = Vector2d(-a, -b);
  d.box_hi_ = Vector2d(a, b);
  d.center_ = Vector2d::Zero();
  d.circumradius_ = std::hypot(a, b);
  double mx = std::max(a, b), mn = std::min(a, b);
  d.r1_ = 0.5 * mn * mn / mx;
  return d;
}

DomainSpec DomainSpec::polygon(std::vector<Vector2d> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon: >= 3 vertices required");
  DomainSpec d;
  d.kind_ = Kind::Polygon;
  d.verts_ = std::move(vertices);
  Vector2d lo = d.verts_[0], hi = d.verts_[0], c = Vector2d::Zero();
  for (const auto& v : d.verts_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
    c += v;
  }
  d.box_lo_ = lo;
  d.box_hi_ = hi;
  d.center_ = c / double(d.verts_.size());
  double r = 0;
  for (const auto& v : d.verts_) r = std::max(r, (v - d.center_).norm());
  d.circumradius_ = r;
  d.r1_ = 0.25 * (hi - lo).minCoeff();
  return d;
}

double DomainSpec::level(const Vector2d& x) const {
  switch (kind_) {
    case Kind::Ball:
      return x.norm() - a_;
    case Kind::Ellipse: {
      double q = std::hypot(x[0] / a_, x[1] / b_);
      return (q - 1.0) * std::min(a_, b_);
    }
    case Kind::Superellipse: {
      double q = std::pow(std::abs(x[0] / a_), p_) + std::pow(std::abs(x[1] / b_), p_);
      return (std::pow(q, 1.0 / p_) - 1.0) * std::min(a_, b_);
    }
    case Kind::Polygon: {
      // Even-odd crossing for the sign, segment distance for magnitude.
      double dist = std::numeric_limits<double>::infinity();
      bool in = false;
      const size_t m = verts_.size();
      for (size_t i = 0, j = m - 1; i < m; j = i++) {
        const Vector2d &vi = verts_[i], &vj = verts_[j];
        dist = std::min(dist, point_segment_distance(x, vi, vj));
        if ((vi[1] > x[1]) != (vj[1] > x[1])) {
          double t = (x[1] - vi[1]) / (vj[1] - vi[1]);
          if (x[0] < vi[0] + t * (vj[0] - vi[0])) in = !in;
        }
      }
      return in ? -dist : dist;
    }
  }
  return 0;
}

double DomainSpec::signed_distance(const Vector2d& x) const {
  if (kind_ == Kind::Ball || kind_ == Kind::Polygon) return level(x);
  double phi = level(x);
  double gn = level_grad_fd(*this, x).norm();
  return gn > 1e-12 ? phi / gn : phi;
}

Vector2d DomainSpec::outward_normal(const Vector2d& x) const {
  if (kind_ == Kind::Ball) {
    double r = x.norm();
    return r > 1e-14 ? Vector2d(x / r) : Vector2d(1, 0);
  }
  Vector2d g = level_grad_fd(*this, x);
  double gn = g.norm();
  return gn > 1e-14 ? Vector2d(g / gn) : Vector2d(1, 0);
}

Vector2d DomainSpec::boundary_foot(const Vector2d& x) const {
  Vector2d p = x;
  for (int it = 0; it < 30; ++it) {
    double phi = level(p);
    if (std::abs(phi) < 1e-13) break;
    Vector2d g = level_grad_fd(*this, p);
    double g2 = g.squaredNorm();
    if (g2 < 1e-20) break;
    p -= (phi / g2) * g;
  }
  return p;
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Ball: os << "ball(" << a_ << ")"; break;
    case Kind::Ellipse: os << "ellipse(" << a_ << "," << b_ << ")"; break;
    case Kind::Superellipse: os << "superellipse(" << a_ << "," << b_ << "," << p_ << ")"; break;
    case Kind::Polygon: os << "polygon(" << verts_.size() << " vertices)"; break;
  }
  return os.str();
}

}  // namespace hypcurv::domain

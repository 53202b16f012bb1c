#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hypcurv::domain {

using Eigen::Vector2d;

// Bounded planar domain described by a level function phi (negative
// inside).  For non-polygonal kinds phi is not a true distance; signed
// distance is recovered locally as phi / |grad phi|, which is what the
// grid closure and the boundary probes need.
class DomainSpec {
 public:
  enum class Kind { Ball, Ellipse, Superellipse, Polygon };

  static DomainSpec ball(double radius);
  static DomainSpec ellipse(double a, double b);
  static DomainSpec superellipse(double a, double b, double p);
  static DomainSpec polygon(std::vector<Vector2d> vertices);

  Kind kind() const { return kind_; }
  double level(const Vector2d& x) const;       // negative inside
  double signed_distance(const Vector2d& x) const;
  Vector2d outward_normal(const Vector2d& x) const;
  // Nearest boundary point, by damped Newton along the level gradient.
  Vector2d boundary_foot(const Vector2d& x) const;

  bool inside(const Vector2d& x) const { return level(x) < 0; }

  // Axis-aligned bounding box.
  Vector2d box_lo() const { return box_lo_; }
  Vector2d box_hi() const { return box_hi_; }

  // Center and radius of a circumscribed ball.
  Vector2d circumcenter() const { return center_; }
  double circumradius() const { return circumradius_; }

  // Conservative radius of exterior tangent spheres; enters the boundary
  // angle bound.  Larger values tighten the bound, so each kind reports
  // a value it can certify.
  double exterior_tangent_radius() const { return r1_; }

  std::string describe() const;

 private:
  Kind kind_ = Kind::Ball;
  double a_ = 1, b_ = 1, p_ = 2;
  std::vector<Vector2d> verts_;
  Vector2d box_lo_, box_hi_, center_;
  double circumradius_ = 1, r1_ = 1;
};

}  // namespace hypcurv::domain

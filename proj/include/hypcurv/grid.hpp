#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <vector>

#include "hypcurv/domain.hpp"

namespace hypcurv::grid {

using Eigen::Vector2d;
using Eigen::VectorXd;

// Eight stencil directions around a node, axis ones first.
inline constexpr std::array<std::array<int, 2>, 8> kDirs = {
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}};
enum Dir { E = 0, W, N, S, NE, SW, SE, NW };

// A stencil slot is either an interior unknown or a ghost: the boundary
// cuts the segment to the neighbor at fraction theta, and the ghost value
// is the linear extension of the Dirichlet value through the cut,
//   u_ghost = u_center + (eps - u_center) / theta.
struct NeighborRef {
  int unknown = -1;      // >= 0: interior unknown index
  double theta = 1.0;    // ghost only
  bool ghost() const { return unknown < 0; }
};

// Uniform Cartesian lattice over the padded bounding box of a domain,
// with per-node inside masks and precomputed boundary cuts.  Immutable
// after construction; shared by every field on it.
class MaskedGrid {
 public:
  MaskedGrid(domain::DomainSpec dom, double h, int pad_cells = 3);

  const domain::DomainSpec& dom() const { return dom_; }
  double h() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int node_id(int i, int j) const { return j * nx_ + i; }
  Vector2d pos(int i, int j) const { return lo_ + h_ * Vector2d(i, j); }

  int num_inside() const { return static_cast<int>(inside_nodes_.size()); }
  const std::vector<std::pair<int, int>>& inside_nodes() const { return inside_nodes_; }
  int unknown_of(int i, int j) const { return unknown_[node_id(i, j)]; }
  bool is_inside(int i, int j) const { return unknown_[node_id(i, j)] >= 0; }
  // Inside node within `band_width` of the boundary (has a cut neighbor or
  // small |sdf|).
  bool in_band(int k) const { return band_[k]; }

  const std::array<NeighborRef, 8>& stencil(int k) const { return stencil_[k]; }
  Vector2d inside_pos(int k) const {
    auto [i, j] = inside_nodes_[k];
    return pos(i, j);
  }
  double sdf_at(int k) const { return sdf_inside_[k]; }

 private:
  domain::DomainSpec dom_;
  double h_;
  Vector2d lo_;
  int nx_ = 0, ny_ = 0;
  std::vector<int> unknown_;  // per node, -1 outside
  std::vector<std::pair<int, int>> inside_nodes_;
  std::vector<std::array<NeighborRef, 8>> stencil_;  // per inside node
  std::vector<char> band_;
  std::vector<double> sdf_inside_;
};

// Discrete height function on a masked grid.
struct ScalarField {
  std::shared_ptr<const MaskedGrid> geom;
  VectorXd values;       // one per inside node
  double dirichlet = 0;  // boundary value eps
  double sigma = 0;

  ScalarField() = default;
  ScalarField(std::shared_ptr<const MaskedGrid> g, double eps, double sigma_)
      : geom(std::move(g)), values(VectorXd::Zero(geom->num_inside())),
        dirichlet(eps), sigma(sigma_) {}
};

// Bilinear interpolation of a field at an arbitrary point; returns false
// if any of the four surrounding nodes is outside the domain.
bool interpolate(const ScalarField& f, const Vector2d& x, double& out);

}  // namespace hypcurv::grid

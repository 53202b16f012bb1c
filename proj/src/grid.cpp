#include "hypcurv/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace hypcurv::grid {

MaskedGrid::MaskedGrid(domain::DomainSpec dom, double h, int pad_cells)
    : dom_(std::move(dom)), h_(h) {
  if (!(h > 0)) throw std::invalid_argument("MaskedGrid: h > 0 required");
  Vector2d lo = dom_.box_lo().array() - pad_cells * h;
  Vector2d hi = dom_.box_hi().array() + pad_cells * h;
  // Snap the origin so node coordinates are reproducible across runs.
  lo_ = (lo / h).array().floor() * h;
  nx_ = int(std::ceil((hi[0] - lo_[0]) / h)) + 1;
  ny_ = int(std::ceil((hi[1] - lo_[1]) / h)) + 1;

  unknown_.assign(size_t(nx_) * ny_, -1);
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i)
      if (dom_.inside(pos(i, j))) {
        if (i < 1 || j < 1 || i >= nx_ - 1 || j >= ny_ - 1)
          throw std::runtime_error("MaskedGrid: stencil leaves the bounding box");
        unknown_[node_id(i, j)] = int(inside_nodes_.size());
        inside_nodes_.emplace_back(i, j);
      }
  if (inside_nodes_.empty())
    throw std::runtime_error("MaskedGrid: no interior nodes at this resolution");

  stencil_.resize(inside_nodes_.size());
  band_.assign(inside_nodes_.size(), 0);
  sdf_inside_.resize(inside_nodes_.size());
  for (size_t k = 0; k < inside_nodes_.size(); ++k) {
    auto [i, j] = inside_nodes_[k];
    Vector2d xc = pos(i, j);
    sdf_inside_[k] = dom_.signed_distance(xc);
    bool cut = false;
    for (int d = 0; d < 8; ++d) {
      int ii = i + kDirs[d][0], jj = j + kDirs[d][1];
      int u = unknown_[node_id(ii, jj)];
      if (u >= 0) {
        stencil_[k][d].unknown = u;
        continue;
      }
      cut = true;
      // Bisect the level function along the segment to locate the cut.
      Vector2d xn = pos(ii, jj);
      double a = 0, b = 1;
      for (int it = 0; it < 50; ++it) {
        double m = 0.5 * (a + b);
        (dom_.level(xc + m * (xn - xc)) < 0 ? a : b) = m;
      }
      stencil_[k][d].unknown = -1;
      stencil_[k][d].theta = std::max(0.5 * (a + b), 1e-2);
    }
    band_[k] = cut || sdf_inside_[k] > -2.0 * h_;
  }
}

bool interpolate(const ScalarField& f, const Vector2d& x, double& out) {
  const MaskedGrid& g = *f.geom;
  double fx = (x[0] - g.pos(0, 0)[0]) / g.h();
  double fy = (x[1] - g.pos(0, 0)[1]) / g.h();
  int i = int(std::floor(fx)), j = int(std::floor(fy));
  if (i < 0 || j < 0 || i + 1 >= g.nx() || j + 1 >= g.ny()) return false;
  double ax = fx - i, ay = fy - j;
  double v[4];
  int ids[4][2] = {{i, j}, {i + 1, j}, {i, j + 1}, {i + 1, j + 1}};
  for (int c = 0; c < 4; ++c) {
    int u = g.unknown_of(ids[c][0], ids[c][1]);
    if (u < 0) return false;
    v[c] = f.values[u];
  }
  out = (1 - ax) * (1 - ay) * v[0] + ax * (1 - ay) * v[1] + (1 - ax) * ay * v[2] +
        ax * ay * v[3];
  return true;
}

}  // namespace hypcurv::grid

#include "hypcurv/mesh_export.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "hypcurv/hypgeo.hpp"

namespace hypcurv::mesh {

namespace {

// Fixed-format double so re-exports are byte-identical across platforms.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void export_mesh(const solver::ScalarField& field, const std::string& path,
                 bool with_sidecar) {
  const auto& geom = *field.geom;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_mesh: cannot open " + path);

  for (int k = 0; k < geom.num_inside(); ++k) {
    Eigen::Vector2d x = geom.inside_pos(k);
    out << "v " << num(x.x()) << ' ' << num(x.y()) << ' '
        << num(field.values[k]) << '\n';
  }

  auto vertex3 = [&](int k) {
    Eigen::Vector2d x = geom.inside_pos(k);
    return Eigen::Vector3d(x.x(), x.y(), field.values[k]);
  };

  // Cells with all four corners inside; split along the shorter 3-D
  // diagonal for a shape-independent, deterministic triangulation.
  for (int j = 0; j + 1 < geom.ny(); ++j)
    for (int i = 0; i + 1 < geom.nx(); ++i) {
      if (!geom.is_inside(i, j) || !geom.is_inside(i + 1, j) ||
          !geom.is_inside(i, j + 1) || !geom.is_inside(i + 1, j + 1))
        continue;
      int a = geom.unknown_of(i, j), b = geom.unknown_of(i + 1, j);
      int c = geom.unknown_of(i + 1, j + 1), d = geom.unknown_of(i, j + 1);
      double diag_ac = (vertex3(a) - vertex3(c)).norm();
      double diag_bd = (vertex3(b) - vertex3(d)).norm();
      if (diag_ac <= diag_bd) {
        out << "f " << a + 1 << ' ' << b + 1 << ' ' << c + 1 << '\n';
        out << "f " << a + 1 << ' ' << c + 1 << ' ' << d + 1 << '\n';
      } else {
        out << "f " << a + 1 << ' ' << b + 1 << ' ' << d + 1 << '\n';
        out << "f " << b + 1 << ' ' << c + 1 << ' ' << d + 1 << '\n';
      }
    }
  out.close();

  if (!with_sidecar) return;
  std::ofstream side(path + ".csv");
  if (!side) throw std::runtime_error("export_mesh: cannot open " + path + ".csv");
  side << "vertex,kappa_min,kappa_max,nu,eta\n";
  for (int k = 0; k < geom.num_inside(); ++k) {
    auto sp = hypgeo::hyperbolic_curvatures(solver::discretize(field, k));
    double u = field.values[k];
    side << k + 1 << ',' << num(sp.kappa_hyp.minCoeff()) << ','
         << num(sp.kappa_hyp.maxCoeff()) << ',' << num(sp.nu_up) << ','
         << num(sp.eta(field.sigma, u)) << '\n';
  }
}

}  // namespace hypcurv::mesh

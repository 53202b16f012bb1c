// Timing comparison of the parallel residual assembly against the serial
// reference path over increasing grid resolutions.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>

#include "hypcurv/solver.hpp"

using namespace hypcurv;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(int reps, const std::function<void()>& fn) {
  fn();  // warm up
  auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
  const auto spec = symfunc::CurvatureSpec::quotient(2, 1);
  std::printf("%8s %10s %12s %12s %8s %10s\n", "h", "nodes", "serial_ms",
              "parallel_ms", "speedup", "max_diff");
  for (double h : {1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512}) {
    auto geom = std::make_shared<grid::MaskedGrid>(domain::DomainSpec::ball(1.0), h);
    auto field = solver::initial_guess(geom, 0.5, 0.08);
    // Perturb so no special structure helps either path.
    for (int k = 0; k < geom->num_inside(); ++k) {
      auto p = geom->inside_pos(k);
      field.values[k] += 0.01 * std::sin(7 * p.x()) * std::cos(5 * p.y());
    }
    const int reps = h < 1.0 / 200 ? 5 : 20;
    const double ts = time_ms(reps, [&] { solver::assemble_residual_serial(field, spec); });
    const double tp = time_ms(reps, [&] { solver::assemble_residual(field, spec); });
    const auto rs = solver::assemble_residual_serial(field, spec);
    const auto rp = solver::assemble_residual(field, spec);
    const double diff = (rs.r - rp.r).cwiseAbs().maxCoeff();
    std::printf("%8.5f %10d %12.3f %12.3f %8.2f %10.2e\n", h,
                geom->num_inside(), ts, tp, ts / tp, diff);
  }
  return 0;
}

#pragma once

#include <string>

#include "hypcurv/solver.hpp"

namespace hypcurv::mesh {

// Plain-text triangle mesh of the graph: 'v x y u' lines for every inside
// node, 'f a b c' lines (1-based) for cells whose four corners are all
// inside, each cell split along its shorter 3-D diagonal.  Output is
// deterministic: the same field always produces byte-identical files.
// Also writes a per-vertex sidecar CSV (kappa_min, kappa_max, nu, eta)
// next to the mesh when `with_sidecar`.
void export_mesh(const solver::ScalarField& field, const std::string& path,
                 bool with_sidecar = true);

}  // namespace hypcurv::mesh

#pragma once

#include <vector>

#include "evstar/geometry.hpp"

namespace evstar {

/// Quasi-uniform set of unit direction vectors covering one hemisphere,
/// obtained by subdividing an icosahedron and keeping one representative of
/// every antipodal pair. Level L yields (10 * 4^L + 2) / 2 directions, all
/// with positive time (third) component.
struct DirectionGrid {
  int subdivision_level = 0;
  std::vector<Vec3> directions;

  int size() const { return static_cast<int>(directions.size()); }
};

/// Throws std::invalid_argument for level < 0 or level > 7.
DirectionGrid build_direction_grid(int subdivision_level);

}  // namespace evstar

#include "evstar/direction_grid.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

namespace evstar {

namespace {

struct Tri {
  int a, b, c;
};

// Fixed tilt applied to the base icosahedron. An axis-aligned icosahedron
// places subdivision vertices exactly on the equator of the time axis, which
// would leave directions with zero time component after antipodal reduction;
// a generic rotation keeps every vertex strictly off the equator.
Mat3 base_tilt() {
  const Vec3 axis = Vec3(1.0, 2.0, 3.0).normalized();
  return rotation_from_rotvec(0.37 * axis);
}

std::uint64_t key_of(double v) {
  std::uint64_t k;
  std::memcpy(&k, &v, sizeof(k));
  return k;
}

struct VecKey {
  std::uint64_t x, y, z;
  bool operator==(const VecKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

struct VecKeyHash {
  std::size_t operator()(const VecKey& k) const {
    std::uint64_t h = k.x * 0x9e3779b97f4a7c15ULL;
    h ^= k.y + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= k.z + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

DirectionGrid build_direction_grid(int subdivision_level) {
  if (subdivision_level < 0 || subdivision_level > 7)
    throw std::invalid_argument("build_direction_grid: level must be in [0, 7]");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const Mat3 q = base_tilt();
  std::vector<Vec3> verts;
  verts.reserve(12);
  const std::array<Vec3, 12> base = {
      Vec3(-1, phi, 0), Vec3(1, phi, 0),   Vec3(-1, -phi, 0), Vec3(1, -phi, 0),
      Vec3(0, -1, phi), Vec3(0, 1, phi),   Vec3(0, -1, -phi), Vec3(0, 1, -phi),
      Vec3(phi, 0, -1), Vec3(phi, 0, 1),   Vec3(-phi, 0, -1), Vec3(-phi, 0, 1)};
  for (const Vec3& v : base) verts.push_back((q * v).normalized());

  std::vector<Tri> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  std::unordered_map<std::uint64_t, int> midpoint;
  auto mid = [&](int i, int j) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(std::min(i, j)) << 32) | static_cast<std::uint64_t>(std::max(i, j));
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Vec3 m = ((verts[i] + verts[j]) * 0.5).normalized();
    verts.push_back(m);
    const int idx = static_cast<int>(verts.size()) - 1;
    midpoint.emplace(key, idx);
    return idx;
  };

  for (int level = 0; level < subdivision_level; ++level) {
    std::vector<Tri> next;
    next.reserve(faces.size() * 4);
    for (const Tri& f : faces) {
      const int ab = mid(f.a, f.b);
      const int bc = mid(f.b, f.c);
      const int ca = mid(f.c, f.a);
      next.push_back({f.a, ab, ca});
      next.push_back({f.b, bc, ab});
      next.push_back({f.c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces.swap(next);
  }

  // The construction is exactly centrally symmetric in floating point, so
  // flipping to the canonical half-space makes antipodal twins bit-identical.
  DirectionGrid grid;
  grid.subdivision_level = subdivision_level;
  std::unordered_map<VecKey, char, VecKeyHash> seen;
  seen.reserve(verts.size());
  for (Vec3 v : verts) {
    const bool flip = v.z() < 0.0 || (v.z() == 0.0 && (v.x() < 0.0 || (v.x() == 0.0 && v.y() < 0.0)));
    if (flip) v = -v;
    const VecKey key{key_of(v.x()), key_of(v.y()), key_of(v.z())};
    if (seen.emplace(key, 1).second) grid.directions.push_back(v);
  }

  const std::size_t expected = (10u * (1u << (2 * subdivision_level)) + 2u) / 2u;
  if (grid.directions.size() != expected)
    throw std::logic_error("build_direction_grid: antipodal reduction produced unexpected count");
  return grid;
}

}  // namespace evstar

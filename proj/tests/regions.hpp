// Small hand-built lesions shared by the feature tests and the acceptance run.
#ifndef RADLESION_TESTS_REGIONS_HPP_
#define RADLESION_TESTS_REGIONS_HPP_

#include <radlesion/rng.hpp>
#include <radlesion/volume.hpp>

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "feature_oracle.hpp"

namespace fixtures {

struct NamedRegion {
  std::string name;
  radlesion::LesionRegion region;
};

inline void push(radlesion::LesionRegion& r, int x, int y, int z, double v) {
  r.voxels.emplace_back(x, y, z);
  r.intensities.push_back(v);
}

inline radlesion::LesionRegion constant_cube() {
  radlesion::LesionRegion r;
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) push(r, x, y, z, 40.0);
  return r;
}

inline radlesion::LesionRegion rod() {
  radlesion::LesionRegion r;
  for (int z = 0; z < 10; ++z) push(r, 2, 3, z, 10.0 + 9.0 * z);
  r.spacing = Eigen::Vector3d(0.8, 0.8, 1.25);
  return r;
}

inline radlesion::LesionRegion checkerboard() {
  radlesion::LesionRegion r;
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) push(r, x, y, z, (x + y + z) % 2 ? 100.0 : 20.0);
  return r;
}

inline radlesion::LesionRegion two_blobs() {
  radlesion::LesionRegion r;
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) push(r, x, y, z, 30.0 + 10 * x);
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 5; x < 7; ++x) push(r, x, y, z + 1, 80.0 + 20 * y - 7 * z);
  r.spacing = Eigen::Vector3d(1.0, 1.0, 2.0);
  return r;
}

// Face-connected random growth with integer intensities.
inline radlesion::LesionRegion random_blob(std::uint64_t seed, int count = 90) {
  radlesion::Rng rng(seed);
  std::set<std::tuple<int, int, int>> taken{{0, 0, 0}};
  std::vector<std::tuple<int, int, int>> order{{0, 0, 0}};
  const int step[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  while (static_cast<int>(order.size()) < count) {
    auto [x, y, z] = order[rng.below(order.size())];
    const auto& s = step[rng.below(6)];
    std::tuple<int, int, int> c{x + s[0], y + s[1], z + s[2]};
    if (taken.insert(c).second) order.push_back(c);
  }
  radlesion::LesionRegion r;
  for (auto [x, y, z] : order) push(r, x + 3, y + 3, z + 3, std::round(rng.normal(60.0, 35.0)));
  r.spacing = Eigen::Vector3d(0.9, 0.9, 1.5);
  return r;
}

inline std::vector<NamedRegion> standard_regions() {
  return {{"constant cube", constant_cube()},
          {"rod", rod()},
          {"checkerboard", checkerboard()},
          {"two blobs", two_blobs()},
          {"random blob", random_blob(7)}};
}

inline oracle::Region to_oracle(const radlesion::LesionRegion& r) {
  oracle::Region o;
  for (const auto& v : r.voxels) o.voxels.push_back({v.x(), v.y(), v.z()});
  o.values = r.intensities;
  o.spacing = {r.spacing.x(), r.spacing.y(), r.spacing.z()};
  return o;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-9) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

}  // namespace fixtures

#endif  // RADLESION_TESTS_REGIONS_HPP_

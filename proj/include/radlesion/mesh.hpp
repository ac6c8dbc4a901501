#ifndef RADLESION_MESH_HPP_
#define RADLESION_MESH_HPP_

#include <Eigen/Core>
#include <array>
#include <vector>

#include "radlesion/volume.hpp"

namespace radlesion {

/// Closed, outward-oriented triangle surface.
///
/// The first `num_edge_vertices` vertices sit on cube edges (the classic
/// marching-cubes vertices); the remainder are centroids added to fan-split
/// polygons with more than three corners.
struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<int, 3>> triangles;
  int num_edge_vertices = 0;

  double area() const;
  /// Enclosed volume by the divergence theorem.
  double volume() const;
};

/// Marching cubes over the binary mask of `voxels` at iso-level 0.5.
///
/// Every cube face is resolved on its own (diagonal inside corners are kept
/// apart), so neighbouring cubes always agree and the surface is closed.
/// Coordinates are voxel index times spacing.
TriangleMesh marching_cubes(const std::vector<Index3>& voxels,
                            const Eigen::Vector3d& spacing);

namespace mc {

/// One surface polygon of a cube configuration: cube edge ids in
/// outward-facing (counter-clockwise) order.
using Loop = std::vector<int>;

/// Corner bits: bit 0 x, bit 1 y, bit 2 z.
const std::array<std::array<int, 2>, 12>& cube_edges();
/// Polygons for a configuration whose bit c is set when corner c is inside.
const std::vector<Loop>& case_loops(int config);

}  // namespace mc

}  // namespace radlesion

#endif  // RADLESION_MESH_HPP_

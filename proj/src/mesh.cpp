#include "radlesion/mesh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

#include <Eigen/Geometry>

namespace radlesion {
namespace mc {
namespace {

Eigen::Vector3d corner_position(int c) {
  return {static_cast<double>(c & 1), static_cast<double>((c >> 1) & 1),
          static_cast<double>((c >> 2) & 1)};
}

std::array<std::array<int, 2>, 12> make_edges() {
  std::array<std::array<int, 2>, 12> edges{};
  int e = 0;
  for (int a = 0; a < 8; ++a) {
    for (int b = a + 1; b < 8; ++b) {
      const int diff = a ^ b;
      if (diff == 1 || diff == 2 || diff == 4) edges[e++] = {a, b};
    }
  }
  return edges;
}

int edge_between(int a, int b) {
  const auto& edges = cube_edges();
  if (a > b) std::swap(a, b);
  for (int e = 0; e < 12; ++e) {
    if (edges[e][0] == a && edges[e][1] == b) return e;
  }
  return -1;
}

Eigen::Vector3d edge_midpoint(int e) {
  const auto& edges = cube_edges();
  return 0.5 * (corner_position(edges[e][0]) + corner_position(edges[e][1]));
}

// Directed segment on a cube face, oriented so that the inside part of the
// face lies to the right when the face is seen from outside the cube.
struct Segment {
  int from, to;
};

void add_segment(int ea, int eb, int inside_corner, const Eigen::Vector3d& normal,
                 std::vector<Segment>& out) {
  const Eigen::Vector3d a = edge_midpoint(ea);
  const Eigen::Vector3d d = edge_midpoint(eb) - a;
  const Eigen::Vector3d c = corner_position(inside_corner) - a;
  if (d.cross(c).dot(normal) < 0.0) {
    out.push_back({ea, eb});
  } else {
    out.push_back({eb, ea});
  }
}

std::vector<Loop> build_case(int config) {
  std::vector<Segment> segments;
  auto inside = [config](int c) { return ((config >> c) & 1) != 0; };
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (int side = 0; side < 2; ++side) {
      Eigen::Vector3d normal = Eigen::Vector3d::Zero();
      normal[axis] = side ? 1.0 : -1.0;
      const int base = side << axis;
      const std::array<int, 4> ring = {base, base | (1 << u),
                                       base | (1 << u) | (1 << v),
                                       base | (1 << v)};
      std::array<int, 4> crossed{};
      int n_crossed = 0;
      for (int k = 0; k < 4; ++k) {
        if (inside(ring[k]) != inside(ring[(k + 1) % 4])) {
          crossed[n_crossed++] = k;
        }
      }
      auto ring_edge = [&](int k) {
        return edge_between(ring[(k + 4) % 4], ring[(k + 5) % 4]);
      };
      if (n_crossed == 2) {
        int ref = -1;
        for (int k = 0; k < 4 && ref < 0; ++k) {
          if (inside(ring[k])) ref = ring[k];
        }
        // With exactly two inside corners adjacent or one/three inside
        // corners, every inside corner is on the same side of the cut.
        add_segment(ring_edge(crossed[0]), ring_edge(crossed[1]), ref, normal,
                    segments);
      } else if (n_crossed == 4) {
        // Ambiguous face: cut each inside corner off on its own.
        for (int k = 0; k < 4; ++k) {
          if (!inside(ring[k])) continue;
          add_segment(ring_edge(k - 1), ring_edge(k), ring[k], normal, segments);
        }
      }
    }
  }

  std::map<int, int> next;
  for (const auto& s : segments) next[s.from] = s.to;
  std::vector<Loop> loops;
  while (!next.empty()) {
    Loop loop;
    int e = next.begin()->first;
    while (next.count(e)) {
      loop.push_back(e);
      const int to = next[e];
      next.erase(e);
      e = to;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace

const std::array<std::array<int, 2>, 12>& cube_edges() {
  static const auto edges = make_edges();
  return edges;
}

const std::vector<Loop>& case_loops(int config) {
  static const auto table = [] {
    std::array<std::vector<Loop>, 256> t;
    for (int c = 0; c < 256; ++c) t[c] = build_case(c);
    return t;
  }();
  return table.at(static_cast<std::size_t>(config));
}

}  // namespace mc

double TriangleMesh::area() const {
  double sum = 0.0;
  for (const auto& t : triangles) {
    const Eigen::Vector3d& a = vertices[t[0]];
    sum += 0.5 * (vertices[t[1]] - a).cross(vertices[t[2]] - a).norm();
  }
  return sum;
}

double TriangleMesh::volume() const {
  if (vertices.empty()) return 0.0;
  const Eigen::Vector3d ref = vertices.front();
  double sum = 0.0;
  for (const auto& t : triangles) {
    const Eigen::Vector3d a = vertices[t[0]] - ref;
    const Eigen::Vector3d b = vertices[t[1]] - ref;
    const Eigen::Vector3d c = vertices[t[2]] - ref;
    sum += a.dot(b.cross(c));
  }
  return sum / 6.0;
}

TriangleMesh marching_cubes(const std::vector<Index3>& voxels,
                            const Eigen::Vector3d& spacing) {
  TriangleMesh mesh;
  if (voxels.empty()) return mesh;
  Index3 lo = voxels.front();
  Index3 hi = voxels.front();
  for (const auto& v : voxels) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  // Grid with one empty voxel on every side so the surface closes.
  const Index3 offset = lo - Index3::Ones();
  const std::array<int, 3> dims = {hi.x() - lo.x() + 3, hi.y() - lo.y() + 3,
                                   hi.z() - lo.z() + 3};
  Volume<unsigned char> grid(dims, spacing);
  for (const auto& v : voxels) grid(v - offset) = 1;

  // Edge vertex ids keyed by (lower corner linear index, axis).
  std::unordered_map<std::size_t, int> edge_vertex;
  edge_vertex.reserve(voxels.size() * 4);
  const auto& edges = mc::cube_edges();
  auto vertex_for = [&](int x, int y, int z, int edge) {
    const int a = edges[edge][0];
    const int b = edges[edge][1];
    const int axis = (a ^ b) == 1 ? 0 : ((a ^ b) == 2 ? 1 : 2);
    const int cx = x + (a & 1);
    const int cy = y + ((a >> 1) & 1);
    const int cz = z + ((a >> 2) & 1);
    const std::size_t key = grid.linear(cx, cy, cz) * 3 + axis;
    auto [it, inserted] = edge_vertex.try_emplace(key, 0);
    if (inserted) {
      Eigen::Vector3d p(cx + offset.x(), cy + offset.y(), cz + offset.z());
      p[axis] += 0.5;
      it->second = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(p.cwiseProduct(spacing));
    }
    return it->second;
  };

  struct PendingPolygon {
    std::vector<int> ids;
  };
  std::vector<PendingPolygon> polygons;
  for (int z = 0; z + 1 < dims[2]; ++z) {
    for (int y = 0; y + 1 < dims[1]; ++y) {
      for (int x = 0; x + 1 < dims[0]; ++x) {
        int config = 0;
        for (int c = 0; c < 8; ++c) {
          if (grid(x + (c & 1), y + ((c >> 1) & 1), z + ((c >> 2) & 1))) {
            config |= 1 << c;
          }
        }
        if (config == 0 || config == 255) continue;
        for (const auto& loop : mc::case_loops(config)) {
          PendingPolygon poly;
          for (int e : loop) poly.ids.push_back(vertex_for(x, y, z, e));
          polygons.push_back(std::move(poly));
        }
      }
    }
  }
  mesh.num_edge_vertices = static_cast<int>(mesh.vertices.size());
  for (const auto& poly : polygons) {
    const auto& ids = poly.ids;
    if (ids.size() == 3) {
      mesh.triangles.push_back({ids[0], ids[1], ids[2]});
      continue;
    }
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int id : ids) centroid += mesh.vertices[id];
    centroid /= static_cast<double>(ids.size());
    const int cid = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(centroid);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      mesh.triangles.push_back({cid, ids[k], ids[(k + 1) % ids.size()]});
    }
  }
  return mesh;
}

}  // namespace radlesion

#include <doctest.h>

#include <radlesion/features.hpp>
#include <radlesion/mesh.hpp>
#include <radlesion/rng.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "regions.hpp"

using namespace radlesion;

namespace {

LesionRegion line(const std::vector<double>& values) {
  LesionRegion r;
  for (std::size_t i = 0; i < values.size(); ++i) {
    r.voxels.emplace_back(0, 0, static_cast<int>(i));
    r.intensities.push_back(values[i]);
  }
  return r;
}

LesionRegion cube(int n, double value) {
  LesionRegion r;
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        r.voxels.emplace_back(x, y, z);
        r.intensities.push_back(value);
      }
  return r;
}

bool is_texture(std::string_view column) {
  const auto f = family_of_column(column);
  return f && *f != FeatureFamily::kShape && *f != FeatureFamily::kFirstOrder;
}

std::vector<fixtures::NamedRegion> property_regions() {
  auto regions = fixtures::standard_regions();
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto r = fixtures::random_blob(seed * 31, 30 + 20 * static_cast<int>(seed));
    r.spacing = Eigen::Vector3d::Ones();
    regions.push_back({"blob " + std::to_string(seed), r});
  }
  return regions;
}

}  // namespace

TEST_CASE("family cardinalities and canonical columns") {
  CHECK(kShapeCount == 13);
  CHECK(kFirstOrderCount == 18);
  CHECK(kGlcmCount == 23);
  CHECK(kGldmCount == 14);
  CHECK(kGlrlmCount == 16);
  CHECK(kGlszmCount == 16);
  CHECK(kNgtdmCount == 5);
  CHECK(kFeatureCount == 105);
  const auto& cols = canonical_columns();
  REQUIRE(cols.size() == 105);
  CHECK(std::set<std::string>(cols.begin(), cols.end()).size() == 105);
  CHECK(cols.front() == "shape_MeshVolume");
  CHECK(cols.back() == "ngtdm_Strength");
  int offset = 0;
  for (FeatureFamily f : kAllFamilies) {
    CHECK(family_offset(f) == offset);
    for (int k = 0; k < family_size(f); ++k) CHECK(family_of_column(cols[offset + k]) == f);
    offset += family_size(f);
    CHECK(family_from_token(family_token(f)) == f);
  }
  CHECK(std::find(cols.begin(), cols.end(), "shape_VoxelVolume") == cols.end());
  CHECK(std::find(cols.begin(), cols.end(), "glcm_SumAverage") == cols.end());
}

TEST_CASE("every descriptor is finite, including degenerate regions") {
  auto regions = property_regions();
  regions.push_back({"single voxel", line({42.0})});
  regions.push_back({"pair", line({0.0, 30.0})});
  for (const auto& named : regions) {
    const FeatureVector f = extract_all(named.region);
    for (int k = 0; k < kFeatureCount; ++k) {
      INFO(named.name << " " << canonical_columns()[k]);
      CHECK(std::isfinite(f.values[k]));
    }
  }
}

TEST_CASE("discretization levels") {
  const LesionRegion r = line({-10.0, 14.9, 15.0, 64.0, 90.0});
  const auto d = discretize(r, 25.0);
  CHECK(d.levels == std::vector<int>{1, 1, 2, 3, 5});
  CHECK(d.num_levels == 5);
}

TEST_CASE("hand-counted texture examples") {
  SUBCASE("checkerboard contrast along each axis is exactly 1") {
    LesionRegion r;
    for (int z = 0; z < 3; ++z)
      for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) {
          r.voxels.emplace_back(x, y, z);
          r.intensities.push_back((x + y + z) % 2);
        }
    const auto d = discretize(r, 1.0);
    for (const Index3& axis : {Index3(1, 0, 0), Index3(0, 1, 0), Index3(0, 0, 1)}) {
      const Eigen::MatrixXd c = texture::glcm_counts(d, axis);
      const Eigen::MatrixXd p = c / c.sum();
      double contrast = 0;
      for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) contrast += (i - j) * (i - j) * p(i, j);
      CHECK(contrast == 1.0);
    }
  }
  SUBCASE("single voxel dependence") {
    const auto g = gldm_features(discretize(line({5.0}), 25.0));
    CHECK(g[0] == 1.0);  // SmallDependenceEmphasis
  }
  SUBCASE("constant cube centre depends on all 26 neighbours") {
    const Eigen::MatrixXd m = texture::gldm_counts(discretize(cube(3, 9.0), 25.0));
    CHECK(m(0, 26) == 1.0);
    CHECK(m.sum() == 27.0);
    const auto g = gldm_features(discretize(cube(3, 9.0), 25.0));
    CHECK(g[5] == 0.0);  // GrayLevelVariance
  }
  SUBCASE("constant rod gives one z run of length 4") {
    const auto d = discretize(line({1, 1, 1, 1}), 25.0);
    const Eigen::MatrixXd m = texture::glrlm_counts(d, Index3(0, 0, 1));
    REQUIRE(m.cols() >= 4);
    CHECK(m.sum() == 1.0);
    CHECK(m(0, 3) == 1.0);
    double sre = 0;
    for (int j = 0; j < m.cols(); ++j) sre += m(0, j) / ((j + 1.0) * (j + 1.0));
    CHECK(sre == 1.0 / 16.0);
  }
  SUBCASE("alternating line has only unit runs") {
    const auto f = glrlm_features(discretize(line({0, 30, 0, 30}), 25.0));
    CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-15));  // ShortRunEmphasis
    CHECK(f[6] == doctest::Approx(1.0).epsilon(1e-15));  // RunPercentage
  }
  SUBCASE("zones") {
    const auto single = glszm_features(discretize(cube(2, 3.0), 25.0));
    CHECK(single[6] == doctest::Approx(1.0 / 8.0));  // ZonePercentage
    CHECK(single[3] == 1.0);                         // GrayLevelNonUniformityNormalized
    LesionRegion two = line({4, 4});
    two.voxels.emplace_back(5, 5, 5);
    two.voxels.emplace_back(5, 5, 6);
    two.voxels.emplace_back(5, 5, 7);
    two.intensities.insert(two.intensities.end(), {4, 4, 4});
    const Eigen::MatrixXd z = texture::glszm_counts(discretize(two, 25.0));
    CHECK(z.sum() == 2.0);
    CHECK(z(0, 1) == 1.0);
    CHECK(z(0, 2) == 1.0);
  }
  SUBCASE("ngtdm") {
    const auto flat = ngtdm_features(discretize(cube(3, 1.0), 25.0));
    CHECK(flat[0] == 1e6);  // Coarseness cap
    CHECK(flat[1] == 0.0);  // Contrast with one level
    CHECK(flat[2] == 0.0);  // Busyness fallback
    const auto pair = ngtdm_features(discretize(line({0, 25}), 25.0));
    // s_1 = s_2 = 1, p = (1/2, 1/2)
    CHECK(pair[0] == doctest::Approx(1.0));
    CHECK(pair[1] == doctest::Approx(0.25));
  }
}

TEST_CASE("normalized matrices sum to one") {
  for (const auto& named : property_regions()) {
    const auto d = discretize(named.region, 10.0);
    for (const Index3& dir : unique_directions()) {
      const Eigen::MatrixXd c = texture::glcm_counts(d, dir);
      if (c.sum() > 0) CHECK(std::abs((c / c.sum()).sum() - 1.0) <= 1e-12);
      CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const Eigen::MatrixXd r = texture::glrlm_counts(d, dir);
      CHECK(std::abs((r / r.sum()).sum() - 1.0) <= 1e-12);
    }
    const Eigen::MatrixXd g = texture::gldm_counts(d);
    CHECK(g.sum() == static_cast<double>(named.region.size()));
    const Eigen::MatrixXd z = texture::glszm_counts(d);
    CHECK(std::abs((z / z.sum()).sum() - 1.0) <= 1e-12);
    const auto t = texture::ngtdm_table(d);
    if (t.n.sum() > 0) CHECK(std::abs((t.n / t.n.sum()).sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("shape identities") {
  for (const auto& named : property_regions()) {
    const FeatureVector f = extract_all(named.region);
    CHECK(f["shape_Sphericity"] <= 1.0 + 1e-9);
    CHECK(std::abs(f["shape_SurfaceVolumeRatio"] * f["shape_MeshVolume"] -
                   f["shape_SurfaceArea"]) <= 1e-9 * f["shape_SurfaceArea"]);
  }
}

TEST_CASE("intensity shift leaves shape and texture unchanged") {
  for (const auto& named : property_regions()) {
    for (double c : {-1000.0, 17.0, 250.0}) {
      LesionRegion shifted = named.region;
      for (auto& v : shifted.intensities) v += c;
      const FeatureVector a = extract_all(named.region);
      const FeatureVector b = extract_all(shifted);
      const auto& cols = canonical_columns();
      for (int k = 0; k < kFeatureCount; ++k) {
        if (family_of_column(cols[k]) == FeatureFamily::kShape || is_texture(cols[k])) {
          INFO(named.name << " " << cols[k]);
          CHECK(a.values[k] == b.values[k]);
        }
      }
      CHECK(b["firstorder_Mean"] == doctest::Approx(a["firstorder_Mean"] + c).epsilon(1e-12));
      CHECK(fixtures::close_rel(b["firstorder_Variance"], a["firstorder_Variance"], 1e-9));
    }
  }
}

TEST_CASE("axis permutation leaves direction-averaged features unchanged") {
  const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  const std::set<std::string> planar = {"shape_Maximum2DDiameterSlice",
                                        "shape_Maximum2DDiameterColumn",
                                        "shape_Maximum2DDiameterRow"};
  for (const auto& named : property_regions()) {
    LesionRegion base = named.region;
    base.spacing = Eigen::Vector3d::Constant(1.3);
    const FeatureVector a = extract_all(base);
    for (const auto& p : perms) {
      LesionRegion r = base;
      for (auto& v : r.voxels) v = Index3(v[p[0]], v[p[1]], v[p[2]]);
      const FeatureVector b = extract_all(r);
      const auto& cols = canonical_columns();
      for (int k = 0; k < kFeatureCount; ++k) {
        if (planar.count(cols[k])) continue;
        INFO(named.name << " " << cols[k] << " " << a.values[k] << " vs " << b.values[k]);
        CHECK(fixtures::close_rel(a.values[k], b.values[k], 1e-9, 1e-12));
      }
      // The three planar diameters are tied to fixed axes, so a permutation
      // exchanges them rather than preserving each one.
      std::vector<double> da, db;
      for (const auto& name : planar) {
        da.push_back(a[name]);
        db.push_back(b[name]);
      }
      std::sort(da.begin(), da.end());
      std::sort(db.begin(), db.end());
      for (int k = 0; k < 3; ++k) CHECK(fixtures::close_rel(da[k], db[k], 1e-12));
    }
  }
}

TEST_CASE("voxel order does not change any bit of the vector") {
  for (const auto& named : property_regions()) {
    const FeatureVector a = extract_all(named.region);
    Rng rng(99);
    for (int trial = 0; trial < 3; ++trial) {
      LesionRegion r = named.region;
      std::vector<std::size_t> idx(r.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      rng.shuffle(idx);
      LesionRegion s;
      s.spacing = r.spacing;
      for (std::size_t i : idx) {
        s.voxels.push_back(r.voxels[i]);
        s.intensities.push_back(r.intensities[i]);
      }
      const FeatureVector b = extract_all(s);
      for (int k = 0; k < kFeatureCount; ++k) CHECK(a.values[k] == b.values[k]);
    }
  }
}

TEST_CASE("marching cubes surface is closed and consistently oriented") {
  for (const auto& named : property_regions()) {
    const TriangleMesh mesh = marching_cubes(named.region.voxels, named.region.spacing);
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : mesh.triangles) {
      for (int e = 0; e < 3; ++e) ++directed[{t[e], t[(e + 1) % 3]}];
    }
    for (const auto& [edge, count] : directed) {
      CHECK(count == 1);
      CHECK(directed.count({edge.second, edge.first}) == 1);
    }
    CHECK(mesh.volume() > 0.0);
  }
}

TEST_CASE("every cube configuration produces closed polygon sets") {
  const auto& edges = mc::cube_edges();
  for (int config = 0; config < 256; ++config) {
    const auto& loops = mc::case_loops(config);
    std::set<int> used;
    for (const auto& loop : loops) {
      CHECK(loop.size() >= 3);
      for (int e : loop) {
        CHECK(used.insert(e).second);
        const bool a = config >> edges[e][0] & 1;
        const bool b = config >> edges[e][1] & 1;
        CHECK(a != b);
      }
    }
    int crossed = 0;
    for (const auto& e : edges) crossed += ((config >> e[0]) & 1) != ((config >> e[1]) & 1);
    CHECK(static_cast<int>(used.size()) == crossed);
  }
  CHECK(mc::case_loops(0).empty());
  CHECK(mc::case_loops(255).empty());
}

TEST_CASE("cube mesh volume and area are known") {
  // A 1-voxel mask is an octahedron with vertices half a voxel from the centre.
  const TriangleMesh one = marching_cubes({Index3(0, 0, 0)}, Eigen::Vector3d::Ones());
  CHECK(one.volume() == doctest::Approx(4.0 / 3.0 * 0.125));
  CHECK(one.area() == doctest::Approx(8 * std::sqrt(3.0) / 4 * 0.5));
}

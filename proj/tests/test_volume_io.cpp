#include <doctest.h>

#include <radlesion/errors.hpp>
#include <radlesion/nifti.hpp>
#include <radlesion/resample.hpp>
#include <radlesion/rng.hpp>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

using namespace radlesion;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "radlesion_test_volume_io";
  fs::create_directories(dir);
  return dir / name;
}

VoxelVolume random_volume(std::array<int, 3> dims, Eigen::Vector3d spacing, std::uint64_t seed) {
  VoxelVolume v(dims, spacing, Eigen::Vector3d(1.5, -2.0, 30.0));
  Rng rng(seed);
  for (auto& x : v.data) x = std::round(rng.uniform(-200.0, 300.0));
  return v;
}

LesionMask mask_with(const std::array<int, 3>& dims, const Eigen::Vector3d& spacing,
                     const std::map<int, int>& classes) {
  LesionMask m;
  m.labels = LabelVolume(dims, spacing, Eigen::Vector3d(1.5, -2.0, 30.0));
  m.class_of_label = classes;
  return m;
}

LesionMask mask_for(const VoxelVolume& v, const std::map<int, int>& classes) {
  LesionMask m;
  m.labels = LabelVolume(v.dims, v.spacing, v.origin);
  m.class_of_label = classes;
  return m;
}

// Minimal hand-rolled header so the reader is tested against bytes it did not write.
void write_raw_header(const fs::path& path, short datatype, short bitpix, std::array<short, 3> dims,
                      float slope, float inter, const std::vector<char>& payload,
                      bool big_endian = false) {
  std::vector<char> hdr(352, 0);
  auto put = [&](std::size_t off, const void* src, std::size_t n) {
    std::memcpy(hdr.data() + off, src, n);
    if (big_endian) std::reverse(hdr.begin() + off, hdr.begin() + off + n);
  };
  const int sizeof_hdr = 348;
  put(0, &sizeof_hdr, 4);
  const short dim[4] = {3, dims[0], dims[1], dims[2]};
  for (int k = 0; k < 4; ++k) put(40 + 2 * k, &dim[k], 2);
  for (int k = 4; k < 8; ++k) {
    const short one = 1;
    put(40 + 2 * k, &one, 2);
  }
  put(70, &datatype, 2);
  put(72, &bitpix, 2);
  const float pix[4] = {1.0f, 2.0f, 2.0f, 3.0f};
  for (int k = 0; k < 4; ++k) put(76 + 4 * k, &pix[k], 4);
  const float offset = 352.0f;
  put(108, &offset, 4);
  put(112, &slope, 4);
  put(116, &inter, 4);
  std::memcpy(hdr.data() + 344, "n+1\0", 4);
  std::ofstream out(path, std::ios::binary);
  out.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

}  // namespace

TEST_CASE("NIfTI round trip preserves values and geometry for every datatype") {
  const VoxelVolume v = random_volume({5, 4, 3}, {0.7, 0.9, 2.5}, 3);
  for (NiftiType t : {NiftiType::kInt16, NiftiType::kInt32, NiftiType::kFloat32,
                      NiftiType::kFloat64}) {
    const fs::path p = scratch("rt_" + std::to_string(static_cast<int>(t)) + ".nii");
    write_nifti(p, v, t);
    const VoxelVolume back = read_volume(p);
    CHECK(back.dims == v.dims);
    CHECK(back.data == v.data);
    CHECK((back.spacing - v.spacing).norm() < 1e-6);
    CHECK((back.origin - v.origin).norm() < 1e-4);
  }
}

TEST_CASE("reader applies slope and intercept and handles both byte orders") {
  std::vector<char> payload;
  for (short s : {short(-3), short(0), short(5), short(100)}) {
    const char* b = reinterpret_cast<const char*>(&s);
    payload.insert(payload.end(), b, b + 2);
  }
  const fs::path le = scratch("scaled_le.nii");
  write_raw_header(le, 4, 16, {2, 2, 1}, 2.0f, -1024.0f, payload);
  const VoxelVolume a = read_volume(le);
  CHECK(a.data == std::vector<double>{-1030, -1024, -1014, -824});
  CHECK(a.spacing.isApprox(Eigen::Vector3d(2, 2, 3)));

  std::vector<char> swapped = payload;
  for (std::size_t i = 0; i < swapped.size(); i += 2) std::swap(swapped[i], swapped[i + 1]);
  const fs::path be = scratch("scaled_be.nii");
  write_raw_header(be, 4, 16, {2, 2, 1}, 2.0f, -1024.0f, swapped, true);
  CHECK(read_volume(be).data == a.data);
}

TEST_CASE("reader errors") {
  const fs::path missing = scratch("does_not_exist.nii");
  CHECK_THROWS_AS(read_volume(missing), Error);

  std::vector<char> payload(4, 0);
  const fs::path bad_type = scratch("complex.nii");
  write_raw_header(bad_type, 32, 64, {1, 1, 1}, 1.0f, 0.0f, std::vector<char>(8, 0));
  CHECK_THROWS_AS(read_volume(bad_type), UnsupportedTypeError);

  const fs::path truncated = scratch("truncated.nii");
  write_raw_header(truncated, 4, 16, {4, 4, 4}, 1.0f, 0.0f, payload);
  CHECK_THROWS_AS(read_volume(truncated), FormatError);

  const fs::path garbage = scratch("garbage.nii");
  std::ofstream(garbage) << "not an image";
  CHECK_THROWS_AS(read_volume(garbage), FormatError);
}

TEST_CASE("mask reading maps labels to classes") {
  LesionMask m = mask_with({4, 4, 2}, Eigen::Vector3d::Ones(), {});
  m.labels(0, 0, 0) = 1;
  m.labels(3, 3, 1) = 2;
  const fs::path p = scratch("mask.nii");
  write_nifti(p, m.labels);

  const LesionMask two = read_mask(p, {{1, 1}, {2, 3}});
  CHECK(two.class_of_label == std::map<int, int>{{1, 1}, {2, 3}});
  CHECK(two.labels.data == m.labels.data);

  CHECK_THROWS_AS(read_mask(p, {{1, 1}}), ConfigError);
  CHECK_THROWS_AS(read_mask(p, {{1, 1}, {2, 4}}), ConfigError);

  VoxelVolume frac({2, 1, 1}, Eigen::Vector3d::Ones(), Eigen::Vector3d::Zero());
  frac.data = {0.0, 0.5};
  const fs::path fp = scratch("frac_mask.nii");
  write_nifti(fp, frac, NiftiType::kFloat32);
  CHECK_THROWS_AS(read_mask(fp, {{1, 1}}), MaskError);
}

TEST_CASE("single-label mask yields one lesion of the mapped class") {
  LesionMask m = mask_with({3, 3, 3}, Eigen::Vector3d::Ones(), {});
  m.labels(1, 1, 1) = 1;
  const fs::path p = scratch("mask_single.nii");
  write_nifti(p, m.labels, NiftiType::kUInt8);
  const LesionMask back = read_mask(p, {{1, 2}});
  VoxelVolume v({3, 3, 3}, Eigen::Vector3d::Ones(), Eigen::Vector3d(1.5, -2.0, 30.0));
  const auto ex = extract_lesions(v, back);
  REQUIRE(ex.regions.size() == 1);
  CHECK(ex.regions[0].class_id == 2);
}

TEST_CASE("resampling at the current isotropic spacing is the identity") {
  const VoxelVolume v = random_volume({6, 5, 4}, Eigen::Vector3d::Ones(), 11);
  LesionMask m = mask_with(v.dims, v.spacing, {{1, 1}, {2, 2}});
  Rng rng(5);
  for (auto& l : m.labels.data) l = static_cast<int>(rng.below(3));
  const auto [rv, rm] = resample_isotropic(v, m, 1.0);
  CHECK(rv.dims == v.dims);
  CHECK(rv.data == v.data);
  CHECK(rm.labels.data == m.labels.data);
  CHECK(rv.origin == v.origin);
}

TEST_CASE("constant volume stays constant at doubled dims") {
  VoxelVolume v({3, 4, 2}, Eigen::Vector3d::Constant(2.0), Eigen::Vector3d::Zero());
  std::fill(v.data.begin(), v.data.end(), 7.0);
  const LesionMask m = mask_for(v, {});
  const auto [rv, rm] = resample_isotropic(v, m, 1.0);
  CHECK(rv.dims == std::array<int, 3>{6, 8, 4});
  CHECK(rv.spacing == Eigen::Vector3d::Ones());
  for (double x : rv.data) CHECK(x == 7.0);
}

TEST_CASE("ramp along x is interpolated by hand-computed weights") {
  VoxelVolume v({3, 1, 1}, Eigen::Vector3d::Constant(2.0), Eigen::Vector3d::Zero());
  v.data = {0.0, 10.0, 20.0};
  const auto [rv, rm] = resample_isotropic(v, mask_for(v, {}), 1.0);
  // output site i sits at input index i/2; the last sites clamp to the end voxel
  REQUIRE(rv.dims == std::array<int, 3>{6, 2, 2});
  const double want[6] = {0.0, 5.0, 10.0, 15.0, 20.0, 20.0};
  for (int i = 0; i < 6; ++i) CHECK(rv(i, 0, 0) == doctest::Approx(want[i]).epsilon(1e-15));
}

TEST_CASE("resampling properties on random volumes") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const std::array<int, 3> dims{2 + int(rng.below(5)), 2 + int(rng.below(5)),
                                  2 + int(rng.below(4))};
    const Eigen::Vector3d sp(rng.uniform(0.4, 2.5), rng.uniform(0.4, 2.5), rng.uniform(0.4, 3.0));
    const VoxelVolume v = random_volume(dims, sp, seed + 100);
    LesionMask m = mask_with(dims, sp, {{3, 1}, {7, 2}});
    for (auto& l : m.labels.data) l = std::array<int, 3>{0, 3, 7}[rng.below(3)];
    const double target = rng.uniform(0.5, 2.0);
    const auto [rv, rm] = resample_isotropic(v, m, target);

    // label conservation
    const std::set<int> in(m.labels.data.begin(), m.labels.data.end());
    for (int l : rm.labels.data) CHECK(in.count(l) == 1);

    // interpolation bounds against the surrounding input voxels
    for (int z = 0; z < rv.dims[2]; ++z) {
      for (int y = 0; y < rv.dims[1]; ++y) {
        for (int x = 0; x < rv.dims[0]; ++x) {
          double lo = 1e300, hi = -1e300;
          const int idx[3] = {x, y, z};
          int base[3];
          for (int k = 0; k < 3; ++k) {
            base[k] = std::min(static_cast<int>(std::floor(idx[k] * target / sp[k])), dims[k] - 1);
          }
          for (int dz = 0; dz <= 1; ++dz)
            for (int dy = 0; dy <= 1; ++dy)
              for (int dx = 0; dx <= 1; ++dx) {
                const int cx = std::min(base[0] + dx, dims[0] - 1);
                const int cy = std::min(base[1] + dy, dims[1] - 1);
                const int cz = std::min(base[2] + dz, dims[2] - 1);
                lo = std::min(lo, v(cx, cy, cz));
                hi = std::max(hi, v(cx, cy, cz));
              }
          CHECK(rv(x, y, z) >= lo - 1e-9);
          CHECK(rv(x, y, z) <= hi + 1e-9);
        }
      }
    }

    for (int k = 0; k < 3; ++k) {
      CHECK(rv.dims[k] == static_cast<int>(std::ceil(dims[k] * sp[k] / target - 1e-9)));
    }
  }
}

TEST_CASE("axis permutation commutes with resampling") {
  const VoxelVolume v = random_volume({4, 3, 5}, {0.8, 1.7, 2.2}, 21);
  LesionMask m = mask_with(v.dims, v.spacing, {{1, 1}});
  for (std::size_t i = 0; i < m.labels.data.size(); i += 3) m.labels.data[i] = 1;
  // (x,y,z) -> (z,x,y)
  auto permute = [](const auto& vol) {
    using V = std::decay_t<decltype(vol)>;
    V out({vol.dims[2], vol.dims[0], vol.dims[1]},
          Eigen::Vector3d(vol.spacing[2], vol.spacing[0], vol.spacing[1]),
          Eigen::Vector3d(vol.origin[2], vol.origin[0], vol.origin[1]));
    for (int z = 0; z < vol.dims[2]; ++z)
      for (int y = 0; y < vol.dims[1]; ++y)
        for (int x = 0; x < vol.dims[0]; ++x) out(z, x, y) = vol(x, y, z);
    return out;
  };
  LesionMask pm;
  pm.labels = permute(m.labels);
  pm.class_of_label = m.class_of_label;
  const auto [a_vol, a_mask] = resample_isotropic(permute(v), pm, 1.1);
  const auto [b_vol, b_mask] = resample_isotropic(v, m, 1.1);
  const VoxelVolume b_perm = permute(b_vol);
  CHECK(a_vol.dims == b_perm.dims);
  for (std::size_t i = 0; i < a_vol.data.size(); ++i) {
    CHECK(a_vol.data[i] == doctest::Approx(b_perm.data[i]).epsilon(1e-12));
  }
  CHECK(a_mask.labels.data == permute(b_mask.labels).data);
}

TEST_CASE("lesion extraction") {
  VoxelVolume v = random_volume({5, 5, 5}, Eigen::Vector3d::Ones(), 2);
  LesionMask m = mask_with(v.dims, v.spacing, {{1, 2}, {4, 1}});
  for (int i = 0; i < 10; ++i) m.labels(i % 5, i / 5, 0) = 4;
  m.labels(2, 2, 3) = 1;
  const auto ex = extract_lesions(v, m);
  REQUIRE(ex.regions.size() == 2);
  CHECK(ex.regions[0].label == 1);
  CHECK(ex.regions[0].class_id == 2);
  CHECK(ex.regions[1].label == 4);
  CHECK(ex.regions[1].region.size() == 10);
  for (std::size_t i = 0; i < ex.regions[1].region.size(); ++i) {
    CHECK(ex.regions[1].region.intensities[i] == v(ex.regions[1].region.voxels[i]));
  }
  CHECK(ex.warnings.empty());

  LesionMask other = mask_with({5, 5, 4}, Eigen::Vector3d::Ones(), {});
  CHECK_THROWS_AS(extract_lesions(v, other), MaskError);
}

TEST_CASE("a single voxel label can vanish when resampled coarser") {
  VoxelVolume v({5, 5, 5}, Eigen::Vector3d::Constant(2.0), Eigen::Vector3d::Zero());
  LesionMask m = mask_for(v, {{1, 1}});
  m.labels(1, 1, 1) = 1;
  const auto [rv, rm] = resample_isotropic(v, m, 5.0);
  const auto ex = extract_lesions(rv, rm);
  CHECK(ex.regions.empty());
  CHECK(ex.warnings.size() == 1);
}

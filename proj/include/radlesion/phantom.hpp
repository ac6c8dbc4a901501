#ifndef RADLESION_PHANTOM_HPP_
#define RADLESION_PHANTOM_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "radlesion/dataset.hpp"
#include "radlesion/volume.hpp"

namespace radlesion {

/// Synthetic CT scans with one lesion each, standing in for real data.
///
/// Class 1: thin curved shells (caps of a spherical shell), low sphericity.
/// Class 2: biconvex lens blobs, high sphericity, smooth interior.
/// Class 3: spheroids with strong voxel-level speckle.
/// Every voxel carries Gaussian noise; intensities are rounded to whole HU.
struct PhantomGeometry {
  std::array<int, 3> dims{40, 40, 26};
  Eigen::Vector3d spacing{0.9, 0.9, 1.5};
  double background_hu = 30.0;
  double noise_sd = 5.0;
  double speckle_sd = 22.0;
};

struct PhantomScan {
  std::string scan_id;
  int class_id = 0;
  VoxelVolume volume;
  LesionMask mask;  // single lesion, label 1
};

/// Scans in round-robin class order until each class has its count.
/// Scan i depends only on (seed, i) so scans can be generated in any order.
std::vector<PhantomScan> generate_phantom(const std::array<int, 3>& counts_per_class,
                                          std::uint64_t seed,
                                          const PhantomGeometry& geometry = {});
std::vector<PhantomScan> generate_phantom(int n_per_class, std::uint64_t seed,
                                          const PhantomGeometry& geometry = {});

/// Class of the i-th scan under the round-robin order.
std::vector<int> phantom_class_order(const std::array<int, 3>& counts_per_class);

/// One phantom scan; `index` selects the per-scan random stream.
PhantomScan generate_phantom_scan(int class_id, int index, std::uint64_t seed,
                                  const PhantomGeometry& geometry = {});

/// Feature-level phantom: Gaussian classes that differ only in the first
/// `num_informative` columns (named `f0`, `f1`, ...); the rest is noise.
Dataset generate_gaussian_dataset(int n_per_class, int num_features, int num_informative,
                                  double separation, std::uint64_t seed);

/// Features of a phantom set: resample, extract lesions, compute vectors.
Dataset phantom_features(const std::vector<PhantomScan>& scans, double target_spacing = 1.0,
                         double bin_width = 25.0);

}  // namespace radlesion

#endif  // RADLESION_PHANTOM_HPP_

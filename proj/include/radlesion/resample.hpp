#ifndef RADLESION_RESAMPLE_HPP_
#define RADLESION_RESAMPLE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "radlesion/volume.hpp"

namespace radlesion {

/// Resamples a volume/mask pair onto an isotropic grid of `target_mm`.
///
/// Output dims are ceil(dims * spacing / target) per axis and the origin is
/// kept. Output voxel i samples input continuous index i * target / spacing,
/// clamped to the last input voxel. Intensities are trilinear, labels are
/// nearest-neighbour so no new label value can appear.
std::pair<VoxelVolume, LesionMask> resample_isotropic(const VoxelVolume& vol,
                                                      const LesionMask& mask,
                                                      double target_mm);

struct LabeledRegion {
  int label = 0;
  int class_id = 0;
  LesionRegion region;
};

struct LesionExtraction {
  std::vector<LabeledRegion> regions;  // ascending label
  std::vector<std::string> warnings;   // one per label with no voxels left
};

/// Splits the mask into one region per labelled lesion. Labels listed in
/// `class_of_label` that no longer own any voxel are reported as warnings.
LesionExtraction extract_lesions(const VoxelVolume& vol, const LesionMask& mask);

}  // namespace radlesion

#endif  // RADLESION_RESAMPLE_HPP_

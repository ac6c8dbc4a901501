#ifndef RADLESION_NIFTI_HPP_
#define RADLESION_NIFTI_HPP_

#include <filesystem>
#include <map>

#include "radlesion/volume.hpp"

namespace radlesion {

/// NIfTI-1 datatype codes understood by the reader and writer.
enum class NiftiType : short {
  kUInt8 = 2,
  kInt16 = 4,
  kInt32 = 8,
  kFloat32 = 16,
  kFloat64 = 64,
};

/// Reads an uncompressed single-file NIfTI-1 image. The header's linear
/// rescale (scl_slope, scl_inter) is applied; a zero slope means 1.
/// Either byte order is accepted.
VoxelVolume read_volume(const std::filesystem::path& path);

/// Reads an integer-valued NIfTI-1 label image and attaches the class of
/// every nonzero label found in it. Class ids must lie in 1..3.
LesionMask read_mask(const std::filesystem::path& path,
                     const std::map<int, int>& class_map);

/// Writes `vol` as little-endian NIfTI-1 (vox_offset 352, slope 1). Values
/// are rounded for integer datatypes and must fit the type's range.
void write_nifti(const std::filesystem::path& path, const VoxelVolume& vol,
                 NiftiType type);
void write_nifti(const std::filesystem::path& path, const LabelVolume& labels,
                 NiftiType type = NiftiType::kInt16);

}  // namespace radlesion

#endif  // RADLESION_NIFTI_HPP_

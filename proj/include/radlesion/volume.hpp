#ifndef RADLESION_VOLUME_HPP_
#define RADLESION_VOLUME_HPP_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "radlesion/errors.hpp"

namespace radlesion {

using Index3 = Eigen::Vector3i;

/// Dense 3D grid with physical geometry. Voxel (x, y, z) lives at
/// data[x + nx * (y + ny * z)], the NIfTI storage order.
template <typename T>
struct Volume {
  std::array<int, 3> dims{0, 0, 0};
  Eigen::Vector3d spacing = Eigen::Vector3d::Ones();
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  std::vector<T> data;

  Volume() = default;
  Volume(std::array<int, 3> d, const Eigen::Vector3d& sp,
         const Eigen::Vector3d& org = Eigen::Vector3d::Zero(), T fill = T{})
      : dims(d), spacing(sp), origin(org),
        data(static_cast<std::size_t>(d[0]) * d[1] * d[2], fill) {}

  std::size_t size() const { return data.size(); }

  std::size_t linear(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
  }

  bool contains(int x, int y, int z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] &&
           z < dims[2];
  }

  T& operator()(int x, int y, int z) { return data[linear(x, y, z)]; }
  const T& operator()(int x, int y, int z) const {
    return data[linear(x, y, z)];
  }
  T& operator()(const Index3& v) { return (*this)(v.x(), v.y(), v.z()); }
  const T& operator()(const Index3& v) const {
    return (*this)(v.x(), v.y(), v.z());
  }

  template <typename U>
  bool same_geometry(const Volume<U>& other) const {
    return dims == other.dims && spacing == other.spacing &&
           origin == other.origin;
  }
};

/// CT intensities in Hounsfield units.
using VoxelVolume = Volume<double>;
using LabelVolume = Volume<std::int32_t>;

/// Integer-labelled lesion annotation; label 0 is background.
struct LesionMask {
  LabelVolume labels;
  std::map<int, int> class_of_label;
};

/// Voxels of one lesion together with the intensities under them.
struct LesionRegion {
  std::vector<Index3> voxels;
  std::vector<double> intensities;
  Eigen::Vector3d spacing = Eigen::Vector3d::Ones();

  std::size_t size() const { return voxels.size(); }
};

/// Throws InputError if the volume's invariants do not hold.
void validate(const VoxelVolume& vol);

}  // namespace radlesion

#endif  // RADLESION_VOLUME_HPP_

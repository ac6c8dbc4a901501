#ifndef RADLESION_FEATURES_HPP_
#define RADLESION_FEATURES_HPP_

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radlesion/volume.hpp"

namespace radlesion {

enum class FeatureFamily { kShape, kFirstOrder, kGlcm, kGldm, kGlrlm, kGlszm, kNgtdm };

inline constexpr std::array<FeatureFamily, 7> kAllFamilies = {
    FeatureFamily::kShape, FeatureFamily::kFirstOrder, FeatureFamily::kGlcm,
    FeatureFamily::kGldm,  FeatureFamily::kGlrlm,      FeatureFamily::kGlszm,
    FeatureFamily::kNgtdm};

inline constexpr int kShapeCount = 13;
inline constexpr int kFirstOrderCount = 18;
inline constexpr int kGlcmCount = 23;
inline constexpr int kGldmCount = 14;
inline constexpr int kGlrlmCount = 16;
inline constexpr int kGlszmCount = 16;
inline constexpr int kNgtdmCount = 5;
inline constexpr int kFeatureCount = 105;

/// Column prefix of a family ("shape", "firstorder", "glcm", ...).
std::string_view family_prefix(FeatureFamily family);
/// Short group token used on the command line ("shape", "fos", "glcm", ...).
std::string_view family_token(FeatureFamily family);
std::optional<FeatureFamily> family_from_token(std::string_view token);

/// Feature names of one family in canonical order, without prefix.
std::span<const std::string_view> family_feature_names(FeatureFamily family);
/// All 105 column names `prefix_Name` in canonical order.
const std::vector<std::string>& canonical_columns();
/// Family of a canonical column name; nullopt for unknown names.
std::optional<FeatureFamily> family_of_column(std::string_view column);
/// Position of the family's first column in the canonical vector.
int family_offset(FeatureFamily family);
int family_size(FeatureFamily family);

using ShapeFeatures = std::array<double, kShapeCount>;
using FirstOrderFeatures = std::array<double, kFirstOrderCount>;
using GlcmFeatures = std::array<double, kGlcmCount>;
using GldmFeatures = std::array<double, kGldmCount>;
using GlrlmFeatures = std::array<double, kGlrlmCount>;
using GlszmFeatures = std::array<double, kGlszmCount>;
using NgtdmFeatures = std::array<double, kNgtdmCount>;

/// Gray levels of a region plus a padded bounding-box grid of those levels
/// (0 outside the region) used by the texture kernels.
struct DiscretizedRegion {
  std::vector<int> levels;  // 1..num_levels, aligned with voxels
  int num_levels = 1;
  double bin_width = 25.0;
  std::vector<Index3> voxels;
  Eigen::Vector3d spacing = Eigen::Vector3d::Ones();

  // Bounding box grid, one voxel of zero padding on every side.
  Volume<int> grid;
  Index3 grid_offset = Index3::Zero();  // voxel index of grid(0,0,0)

  Index3 to_grid(const Index3& v) const { return v - grid_offset; }
};

/// Fixed-width binning anchored at the region minimum:
/// level = floor((I - min) / bin_width) + 1.
DiscretizedRegion discretize(const LesionRegion& region, double bin_width);

/// The 13 offsets of a 26-neighbourhood whose first nonzero component is
/// positive; each unordered neighbour direction appears once.
const std::array<Index3, 13>& unique_directions();

ShapeFeatures shape_features(const LesionRegion& region);
FirstOrderFeatures first_order_features(const LesionRegion& region,
                                        const DiscretizedRegion& d);
GlcmFeatures glcm_features(const DiscretizedRegion& d);
GldmFeatures gldm_features(const DiscretizedRegion& d);
GlrlmFeatures glrlm_features(const DiscretizedRegion& d);
GlszmFeatures glszm_features(const DiscretizedRegion& d);
NgtdmFeatures ngtdm_features(const DiscretizedRegion& d);

/// Convenience overload that discretizes with `bin_width` first.
FirstOrderFeatures first_order_features(const LesionRegion& region,
                                        double bin_width = 25.0);

struct ExtractionConfig {
  double bin_width = 25.0;
};

/// The 105 descriptors of one lesion in canonical column order.
struct FeatureVector {
  Eigen::Matrix<double, kFeatureCount, 1> values;
  int lesion_id = 0;
  int class_id = 0;

  /// Value by canonical column name; throws InputError for unknown names.
  double operator[](std::string_view column) const;
};

FeatureVector extract_all(const LesionRegion& region,
                          const ExtractionConfig& config = {});

/// Physical volume of one voxel (product of spacing).
double voxel_volume(const LesionRegion& region);

// Gray-level matrices, exposed so tests can check normalisation.
namespace texture {

/// Symmetric co-occurrence counts for one offset, num_levels^2 row-major
/// with level i at index i-1.
Eigen::MatrixXd glcm_counts(const DiscretizedRegion& d, const Index3& offset);
/// Rows: gray level, columns: dependence count 1..27.
Eigen::MatrixXd gldm_counts(const DiscretizedRegion& d);
/// Rows: gray level, columns: run length 1..max.
Eigen::MatrixXd glrlm_counts(const DiscretizedRegion& d, const Index3& direction);
/// Rows: gray level, columns: zone size 1..max.
Eigen::MatrixXd glszm_counts(const DiscretizedRegion& d);

struct NgtdmTable {
  Eigen::VectorXd n;  // voxels per level that have at least one neighbour
  Eigen::VectorXd s;  // summed |level - neighbourhood mean|
};
NgtdmTable ngtdm_table(const DiscretizedRegion& d);

}  // namespace texture

}  // namespace radlesion

#endif  // RADLESION_FEATURES_HPP_

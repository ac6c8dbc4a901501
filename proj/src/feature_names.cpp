#include <algorithm>
#include <string>

#include "radlesion/features.hpp"

namespace radlesion {
namespace {

constexpr std::array<std::string_view, kShapeCount> kShapeNames = {
    "MeshVolume",        "SurfaceArea",
    "SurfaceVolumeRatio", "Sphericity",
    "Maximum3DDiameter", "Maximum2DDiameterSlice",
    "Maximum2DDiameterColumn", "Maximum2DDiameterRow",
    "MajorAxisLength",   "MinorAxisLength",
    "LeastAxisLength",   "Elongation",
    "Flatness"};

constexpr std::array<std::string_view, kFirstOrderCount> kFirstOrderNames = {
    "Energy",   "TotalEnergy", "Entropy",  "Minimum",
    "10Percentile", "90Percentile", "Maximum", "Mean",
    "Median",   "InterquartileRange", "Range", "MeanAbsoluteDeviation",
    "RobustMeanAbsoluteDeviation", "RootMeanSquared", "Skewness", "Kurtosis",
    "Variance", "Uniformity"};

constexpr std::array<std::string_view, kGlcmCount> kGlcmNames = {
    "Autocorrelation", "ClusterProminence", "ClusterShade",
    "ClusterTendency", "Contrast",          "Correlation",
    "DifferenceAverage", "DifferenceEntropy", "DifferenceVariance",
    "Id",              "Idm",               "Idmn",
    "Idn",             "Imc1",              "Imc2",
    "InverseVariance", "JointAverage",      "JointEnergy",
    "JointEntropy",    "MCC",               "MaximumProbability",
    "SumEntropy",      "SumSquares"};

constexpr std::array<std::string_view, kGldmCount> kGldmNames = {
    "SmallDependenceEmphasis",
    "LargeDependenceEmphasis",
    "GrayLevelNonUniformity",
    "DependenceNonUniformity",
    "DependenceNonUniformityNormalized",
    "GrayLevelVariance",
    "DependenceVariance",
    "DependenceEntropy",
    "LowGrayLevelEmphasis",
    "HighGrayLevelEmphasis",
    "SmallDependenceLowGrayLevelEmphasis",
    "SmallDependenceHighGrayLevelEmphasis",
    "LargeDependenceLowGrayLevelEmphasis",
    "LargeDependenceHighGrayLevelEmphasis"};

constexpr std::array<std::string_view, kGlrlmCount> kGlrlmNames = {
    "ShortRunEmphasis",
    "LongRunEmphasis",
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "RunLengthNonUniformity",
    "RunLengthNonUniformityNormalized",
    "RunPercentage",
    "GrayLevelVariance",
    "RunVariance",
    "RunEntropy",
    "LowGrayLevelRunEmphasis",
    "HighGrayLevelRunEmphasis",
    "ShortRunLowGrayLevelEmphasis",
    "ShortRunHighGrayLevelEmphasis",
    "LongRunLowGrayLevelEmphasis",
    "LongRunHighGrayLevelEmphasis"};

constexpr std::array<std::string_view, kGlszmCount> kGlszmNames = {
    "SmallAreaEmphasis",
    "LargeAreaEmphasis",
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "SizeZoneNonUniformity",
    "SizeZoneNonUniformityNormalized",
    "ZonePercentage",
    "GrayLevelVariance",
    "ZoneVariance",
    "ZoneEntropy",
    "LowGrayLevelZoneEmphasis",
    "HighGrayLevelZoneEmphasis",
    "SmallAreaLowGrayLevelEmphasis",
    "SmallAreaHighGrayLevelEmphasis",
    "LargeAreaLowGrayLevelEmphasis",
    "LargeAreaHighGrayLevelEmphasis"};

constexpr std::array<std::string_view, kNgtdmCount> kNgtdmNames = {
    "Coarseness", "Contrast", "Busyness", "Complexity", "Strength"};

}  // namespace

std::string_view family_prefix(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::kShape: return "shape";
    case FeatureFamily::kFirstOrder: return "firstorder";
    case FeatureFamily::kGlcm: return "glcm";
    case FeatureFamily::kGldm: return "gldm";
    case FeatureFamily::kGlrlm: return "glrlm";
    case FeatureFamily::kGlszm: return "glszm";
    case FeatureFamily::kNgtdm: return "ngtdm";
  }
  return "";
}

std::string_view family_token(FeatureFamily family) {
  return family == FeatureFamily::kFirstOrder ? "fos" : family_prefix(family);
}

std::optional<FeatureFamily> family_from_token(std::string_view token) {
  for (auto f : kAllFamilies) {
    if (token == family_token(f) || token == family_prefix(f)) return f;
  }
  return std::nullopt;
}

std::span<const std::string_view> family_feature_names(FeatureFamily family) {
  switch (family) {
    case FeatureFamily::kShape: return kShapeNames;
    case FeatureFamily::kFirstOrder: return kFirstOrderNames;
    case FeatureFamily::kGlcm: return kGlcmNames;
    case FeatureFamily::kGldm: return kGldmNames;
    case FeatureFamily::kGlrlm: return kGlrlmNames;
    case FeatureFamily::kGlszm: return kGlszmNames;
    case FeatureFamily::kNgtdm: return kNgtdmNames;
  }
  return {};
}

int family_size(FeatureFamily family) {
  return static_cast<int>(family_feature_names(family).size());
}

int family_offset(FeatureFamily family) {
  int offset = 0;
  for (auto f : kAllFamilies) {
    if (f == family) return offset;
    offset += family_size(f);
  }
  return offset;
}

const std::vector<std::string>& canonical_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> out;
    for (auto f : kAllFamilies) {
      for (auto name : family_feature_names(f)) {
        out.push_back(std::string(family_prefix(f)) + "_" + std::string(name));
      }
    }
    return out;
  }();
  return columns;
}

std::optional<FeatureFamily> family_of_column(std::string_view column) {
  const auto& cols = canonical_columns();
  const auto it = std::find(cols.begin(), cols.end(), column);
  if (it == cols.end()) return std::nullopt;
  const int idx = static_cast<int>(it - cols.begin());
  for (auto f : kAllFamilies) {
    if (idx < family_offset(f) + family_size(f)) return f;
  }
  return std::nullopt;
}

double FeatureVector::operator[](std::string_view column) const {
  const auto& cols = canonical_columns();
  const auto it = std::find(cols.begin(), cols.end(), column);
  if (it == cols.end()) {
    throw InputError("unknown feature column " + std::string(column));
  }
  return values[it - cols.begin()];
}

}  // namespace radlesion

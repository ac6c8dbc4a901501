#include "radlesion/resample.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace radlesion {
namespace {

// Per-axis sampling plan: lower input index, upper input index and the
// weight of the upper one, for every output index.
struct AxisPlan {
  std::vector<int> lo, hi, nearest;
  std::vector<double> frac;
};

AxisPlan plan_axis(int in_dim, double in_spacing, double target) {
  const double extent = in_dim * in_spacing / target;
  // Guard against 3 * 0.1 / 0.1 style round-up.
  const int out_dim = std::max(1, static_cast<int>(std::ceil(extent - 1e-9)));
  const double ratio = target / in_spacing;
  AxisPlan plan;
  plan.lo.resize(out_dim);
  plan.hi.resize(out_dim);
  plan.frac.resize(out_dim);
  plan.nearest.resize(out_dim);
  for (int i = 0; i < out_dim; ++i) {
    const double pos = std::min(i * ratio, static_cast<double>(in_dim - 1));
    const int lo = static_cast<int>(std::floor(pos));
    plan.lo[i] = lo;
    plan.hi[i] = std::min(lo + 1, in_dim - 1);
    plan.frac[i] = pos - lo;
    plan.nearest[i] =
        std::min(static_cast<int>(std::floor(pos + 0.5)), in_dim - 1);
  }
  return plan;
}

}  // namespace

std::pair<VoxelVolume, LesionMask> resample_isotropic(const VoxelVolume& vol,
                                                      const LesionMask& mask,
                                                      double target_mm) {
  if (!(target_mm > 0.0)) throw InputError("target spacing must be positive");
  validate(vol);
  if (!vol.same_geometry(mask.labels)) {
    throw MaskError("mask geometry differs from its volume");
  }
  std::array<AxisPlan, 3> plans;
  std::array<int, 3> out_dims{};
  for (int k = 0; k < 3; ++k) {
    plans[k] = plan_axis(vol.dims[k], vol.spacing[k], target_mm);
    out_dims[k] = static_cast<int>(plans[k].lo.size());
  }
  const Eigen::Vector3d out_spacing = Eigen::Vector3d::Constant(target_mm);
  VoxelVolume out_vol(out_dims, out_spacing, vol.origin);
  LesionMask out_mask;
  out_mask.labels = LabelVolume(out_dims, out_spacing, vol.origin);
  out_mask.class_of_label = mask.class_of_label;

  const auto& px = plans[0];
  const auto& py = plans[1];
  const auto& pz = plans[2];
  for (int z = 0; z < out_dims[2]; ++z) {
    const double fz = pz.frac[z];
    for (int y = 0; y < out_dims[1]; ++y) {
      const double fy = py.frac[y];
      for (int x = 0; x < out_dims[0]; ++x) {
        const double fx = px.frac[x];
        auto lerp_x = [&](int yy, int zz) {
          return (1.0 - fx) * vol(px.lo[x], yy, zz) + fx * vol(px.hi[x], yy, zz);
        };
        const double c0 = (1.0 - fy) * lerp_x(py.lo[y], pz.lo[z]) +
                          fy * lerp_x(py.hi[y], pz.lo[z]);
        const double c1 = (1.0 - fy) * lerp_x(py.lo[y], pz.hi[z]) +
                          fy * lerp_x(py.hi[y], pz.hi[z]);
        out_vol(x, y, z) = (1.0 - fz) * c0 + fz * c1;
        out_mask.labels(x, y, z) =
            mask.labels(px.nearest[x], py.nearest[y], pz.nearest[z]);
      }
    }
  }
  return {std::move(out_vol), std::move(out_mask)};
}

LesionExtraction extract_lesions(const VoxelVolume& vol, const LesionMask& mask) {
  if (!vol.same_geometry(mask.labels)) {
    throw MaskError("mask geometry differs from its volume");
  }
  std::map<int, LesionRegion> by_label;
  const auto& labels = mask.labels;
  for (int z = 0; z < labels.dims[2]; ++z) {
    for (int y = 0; y < labels.dims[1]; ++y) {
      for (int x = 0; x < labels.dims[0]; ++x) {
        const int label = labels(x, y, z);
        if (label == 0) continue;
        LesionRegion& r = by_label[label];
        r.voxels.emplace_back(x, y, z);
        r.intensities.push_back(vol(x, y, z));
      }
    }
  }
  LesionExtraction out;
  for (auto& [label, region] : by_label) {
    const auto it = mask.class_of_label.find(label);
    if (it == mask.class_of_label.end()) {
      throw ConfigError("label " + std::to_string(label) +
                        " has no class assignment");
    }
    region.spacing = vol.spacing;
    out.regions.push_back({label, it->second, std::move(region)});
  }
  for (const auto& [label, cls] : mask.class_of_label) {
    if (!by_label.count(label)) {
      out.warnings.push_back("label " + std::to_string(label) + " (class " +
                             std::to_string(cls) +
                             ") has no voxels after resampling; dropped");
    }
  }
  return out;
}

}  // namespace radlesion

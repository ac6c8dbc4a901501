#include "radlesion/phantom.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "radlesion/features.hpp"
#include "radlesion/resample.hpp"
#include "radlesion/rng.hpp"

namespace radlesion {
namespace {

Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

Eigen::Vector3d random_direction(Rng& rng) {
  Eigen::Vector3d v(rng.normal(), rng.normal(), rng.normal());
  return v.normalized();
}

// Point-membership test in physical coordinates.
using Shape = std::function<bool(const Eigen::Vector3d&)>;

Shape shell_cap(const Eigen::Vector3d& centre, Rng& rng) {
  const double radius = rng.uniform(12.0, 16.0);
  const double thickness = rng.uniform(2.5, 4.0);
  const double half_angle = rng.uniform(35.0, 55.0) * M_PI / 180.0;
  const Eigen::Vector3d dir = random_direction(rng);
  const Eigen::Vector3d sphere_centre = centre - (radius - 0.5 * thickness) * dir;
  const double cos_limit = std::cos(half_angle);
  return [=](const Eigen::Vector3d& p) {
    const Eigen::Vector3d d = p - sphere_centre;
    const double r = d.norm();
    if (r < radius - thickness || r > radius) return false;
    return d.dot(dir) >= cos_limit * r;
  };
}

Shape lens(const Eigen::Vector3d& centre, Rng& rng) {
  const double half_width = rng.uniform(6.5, 9.5);
  const double thickness = 2.0 * half_width * rng.uniform(0.55, 0.8);
  const double rho = (half_width * half_width + 0.25 * thickness * thickness) / thickness;
  const Eigen::Vector3d dir = random_direction(rng);
  const Eigen::Vector3d c1 = centre + (rho - 0.5 * thickness) * dir;
  const Eigen::Vector3d c2 = centre - (rho - 0.5 * thickness) * dir;
  return [=](const Eigen::Vector3d& p) {
    return (p - c1).norm() <= rho && (p - c2).norm() <= rho;
  };
}

Shape spheroid(const Eigen::Vector3d& centre, Rng& rng) {
  const double r0 = rng.uniform(6.0, 9.5);
  const Eigen::Vector3d radii(r0, r0 * rng.uniform(0.8, 1.0), r0 * rng.uniform(0.8, 1.0));
  const Eigen::Matrix3d rot = random_rotation(rng);
  return [=](const Eigen::Vector3d& p) {
    const Eigen::Vector3d local = rot.transpose() * (p - centre);
    return local.cwiseQuotient(radii).squaredNorm() <= 1.0;
  };
}

}  // namespace

std::vector<int> phantom_class_order(const std::array<int, 3>& counts) {
  std::array<int, 3> left = counts;
  std::vector<int> order;
  bool any = true;
  while (any) {
    any = false;
    for (int c = 0; c < 3; ++c) {
      if (left[c] > 0) {
        order.push_back(c + 1);
        --left[c];
        any = true;
      }
    }
  }
  return order;
}

PhantomScan generate_phantom_scan(int class_id, int index, std::uint64_t seed,
                                  const PhantomGeometry& g) {
  if (class_id < 1 || class_id > 3) throw InputError("phantom class must be 1..3");
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(index)));
  PhantomScan scan;
  scan.class_id = class_id;
  char id[32];
  std::snprintf(id, sizeof id, "phantom_%04d", index + 1);
  scan.scan_id = id;

  const Eigen::Vector3d extent =
      Eigen::Vector3d(g.dims[0], g.dims[1], g.dims[2]).cwiseProduct(g.spacing);
  Eigen::Vector3d centre = 0.5 * extent;
  for (int k = 0; k < 3; ++k) centre[k] += rng.uniform(-1.5, 1.5);

  Shape inside;
  double lesion_hu = 0.0;
  double texture_sd = 0.0;
  switch (class_id) {
    case 1:
      inside = shell_cap(centre, rng);
      lesion_hu = rng.uniform(58.0, 68.0);
      break;
    case 2:
      inside = lens(centre, rng);
      lesion_hu = rng.uniform(66.0, 76.0);
      break;
    default:
      inside = spheroid(centre, rng);
      lesion_hu = rng.uniform(52.0, 62.0);
      texture_sd = g.speckle_sd;
      break;
  }

  scan.volume = VoxelVolume(g.dims, g.spacing);
  scan.mask.labels = LabelVolume(g.dims, g.spacing);
  scan.mask.class_of_label[1] = class_id;
  for (int z = 0; z < g.dims[2]; ++z) {
    for (int y = 0; y < g.dims[1]; ++y) {
      for (int x = 0; x < g.dims[0]; ++x) {
        const Eigen::Vector3d p = Eigen::Vector3d(x, y, z).cwiseProduct(g.spacing);
        double hu = g.background_hu;
        if (inside(p)) {
          scan.mask.labels(x, y, z) = 1;
          hu = lesion_hu;
          if (texture_sd > 0.0) hu += rng.normal(0.0, texture_sd);
        }
        hu += rng.normal(0.0, g.noise_sd);
        scan.volume(x, y, z) = std::nearbyint(hu);
      }
    }
  }
  return scan;
}

std::vector<PhantomScan> generate_phantom(const std::array<int, 3>& counts,
                                          std::uint64_t seed, const PhantomGeometry& g) {
  for (int c : counts) {
    if (c < 0) throw InputError("phantom class counts must be non-negative");
  }
  const std::vector<int> order = phantom_class_order(counts);
  std::vector<PhantomScan> scans;
  scans.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    scans.push_back(generate_phantom_scan(order[i], static_cast<int>(i), seed, g));
  }
  return scans;
}

std::vector<PhantomScan> generate_phantom(int n_per_class, std::uint64_t seed,
                                          const PhantomGeometry& g) {
  if (n_per_class < 1) throw InputError("n_per_class must be at least 1");
  return generate_phantom({n_per_class, n_per_class, n_per_class}, seed, g);
}

Dataset generate_gaussian_dataset(int n_per_class, int num_features, int num_informative,
                                  double separation, std::uint64_t seed) {
  if (n_per_class < 1 || num_features < 1 || num_informative < 0 ||
      num_informative > num_features) {
    throw InputError("invalid Gaussian phantom configuration");
  }
  Rng rng(seed);
  // Class k shifts informative column j by separation * cos(2 pi (k + j) / 3),
  // so every informative column separates at least two classes.
  Dataset out;
  const int n = 3 * n_per_class;
  out.X.resize(n, num_features);
  for (int j = 0; j < num_features; ++j) out.feature_names.push_back("f" + std::to_string(j));
  for (int i = 0; i < n; ++i) {
    const int cls = i % 3 + 1;
    out.y.push_back(cls);
    out.scan_ids.push_back("g" + std::to_string(i));
    out.lesion_ids.push_back(1);
    for (int j = 0; j < num_features; ++j) {
      double v = rng.normal();
      if (j < num_informative) v += separation * std::cos(2.0 * M_PI * (cls + j) / 3.0);
      out.X(i, j) = v;
    }
  }
  return out;
}

Dataset phantom_features(const std::vector<PhantomScan>& scans, double target_spacing,
                         double bin_width) {
  std::vector<FeatureVector> rows;
  std::vector<std::string> ids;
  for (const auto& scan : scans) {
    const auto [vol, mask] = resample_isotropic(scan.volume, scan.mask, target_spacing);
    const LesionExtraction lesions = extract_lesions(vol, mask);
    for (const auto& lesion : lesions.regions) {
      FeatureVector fv = extract_all(lesion.region, {bin_width});
      fv.lesion_id = lesion.label;
      fv.class_id = lesion.class_id;
      rows.push_back(fv);
      ids.push_back(scan.scan_id);
    }
  }
  return make_dataset(rows, ids);
}

}  // namespace radlesion

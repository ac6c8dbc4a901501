#include "radlesion/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "radlesion/mesh.hpp"

namespace radlesion {
namespace {

constexpr double kCoarsenessCap = 1e6;

double entropy_bits(const Eigen::ArrayXd& p) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) h -= p[k] * std::log2(p[k]);
  }
  return h;
}

double entropy_bits(const Eigen::ArrayXXd& p) {
  return entropy_bits(Eigen::ArrayXd(p.reshaped()));
}

// Linear interpolation between order statistics at position q * (n - 1).
double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Shared statistics of a gray-level by size matrix (GLDM, GLRLM, GLSZM).
// Row r is gray level r + 1, column c is size c + 1.
struct SizeMatrixStats {
  double total = 0.0;
  double small_emphasis = 0.0, large_emphasis = 0.0;
  double gray_nonuniformity = 0.0, gray_nonuniformity_norm = 0.0;
  double size_nonuniformity = 0.0, size_nonuniformity_norm = 0.0;
  double gray_variance = 0.0, size_variance = 0.0, entropy = 0.0;
  double low_gray = 0.0, high_gray = 0.0;
  double small_low = 0.0, small_high = 0.0, large_low = 0.0, large_high = 0.0;
};

SizeMatrixStats size_matrix_stats(const Eigen::MatrixXd& counts) {
  SizeMatrixStats s;
  s.total = counts.sum();
  if (s.total <= 0.0) return s;
  const Eigen::ArrayXXd p = counts.array() / s.total;
  const Eigen::Index rows = p.rows();
  const Eigen::Index cols = p.cols();
  const Eigen::ArrayXd i = Eigen::ArrayXd::LinSpaced(rows, 1.0, static_cast<double>(rows));
  const Eigen::ArrayXd j = Eigen::ArrayXd::LinSpaced(cols, 1.0, static_cast<double>(cols));
  const Eigen::ArrayXd pi = p.rowwise().sum();
  const Eigen::ArrayXd pj = p.colwise().sum().transpose();
  const double mu_i = (pi * i).sum();
  const double mu_j = (pj * j).sum();
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = p(r, c);
      if (v == 0.0) continue;
      const double i2 = i[r] * i[r];
      const double j2 = j[c] * j[c];
      s.small_emphasis += v / j2;
      s.large_emphasis += v * j2;
      s.low_gray += v / i2;
      s.high_gray += v * i2;
      s.small_low += v / (i2 * j2);
      s.small_high += v * i2 / j2;
      s.large_low += v * j2 / i2;
      s.large_high += v * i2 * j2;
    }
  }
  const Eigen::ArrayXd row_counts = counts.rowwise().sum().array();
  const Eigen::ArrayXd col_counts = counts.colwise().sum().transpose().array();
  s.gray_nonuniformity = row_counts.square().sum() / s.total;
  s.gray_nonuniformity_norm = row_counts.square().sum() / (s.total * s.total);
  s.size_nonuniformity = col_counts.square().sum() / s.total;
  s.size_nonuniformity_norm = col_counts.square().sum() / (s.total * s.total);
  s.gray_variance = (pi * (i - mu_i).square()).sum();
  s.size_variance = (pj * (j - mu_j).square()).sum();
  s.entropy = entropy_bits(p);
  return s;
}

// 16 run-length / size-zone features, shared layout of GLRLM and GLSZM.
std::array<double, 16> size_family(const SizeMatrixStats& s, double num_voxels) {
  return {s.small_emphasis,
          s.large_emphasis,
          s.gray_nonuniformity,
          s.gray_nonuniformity_norm,
          s.size_nonuniformity,
          s.size_nonuniformity_norm,
          num_voxels > 0.0 ? s.total / num_voxels : 0.0,
          s.gray_variance,
          s.size_variance,
          s.entropy,
          s.low_gray,
          s.high_gray,
          s.small_low,
          s.small_high,
          s.large_low,
          s.large_high};
}

GlcmFeatures glcm_from_probabilities(const Eigen::ArrayXXd& p) {
  const Eigen::Index ng = p.rows();
  const Eigen::ArrayXd level = Eigen::ArrayXd::LinSpaced(ng, 1.0, static_cast<double>(ng));
  const Eigen::ArrayXd px = p.rowwise().sum();
  const Eigen::ArrayXd py = p.colwise().sum().transpose();
  const double mu_x = (px * level).sum();
  const double mu_y = (py * level).sum();
  const double var_x = (px * (level - mu_x).square()).sum();
  const double var_y = (py * (level - mu_y).square()).sum();

  Eigen::ArrayXd p_sum = Eigen::ArrayXd::Zero(2 * ng + 1);   // index i + j
  Eigen::ArrayXd p_diff = Eigen::ArrayXd::Zero(ng);          // index |i - j|
  double autocorrelation = 0.0, prominence = 0.0, shade = 0.0, tendency = 0.0;
  double contrast = 0.0, cross = 0.0, sum_squares = 0.0, hxy1 = 0.0, hxy2 = 0.0;
  for (Eigen::Index r = 0; r < ng; ++r) {
    for (Eigen::Index c = 0; c < ng; ++c) {
      const double i = level[r];
      const double j = level[c];
      const double v = p(r, c);
      const double pxy = px[r] * py[c];
      if (pxy > 0.0) hxy2 -= pxy * std::log2(pxy);
      if (v == 0.0) continue;
      const double centred = i + j - mu_x - mu_y;
      autocorrelation += v * i * j;
      prominence += v * std::pow(centred, 4);
      shade += v * std::pow(centred, 3);
      tendency += v * centred * centred;
      contrast += v * (i - j) * (i - j);
      cross += v * i * j;
      sum_squares += v * (i - mu_x) * (i - mu_x);
      hxy1 -= v * std::log2(pxy);
      p_sum[r + c + 2] += v;
      p_diff[std::abs(r - c)] += v;
    }
  }
  const Eigen::ArrayXd k = Eigen::ArrayXd::LinSpaced(ng, 0.0, static_cast<double>(ng - 1));
  const double diff_average = (k * p_diff).sum();
  const double diff_variance = ((k - diff_average).square() * p_diff).sum();
  const double dng = static_cast<double>(ng);
  double id = 0.0, idm = 0.0, idn = 0.0, idmn = 0.0, inverse_variance = 0.0;
  for (Eigen::Index d = 0; d < ng; ++d) {
    const double v = p_diff[d];
    const double kk = static_cast<double>(d);
    id += v / (1.0 + kk);
    idm += v / (1.0 + kk * kk);
    idn += v / (1.0 + kk / dng);
    idmn += v / (1.0 + kk * kk / (dng * dng));
    if (d > 0) inverse_variance += v / (kk * kk);
  }
  const double hx = entropy_bits(px);
  const double hy = entropy_bits(py);
  const double hxy = entropy_bits(p);
  const double correlation = (var_x > 0.0 && var_y > 0.0)
                                 ? (cross - mu_x * mu_y) / std::sqrt(var_x * var_y)
                                 : 1.0;
  const double hmax = std::max(hx, hy);
  const double imc1 = hmax > 0.0 ? (hxy - hxy1) / hmax : 0.0;
  const double imc2_arg = hxy2 - hxy;
  const double imc2 = imc2_arg > 0.0 ? std::sqrt(1.0 - std::exp(-2.0 * imc2_arg)) : 0.0;

  // MCC: second largest eigenvalue of Q(i,j) = sum_k p(i,k)p(j,k)/(px(i)py(k)),
  // computed on the similar symmetric matrix over populated levels.
  double mcc = 0.0;
  std::vector<Eigen::Index> rows_used, cols_used;
  for (Eigen::Index r = 0; r < ng; ++r) {
    if (px[r] > 0.0) rows_used.push_back(r);
    if (py[r] > 0.0) cols_used.push_back(r);
  }
  if (rows_used.size() >= 2) {
    const auto nr = static_cast<Eigen::Index>(rows_used.size());
    const auto nc = static_cast<Eigen::Index>(cols_used.size());
    Eigen::MatrixXd a(nr, nc);
    for (Eigen::Index r = 0; r < nr; ++r) {
      for (Eigen::Index c = 0; c < nc; ++c) {
        a(r, c) = p(rows_used[r], cols_used[c]) /
                  std::sqrt(px[rows_used[r]] * py[cols_used[c]]);
      }
    }
    const Eigen::MatrixXd q = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q, Eigen::EigenvaluesOnly);
    const double second = solver.eigenvalues()[nr - 2];
    mcc = second > 0.0 ? std::sqrt(second) : 0.0;
  }

  return {autocorrelation,
          prominence,
          shade,
          tendency,
          contrast,
          correlation,
          diff_average,
          entropy_bits(p_diff),
          diff_variance,
          id,
          idm,
          idmn,
          idn,
          imc1,
          imc2,
          inverse_variance,
          mu_x,
          p.square().sum(),
          hxy,
          mcc,
          p.maxCoeff(),
          entropy_bits(p_sum),
          sum_squares};
}

bool in_region(const DiscretizedRegion& d, const Index3& g) {
  return d.grid.contains(g.x(), g.y(), g.z()) && d.grid(g) > 0;
}

}  // namespace

const std::array<Index3, 13>& unique_directions() {
  static const std::array<Index3, 13> dirs = [] {
    std::array<Index3, 13> out;
    int n = 0;
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const Index3 v(dx, dy, dz);
          // keep the half whose first nonzero component is positive
          const int first = dx != 0 ? dx : (dy != 0 ? dy : dz);
          if (first > 0) out[n++] = v;
        }
      }
    }
    return out;
  }();
  return dirs;
}

DiscretizedRegion discretize(const LesionRegion& region, double bin_width) {
  if (!(bin_width > 0.0)) throw InputError("bin width must be positive");
  if (region.voxels.empty()) throw InputError("empty lesion region");
  if (region.voxels.size() != region.intensities.size()) {
    throw InputError("region voxel and intensity counts differ");
  }
  DiscretizedRegion d;
  d.bin_width = bin_width;
  d.voxels = region.voxels;
  d.spacing = region.spacing;
  const double lo = *std::min_element(region.intensities.begin(), region.intensities.end());
  d.levels.reserve(region.size());
  d.num_levels = 1;
  for (double v : region.intensities) {
    const int level = static_cast<int>(std::floor((v - lo) / bin_width)) + 1;
    d.levels.push_back(level);
    d.num_levels = std::max(d.num_levels, level);
  }

  Index3 lo_idx = region.voxels.front();
  Index3 hi_idx = region.voxels.front();
  for (const auto& v : region.voxels) {
    lo_idx = lo_idx.cwiseMin(v);
    hi_idx = hi_idx.cwiseMax(v);
  }
  d.grid_offset = lo_idx - Index3::Ones();
  const Index3 extent = hi_idx - lo_idx + Index3::Constant(3);
  d.grid = Volume<int>({extent.x(), extent.y(), extent.z()}, region.spacing);
  for (std::size_t k = 0; k < d.voxels.size(); ++k) {
    int& cell = d.grid(d.to_grid(d.voxels[k]));
    if (cell != 0) throw InputError("region lists a voxel twice");
    cell = d.levels[k];
  }
  return d;
}

double voxel_volume(const LesionRegion& region) {
  return region.spacing.prod();
}

ShapeFeatures shape_features(const LesionRegion& region) {
  if (region.voxels.empty()) throw InputError("empty lesion region");
  const TriangleMesh mesh = marching_cubes(region.voxels, region.spacing);
  double volume = mesh.volume();
  double area = mesh.area();
  if (mesh.triangles.empty() || !(volume > 0.0) || !(area > 0.0)) {
    const Eigen::Vector3d& s = region.spacing;
    volume = voxel_volume(region);
    area = 2.0 * (s.x() * s.y() + s.y() * s.z() + s.x() * s.z());
  }
  const double sphericity = std::cbrt(36.0 * M_PI * volume * volume) / area;

  // Diameters over edge vertices; polygon centroids never extend the hull.
  double d3 = 0.0, d_slice = 0.0, d_column = 0.0, d_row = 0.0;
  const int nv = mesh.num_edge_vertices;
  for (int a = 0; a < nv; ++a) {
    const Eigen::Vector3d& va = mesh.vertices[a];
    for (int b = a + 1; b < nv; ++b) {
      const Eigen::Vector3d& vb = mesh.vertices[b];
      const double dist2 = (va - vb).squaredNorm();
      d3 = std::max(d3, dist2);
      if (va.z() == vb.z()) d_slice = std::max(d_slice, dist2);
      if (va.x() == vb.x()) d_column = std::max(d_column, dist2);
      if (va.y() == vb.y()) d_row = std::max(d_row, dist2);
    }
  }

  // Principal axes of the physical voxel-centre cloud (population covariance).
  const auto n = static_cast<Eigen::Index>(region.voxels.size());
  Eigen::Matrix3Xd pts(3, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    pts.col(k) = region.voxels[k].cast<double>().cwiseProduct(region.spacing);
  }
  const Eigen::Vector3d mean = pts.rowwise().mean();
  pts.colwise() -= mean;
  const Eigen::Matrix3d cov = pts * pts.transpose() / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov, Eigen::EigenvaluesOnly);
  Eigen::Vector3d ev = solver.eigenvalues().cwiseMax(0.0);  // ascending
  // Eigenvalues are only accurate to about eps * largest; below that they
  // are noise (a straight rod would otherwise get a nonzero minor axis).
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * ev[2];
  for (int k = 0; k < 2; ++k) {
    if (ev[k] <= noise) ev[k] = 0.0;
  }
  const double least = ev[0], minor = ev[1], major = ev[2];
  const double elongation = major > 0.0 ? std::sqrt(minor / major) : 1.0;
  const double flatness = major > 0.0 ? std::sqrt(least / major) : 1.0;

  return {volume,
          area,
          area / volume,
          sphericity,
          std::sqrt(d3),
          std::sqrt(d_slice),
          std::sqrt(d_column),
          std::sqrt(d_row),
          4.0 * std::sqrt(major),
          4.0 * std::sqrt(minor),
          4.0 * std::sqrt(least),
          elongation,
          flatness};
}

FirstOrderFeatures first_order_features(const LesionRegion& region,
                                        const DiscretizedRegion& d) {
  const auto& x = region.intensities;
  if (x.empty()) throw InputError("empty lesion region");
  const auto n = static_cast<double>(x.size());
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();

  double energy = 0.0, sum = 0.0;
  for (double v : x) {
    energy += v * v;
    sum += v;
  }
  const double mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, mad = 0.0;
  if (hi > lo) {
    for (double v : x) {
      const double c = v - mean;
      m2 += c * c;
      m3 += c * c * c;
      m4 += c * c * c * c;
      mad += std::abs(c);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    mad /= n;
  }
  const double p10 = percentile(sorted, 0.10);
  const double p90 = percentile(sorted, 0.90);

  double robust_mad = 0.0;
  if (hi > lo) {
    double robust_sum = 0.0;
    int robust_n = 0;
    for (double v : x) {
      if (v >= p10 && v <= p90) {
        robust_sum += v;
        ++robust_n;
      }
    }
    // Two voxels leave nothing between the percentiles.
    if (robust_n > 0) {
      const double robust_mean = robust_sum / robust_n;
      for (double v : x) {
        if (v >= p10 && v <= p90) robust_mad += std::abs(v - robust_mean);
      }
      robust_mad /= robust_n;
    }
  }

  Eigen::ArrayXd hist = Eigen::ArrayXd::Zero(d.num_levels);
  for (int level : d.levels) hist[level - 1] += 1.0;
  hist /= n;

  const bool varies = m2 > 0.0;
  return {energy,
          energy * voxel_volume(region),
          entropy_bits(hist),
          lo,
          p10,
          p90,
          hi,
          mean,
          percentile(sorted, 0.5),
          percentile(sorted, 0.75) - percentile(sorted, 0.25),
          hi - lo,
          mad,
          robust_mad,
          std::sqrt(energy / n),
          varies ? m3 / std::pow(m2, 1.5) : 0.0,
          varies ? m4 / (m2 * m2) : 0.0,
          m2,
          hist.square().sum()};
}

FirstOrderFeatures first_order_features(const LesionRegion& region, double bin_width) {
  return first_order_features(region, discretize(region, bin_width));
}

namespace texture {

Eigen::MatrixXd glcm_counts(const DiscretizedRegion& d, const Index3& offset) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(d.num_levels, d.num_levels);
  for (std::size_t k = 0; k < d.voxels.size(); ++k) {
    const Index3 g = d.to_grid(d.voxels[k]) + offset;
    if (!in_region(d, g)) continue;
    const int i = d.levels[k] - 1;
    const int j = d.grid(g) - 1;
    counts(i, j) += 1.0;
    counts(j, i) += 1.0;
  }
  return counts;
}

Eigen::MatrixXd gldm_counts(const DiscretizedRegion& d) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(d.num_levels, 27);
  for (std::size_t k = 0; k < d.voxels.size(); ++k) {
    const Index3 g = d.to_grid(d.voxels[k]);
    const int level = d.levels[k];
    int dependent = 0;
    for (const auto& dir : unique_directions()) {
      for (int sign : {1, -1}) {
        const Index3 nb = g + sign * dir;
        if (d.grid(nb) == level) ++dependent;  // padding keeps nb in range
      }
    }
    counts(level - 1, dependent) += 1.0;  // column j - 1 with j = dependent + 1
  }
  return counts;
}

Eigen::MatrixXd glrlm_counts(const DiscretizedRegion& d, const Index3& direction) {
  const int max_run = *std::max_element(d.grid.dims.begin(), d.grid.dims.end());
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(d.num_levels, max_run);
  int longest = 1;
  for (std::size_t k = 0; k < d.voxels.size(); ++k) {
    const Index3 g = d.to_grid(d.voxels[k]);
    const int level = d.levels[k];
    if (d.grid(g - direction) == level) continue;  // not the start of a run
    int length = 1;
    Index3 cur = g + direction;
    while (d.grid(cur) == level) {
      ++length;
      cur += direction;
    }
    counts(level - 1, length - 1) += 1.0;
    longest = std::max(longest, length);
  }
  return counts.leftCols(longest);
}

Eigen::MatrixXd glszm_counts(const DiscretizedRegion& d) {
  Volume<int> seen(d.grid.dims, d.spacing, Eigen::Vector3d::Zero(), 0);
  std::vector<std::pair<int, int>> zones;  // (level, size)
  std::vector<Index3> stack;
  int largest = 1;
  for (std::size_t k = 0; k < d.voxels.size(); ++k) {
    const Index3 start = d.to_grid(d.voxels[k]);
    if (seen(start)) continue;
    const int level = d.levels[k];
    int size = 0;
    stack.push_back(start);
    seen(start) = 1;
    while (!stack.empty()) {
      const Index3 cur = stack.back();
      stack.pop_back();
      ++size;
      for (const auto& dir : unique_directions()) {
        for (int sign : {1, -1}) {
          const Index3 nb = cur + sign * dir;
          if (d.grid(nb) == level && !seen(nb)) {
            seen(nb) = 1;
            stack.push_back(nb);
          }
        }
      }
    }
    zones.emplace_back(level, size);
    largest = std::max(largest, size);
  }
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(d.num_levels, largest);
  for (const auto& [level, size] : zones) counts(level - 1, size - 1) += 1.0;
  return counts;
}

NgtdmTable ngtdm_table(const DiscretizedRegion& d) {
  NgtdmTable t{Eigen::VectorXd::Zero(d.num_levels), Eigen::VectorXd::Zero(d.num_levels)};
  for (std::size_t k = 0; k < d.voxels.size(); ++k) {
    const Index3 g = d.to_grid(d.voxels[k]);
    double sum = 0.0;
    int count = 0;
    for (const auto& dir : unique_directions()) {
      for (int sign : {1, -1}) {
        const int v = d.grid(g + sign * dir);
        if (v > 0) {
          sum += v;
          ++count;
        }
      }
    }
    if (count == 0) continue;
    const int level = d.levels[k];
    t.n[level - 1] += 1.0;
    t.s[level - 1] += std::abs(level - sum / count);
  }
  return t;
}

}  // namespace texture

GlcmFeatures glcm_features(const DiscretizedRegion& d) {
  GlcmFeatures mean{};
  int used = 0;
  for (const auto& dir : unique_directions()) {
    const Eigen::MatrixXd counts = texture::glcm_counts(d, dir);
    const double total = counts.sum();
    if (total <= 0.0) continue;
    const GlcmFeatures f = glcm_from_probabilities(counts.array() / total);
    for (int k = 0; k < kGlcmCount; ++k) mean[k] += f[k];
    ++used;
  }
  if (used == 0) {
    // No two voxels touch: pair every voxel with itself.
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(d.num_levels, d.num_levels);
    for (int level : d.levels) counts(level - 1, level - 1) += 1.0;
    return glcm_from_probabilities(counts.array() / counts.sum());
  }
  for (double& v : mean) v /= used;
  return mean;
}

GldmFeatures gldm_features(const DiscretizedRegion& d) {
  const SizeMatrixStats s = size_matrix_stats(texture::gldm_counts(d));
  return {s.small_emphasis,
          s.large_emphasis,
          s.gray_nonuniformity,
          s.size_nonuniformity,
          s.size_nonuniformity_norm,
          s.gray_variance,
          s.size_variance,
          s.entropy,
          s.low_gray,
          s.high_gray,
          s.small_low,
          s.small_high,
          s.large_low,
          s.large_high};
}

GlrlmFeatures glrlm_features(const DiscretizedRegion& d) {
  GlrlmFeatures mean{};
  const auto n = static_cast<double>(d.voxels.size());
  for (const auto& dir : unique_directions()) {
    const auto f = size_family(size_matrix_stats(texture::glrlm_counts(d, dir)), n);
    for (int k = 0; k < kGlrlmCount; ++k) mean[k] += f[k];
  }
  for (double& v : mean) v /= static_cast<double>(unique_directions().size());
  return mean;
}

GlszmFeatures glszm_features(const DiscretizedRegion& d) {
  return size_family(size_matrix_stats(texture::glszm_counts(d)),
                     static_cast<double>(d.voxels.size()));
}

NgtdmFeatures ngtdm_features(const DiscretizedRegion& d) {
  const texture::NgtdmTable t = texture::ngtdm_table(d);
  const double nvp = t.n.sum();
  if (nvp <= 0.0) return {kCoarsenessCap, 0.0, 0.0, 0.0, 0.0};
  const Eigen::ArrayXd p = t.n.array() / nvp;
  const Eigen::ArrayXd& s = t.s.array();
  const Eigen::Index ng = p.size();
  int ngp = 0;
  for (Eigen::Index i = 0; i < ng; ++i) ngp += p[i] > 0.0 ? 1 : 0;

  const double ps = (p * s).sum();
  const double s_total = s.sum();
  const double coarseness = ps > 0.0 ? std::min(1.0 / ps, kCoarsenessCap) : kCoarsenessCap;

  double contrast_sum = 0.0, busy_denom = 0.0, complexity = 0.0, strength_num = 0.0;
  for (Eigen::Index a = 0; a < ng; ++a) {
    if (p[a] == 0.0) continue;
    const double i = static_cast<double>(a + 1);
    for (Eigen::Index b = 0; b < ng; ++b) {
      if (p[b] == 0.0) continue;
      const double j = static_cast<double>(b + 1);
      const double diff2 = (i - j) * (i - j);
      contrast_sum += p[a] * p[b] * diff2;
      busy_denom += std::abs(i * p[a] - j * p[b]);
      complexity += std::abs(i - j) * (p[a] * s[a] + p[b] * s[b]) / (p[a] + p[b]);
      strength_num += (p[a] + p[b]) * diff2;
    }
  }
  const double contrast =
      ngp > 1 ? contrast_sum / (ngp * (ngp - 1.0)) * (s_total / nvp) : 0.0;
  const double busyness = busy_denom > 0.0 ? ps / busy_denom : 0.0;
  const double strength = s_total > 0.0 ? strength_num / s_total : 0.0;
  return {coarseness, contrast, busyness, complexity / nvp, strength};
}

FeatureVector extract_all(const LesionRegion& input, const ExtractionConfig& config) {
  // Scan order makes every floating-point reduction independent of the
  // order in which the caller listed the voxels.
  if (input.voxels.size() != input.intensities.size()) {
    throw InputError("region voxel and intensity counts differ");
  }
  LesionRegion region;
  region.spacing = input.spacing;
  std::vector<std::size_t> order(input.voxels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Index3& va = input.voxels[a];
    const Index3& vb = input.voxels[b];
    return std::tie(va.z(), va.y(), va.x()) < std::tie(vb.z(), vb.y(), vb.x());
  });
  for (std::size_t k : order) {
    region.voxels.push_back(input.voxels[k]);
    region.intensities.push_back(input.intensities[k]);
  }
  const DiscretizedRegion d = discretize(region, config.bin_width);
  FeatureVector out;
  int at = 0;
  auto append = [&](const auto& values) {
    for (double v : values) out.values[at++] = v;
  };
  append(shape_features(region));
  append(first_order_features(region, d));
  append(glcm_features(d));
  append(gldm_features(d));
  append(glrlm_features(d));
  append(glszm_features(d));
  append(ngtdm_features(d));
  return out;
}

}  // namespace radlesion

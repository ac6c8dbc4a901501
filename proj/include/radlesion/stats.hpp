#ifndef RADLESION_STATS_HPP_
#define RADLESION_STATS_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "radlesion/dataset.hpp"

namespace radlesion {

using GroupSamples = std::vector<std::vector<double>>;

struct PairwiseResult {
  // Zero-based group indices with group_a < group_b; feature_group_report
  // replaces them with the class ids of the two groups.
  int group_a = 0;
  int group_b = 0;
  double z = 0.0;
  double p = 1.0;
  double p_adjusted = 1.0;
  bool rejected = false;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<PairwiseResult> pairwise;
};

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);
/// Two-tailed standard normal p value for |z|.
double normal_two_tailed(double z);

/// Mid-ranks (1-based) of the pooled values and the tie term sum(t^3 - t).
struct PooledRanks {
  std::vector<double> ranks;  // aligned with concatenated groups
  double tie_term = 0.0;
};
PooledRanks pooled_ranks(const GroupSamples& groups);

/// Kruskal-Wallis H with tie correction, chi-square (g - 1 dof) p value.
TestResult kruskal_wallis(const GroupSamples& groups);

/// Dunn's pairwise z for every group pair with the tie-corrected variance;
/// p_adjusted equals p until a multiple-testing correction is applied.
std::vector<PairwiseResult> dunn_test(const GroupSamples& groups);

struct BhResult {
  std::vector<double> adjusted;
  std::vector<bool> rejected;
};

/// Benjamini-Hochberg step-up procedure at level q.
BhResult benjamini_hochberg(std::span<const double> p, double q = 0.05);

struct ClassSummary {
  int class_id = 0;
  int count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct FeatureTestRow {
  std::string feature;
  bool degenerate = false;
  bool significant = false;  // Kruskal-Wallis p < alpha
  TestResult test;           // pairwise filled only when significant
  std::vector<ClassSummary> classes;
};

enum class BhFamily { kPerFeature, kJoint };

/// Per-feature group comparison across the classes present in `data`.
/// Dunn follows a significant omnibus test; BH runs over each feature's
/// pairs, or over all features' pairs jointly with BhFamily::kJoint.
std::vector<FeatureTestRow> feature_group_report(const Dataset& data,
                                                 const std::vector<std::string>& features,
                                                 double alpha = 0.05,
                                                 BhFamily family = BhFamily::kPerFeature);

/// CSV: feature, H, p, per-pair z/p/p_adj/rejected, per-class median and IQR.
void write_stats_csv(std::ostream& os, const std::vector<FeatureTestRow>& rows);

}  // namespace radlesion

#endif  // RADLESION_STATS_HPP_

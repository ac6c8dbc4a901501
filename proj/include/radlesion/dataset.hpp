#ifndef RADLESION_DATASET_HPP_
#define RADLESION_DATASET_HPP_

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "radlesion/features.hpp"

namespace radlesion {

/// Feature matrix with one row per lesion.
struct Dataset {
  Eigen::MatrixXd X;
  std::vector<int> y;  // class ids 1..3
  std::vector<std::string> feature_names;
  std::vector<std::string> scan_ids;
  std::vector<int> lesion_ids;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index cols() const { return X.cols(); }
};

inline constexpr int kNumClasses = 3;

/// Throws InputError unless N >= 2, p >= 1, labels lie in 1..3 and all
/// entries are finite.
void validate(const Dataset& data);

/// Stacks feature vectors (in the given order) into a 105-column dataset.
Dataset make_dataset(const std::vector<FeatureVector>& rows,
                     const std::vector<std::string>& scan_ids);

/// Column subset in the order of `names`. Missing names raise an
/// InputError that lists every absent column.
Dataset select_columns(const Dataset& data, const std::vector<std::string>& names);

/// Row subset in the order of `rows`.
Dataset select_rows(const Dataset& data, const std::vector<int>& rows);

/// Canonical columns belonging to any of `families`, canonical order.
std::vector<std::string> columns_for(const std::vector<FeatureFamily>& families);

/// Feature CSV: header `scan_id,lesion_id,class,<features...>`. Numbers
/// are written in shortest round-trip form so reading back is exact.
void write_feature_csv(std::ostream& os, const Dataset& data);
void write_feature_csv(const std::filesystem::path& path, const Dataset& data);
/// Reads a feature CSV. The class column may hold 0 for unlabeled rows
/// when `require_labels` is false.
Dataset read_feature_csv(const std::filesystem::path& path, bool require_labels = true);
Dataset read_feature_csv(std::istream& is, bool require_labels = true);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace radlesion

#endif  // RADLESION_DATASET_HPP_

#ifndef RADLESION_MODEL_SELECTION_HPP_
#define RADLESION_MODEL_SELECTION_HPP_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radlesion/dataset.hpp"
#include "radlesion/features.hpp"
#include "radlesion/pls.hpp"

namespace radlesion {

struct ExperimentSpec {
  int id = 1;
  std::vector<FeatureFamily> feature_groups;
  bool do_vip_selection = false;
  int k = 10;
  int max_lv = 20;
  std::uint64_t seed = 42;
  double vip_threshold = 1.0;
};

/// The five feature-group experiments: all features without selection,
/// then VIP selection over all / shape / shape+FOS / texture families.
std::array<ExperimentSpec, 5> standard_experiments(int k = 10, int max_lv = 20,
                                                   std::uint64_t seed = 42,
                                                   double vip_threshold = 1.0);

/// Confusion matrix (rows true class, columns predicted) and one-vs-rest rates.
struct ClassMetrics {
  Eigen::MatrixXi confusion;
  double accuracy = 0.0;
  std::vector<double> sensitivity;
  std::vector<double> specificity;
};

ClassMetrics metrics_from_confusion(const Eigen::MatrixXi& confusion);
ClassMetrics metrics_from_predictions(std::span<const int> truth,
                                      std::span<const int> predicted,
                                      int num_classes = kNumClasses);

struct ExperimentReport {
  int experiment_id = 0;
  std::vector<FeatureFamily> feature_groups;
  bool vip_selection = false;
  double error_rate = 0.0;
  int chosen_lv = 0;
  std::vector<double> cv_errors;  // final sweep, index a - 1
  int considered = 0;
  std::map<FeatureFamily, int> considered_per_family;
  int selected_total = 0;
  std::map<FeatureFamily, int> selected_per_family;
  std::vector<std::string> selected_features;
  std::optional<ClassMetrics> test;
  std::string failure;  // non-empty when the experiment aborted
};

/// Seeded stratified partition: each class is shuffled and dealt round
/// robin, continuing where the previous class stopped. Folds are sorted.
std::vector<std::vector<int>> stratified_kfold(std::span<const int> y, int k,
                                               std::uint64_t seed);

/// Pooled CV error (misclassified / N) for every A = 1..max_lv. Each fold
/// autoscales on its own training rows.
std::vector<double> cv_error_curve(const Dataset& data, int max_lv,
                                   const std::vector<std::vector<int>>& folds);
double cv_error_rate(const Dataset& data, int num_components,
                     const std::vector<std::vector<int>>& folds);

/// Largest A that every CV training split supports.
int max_supported_lv(const Dataset& data, const std::vector<std::vector<int>>& folds,
                     int requested);

struct ExperimentFit {
  PlsModelD model;
  ExperimentReport report;
};

/// LV sweep, optional VIP selection, second sweep on the retained columns
/// and final refit on all rows.
ExperimentFit fit_experiment(const Dataset& data, const ExperimentSpec& spec);

/// Predicts `test` with `model` and scores it against the true classes.
ClassMetrics evaluate(const PlsModelD& model, const Dataset& test);

}  // namespace radlesion

#endif  // RADLESION_MODEL_SELECTION_HPP_

#include "radlesion/model_selection.hpp"

#include <algorithm>
#include <numeric>

#include "radlesion/rng.hpp"

namespace radlesion {
namespace {

std::map<FeatureFamily, int> count_families(const std::vector<std::string>& columns) {
  std::map<FeatureFamily, int> out;
  for (const auto& c : columns) {
    if (const auto fam = family_of_column(c)) ++out[*fam];
  }
  return out;
}

struct SweepResult {
  std::vector<double> errors;
  int best_lv = 1;
};

SweepResult sweep(const Dataset& data, const std::vector<std::vector<int>>& folds,
                  int max_lv) {
  const int cap = max_supported_lv(data, folds, max_lv);
  SweepResult out;
  out.errors = cv_error_curve(data, cap, folds);
  // strict < keeps the smallest A among ties
  for (int a = 1; a <= cap; ++a) {
    if (out.errors[a - 1] < out.errors[out.best_lv - 1]) out.best_lv = a;
  }
  return out;
}

}  // namespace

std::array<ExperimentSpec, 5> standard_experiments(int k, int max_lv, std::uint64_t seed,
                                                   double vip_threshold) {
  using F = FeatureFamily;
  const std::vector<F> all(kAllFamilies.begin(), kAllFamilies.end());
  const std::vector<F> texture = {F::kGlcm, F::kGldm, F::kGlrlm, F::kGlszm, F::kNgtdm};
  std::array<ExperimentSpec, 5> specs;
  specs[0] = {1, all, false, k, max_lv, seed, vip_threshold};
  specs[1] = {2, all, true, k, max_lv, seed, vip_threshold};
  specs[2] = {3, {F::kShape}, true, k, max_lv, seed, vip_threshold};
  specs[3] = {4, {F::kShape, F::kFirstOrder}, true, k, max_lv, seed, vip_threshold};
  specs[4] = {5, texture, true, k, max_lv, seed, vip_threshold};
  return specs;
}

ClassMetrics metrics_from_confusion(const Eigen::MatrixXi& confusion) {
  ClassMetrics m;
  m.confusion = confusion;
  const double total = confusion.sum();
  m.accuracy = total > 0 ? confusion.trace() / total : 0.0;
  const Eigen::Index n = confusion.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double tp = confusion(k, k);
    const double fn = confusion.row(k).sum() - tp;
    const double fp = confusion.col(k).sum() - tp;
    const double tn = total - tp - fn - fp;
    m.sensitivity.push_back(tp + fn > 0 ? tp / (tp + fn) : 0.0);
    m.specificity.push_back(tn + fp > 0 ? tn / (tn + fp) : 0.0);
  }
  return m;
}

ClassMetrics metrics_from_predictions(std::span<const int> truth,
                                      std::span<const int> predicted, int num_classes) {
  if (truth.size() != predicted.size()) throw InputError("prediction count mismatch");
  Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (int c : {truth[i], predicted[i]}) {
      if (c < 1 || c > num_classes) {
        throw InputError("class " + std::to_string(c) + " unknown to the model");
      }
    }
    ++confusion(truth[i] - 1, predicted[i] - 1);
  }
  return metrics_from_confusion(confusion);
}

std::vector<std::vector<int>> stratified_kfold(std::span<const int> y, int k,
                                               std::uint64_t seed) {
  if (k < 2) throw InputError("need at least two folds");
  if (static_cast<int>(y.size()) < k) {
    throw InputError("cannot make " + std::to_string(k) + " folds from " +
                     std::to_string(y.size()) + " samples");
  }
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(static_cast<int>(i));
  Rng rng(seed);
  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  int next = 0;
  for (auto& [cls, members] : by_class) {
    rng.shuffle(members);
    for (int idx : members) {
      folds[static_cast<std::size_t>(next)].push_back(idx);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

int max_supported_lv(const Dataset& data, const std::vector<std::vector<int>>& folds,
                     int requested) {
  int cap = std::min<int>(requested, static_cast<int>(data.cols()));
  for (const auto& f : folds) {
    const int train = static_cast<int>(data.rows()) - static_cast<int>(f.size());
    cap = std::min(cap, train - 1);
  }
  if (cap < 1) throw InputError("folds leave too few training rows for one component");
  return cap;
}

std::vector<double> cv_error_curve(const Dataset& data, int max_lv,
                                   const std::vector<std::vector<int>>& folds) {
  validate(data);
  if (max_lv > max_supported_lv(data, folds, max_lv) || max_lv < 1) {
    throw InputError("component count " + std::to_string(max_lv) +
                     " not supported by every training split");
  }
  std::vector<int> misclassified(static_cast<std::size_t>(max_lv), 0);
  std::vector<char> held(static_cast<std::size_t>(data.rows()), 0);
  for (const auto& fold : folds) {
    std::fill(held.begin(), held.end(), 0);
    for (int i : fold) held[static_cast<std::size_t>(i)] = 1;
    std::vector<int> train;
    for (int i = 0; i < static_cast<int>(data.rows()); ++i) {
      if (!held[static_cast<std::size_t>(i)]) train.push_back(i);
    }
    const Dataset tr = select_rows(data, train);
    const Dataset te = select_rows(data, fold);
    const PlsModelD model = fit_plsda(tr.X, tr.y, kNumClasses, max_lv);
    for (int a = 1; a <= max_lv; ++a) {
      const int used = std::min(a, model.components);
      if (used < 1) {
        // nothing extracted: every held-out row predicted by the class means
        const auto pred = argmax_classes(
            Eigen::MatrixXd(model.y_means.transpose().replicate(te.rows(), 1)),
            model.class_labels);
        for (std::size_t i = 0; i < pred.size(); ++i) {
          misclassified[a - 1] += pred[i] != te.y[i];
        }
        continue;
      }
      const auto pred = predict(model, te.X, used);
      for (std::size_t i = 0; i < pred.classes.size(); ++i) {
        misclassified[a - 1] += pred.classes[i] != te.y[i];
      }
    }
  }
  std::vector<double> errors;
  for (int e : misclassified) errors.push_back(static_cast<double>(e) / data.rows());
  return errors;
}

double cv_error_rate(const Dataset& data, int num_components,
                     const std::vector<std::vector<int>>& folds) {
  return cv_error_curve(data, num_components, folds).back();
}

ExperimentFit fit_experiment(const Dataset& data, const ExperimentSpec& spec) {
  if (spec.feature_groups.empty()) throw InputError("experiment has no feature groups");
  if (spec.max_lv < 1) throw InputError("max_lv must be at least 1");
  const std::vector<std::string> considered = columns_for(spec.feature_groups);
  Dataset x = select_columns(data, considered);
  validate(x);
  const auto folds = stratified_kfold(x.y, spec.k, spec.seed);

  ExperimentReport report;
  report.experiment_id = spec.id;
  report.feature_groups = spec.feature_groups;
  report.vip_selection = spec.do_vip_selection;
  report.considered = static_cast<int>(considered.size());
  report.considered_per_family = count_families(considered);

  SweepResult result = sweep(x, folds, spec.max_lv);
  std::vector<std::string> kept = considered;
  if (spec.do_vip_selection) {
    const PlsModelD full = fit_plsda(x.X, x.y, kNumClasses, result.best_lv, considered);
    const Eigen::VectorXd vip = vip_scores(full);
    const std::vector<int> idx = select_features_vip(vip, spec.vip_threshold);
    kept.clear();
    for (int j : idx) kept.push_back(considered[static_cast<std::size_t>(j)]);
    x = select_columns(x, kept);
    result = sweep(x, folds, spec.max_lv);
  }

  PlsModelD model = fit_plsda(x.X, x.y, kNumClasses, result.best_lv, kept);
  model.feature_names = considered;
  model.selected_features = kept;

  report.error_rate = result.errors[static_cast<std::size_t>(result.best_lv - 1)];
  report.cv_errors = result.errors;
  report.chosen_lv = result.best_lv;
  report.selected_total = static_cast<int>(kept.size());
  report.selected_per_family = count_families(kept);
  report.selected_features = kept;
  return {std::move(model), std::move(report)};
}

ClassMetrics evaluate(const PlsModelD& model, const Dataset& test) {
  const Dataset x = select_columns(test, model.selected_features);
  for (int c : x.y) {
    if (c < 1 || c > model.num_classes()) {
      throw InputError("test label " + std::to_string(c) + " unknown to the model");
    }
  }
  const auto pred = predict(model, x.X);
  return metrics_from_predictions(x.y, pred.classes, model.num_classes());
}

}  // namespace radlesion

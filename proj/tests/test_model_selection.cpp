#include <doctest.h>

#include <radlesion/errors.hpp>
#include <radlesion/model_selection.hpp>
#include <radlesion/phantom.hpp>
#include <radlesion/rng.hpp>

#include <algorithm>
#include <set>

using namespace radlesion;

namespace {

Dataset noise_dataset(int n_per_class, int p, std::uint64_t seed) {
  return generate_gaussian_dataset(n_per_class, p, 0, 0.0, seed);
}

}  // namespace

TEST_CASE("stratified folds") {
  const std::vector<int> y{1, 1, 1, 2, 2, 2, 3, 3, 3};
  const auto folds = stratified_kfold(std::span<const int>(y), 3, 5);
  REQUIRE(folds.size() == 3);
  for (const auto& f : folds) {
    REQUIRE(f.size() == 3);
    std::multiset<int> classes;
    for (int i : f) classes.insert(y[i]);
    CHECK(classes == std::multiset<int>{1, 2, 3});
    CHECK(std::is_sorted(f.begin(), f.end()));
  }
  CHECK(stratified_kfold(std::span<const int>(y), 3, 5) == folds);
  CHECK_THROWS_AS(stratified_kfold(std::span<const int>(y), 10, 5), InputError);
  CHECK_THROWS_AS(stratified_kfold(std::span<const int>(y), 1, 5), InputError);
}

TEST_CASE("fold partition properties on random labels") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 10 + static_cast<int>(rng.below(60));
    std::vector<int> y(n);
    for (auto& v : y) v = 1 + static_cast<int>(rng.below(3));
    const int k = 2 + static_cast<int>(rng.below(std::min(9, n - 1)));
    const auto folds = stratified_kfold(std::span<const int>(y), k, trial);
    std::vector<int> seen(n, 0);
    for (const auto& f : folds)
      for (int i : f) ++seen[i];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    for (int c = 1; c <= 3; ++c) {
      int lo = n, hi = 0;
      for (const auto& f : folds) {
        const int cnt = static_cast<int>(std::count_if(f.begin(), f.end(), [&](int i) { return y[i] == c; }));
        lo = std::min(lo, cnt);
        hi = std::max(hi, cnt);
      }
      CHECK(hi - lo <= 1);
    }
    int lo = n, hi = 0;
    for (const auto& f : folds) {
      lo = std::min<int>(lo, f.size());
      hi = std::max<int>(hi, f.size());
    }
    CHECK(hi - lo <= 1);
  }
}

TEST_CASE("metrics from a hand confusion matrix") {
  Eigen::MatrixXi c(3, 3);
  c << 2, 0, 0, 0, 0, 2, 0, 0, 2;
  const ClassMetrics m = metrics_from_confusion(c);
  CHECK(m.accuracy == doctest::Approx(4.0 / 6.0));
  CHECK(m.sensitivity[1] == 0.0);
  CHECK(m.specificity[2] == doctest::Approx(0.5));
  CHECK(m.sensitivity[0] == 1.0);
  CHECK(m.specificity[0] == 1.0);

  const std::vector<int> truth{1, 2, 3, 3};
  const ClassMetrics perfect = metrics_from_predictions(std::span<const int>(truth),
                                                        std::span<const int>(truth));
  CHECK(perfect.accuracy == 1.0);
  for (int k = 0; k < 3; ++k) {
    CHECK(perfect.sensitivity[k] == 1.0);
    CHECK(perfect.specificity[k] == 1.0);
  }
  const std::vector<int> bad{1, 2, 4, 3};
  CHECK_THROWS_AS(metrics_from_predictions(std::span<const int>(bad), std::span<const int>(truth)),
                  InputError);
}

TEST_CASE("sensitivity depends only on its own row") {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::MatrixXi c(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c(i, j) = 1 + static_cast<int>(rng.below(9));
    const ClassMetrics a = metrics_from_confusion(c);
    Eigen::MatrixXi other = c;
    other(1, 1) += 5;
    other(2, 0) += 3;
    const ClassMetrics b = metrics_from_confusion(other);
    CHECK(a.sensitivity[0] == b.sensitivity[0]);
    Eigen::MatrixXi own = c;
    own(0, 0) += 4;
    own(0, 2) += 1;
    const ClassMetrics d = metrics_from_confusion(own);
    CHECK(a.specificity[0] == d.specificity[0]);
    CHECK(a.accuracy >= 0.0);
    for (int k = 0; k < 3; ++k) {
      CHECK(a.sensitivity[k] <= 1.0);
      CHECK(a.specificity[k] <= 1.0);
    }
    CHECK(c.rowwise().sum() == a.confusion.rowwise().sum());
  }
}

TEST_CASE("CV error on separable and permuted data") {
  const Dataset sep = generate_gaussian_dataset(20, 8, 4, 8.0, 3);
  const auto folds = stratified_kfold(std::span<const int>(sep.y), 5, 1);
  CHECK(cv_error_rate(sep, 3, folds) == 0.0);

  double total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Dataset perm = generate_gaussian_dataset(20, 8, 4, 8.0, seed + 20);
    Rng rng(seed);
    rng.shuffle(perm.y);
    const auto f = stratified_kfold(std::span<const int>(perm.y), 5, seed);
    total += cv_error_rate(perm, 2, f);
  }
  CHECK(std::abs(total / 10 - 2.0 / 3.0) <= 0.15);

  const Dataset small = generate_gaussian_dataset(4, 3, 2, 2.0, 9);
  const auto loo = stratified_kfold(std::span<const int>(small.y), 12, 0);
  const double e = cv_error_rate(small, 1, loo);
  CHECK(e >= 0.0);
  CHECK(e <= 1.0);
}

TEST_CASE("error curve entries match single-A runs") {
  const Dataset d = generate_gaussian_dataset(12, 6, 2, 1.0, 4);
  const auto folds = stratified_kfold(std::span<const int>(d.y), 4, 2);
  const auto curve = cv_error_curve(d, 5, folds);
  REQUIRE(curve.size() == 5);
  for (int a = 1; a <= 5; ++a) CHECK(curve[a - 1] == cv_error_rate(d, a, folds));
}

TEST_CASE("experiment definitions") {
  const auto specs = standard_experiments();
  const int considered[5] = {105, 105, 13, 31, 74};
  for (int i = 0; i < 5; ++i) {
    CHECK(specs[i].id == i + 1);
    CHECK(static_cast<int>(columns_for(specs[i].feature_groups).size()) == considered[i]);
  }
  CHECK(!specs[0].do_vip_selection);
  for (int i = 1; i < 5; ++i) CHECK(specs[i].do_vip_selection);
}

TEST_CASE("fit_experiment on Gaussian data") {
  Dataset d = generate_gaussian_dataset(15, 20, 3, 2.5, 8);
  // rename columns onto canonical names so experiment groups apply
  const auto& cols = canonical_columns();
  Dataset full;
  full.X = Eigen::MatrixXd::Zero(d.rows(), kFeatureCount);
  Rng rng(1);
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < kFeatureCount; ++j) full.X(i, j) = rng.normal();
  full.X.leftCols(20) = d.X;
  full.y = d.y;
  full.feature_names = cols;
  full.scan_ids = d.scan_ids;
  full.lesion_ids = d.lesion_ids;

  ExperimentSpec none;
  none.id = 1;
  none.feature_groups = {kAllFamilies.begin(), kAllFamilies.end()};
  none.k = 5;
  none.max_lv = 6;
  const ExperimentFit a = fit_experiment(full, none);
  CHECK(a.report.considered == 105);
  CHECK(a.report.selected_total == 105);
  CHECK(a.report.cv_errors.size() == 6);
  const double best = *std::min_element(a.report.cv_errors.begin(), a.report.cv_errors.end());
  CHECK(a.report.error_rate == best);
  CHECK(a.report.cv_errors[a.report.chosen_lv - 1] == best);
  for (int k = 0; k < a.report.chosen_lv - 1; ++k) CHECK(a.report.cv_errors[k] > best);

  ExperimentSpec sel = none;
  sel.id = 2;
  sel.do_vip_selection = true;
  const ExperimentFit b = fit_experiment(full, sel);
  CHECK(b.report.selected_total < b.report.considered);
  const std::set<std::string> considered(cols.begin(), cols.end());
  for (const auto& f : b.report.selected_features) CHECK(considered.count(f) == 1);
  CHECK(b.model.selected_features == b.report.selected_features);
  // the three informative columns are the first three shape columns
  for (int j = 0; j < 3; ++j) {
    CHECK(std::count(b.report.selected_features.begin(), b.report.selected_features.end(),
                     cols[j]) == 1);
  }
  const ExperimentFit again = fit_experiment(full, sel);
  CHECK(again.report.chosen_lv == b.report.chosen_lv);
  CHECK(again.report.selected_features == b.report.selected_features);
  CHECK(again.model.B == b.model.B);

  ExperimentSpec strict = sel;
  strict.vip_threshold = 1e6;
  CHECK_THROWS_AS(fit_experiment(full, strict), SelectionError);
}

TEST_CASE("evaluation agrees with CV-style error on the same predictions") {
  const Dataset train = generate_gaussian_dataset(20, 10, 3, 1.5, 1);
  const Dataset test = generate_gaussian_dataset(20, 10, 3, 1.5, 2);
  const PlsModelD m = fit_plsda(train.X, std::span<const int>(train.y), 3, 3, train.feature_names);
  const ClassMetrics metrics = evaluate(m, test);
  const auto pred = predict(m, test.X);
  int wrong = 0;
  for (std::size_t i = 0; i < test.y.size(); ++i) wrong += pred.classes[i] != test.y[i];
  CHECK(metrics.accuracy == doctest::Approx(1.0 - double(wrong) / test.y.size()).epsilon(1e-15));
  CHECK(metrics.confusion.sum() == static_cast<int>(test.y.size()));
  for (int k = 0; k < 3; ++k) CHECK(metrics.confusion.row(k).sum() == 20);

  Dataset missing = select_columns(test, {"f0", "f1"});
  CHECK_THROWS_AS(evaluate(m, missing), InputError);
}

TEST_CASE("noise data does not crash the selection path") {
  const Dataset d = noise_dataset(10, 6, 5);
  ExperimentSpec spec;
  spec.feature_groups = {FeatureFamily::kShape};
  spec.k = 3;
  spec.max_lv = 3;
  CHECK_THROWS_AS(fit_experiment(d, spec), InputError);  // no canonical shape columns
}

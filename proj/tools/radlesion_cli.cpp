// Batch front end: phantom generation, feature extraction, PLS-DA training,
// prediction, evaluation, the five feature-group experiments and per-class
// statistics.

#include <CLI11.hpp>
#include <json.hpp>

#include <radlesion/dataset.hpp>
#include <radlesion/errors.hpp>
#include <radlesion/features.hpp>
#include <radlesion/model_selection.hpp>
#include <radlesion/nifti.hpp>
#include <radlesion/phantom.hpp>
#include <radlesion/report.hpp>
#include <radlesion/resample.hpp>
#include <radlesion/stats.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace radlesion;

namespace {

// ------------------------------------------------------------------ options

struct Options {
  std::string manifest;
  std::string features;
  std::string test_features;
  std::string model;
  std::string out;
  std::string groups = "all";
  double bin_width = 25.0;
  double spacing = 1.0;
  int kfold = 10;
  int max_lv = 20;
  double vip_threshold = 1.0;
  std::uint64_t seed = 42;
  int jobs = 1;
  bool vip_select = false;
  int n_per_class = 50;
  std::vector<int> counts;
  double alpha = 0.05;
  bool joint_bh = false;
};

std::vector<FeatureFamily> texture_families() {
  return {FeatureFamily::kGlcm, FeatureFamily::kGldm, FeatureFamily::kGlrlm,
          FeatureFamily::kGlszm, FeatureFamily::kNgtdm};
}

// all | shape | shape+fos | texture | custom:<family>[,<family>...]
std::vector<FeatureFamily> parse_groups(const std::string& text) {
  if (text == "all") return {kAllFamilies.begin(), kAllFamilies.end()};
  if (text == "shape") return {FeatureFamily::kShape};
  if (text == "shape+fos") return {FeatureFamily::kShape, FeatureFamily::kFirstOrder};
  if (text == "texture") return texture_families();
  const std::string prefix = "custom:";
  if (text.rfind(prefix, 0) != 0) {
    throw ConfigError("unknown group set '" + text +
                      "' (expected all, shape, shape+fos, texture or custom:<list>)");
  }
  std::vector<FeatureFamily> out;
  std::stringstream ss(text.substr(prefix.size()));
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    if (token == "texture") {
      for (auto f : texture_families()) out.push_back(f);
      continue;
    }
    const auto fam = family_from_token(token);
    if (!fam) throw ConfigError("unknown feature family '" + token + "'");
    out.push_back(*fam);
  }
  if (out.empty()) throw ConfigError("custom group list is empty");
  // canonical order, no duplicates
  std::vector<FeatureFamily> ordered;
  for (auto f : kAllFamilies) {
    if (std::find(out.begin(), out.end(), f) != out.end()) ordered.push_back(f);
  }
  return ordered;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

fs::path with_suffix(const std::string& prefix, const std::string& suffix) {
  return fs::path(prefix + suffix);
}

// ------------------------------------------------------------------ manifest

struct ManifestRow {
  std::string scan_id;
  fs::path image;
  fs::path mask;
  std::map<int, int> class_map;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad " + what + " '" + s + "'");
  }
}

// "1=2;2=3" -> {1: 2, 2: 3}
std::map<int, int> parse_label_map(const std::string& text) {
  std::map<int, int> out;
  for (const auto& pair : split(text, ';')) {
    if (pair.empty()) continue;
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ConfigError("bad label mapping '" + pair + "'");
    const int label = parse_int(pair.substr(0, eq), "label");
    const int cls = parse_int(pair.substr(eq + 1), "class");
    if (label <= 0) throw ConfigError("labels must be positive, got " + std::to_string(label));
    if (cls < 1 || cls > kNumClasses) {
      throw ConfigError("class " + std::to_string(cls) + " outside 1.." +
                        std::to_string(kNumClasses));
    }
    if (!out.emplace(label, cls).second) {
      throw ConfigError("label " + std::to_string(label) + " mapped twice");
    }
  }
  if (out.empty()) throw ConfigError("empty label mapping");
  return out;
}

std::vector<ManifestRow> read_manifest(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  std::string line;
  if (!std::getline(is, line)) throw InputError("manifest " + path.string() + " is empty");
  const auto header = split(line, ',');
  if (header != std::vector<std::string>{"scan_id", "image_path", "mask_path", "labels"}) {
    throw InputError("manifest header must be scan_id,image_path,mask_path,labels");
  }
  std::vector<ManifestRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line, ',');
    if (cells.size() != 4) {
      throw InputError("manifest line " + std::to_string(line_no) + ": expected 4 fields");
    }
    ManifestRow row;
    row.scan_id = cells[0];
    row.image = fs::path(cells[1]).is_absolute() ? fs::path(cells[1]) : base / cells[1];
    row.mask = fs::path(cells[2]).is_absolute() ? fs::path(cells[2]) : base / cells[2];
    try {
      row.class_map = parse_label_map(cells[3]);
    } catch (const ConfigError& e) {
      throw ConfigError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("manifest " + path.string() + " lists no scans");
  return rows;
}

// ------------------------------------------------------------------ commands

struct ScanResult {
  std::vector<FeatureVector> rows;
  std::vector<std::string> warnings;
  std::string error;
};

ScanResult extract_scan(const ManifestRow& row, const Options& opt) {
  ScanResult out;
  try {
    const VoxelVolume vol = read_volume(row.image);
    const LesionMask mask = read_mask(row.mask, row.class_map);
    const auto [rvol, rmask] = resample_isotropic(vol, mask, opt.spacing);
    const LesionExtraction lesions = extract_lesions(rvol, rmask);
    out.warnings = lesions.warnings;
    for (const auto& lesion : lesions.regions) {
      FeatureVector fv = extract_all(lesion.region, {opt.bin_width});
      fv.lesion_id = lesion.label;
      fv.class_id = lesion.class_id;
      out.rows.push_back(fv);
    }
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

int cmd_extract(const Options& opt) {
  const auto manifest = read_manifest(opt.manifest);
  std::vector<ScanResult> results(manifest.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(opt.jobs, static_cast<int>(manifest.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < manifest.size(); i = next++) {
          results[i] = extract_scan(manifest[i], opt);
        }
      });
    }
  }
  std::vector<FeatureVector> rows;
  std::vector<std::string> ids;
  int errors = 0;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    for (const auto& w : results[i].warnings) {
      std::cerr << "warning: " << manifest[i].scan_id << ": " << w << "\n";
    }
    if (!results[i].error.empty()) {
      std::cerr << "error: " << manifest[i].scan_id << ": " << results[i].error << "\n";
      ++errors;
      continue;
    }
    for (const auto& fv : results[i].rows) {
      rows.push_back(fv);
      ids.push_back(manifest[i].scan_id);
    }
  }
  write_feature_csv(fs::path(opt.out), make_dataset(rows, ids));
  std::cerr << "extracted " << rows.size() << " lesions from " << manifest.size() - errors
            << " of " << manifest.size() << " scans\n";
  return errors == 0 ? 0 : 1;
}

ExperimentSpec spec_from(const Options& opt, int id, std::vector<FeatureFamily> groups,
                         bool select) {
  ExperimentSpec spec;
  spec.id = id;
  spec.feature_groups = std::move(groups);
  spec.do_vip_selection = select;
  spec.k = opt.kfold;
  spec.max_lv = opt.max_lv;
  spec.seed = opt.seed;
  spec.vip_threshold = opt.vip_threshold;
  return spec;
}

void write_reports(const std::string& prefix, const std::vector<ExperimentReport>& reports) {
  std::string text = format_model_table(reports);
  const bool any_test = std::any_of(reports.begin(), reports.end(),
                                    [](const ExperimentReport& r) { return r.test.has_value(); });
  if (any_test) text += "\n" + format_performance_table(reports);
  write_text(with_suffix(prefix, ".txt"), text);
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : reports) doc.push_back(report_to_json(r));
  write_json(with_suffix(prefix, ".json"), doc);
}

int cmd_train(const Options& opt) {
  const ExperimentSpec spec = spec_from(opt, 1, parse_groups(opt.groups), opt.vip_select);
  const Dataset data = read_feature_csv(fs::path(opt.features));
  const ExperimentFit fit = fit_experiment(data, spec);
  save_model(opt.model, fit.model);
  if (!opt.out.empty()) write_reports(opt.out, {fit.report});
  std::cout << format_model_table({fit.report});
  return 0;
}

int cmd_predict(const Options& opt) {
  const PlsModelD model = load_model(opt.model);
  const Dataset data = read_feature_csv(fs::path(opt.features), false);
  const Dataset x = select_columns(data, model.selected_features);
  const auto pred = predict(model, x.X);
  std::ofstream os(opt.out, std::ios::binary);
  if (!os) throw InputError("cannot write " + opt.out);
  os << "scan_id,lesion_id,predicted_class";
  for (int label : model.class_labels) os << ",response_" << label;
  os << "\n";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    os << x.scan_ids[i] << "," << x.lesion_ids[i] << "," << pred.classes[i];
    for (Eigen::Index k = 0; k < pred.responses.cols(); ++k) {
      os << "," << format_double(pred.responses(i, k));
    }
    os << "\n";
  }
  if (!os) throw InputError("failed writing " + opt.out);
  return 0;
}

int cmd_evaluate(const Options& opt) {
  const PlsModelD model = load_model(opt.model);
  const Dataset data = read_feature_csv(fs::path(opt.features));
  ExperimentReport report;
  report.experiment_id = 1;
  report.test = evaluate(model, data);
  write_text(with_suffix(opt.out, ".txt"), format_performance_table({report}));
  write_json(with_suffix(opt.out, ".json"), metrics_to_json(*report.test));
  std::cout << format_performance_table({report});
  return 0;
}

int cmd_experiments(const Options& opt) {
  const Dataset train = read_feature_csv(fs::path(opt.features));
  std::optional<Dataset> test;
  if (!opt.test_features.empty()) test = read_feature_csv(fs::path(opt.test_features));
  std::vector<ExperimentReport> reports;
  int failures = 0;
  for (const ExperimentSpec& base :
       standard_experiments(opt.kfold, opt.max_lv, opt.seed, opt.vip_threshold)) {
    try {
      ExperimentFit fit = fit_experiment(train, base);
      if (test) fit.report.test = evaluate(fit.model, *test);
      if (!opt.model.empty()) {
        fs::create_directories(opt.model);
        save_model(fs::path(opt.model) / ("experiment_" + std::to_string(base.id) + ".json"),
                   fit.model);
      }
      reports.push_back(std::move(fit.report));
    } catch (const Error& e) {
      ExperimentReport failed;
      failed.experiment_id = base.id;
      failed.feature_groups = base.feature_groups;
      failed.vip_selection = base.do_vip_selection;
      failed.failure = e.what();
      reports.push_back(std::move(failed));
      std::cerr << "error: experiment " << base.id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  write_reports(opt.out, reports);
  std::cout << format_model_table(reports);
  if (test) std::cout << "\n" << format_performance_table(reports);
  return failures == 0 ? 0 : 1;
}

int cmd_stats(const Options& opt) {
  const auto families = parse_groups(opt.groups);
  const Dataset data = read_feature_csv(fs::path(opt.features));
  const auto rows = feature_group_report(data, columns_for(families), opt.alpha,
                                         opt.joint_bh ? BhFamily::kJoint : BhFamily::kPerFeature);
  std::ofstream os(opt.out, std::ios::binary);
  if (!os) throw InputError("cannot write " + opt.out);
  write_stats_csv(os, rows);
  if (!os) throw InputError("failed writing " + opt.out);
  return 0;
}

int cmd_phantom(const Options& opt) {
  std::array<int, 3> counts{opt.n_per_class, opt.n_per_class, opt.n_per_class};
  if (!opt.counts.empty()) {
    if (opt.counts.size() != 3) throw ConfigError("--counts takes one value per class");
    std::copy(opt.counts.begin(), opt.counts.end(), counts.begin());
  }
  for (int c : counts) {
    if (c < 1) throw ConfigError("every class needs at least one phantom scan");
  }
  const fs::path root(opt.out);
  std::error_code ec;
  fs::create_directories(root / "images", ec);
  fs::create_directories(root / "masks", ec);
  if (ec || !fs::is_directory(root / "images")) {
    throw InputError("cannot create output directory " + root.string());
  }
  const auto order = phantom_class_order(counts);
  std::ostringstream manifest;
  manifest << "scan_id,image_path,mask_path,labels\n";
  for (std::size_t i = 0; i < order.size(); ++i) {
    const PhantomScan scan = generate_phantom_scan(order[i], static_cast<int>(i), opt.seed);
    const std::string image = "images/" + scan.scan_id + ".nii";
    const std::string mask = "masks/" + scan.scan_id + "_mask.nii";
    write_nifti(root / image, scan.volume, NiftiType::kInt16);
    write_nifti(root / mask, scan.mask.labels, NiftiType::kUInt8);
    manifest << scan.scan_id << "," << image << "," << mask << ",1=" << scan.class_id << "\n";
  }
  write_text(root / "manifest.csv", manifest.str());
  std::cerr << "wrote " << order.size() << " phantom scans to " << root.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radiomics lesion classification with PLS-DA"};
  app.require_subcommand(1);
  Options opt;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Seed for every random choice")->capture_default_str();
  };
  auto add_cv = [&](CLI::App* cmd) {
    cmd->add_option("--kfold", opt.kfold, "Cross-validation folds")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    cmd->add_option("--max-lv", opt.max_lv, "Largest latent-variable count swept")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--vip-threshold", opt.vip_threshold, "Keep features with VIP above this")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_seed(cmd);
  };

  auto* extract = app.add_subcommand("extract", "Compute the 105 descriptors for every lesion");
  extract->add_option("--manifest", opt.manifest, "CSV: scan_id,image_path,mask_path,labels")
      ->required()
      ->check(CLI::ExistingFile);
  extract->add_option("--out", opt.out, "Feature CSV to write")->required();
  extract->add_option("--bin-width", opt.bin_width, "Gray-level bin width (HU)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  extract->add_option("--spacing", opt.spacing, "Isotropic resampling target (mm)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  extract->add_option("--jobs", opt.jobs, "Parallel scans")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "Fit a PLS-DA model on a feature CSV");
  train->add_option("--features", opt.features, "Training feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--model", opt.model, "Model JSON to write")->required();
  train->add_option("--groups", opt.groups, "all | shape | shape+fos | texture | custom:<list>")
      ->capture_default_str();
  train->add_flag("--vip-select", opt.vip_select, "Retain VIP > threshold and refit");
  train->add_option("--out", opt.out, "Report prefix (.txt and .json)");
  add_cv(train);

  auto* pred = app.add_subcommand("predict", "Classify lesions with a saved model");
  pred->add_option("--model", opt.model, "Model JSON")->required()->check(CLI::ExistingFile);
  pred->add_option("--features", opt.features, "Feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  pred->add_option("--out", opt.out, "Predictions CSV")->required();

  auto* eval = app.add_subcommand("evaluate", "Score a saved model on labelled features");
  eval->add_option("--model", opt.model, "Model JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--features", opt.features, "Labelled feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--out", opt.out, "Report prefix (.txt and .json)")->required();

  auto* exps = app.add_subcommand("experiments", "Run the five feature-group experiments");
  exps->add_option("--features", opt.features, "Training feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  exps->add_option("--test", opt.test_features, "Held-out feature CSV")
      ->check(CLI::ExistingFile);
  exps->add_option("--model", opt.model, "Directory for the fitted models");
  exps->add_option("--out", opt.out, "Report prefix (.txt and .json)")->required();
  add_cv(exps);

  auto* stats = app.add_subcommand("stats", "Kruskal-Wallis, Dunn and BH per feature");
  stats->add_option("--features", opt.features, "Labelled feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--groups", opt.groups, "all | shape | shape+fos | texture | custom:<list>")
      ->capture_default_str();
  stats->add_option("--alpha", opt.alpha, "Significance level")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  stats->add_flag("--joint-bh", opt.joint_bh, "One BH family across all features");
  stats->add_option("--out", opt.out, "Stats CSV")->required();

  auto* phantom = app.add_subcommand("phantom", "Write synthetic scans and a manifest");
  phantom->add_option("--n-per-class", opt.n_per_class, "Scans per class")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  phantom->add_option("--counts", opt.counts, "Scans for classes 1 2 3")->expected(3);
  phantom->add_option("--out", opt.out, "Output directory")->required();
  add_seed(phantom);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*extract) return cmd_extract(opt);
    if (*train) return cmd_train(opt);
    if (*pred) return cmd_predict(opt);
    if (*eval) return cmd_evaluate(opt);
    if (*exps) return cmd_experiments(opt);
    if (*stats) return cmd_stats(opt);
    if (*phantom) return cmd_phantom(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "radlesion/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace radlesion {
namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols,
                            const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw InputError(std::string("model field ") + name + " has the wrong row count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(std::string("model field ") + name + " has the wrong column count");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from(const json& j, Eigen::Index size, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    throw InputError(std::string("model field ") + name + " has the wrong length");
  }
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  std::string s = buf;
  if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
  return s;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

json model_to_json(const PlsModelD& model) {
  json doc;
  doc["feature_names"] = model.feature_names;
  doc["selected_features"] = model.selected_features;
  doc["class_labels"] = model.class_labels;
  doc["A"] = model.components;
  doc["mean"] = vector_json(model.mean);
  doc["scale"] = vector_json(model.scale);
  doc["y_means"] = vector_json(model.y_means);
  doc["W"] = matrix_json(model.W);
  doc["P"] = matrix_json(model.P);
  doc["Q"] = matrix_json(model.Q);
  doc["B"] = matrix_json(model.B);
  return doc;
}

PlsModelD model_from_json(const json& doc) {
  PlsModelD model;
  try {
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.selected_features = doc.at("selected_features").get<std::vector<std::string>>();
    model.class_labels = doc.at("class_labels").get<std::vector<int>>();
    model.components = doc.at("A").get<int>();
    model.requested_components = model.components;
    const auto p = static_cast<Eigen::Index>(model.selected_features.size());
    const auto m = static_cast<Eigen::Index>(model.class_labels.size());
    const Eigen::Index a = model.components;
    model.mean = vector_from(doc.at("mean"), p, "mean");
    model.scale = vector_from(doc.at("scale"), p, "scale");
    model.y_means = vector_from(doc.at("y_means"), m, "y_means");
    model.W = matrix_from(doc.at("W"), p, a, "W");
    model.P = matrix_from(doc.at("P"), p, a, "P");
    model.Q = matrix_from(doc.at("Q"), m, a, "Q");
    model.B = matrix_from(doc.at("B"), p, m, "B");
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model document: ") + e.what());
  }
  return model;
}

void save_model(const std::filesystem::path& path, const PlsModelD& model) {
  write_text(path, model_to_json(model).dump(2) + "\n");
}

PlsModelD load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open model " + path.string());
  json doc;
  try {
    is >> doc;
  } catch (const json::exception& e) {
    throw InputError("model " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

json metrics_to_json(const ClassMetrics& metrics) {
  json doc;
  json confusion = json::array();
  for (Eigen::Index i = 0; i < metrics.confusion.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < metrics.confusion.cols(); ++j) row.push_back(metrics.confusion(i, j));
    confusion.push_back(row);
  }
  doc["confusion"] = confusion;
  doc["accuracy"] = metrics.accuracy;
  doc["sensitivity"] = metrics.sensitivity;
  doc["specificity"] = metrics.specificity;
  return doc;
}

json report_to_json(const ExperimentReport& r) {
  json doc;
  doc["experiment"] = r.experiment_id;
  json groups = json::array();
  for (auto f : r.feature_groups) groups.push_back(std::string(family_token(f)));
  doc["groups"] = groups;
  doc["vip_selection"] = r.vip_selection;
  if (!r.failure.empty()) {
    doc["failure"] = r.failure;
    return doc;
  }
  doc["error_rate"] = r.error_rate;
  doc["chosen_lv"] = r.chosen_lv;
  doc["cv_errors"] = r.cv_errors;
  doc["considered"] = r.considered;
  doc["selected_total"] = r.selected_total;
  json considered = json::object();
  json selected = json::object();
  for (const auto& [fam, n] : r.considered_per_family) {
    const std::string key(family_token(fam));
    considered[key] = n;
    const auto it = r.selected_per_family.find(fam);
    selected[key] = it == r.selected_per_family.end() ? 0 : it->second;
  }
  doc["considered_per_family"] = considered;
  doc["selected_per_family"] = selected;
  doc["selected_features"] = r.selected_features;
  if (r.test) doc["test"] = metrics_to_json(*r.test);
  return doc;
}

std::string format_model_table(const std::vector<ExperimentReport>& reports) {
  std::ostringstream os;
  os << pad("Exp", 5) << pad("ER", 7) << pad("LV", 4) << pad("Considered", 12)
     << pad("Selected", 12);
  for (auto f : kAllFamilies) {
    std::string name(family_token(f));
    for (auto& ch : name) ch = static_cast<char>(std::toupper(ch));
    if (f == FeatureFamily::kShape) name = "Shape";
    os << pad(name, 12);
  }
  os << '\n';
  for (const auto& r : reports) {
    os << pad("#" + std::to_string(r.experiment_id), 5);
    if (!r.failure.empty()) {
      os << "failed: " << r.failure << '\n';
      continue;
    }
    char er[16];
    std::snprintf(er, sizeof er, "%.2f", r.error_rate);
    os << pad(er, 7) << pad(std::to_string(r.chosen_lv), 4)
       << pad(std::to_string(r.considered), 12)
       << pad(std::to_string(r.selected_total) + " (" +
                  pct(static_cast<double>(r.selected_total) / r.considered) + ")",
              12);
    for (auto f : kAllFamilies) {
      const auto c = r.considered_per_family.find(f);
      if (c == r.considered_per_family.end()) {
        os << pad("", 12);
        continue;
      }
      const auto s = r.selected_per_family.find(f);
      const int sel = s == r.selected_per_family.end() ? 0 : s->second;
      os << pad(std::to_string(sel) + " (" + pct(static_cast<double>(sel) / c->second) + ")", 12);
    }
    os << '\n';
  }
  os << "Note: Exp: Experiment; ER: cross-validated error rate; LV: latent variables.\n";
  std::string out = os.str();
  return out;
}

std::string format_performance_table(const std::vector<ExperimentReport>& reports) {
  std::ostringstream os;
  os << pad("Exp", 5) << pad("Acc", 7) << pad("Se C#1", 8) << pad("Se C#2", 8)
     << pad("Se C#3", 8) << pad("Sp C#1", 8) << pad("Sp C#2", 8) << pad("Sp C#3", 8) << '\n';
  for (const auto& r : reports) {
    os << pad("#" + std::to_string(r.experiment_id), 5);
    if (!r.failure.empty() || !r.test) {
      os << (r.failure.empty() ? "no test data" : "failed: " + r.failure) << '\n';
      continue;
    }
    os << pad(pct(r.test->accuracy), 7);
    for (double v : r.test->sensitivity) os << pad(pct(v), 8);
    for (double v : r.test->specificity) os << pad(pct(v), 8);
    os << '\n';
  }
  os << "Note: Acc: accuracy (%); Se: sensitivity (%); Sp: specificity (%); C#: class.\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  os << text;
  if (!os) throw InputError("write failed for " + path.string());
}

}  // namespace radlesion

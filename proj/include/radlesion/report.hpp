#ifndef RADLESION_REPORT_HPP_
#define RADLESION_REPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "radlesion/model_selection.hpp"
#include "radlesion/pls.hpp"

namespace radlesion {

/// Model document: feature_names, selected_features, class_labels, A,
/// mean, scale, y_means, W, P, Q, B. Matrices are arrays of rows.
nlohmann::json model_to_json(const PlsModelD& model);
PlsModelD model_from_json(const nlohmann::json& doc);
void save_model(const std::filesystem::path& path, const PlsModelD& model);
PlsModelD load_model(const std::filesystem::path& path);

nlohmann::json metrics_to_json(const ClassMetrics& metrics);
nlohmann::json report_to_json(const ExperimentReport& report);

/// Fitted-model summary: Exp, ER, LV, considered, then selected counts
/// (with percentages) in total and per family.
std::string format_model_table(const std::vector<ExperimentReport>& reports);
/// Accuracy and per-class sensitivity/specificity in percent.
std::string format_performance_table(const std::vector<ExperimentReport>& reports);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace radlesion

#endif  // RADLESION_REPORT_HPP_

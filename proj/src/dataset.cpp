#include "radlesion/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace radlesion {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, int line_no) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("feature CSV line " + std::to_string(line_no) +
                     ": not a number: '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& text, int line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputError("feature CSV line " + std::to_string(line_no) +
                     ": not an integer: '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void validate(const Dataset& data) {
  if (data.rows() < 2) throw InputError("dataset needs at least two rows");
  if (data.cols() < 1) throw InputError("dataset has no feature columns");
  if (static_cast<Eigen::Index>(data.y.size()) != data.rows()) {
    throw InputError("label count differs from row count");
  }
  if (static_cast<Eigen::Index>(data.feature_names.size()) != data.cols()) {
    throw InputError("feature name count differs from column count");
  }
  for (int c : data.y) {
    if (c < 1 || c > kNumClasses) {
      throw InputError("class id " + std::to_string(c) + " outside 1..3");
    }
  }
  if (!data.X.allFinite()) throw InputError("dataset holds non-finite values");
}

Dataset make_dataset(const std::vector<FeatureVector>& rows,
                     const std::vector<std::string>& scan_ids) {
  Dataset out;
  out.feature_names = canonical_columns();
  out.X.resize(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = rows[i].values.transpose();
    out.y.push_back(rows[i].class_id);
    out.lesion_ids.push_back(rows[i].lesion_id);
    out.scan_ids.push_back(i < scan_ids.size() ? scan_ids[i] : std::string());
  }
  return out;
}

Dataset select_columns(const Dataset& data, const std::vector<std::string>& names) {
  std::map<std::string, Eigen::Index> index;
  for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
    index.emplace(data.feature_names[j], static_cast<Eigen::Index>(j));
  }
  std::vector<std::string> missing;
  for (const auto& name : names) {
    if (!index.count(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string msg = "missing feature columns:";
    for (const auto& name : missing) msg += " " + name;
    throw InputError(msg);
  }
  Dataset out;
  out.y = data.y;
  out.scan_ids = data.scan_ids;
  out.lesion_ids = data.lesion_ids;
  out.feature_names = names;
  out.X.resize(data.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    out.X.col(static_cast<Eigen::Index>(j)) = data.X.col(index[names[j]]);
  }
  return out;
}

Dataset select_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.feature_names = data.feature_names;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(r);
    out.y.push_back(data.y[r]);
    if (!data.scan_ids.empty()) out.scan_ids.push_back(data.scan_ids[r]);
    if (!data.lesion_ids.empty()) out.lesion_ids.push_back(data.lesion_ids[r]);
  }
  return out;
}

std::vector<std::string> columns_for(const std::vector<FeatureFamily>& families) {
  std::vector<std::string> out;
  for (const auto& name : canonical_columns()) {
    const auto fam = family_of_column(name);
    if (std::find(families.begin(), families.end(), *fam) != families.end()) {
      out.push_back(name);
    }
  }
  return out;
}

void write_feature_csv(std::ostream& os, const Dataset& data) {
  os << "scan_id,lesion_id,class";
  for (const auto& name : data.feature_names) os << ',' << name;
  os << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const auto r = static_cast<std::size_t>(i);
    const std::string scan = r < data.scan_ids.size() ? data.scan_ids[r] : "";
    if (scan.find_first_of(",\n") != std::string::npos) {
      throw InputError("scan id may not contain commas or newlines: " + scan);
    }
    os << scan << ',' << (r < data.lesion_ids.size() ? data.lesion_ids[r] : 0) << ','
       << data.y[r];
    for (Eigen::Index j = 0; j < data.cols(); ++j) os << ',' << format_double(data.X(i, j));
    os << '\n';
  }
}

void write_feature_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write " + path.string());
  write_feature_csv(os, data);
}

Dataset read_feature_csv(std::istream& is, bool require_labels) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("feature CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "scan_id" || header[1] != "lesion_id" ||
      header[2] != "class") {
    throw InputError("feature CSV header must start with scan_id,lesion_id,class");
  }
  Dataset out;
  out.feature_names.assign(header.begin() + 3, header.end());
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError("feature CSV line " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    }
    out.scan_ids.push_back(cells[0]);
    out.lesion_ids.push_back(parse_int(cells[1], line_no));
    const int cls = parse_int(cells[2], line_no);
    if (cls < (require_labels ? 1 : 0) || cls > kNumClasses) {
      throw InputError("feature CSV line " + std::to_string(line_no) +
                       ": class " + cells[2] + " outside 1..3");
    }
    out.y.push_back(cls);
    std::vector<double> values;
    for (std::size_t j = 3; j < cells.size(); ++j) {
      values.push_back(parse_double(cells[j], line_no));
    }
    rows.push_back(std::move(values));
  }
  out.X.resize(static_cast<Eigen::Index>(rows.size()),
               static_cast<Eigen::Index>(out.feature_names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

Dataset read_feature_csv(const std::filesystem::path& path, bool require_labels) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open " + path.string());
  return read_feature_csv(is, require_labels);
}

}  // namespace radlesion

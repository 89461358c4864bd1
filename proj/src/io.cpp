#include "rocfit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rocfit/error.hpp"

namespace rocfit::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

LabeledSample parse_dataset_text(std::string_view text, const std::string& source) {
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t line_no = 0;
  bool seen_row = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ValidationError(where + "expected two fields 'score,label'");
    const std::string_view score_field = line.substr(0, comma);
    const std::string_view label_field = line.substr(comma + 1);
    if (label_field.find(',') != std::string_view::npos) {
      throw ValidationError(where + "expected two fields 'score,label'");
    }
    double score = 0.0;
    if (!parse_number(score_field, score)) {
      if (!seen_row) {
        seen_row = true;  // header
        continue;
      }
      throw ValidationError(where + "score '" + std::string(trim(score_field)) + "' is not numeric");
    }
    seen_row = true;
    if (!std::isfinite(score)) throw ValidationError(where + "score is not finite");
    double label = 0.0;
    if (!parse_number(label_field, label) || (label != 0.0 && label != 1.0)) {
      throw ValidationError(where + "label '" + std::string(trim(label_field)) + "' is not 0 or 1");
    }
    scores.push_back(score);
    labels.push_back(static_cast<int>(label));
    if (end == text.size()) break;
  }
  if (scores.empty()) throw ValidationError(source + ":" + std::to_string(std::max<std::size_t>(line_no, 1)) + ": no data rows");
  return LabeledSample(std::move(scores), std::move(labels));
}

LabeledSample parse_dataset(const std::string& path) { return parse_dataset_text(read_file(path), path); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<double> curve_grid(const EmpiricalRoc& curve) {
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(i / 200.0);
  for (std::size_t i = 0; i < curve.size(); ++i) grid.push_back(curve.far(i));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::string curve_csv(const EmpiricalRoc& curve, const RocModel& model) {
  std::string out = "p,empirical,fitted\n";
  for (double p : curve_grid(curve)) {
    out += format_double(p) + "," + format_double(eval_roc(curve, p)) + "," + format_double(roc_eval(model, p)) + "\n";
  }
  return out;
}

nlohmann::json to_json(const EmpiricalRoc& curve) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& v : curve.vertices()) vertices.push_back({v.far_count, v.hr_count});
  return {{"n0", curve.n0()}, {"n1", curve.n1()}, {"vertices", vertices}};
}

EmpiricalRoc empirical_from_json(const nlohmann::json& j) {
  try {
    std::vector<RocVertex> vertices;
    for (const auto& v : j.at("vertices")) vertices.push_back({v.at(0).get<std::int64_t>(), v.at(1).get<std::int64_t>()});
    return EmpiricalRoc(std::move(vertices), j.at("n0").get<std::int64_t>(), j.at("n1").get<std::int64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed empirical curve JSON: ") + e.what());
  }
}

}  // namespace rocfit::io

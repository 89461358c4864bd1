#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rocfit/models.hpp"
#include "rocfit/roc_core.hpp"

namespace rocfit::io {

/// CSV with columns score,label. A first row whose score field is not numeric is a header.
LabeledSample parse_dataset(const std::string& path);
LabeledSample parse_dataset_text(std::string_view text, const std::string& source = "<input>");

std::string read_file(const std::string& path);
/// Creates parent directories as needed.
void write_file(const std::string& path, const std::string& content);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

/// 201 evenly spaced p values plus the curve's breakpoints, ascending, without duplicates.
std::vector<double> curve_grid(const EmpiricalRoc& curve);
/// Columns p, empirical, fitted on curve_grid.
std::string curve_csv(const EmpiricalRoc& curve, const RocModel& model);

nlohmann::json to_json(const EmpiricalRoc& curve);
EmpiricalRoc empirical_from_json(const nlohmann::json& j);

}  // namespace rocfit::io

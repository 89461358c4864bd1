#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rocfit::svg {

struct Series {
  std::vector<std::pair<double, double>> points;
  std::string color = "black";
  bool dashed = false;
  std::string label;
};

/// Filled region between two curves sampled on the same abscissae.
struct Band {
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color = "steelblue";
  std::string label;
};

struct Figure {
  std::string title;
  std::string x_label = "false alarm rate";
  std::string y_label = "hit rate";
  bool diagonal = true;
  std::vector<Band> bands;
  std::vector<Series> series;
};

/// Static SVG of the unit square with axes, bands below polylines, and a legend.
std::string render(const Figure& figure);

}  // namespace rocfit::svg

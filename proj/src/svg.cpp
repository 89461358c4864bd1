#include "rocfit/svg.hpp"

#include <cstdio>

namespace rocfit::svg {

namespace {

constexpr double kSize = 400.0;
constexpr double kLeft = 60.0;
constexpr double kTop = 40.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double sx(double x) { return kLeft + kSize * x; }
double sy(double y) { return kTop + kSize * (1.0 - y); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render(const Figure& figure) {
  const double width = kLeft + kSize + 180.0;
  const double height = kTop + kSize + 60.0;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                    num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!figure.title.empty()) {
    out += "<text x=\"" + num(sx(0.5)) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(figure.title) + "</text>\n";
  }
  out += "<rect x=\"" + num(sx(0)) + "\" y=\"" + num(sy(1)) + "\" width=\"" + num(kSize) + "\" height=\"" +
         num(kSize) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    out += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(sy(0) + 16) + "\" text-anchor=\"middle\">" + num(t) +
           "</text>\n";
    out += "<text x=\"" + num(sx(0) - 6) + "\" y=\"" + num(sy(t) + 4) + "\" text-anchor=\"end\">" + num(t) +
           "</text>\n";
  }
  out += "<text x=\"" + num(sx(0.5)) + "\" y=\"" + num(sy(0) + 36) + "\" text-anchor=\"middle\">" +
         escape(figure.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + num(sy(0.5)) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(sy(0.5)) + ")\">" + escape(figure.y_label) + "</text>\n";
  if (figure.diagonal) {
    out += "<line x1=\"" + num(sx(0)) + "\" y1=\"" + num(sy(0)) + "\" x2=\"" + num(sx(1)) + "\" y2=\"" + num(sy(1)) +
           "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
  }

  for (const Band& band : figure.bands) {
    std::string pts;
    for (std::size_t i = 0; i < band.x.size(); ++i) pts += num(sx(band.x[i])) + "," + num(sy(band.upper[i])) + " ";
    for (std::size_t i = band.x.size(); i-- > 0;) pts += num(sx(band.x[i])) + "," + num(sy(band.lower[i])) + " ";
    out += "<polygon points=\"" + pts + "\" fill=\"" + escape(band.color) + "\" fill-opacity=\"0.3\" stroke=\"none\"/>\n";
  }
  for (const Series& s : figure.series) {
    std::string pts;
    for (const auto& [x, y] : s.points) pts += num(sx(x)) + "," + num(sy(y)) + " ";
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + escape(s.color) + "\" stroke-width=\"1.5\"";
    if (s.dashed) out += " stroke-dasharray=\"6,4\"";
    out += "/>\n";
  }

  double ly = kTop + 10.0;
  const double lx = sx(1) + 20.0;
  auto legend = [&](const std::string& label, const std::string& color, bool dashed, bool filled) {
    if (label.empty()) return;
    if (filled) {
      out += "<rect x=\"" + num(lx) + "\" y=\"" + num(ly - 6) + "\" width=\"24\" height=\"10\" fill=\"" +
             escape(color) + "\" fill-opacity=\"0.3\"/>\n";
    } else {
      out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly) +
             "\" stroke=\"" + escape(color) + "\" stroke-width=\"1.5\"" + (dashed ? " stroke-dasharray=\"6,4\"" : "") +
             "/>\n";
    }
    out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) + "\">" + escape(label) + "</text>\n";
    ly += 18.0;
  };
  for (const Band& band : figure.bands) legend(band.label, band.color, false, true);
  for (const Series& s : figure.series) legend(s.label, s.color, s.dashed, false);
  out += "</svg>\n";
  return out;
}

}  // namespace rocfit::svg

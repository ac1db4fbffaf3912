#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>

namespace nws::app {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c",
                                             "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_line_plot(std::span<const double> x, std::span<const PlotSeries> series,
                             const std::string& title, const std::string& x_label,
                             const std::string& y_label) {
  double x_lo = x.empty() ? 0.0 : x.front();
  double x_hi = x.empty() ? 1.0 : x.back();
  double y_lo = INFINITY;
  double y_hi = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  }
  if (!std::isfinite(y_lo)) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (y_hi == y_lo) {
    y_hi += 0.5;
    y_lo -= 0.5;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x_lo) / (x_hi - x_lo) * pw; };
  auto py = [&](double v) { return kTop + (y_hi - v) / (y_hi - y_lo) * ph; };

  std::string out = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  out += fmt::format(
      "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
      "text-anchor=\"middle\">{}</text>\n",
      kWidth / 2, escape(title));
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, pw, ph);

  for (int k = 0; k <= 4; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"middle\">{:.3g}</text>\n",
        px(xv), kTop + ph + 16, xv);
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
        "text-anchor=\"end\">{:.3g}</text>\n",
        kLeft - 6, py(yv) + 4, yv);
  }
  out += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" "
      "text-anchor=\"middle\">{}</text>\n",
      kLeft + pw / 2, kHeight - 12, escape(x_label));
  out += fmt::format(
      "<text x=\"16\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"13\" "
      "text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">{1}</text>\n",
      kTop + ph / 2, escape(y_label));

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % kColors.size()];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        out += fmt::format(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
            points);
        points.clear();
      }
    };
    const auto& y = series[k].y;
    for (std::size_t j = 0; j < std::min(x.size(), y.size()); ++j) {
      if (!std::isfinite(y[j])) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", px(x[j]), py(y[j]));
    }
    flush();
    out += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"12\" "
        "fill=\"{}\">{}</text>\n",
        kLeft + pw - 110, kTop + 18 + 16.0 * static_cast<double>(k), color, escape(series[k].label));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace nws::app

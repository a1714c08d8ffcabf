#include "hyperfix/svg.hpp"

#include <algorithm>
#include <cmath>

#include "hyperfix/io.hpp"

namespace hyperfix {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
constexpr double kFloor = 1e-16;  // clip for the log scale

std::string coord(double v) {
  // two decimals is plenty for pixel coordinates and keeps files small
  const double r = std::round(v * 100.0) / 100.0;
  std::string s = format_double(r);
  return s;
}

}  // namespace

std::string residual_plot_svg(const IterationTrace& trace,
                              const std::string& title) {
  double lo = 0.0, hi = -320.0;  // log10 bounds
  double max_iter = 1.0;
  for (std::size_t i = 0; i < trace.rows(); ++i) {
    const double r = std::log10(std::max(trace.residuals[i], kFloor));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    max_iter = std::max(max_iter, static_cast<double>(trace.iterations[i]));
  }
  lo = std::floor(lo) - 0.5;
  hi = std::ceil(hi) + 0.5;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto x_of = [&](double it) { return kLeft + plot_w * it / max_iter; };
  const auto y_of = [&](double logr) {
    return kTop + plot_h * (hi - logr) / (hi - lo);
  };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kWidth) +
      "\" height=\"" + coord(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + coord(kWidth / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" +
         title + "</text>\n";

  // axes
  svg += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(kTop) +
         "\" x2=\"" + coord(kLeft) + "\" y2=\"" + coord(kHeight - kBottom) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(kHeight - kBottom) +
         "\" x2=\"" + coord(kWidth - kRight) + "\" y2=\"" +
         coord(kHeight - kBottom) + "\" stroke=\"black\"/>\n";

  // y ticks on whole decades
  const int decade_step =
      std::max(1, static_cast<int>(std::ceil((hi - lo) / 8.0)));
  for (int d = static_cast<int>(std::ceil(lo)); d <= hi; d += decade_step) {
    const double y = y_of(d);
    svg += "<line x1=\"" + coord(kLeft - 4) + "\" y1=\"" + coord(y) +
           "\" x2=\"" + coord(kWidth - kRight) + "\" y2=\"" + coord(y) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">1e" +
           std::to_string(d) + "</text>\n";
  }
  // x ticks
  for (int i = 0; i <= 4; ++i) {
    const double it = max_iter * i / 4.0;
    svg += "<text x=\"" + coord(x_of(it)) + "\" y=\"" +
           coord(kHeight - kBottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">" +
           std::to_string(static_cast<long long>(it)) + "</text>\n";
  }
  svg += "<text x=\"" + coord(kLeft + plot_w / 2) + "\" y=\"" +
         coord(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">iteration</text>\n";

  svg += "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" "
         "points=\"";
  for (std::size_t i = 0; i < trace.rows(); ++i) {
    if (i) svg += ' ';
    const double r = std::log10(std::max(trace.residuals[i], kFloor));
    svg += coord(x_of(static_cast<double>(trace.iterations[i]))) + "," +
           coord(y_of(r));
  }
  svg += "\"/>\n</svg>\n";
  return svg;
}

}  // namespace hyperfix

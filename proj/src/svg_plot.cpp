#include "anthracnose/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace anthracnose {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Round step of 1, 2 or 5 times a power of ten giving about `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string render_svg(const PlotSpec& spec) {
  Range xr, yr;
  for (const auto& s : spec.series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xr.add(s.x[i]);
      yr.add(s.y[i]);
    }
  }
  xr.settle();
  yr.settle();
  const double pad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= pad;
  yr.hi += pad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n"
     << "<title>" << xml_escape(spec.title) << "</title>\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << xml_escape(spec.title) << "</text>\n";

  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
     << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw)
     << "\" height=\"" << fmt(ph) << "\"/>\n";
  const double xs = nice_step(xr.hi - xr.lo, 5);
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
    os << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(kTop + ph) << "\" x2=\"" << fmt(px(v))
       << "\" y2=\"" << fmt(kTop + ph + 5) << "\"/>\n";
  }
  const double ys = nice_step(yr.hi - yr.lo, 5);
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
    os << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(kLeft)
       << "\" y2=\"" << fmt(py(v)) << "\"/>\n";
  }
  os << "</g>\n<g class=\"tick-labels\" font-size=\"11\">\n";
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
    os << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(kTop + ph + 18)
       << "\" text-anchor=\"middle\">" << tick_label(std::abs(v) < 1e-12 * xs ? 0.0 : v)
       << "</text>\n";
  }
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
    os << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(v) + 4)
       << "\" text-anchor=\"end\">" << tick_label(std::abs(v) < 1e-12 * ys ? 0.0 : v)
       << "</text>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 15)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(spec.x_label) << "</text>\n"
     << "<text transform=\"translate(20 " << fmt(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(spec.y_label)
     << "</text>\n";

  const std::size_t palette = sizeof kPalette / sizeof kPalette[0];
  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    os << "<polyline class=\"series\" fill=\"none\" stroke-width=\"1.5\" stroke=\""
       << kPalette[k % palette] << '"';
    if (!s.dash.empty()) os << " stroke-dasharray=\"" << xml_escape(s.dash) << '"';
    os << " points=\"";
    const std::size_t n = std::min(s.x.size(), s.y.size());
    bool first = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!first) os << ' ';
      os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
      first = false;
    }
    os << "\"><title>" << xml_escape(s.label) << "</title></polyline>\n";

    const double ly = kTop + 10 + 20.0 * static_cast<double>(k);
    const double lx = kLeft + pw + 15;
    os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 25)
       << "\" y2=\"" << fmt(ly) << "\" stroke-width=\"1.5\" stroke=\"" << kPalette[k % palette]
       << '"';
    if (!s.dash.empty()) os << " stroke-dasharray=\"" << xml_escape(s.dash) << '"';
    os << "/>\n<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly + 4) << "\" font-size=\"12\">"
       << xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace anthracnose

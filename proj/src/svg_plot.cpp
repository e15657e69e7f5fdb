#include "linf/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "linf/errors.hpp"

namespace linf {

namespace {

constexpr double kWidth = 820, kHeight = 540;
constexpr double kLeft = 80, kRight = 790, kTop = 50, kBottom = 480;

const char* kPalette[] = {"#1f6fb2", "#d1495b", "#3e8d63", "#8a5fb0",
                          "#c98018", "#4f5d75", "#7b9e37", "#b05f8c"};
const char* kMarkers[] = {"circle", "square", "diamond", "triangle"};

struct SeriesPoint {
  double n = 0.0;
  double mean = 0.0;
  double stderr_mean = 0.0;
};

std::string display_label(const std::string& estimator, std::optional<double> p) {
  if (p) {
    std::ostringstream os;
    os << "p=" << *p;
    return os.str();
  }
  if (estimator == "wiener") return "Wiener";
  if (estimator == "pm") return "posterior mean";
  return estimator;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void draw_marker(std::ostream& out, const std::string& kind, double x, double y,
                 const std::string& color) {
  if (kind == "circle") {
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"4\" fill=\"" << color << "\"/>\n";
  } else if (kind == "square") {
    out << "<rect x=\"" << x - 3.5 << "\" y=\"" << y - 3.5
        << "\" width=\"7\" height=\"7\" fill=\"" << color << "\"/>\n";
  } else if (kind == "diamond") {
    out << "<path d=\"M" << x << ' ' << y - 5 << " L" << x + 5 << ' ' << y << " L" << x << ' '
        << y + 5 << " L" << x - 5 << ' ' << y << " Z\" fill=\"" << color << "\"/>\n";
  } else {
    out << "<path d=\"M" << x << ' ' << y - 5 << " L" << x + 4.5 << ' ' << y + 4 << " L"
        << x - 4.5 << ' ' << y + 4 << " Z\" fill=\"" << color << "\"/>\n";
  }
}

}  // namespace

void write_linf_plot(const std::vector<TrialRecord>& records, const PlotSpec& spec,
                     const std::filesystem::path& out_path) {
  if (records.empty()) throw ParseError("plot: no records to draw");

  // series key -> n -> (sum, sum_sq, count)
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
    int count = 0;
  };
  std::map<std::string, std::map<double, Acc>> grouped;
  std::vector<std::string> series_order;
  for (const auto& rec : records) {
    const std::string key = display_label(rec.estimator, rec.p);
    if (!grouped.count(key)) series_order.push_back(key);
    Acc& acc = grouped[key][double(rec.n)];
    acc.sum += rec.linf;
    acc.sum_sq += rec.linf * rec.linf;
    acc.count += 1;
  }

  std::map<std::string, std::vector<SeriesPoint>> series;
  double n_min = 1e300, n_max = -1e300, y_max = 0.0;
  for (const auto& [key, by_n] : grouped) {
    for (const auto& [n, acc] : by_n) {
      SeriesPoint pt;
      pt.n = n;
      pt.mean = acc.sum / acc.count;
      pt.stderr_mean =
          acc.count > 1
              ? std::sqrt(std::max(acc.sum_sq - acc.count * pt.mean * pt.mean, 0.0) /
                          (acc.count - 1) / acc.count)
              : 0.0;
      series[key].push_back(pt);
      n_min = std::min(n_min, n);
      n_max = std::max(n_max, n);
      y_max = std::max(y_max, pt.mean + pt.stderr_mean);
    }
  }
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.08;

  const bool log_x = spec.log_x && n_min > 0.0 && n_max > n_min;
  auto x_of = [&](double n) {
    if (n_max == n_min) return 0.5 * (kLeft + kRight);
    const double t = log_x ? (std::log10(n) - std::log10(n_min)) /
                                 (std::log10(n_max) - std::log10(n_min))
                           : (n - n_min) / (n_max - n_min);
    return kLeft + t * (kRight - kLeft);
  };
  auto y_of = [&](double v) { return kBottom - (v / y_max) * (kBottom - kTop); };

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("plot: cannot write " + out_path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << 0.5 * (kLeft + kRight) << "\" y=\"28\" text-anchor=\"middle\" "
         "font-size=\"16\">" << spec.title << "</text>\n";

  // axes
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight << "\" y2=\""
      << kBottom << "\" stroke=\"#333\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kBottom << "\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << 0.5 * (kLeft + kRight) << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\">" << spec.x_label << "</text>\n";
  out << "<text x=\"20\" y=\"" << 0.5 * (kTop + kBottom)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << 0.5 * (kTop + kBottom)
      << ")\">" << spec.y_label << "</text>\n";

  // x ticks at the observed n values
  std::vector<double> n_ticks;
  for (const auto& [key, pts] : series)
    for (const auto& pt : pts)
      if (std::find(n_ticks.begin(), n_ticks.end(), pt.n) == n_ticks.end())
        n_ticks.push_back(pt.n);
  std::sort(n_ticks.begin(), n_ticks.end());
  for (double n : n_ticks) {
    const double x = x_of(n);
    out << "<line x1=\"" << x << "\" y1=\"" << kBottom << "\" x2=\"" << x << "\" y2=\""
        << kBottom + 5 << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << kBottom + 20 << "\" text-anchor=\"middle\">"
        << fmt(n) << "</text>\n";
  }
  // y ticks
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * i / 5.0;
    const double y = y_of(v);
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
        << "\" stroke=\"#333\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kRight << "\" y2=\"" << y
        << "\" stroke=\"#eee\"/>\n";
    std::ostringstream lbl;
    lbl.precision(3);
    lbl << v;
    out << "<text x=\"" << kLeft - 9 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << lbl.str() << "</text>\n";
  }

  int idx = 0;
  for (const auto& key : series_order) {
    auto pts = series[key];
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
    const std::string color = kPalette[idx % 8];
    const std::string marker = kMarkers[idx % 4];

    if (pts.size() >= 2) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
      for (const auto& pt : pts) out << x_of(pt.n) << ',' << y_of(pt.mean) << ' ';
      out << "\"/>\n";
    }
    for (const auto& pt : pts) {
      const double x = x_of(pt.n);
      if (pt.stderr_mean > 0.0) {
        const double y0 = y_of(pt.mean - pt.stderr_mean);
        const double y1 = y_of(pt.mean + pt.stderr_mean);
        out << "<line x1=\"" << x << "\" y1=\"" << y0 << "\" x2=\"" << x << "\" y2=\"" << y1
            << "\" stroke=\"" << color << "\"/>\n";
        out << "<line x1=\"" << x - 4 << "\" y1=\"" << y0 << "\" x2=\"" << x + 4 << "\" y2=\""
            << y0 << "\" stroke=\"" << color << "\"/>\n";
        out << "<line x1=\"" << x - 4 << "\" y1=\"" << y1 << "\" x2=\"" << x + 4 << "\" y2=\""
            << y1 << "\" stroke=\"" << color << "\"/>\n";
      }
      draw_marker(out, marker, x, y_of(pt.mean), color);
    }
    // legend entry
    const double ly = kTop + 8 + 20 * idx;
    draw_marker(out, marker, kRight - 150, ly, color);
    out << "<text x=\"" << kRight - 138 << "\" y=\"" << ly + 4 << "\">" << key << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

}  // namespace linf

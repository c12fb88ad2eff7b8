#include "qmee/bench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

namespace qmee::bench {
namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b"};

struct Frame {
  double x_min, x_max, y_min, y_max;
  double px(double x) const {
    return kMarginLeft + (x - x_min) / (x_max - x_min) *
                             (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return kHeight - kMarginBottom - (y - y_min) / (y_max - y_min) *
                                         (kHeight - kMarginTop - kMarginBottom);
  }
};

void open_svg(std::ofstream& out) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axis_box(std::ofstream& out) {
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << kWidth - kMarginLeft - kMarginRight << "\" height=\""
      << kHeight - kMarginTop - kMarginBottom
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
}

void text(std::ofstream& out, double x, double y, const std::string& s,
          const char* anchor = "middle", int size = 12,
          const char* color = "#222") {
  out << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
      << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor
      << "\" fill=\"" << color << "\">" << s << "</text>\n";
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void write_timing_svg(const std::string& path, const TimingReport& report) {
  if (report.rows.empty()) {
    throw std::invalid_argument("write_timing_svg: empty report");
  }
  Frame frame{1e300, -1e300, 1e300, -1e300};
  for (const auto& row : report.rows) {
    const double lx = std::log10(static_cast<double>(row.n));
    const double ly = std::log10(std::max(row.median_time_s, 1e-12));
    frame.x_min = std::min(frame.x_min, lx);
    frame.x_max = std::max(frame.x_max, lx);
    frame.y_min = std::min(frame.y_min, ly);
    frame.y_max = std::max(frame.y_max, ly);
  }
  if (frame.x_max - frame.x_min < 1e-9) {
    frame.x_min -= 0.5;
    frame.x_max += 0.5;
  }
  const double pad = 0.05 * (frame.y_max - frame.y_min + 0.2);
  frame.y_min -= pad;
  frame.y_max += pad;

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open svg file for writing: " + path);
  }
  open_svg(out);
  axis_box(out);
  text(out, kWidth / 2.0, kHeight - 12, "samples N (log scale)");
  text(out, 16, kHeight / 2.0, "median time [s]", "middle", 12, "#222");

  std::vector<std::string> criteria;
  for (const auto& row : report.rows) {
    if (std::find(criteria.begin(), criteria.end(), row.criterion) ==
        criteria.end()) {
      criteria.push_back(row.criterion);
    }
  }

  // x ticks at the measured sizes
  std::set<std::size_t> sizes;
  for (const auto& row : report.rows) sizes.insert(row.n);
  for (const std::size_t n : sizes) {
    const double x = frame.px(std::log10(static_cast<double>(n)));
    out << "<line x1=\"" << x << "\" y1=\"" << kHeight - kMarginBottom
        << "\" x2=\"" << x << "\" y2=\"" << kHeight - kMarginBottom + 5
        << "\" stroke=\"#444\"/>\n";
    text(out, x, kHeight - kMarginBottom + 18, std::to_string(n), "middle", 10);
  }
  // y ticks at decades
  const int dec_lo = static_cast<int>(std::floor(frame.y_min));
  const int dec_hi = static_cast<int>(std::ceil(frame.y_max));
  for (int dec = dec_lo; dec <= dec_hi; ++dec) {
    if (dec < frame.y_min || dec > frame.y_max) continue;
    const double y = frame.py(dec);
    out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << y << "\" x2=\""
        << kMarginLeft << "\" y2=\"" << y << "\" stroke=\"#444\"/>\n";
    text(out, kMarginLeft - 8, y + 4, "1e" + std::to_string(dec), "end", 10);
  }

  int color_index = 0;
  for (const auto& criterion : criteria) {
    const char* color = kPalette[color_index % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& row : report.rows) {
      if (row.criterion != criterion) continue;
      out << frame.px(std::log10(static_cast<double>(row.n))) << ','
          << frame.py(std::log10(std::max(row.median_time_s, 1e-12))) << ' ';
    }
    out << "\"/>\n";
    for (const auto& row : report.rows) {
      if (row.criterion != criterion) continue;
      out << "<circle cx=\"" << frame.px(std::log10(static_cast<double>(row.n)))
          << "\" cy=\""
          << frame.py(std::log10(std::max(row.median_time_s, 1e-12)))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    std::string label = criterion;
    const auto slope_it = report.slopes.find(criterion);
    if (slope_it != report.slopes.end()) {
      label += " (slope " + short_number(slope_it->second) + ")";
    }
    text(out, kMarginLeft + 10.0, kMarginTop + 18.0 + 16.0 * color_index, label,
         "start", 12, color);
    ++color_index;
  }
  out << "</svg>\n";
}

void write_surface_svg(const std::string& path, const SurfaceGrid& grid,
                       const std::string& criterion) {
  const Eigen::MatrixXd* values = nullptr;
  for (const auto& [name, matrix] : grid.values) {
    if (name == criterion) {
      values = &matrix;
      break;
    }
  }
  if (values == nullptr) {
    throw std::invalid_argument("write_surface_svg: unknown criterion " +
                                criterion);
  }
  const auto& a1 = grid.axis1;
  const auto& a2 = grid.axis2;
  Frame frame{a1.front(), a1.back(), a2.front(), a2.back()};

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open svg file for writing: " + path);
  }
  open_svg(out);
  axis_box(out);
  text(out, kWidth / 2.0, 18, criterion + " cost surface");
  text(out, kWidth / 2.0, kHeight - 12, "omega1");
  text(out, 16, kHeight / 2.0, "omega2");

  for (int tick = 0; tick <= 4; ++tick) {
    const double w1 = a1.front() + (a1.back() - a1.front()) * tick / 4.0;
    const double w2 = a2.front() + (a2.back() - a2.front()) * tick / 4.0;
    text(out, frame.px(w1), kHeight - kMarginBottom + 18, short_number(w1),
         "middle", 10);
    text(out, kMarginLeft - 8, frame.py(w2) + 4, short_number(w2), "end", 10);
  }

  // contour levels from value quantiles so ridges and basins both show
  std::vector<double> sorted(values->data(), values->data() + values->size());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> levels;
  for (int q = 1; q <= 12; ++q) {
    const double frac = q / 13.0;
    levels.push_back(sorted[static_cast<std::size_t>(
        frac * static_cast<double>(sorted.size() - 1))]);
  }

  // marching squares on each level
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const double level = levels[li];
    out << "<g stroke=\"#3c6eb4\" stroke-opacity=\""
        << 0.35 + 0.05 * static_cast<double>(li) << "\" fill=\"none\">\n";
    for (std::size_t i = 0; i + 1 < a1.size(); ++i) {
      for (std::size_t j = 0; j + 1 < a2.size(); ++j) {
        const double v00 = (*values)(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j));
        const double v10 = (*values)(static_cast<Eigen::Index>(i + 1),
                                     static_cast<Eigen::Index>(j));
        const double v01 = (*values)(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j + 1));
        const double v11 = (*values)(static_cast<Eigen::Index>(i + 1),
                                     static_cast<Eigen::Index>(j + 1));
        struct Pt {
          double x, y;
        };
        Pt pts[4];
        int count = 0;
        auto edge = [&](double va, double vb, double xa, double ya, double xb,
                        double yb) {
          if ((va < level) == (vb < level)) return;
          const double t = (level - va) / (vb - va);
          pts[count++] = {xa + t * (xb - xa), ya + t * (yb - ya)};
        };
        edge(v00, v10, a1[i], a2[j], a1[i + 1], a2[j]);
        edge(v10, v11, a1[i + 1], a2[j], a1[i + 1], a2[j + 1]);
        edge(v01, v11, a1[i], a2[j + 1], a1[i + 1], a2[j + 1]);
        edge(v00, v01, a1[i], a2[j], a1[i], a2[j + 1]);
        if (count >= 2) {
          out << "<line x1=\"" << frame.px(pts[0].x) << "\" y1=\""
              << frame.py(pts[0].y) << "\" x2=\"" << frame.px(pts[1].x)
              << "\" y2=\"" << frame.py(pts[1].y) << "\"/>\n";
        }
        if (count == 4) {
          out << "<line x1=\"" << frame.px(pts[2].x) << "\" y1=\""
              << frame.py(pts[2].y) << "\" x2=\"" << frame.px(pts[3].x)
              << "\" y2=\"" << frame.py(pts[3].y) << "\"/>\n";
        }
      }
    }
    out << "</g>\n";
  }

  // target cross
  const auto [tx, ty] = grid.target;
  out << "<g stroke=\"#d62728\" stroke-width=\"2\">"
      << "<line x1=\"" << frame.px(tx) - 6 << "\" y1=\"" << frame.py(ty)
      << "\" x2=\"" << frame.px(tx) + 6 << "\" y2=\"" << frame.py(ty) << "\"/>"
      << "<line x1=\"" << frame.px(tx) << "\" y1=\"" << frame.py(ty) - 6
      << "\" x2=\"" << frame.px(tx) << "\" y2=\"" << frame.py(ty) + 6 << "\"/>"
      << "</g>\n";
  for (const auto& [name, point] : grid.best) {
    if (name != criterion) continue;
    out << "<circle cx=\"" << frame.px(point.first) << "\" cy=\""
        << frame.py(point.second)
        << "\" r=\"6\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  }
  text(out, kWidth - kMarginRight - 10.0, kMarginTop + 16.0,
       "x target, o grid optimum", "end", 11, "#444");
  out << "</svg>\n";
}

}  // namespace qmee::bench

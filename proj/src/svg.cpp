#include "omplab/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "omplab/text.hpp"

namespace omplab {

namespace {

// Fixed coordinate formatting so output bytes never depend on locale or
// float-to-shortest quirks.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

const char* kPalette[] = {"#1b6ca8", "#d1495b", "#2e933c", "#8e44ad",
                          "#e67e22", "#16a085", "#7f8c8d", "#2c3e50"};

}  // namespace

std::string render_svg_curves(const GridResult& result) {
  if (result.cells.empty()) throw Error("render_svg_curves: empty grid result");

  // series[k] = (m, rate) sorted by m
  std::map<std::size_t, std::map<std::size_t, double>> series;
  std::size_t m_min = result.cells.front().m;
  std::size_t m_max = m_min;
  for (const GridCell& cell : result.cells) {
    series[cell.k][cell.m] = cell.success_rate();
    m_min = std::min(m_min, cell.m);
    m_max = std::max(m_max, cell.m);
  }

  const double width = 640.0;
  const double height = 480.0;
  const double left = 70.0, right = 180.0, top = 40.0, bottom = 60.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double m_span = m_max > m_min ? static_cast<double>(m_max - m_min) : 1.0;

  auto sx = [&](double m) { return left + (m - static_cast<double>(m_min)) / m_span * plot_w; };
  auto sy = [&](double rate) { return top + (1.0 - rate) * plot_h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << px(width)
      << " " << px(height) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << px(width) << "\" height=\"" << px(height)
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << px(left) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << "Recovery rate vs measurements (N=" << result.config.n << ", "
      << result.config.trials_per_cell << " trials/cell)</text>\n";

  // Axes.
  out << "<line x1=\"" << px(left) << "\" y1=\"" << px(top + plot_h) << "\" x2=\""
      << px(left + plot_w) << "\" y2=\"" << px(top + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << px(left) << "\" y1=\"" << px(top) << "\" x2=\"" << px(left)
      << "\" y2=\"" << px(top + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double rate = static_cast<double>(i) / 4.0;
    out << "<line x1=\"" << px(left - 4.0) << "\" y1=\"" << px(sy(rate)) << "\" x2=\"" << px(left)
        << "\" y2=\"" << px(sy(rate)) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    char label[16];
    std::snprintf(label, sizeof(label), "%.2f", rate);
    out << "<text x=\"" << px(left - 8.0) << "\" y=\"" << px(sy(rate) + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" << label
        << "</text>\n";
  }
  std::vector<std::size_t> m_ticks;
  for (const auto& [k, points] : series) {
    for (const auto& [m, rate] : points) m_ticks.push_back(m);
  }
  std::sort(m_ticks.begin(), m_ticks.end());
  m_ticks.erase(std::unique(m_ticks.begin(), m_ticks.end()), m_ticks.end());
  for (std::size_t m : m_ticks) {
    out << "<line x1=\"" << px(sx(static_cast<double>(m))) << "\" y1=\"" << px(top + plot_h)
        << "\" x2=\"" << px(sx(static_cast<double>(m))) << "\" y2=\"" << px(top + plot_h + 4.0)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << px(sx(static_cast<double>(m))) << "\" y=\"" << px(top + plot_h + 18.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << m
        << "</text>\n";
  }
  out << "<text x=\"" << px(left + plot_w / 2.0) << "\" y=\"" << px(height - 16.0)
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">"
      << "M (measurements)</text>\n";
  out << "<text x=\"20\" y=\"" << px(top + plot_h / 2.0)
      << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << px(top + plot_h / 2.0) << ")\">success rate</text>\n";

  std::size_t color = 0;
  for (const auto& [k, points] : series) {
    const char* stroke = kPalette[color % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& [m, rate] : points) {
      if (!first) out << ' ';
      out << px(sx(static_cast<double>(m))) << ',' << px(sy(rate));
      first = false;
    }
    out << "\"/>\n";
    for (const auto& [m, rate] : points) {
      out << "<circle cx=\"" << px(sx(static_cast<double>(m))) << "\" cy=\"" << px(sy(rate))
          << "\" r=\"3\" fill=\"" << stroke << "\"/>\n";
    }
    const double ly = top + 16.0 + 20.0 * static_cast<double>(color);
    out << "<line x1=\"" << px(left + plot_w + 16.0) << "\" y1=\"" << px(ly) << "\" x2=\""
        << px(left + plot_w + 44.0) << "\" y2=\"" << px(ly) << "\" stroke=\"" << stroke
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << px(left + plot_w + 50.0) << "\" y=\"" << px(ly + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"12\">K=" << k << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
  return out.str();
}

void emit_svg_curves(const GridResult& result, const std::string& path) {
  write_file(path, render_svg_curves(result));
}

}  // namespace omplab

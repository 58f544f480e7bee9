#include "ruqkit/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "ruqkit/errors.hpp"

namespace ruqkit {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void require_series(std::span<const PlotSeries> series) {
  if (series.empty()) throw DataError("no plot series to write");
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  writer(out);
  if (!out) throw DataError("write failed: " + path.string());
}

enum class Marker { star, circle, square, triangle, diamond, triangle_down, plus };

struct Style {
  const char* color;
  Marker marker;
};

Style style_for(const CandidateLabel& label, std::size_t generic_index) {
  if (label.kind == CandidateLabel::Kind::reference) return {"#8e44ad", Marker::star};
  if (label.kind == CandidateLabel::Kind::decoded) return {"#27ae60", Marker::circle};
  static constexpr std::array<Style, 5> kGenerics{{{"#e67e22", Marker::square},
                                                   {"#2e86de", Marker::triangle},
                                                   {"#c0392b", Marker::diamond},
                                                   {"#16a085", Marker::triangle_down},
                                                   {"#7f8c8d", Marker::plus}}};
  return kGenerics[generic_index % kGenerics.size()];
}

std::string marker_shape(Marker m, double x, double y, const char* color) {
  const double r = 5.0;
  auto pt = [](double px, double py) { return fmt("%.2f", px) + "," + fmt("%.2f", py); };
  auto polygon = [&](const std::vector<std::pair<double, double>>& pts) {
    std::string s = "<polygon fill=\"" + std::string(color) + "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? " " : "") + pt(pts[i].first, pts[i].second);
    return s + "\"/>";
  };
  switch (m) {
    case Marker::circle:
      return "<circle fill=\"" + std::string(color) + "\" cx=\"" + fmt("%.2f", x) + "\" cy=\"" + fmt("%.2f", y) +
             "\" r=\"" + fmt("%.1f", r) + "\"/>";
    case Marker::square:
      return "<rect fill=\"" + std::string(color) + "\" x=\"" + fmt("%.2f", x - r) + "\" y=\"" + fmt("%.2f", y - r) +
             "\" width=\"" + fmt("%.1f", 2 * r) + "\" height=\"" + fmt("%.1f", 2 * r) + "\"/>";
    case Marker::triangle:
      return polygon({{x, y - r * 1.2}, {x + r * 1.1, y + r * 0.8}, {x - r * 1.1, y + r * 0.8}});
    case Marker::triangle_down:
      return polygon({{x, y + r * 1.2}, {x + r * 1.1, y - r * 0.8}, {x - r * 1.1, y - r * 0.8}});
    case Marker::diamond:
      return polygon({{x, y - r * 1.3}, {x + r, y}, {x, y + r * 1.3}, {x - r, y}});
    case Marker::plus:
      return "<path stroke=\"" + std::string(color) + "\" stroke-width=\"2.5\" d=\"M" + pt(x - r, y) + " L" +
             pt(x + r, y) + " M" + pt(x, y - r) + " L" + pt(x, y + r) + "\"/>";
    case Marker::star: {
      std::vector<std::pair<double, double>> pts;
      const double pi = std::acos(-1.0);
      for (int k = 0; k < 10; ++k) {
        const double rr = (k % 2 == 0) ? r * 1.4 : r * 0.6;
        const double a = -pi / 2 + k * pi / 5;
        pts.emplace_back(x + rr * std::cos(a), y + rr * std::sin(a));
      }
      return polygon(pts);
    }
  }
  return {};
}

// Round tick step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

void write_plot_csv(std::ostream& out, std::span<const PlotSeries> series) {
  require_series(series);
  struct Row {
    std::string label;
    PlotPoint point;
  };
  std::vector<Row> rows;
  for (const auto& s : series)
    for (const auto& p : s.points) rows.push_back({s.label.str(), p});
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.label != b.label) return a.label < b.label;
    return a.point.position < b.point.position;
  });
  out << "series,position,mean_logprob,count\n";
  for (const auto& r : rows)
    out << csv_field(r.label) << ',' << r.point.position << ',' << fmt("%.6f", r.point.mean_logprob) << ','
        << r.point.count << '\n';
}

void emit_plot_csv(std::span<const PlotSeries> series, const std::filesystem::path& path) {
  require_series(series);
  write_file(path, [&](std::ostream& out) { write_plot_csv(out, series); });
}

void write_plot_svg(std::ostream& out, std::span<const PlotSeries> series, SvgSize size) {
  require_series(series);
  const double left = 80, right = 230, top = 40, bottom = 60;
  const double plot_w = std::max(10.0, size.width - left - right);
  const double plot_h = std::max(10.0, size.height - top - bottom);

  double x_min = 1, x_max = 1, y_min = 0, y_max = 0;
  bool any = false;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      const auto x = static_cast<double>(p.position);
      if (!any) {
        x_min = x_max = x;
        y_min = y_max = p.mean_logprob;
        any = true;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, p.mean_logprob);
      y_max = std::max(y_max, p.mean_logprob);
    }
  if (x_max - x_min < 1.0) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max - y_min < 1e-9) {
    y_min -= 0.5;
    y_max += 0.5;
  } else {
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
  }
  auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return top + (y_max - y) / (y_max - y_min) * plot_h; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size.width << "\" height=\"" << size.height
      << "\" viewBox=\"0 0 " << size.width << ' ' << size.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << size.width << "\" height=\"" << size.height << "\" fill=\"white\"/>\n";

  // Axes and ticks.
  out << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << fmt("%.2f", left) << "\" y1=\"" << fmt("%.2f", top + plot_h) << "\" x2=\""
      << fmt("%.2f", left + plot_w) << "\" y2=\"" << fmt("%.2f", top + plot_h) << "\"/>\n";
  out << "<line x1=\"" << fmt("%.2f", left) << "\" y1=\"" << fmt("%.2f", top) << "\" x2=\"" << fmt("%.2f", left)
      << "\" y2=\"" << fmt("%.2f", top + plot_h) << "\"/>\n";
  out << "</g>\n<g class=\"ticks\" fill=\"black\">\n";
  const double x_step = std::max(1.0, nice_step(x_max - x_min, 10));
  for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9; x += x_step) {
    out << "<line stroke=\"black\" x1=\"" << fmt("%.2f", sx(x)) << "\" y1=\"" << fmt("%.2f", top + plot_h)
        << "\" x2=\"" << fmt("%.2f", sx(x)) << "\" y2=\"" << fmt("%.2f", top + plot_h + 5) << "\"/>\n";
    out << "<text x=\"" << fmt("%.2f", sx(x)) << "\" y=\"" << fmt("%.2f", top + plot_h + 18)
        << "\" text-anchor=\"middle\">" << fmt("%.0f", x) << "</text>\n";
  }
  const double y_step = nice_step(y_max - y_min, 6);
  for (double y = std::ceil(y_min / y_step) * y_step; y <= y_max + 1e-12; y += y_step) {
    const double yy = std::abs(y) < y_step * 1e-6 ? 0.0 : y;
    out << "<line stroke=\"black\" x1=\"" << fmt("%.2f", left - 5) << "\" y1=\"" << fmt("%.2f", sy(yy)) << "\" x2=\""
        << fmt("%.2f", left) << "\" y2=\"" << fmt("%.2f", sy(yy)) << "\"/>\n";
    out << "<text x=\"" << fmt("%.2f", left - 8) << "\" y=\"" << fmt("%.2f", sy(yy) + 4)
        << "\" text-anchor=\"end\">" << fmt("%.2f", yy) << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << fmt("%.2f", left + plot_w / 2) << "\" y=\"" << fmt("%.2f", top + plot_h + 40)
      << "\" text-anchor=\"middle\">token position</text>\n";
  out << "<text transform=\"translate(" << fmt("%.2f", left - 55) << ',' << fmt("%.2f", top + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">mean token log-probability</text>\n";

  // Series.
  std::size_t generic_index = 0;
  double legend_y = top + 10;
  for (const auto& s : series) {
    const Style st = style_for(s.label, generic_index);
    if (s.label.kind == CandidateLabel::Kind::generic) ++generic_index;
    const std::string label = xml_escape(s.label.str());
    out << "<g class=\"series\" data-label=\"" << label << "\">\n";
    out << "<polyline fill=\"none\" stroke=\"" << st.color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i)
      out << (i ? " " : "") << fmt("%.2f", sx(static_cast<double>(s.points[i].position))) << ','
          << fmt("%.2f", sy(s.points[i].mean_logprob));
    out << "\"/>\n";
    for (const auto& p : s.points) {
      out << "<g class=\"marker\" data-position=\"" << p.position << "\" data-mean=\"" << fmt("%.6f", p.mean_logprob)
          << "\" data-count=\"" << p.count << "\">"
          << marker_shape(st.marker, sx(static_cast<double>(p.position)), sy(p.mean_logprob), st.color) << "</g>\n";
    }
    out << "</g>\n";

    const double lx = left + plot_w + 20;
    out << "<g class=\"legend-entry\">";
    out << "<line stroke=\"" << st.color << "\" stroke-width=\"2\" x1=\"" << fmt("%.2f", lx) << "\" y1=\""
        << fmt("%.2f", legend_y) << "\" x2=\"" << fmt("%.2f", lx + 30) << "\" y2=\"" << fmt("%.2f", legend_y) << "\"/>";
    out << marker_shape(st.marker, lx + 15, legend_y, st.color);
    out << "<text x=\"" << fmt("%.2f", lx + 38) << "\" y=\"" << fmt("%.2f", legend_y + 4) << "\">" << label
        << "</text></g>\n";
    legend_y += 22;
  }
  out << "</svg>\n";
}

void emit_plot_svg(std::span<const PlotSeries> series, const std::filesystem::path& path, SvgSize size) {
  require_series(series);
  write_file(path, [&](std::ostream& out) { write_plot_svg(out, series, size); });
}

}  // namespace ruqkit

#include "qcvz/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qcvz {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMargin = 60;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void check_table(const CsvTable& t, std::size_t min_cols) {
  if (t.rows.empty()) throw std::invalid_argument("plot input has no data rows");
  if (t.header.size() < min_cols) throw std::invalid_argument("plot input has too few columns");
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  double norm(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.5; }
};

Range range_of(const std::vector<double>& v) {
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  return {*mn, *mx};
}

std::string header(const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  return os.str();
}

std::string axes(const std::string& xlabel, const std::string& ylabel, Range x, Range y) {
  const int x0 = kMargin, x1 = kWidth - kMargin, y0 = kHeight - kMargin, y1 = kMargin;
  std::ostringstream os;
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << x0 << "\" y=\"" << y0 + 16 << "\">" << fmt(x.lo) << "</text>\n"
     << "<text x=\"" << x1 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"end\">" << fmt(x.hi) << "</text>\n"
     << "<text x=\"" << x0 - 4 << "\" y=\"" << y0 << "\" text-anchor=\"end\">" << fmt(y.lo) << "</text>\n"
     << "<text x=\"" << x0 - 4 << "\" y=\"" << y1 + 8 << "\" text-anchor=\"end\">" << fmt(y.hi) << "</text>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 20 << "\" text-anchor=\"middle\">" << xlabel
     << "</text>\n"
     << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kHeight / 2 << ")\">" << ylabel << "</text>\n"
     << "</g>\n";
  return os.str();
}

std::string color(double v) {
  // Dark blue to yellow.
  const double c = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(30 + 220 * c));
  const int g = static_cast<int>(std::lround(20 + 210 * c));
  const int b = static_cast<int>(std::lround(110 - 80 * c));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

PlotKind plot_kind_from_string(std::string_view name) {
  if (name == "heatmap") return PlotKind::heatmap;
  if (name == "line") return PlotKind::line;
  throw std::invalid_argument("unknown plot kind: " + std::string(name));
}

std::string heatmap_svg(const CsvTable& t) {
  check_table(t, 3);
  if (t.header.size() != 3) throw std::invalid_argument("heatmap input needs exactly three columns");
  std::vector<double> xs, ys;
  for (const auto& r : t.rows) {
    xs.push_back(r[0]);
    ys.push_back(r[1]);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  if (xs.size() * ys.size() != t.rows.size()) throw std::invalid_argument("heatmap input is not a full grid");
  std::vector<double> vals;
  for (const auto& r : t.rows) vals.push_back(r[2]);
  const Range vr = range_of(vals);

  const double cw = static_cast<double>(kWidth - 2 * kMargin) / static_cast<double>(xs.size());
  const double ch = static_cast<double>(kHeight - 2 * kMargin) / static_cast<double>(ys.size());
  std::ostringstream os;
  os << header(t.header[2] + " vs " + t.header[0] + ", " + t.header[1]);
  for (const auto& r : t.rows) {
    const auto i = static_cast<double>(std::lower_bound(xs.begin(), xs.end(), r[0]) - xs.begin());
    const auto j = static_cast<double>(std::lower_bound(ys.begin(), ys.end(), r[1]) - ys.begin());
    os << "<rect x=\"" << px(kMargin + i * cw) << "\" y=\"" << px(kHeight - kMargin - (j + 1) * ch) << "\" width=\""
       << px(cw + 0.5) << "\" height=\"" << px(ch + 0.5) << "\" fill=\"" << color(vr.norm(r[2])) << "\"/>\n";
  }
  os << axes(t.header[0], t.header[1], range_of(xs), range_of(ys)) << "</svg>\n";
  return os.str();
}

std::string line_svg(const CsvTable& t) {
  check_table(t, 2);
  std::vector<double> xs, all_y;
  for (const auto& r : t.rows) {
    xs.push_back(r[0]);
    all_y.insert(all_y.end(), r.begin() + 1, r.end());
  }
  const Range xr = range_of(xs), yr = range_of(all_y);
  static const char* kColors[] = {"#1f5fa8", "#c0392b", "#27864a", "#8e44ad"};
  std::ostringstream os;
  os << header(t.header[1] + " vs " + t.header[0]);
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    os << "<polyline fill=\"none\" stroke=\"" << kColors[(c - 1) % 4] << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : t.rows) {
      os << px(kMargin + xr.norm(r[0]) * (kWidth - 2 * kMargin)) << ','
         << px(kHeight - kMargin - yr.norm(r[c]) * (kHeight - 2 * kMargin)) << ' ';
    }
    os << "\"/>\n";
  }
  os << axes(t.header[0], t.header.size() == 2 ? t.header[1] : "value", xr, yr) << "</svg>\n";
  return os.str();
}

std::filesystem::path emit_plot(const std::filesystem::path& csv_path, PlotKind kind) {
  std::ifstream in(csv_path);
  if (!in) throw std::invalid_argument("cannot read " + csv_path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const CsvTable t = parse_csv(ss.str());
  const std::string svg = kind == PlotKind::heatmap ? heatmap_svg(t) : line_svg(t);
  auto out = csv_path;
  out.replace_extension(".svg");
  write_file(out, svg);
  write_sidecar(out, {{"command", "plot"},
                      {"source", csv_path.filename().string()},
                      {"kind", kind == PlotKind::heatmap ? "heatmap" : "line"}});
  return out;
}

}  // namespace qcvz

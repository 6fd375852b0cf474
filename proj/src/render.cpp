#include "procdrift/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace procdrift {

namespace {
constexpr std::array<Rgb, 256> kPlasma = {{
    {13, 8, 135},
    {16, 7, 136},
    {19, 7, 137},
    {22, 7, 138},
    {25, 6, 140},
    {27, 6, 141},
    {29, 6, 142},
    {32, 6, 143},
    {34, 6, 144},
    {36, 6, 145},
    {38, 5, 145},
    {40, 5, 146},
    {42, 5, 147},
    {44, 5, 148},
    {46, 5, 149},
    {47, 5, 150},
    {49, 5, 151},
    {51, 5, 151},
    {53, 4, 152},
    {55, 4, 153},
    {56, 4, 154},
    {58, 4, 154},
    {60, 4, 155},
    {62, 4, 156},
    {63, 4, 156},
    {65, 4, 157},
    {67, 3, 158},
    {68, 3, 158},
    {70, 3, 159},
    {72, 3, 159},
    {73, 3, 160},
    {75, 3, 161},
    {76, 2, 161},
    {78, 2, 162},
    {80, 2, 162},
    {81, 2, 163},
    {83, 2, 163},
    {85, 2, 164},
    {86, 1, 164},
    {88, 1, 164},
    {89, 1, 165},
    {91, 1, 165},
    {92, 1, 166},
    {94, 1, 166},
    {96, 1, 166},
    {97, 0, 167},
    {99, 0, 167},
    {100, 0, 167},
    {102, 0, 167},
    {103, 0, 168},
    {105, 0, 168},
    {106, 0, 168},
    {108, 0, 168},
    {110, 0, 168},
    {111, 0, 168},
    {113, 0, 168},
    {114, 1, 168},
    {116, 1, 168},
    {117, 1, 168},
    {119, 1, 168},
    {120, 1, 168},
    {122, 2, 168},
    {123, 2, 168},
    {125, 3, 168},
    {126, 3, 168},
    {128, 4, 168},
    {129, 4, 167},
    {131, 5, 167},
    {132, 5, 167},
    {134, 6, 166},
    {135, 7, 166},
    {136, 8, 166},
    {138, 9, 165},
    {139, 10, 165},
    {141, 11, 165},
    {142, 12, 164},
    {143, 13, 164},
    {145, 14, 163},
    {146, 15, 163},
    {148, 16, 162},
    {149, 17, 161},
    {150, 19, 161},
    {152, 20, 160},
    {153, 21, 159},
    {154, 22, 159},
    {156, 23, 158},
    {157, 24, 157},
    {158, 25, 157},
    {160, 26, 156},
    {161, 27, 155},
    {162, 29, 154},
    {163, 30, 154},
    {165, 31, 153},
    {166, 32, 152},
    {167, 33, 151},
    {168, 34, 150},
    {170, 35, 149},
    {171, 36, 148},
    {172, 38, 148},
    {173, 39, 147},
    {174, 40, 146},
    {176, 41, 145},
    {177, 42, 144},
    {178, 43, 143},
    {179, 44, 142},
    {180, 46, 141},
    {181, 47, 140},
    {182, 48, 139},
    {183, 49, 138},
    {184, 50, 137},
    {186, 51, 136},
    {187, 52, 136},
    {188, 53, 135},
    {189, 55, 134},
    {190, 56, 133},
    {191, 57, 132},
    {192, 58, 131},
    {193, 59, 130},
    {194, 60, 129},
    {195, 61, 128},
    {196, 62, 127},
    {197, 64, 126},
    {198, 65, 125},
    {199, 66, 124},
    {200, 67, 123},
    {201, 68, 122},
    {202, 69, 122},
    {203, 70, 121},
    {204, 71, 120},
    {204, 73, 119},
    {205, 74, 118},
    {206, 75, 117},
    {207, 76, 116},
    {208, 77, 115},
    {209, 78, 114},
    {210, 79, 113},
    {211, 81, 113},
    {212, 82, 112},
    {213, 83, 111},
    {213, 84, 110},
    {214, 85, 109},
    {215, 86, 108},
    {216, 87, 107},
    {217, 88, 106},
    {218, 90, 106},
    {218, 91, 105},
    {219, 92, 104},
    {220, 93, 103},
    {221, 94, 102},
    {222, 95, 101},
    {222, 97, 100},
    {223, 98, 99},
    {224, 99, 99},
    {225, 100, 98},
    {226, 101, 97},
    {226, 102, 96},
    {227, 104, 95},
    {228, 105, 94},
    {229, 106, 93},
    {229, 107, 93},
    {230, 108, 92},
    {231, 110, 91},
    {231, 111, 90},
    {232, 112, 89},
    {233, 113, 88},
    {233, 114, 87},
    {234, 116, 87},
    {235, 117, 86},
    {235, 118, 85},
    {236, 119, 84},
    {237, 121, 83},
    {237, 122, 82},
    {238, 123, 81},
    {239, 124, 81},
    {239, 126, 80},
    {240, 127, 79},
    {240, 128, 78},
    {241, 129, 77},
    {241, 131, 76},
    {242, 132, 75},
    {243, 133, 75},
    {243, 135, 74},
    {244, 136, 73},
    {244, 137, 72},
    {245, 139, 71},
    {245, 140, 70},
    {246, 141, 69},
    {246, 143, 68},
    {247, 144, 68},
    {247, 145, 67},
    {247, 147, 66},
    {248, 148, 65},
    {248, 149, 64},
    {249, 151, 63},
    {249, 152, 62},
    {249, 154, 62},
    {250, 155, 61},
    {250, 156, 60},
    {250, 158, 59},
    {251, 159, 58},
    {251, 161, 57},
    {251, 162, 56},
    {252, 163, 56},
    {252, 165, 55},
    {252, 166, 54},
    {252, 168, 53},
    {252, 169, 52},
    {253, 171, 51},
    {253, 172, 51},
    {253, 174, 50},
    {253, 175, 49},
    {253, 177, 48},
    {253, 178, 47},
    {253, 180, 47},
    {253, 181, 46},
    {254, 183, 45},
    {254, 184, 44},
    {254, 186, 44},
    {254, 187, 43},
    {254, 189, 42},
    {254, 190, 42},
    {254, 192, 41},
    {253, 194, 41},
    {253, 195, 40},
    {253, 197, 39},
    {253, 198, 39},
    {253, 200, 39},
    {253, 202, 38},
    {253, 203, 38},
    {252, 205, 37},
    {252, 206, 37},
    {252, 208, 37},
    {252, 210, 37},
    {251, 211, 36},
    {251, 213, 36},
    {251, 215, 36},
    {250, 216, 36},
    {250, 218, 36},
    {249, 220, 36},
    {249, 221, 37},
    {248, 223, 37},
    {248, 225, 37},
    {247, 226, 37},
    {247, 228, 37},
    {246, 230, 38},
    {246, 232, 38},
    {245, 233, 38},
    {245, 235, 39},
    {244, 237, 39},
    {243, 238, 39},
    {243, 240, 39},
    {242, 242, 39},
    {241, 244, 38},
    {241, 245, 37},
    {240, 247, 36},
    {240, 249, 33}
}};
}  // namespace

namespace {

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct Band {
  const BehaviorCluster* cluster;
  std::vector<int> matrix_rows;  // indices into report.matrix
};

std::vector<Band> build_bands(const DriftReport& r) {
  std::vector<int> matrix_row(r.constraints.size(), -1);
  for (std::size_t i = 0; i < r.rows.size(); ++i) matrix_row[r.rows[i]] = static_cast<int>(i);

  std::vector<Band> bands;
  for (const auto& c : r.clusters)
    if (!c.stable_band) bands.push_back({&c, {}});
  for (const auto& c : r.clusters)
    if (c.stable_band) bands.push_back({&c, {}});

  for (auto& band : bands) {
    const auto& mean = band.cluster->mean_series;
    std::vector<std::pair<double, int>> keyed;
    for (int m : band.cluster->members) {
      const int row = matrix_row[m];
      const double mse =
          (r.matrix.row(row).transpose() - mean).squaredNorm() / std::max<Eigen::Index>(1, mean.size());
      keyed.emplace_back(mse, row);
    }
    std::sort(keyed.begin(), keyed.end());
    for (const auto& [mse, row] : keyed) band.matrix_rows.push_back(row);
  }
  return bands;
}

int quantize(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return static_cast<int>(std::lround(v * 255.0));
}

}  // namespace

const std::array<Rgb, 256>& plasma_lut() { return kPlasma; }

Rgb plasma(double value) {
  if (std::isnan(value)) value = 0.0;
  return kPlasma[quantize(value)];
}

std::string to_hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

nlohmann::json drift_map_layout(const DriftReport& r, const DriftMapOptions& opt) {
  const auto bands = build_bands(r);
  const int cols = static_cast<int>(r.windows.size());
  const int row_count = static_cast<int>(r.rows.size());
  const int plot_h = row_count * opt.row_height;
  const int width = opt.margin_left + cols * opt.cell_width + opt.margin_right;
  const int height = opt.margin_top + plot_h + opt.margin_bottom;

  nlohmann::json j;
  j["width"] = width;
  j["height"] = height;
  j["cell_width"] = opt.cell_width;
  j["row_height"] = opt.row_height;
  j["plot"] = {{"x", opt.margin_left},
               {"y", opt.margin_top},
               {"width", cols * opt.cell_width},
               {"height", plot_h}};

  auto& columns = j["columns"] = nlohmann::json::array();
  for (const auto& w : r.windows)
    columns.push_back({{"index", w.index},
                       {"x", opt.margin_left + static_cast<int>(w.index) * opt.cell_width},
                       {"span_begin", format_iso8601(w.span_begin)},
                       {"span_end", format_iso8601(w.span_end)}});

  auto& rows = j["rows"] = nlohmann::json::array();
  auto& values = j["values"] = nlohmann::json::array();
  auto& band_json = j["bands"] = nlohmann::json::array();
  auto& separators = j["separators"] = nlohmann::json::array();
  auto& lines = j["lines"] = nlohmann::json::array();

  int y = opt.margin_top;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto& band = bands[b];
    const int y0 = y;
    for (int row : band.matrix_rows) {
      const int idx = r.rows[row];
      rows.push_back({{"y", y},
                      {"cluster", band.cluster->id},
                      {"index", idx},
                      {"constraint", describe(r.constraints[idx], r.alphabet)}});
      const auto vals = r.matrix.row(row);
      values.push_back(std::vector<double>(vals.data(), vals.data() + vals.size()));
      y += opt.row_height;
    }
    band_json.push_back({{"cluster", band.cluster->id},
                         {"y0", y0},
                         {"y1", y},
                         {"rows", band.matrix_rows.size()},
                         {"stable_band", band.cluster->stable_band}});
    if (b + 1 < bands.size()) separators.push_back({{"y", y}});
    for (int cp : band.cluster->change_points)
      lines.push_back({{"kind", "cluster"},
                       {"cluster", band.cluster->id},
                       {"window", cp},
                       {"x", opt.margin_left + cp * opt.cell_width},
                       {"y0", y0},
                       {"y1", y}});
  }
  for (int cp : r.global_change_points)
    lines.push_back({{"kind", "global"},
                     {"window", cp},
                     {"x", opt.margin_left + cp * opt.cell_width},
                     {"y0", opt.margin_top},
                     {"y1", opt.margin_top + plot_h}});

  auto stops = nlohmann::json::array();
  for (const auto& c : kPlasma) stops.push_back(to_hex(c));
  j["colormap"] = {{"name", r.params.colormap}, {"domain", {0.0, 1.0}}, {"stops", stops}};
  return j;
}

std::string render_drift_map_svg(const DriftReport& r, const DriftMapOptions& opt) {
  const auto layout = drift_map_layout(r, opt);
  const int width = layout["width"];
  const int height = layout["height"];
  const int plot_w = layout["plot"]["width"];
  const int plot_h = layout["plot"]["height"];
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" shape-rendering=\"crispEdges\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
  out << "<g class=\"cells\">\n";
  const auto& rows = layout["rows"];
  const auto& values = layout["values"];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int y = rows[i]["y"];
    const auto& v = values[i];
    std::size_t start = 0;
    while (start < v.size()) {
      const int q = quantize(v[start].get<double>());
      std::size_t end = start + 1;
      while (end < v.size() && quantize(v[end].get<double>()) == q) ++end;
      out << "<rect x=\"" << opt.margin_left + static_cast<int>(start) * opt.cell_width << "\" y=\""
          << y << "\" width=\"" << static_cast<int>(end - start) * opt.cell_width << "\" height=\""
          << opt.row_height << "\" fill=\"" << to_hex(kPlasma[q]) << "\"/>\n";
      start = end;
    }
  }
  out << "</g>\n<g class=\"separators\" stroke=\"#ffffff\" stroke-width=\"1\">\n";
  for (const auto& s : layout["separators"])
    out << "<line x1=\"" << opt.margin_left << "\" x2=\"" << opt.margin_left + plot_w << "\" y1=\""
        << s["y"].get<int>() << "\" y2=\"" << s["y"].get<int>() << "\"/>\n";
  out << "</g>\n<g class=\"change-points\" stroke-dasharray=\"4,3\">\n";
  for (const auto& l : layout["lines"]) {
    const bool global = l["kind"] == "global";
    out << "<line class=\"" << l["kind"].get<std::string>() << "\" x1=\"" << l["x"].get<int>()
        << "\" x2=\"" << l["x"].get<int>() << "\" y1=\"" << l["y0"].get<int>() << "\" y2=\""
        << l["y1"].get<int>() << "\" stroke=\"" << (global ? "#ffffff" : "#00ffff")
        << "\" stroke-width=\"" << (global ? 2 : 1) << "\"/>\n";
  }
  out << "</g>\n<g class=\"axis\" font-family=\"sans-serif\" font-size=\"9\">\n";
  const int cols = static_cast<int>(layout["columns"].size());
  const int tick = std::max(1, cols / 10);
  for (int c = 0; c < cols; c += tick)
    out << "<text x=\"" << opt.margin_left + c * opt.cell_width << "\" y=\""
        << opt.margin_top + plot_h + 12 << "\">" << c << "</text>\n";
  for (const auto& b : layout["bands"])
    out << "<text x=\"2\" y=\"" << (b["y0"].get<int>() + b["y1"].get<int>()) / 2 + 3 << "\">"
        << (b["stable_band"].get<bool>() ? "S" : "C") << b["cluster"].get<int>() << "</text>\n";
  out << "</g>\n</svg>\n";
  return out.str();
}

nlohmann::json drift_chart_data(const DriftReport& r, const BehaviorCluster& c) {
  nlohmann::json j;
  j["cluster"] = c.id;
  auto& x = j["x"] = nlohmann::json::array();
  auto& labels = j["labels"] = nlohmann::json::array();
  for (const auto& w : r.windows) {
    x.push_back(w.index);
    labels.push_back(format_iso8601(w.span_begin));
  }
  j["y"] = std::vector<double>(c.mean_series.data(), c.mean_series.data() + c.mean_series.size());
  j["y_range"] = {0.0, 1.0};
  j["change_points"] = c.change_points;
  j["related_cases"] = c.related_cases;
  auto& tags = j["tags"] = nlohmann::json::array();
  for (auto t : c.tags) tags.push_back(std::string(to_string(t)));
  return j;
}

std::string render_drift_chart_svg(const DriftReport& r, const BehaviorCluster& c) {
  constexpr int width = 640, height = 320, left = 50, right = 20, top = 30, bottom = 40;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  const auto n = c.mean_series.size();
  const double dx = n > 1 ? plot_w / static_cast<double>(n - 1) : 0.0;
  auto px = [&](double j) { return left + j * dx; };
  auto py = [&](double v) { return top + (1.0 - std::clamp(v, 0.0, 1.0)) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << left << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">Cluster "
      << c.id << " (" << c.members.size() << " constraints, " << c.related_cases
      << " cases)</text>\n";
  out << "<g class=\"grid\" stroke=\"#dddddd\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (double v : {0.0, 0.25, 0.5, 0.75, 1.0})
    out << "<line x1=\"" << left << "\" x2=\"" << fmt(left + plot_w) << "\" y1=\"" << fmt(py(v))
        << "\" y2=\"" << fmt(py(v)) << "\"/><text x=\"" << left - 30 << "\" y=\""
        << fmt(py(v) + 3) << "\" stroke=\"none\" fill=\"#333333\">" << fmt(v) << "</text>\n";
  out << "</g>\n<g class=\"change-points\" stroke=\"#d62728\" stroke-dasharray=\"4,3\">\n";
  for (int cp : c.change_points)
    out << "<line x1=\"" << fmt(px(cp - 0.5)) << "\" x2=\"" << fmt(px(cp - 0.5)) << "\" y1=\""
        << top << "\" y2=\"" << fmt(top + plot_h) << "\"/>\n";
  out << "</g>\n<polyline class=\"mean\" fill=\"none\" stroke=\"#0d0887\" stroke-width=\"2\" points=\"";
  for (Eigen::Index j = 0; j < n; ++j)
    out << (j ? " " : "") << fmt(px(static_cast<double>(j))) << ',' << fmt(py(c.mean_series[j]));
  out << "\"/>\n<g class=\"axis\" font-family=\"sans-serif\" font-size=\"9\">\n";
  const int tick = std::max<int>(1, static_cast<int>(n) / 8);
  for (Eigen::Index j = 0; j < n; j += tick) {
    std::string label = j < static_cast<Eigen::Index>(r.windows.size())
                            ? format_iso8601(r.windows[j].span_begin).substr(0, 10)
                            : std::to_string(j);
    out << "<text x=\"" << fmt(px(static_cast<double>(j))) << "\" y=\"" << height - bottom + 14
        << "\" text-anchor=\"middle\">" << xml_escape(label) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string render_acf_svg(const BehaviorCluster& c) {
  constexpr int width = 480, height = 240, left = 40, right = 10, top = 20, bottom = 30;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  const auto lags = c.acf.size();
  const double bar = lags ? plot_w / static_cast<double>(lags) : 0.0;
  auto py = [&](double v) { return top + (1.0 - (std::clamp(v, -1.0, 1.0) + 1.0) / 2.0) * plot_h; };
  const double band = 1.96 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, c.mean_series.size())));

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
  out << "<rect class=\"band\" x=\"" << left << "\" y=\"" << fmt(py(band)) << "\" width=\""
      << fmt(plot_w) << "\" height=\"" << fmt(py(-band) - py(band))
      << "\" fill=\"#1f77b4\" fill-opacity=\"0.15\"/>\n";
  out << "<line x1=\"" << left << "\" x2=\"" << fmt(left + plot_w) << "\" y1=\"" << fmt(py(0))
      << "\" y2=\"" << fmt(py(0)) << "\" stroke=\"#333333\"/>\n";
  for (std::size_t k = 0; k < lags; ++k) {
    const double x = left + (k + 0.5) * bar;
    out << "<line class=\"lag\" x1=\"" << fmt(x) << "\" x2=\"" << fmt(x) << "\" y1=\""
        << fmt(py(0)) << "\" y2=\"" << fmt(py(c.acf[k].r)) << "\" stroke=\""
        << (c.acf[k].significant && k > 0 ? "#d62728" : "#0d0887") << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << height - bottom + 14
        << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">" << c.acf[k].lag
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

nlohmann::json edfg_to_json(const ExtendedDfg& e) {
  nlohmann::json j = dfg_to_json(e.base);
  auto& arcs = j["constraint_arcs"] = nlohmann::json::array();
  for (const auto& a : e.constraint_arcs)
    arcs.push_back({{"from", a.from},
                    {"to", a.to},
                    {"template", std::string(to_string(a.kind))},
                    {"category", std::string(to_string(a.category))},
                    {"color", a.color},
                    {"mean_confidence", a.mean_confidence}});
  return j;
}

std::string edfg_to_dot(const ExtendedDfg& e) {
  std::string dot = dfg_to_dot(e.base);
  dot.resize(dot.size() - 2);  // drop "}\n"
  std::ostringstream out;
  out << dot;
  for (const auto& a : e.constraint_arcs)
    out << "  " << dot_quote(a.from) << " -> " << dot_quote(a.to) << " [color=" << a.color
        << ", fontcolor=" << a.color << ", style=bold, label=\"" << to_string(a.kind) << " "
        << fmt(a.mean_confidence) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string constraints_csv(const DriftReport& r, const BehaviorCluster& c) {
  std::ostringstream out;
  out << "cluster,template,activity1,activity2,min,max,mean\n";
  for (const auto& rc : r.minimized[r.cluster_position(c.id)]) {
    out << c.id << ',' << to_string(rc.constraint.kind) << ','
        << csv_field(r.alphabet[rc.constraint.a]) << ','
        << (rc.constraint.b ? csv_field(r.alphabet[*rc.constraint.b]) : std::string()) << ','
        << fmt(rc.min, 6) << ',' << fmt(rc.max, 6) << ',' << fmt(rc.mean, 6) << '\n';
  }
  return out.str();
}

nlohmann::json constraints_json(const DriftReport& r, const BehaviorCluster& c) {
  auto list = nlohmann::json::array();
  for (const auto& rc : r.minimized[r.cluster_position(c.id)])
    list.push_back({{"cluster", c.id},
                    {"index", rc.index},
                    {"template", std::string(to_string(rc.constraint.kind))},
                    {"activity1", r.alphabet[rc.constraint.a]},
                    {"activity2", rc.constraint.b ? nlohmann::json(r.alphabet[*rc.constraint.b])
                                                  : nlohmann::json(nullptr)},
                    {"min", rc.min},
                    {"max", rc.max},
                    {"mean", rc.mean}});
  return list;
}

nlohmann::json clusters_json(const DriftReport& r) {
  auto list = nlohmann::json::array();
  for (std::size_t i = 0; i < r.clusters.size(); ++i) {
    auto cj = cluster_to_json(r, r.clusters[i]);
    cj["rank"] = i + 1;
    list.push_back(std::move(cj));
  }
  return list;
}

nlohmann::json metrics_json(const DriftReport& r) {
  nlohmann::json j;
  j["spread"] = r.spread;
  j["global_change_points"] = r.global_change_points;
  j["cluster_change_points"] = r.cluster_change_points;
  auto& clusters = j["clusters"] = nlohmann::json::array();
  for (const auto& c : r.clusters) {
    auto cj = cluster_to_json(r, c);
    clusters.push_back({{"id", c.id},
                        {"size", c.members.size()},
                        {"erratic", c.erratic},
                        {"adf", cj["adf"]},
                        {"acf", cj["acf"]},
                        {"tags", cj["tags"]}});
  }
  return j;
}

}  // namespace procdrift

#include "interpbound/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace interpbound::harness {

using Json = nlohmann::ordered_json;

std::vector<Format> parse_formats(std::string_view list) {
  std::vector<Format> formats;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto name = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    Format f;
    if (name == "csv") f = Format::csv;
    else if (name == "json") f = Format::json;
    else if (name == "svg") f = Format::svg;
    else throw Error(ErrorCode::InvalidArgument, "unknown output format '" + std::string(name) + "'");
    if (std::find(formats.begin(), formats.end(), f) == formats.end()) formats.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return formats;
}

namespace {

// Plain CSV has no quoting, so free text must not contain separators.
std::string csv_text(std::string text) {
  for (auto& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<const char*> header) {
    bool first = true;
    for (const auto* name : header) {
      if (!first) out_ << ',';
      out_ << name;
      first = false;
    }
    out_ << '\n';
  }
  CsvWriter& operator<<(double v) { return field(format_real(v)); }
  CsvWriter& operator<<(std::size_t v) { return field(std::to_string(v)); }
  CsvWriter& operator<<(bool v) { return field(v ? "1" : "0"); }
  CsvWriter& operator<<(std::string_view v) { return field(csv_text(std::string(v))); }
  void end_row() {
    out_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return out_.str(); }

 private:
  CsvWriter& field(const std::string& text) {
    if (!fresh_) out_ << ',';
    out_ << text;
    fresh_ = false;
    return *this;
  }
  std::ostringstream out_;
  bool fresh_ = true;
};

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json attribution_json(const std::vector<delaunay::Contribution>& attribution) {
  Json list = Json::array();
  for (const auto& c : attribution) {
    list.push_back({{"index", c.index}, {"weight", number(c.weight)}, {"response", number(c.response)}});
  }
  return list;
}

std::string attribution_text(const std::vector<delaunay::Contribution>& attribution) {
  std::string text;
  for (const auto& c : attribution) {
    if (!text.empty()) text += ';';
    text += std::to_string(c.index) + ':' + format_real(c.weight);
  }
  return text;
}

// ---- minimal SVG line/scatter plotting -----------------------------------

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
  bool markers_only = false;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

std::string render_panel(const Panel& panel, double top) {
  constexpr double left = 70.0;
  constexpr double width = 460.0;
  constexpr double height = 260.0;
  auto tx = [&](double v) { return panel.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return panel.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!panel.log_x || x > 0.0) && (!panel.log_y || y > 0.0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : panel.series) {
    for (const auto& [x, y] : s.points) {
      if (!usable(x, y)) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 - x0 <= 0.0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 0.0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * width; };
  auto py = [&](double v) { return top + 30.0 + height - (ty(v) - y0) / (y1 - y0) * height; };

  std::ostringstream svg;
  const double base = top + 30.0;
  svg << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(top + 18.0) << "\" font-size=\"14\">" << escape(panel.title)
      << "</text>\n";
  svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(base) << "\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  auto tick = [&](double value, bool log) { return fmt(log ? std::pow(10.0, value) : value); };
  svg << "<text x=\"" << fmt(left) << "\" y=\"" << fmt(base + height + 16.0) << "\" font-size=\"10\">"
      << tick(x0, panel.log_x) << "</text>\n";
  svg << "<text x=\"" << fmt(left + width) << "\" y=\"" << fmt(base + height + 16.0)
      << "\" font-size=\"10\" text-anchor=\"end\">" << tick(x1, panel.log_x) << "</text>\n";
  svg << "<text x=\"" << fmt(left - 4.0) << "\" y=\"" << fmt(base + height)
      << "\" font-size=\"10\" text-anchor=\"end\">" << tick(y0, panel.log_y) << "</text>\n";
  svg << "<text x=\"" << fmt(left - 4.0) << "\" y=\"" << fmt(base + 10.0)
      << "\" font-size=\"10\" text-anchor=\"end\">" << tick(y1, panel.log_y) << "</text>\n";
  svg << "<text x=\"" << fmt(left + width / 2) << "\" y=\"" << fmt(base + height + 30.0)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(panel.x_label) << "</text>\n";
  svg << "<text x=\"" << fmt(left - 50.0) << "\" y=\"" << fmt(base + height / 2) << "\" font-size=\"11\">"
      << escape(panel.y_label) << "</text>\n";

  for (std::size_t k = 0; k < panel.series.size(); ++k) {
    const auto& s = panel.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string path;
    for (const auto& [x, y] : s.points) {
      if (!usable(x, y)) continue;
      if (s.markers_only) {
        svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"2\" fill=\"" << color
            << "\"/>\n";
      } else {
        path += (path.empty() ? "" : " ") + fmt(px(x)) + "," + fmt(py(y));
      }
    }
    if (!path.empty()) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
          << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << path << "\"/>\n";
    }
    svg << "<text x=\"" << fmt(left + width + 10.0) << "\" y=\"" << fmt(base + 12.0 + 14.0 * k)
        << "\" font-size=\"10\" fill=\"" << color << "\">" << escape(s.label) << (s.dashed ? " (bound)" : "")
        << "</text>\n";
  }
  return svg.str();
}

std::string render_document(const std::vector<Panel>& panels) {
  constexpr double panel_height = 340.0;
  const double total = std::max<double>(1.0, static_cast<double>(panels.size())) * panel_height;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" << fmt(total) << "\" viewBox=\"0 0 800 "
      << fmt(total) << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"800\" height=\"" << fmt(total) << "\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) svg << render_panel(panels[i], i * panel_height);
  svg << "</svg>\n";
  return svg.str();
}

std::string cell_label(const Aggregate& a) {
  std::ostringstream label;
  label << "d=" << a.d << " w=" << fmt(a.omega) << " a=" << fmt(a.alpha) << (a.rescale ? " rescaled" : "");
  return label.str();
}

}  // namespace

std::string study_records_csv(const StudyReport& report) {
  CsvWriter csv{"d", "n", "omega", "alpha", "rescale", "seed", "method", "regime", "query",
                "true_value", "prediction", "error", "bound", "in_hull", "residual"};
  for (const auto& r : report.records) {
    csv << r.d << r.n << r.omega << r.alpha << r.rescale << std::to_string(r.seed) << to_string(r.method)
        << to_string(r.regime) << r.query << r.true_value << r.prediction << r.error << r.bound << r.in_hull
        << r.residual;
    csv.end_row();
  }
  return csv.str();
}

std::string study_summary_csv(const StudyReport& report) {
  CsvWriter csv{"d", "n", "omega", "alpha", "rescale", "seed", "method", "regime", "count",
                "mean_error", "mean_bound", "violation_rate", "failed", "failure"};
  for (const auto& s : report.summaries) {
    csv << s.d << s.n << s.omega << s.alpha << s.rescale << std::to_string(s.seed) << to_string(s.method)
        << to_string(s.regime) << s.count << s.mean_error << s.mean_bound << s.violation_rate << s.failed
        << std::string_view(s.failure);
    csv.end_row();
  }
  return csv.str();
}

std::string study_aggregates_csv(const StudyReport& report) {
  CsvWriter csv{"d", "n", "omega", "alpha", "rescale", "method", "regime", "seeds", "failed_seeds",
                "mean_error", "mean_bound", "violation_rate"};
  for (const auto& a : report.aggregates) {
    csv << a.d << a.n << a.omega << a.alpha << a.rescale << to_string(a.method) << to_string(a.regime) << a.seeds
        << a.failed_seeds << a.mean_error << a.mean_bound << a.violation_rate;
    csv.end_row();
  }
  return csv.str();
}

std::string hull_records_csv(const StudyReport& report) {
  CsvWriter csv{"d", "n", "seed", "index", "norm", "inside"};
  for (const auto& h : report.hull_records) {
    csv << h.d << h.n << std::to_string(h.seed) << h.index << h.norm << h.inside;
    csv.end_row();
  }
  return csv.str();
}

std::string histogram_csv(const StudyReport& report) {
  CsvWriter csv{"d", "n", "bin", "lower", "upper", "inside", "outside"};
  for (const auto& b : report.histogram) {
    csv << b.d << b.n << b.bin << b.lower << b.upper << b.inside << b.outside;
    csv.end_row();
  }
  return csv.str();
}

std::string hull_fractions_csv(const StudyReport& report) {
  CsvWriter csv{"d", "n", "count", "inside", "fraction"};
  for (const auto& f : report.hull_fractions) {
    csv << f.d << f.n << f.count << f.inside << f.fraction;
    csv.end_row();
  }
  return csv.str();
}

std::string study_json(const StudyReport& report, const StudyConfig& config) {
  Json doc;
  doc["kind"] = std::string(to_string(report.kind));
  doc["config"] = Json::parse(config.to_json());
  Json records = Json::array();
  for (const auto& r : report.records) {
    records.push_back({{"d", r.d}, {"n", r.n}, {"omega", r.omega}, {"alpha", r.alpha}, {"rescale", r.rescale},
                       {"seed", r.seed}, {"method", to_string(r.method)}, {"regime", to_string(r.regime)},
                       {"query", r.query}, {"true_value", number(r.true_value)}, {"prediction", number(r.prediction)},
                       {"error", number(r.error)}, {"bound", number(r.bound)}, {"in_hull", r.in_hull},
                       {"residual", number(r.residual)}});
  }
  doc["records"] = std::move(records);
  Json summaries = Json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"d", s.d}, {"n", s.n}, {"omega", s.omega}, {"alpha", s.alpha}, {"rescale", s.rescale},
                         {"seed", s.seed}, {"method", to_string(s.method)}, {"regime", to_string(s.regime)},
                         {"count", s.count}, {"mean_error", number(s.mean_error)},
                         {"mean_bound", number(s.mean_bound)}, {"violation_rate", number(s.violation_rate)},
                         {"failed", s.failed}, {"failure", s.failure}});
  }
  doc["summaries"] = std::move(summaries);
  Json aggregates = Json::array();
  for (const auto& a : report.aggregates) {
    aggregates.push_back({{"d", a.d}, {"n", a.n}, {"omega", a.omega}, {"alpha", a.alpha}, {"rescale", a.rescale},
                          {"method", to_string(a.method)}, {"regime", to_string(a.regime)}, {"seeds", a.seeds},
                          {"failed_seeds", a.failed_seeds}, {"mean_error", number(a.mean_error)},
                          {"mean_bound", number(a.mean_bound)}, {"violation_rate", number(a.violation_rate)}});
  }
  doc["aggregates"] = std::move(aggregates);
  Json hull = Json::array();
  for (const auto& h : report.hull_records) {
    hull.push_back({{"d", h.d}, {"n", h.n}, {"seed", h.seed}, {"index", h.index}, {"norm", number(h.norm)},
                    {"inside", h.inside}});
  }
  doc["hull_records"] = std::move(hull);
  Json histogram = Json::array();
  for (const auto& b : report.histogram) {
    histogram.push_back({{"d", b.d}, {"n", b.n}, {"bin", b.bin}, {"lower", b.lower}, {"upper", b.upper},
                         {"inside", b.inside}, {"outside", b.outside}});
  }
  doc["histogram"] = std::move(histogram);
  Json fractions = Json::array();
  for (const auto& f : report.hull_fractions) {
    fractions.push_back({{"d", f.d}, {"n", f.n}, {"count", f.count}, {"inside", f.inside}, {"fraction", f.fraction}});
  }
  doc["hull_fractions"] = std::move(fractions);
  return doc.dump(2) + "\n";
}

std::string study_svg(const StudyReport& report) {
  std::vector<Panel> panels;
  if (report.kind == StudyKind::extrapolation_hist) {
    std::map<std::pair<std::size_t, std::size_t>, Panel> groups;
    for (const auto& b : report.histogram) {
      auto& panel = groups[{b.d, b.n}];
      if (panel.series.empty()) {
        panel.title = "hull membership, d=" + std::to_string(b.d) + " n=" + std::to_string(b.n);
        panel.x_label = "|q|";
        panel.y_label = "count";
        panel.series = {{"inside hull", {}}, {"outside hull", {}}};
      }
      const double mid = 0.5 * (b.lower + b.upper);
      panel.series[0].points.emplace_back(mid, static_cast<double>(b.inside));
      panel.series[1].points.emplace_back(mid, static_cast<double>(b.outside));
    }
    for (auto& [key, panel] : groups) panels.push_back(std::move(panel));
    return render_document(panels);
  }
  std::map<std::string, Panel> by_regime;
  std::map<std::string, std::size_t> series_index;
  for (const auto& a : report.aggregates) {
    const std::string regime(to_string(a.regime));
    auto& panel = by_regime[regime];
    panel.title = regime + " queries: mean error (solid) and mean bound (dashed)";
    panel.x_label = "n";
    panel.y_label = "error";
    panel.log_x = true;
    panel.log_y = true;
    const std::string label = std::string(to_string(a.method)) + " " + cell_label(a);
    for (const bool bound : {false, true}) {
      const std::string key = regime + "|" + label + (bound ? "|b" : "|e");
      auto [it, inserted] = series_index.try_emplace(key, panel.series.size());
      if (inserted) panel.series.push_back({label, {}, bound, false});
      panel.series[it->second].points.emplace_back(static_cast<double>(a.n), bound ? a.mean_bound : a.mean_error);
    }
  }
  for (auto& [regime, panel] : by_regime) panels.push_back(std::move(panel));
  return render_document(panels);
}

std::string validation_records_csv(const ValidationReport& report) {
  CsvWriter csv{"index", "method", "true_value", "prediction", "error", "bound", "raw_true_value",
                "raw_prediction", "raw_error", "raw_bound", "in_hull", "residual", "vertices"};
  for (const auto& r : report.records) {
    csv << r.index << to_string(r.method) << r.true_value << r.prediction << r.error << r.bound << r.raw_true_value
        << r.raw_prediction << r.raw_error << r.raw_bound << r.in_hull << r.residual
        << std::string_view(attribution_text(r.attribution));
    csv.end_row();
  }
  return csv.str();
}

std::string validation_summary_csv(const ValidationReport& report) {
  CsvWriter csv{"method", "failed", "failure", "count", "mae", "mean_bound", "violation_rate",
                "shifted_violation_rate", "in_hull_count", "in_hull_fraction", "in_hull_mae",
                "in_hull_mean_bound", "in_hull_violation_rate", "in_hull_shifted_violation_rate", "raw_mae",
                "raw_mean_bound", "relative_mae", "shift"};
  for (const auto& s : report.summaries) {
    csv << to_string(s.method) << s.failed << std::string_view(s.failure) << s.all.count << s.all.mae
        << s.all.mean_bound << s.all.violation_rate << s.all.shifted_violation_rate << s.in_hull.count
        << s.in_hull_fraction << s.in_hull.mae << s.in_hull.mean_bound << s.in_hull.violation_rate
        << s.in_hull.shifted_violation_rate << s.raw_mae << s.raw_mean_bound << s.relative_mae << report.shift;
    csv.end_row();
  }
  return csv.str();
}

std::string validation_json(const ValidationReport& report) {
  auto stats = [](const ValidationStats& s) {
    return Json{{"count", s.count},
                {"mae", number(s.mae)},
                {"mean_bound", number(s.mean_bound)},
                {"violation_rate", number(s.violation_rate)},
                {"shifted_violation_rate", number(s.shifted_violation_rate)}};
  };
  Json doc;
  doc["shift"] = report.shift;
  doc["rescale"] = report.rescale;
  Json summaries = Json::array();
  for (const auto& s : report.summaries) {
    summaries.push_back({{"method", to_string(s.method)}, {"failed", s.failed}, {"failure", s.failure},
                         {"all", stats(s.all)}, {"in_hull", stats(s.in_hull)},
                         {"in_hull_fraction", number(s.in_hull_fraction)}, {"raw_mae", number(s.raw_mae)},
                         {"raw_mean_bound", number(s.raw_mean_bound)}, {"relative_mae", number(s.relative_mae)}});
  }
  doc["summaries"] = std::move(summaries);
  Json records = Json::array();
  for (const auto& r : report.records) {
    records.push_back({{"index", r.index}, {"method", to_string(r.method)}, {"true_value", number(r.true_value)},
                       {"prediction", number(r.prediction)}, {"error", number(r.error)}, {"bound", number(r.bound)},
                       {"raw_true_value", number(r.raw_true_value)}, {"raw_prediction", number(r.raw_prediction)},
                       {"raw_error", number(r.raw_error)}, {"raw_bound", number(r.raw_bound)},
                       {"in_hull", r.in_hull}, {"residual", number(r.residual)},
                       {"vertices", attribution_json(r.attribution)}});
  }
  doc["records"] = std::move(records);
  return doc.dump(2) + "\n";
}

std::string validation_svg(const ValidationReport& report) {
  Panel panel;
  panel.title = "true error versus bound (rescaled units)";
  panel.x_label = "bound";
  panel.y_label = "true error";
  panel.log_x = true;
  panel.log_y = true;
  std::map<int, std::size_t> index;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : report.records) {
    auto [it, inserted] = index.try_emplace(static_cast<int>(r.method), panel.series.size());
    if (inserted) panel.series.push_back({std::string(to_string(r.method)), {}, false, true});
    panel.series[it->second].points.emplace_back(r.bound, r.error);
    for (const double v : {r.bound, r.error}) {
      if (std::isfinite(v) && v > 0.0) lo = std::min(lo, v), hi = std::max(hi, v);
    }
  }
  if (hi > 0.0) panel.series.push_back({"error = bound", {{lo, lo}, {hi, hi}}, false, false});
  return render_document({panel});
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

namespace {

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoFailure, "cannot create output directory " + dir.string());
  }
}

bool wants(const std::vector<Format>& formats, Format f) {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const StudyReport& report, const StudyConfig& config,
                                               const std::vector<Format>& formats,
                                               const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  std::vector<std::pair<std::string, std::string>> files;
  if (wants(formats, Format::csv)) {
    files.emplace_back("records.csv", study_records_csv(report));
    files.emplace_back("summary.csv", study_summary_csv(report));
    files.emplace_back("aggregates.csv", study_aggregates_csv(report));
    files.emplace_back("hull_records.csv", hull_records_csv(report));
    files.emplace_back("histogram.csv", histogram_csv(report));
    files.emplace_back("hull_fractions.csv", hull_fractions_csv(report));
  }
  if (wants(formats, Format::json)) files.emplace_back("report.json", study_json(report, config));
  if (wants(formats, Format::svg)) files.emplace_back("plot.svg", study_svg(report));
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : files) {
    write_text(out_dir / name, text);
    written.push_back(out_dir / name);
  }
  return written;
}

std::vector<std::filesystem::path> emit_report(const ValidationReport& report, const std::vector<Format>& formats,
                                               const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  std::vector<std::pair<std::string, std::string>> files;
  if (wants(formats, Format::csv)) {
    files.emplace_back("records.csv", validation_records_csv(report));
    files.emplace_back("summary.csv", validation_summary_csv(report));
  }
  if (wants(formats, Format::json)) files.emplace_back("report.json", validation_json(report));
  if (wants(formats, Format::svg)) files.emplace_back("plot.svg", validation_svg(report));
  std::vector<std::filesystem::path> written;
  for (const auto& [name, text] : files) {
    write_text(out_dir / name, text);
    written.push_back(out_dir / name);
  }
  return written;
}

}  // namespace interpbound::harness

#include "bellmzi/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace bellmzi {

namespace {

namespace fs = std::filesystem;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

struct Range {
  double lo = INFINITY, hi = -INFINITY;
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) {
      const double pad = std::max(std::abs(lo) * 0.1, 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

// Tick positions at 1, 2 or 5 times a power of ten.
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool line = true;
  bool markers = true;
};

class Canvas {
 public:
  static constexpr int kWidth = 640, kHeight = 440;
  static constexpr int kLeft = 70, kRight = 150, kTop = 40, kBottom = 55;

  explicit Canvas(const std::string& title) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
         << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
         << "\" fill=\"white\"/>\n"
         << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    if (!title.empty())
      out_ << "<text x=\"" << (kLeft + plot_width() / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
           << escape_xml(title) << "</text>\n";
  }

  static int plot_width() { return kWidth - kLeft - kRight; }
  static int plot_height() { return kHeight - kTop - kBottom; }

  void axes(Range x, Range y, const std::string& x_label, const std::string& y_label) {
    x.settle();
    y.settle();
    x_ = x;
    y_ = y;
    out_ << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_width() << "\" height=\""
         << plot_height() << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ticks(x.lo, x.hi)) {
      const std::string px = fixed(sx(t));
      out_ << "<line x1=\"" << px << "\" y1=\"" << (kTop + plot_height()) << "\" x2=\"" << px << "\" y2=\""
           << (kTop + plot_height() + 5) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << px << "\" y=\"" << (kTop + plot_height() + 18)
           << "\" text-anchor=\"middle\">" << short_number(t) << "</text>\n";
    }
    for (double t : ticks(y.lo, y.hi)) {
      const std::string py = fixed(sy(t));
      out_ << "<line x1=\"" << (kLeft - 5) << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\"" << py
           << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << (kLeft - 8) << "\" y=\"" << py << "\" text-anchor=\"end\" dy=\"4\">"
           << short_number(t) << "</text>\n";
    }
    out_ << "<text x=\"" << (kLeft + plot_width() / 2) << "\" y=\"" << (kHeight - 12)
         << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n"
         << "<text transform=\"translate(18," << (kTop + plot_height() / 2)
         << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(y_label) << "</text>\n";
  }

  void series(const Series& s, std::size_t index) {
    const char* c = colour(index);
    if (s.line && s.points.size() > 1) {
      out_ << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i)
        out_ << (i ? " " : "") << fixed(sx(s.points[i].first)) << "," << fixed(sy(s.points[i].second));
      out_ << "\"/>\n";
    }
    if (s.markers)
      for (const auto& [x, y] : s.points)
        out_ << "<circle cx=\"" << fixed(sx(x)) << "\" cy=\"" << fixed(sy(y)) << "\" r=\"3\" fill=\"" << c
             << "\"/>\n";
    const int ly = kTop + 10 + 18 * static_cast<int>(index);
    out_ << "<rect x=\"" << (kWidth - kRight + 12) << "\" y=\"" << (ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
         << c << "\"/>\n"
         << "<text x=\"" << (kWidth - kRight + 28) << "\" y=\"" << ly << "\">" << escape_xml(s.label) << "</text>\n";
  }

  void bar(double x, double width, double y, std::size_t index) {
    const double left = sx(x - width / 2), right = sx(x + width / 2);
    const double top = sy(std::max(y, 0.0)), bottom = sy(std::min(y, 0.0));
    out_ << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(right - left)
         << "\" height=\"" << fixed(bottom - top) << "\" fill=\"" << colour(index) << "\"/>\n";
  }

  void raw(const std::string& s) { out_ << s; }

  std::string finish() {
    out_ << "</g>\n</svg>\n";
    return out_.str();
  }

  double sx(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * plot_width(); }
  double sy(double y) const { return kTop + (y_.hi - y) / (y_.hi - y_.lo) * plot_height(); }

 private:
  std::ostringstream out_;
  Range x_, y_;
};

std::string line_plot(const PlotSpec& spec, const std::vector<Series>& series,
                      const std::string& x_label, const std::string& y_label) {
  Range x, y;
  for (const auto& s : series)
    for (const auto& [px, py] : s.points) {
      x.add(px);
      y.add(py);
    }
  Canvas canvas(spec.title);
  canvas.axes(x, y, spec.x_label.empty() ? x_label : spec.x_label, spec.y_label.empty() ? y_label : spec.y_label);
  for (std::size_t i = 0; i < series.size(); ++i) canvas.series(series[i], i);
  return canvas.finish();
}

const OptimizationRun& pick_run(const std::vector<CampaignRecord>& records, int n) {
  const OptimizationRun* best = nullptr;
  for (const auto& r : records)
    for (const auto& run : r.runs) {
      if (run.failure) continue;
      if (n > 0 ? run.n == n : (!best || run.n > best->n)) best = &run;
    }
  if (!best) throw InvalidArgument("no run" + (n > 0 ? " with n=" + std::to_string(n) : std::string()) +
                                   " in the plot inputs");
  return *best;
}

const ViolationEigenpair& pick_eigen(const std::vector<CampaignRecord>& records, int n) {
  const ViolationEigenpair* best = nullptr;
  for (const auto& r : records)
    for (const auto& e : r.eigen)
      if (n > 0 ? e.n == n : (!best || e.n > best->n)) best = &e;
  if (!best) throw InvalidArgument("no eigenvector analysis" +
                                   (n > 0 ? " with n=" + std::to_string(n) : std::string()) + " in the plot inputs");
  return *best;
}

std::string render_curve(const PlotSpec& spec, const std::vector<CampaignRecord>& records) {
  std::vector<Series> series;
  Range n_range;
  for (const auto& r : records) {
    if (r.runs.empty()) continue;
    Series s{to_string(r.kind), {}, true, true};
    for (const auto& run : r.runs)
      if (!run.failure) {
        s.points.emplace_back(run.n, run.violation);
        n_range.add(run.n);
      }
    series.push_back(std::move(s));
  }
  for (const auto& r : records) {
    if (!r.fit) continue;
    Series s{"fit (" + to_string(r.fit->model) + ")", {}, true, false};
    n_range.settle();
    const int samples = 100;
    for (int i = 0; i <= samples; ++i) {
      const double n = n_range.lo + (n_range.hi - n_range.lo) * i / samples;
      s.points.emplace_back(n, r.fit->predict(n));
    }
    series.push_back(std::move(s));
  }
  if (series.empty()) throw InvalidArgument("curve plot needs records with runs or fits");
  return line_plot(spec, series, "n", "violation D(n)");
}

std::string render_displacements(const PlotSpec& spec, const std::vector<CampaignRecord>& records) {
  const OptimizationRun& run = pick_run(records, spec.n);
  Series b{"beta", {}, false, true}, g{"gamma", {}, false, true};
  for (std::size_t i = 0; i < run.settings.betas.size(); ++i) b.points.emplace_back(i + 1, run.settings.betas[i]);
  for (std::size_t i = 0; i < run.settings.gammas.size(); ++i) g.points.emplace_back(i + 1, run.settings.gammas[i]);
  return line_plot(spec, {b, g}, "setting index i (n=" + std::to_string(run.n) + ")", "displacement");
}

std::string render_violation_vs_r(const PlotSpec& spec, const std::vector<CampaignRecord>& records) {
  std::map<int, Series> by_n;
  for (const auto& r : records)
    for (const auto& run : r.runs)
      if (run.fixed_r && !run.failure) {
        auto& s = by_n[run.n];
        s.label = "n=" + std::to_string(run.n);
        s.points.emplace_back(*run.fixed_r, run.violation);
      }
  if (by_n.empty()) throw InvalidArgument("violation_vs_r plot needs fixed-r TMSV runs");
  std::vector<Series> series;
  for (auto& [n, s] : by_n) {
    std::sort(s.points.begin(), s.points.end());
    series.push_back(std::move(s));
  }
  return line_plot(spec, series, "squeezing r", "violation");
}

std::string render_schmidt(const PlotSpec& spec, const std::vector<CampaignRecord>& records) {
  const ViolationEigenpair& e = pick_eigen(records, spec.n);
  Range x, y;
  x.add(0.4);
  x.add(e.schmidt.size() + 0.6);
  y.add(0.0);
  for (double v : e.schmidt) y.add(v);
  Canvas canvas(spec.title);
  canvas.axes(x, y, spec.x_label.empty() ? "j (n=" + std::to_string(e.n) + ")" : spec.x_label,
              spec.y_label.empty() ? "Schmidt coefficient" : spec.y_label);
  for (std::size_t j = 0; j < e.schmidt.size(); ++j) canvas.bar(j + 1.0, 0.7, e.schmidt[j], 0);
  return canvas.finish();
}

// Diverging blue-white-red scale on [-1, 1].
std::string heat_colour(double t) {
  t = std::clamp(t, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (t >= 0) {
    g = b = static_cast<int>(std::lround(255 * (1 - t)));
  } else {
    r = g = static_cast<int>(std::lround(255 * (1 + t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string render_heatmap(const PlotSpec& spec, const std::vector<CampaignRecord>& records) {
  const ViolationEigenpair& e = pick_eigen(records, spec.n);
  const int n = e.n;
  if (e.vector_coherent.size() != static_cast<Eigen::Index>(n) * n)
    throw InvalidArgument("eigenvector analysis lacks coherent-basis coefficients");
  double scale = 0.0;
  for (Eigen::Index i = 0; i < e.vector_coherent.size(); ++i)
    scale = std::max(scale, std::abs(e.vector_coherent(i).real()));
  if (scale == 0.0) scale = 1.0;
  Canvas canvas(spec.title);
  Range x, y;
  x.add(0.5);
  x.add(n + 0.5);
  y.add(0.5);
  y.add(n + 0.5);
  canvas.axes(x, y, spec.x_label.empty() ? "gamma index j" : spec.x_label,
              spec.y_label.empty() ? "beta index i" : spec.y_label);
  std::ostringstream cells;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = e.vector_coherent(static_cast<Eigen::Index>(i) * n + j).real();
      const double left = canvas.sx(j + 0.5), right = canvas.sx(j + 1.5);
      const double top = canvas.sy(i + 1.5), bottom = canvas.sy(i + 0.5);
      cells << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(right - left)
            << "\" height=\"" << fixed(bottom - top) << "\" fill=\"" << heat_colour(v / scale)
            << "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
    }
  const int bar_x = Canvas::kWidth - Canvas::kRight + 20;
  const int steps = 20;
  for (int k = 0; k < steps; ++k) {
    const double t = 1.0 - 2.0 * (k + 0.5) / steps;
    cells << "<rect x=\"" << bar_x << "\" y=\"" << (Canvas::kTop + k * 10) << "\" width=\"14\" height=\"10\" fill=\""
          << heat_colour(t) << "\"/>\n";
  }
  cells << "<text x=\"" << (bar_x + 20) << "\" y=\"" << (Canvas::kTop + 8) << "\">" << short_number(scale)
        << "</text>\n<text x=\"" << (bar_x + 20) << "\" y=\"" << (Canvas::kTop + steps * 10) << "\">"
        << short_number(-scale) << "</text>\n";
  canvas.raw(cells.str());
  return canvas.finish();
}

std::vector<CampaignRecord> load_inputs(const PlotSpec& spec) {
  std::vector<CampaignRecord> records;
  for (const auto& p : spec.inputs) records.push_back(load(p));
  return records;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::displacements: return "displacements";
    case PlotKind::curve: return "curve";
    case PlotKind::eigvec_heatmap: return "eigvec_heatmap";
    case PlotKind::schmidt_bars: return "schmidt_bars";
    case PlotKind::violation_vs_r: return "violation_vs_r";
  }
  return "unknown";
}

PlotKind plot_kind_from_string(const std::string& s) {
  for (auto k : {PlotKind::displacements, PlotKind::curve, PlotKind::eigvec_heatmap, PlotKind::schmidt_bars,
                 PlotKind::violation_vs_r})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown plot kind '" + s + "'");
}

void PlotSpec::validate() const {
  if (inputs.empty()) throw InvalidArgument("plot spec lists no input records");
  if (output.empty()) throw InvalidArgument("plot spec has no output path");
  if (n < 0) throw InvalidArgument("plot spec n must be >= 0");
}

PlotSpec load_plot_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open plot spec " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("plot spec " + path.string() + " is not valid JSON: " + e.what());
  }
  const fs::path base = path.parent_path();
  const auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  PlotSpec spec;
  try {
    spec.kind = plot_kind_from_string(j.at("kind").get<std::string>());
    for (const auto& p : j.at("inputs")) spec.inputs.push_back(resolve(p.get<std::string>()));
    spec.output = resolve(j.at("output").get<std::string>());
    spec.title = j.value("title", "");
    spec.x_label = j.value("x_label", "");
    spec.y_label = j.value("y_label", "");
    spec.n = j.value("n", 0);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("plot spec " + path.string() + ": " + e.what());
  }
  spec.validate();
  return spec;
}

std::string render_svg(const PlotSpec& spec, const std::vector<CampaignRecord>& records) {
  switch (spec.kind) {
    case PlotKind::curve: return render_curve(spec, records);
    case PlotKind::displacements: return render_displacements(spec, records);
    case PlotKind::violation_vs_r: return render_violation_vs_r(spec, records);
    case PlotKind::schmidt_bars: return render_schmidt(spec, records);
    case PlotKind::eigvec_heatmap: return render_heatmap(spec, records);
  }
  throw InvalidArgument("unknown plot kind");
}

void emit_svg(const PlotSpec& spec) {
  spec.validate();
  write_file_atomic(spec.output, render_svg(spec, load_inputs(spec)));
}

std::string CsvTable::text() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_cell(header[i]);
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\n";
  }
  return out;
}

std::vector<CsvTable> csv_tables(const CampaignRecord& record) {
  std::vector<CsvTable> out;
  const auto n_str = [](int n) { return std::to_string(n); };
  switch (record.kind) {
    case RecordKind::general:
    case RecordKind::ecs:
    case RecordKind::tmsv: {
      const std::string k = to_string(record.kind);
      CsvTable curve{k + "_violation_curve.csv", {"n", "violation", "quantum_gap", "classical_bound"}, {}};
      CsvTable disp{k + "_displacements.csv", {"n", "index", "beta", "gamma"}, {}};
      CsvTable ecs{"ecs_state_parameters.csv", {"n", "alpha", "a"}, {}};
      CsvTable tmsv{"tmsv_squeezing.csv", {"n", "r"}, {}};
      for (const auto& run : record.runs) {
        if (run.failure) continue;
        curve.rows.push_back({n_str(run.n), format_real(run.violation),
                              format_real(quantum_bound(run.n) - classical_bound(run.n)),
                              format_real(classical_bound(run.n))});
        for (std::size_t i = 0; i < run.settings.betas.size(); ++i)
          disp.rows.push_back({n_str(run.n), std::to_string(i + 1), format_real(run.settings.betas[i]),
                               format_real(run.settings.gammas[i])});
        ecs.rows.push_back({n_str(run.n), format_real(run.settings.alpha), format_real(run.settings.a)});
        tmsv.rows.push_back({n_str(run.n), format_real(run.settings.r)});
      }
      out.push_back(std::move(curve));
      out.push_back(std::move(disp));
      if (record.kind == RecordKind::ecs) out.push_back(std::move(ecs));
      if (record.kind == RecordKind::tmsv) out.push_back(std::move(tmsv));
      break;
    }
    case RecordKind::tmsv_r_scan: {
      CsvTable t{"tmsv_violation_vs_r.csv", {"n", "r", "violation"}, {}};
      for (const auto& run : record.runs)
        if (!run.failure && run.fixed_r)
          t.rows.push_back({n_str(run.n), format_real(*run.fixed_r), format_real(run.violation)});
      out.push_back(std::move(t));
      break;
    }
    case RecordKind::eigvec: {
      CsvTable coeffs{"eigvec_coherent_coefficients.csv", {"n", "row", "col", "re", "im"}, {}};
      CsvTable schmidt{"eigvec_schmidt_spectrum.csv", {"n", "index", "coefficient"}, {}};
      for (const auto& e : record.eigen) {
        for (Eigen::Index k = 0; k < e.vector_coherent.size(); ++k)
          coeffs.rows.push_back({n_str(e.n), std::to_string(k / e.n + 1), std::to_string(k % e.n + 1),
                                 format_real(e.vector_coherent(k).real()),
                                 format_real(e.vector_coherent(k).imag())});
        for (std::size_t j = 0; j < e.schmidt.size(); ++j)
          schmidt.rows.push_back({n_str(e.n), std::to_string(j + 1), format_real(e.schmidt[j])});
      }
      out.push_back(std::move(coeffs));
      out.push_back(std::move(schmidt));
      break;
    }
    case RecordKind::fit: {
      if (!record.fit) break;
      const FitResult& f = *record.fit;
      CsvTable t{"fit_" + to_string(f.model) + "_parameters.csv", {"parameter", "value", "std_error"}, {}};
      for (std::size_t i = 0; i < f.names.size(); ++i) {
        std::string err;
        for (std::size_t k = 0; k < f.free_names.size(); ++k)
          if (f.free_names[k] == f.names[i])
            err = format_real(std::sqrt(std::max(0.0, f.covariance(static_cast<Eigen::Index>(k),
                                                                   static_cast<Eigen::Index>(k)))));
        t.rows.push_back({f.names[i], format_real(f.values[i]), err});
      }
      out.push_back(std::move(t));
      break;
    }
  }
  return out;
}

std::vector<fs::path> emit_csv(const CampaignRecord& record, const fs::path& dir) {
  std::vector<fs::path> written;
  for (const auto& t : csv_tables(record)) {
    write_file_atomic(dir / t.name, t.text());
    written.push_back(dir / t.name);
  }
  return written;
}

std::vector<fs::path> report(const fs::path& in, const fs::path& out) {
  if (!fs::is_directory(in)) throw IoFailure(in.string() + " is not a directory");
  std::vector<fs::path> files;
  const fs::path out_abs = fs::weakly_canonical(out);
  for (const auto& entry : fs::recursive_directory_iterator(in)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    const fs::path p = fs::weakly_canonical(entry.path());
    if (std::mismatch(out_abs.begin(), out_abs.end(), p.begin(), p.end()).first == out_abs.end()) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, CsvTable> merged;
  std::map<int, std::map<std::string, double>> comparison;
  std::map<std::string, bool> curve_kinds;
  for (const auto& f : files) {
    const CampaignRecord record = load(f);
    for (auto& t : csv_tables(record)) {
      auto [it, fresh] = merged.try_emplace(t.name, t);
      if (!fresh) it->second.rows.insert(it->second.rows.end(), t.rows.begin(), t.rows.end());
    }
    if (record.kind == RecordKind::general || record.kind == RecordKind::ecs || record.kind == RecordKind::tmsv) {
      curve_kinds[to_string(record.kind)] = true;
      for (const auto& run : record.runs)
        if (!run.failure) comparison[run.n][to_string(record.kind)] = run.violation;
    }
  }
  if (curve_kinds.size() > 1) {
    CsvTable t{"comparison_violation_curves.csv", {"n", "general", "ecs", "tmsv"}, {}};
    for (const auto& [n, values] : comparison) {
      std::vector<std::string> row{std::to_string(n)};
      for (const char* k : {"general", "ecs", "tmsv"}) {
        const auto it = values.find(k);
        row.push_back(it == values.end() ? "" : format_real(it->second));
      }
      t.rows.push_back(std::move(row));
    }
    merged.emplace(t.name, std::move(t));
  }
  std::vector<fs::path> written;
  for (const auto& [name, t] : merged) {
    write_file_atomic(out / name, t.text());
    written.push_back(out / name);
  }
  return written;
}

}  // namespace bellmzi

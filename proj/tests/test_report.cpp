#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "bellmzi/report.hpp"

using namespace bellmzi;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bellmzi_report_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

OptimizationRun fake_run(Kind kind, int n, double violation) {
  OptimizationRun run;
  run.kind = kind;
  run.n = n;
  run.violation = violation;
  run.best_value = violation + classical_bound(n);
  for (int i = 0; i < n; ++i) {
    run.settings.betas.push_back(0.3 * i);
    run.settings.gammas.push_back(0.3 * i + 0.1);
  }
  run.settings.alpha = 1.2;
  run.settings.a = 0.8;
  run.best_point = RVector::Zero(2);
  return run;
}

CampaignRecord fake_curve(Kind kind, int first, int last) {
  CampaignRecord r;
  r.kind = record_kind_for(kind);
  r.n_first = first;
  r.n_last = last;
  for (int n = first; n <= last; ++n) r.runs.push_back(fake_run(kind, n, 1.3 - 2.2 * std::exp(-0.75 * n)));
  r.created_at = "2024-01-01T00:00:00Z";
  return r;
}

const CsvTable& table(const std::vector<CsvTable>& ts, const std::string& name) {
  for (const auto& t : ts)
    if (t.name == name) return t;
  FAIL("missing table " << name);
  return ts.front();
}

}  // namespace

TEST_CASE("curve csv") {
  const auto tables = csv_tables(fake_curve(Kind::general, 2, 8));
  const auto& curve = table(tables, "general_violation_curve.csv");
  CHECK(curve.header == std::vector<std::string>{"n", "violation", "quantum_gap", "classical_bound"});
  CHECK(curve.rows.size() == 7);
  const std::string text = curve.text();
  CHECK(std::count(text.begin(), text.end(), '\n') == 8);
  CHECK(table(tables, "general_displacements.csv").rows.size() == 2 + 3 + 4 + 5 + 6 + 7 + 8);
}

TEST_CASE("ecs and fit tables") {
  const auto ecs = csv_tables(fake_curve(Kind::ecs, 2, 4));
  CHECK(table(ecs, "ecs_state_parameters.csv").rows.size() == 3);

  CampaignRecord fit;
  fit.kind = RecordKind::fit;
  FitData d;
  for (int n = 2; n <= 8; ++n) d.emplace_back(n, 1.3 - 2.2 * std::exp(-0.75 * n) + 1e-4 * (n % 3));
  fit.fit = fit_saturation(d, FitModel::anchored);
  const auto& params = table(csv_tables(fit), "fit_anchored_parameters.csv");
  CHECK(params.header == std::vector<std::string>{"parameter", "value", "std_error"});
  CHECK(params.rows.size() == 3);
}

TEST_CASE("format_real round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0}) CHECK(std::stod(format_real(v)) == v);
}

TEST_CASE("svg output") {
  const auto dir = scratch_dir("svg");
  save(fake_curve(Kind::ecs, 2, 7), dir / "ecs.json");
  PlotSpec spec;
  spec.kind = PlotKind::displacements;
  spec.inputs = {dir / "ecs.json"};
  spec.output = dir / "d.svg";
  spec.n = 7;
  const std::vector<CampaignRecord> records{load(dir / "ecs.json")};
  const std::string a = render_svg(spec, records);
  CHECK(a == render_svg(spec, records));
  CHECK(a.find("<svg") != std::string::npos);
  std::size_t circles = 0;
  for (auto p = a.find("<circle"); p != std::string::npos; p = a.find("<circle", p + 1)) ++circles;
  CHECK(circles == 14);
  CHECK(a.find(">beta<") != std::string::npos);
  CHECK(a.find(">gamma<") != std::string::npos);

  std::ofstream(dir / "spec.json") << R"({"kind": "curve", "inputs": ["ecs.json"], "output": "c.svg", "title": "t"})";
  const auto loaded = load_plot_spec(dir / "spec.json");
  CHECK(loaded.output == dir / "c.svg");
  emit_svg(loaded);
  CHECK(fs::exists(dir / "c.svg"));

  spec.n = 11;
  CHECK_THROWS_AS(render_svg(spec, records), InvalidArgument);
  CHECK_THROWS_AS(plot_kind_from_string("pie"), InvalidArgument);
}

TEST_CASE("report regenerates tables from records") {
  const auto dir = scratch_dir("report");
  save(fake_curve(Kind::general, 2, 5), dir / "general" / "2-5_0.json");
  save(fake_curve(Kind::tmsv, 2, 5), dir / "tmsv" / "2-5_0.json");
  const auto written = report(dir, dir / "report");
  CHECK(fs::exists(dir / "report" / "comparison_violation_curves.csv"));
  CHECK(fs::exists(dir / "report" / "tmsv_squeezing.csv"));
  const auto again = report(dir, dir / "report");
  CHECK(written == again);
}

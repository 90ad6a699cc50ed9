#include "bellmzi/cli.hpp"

#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bellmzi/families.hpp"
#include "bellmzi/report.hpp"
#include "bellmzi/spectral.hpp"
#include "bellmzi/store.hpp"
#include "bellmzi/validate.hpp"

namespace bellmzi {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class ValidationFailed : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::uint64_t seed = 0;
  int restarts = 300;
  std::string out_path;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
  sub->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  sub->add_option("--restarts", c.restarts, "stage-1 restarts")->capture_default_str()->check(CLI::PositiveNumber);
  if (with_out) sub->add_option("--out", c.out_path, "output record path");
  sub->add_flag("--quiet", c.quiet, "suppress progress output");
}

OptimizerConfig config_from(const Common& c) {
  OptimizerConfig cfg;
  cfg.seed = c.seed;
  cfg.restarts = c.restarts;
  return cfg;
}

ProgressSink progress_to(std::ostream& err, bool quiet) {
  if (quiet) return {};
  return [&err](const ProgressEvent& e) {
    const bool last = e.restart + 1 == e.restarts;
    if (e.stage == Stage::first && (e.restart + 1) % 50 != 0 && !last) return;
    err << "[" << to_string(e.kind) << " n=" << e.n << "] " << to_string(e.stage) << " stage";
    if (e.restart >= 0) err << " restart " << (e.restart + 1) << "/" << e.restarts;
    err << " best " << std::setprecision(10) << e.best_value << "\n";
  };
}

fs::path output_path(const Common& c, const CampaignRecord& r) {
  return c.out_path.empty() ? default_record_path(r) : fs::path(c.out_path);
}

void attach_eigen(CampaignRecord& r, std::ostream& err) {
  for (const auto& run : r.runs) {
    if (run.failure || run.kind != Kind::general) continue;
    try {
      r.eigen.push_back(analyze_settings(DisplacementSequence::real(run.settings.betas),
                                         DisplacementSequence::real(run.settings.gammas)));
    } catch (const Error& e) {
      err << "warning: no eigenvector analysis for n=" << run.n << ": " << e.what() << "\n";
    }
  }
}

json run_summary(const OptimizationRun& run) {
  json j = {{"n", run.n}, {"violation", run.violation}, {"value", run.best_value}};
  if (run.fixed_r) j["r"] = *run.fixed_r;
  if (run.failure) j["failure"] = *run.failure;
  return j;
}

void finish_record(CampaignRecord& r, const Common& c, std::ostream& out) {
  r.created_at = timestamp_now();
  const fs::path path = output_path(c, r);
  save(r, path);
  json runs = json::array();
  for (const auto& run : r.runs) runs.push_back(run_summary(run));
  out << json{{"path", path.string()}, {"kind", to_string(r.kind)}, {"checksum", record_checksum(r)},
              {"runs", runs}}
             .dump()
      << "\n";
  for (const auto& run : r.runs)
    if (run.failure) throw ValidationFailed("run n=" + std::to_string(run.n) + " failed: " + *run.failure);
}

void print_eigen(const ViolationEigenpair& e, std::ostream& out) {
  out << "n=" << e.n << " value=" << format_real(e.value) << " violation=" << format_real(e.violation) << "\n";
  out << "coherent-basis coefficients (row i: beta_i, column j: gamma_j)\n";
  for (int i = 0; i < e.n; ++i) {
    for (int j = 0; j < e.n; ++j) {
      const Complex c = e.vector_coherent(static_cast<Eigen::Index>(i) * e.n + j);
      out << (j ? " " : "") << format_real(c.real());
      if (c.imag() != 0.0) out << (c.imag() > 0 ? "+" : "") << format_real(c.imag()) << "i";
    }
    out << "\n";
  }
  out << "schmidt";
  for (double s : e.schmidt) out << " " << format_real(s);
  out << "\n";
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chained Bell violations with interferometric displacement measurements", "bellmzi"};
  app.require_subcommand(1);
  std::function<void()> action;

  // optimize
  Common opt;
  std::string opt_kind;
  int opt_n = 0, opt_n_last = 0;
  auto* optimize_cmd = app.add_subcommand("optimize", "maximize the violation for a state class");
  optimize_cmd->add_option("kind", opt_kind, "general | ecs | tmsv")
      ->required()
      ->check(CLI::IsMember({"general", "ecs", "tmsv"}));
  optimize_cmd->add_option("--n", opt_n, "chain length")->required()->check(CLI::Range(kMinChain, kMaxChain));
  optimize_cmd->add_option("--n-last", opt_n_last, "last chain length of a curve (default: --n)")
      ->check(CLI::Range(kMinChain, kMaxChain));
  add_common(optimize_cmd, opt);
  optimize_cmd->callback([&] {
    action = [&] {
      const Kind kind = kind_from_string(opt_kind);
      const int last = opt_n_last ? opt_n_last : opt_n;
      CampaignRecord r;
      r.kind = record_kind_for(kind);
      r.n_first = opt_n;
      r.n_last = last;
      r.config = config_from(opt);
      r.runs = violation_curve(kind, opt_n, last, r.config, progress_to(err, opt.quiet));
      if (kind == Kind::general) attach_eigen(r, err);
      finish_record(r, opt, out);
    };
  });

  // scan tmsv-r
  Common scan;
  std::string scan_target;
  int scan_n = 0, scan_n_last = 0, scan_steps = 16;
  double r_min = 0.0, r_max = kMaxSqueezing;
  auto* scan_cmd = app.add_subcommand("scan", "violation at fixed squeezing over a grid of r");
  scan_cmd->add_option("target", scan_target, "tmsv-r")->required()->check(CLI::IsMember({"tmsv-r"}));
  scan_cmd->add_option("--n", scan_n, "chain length")->required()->check(CLI::Range(kMinChain, kMaxChain));
  scan_cmd->add_option("--n-last", scan_n_last, "last chain length (default: --n)")
      ->check(CLI::Range(kMinChain, kMaxChain));
  scan_cmd->add_option("--r-min", r_min)->capture_default_str()->check(CLI::Range(0.0, kMaxSqueezing));
  scan_cmd->add_option("--r-max", r_max)->capture_default_str()->check(CLI::Range(0.0, kMaxSqueezing));
  scan_cmd->add_option("--steps", scan_steps)->capture_default_str()->check(CLI::PositiveNumber);
  add_common(scan_cmd, scan);
  scan_cmd->callback([&] {
    action = [&] {
      if (r_min > r_max) throw InvalidArgument("--r-min exceeds --r-max");
      const int last = scan_n_last ? scan_n_last : scan_n;
      if (last < scan_n) throw InvalidArgument("--n-last is below --n");
      CampaignRecord r;
      r.kind = RecordKind::tmsv_r_scan;
      r.n_first = scan_n;
      r.n_last = last;
      r.config = config_from(scan);
      const auto rs = linspace(r_min, r_max, scan_steps);
      for (int n = scan_n; n <= last; ++n)
        for (auto& run : tmsv_r_scan(n, rs, r.config, progress_to(err, scan.quiet))) r.runs.push_back(std::move(run));
      finish_record(r, scan, out);
    };
  });

  // analyze eigvec
  Common analyze;
  std::string analyze_target, analyze_in;
  int analyze_n = 0;
  auto* analyze_cmd = app.add_subcommand("analyze", "eigenvector structure of stored optima");
  analyze_cmd->add_option("target", analyze_target, "eigvec")->required()->check(CLI::IsMember({"eigvec"}));
  analyze_cmd->add_option("--in", analyze_in, "general record")->required();
  analyze_cmd->add_option("--n", analyze_n, "restrict to one chain length");
  analyze_cmd->add_option("--out", analyze.out_path, "output record path");
  analyze_cmd->callback([&] {
    action = [&] {
      const CampaignRecord src = load(analyze_in);
      if (src.kind != RecordKind::general) throw InvalidArgument("analyze eigvec needs a general record");
      CampaignRecord r;
      r.kind = RecordKind::eigvec;
      r.config = src.config;
      r.source = analyze_in;
      for (const auto& run : src.runs)
        if (!run.failure && (analyze_n == 0 || run.n == analyze_n)) r.runs.push_back(run);
      if (r.runs.empty()) throw InvalidArgument("no usable run" + (analyze_n ? " with n=" + std::to_string(analyze_n) : std::string()));
      r.n_first = r.runs.front().n;
      r.n_last = r.runs.back().n;
      for (const auto& run : r.runs) {
        r.n_first = std::min(r.n_first, run.n);
        r.n_last = std::max(r.n_last, run.n);
      }
      for (const auto& run : r.runs) {
        r.eigen.push_back(analyze_settings(DisplacementSequence::real(run.settings.betas),
                                           DisplacementSequence::real(run.settings.gammas)));
        print_eigen(r.eigen.back(), out);
      }
      r.created_at = timestamp_now();
      const fs::path path = output_path(analyze, r);
      save(r, path);
      out << json{{"path", path.string()}, {"kind", "eigvec"}, {"checksum", record_checksum(r)}}.dump() << "\n";
    };
  });

  // validate closed-forms | dephased
  Common val;
  std::string val_target;
  int samples = 100, val_n = 0;
  auto* validate_cmd = app.add_subcommand("validate", "oracle cross-checks");
  validate_cmd->add_option("target", val_target, "closed-forms | dephased")
      ->required()
      ->check(CLI::IsMember({"closed-forms", "dephased"}));
  validate_cmd->add_option("--samples", samples)->capture_default_str()->check(CLI::PositiveNumber);
  validate_cmd->add_option("--n", val_n, "chain length (dephased)")->check(CLI::Range(kMinChain, kMaxChain));
  add_common(validate_cmd, val, false);
  validate_cmd->callback([&] {
    action = [&] {
      if (val_target == "closed-forms") {
        const auto check = validate_closed_forms(samples, val.seed);
        out << json{{"samples", check.samples},
                    {"ecs_max_error", check.ecs_max_error},
                    {"tmsv_max_error", check.tmsv_max_error},
                    {"overlap_max_error", check.overlap_max_error},
                    {"gram_max_error", check.gram_max_error},
                    {"passed", check.passed()}}
                   .dump()
            << "\n";
        if (!check.passed()) throw ValidationFailed("closed forms disagree with the Fock oracle");
        return;
      }
      if (val_n == 0) throw InvalidArgument("validate dephased needs --n");
      const auto run = staged_general(val_n, config_from(val), progress_to(err, val.quiet));
      const auto check = validate_dephased(run);
      out << json{{"n", check.n},
                  {"synchronized_value", check.synchronized_value},
                  {"fock_value", check.fock_value},
                  {"dephased_value", check.dephased_value},
                  {"classical_bound", check.classical_bound},
                  {"violates", check.violates()},
                  {"dephased_classical", check.classical()}}
                 .dump()
          << "\n";
      if (!check.classical()) throw ValidationFailed("phase-averaged evaluation exceeds the classical bound");
      if (!check.violates()) throw ValidationFailed("synchronized optimum does not violate");
    };
  });

  // fit
  Common fit_opts;
  std::string fit_in, fit_model = "anchored";
  int fit_n_min = 0, fit_n_max = 0;
  auto* fit_cmd = app.add_subcommand("fit", "saturation fit of a violation curve");
  fit_cmd->add_option("--in", fit_in, "curve record")->required();
  fit_cmd->add_option("--model", fit_model)->capture_default_str()->check(CLI::IsMember({"anchored", "three"}));
  fit_cmd->add_option("--n-min", fit_n_min, "smallest n used");
  fit_cmd->add_option("--n-max", fit_n_max, "largest n used");
  fit_cmd->add_option("--out", fit_opts.out_path, "output record path");
  fit_cmd->callback([&] {
    action = [&] {
      const CampaignRecord src = load(fit_in);
      FitData data;
      for (const auto& run : src.runs)
        if (!run.failure && run.n >= fit_n_min && (fit_n_max == 0 || run.n <= fit_n_max))
          data.emplace_back(run.n, run.violation);
      const FitResult f = fit_saturation(data, fit_model_from_string(fit_model));
      for (std::size_t i = 0; i < f.names.size(); ++i)
        out << f.names[i] << " = " << format_real(f.values[i]) << "\n";
      out << "covariance (" ;
      for (std::size_t i = 0; i < f.free_names.size(); ++i) out << (i ? ", " : "") << f.free_names[i];
      out << ")\n";
      for (Eigen::Index r = 0; r < f.covariance.rows(); ++r) {
        for (Eigen::Index c = 0; c < f.covariance.cols(); ++c) out << (c ? " " : "") << format_real(f.covariance(r, c));
        out << "\n";
      }
      out << "residual_norm = " << format_real(f.residual_norm) << "\n";
      CampaignRecord r;
      r.kind = RecordKind::fit;
      r.config = src.config;
      r.source = fit_in;
      r.fit = f;
      r.n_first = static_cast<int>(data.front().first);
      r.n_last = static_cast<int>(data.front().first);
      for (const auto& [n, v] : data) {
        r.n_first = std::min(r.n_first, static_cast<int>(n));
        r.n_last = std::max(r.n_last, static_cast<int>(n));
      }
      r.created_at = timestamp_now();
      fs::path path = fit_opts.out_path;
      if (path.empty())
        path = results_root() / "fit" /
               (to_string(src.kind) + "_" + fit_model + "_" + std::to_string(r.n_first) + "-" +
                std::to_string(r.n_last) + "_" + std::to_string(r.config.seed) + ".json");
      save(r, path);
      out << json{{"path", path.string()}, {"kind", "fit"}, {"checksum", record_checksum(r)}}.dump() << "\n";
    };
  });

  // plot
  std::string spec_path;
  auto* plot_cmd = app.add_subcommand("plot", "render an SVG from a plot spec");
  plot_cmd->add_option("--spec", spec_path, "plot spec (JSON)")->required();
  plot_cmd->callback([&] {
    action = [&] {
      const PlotSpec spec = load_plot_spec(spec_path);
      emit_svg(spec);
      out << json{{"path", spec.output.string()}, {"kind", to_string(spec.kind)}}.dump() << "\n";
    };
  });

  // report
  std::string report_in, report_out;
  auto* report_cmd = app.add_subcommand("report", "regenerate CSV tables from stored records");
  report_cmd->add_option("--in", report_in, "records directory")->required();
  report_cmd->add_option("--out", report_out, "output directory (default: <in>/report)");
  report_cmd->callback([&] {
    action = [&] {
      const fs::path dest = report_out.empty() ? fs::path(report_in) / "report" : fs::path(report_out);
      json paths = json::array();
      for (const auto& p : report(report_in, dest)) paths.push_back(p.string());
      out << json{{"written", paths}}.dump() << "\n";
    };
  });

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    action();
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationFailed& e) {
    err << "validation failed: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace bellmzi

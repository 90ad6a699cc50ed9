#pragma once

// CSV tables and SVG plots generated from stored campaign records.

#include <filesystem>
#include <string>
#include <vector>

#include "bellmzi/store.hpp"

namespace bellmzi {

enum class PlotKind { displacements, curve, eigvec_heatmap, schmidt_bars, violation_vs_r };

std::string to_string(PlotKind k);
PlotKind plot_kind_from_string(const std::string& s);  // throws InvalidArgument

struct PlotSpec {
  PlotKind kind = PlotKind::curve;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output;
  std::string title;
  std::string x_label;
  std::string y_label;
  int n = 0;  // chain length to show, for per-n plots; 0 picks the largest

  /// Throws InvalidArgument when the spec is incomplete.
  void validate() const;
};

/// Spec file: JSON object with keys kind, inputs, output and optional
/// title, x_label, y_label, n. Relative paths resolve against the spec file's
/// directory.
PlotSpec load_plot_spec(const std::filesystem::path& path);

/// Self-contained SVG text. Byte-identical for identical inputs.
std::string render_svg(const PlotSpec& spec, const std::vector<CampaignRecord>& records);
/// Loads the spec's inputs, renders, and writes the output atomically.
void emit_svg(const PlotSpec& spec);

struct CsvTable {
  std::string name;  // file name, describes the content
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string text() const;
};

/// Tables derived from one record. Columns by record kind:
///   general|ecs|tmsv  <kind>_violation_curve.csv
///                       n,violation,quantum_gap,classical_bound
///                     <kind>_displacements.csv  n,index,beta,gamma
///   ecs               ecs_state_parameters.csv  n,alpha,a
///   tmsv              tmsv_squeezing.csv        n,r
///   tmsv_r_scan       tmsv_violation_vs_r.csv   n,r,violation
///   eigvec            eigvec_coherent_coefficients.csv  n,row,col,re,im
///                     eigvec_schmidt_spectrum.csv       n,index,coefficient
///   fit               fit_<model>_parameters.csv  parameter,value,std_error
std::vector<CsvTable> csv_tables(const CampaignRecord& record);

/// Writes every table of `record` into `dir`; returns the written paths.
std::vector<std::filesystem::path> emit_csv(const CampaignRecord& record,
                                            const std::filesystem::path& dir);

/// Loads every *.json record below `in`, merges tables of the same name
/// (rows in path order) and writes them into `out`. No optimization is run.
/// Also writes comparison_violation_curves.csv (n,general,ecs,tmsv) when
/// curves of more than one kind are present.
std::vector<std::filesystem::path> report(const std::filesystem::path& in,
                                          const std::filesystem::path& out);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

}  // namespace bellmzi

#pragma once

#include "irk/steppers.hpp"
#include "irk/types.hpp"

#include <string>
#include <vector>

/// Experiment drivers: eigenvector conditioning sweeps, convergence-order
/// studies, and stage x thread timing grids with CSV/JSON emission.
namespace irk {

struct ConditioningRow {
  int s = 0;
  double cond_A = 0.0;          ///< kappa_2 of the eigenvectors of A
  double cond_perturbed = 0.0;  ///< kappa_2 of the perturbed matrix's eigenvectors
};

/// Conditioning of the stage-coupling eigenvector bases for s = s_min..s_max:
/// the raw Butcher matrix A against the perturbed matrix actually
/// diagonalized by the solver (centroskew part for symmetric schemes, the
/// skew-corrected W-transform image otherwise).
std::vector<ConditioningRow> run_conditioning_sweep(Scheme scheme, int s_max, int s_min = 1);

void write_conditioning_csv(const std::vector<ConditioningRow>& rows, const std::string& path);

struct ConvergenceRow {
  int nt = 0;
  double h = 0.0;
  double error = 0.0;    ///< terminal-state error vs the reference
  bool in_fit = false;   ///< included in the slope fit (above the noise floor)
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;  ///< least-squares slope of log(error) vs log(h)
};

/// Terminal-state error against an analytic solution ("scalar" problem) or a
/// fine-step high-order reference, for each step count in nt_list.  Errors
/// below 1e-13 (order saturation at machine precision) are excluded from the
/// slope fit.
ConvergenceStudy run_convergence_study(const ProblemSpec& spec, Scheme scheme, int s,
                                       const std::vector<int>& nt_list,
                                       const IntegrateOptions& opt = {});

void write_convergence_csv(const ConvergenceStudy& study, const std::string& path);

struct BenchResult {
  std::vector<BenchRecord> records;
  bool all_ok = true;  ///< false when any grid cell failed
};

/// Full scheme x stage x thread grid.  Each cell integrates the configured
/// problem `repetitions` times after one warm-up run and keeps the median
/// elapsed time; numerical columns are averaged over the steps of one run.
/// Cell failures are recorded and the grid continues.
BenchResult run_bench_grid(const BenchConfig& cfg);

/// Write the records as CSV (stable column order, schema version column) and
/// JSON (schema version, configuration echo, record array).
void emit_report(const BenchResult& result, const BenchConfig& cfg, const std::string& csv_path,
                 const std::string& json_path);

/// Parse a CSV produced by emit_report (used by the round-trip tests).
std::vector<BenchRecord> parse_bench_csv(const std::string& path);

}  // namespace irk

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gtl/config.hpp"
#include "gtl/runtime.hpp"

namespace gtl {

struct CostWeights {
  double shape_checks = 1;
  double flat_checks = 1;
  double wrapped_calls = 3;
  double wrappers = 5;
  double blame_ops = 2;
  double steps = 0.01;
};

double cost(const CostCounters& c, const CostWeights& w = {});

struct ConfigRow {
  enum class Status { Ok, Error, Timeout, StaticError };
  Configuration config;
  Mode mode = Mode::Erased;
  CostCounters counters;
  double cost = 0;
  double overhead = 0;
  Status status = Status::Ok;
  std::string detail;         // error message for non-ok rows
  double wall_seconds = 0;    // wall-clock mode only
};

std::string_view status_name(ConfigRow::Status s);

struct CdfPoint {
  double x = 0;
  double percent = 0;
};

struct LatticeReport {
  Mode mode = Mode::Erased;
  double baseline = 0;  // Erased cost of the all-untyped configuration
  std::vector<ConfigRow> rows;  // ascending configuration order
  std::vector<CdfPoint> cdf;
  std::size_t errors = 0;  // rows excluded from the CDF
  bool wall_clock = false;

  // Largest overhead among ok rows; 0 when there are none.
  double worst_overhead() const;
  const ConfigRow* find(const Configuration& c) const;
};

struct LatticeOptions {
  CostWeights weights;
  RunOptions run;  // `mode` is overridden per report
  bool wall_clock = false;
  int wall_repeats = 9;  // the first run is discarded
};

// X values at which the CDF is sampled: 1, 1.2, ..., 2, then 4, 6, ..., 20.
std::vector<double> cdf_ticks();

// Percent of `overheads` at most X, for every tick; a final point at the
// maximum overhead is appended when it lies beyond the last tick.
std::vector<CdfPoint> overhead_cdf(const std::vector<double>& overheads);

double baseline_cost(const std::vector<ModuleDecl>& modules, const LatticeOptions& opts = {});

// Parallel over configurations (OpenMP); each configuration gets its own
// runtime. Results are identical to the serial reference.
LatticeReport run_lattice(const std::vector<ModuleDecl>& modules, Mode mode,
                          const LatticeOptions& opts = {});
LatticeReport run_lattice_serial(const std::vector<ModuleDecl>& modules, Mode mode,
                                 const LatticeOptions& opts = {});

// One configuration under one mode, costed against `baseline`.
ConfigRow run_configuration(const std::vector<ModuleDecl>& modules, const Configuration& config,
                            Mode mode, double baseline, const LatticeOptions& opts = {});

// Header plus one row per configuration.
std::string lattice_csv(const LatticeReport& r);
// `mode,x,percent` rows for every report.
std::string cdf_csv(const std::vector<LatticeReport>& reports);

struct BlameCostRow {
  // nullopt renders as TO (the step budget ran out).
  std::optional<double> shallow_worst;
  std::optional<double> deep_worst;
  std::optional<double> sb_typed;

  std::string render(const std::string& name) const;
};

BlameCostRow blame_cost_report(const std::vector<ModuleDecl>& modules, const LatticeOptions& opts = {});

}  // namespace gtl

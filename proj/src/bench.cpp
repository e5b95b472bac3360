#include "gtl/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace gtl {

double cost(const CostCounters& c, const CostWeights& w) {
  return w.shape_checks * static_cast<double>(c.shape_checks) +
         w.flat_checks * static_cast<double>(c.flat_checks) +
         w.wrapped_calls * static_cast<double>(c.wrapped_calls) +
         w.wrappers * static_cast<double>(c.wrappers_allocated) +
         w.blame_ops * static_cast<double>(c.blame_ops) + w.steps * static_cast<double>(c.steps);
}

std::string_view status_name(ConfigRow::Status s) {
  switch (s) {
    case ConfigRow::Status::Ok: return "ok";
    case ConfigRow::Status::Error: return "error";
    case ConfigRow::Status::Timeout: return "timeout";
    case ConfigRow::Status::StaticError: return "static-error";
  }
  return "?";
}

double LatticeReport::worst_overhead() const {
  double worst = 0;
  for (const auto& r : rows)
    if (r.status == ConfigRow::Status::Ok) worst = std::max(worst, r.overhead);
  return worst;
}

const ConfigRow* LatticeReport::find(const Configuration& c) const {
  for (const auto& r : rows)
    if (r.config == c) return &r;
  return nullptr;
}

std::vector<double> cdf_ticks() {
  std::vector<double> xs{1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
  for (int x = 4; x <= 20; x += 2) xs.push_back(x);
  return xs;
}

std::vector<CdfPoint> overhead_cdf(const std::vector<double>& overheads) {
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(overheads.size());
  auto percent_at = [&](double x) {
    if (overheads.empty()) return 0.0;
    // A small tolerance keeps 1.2 from excluding an overhead of 1.2000000001
    // produced by rounding in the cost scalar.
    auto k = std::count_if(overheads.begin(), overheads.end(), [&](double o) { return o <= x + 1e-9; });
    return 100.0 * static_cast<double>(k) / n;
  };
  for (double x : cdf_ticks()) out.push_back({x, percent_at(x)});
  if (!overheads.empty()) {
    double worst = *std::max_element(overheads.begin(), overheads.end());
    if (worst > out.back().x) out.push_back({worst, 100.0});
  }
  return out;
}

namespace {

LatticeOptions with_mode(const LatticeOptions& opts, Mode mode) {
  LatticeOptions o = opts;
  o.run.mode = mode;
  return o;
}

}  // namespace

ConfigRow run_configuration(const std::vector<ModuleDecl>& modules, const Configuration& config,
                            Mode mode, double baseline, const LatticeOptions& opts) {
  ConfigRow row;
  row.config = config;
  row.mode = mode;
  RunOptions run = opts.run;
  run.mode = mode;
  RunOutcome outcome;
  try {
    outcome = run_program(modules, config, run);
  } catch (const Error& e) {
    row.status = ConfigRow::Status::StaticError;
    row.detail = e.what();
    return row;
  }
  if (outcome.status == RunOutcome::Status::StaticError) {
    row.status = ConfigRow::Status::StaticError;
    row.detail = outcome.static_error;
    return row;
  }
  const Evaluation& ev = outcome.evaluation;
  row.counters = ev.counters;
  row.cost = cost(ev.counters, opts.weights);
  row.overhead = baseline > 0 ? row.cost / baseline : 0;
  if (ev.error) {
    row.status = ev.error->kind() == RuntimeError::Kind::Timeout ? ConfigRow::Status::Timeout
                                                                  : ConfigRow::Status::Error;
    row.detail = ev.error->what();
  }
  if (opts.wall_clock && row.status == ConfigRow::Status::Ok) {
    // Repeat, discard the first run, average the rest.
    double total = 0;
    int counted = 0;
    for (int i = 0; i < std::max(opts.wall_repeats, 2); ++i) {
      auto start = std::chrono::steady_clock::now();
      run_program(modules, config, run);
      std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      if (i > 0) {
        total += dt.count();
        ++counted;
      }
    }
    row.wall_seconds = total / counted;
  }
  return row;
}

double baseline_cost(const std::vector<ModuleDecl>& modules, const LatticeOptions& opts) {
  LatticeOptions base = with_mode(opts, Mode::Erased);
  base.run.step_budget = 0;  // the baseline itself is never cut short
  base.wall_clock = false;
  ConfigRow row = run_configuration(modules, Configuration::all_untyped(count_configurable(modules)),
                                    Mode::Erased, 0, base);
  if (row.status != ConfigRow::Status::Ok)
    throw Error("baseline (all-untyped, erased) run failed: " + row.detail);
  return row.cost;
}

namespace {

void finish(LatticeReport& r) {
  std::vector<double> overheads;
  for (const auto& row : r.rows) {
    if (row.status == ConfigRow::Status::Ok) overheads.push_back(row.overhead);
    else ++r.errors;
  }
  r.cdf = overhead_cdf(overheads);
}

}  // namespace

LatticeReport run_lattice_serial(const std::vector<ModuleDecl>& modules, Mode mode,
                                 const LatticeOptions& opts) {
  LatticeReport r;
  r.mode = mode;
  r.wall_clock = opts.wall_clock;
  r.baseline = baseline_cost(modules, opts);
  for (const auto& c : enumerate_lattice(modules))
    r.rows.push_back(run_configuration(modules, c, mode, r.baseline, opts));
  finish(r);
  return r;
}

LatticeReport run_lattice(const std::vector<ModuleDecl>& modules, Mode mode, const LatticeOptions& opts) {
  LatticeReport r;
  r.mode = mode;
  r.wall_clock = opts.wall_clock;
  r.baseline = baseline_cost(modules, opts);
  const auto configs = enumerate_lattice(modules);
  r.rows.resize(configs.size());
  const long n = static_cast<long>(configs.size());
  // Wall-clock timing would be distorted by sharing cores.
#pragma omp parallel for schedule(dynamic) if (!opts.wall_clock)
  for (long i = 0; i < n; ++i)
    r.rows[static_cast<std::size_t>(i)] =
        run_configuration(modules, configs[static_cast<std::size_t>(i)], mode, r.baseline, opts);
  finish(r);
  return r;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string lattice_csv(const LatticeReport& r) {
  std::ostringstream out;
  out << "config_bits,mode,shape_checks,flat_checks,wrappers,wrapped_calls,blame_ops,steps,cost,"
         "overhead,status";
  if (r.wall_clock) out << ",seconds";
  out << '\n';
  for (const auto& row : r.rows) {
    const auto& c = row.counters;
    out << row.config.bits() << ',' << mode_name(row.mode) << ',' << c.shape_checks << ','
        << c.flat_checks << ',' << c.wrappers_allocated << ',' << c.wrapped_calls << ','
        << c.blame_ops << ',' << c.steps << ',' << fixed(row.cost, 2) << ','
        << fixed(row.overhead, 4) << ',' << status_name(row.status);
    if (r.wall_clock) out << ',' << fixed(row.wall_seconds, 6);
    out << '\n';
  }
  return out.str();
}

std::string cdf_csv(const std::vector<LatticeReport>& reports) {
  std::ostringstream out;
  out << "mode,x,percent\n";
  for (const auto& r : reports)
    for (const auto& p : r.cdf) out << mode_name(r.mode) << ',' << fixed(p.x, 2) << ',' << fixed(p.percent, 2) << '\n';
  return out.str();
}

std::string BlameCostRow::render(const std::string& name) const {
  auto cell = [](const std::optional<double>& v) { return v ? fixed(*v, 2) + "x" : std::string("TO"); };
  return "program,shallow_worst,deep_worst,sb_typed\n" + name + ',' + cell(shallow_worst) + ',' +
         cell(deep_worst) + ',' + cell(sb_typed) + '\n';
}

BlameCostRow blame_cost_report(const std::vector<ModuleDecl>& modules, const LatticeOptions& opts) {
  BlameCostRow row;
  auto worst = [&](Mode mode) -> std::optional<double> {
    LatticeReport r = run_lattice(modules, mode, opts);
    for (const auto& x : r.rows)
      if (x.status == ConfigRow::Status::Timeout) return std::nullopt;
    return r.worst_overhead();
  };
  row.shallow_worst = worst(Mode::Shallow);
  row.deep_worst = worst(Mode::Deep);
  const double base = baseline_cost(modules, opts);
  ConfigRow sb = run_configuration(modules, Configuration::all_typed(count_configurable(modules)),
                                   Mode::ShallowBlame, base, opts);
  if (sb.status != ConfigRow::Status::Timeout) row.sb_typed = sb.overhead;
  return row;
}

}  // namespace gtl

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gtl/bench.hpp"
#include "gtl/runtime.hpp"
#include "gtl/transient.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kStatic = 2;
constexpr int kRuntime = 3;
constexpr int kUsage = 64;

struct UsageError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError{"cannot read " + path};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string describe(const gtl::ParseError& e, const std::string& file) {
  return file + ":" + std::to_string(e.position().line) + ":" + std::to_string(e.position().column) +
         ": " + e.what();
}

struct Common {
  std::string file;
  std::string config = "typed";
  std::string mode = "erased";
  bool lax_shapes = false;
  bool check_desugared = false;
  bool init_trusted = false;
  std::uint64_t step_budget = 0;

  gtl::RunOptions run_options() const {
    gtl::RunOptions o;
    if (mode != "all") o.mode = gtl::parse_mode(mode);  // lattice overrides the mode per report
    o.lax_shapes = lax_shapes;
    o.check_desugared = check_desugared;
    o.init_trusted = init_trusted;
    o.step_budget = step_budget;
    return o;
  }
};

void add_run_flags(CLI::App* cmd, Common& c) {
  cmd->add_flag("--lax-shapes", c.lax_shapes, "Unions check nothing, lists only their head");
  cmd->add_flag("--check-desugared", c.check_desugared, "Also instrument desugared code (debug)");
  cmd->add_flag("--init-trusted", c.init_trusted, "SB: record boundaries for trusted primitive results");
  cmd->add_option("--step-budget", c.step_budget, "Abort after this many evaluation steps (0: none)");
}

int cmd_check(const Common& c, bool dump_checks) {
  auto modules = gtl::parse(read_file(c.file));
  auto config = gtl::Configuration::parse(c.config, gtl::count_configurable(modules));
  auto typed = gtl::typecheck(modules, config);
  for (std::size_t i = 0; i < typed.modules.size(); ++i)
    std::cout << typed.modules[i].name.str() << ' ' << (typed.typed(i) ? "typed" : "untyped") << '\n';
  if (dump_checks) {
    gtl::CheckOptions co;
    co.shapes.lax = c.lax_shapes;
    co.check_desugared = c.check_desugared;
    std::cout << gtl::dump_checks(gtl::insert_checks(gtl::optimize(typed, gtl::OptimizeMode::Shallow), co).sites);
  }
  return kOk;
}

int cmd_run(const Common& c, bool dump_checks, bool dump_blame, bool counters) {
  if (c.mode == "all") throw UsageError{"run takes a single mode"};
  auto modules = gtl::parse(read_file(c.file));
  auto config = gtl::Configuration::parse(c.config, gtl::count_configurable(modules));
  auto outcome = gtl::run_program(modules, config, c.run_options());
  if (outcome.status == gtl::RunOutcome::Status::StaticError) {
    std::cerr << outcome.static_error << '\n';
    return kStatic;
  }
  if (dump_checks) std::cout << gtl::dump_checks(outcome.sites);
  const auto& ev = outcome.evaluation;
  std::cout << ev.output;
  if (ev.ok()) std::cout << ev.printed << '\n';
  if (counters) std::cout << gtl::format_counters(ev.counters);
  if (!ev.ok()) {
    std::cerr << gtl::kind_name(ev.error->kind()) << ": " << ev.error->what() << '\n';
    if (dump_blame && ev.error->blame) std::cerr << ev.error->blame->render();
    return kRuntime;
  }
  return kOk;
}

int cmd_lattice(const Common& c, bool serial, bool cdf, bool wall_clock) {
  auto modules = gtl::parse(read_file(c.file));
  gtl::LatticeOptions opts;
  opts.run = c.run_options();
  opts.wall_clock = wall_clock;
  std::vector<gtl::Mode> modes;
  if (c.mode == "all")
    modes = {gtl::Mode::Erased, gtl::Mode::Deep, gtl::Mode::Shallow, gtl::Mode::ShallowBlame};
  else
    modes = {gtl::parse_mode(c.mode)};
  std::vector<gtl::LatticeReport> reports;
  for (auto m : modes)
    reports.push_back(serial ? gtl::run_lattice_serial(modules, m, opts) : gtl::run_lattice(modules, m, opts));
  if (cdf) {
    std::cout << gtl::cdf_csv(reports);
  } else {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      std::string csv = gtl::lattice_csv(reports[i]);
      if (i > 0) csv = csv.substr(csv.find('\n') + 1);  // one header
      std::cout << csv;
    }
  }
  return kOk;
}

int cmd_report(const Common& c) {
  auto modules = gtl::parse(read_file(c.file));
  gtl::LatticeOptions opts;
  opts.run = c.run_options();
  std::cout << gtl::blame_cost_report(modules, opts).render(std::filesystem::path(c.file).stem().string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gtl: gradual typing workbench"};
  app.require_subcommand(1);
  Common c;
  bool dump_checks = false, dump_blame = false, counters = false;
  bool serial = false, cdf = false, wall_clock = false;

  auto* check = app.add_subcommand("check", "Typecheck a program under a configuration");
  check->add_option("file", c.file, "Program file (.gtl)")->required();
  check->add_option("--config", c.config, "Bit string, 'typed' or 'untyped'");
  check->add_flag("--dump-checks", dump_checks, "Print the transient check sites");
  check->add_flag("--lax-shapes", c.lax_shapes, "Unions check nothing, lists only their head");
  check->add_flag("--check-desugared", c.check_desugared, "Also instrument desugared code (debug)");

  auto* run = app.add_subcommand("run", "Run a program");
  run->add_option("file", c.file, "Program file (.gtl)")->required();
  run->add_option("--config", c.config, "Bit string, 'typed' or 'untyped'");
  run->add_option("--mode", c.mode, "erased, deep, shallow or sb");
  run->add_flag("--dump-checks", dump_checks, "Print the transient check sites");
  run->add_flag("--dump-blame", dump_blame, "On a shape error, print the blame report");
  run->add_flag("--counters", counters, "Print cost counters");
  add_run_flags(run, c);

  auto* lattice = app.add_subcommand("lattice", "Run every configuration and print CSV");
  lattice->add_option("file", c.file, "Program file (.gtl)")->required();
  lattice->add_option("--mode", c.mode, "erased, deep, shallow, sb or all");
  lattice->add_flag("--serial", serial, "Use the serial reference runner");
  lattice->add_flag("--cdf", cdf, "Print the overhead CDF instead of per-configuration rows");
  lattice->add_flag("--wall-clock", wall_clock, "Also time each configuration (9 runs, last 8 averaged)");
  add_run_flags(lattice, c);

  auto* report = app.add_subcommand("report", "Worst Shallow/Deep overhead and SB on the typed configuration");
  report->add_option("file", c.file, "Program file (.gtl)")->required();
  report->add_option("--step-budget", c.step_budget, "Runs beyond this many steps report TO");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(c, dump_checks);
    if (run->parsed()) return cmd_run(c, dump_checks, dump_blame, counters);
    if (lattice->parsed()) return cmd_lattice(c, serial, cdf, wall_clock);
    if (report->parsed()) return cmd_report(c);
  } catch (const UsageError& e) {
    std::cerr << e.message << '\n';
    return kUsage;
  } catch (const gtl::ParseError& e) {
    std::cerr << describe(e, c.file) << '\n';
    return kStatic;
  } catch (const gtl::ConfigError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const gtl::StaticTypeError& e) {
    std::cerr << e.what() << '\n';
    return kStatic;
  } catch (const gtl::UnsupportedBoundaryType& e) {
    std::cerr << e.what() << '\n';
    return kRuntime;
  } catch (const gtl::Error& e) {
    std::cerr << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

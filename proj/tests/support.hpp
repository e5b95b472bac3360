#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtl/bench.hpp"
#include "gtl/runtime.hpp"

namespace gtl::test {

inline std::string fixture_path(const std::string& rel) { return std::string(GTL_FIXTURES_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<ModuleDecl> load(const std::string& rel) { return parse(slurp(fixture_path(rel))); }

inline RunOutcome run(const std::vector<ModuleDecl>& modules, std::string_view config, Mode mode,
                      RunOptions opts = {}) {
  opts.mode = mode;
  return run_program(modules, Configuration::parse(config, count_configurable(modules)), opts);
}

inline RunOutcome run(const std::vector<ModuleDecl>& modules, const Configuration& config, Mode mode,
                      RunOptions opts = {}) {
  opts.mode = mode;
  return run_program(modules, config, opts);
}

inline const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> m{Mode::Erased, Mode::Deep, Mode::Shallow, Mode::ShallowBlame};
  return m;
}

inline const std::vector<std::string>& bench_fixtures() {
  static const std::vector<std::string> f{"bench/sieve.gtl", "bench/dungeon.gtl", "bench/deepdata.gtl",
                                          "bench/growth.gtl", "bench/control.gtl"};
  return f;
}

inline const std::vector<std::string>& scenario_fixtures() {
  static const std::vector<std::string> f{"sort_median.gtl", "for_sum.gtl", "for_skip.gtl", "poly_ok.gtl",
                                          "poly_bad.gtl", "bear.gtl", "double_cross.gtl", "fg.gtl"};
  return f;
}

// Untyped driver sends `n` fresh two-element lists into a typed function.
inline std::string growth_source(std::size_t n) {
  return "(module consumer typed\n"
         "  (define (weight [xs : (Listof Int)]) : Int (+ (first xs) (length xs))))\n"
         "(module driver untyped\n"
         "  (require consumer weight)\n"
         "  (define (drive i n acc)\n"
         "    (if (>= i n) acc (drive (+ i 1) n (+ acc (weight (list i i))))))\n"
         "  (drive 0 " + std::to_string(n) + " 0))\n";
}

// Runs the CLI, returning the exit code; stdout goes to `out`.
inline int run_cli(const std::string& args, std::string* out = nullptr) {
  std::string cmd = std::string(GTL_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return -1;
  std::string text;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) text.append(buf, n);
  int status = pclose(p);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace gtl::test

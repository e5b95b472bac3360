// Parallel lattice runner against the serial reference, per fixture and mode.
#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "gtl/bench.hpp"

namespace {

std::vector<gtl::ModuleDecl> load(const std::string& name) {
  std::ifstream in(std::string(GTL_FIXTURES_DIR) + "/bench/" + name + ".gtl");
  std::ostringstream s;
  s << in.rdbuf();
  return gtl::parse(s.str());
}

const char* kFixtures[] = {"sieve", "dungeon", "deepdata", "growth", "control"};
const gtl::Mode kModes[] = {gtl::Mode::Erased, gtl::Mode::Deep, gtl::Mode::Shallow, gtl::Mode::ShallowBlame};

template <bool Parallel>
void lattice(benchmark::State& state) {
  auto mods = load(kFixtures[state.range(0)]);
  const auto mode = kModes[state.range(1)];
  state.SetLabel(std::string(kFixtures[state.range(0)]) + "/" + std::string(gtl::mode_name(mode)));
  for (auto _ : state) {
    auto r = Parallel ? gtl::run_lattice(mods, mode) : gtl::run_lattice_serial(mods, mode);
    benchmark::DoNotOptimize(r.rows.data());
  }
}

void args(benchmark::internal::Benchmark* b) {
  for (int f = 0; f < 5; ++f)
    for (int m = 0; m < 4; ++m) b->Args({f, m});
}

BENCHMARK(lattice<true>)->Name("lattice/openmp")->Apply(args)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(lattice<false>)->Name("lattice/serial")->Apply(args)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();

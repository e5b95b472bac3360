// One PASS/FAIL line per acceptance criterion; nonzero exit on any failure.
#include <cmath>
#include <functional>
#include <iostream>
#include <set>

#include "blame_oracle.hpp"
#include "fuzzgen.hpp"
#include "support.hpp"

using namespace gtl;
using gtl::test::load;
using EK = RuntimeError::Kind;

namespace {

struct Failed {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failed{what};
}

RuntimeError error_of(const RunOutcome& o) {
  expect(o.status != RunOutcome::Status::StaticError, "program did not run: " + o.static_error);
  expect(!o.evaluation.ok(), "expected a runtime error");
  return *o.evaluation.error;
}

Value closure(Heap& heap, const std::vector<ModuleDecl>& mods, std::size_t i) {
  return heap.alloc(Closure{mods[0].defs[i].expr, nullptr, 0});
}

bool admits(const char* type, const Value& v, Heap& heap) {
  return check_shape(shape_of(parse_type(type)), v, heap).pass;
}

Value record(Heap& heap, const char* tag, std::vector<const char*> fields) {
  Record r;
  r.tag = Symbol(tag);
  for (auto f : fields) r.fields.push_back({Symbol(f), Value::integer(0)});
  return heap.alloc(r);
}

Value vec(Heap& heap, std::vector<Value> xs) { return heap.alloc(Vector{std::move(xs), false}); }

void shape_examples() {
  Heap heap;
  const auto I = [](std::int64_t n) { return Value::integer(n); };
  expect(!admits("(Listof Real)", heap.cons(I(1), I(2)), heap), "(cons 1 2) is not a proper list");
  expect(admits("(Listof Real)", heap.list({I(1), I(2)}), heap), "proper list accepted");
  expect(admits("(Listof Real)", heap.list({Value::string("s")}), heap), "list elements unchecked");

  expect(admits("(Vector Real Real)", vec(heap, {Value::string("a"), Value::boolean(true)}), heap),
         "length-2 vector accepted");
  expect(!admits("(Vector Real Real)", vec(heap, {I(1)}), heap), "length-1 vector rejected");
  expect(!admits("(Vector Real Real)", vec(heap, {I(1), I(2), I(3)}), heap), "length-3 vector rejected");

  expect(admits("(U Real (Listof Str))", I(3), heap), "union: first member");
  expect(admits("(U Real (Listof Str))", heap.list({I(1), I(2)}), heap), "union: no element checks");
  expect(!admits("(U Real (Listof Str))", Value::boolean(false), heap), "union: no member");

  const char* rt = "(Record P [x Int] [y Int])";
  expect(admits(rt, record(heap, "P", {"x", "y"}), heap), "record with fields");
  expect(admits(rt, record(heap, "P", {"y", "x", "z"}), heap), "record with extra field");
  expect(!admits(rt, record(heap, "P", {"x"}), heap), "record missing a field");
  expect(!admits(rt, record(heap, "Q", {"x", "y"}), heap), "record with another tag");

  auto lambdas = parse("(module m untyped (lambda (x) x) (lambda (x y) x) (case-lambda [(x) x] [(x y) y]))");
  const char* ct = "(case-> (-> Int Int) (-> Int Int Int))";
  expect(shape_of(parse_type(ct)) == Shape::proc_arity({1, 2}), "case-> shape is arity {1,2}");
  expect(admits(ct, closure(heap, lambdas, 2), heap), "case-lambda of arity 1 and 2");
  expect(!admits(ct, closure(heap, lambdas, 0), heap), "arity 1 only");
  expect(!admits(ct, closure(heap, lambdas, 1), heap), "arity 2 only");
}

void sort_median_triptych() {
  auto mods = load("sort_median.gtl");
  // sort untyped; median and client typed; `<` typed or not.
  const auto& deep = error_of(gtl::test::run(mods, "011", Mode::Deep));
  expect(deep.kind() == EK::Contract && deep.violation.has_value(), "deep: contract error");
  expect(deep.violation->boundary->importer_loc.str() == "client:863", "deep: importer client:863");
  expect(deep.violation->boundary->exporter_loc.str() == "median:612", "deep: exporter median:612");
  expect(deep.violation->blamed == Symbol("client"), "deep: blames client");

  const auto& typed_lt = error_of(gtl::test::run(mods, "011", Mode::Shallow));
  expect(typed_lt.kind() == EK::Shape, "shallow, typed <: shape error");
  expect(typed_lt.loc().str() == "cmp:781", "shallow, typed <: at cmp:781");
  expect(typed_lt.call_loc && typed_lt.call_loc->module == Symbol("sort"), "shallow, typed <: called from sort");

  const auto& untyped_lt = error_of(gtl::test::run(mods, "010", Mode::Shallow));
  expect(untyped_lt.kind() == EK::Dynamic, "shallow, untyped <: dynamic error");
  expect(untyped_lt.loc().str() == "cmp:811" && untyped_lt.primitive == "<", "shallow, untyped <: in <");
}

std::set<std::string> modules_of(const std::vector<BoundaryEntry>& es) {
  std::set<std::string> out;
  for (const auto& e : es) out.insert(e.spec.module.str());
  return out;
}

void filtering_oracle() {
  auto mods = load("fg.gtl");
  const auto& e = error_of(gtl::test::run(mods, "typed", Mode::ShallowBlame));
  expect(e.blame.has_value(), "f/g: blame report");
  expect(modules_of(e.blame->gathered) == std::set<std::string>{"f", "g"}, "f/g: unfiltered {f, g}");
  expect(modules_of(e.blame->boundaries) == std::set<std::string>{"g"}, "f/g: filtered {g}");
  expect(!e.blame->fell_back, "f/g: filter did not fall back");
  auto r = blame_oracle::run(200, 2024);
  expect(r.rounds == 200, "200 random graphs");
  expect(r.gather_mismatches == 0, std::to_string(r.gather_mismatches) + " gather mismatches");
  expect(r.filter_mismatches == 0, std::to_string(r.filter_mismatches) + " filter mismatches");
}

void weak_soundness_fuzz() {
  auto st = fuzz::run(520);
  std::cerr << "  fuzz: " << st.programs << " programs, " << st.runs << " runs, " << st.seconds << " s\n";
  expect(st.programs >= 500, "at least 500 programs");
  expect(st.static_errors == 0, "generated programs typecheck");
  expect(st.weak_violations == 0, "no weak soundness violations");
  expect(st.deep_violations == 0, "no deep oracle violations");
  expect(st.clean_shallow > 0 && st.clean_deep > 0, "error-free runs exist");
  expect(st.seconds < 300, "under five minutes");
}

void lattice_mechanics() {
  auto mods = load("bench/dungeon.gtl");
  expect(count_configurable(mods) == 3, "three configurable modules");
  for (auto mode : gtl::test::all_modes()) {
    auto r = run_lattice(mods, mode);
    expect(r.rows.size() == 8, "eight configurations");
    expect(r.rows[0].overhead == 1.0, "all-untyped overhead is 1.0");
    for (std::size_t i = 1; i < r.cdf.size(); ++i)
      expect(r.cdf[i].percent >= r.cdf[i - 1].percent, "cdf is monotone");
    expect(r.cdf.back().percent == 100.0, "cdf reaches 100%");
  }
  for (const auto& f : gtl::test::bench_fixtures())
    for (auto mode : gtl::test::all_modes())
      expect(run_lattice(load(f), mode).rows[0].overhead == 1.0, f + ": all-untyped overhead is 1.0");
}

void orderings() {
  auto sieve = load("bench/sieve.gtl");
  expect(run_lattice(sieve, Mode::Deep).worst_overhead() > run_lattice(sieve, Mode::Shallow).worst_overhead(),
         "sieve: deep worst > shallow worst");
  auto dungeon = load("bench/dungeon.gtl");
  auto sh = run_lattice(dungeon, Mode::Shallow), dp = run_lattice(dungeon, Mode::Deep);
  bool reversal = false;
  for (std::size_t i = 0; i < sh.rows.size(); ++i) reversal = reversal || sh.rows[i].cost > dp.rows[i].cost;
  expect(reversal, "dungeon: some configuration with shallow > deep");
  for (const auto& f : gtl::test::bench_fixtures()) {
    auto mods = load(f);
    auto a = run_lattice(mods, Mode::Shallow), b = run_lattice(mods, Mode::ShallowBlame);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      const std::string where = f + " " + a.rows[i].config.bits();
      expect(b.rows[i].cost >= a.rows[i].cost, where + ": sb >= shallow");
      if (b.rows[i].counters.map_size > 0) expect(b.rows[i].cost > a.rows[i].cost, where + ": sb > shallow");
    }
  }
}

void blame_maximum() {
  for (const auto& f : gtl::test::bench_fixtures()) {
    auto mods = load(f);
    auto r = run_lattice(mods, Mode::ShallowBlame);
    const auto& top = r.rows.back();
    expect(top.config == Configuration::all_typed(count_configurable(mods)), f + ": last row is fully typed");
    for (const auto& row : r.rows)
      expect(row.counters.blame_ops <= top.counters.blame_ops, f + ": " + row.config.bits() + " exceeds typed");
  }
}

void unbounded_growth() {
  std::vector<double> xs, ys;
  for (std::size_t n : {100, 1000, 10000}) {
    auto o = gtl::test::run(parse(gtl::test::growth_source(n)), "typed", Mode::ShallowBlame);
    expect(o.status != RunOutcome::Status::StaticError && o.evaluation.ok(), "growth program runs");
    expect(o.evaluation.counters.map_size >= n, "map_size >= N");
    xs.push_back(static_cast<double>(n));
    ys.push_back(static_cast<double>(o.evaluation.counters.map_size));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  std::cerr << "  growth: R^2 = " << r2 << '\n';
  expect(r2 > 0.99, "linear fit");
}

void universal_policy() {
  auto ok = load("poly_ok.gtl");
  auto sh = gtl::test::run(ok, "typed", Mode::Shallow);
  expect(sh.status != RunOutcome::Status::StaticError && sh.evaluation.ok(), "(All (a) (-> a a)) accepted by shallow");
  expect(error_of(gtl::test::run(ok, "typed", Mode::Deep)).kind() == EK::Contract,
         "(All (a) (-> a a)) rejected by deep");
  auto poly_bad = load("poly_bad.gtl");
  auto bad = gtl::test::run(poly_bad, "typed", Mode::Shallow);
  const auto& e = error_of(bad);
  const auto erased_steps = gtl::test::run(poly_bad, "typed", Mode::Erased).evaluation.counters.steps;
  expect(e.kind() == EK::Shape && e.loc().str() == "user:157" && bad.evaluation.counters.shape_checks == 0 &&
             bad.evaluation.counters.steps < erased_steps,
         "(All (a) a) rejected at link time");
}

void desugar_discipline() {
  auto skip = load("for_skip.gtl");
  auto plain = gtl::test::run(skip, "typed", Mode::Shallow);
  expect(plain.status != RunOutcome::Status::StaticError && plain.evaluation.ok(), "for/skip runs");
  RunOptions dbg;
  dbg.check_desugared = true;
  expect(error_of(gtl::test::run(skip, "typed", Mode::Shallow, dbg)).kind() == EK::Shape,
         "for/skip with desugared checks fails");
  auto for_sum = load("for_sum.gtl");
  auto ip = insert_checks(optimize(typecheck(for_sum, Configuration::all_typed(count_configurable(for_sum))),
                                   OptimizeMode::Shallow));
  expect(dump_checks(ip.sites) == "fn-entry[0] squares:83 list?\n", "for/sum check sites");
}

void bear() {
  auto mods = load("bear.gtl");
  auto sh = gtl::test::run(mods, "typed", Mode::Shallow);
  expect(sh.status != RunOutcome::Status::StaticError && sh.evaluation.ok(), "shallow completes");
  expect(error_of(gtl::test::run(mods, "typed", Mode::Deep)).kind() == EK::Contract, "deep fails");
}

void mode_agreement() {
  std::vector<std::string> files = gtl::test::scenario_fixtures();
  for (const auto& f : gtl::test::bench_fixtures()) files.push_back(f);
  std::size_t compared = 0;
  for (const auto& f : files) {
    auto mods = load(f);
    for (const auto& config : enumerate_lattice(count_configurable(mods))) {
      std::optional<std::string> printed;
      for (auto mode : gtl::test::all_modes()) {
        auto o = gtl::test::run(mods, config, mode);
        if (o.status == RunOutcome::Status::StaticError || !o.evaluation.ok()) continue;
        if (!printed) printed = o.evaluation.printed;
        expect(*printed == o.evaluation.printed, f + " " + config.bits() + ": modes disagree");
        ++compared;
      }
    }
  }
  expect(compared > 0, "some error-free runs");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> criteria{
      {"shape examples", shape_examples},
      {"sort-median triptych", sort_median_triptych},
      {"blame filtering oracle", filtering_oracle},
      {"weak soundness fuzz", weak_soundness_fuzz},
      {"lattice mechanics", lattice_mechanics},
      {"cost orderings", orderings},
      {"fully typed blame maximum", blame_maximum},
      {"unbounded blame map growth", unbounded_growth},
      {"universal type policy", universal_policy},
      {"desugar discipline", desugar_discipline},
      {"bear surprise", bear},
      {"mode agreement", mode_agreement},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string why;
    try {
      criteria[i].second();
    } catch (const Failed& f) {
      why = f.what;
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    std::cout << (why.empty() ? "PASS " : "FAIL ") << i + 1 << ". " << criteria[i].first;
    if (!why.empty()) {
      std::cout << " (" << why << ")";
      ++failures;
    }
    std::cout << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ctaylor/bench.hpp"
#include "ctaylor/capture.hpp"
#include "ctaylor/collapse.hpp"
#include "ctaylor/cost.hpp"
#include "ctaylor/interpolation.hpp"
#include "ctaylor/mlp.hpp"
#include "ctaylor/operators.hpp"
#include "ctaylor/oracle.hpp"
#include "ctaylor/partitions.hpp"
#include "test_util.hpp"

namespace ctaylor {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : ", ") + what;
  }
};

std::string fmt(double v, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Program sin_program() {
  Program p;
  p.set_output(p.sin(p.input()));
  return p;
}

// 1: Faa di Bruno multiplicities against the reference table.
Outcome faa_di_bruno_table() {
  Outcome o;
  std::ifstream in(testing::golden_path("faa_di_bruno.txt"));
  if (!in) {
    o.fail("missing faa_di_bruno.txt");
    return o;
  }
  std::map<std::pair<int, std::vector<int>>, std::int64_t> golden;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int k = 0;
    std::int64_t c = 0;
    ls >> k >> c;
    std::vector<int> parts;
    for (int s; ls >> s;) parts.push_back(s);
    if (k >= 2) golden[{k, parts}] = c;
  }
  std::size_t checked = 0;
  for (int k = 2; k <= 8; ++k)
    for (const Partition& p : partitions(k)) {
      auto it = golden.find({k, p.parts});
      if (it == golden.end()) {
        o.fail("no reference entry for k=" + std::to_string(k) + " " + p.to_string());
      } else if (it->second != p.multiplicity) {
        o.fail("k=" + std::to_string(k) + " " + p.to_string() + ": " + std::to_string(p.multiplicity) +
               " != " + std::to_string(it->second));
      }
      ++checked;
    }
  if (checked != golden.size()) o.fail("reference has " + std::to_string(golden.size()) + " rows, checked " +
                                       std::to_string(checked));
  o.note(std::to_string(checked) + " coefficients for k=2..8");
  return o;
}

ir::Bindings random_bindings(const ir::Graph& g, std::size_t batch, std::size_t dim, std::uint64_t seed) {
  ir::Bindings b;
  for (const ir::Node& n : g.nodes()) {
    if (n.op != ir::Op::Leaf) continue;
    b[n.name] = n.batched ? testing::random_batch(n.count * batch, dim, seed++).reshaped({n.count, batch, dim})
                          : testing::random_batch(batch, dim, seed++);
  }
  return b;
}

// 2: collapse preserves semantics on random programs and seedings.
Outcome collapse_preserves_semantics() {
  Outcome o;
  const std::size_t cases = 240;
  std::set<ir::Op> seen;
  std::set<std::string> primitives;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < cases; ++seed) {
    const std::size_t D = 1 + seed % 4;
    Program p = testing::random_program(D, 1000 + seed, 6 + seed % 7);
    for (const ProgramNode& n : p.nodes())
      if (n.op) primitives.insert(std::holds_alternative<prim::Unary>(*n.op)
                                      ? to_string(std::get<prim::Unary>(*n.op).fn)
                                      : name(*n.op));
    const int K = 1 + static_cast<int>(seed % 4);
    const std::size_t R = 1 + (seed / 4) % 4;
    SeedLayout layout = (seed / 16) % 2 ? SeedLayout::full(K, R) : SeedLayout::directional(K, R);
    ir::Graph raw = capture(p, layout);
    ir::Graph collapsed = collapse(raw).graph;
    for (const ir::Graph* g : {&raw, &collapsed})
      for (const ir::Node& n : g->nodes()) seen.insert(n.op);
    ir::Bindings b = random_bindings(raw, 1 + seed % 3, D, seed * 100);
    ir::EvalResult standard = ir::evaluate(raw, b);
    ir::EvalResult fast = ir::evaluate(collapsed, b);
    for (const auto& [name, value] : standard.outputs) {
      auto it = fast.outputs.find(name);
      if (it == fast.outputs.end()) {
        o.fail("case " + std::to_string(seed) + " lost output " + name);
        continue;
      }
      const double err = relative_error(it->second, value, 1e-12);
      worst = std::max(worst, err);
      if (!(err <= 1e-10)) o.fail("case " + std::to_string(seed) + " " + name + " rel err " + fmt(err));
    }
  }
  const std::vector<std::string> wanted{"affine", "sin", "cos", "tanh", "exp", "hadamard", "add", "scale"};
  for (const std::string& w : wanted)
    if (!primitives.count(w)) o.fail("primitive " + w + " never exercised");
  for (int op = 0; op <= static_cast<int>(ir::Op::Output); ++op)
    if (!seen.count(static_cast<ir::Op>(op)))
      o.fail("IR op " + std::string(ir::op_name(static_cast<ir::Op>(op))) + " never exercised");
  o.note(std::to_string(cases) + " cases, worst rel err " + fmt(worst));
  return o;
}

// 3: exact interpolation coefficients.
Outcome gamma_coefficients() {
  Outcome o;
  const std::vector<std::pair<std::vector<int>, Fraction>> expected{
      {{4, 0}, {13, 192}}, {{1, 3}, {-1, 3}}, {{2, 2}, {5, 8}}};
  for (const auto& [j, want] : expected) {
    const Fraction got = gamma({2, 2}, j);
    if (!(got == want))
      o.fail("gamma((2,2),(" + std::to_string(j[0]) + "," + std::to_string(j[1]) + ")) = " + got.to_string());
  }
  o.note("13/192, -1/3, 5/8");
  return o;
}

// 4: exact Laplacian against the nested-dual Hessian trace.
Outcome laplacian_matches_oracle() {
  Outcome o;
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t D : {2, 5, 10, 50})
    for (std::uint64_t s = 0; s < 5; ++s) {
      const std::uint64_t seed = 400 + 10 * D + s;
      Program p = testing::random_tanh_mlp(D, seed);
      Tensor x = testing::random_point(D, seed);
      Tensor expected = oracle_laplacian(p, x);
      for (Mode m : {Mode::Standard, Mode::Collapsed}) {
        const double err = relative_error(laplacian(p, x, m, DirectionSet::basis(D)), expected);
        worst = std::max(worst, err);
        if (!(err <= 1e-8)) o.fail("D=" + std::to_string(D) + " " + to_string(m) + " rel err " + fmt(err));
      }
      ++count;
    }
  o.note(std::to_string(count) + " MLPs, worst rel err " + fmt(worst));
  return o;
}

Tensor contract_aabb(const Tensor& t4) {
  const std::size_t C = t4.dim(0);
  const std::size_t D = t4.dim(1);
  Tensor out = Tensor::zeros({C});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t a = 0; a < D; ++a)
      for (std::size_t b = 0; b < D; ++b) out[c] += t4.at({c, a, a, b, b});
  return out;
}

// 5: interpolation, 6-jet and full-tensor biharmonic agree pairwise.
Outcome biharmonic_triple_agreement() {
  Outcome o;
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t D = 1; D <= 5; ++D)
    for (std::uint64_t s = 0; s < 2; ++s) {
      const std::uint64_t seed = 500 + 10 * D + s;
      Program p = testing::random_tanh_mlp(D, seed);
      Tensor x = testing::random_point(D, seed, 0.5);
      std::vector<std::pair<std::string, Tensor>> results{
          {"interpolation-standard", biharmonic_exact(p, x, Mode::Standard)},
          {"interpolation-collapsed", biharmonic_exact(p, x, Mode::Collapsed)},
          {"6-jet", biharmonic_6jet(p, x)},
          {"full-tensor", contract_aabb(oracle_derivative(p, x, 4))},
      };
      for (std::size_t a = 0; a < results.size(); ++a)
        for (std::size_t b = a + 1; b < results.size(); ++b) {
          const double scale = std::max(max_abs(results[a].second), max_abs(results[b].second));
          const double err = max_abs_diff(results[a].second, results[b].second) / std::max(scale, 1e-300);
          worst = std::max(worst, err);
          if (!(err <= 1e-6))
            o.fail("D=" + std::to_string(D) + " " + results[a].first + " vs " + results[b].first + " rel err " +
                   fmt(err));
        }
      ++count;
    }
  o.note(std::to_string(count) + " MLPs with D<=5, worst pairwise rel err " + fmt(worst));
  return o;
}

// 6: vector counts and ratios of the cost table.
Outcome cost_table() {
  Outcome o;
  auto expect = [&](const std::string& what, std::size_t got, std::size_t want) {
    if (got != want) o.fail(what + ": " + std::to_string(got) + " != " + std::to_string(want));
  };
  auto expect_ratio = [&](const std::string& what, double got, double want) {
    if (std::round(got * 100.0) / 100.0 != want) o.fail(what + " ratio " + fmt(got) + " != " + fmt(want));
  };
  using K = OperatorKind;
  for (std::size_t D : {1, 2, 5, 10, 50}) {
    const std::string d = " D=" + std::to_string(D);
    expect("laplacian std" + d, marginal_vectors(K::Laplacian, true, Mode::Standard, D, 0), 1 + 2 * D);
    expect("laplacian col" + d, marginal_vectors(K::Laplacian, true, Mode::Collapsed, D, 0), 2 + D);
    expect("weighted std" + d, marginal_vectors(K::WeightedLaplacian, true, Mode::Standard, D, D), 1 + 2 * D);
    expect("weighted col" + d, marginal_vectors(K::WeightedLaplacian, true, Mode::Collapsed, D, D), 2 + D);
    expect("biharmonic std" + d, marginal_vectors(K::Biharmonic, true, Mode::Standard, D, 0), 6 * D * D - 2 * D + 1);
    expect("biharmonic col" + d, 2 * marginal_vectors(K::Biharmonic, true, Mode::Collapsed, D, 0),
           9 * D * D - 3 * D + 8);
    for (K op : {K::Laplacian, K::WeightedLaplacian, K::Biharmonic}) {
      const std::size_t deg = op == K::Biharmonic ? 4 : 2;
      expect(to_string(op) + " stochastic std" + d, marginal_vectors(op, false, Mode::Standard, D, 7), deg);
      expect(to_string(op) + " stochastic col" + d, marginal_vectors(op, false, Mode::Collapsed, D, 7), deg - 1);
    }
  }
  expect("laplacian D=50 std", marginal_vectors(K::Laplacian, true, Mode::Standard, 50, 0), 101);
  expect("laplacian D=50 col", marginal_vectors(K::Laplacian, true, Mode::Collapsed, 50, 0), 52);
  expect("biharmonic D=5 std", marginal_vectors(K::Biharmonic, true, Mode::Standard, 5, 0), 141);
  expect("biharmonic D=5 col", marginal_vectors(K::Biharmonic, true, Mode::Collapsed, 5, 0), 109);
  expect_ratio("exact laplacian", theoretical_ratio(K::Laplacian, true, 50, 0), 0.51);
  expect_ratio("exact weighted", theoretical_ratio(K::WeightedLaplacian, true, 50, 50), 0.51);
  expect_ratio("exact biharmonic", theoretical_ratio(K::Biharmonic, true, 5, 0), 0.77);
  expect_ratio("stochastic laplacian", theoretical_ratio(K::Laplacian, false, 50, 16), 0.5);
  expect_ratio("stochastic weighted", theoretical_ratio(K::WeightedLaplacian, false, 50, 16), 0.5);
  expect_ratio("stochastic biharmonic", theoretical_ratio(K::Biharmonic, false, 5, 16), 0.75);
  o.note("ratios 0.51 0.51 0.77 / 0.5 0.5 0.75");
  return o;
}

// 7: vector counters on compiled graphs equal the cost model.
Outcome instrumented_counts() {
  Outcome o;
  using K = OperatorKind;
  const std::size_t S = 4;
  std::size_t rows = 0;
  for (std::size_t D : {5, 50}) {
    Program p = build_mlp(MlpSpec::small(D));
    Tensor sigma = testing::random_batch(D, D, 70 + D);
    for (Mode m : {Mode::Standard, Mode::Collapsed}) {
      auto check = [&](const std::string& what, const CompiledOperator& op, K kind, bool exact, std::size_t r) {
        const std::size_t want = count_vectors(kind, exact, m, D, r);
        if (op.vectors_per_node() != want || op.report().batched_vectors_after != want)
          o.fail(what + " " + to_string(m) + " D=" + std::to_string(D) + ": counted " +
                 std::to_string(op.vectors_per_node()) + ", model " + std::to_string(want));
        ++rows;
      };
      check("exact laplacian", compile_laplacian(p, DirectionSet::basis(D), m), K::Laplacian, true, 0);
      check("exact weighted", compile_laplacian(p, DirectionSet::columns(sigma), m), K::WeightedLaplacian, true, D);
      check("exact biharmonic", compile_biharmonic_exact(p, D, m), K::Biharmonic, true, 0);
      check("stochastic laplacian", compile_laplacian(p, DirectionSet::sampled(Distribution::Rademacher, S, D, 1), m),
            K::Laplacian, false, S);
      check("stochastic weighted",
            compile_laplacian(p, DirectionSet::sampled_through(sigma, Distribution::Gaussian, S, 2), m),
            K::WeightedLaplacian, false, S);
      check("stochastic biharmonic", compile_biharmonic_stochastic(p, D, S, 3, m), K::Biharmonic, false, S);
    }
  }
  o.note(std::to_string(rows) + " operator/mode/D rows");
  return o;
}

// 8: flop-proxy slope ratios and wall-clock direction.
Outcome performance_direction() {
  Outcome o;
  const std::size_t D = 50;
  Program p = build_mlp(MlpSpec::reference(D));

  std::vector<double> ns{8, 16, 32, 64};
  std::map<Mode, double> lap_slope;
  for (Mode m : {Mode::Standard, Mode::Collapsed}) {
    CompiledOperator op = compile_laplacian(p, DirectionSet::basis(D), m);
    std::vector<double> flops;
    for (double n : ns) flops.push_back(static_cast<double>(op.static_flops(static_cast<std::size_t>(n))));
    lap_slope[m] = fit_line(ns, flops).slope;
  }
  const double lap_ratio = lap_slope[Mode::Collapsed] / lap_slope[Mode::Standard];
  if (!(std::abs(lap_ratio - 0.51) <= 0.05)) o.fail("exact laplacian flop ratio " + fmt(lap_ratio) + " vs 0.51");

  std::vector<double> ss{4, 8, 16, 32};
  std::map<Mode, double> bih_slope;
  for (Mode m : {Mode::Standard, Mode::Collapsed}) {
    std::vector<double> flops;
    for (double s : ss) {
      CompiledOperator op = compile_biharmonic_stochastic(p, D, static_cast<std::size_t>(s), 0, m);
      flops.push_back(static_cast<double>(op.static_flops(16)));
    }
    bih_slope[m] = fit_line(ss, flops).slope;
  }
  const double bih_ratio = bih_slope[Mode::Collapsed] / bih_slope[Mode::Standard];
  if (!(std::abs(bih_ratio - 0.75) <= 0.05))
    o.fail("stochastic biharmonic flop ratio " + fmt(bih_ratio) + " vs 0.75");

  const Tensor x = testing::random_batch(64, D, 81);
  std::map<Mode, double> wall;
  for (Mode m : {Mode::Standard, Mode::Collapsed}) {
    CompiledOperator op = compile_laplacian(p, DirectionSet::basis(D), m);
    double best = INFINITY;
    for (int rep = 0; rep < 2; ++rep) {
      const auto t0 = Clock::now();
      (void)op(x);
      best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
    }
    wall[m] = best;
  }
  if (!(wall[Mode::Collapsed] <= wall[Mode::Standard]))
    o.fail("collapsed wall clock " + fmt(wall[Mode::Collapsed]) + " s > standard " + fmt(wall[Mode::Standard]) + " s");
  o.note("flop ratios laplacian " + fmt(lap_ratio) + ", stochastic biharmonic " + fmt(bih_ratio) +
         "; wall clock D=50 N=64 standard " + fmt(wall[Mode::Standard]) + " s, collapsed " +
         fmt(wall[Mode::Collapsed]) + " s");
  return o;
}

struct BlockStats {
  double mean = 0;
  double standard_error = 0;
};

BlockStats block_stats(const std::vector<double>& blocks) {
  const double n = static_cast<double>(blocks.size());
  const double mean = std::accumulate(blocks.begin(), blocks.end(), 0.0) / n;
  double ss = 0;
  for (double b : blocks) ss += (b - mean) * (b - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

// 9: stochastic estimators are unbiased within 4 standard errors.
Outcome stochastic_unbiased() {
  Outcome o;
  const std::size_t blocks = 100;
  const std::size_t per_block = 1000;

  // f(x) = 0.5 x^T A x with A symmetric, Laplacian = trace(A).
  const std::size_t D = 5;
  Tensor m = testing::random_batch(D, D, 90);
  Tensor a = Tensor::zeros({D, D});
  double trace = 0;
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) {
      a.at({i, j}) = 0.5 * (m.at({i, j}) + m.at({j, i}));
      if (i == j) trace += a.at({i, j});
    }
  Program quad;
  int x = quad.input();
  quad.set_output(quad.linear(quad.hadamard(x, quad.linear(x, a)), Tensor::full({1, D}, 0.5)));
  const Tensor x0 = testing::random_point(D, 91);
  std::vector<double> lap;
  for (std::size_t b = 0; b < blocks; ++b)
    lap.push_back(laplacian(quad, x0, Mode::Collapsed,
                            DirectionSet::sampled(Distribution::Gaussian, per_block, D, 9000 + b))[0]);
  const BlockStats ls = block_stats(lap);
  const double lz = std::abs(ls.mean - trace) / ls.standard_error;
  if (!(lz <= 4.0)) o.fail("hutchinson laplacian " + fmt(ls.mean) + " vs " + fmt(trace) + ", " + fmt(lz) + " SE");

  // f(x) = x_1^4 in R^3, biharmonic = 24.
  const std::size_t D4 = 3;
  Program quartic = testing::monomial({4, 0, 0});
  const Tensor y0 = testing::random_point(D4, 92);
  std::vector<double> bih;
  for (std::size_t b = 0; b < blocks; ++b)
    bih.push_back(biharmonic_stochastic(quartic, y0, per_block, 19000 + b, Mode::Collapsed)[0]);
  const BlockStats bs = block_stats(bih);
  const double bz = std::abs(bs.mean - 24.0) / bs.standard_error;
  if (!(bz <= 4.0)) o.fail("stochastic biharmonic " + fmt(bs.mean) + " vs 24, " + fmt(bz) + " SE");

  o.note("1e5 samples each; laplacian " + fmt(ls.mean, "%.4f") + " vs " + fmt(trace, "%.4f") + " (" + fmt(lz, "%.2f") +
         " SE), biharmonic " + fmt(bs.mean, "%.4f") + " vs 24 (" + fmt(bz, "%.2f") + " SE)");
  return o;
}

// 10: serialized sin 2-jet graph before and after collapsing.
Outcome rewrite_golden() {
  Outcome o;
  ir::Graph raw = capture(sin_program(), SeedLayout::full(2, 4));
  if (ir::serialize(raw) != testing::read_file(testing::golden_path("sin2_before.ir")))
    o.fail("captured graph differs from sin2_before.ir");
  if (ir::serialize(collapse(raw).graph) != testing::read_file(testing::golden_path("sin2_after.ir")))
    o.fail("collapsed graph differs from sin2_after.ir");
  o.note("sin2_before.ir and sin2_after.ir");
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace ctaylor

int main() {
  using namespace ctaylor;
  const std::vector<Criterion> criteria{
      {1, "faa-di-bruno-table", 1.0, faa_di_bruno_table},
      {2, "collapse-semantics", 30.0, collapse_preserves_semantics},
      {3, "gamma-coefficients", 1.0, gamma_coefficients},
      {4, "laplacian-oracle", 60.0, laplacian_matches_oracle},
      {5, "biharmonic-triple", 60.0, biharmonic_triple_agreement},
      {6, "cost-table", 1.0, cost_table},
      {7, "instrumented-counts", 10.0, instrumented_counts},
      {8, "performance-direction", 600.0, performance_direction},
      {9, "stochastic-unbiased", 60.0, stochastic_unbiased},
      {10, "rewrite-golden", 1.0, rewrite_golden},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    if (elapsed > c.budget_s) o.fail("took " + fmt(elapsed) + " s, budget " + fmt(c.budget_s) + " s");
    failures += !o.pass;
    std::printf("CRITERION %d %-22s %s (%.2f s) %s\n", c.id, c.name.c_str(), o.pass ? "PASS" : "FAIL", elapsed,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

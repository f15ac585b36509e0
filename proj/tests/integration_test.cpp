#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ctaylor/capture.hpp"
#include "ctaylor/collapse.hpp"
#include "ctaylor/mlp.hpp"
#include "ctaylor/operators.hpp"
#include "ctaylor/oracle.hpp"
#include "test_util.hpp"

namespace ctaylor {
namespace {

ir::Bindings operator_bindings(const ir::Graph& g, const Tensor& x0, std::uint64_t seed) {
  ir::Bindings b{{"x0", x0}};
  for (const ir::Node& n : g.nodes())
    if (n.op == ir::Op::Leaf && n.batched)
      b[n.name] = testing::random_batch(n.count * x0.dim(0), x0.dim(1), seed++).reshaped({n.count, x0.dim(0), x0.dim(1)});
  return b;
}

TEST(Pipeline, CaptureSerializeParseEvaluate) {
  const std::size_t D = 4;
  Program p = testing::random_program(D, 31, 10);
  for (const SeedLayout& layout : {SeedLayout::directional(2, 3), SeedLayout::full(4, 2)}) {
    ir::Graph raw = capture(p, layout);
    for (const ir::Graph& g : {raw, collapse(raw).graph}) {
      const std::string text = ir::serialize(g);
      ir::Graph parsed = ir::parse(text);
      EXPECT_EQ(parsed, g);
      EXPECT_EQ(ir::serialize(parsed), text);
      parsed.params() = g.params();
      ir::Bindings b = operator_bindings(g, testing::random_batch(3, D, 32), 33);
      ir::EvalResult want = ir::evaluate(g, b);
      ir::EvalResult got = ir::evaluate(parsed, b);
      ASSERT_EQ(got.outputs.size(), want.outputs.size());
      for (const auto& [name, value] : want.outputs) EXPECT_EQ(max_abs_diff(got.outputs.at(name), value), 0.0) << name;
      EXPECT_EQ(got.flops, want.flops);
    }
  }
}

TEST(Pipeline, ReferenceMlpLaplacianMatchesOracle) {
  const std::size_t D = 50;
  Program p = build_mlp(MlpSpec::reference(D));
  Tensor x = testing::random_batch(2, D, 40);
  for (Mode m : {Mode::Standard, Mode::Collapsed}) {
    Tensor got = laplacian(p, x, m, DirectionSet::basis(D));
    ASSERT_EQ(got.shape(), (Shape{2, 1}));
    for (std::size_t n = 0; n < 2; ++n)
      EXPECT_LT(relative_error(got.row(n), oracle_laplacian(p, x.row(n))), 1e-8) << to_string(m);
  }
}

TEST(Pipeline, CollapseIsAFixpoint) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t D = 1 + seed % 3;
    Program p = testing::random_program(D, 60 + seed);
    const int K = 1 + static_cast<int>(seed % 4);
    SeedLayout layout = seed % 2 ? SeedLayout::full(K, 2) : SeedLayout::directional(K, 3);
    CollapseResult once = collapse(capture(p, layout));
    CollapseResult twice = collapse(once.graph);
    EXPECT_EQ(twice.graph, once.graph) << seed;
    EXPECT_EQ(twice.report.replicates_moved, 0u) << seed;
    EXPECT_EQ(twice.report.sums_moved, 0u) << seed;
  }
}

TEST(Pipeline, TopCoefficientLeafFeedsOnlyASum) {
  for (int K = 1; K <= 4; ++K) {
    ir::Graph g = collapse(capture(testing::random_tanh_mlp(3, 70 + K), SeedLayout::full(K, 3))).graph;
    const ir::NodeId top = *g.find_leaf("x" + std::to_string(K) + "_r");
    std::size_t consumers = 0;
    for (const ir::Node& n : g.nodes())
      for (ir::NodeId in : n.inputs)
        if (in == top) {
          ++consumers;
          EXPECT_EQ(n.op, ir::Op::Sum) << "K=" << K;
        }
    EXPECT_EQ(consumers, 1u) << "K=" << K;
  }
}

// Laplacian of the Laplacian through central differences along each axis,
// Richardson-combined over steps h and h/2.
Tensor laplacian_of_laplacian(const Program& p, const Tensor& x, double h) {
  const std::size_t D = x.dim(0);
  auto lap = [&](const Tensor& at) { return laplacian(p, at, Mode::Collapsed, DirectionSet::basis(D)); };
  auto second = [&](double step) {
    Tensor total = Tensor::zeros(lap(x).shape());
    for (std::size_t d = 0; d < D; ++d) {
      Tensor e = Tensor::zeros({D});
      e[d] = step;
      Tensor diff = sub(add(lap(add(x, e)), lap(sub(x, e))), scale(lap(x), 2.0));
      total = add(total, scale(diff, 1.0 / (step * step)));
    }
    return total;
  };
  return scale(sub(scale(second(h / 2), 4.0), second(h)), 1.0 / 3.0);
}

TEST(Pipeline, BiharmonicIsLaplacianOfLaplacian) {
  for (std::size_t D : {2, 3}) {
    Program p = testing::random_tanh_mlp(D, 80 + D);
    Tensor x = testing::random_point(D, 81 + D, 0.5);
    Tensor nested = laplacian_of_laplacian(p, x, 2e-2);
    for (Mode m : {Mode::Standard, Mode::Collapsed})
      EXPECT_LT(relative_error(biharmonic_exact(p, x, m), nested), 1e-6) << "D=" << D;
  }
  // ||x||^4: Laplacian 4(D+2)||x||^2, biharmonic 8D(D+2).
  for (std::size_t D : {1, 2, 5}) {
    Program p = testing::fourth_power_norm(D);
    Tensor x = testing::random_point(D, 90 + D);
    const double want = 8.0 * D * (D + 2.0);
    EXPECT_NEAR(biharmonic_exact(p, x, Mode::Collapsed)[0], want, 1e-9 * want);
    EXPECT_LT(relative_error(laplacian_of_laplacian(p, x, 1e-1), Tensor::vector({want})), 1e-6);
  }
}

struct Command {
  int status;
  std::string out;
  std::string err;
};

Command run_bench(const std::string& args) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string tag = std::to_string(std::hash<std::string>{}(args));
  const auto out = dir / ("ctaylor_bench_" + tag + ".out");
  const auto err = dir / ("ctaylor_bench_" + tag + ".err");
  const std::string cmd = std::string(CTAYLOR_BENCH_EXE) + " " + args + " > " + out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  Command c{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, testing::read_file(out.string()), testing::read_file(err.string())};
  std::filesystem::remove(out);
  std::filesystem::remove(err);
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(BenchCli, ExactSweepWritesCsv) {
  Command c = run_bench("--op laplacian --mode both --exact --dim 4 --batch 2,4,8 --reps 1 --small --collapse");
  ASSERT_EQ(c.status, 0) << c.err;
  std::vector<std::string> rows = lines(c.out);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0], "op,mode,exact,dim,n,samples,seed,wall_ns_min,flops,vectors_per_node,slope_flag");
  EXPECT_EQ(rows[1].rfind("laplacian,standard,1,4,2,", 0), 0u);
  EXPECT_EQ(rows[4].back(), '1');
  EXPECT_EQ(rows[8].rfind("laplacian,collapsed,1,4,", 0), 0u);
  EXPECT_NE(c.err.find("replicates_moved,sums_moved"), std::string::npos);
}

TEST(BenchCli, StochasticBiharmonicSweepsSamples) {
  Command c = run_bench("--op biharmonic --mode collapsed --stochastic --dim 3 --batch 2 --samples 1,2,4 --reps 1 --small");
  ASSERT_EQ(c.status, 0) << c.err;
  std::vector<std::string> rows = lines(c.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1].rfind("biharmonic,collapsed,0,3,2,1,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("biharmonic,collapsed,0,3,2,4,", 0), 0u);
}

TEST(BenchCli, DumpGraph) {
  Command before = run_bench("--op laplacian --mode standard --dim 2 --small --dump-graph before");
  Command after = run_bench("--op laplacian --mode collapsed --dim 2 --small --dump-graph after");
  ASSERT_EQ(before.status, 0) << before.err;
  ASSERT_EQ(after.status, 0) << after.err;
  EXPECT_EQ(before.out.rfind("# ctaylor-ir v1", 0), 0u);
  EXPECT_EQ(after.out.rfind("# ctaylor-ir v1", 0), 0u);
  EXPECT_NO_THROW(ir::parse(before.out));
  EXPECT_LT(ir::parse(after.out).size(), ir::parse(before.out).size());
}

TEST(BenchCli, RejectsInvalidInvocations) {
  EXPECT_EQ(run_bench("--op laplacian --stochastic --dim 4 --batch 2 --samples 8 --small").status, 2);
  EXPECT_EQ(run_bench("--op biharmonic --stochastic --distribution rademacher --dim 3 --samples 2 --batch 2").status, 2);
  EXPECT_EQ(run_bench("--op nabla --dim 3").status, 2);
  EXPECT_NE(run_bench("--exact --stochastic --dim 3").status, 0);
}

}  // namespace
}  // namespace ctaylor

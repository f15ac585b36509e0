#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ctaylor/bench.hpp"
#include "ctaylor/collapse.hpp"

using namespace ctaylor;

int main(int argc, char** argv) {
  CLI::App app{"Standard vs collapsed Taylor mode on MLP differential operators"};
  std::string op_name = "laplacian";
  std::string mode_name = "both";
  bool exact_flag = false;
  bool stochastic_flag = false;
  std::string distribution = "rademacher";
  std::string out_path;
  std::string dump;
  bool show_collapse = false;
  BenchConfig config;

  app.add_option("--op", op_name, "laplacian | weighted-laplacian | biharmonic")
      ->check(CLI::IsMember({"laplacian", "weighted-laplacian", "biharmonic"}));
  app.add_option("--mode", mode_name, "standard | collapsed | both | oracle")
      ->check(CLI::IsMember({"standard", "collapsed", "both", "oracle"}));
  auto* exact_opt = app.add_flag("--exact", exact_flag, "exact operator (default)");
  app.add_flag("--stochastic", stochastic_flag, "Monte-Carlo estimate")->excludes(exact_opt);
  app.add_option("--dim", config.dim, "input dimension D");
  app.add_option("--batch", config.batches, "batch sizes")->delimiter(',');
  app.add_option("--samples", config.samples, "sample counts (stochastic)")->delimiter(',');
  app.add_option("--distribution", distribution, "rademacher | gaussian")
      ->check(CLI::IsMember({"rademacher", "gaussian"}));
  app.add_option("--seed", config.seed, "seed for parameters, inputs and directions");
  app.add_option("--reps", config.reps, "repetitions; the minimum wall time is reported");
  app.add_option("--out", out_path, "CSV file (stdout when omitted)");
  app.add_flag("--small", config.small, "D -> 64 -> 64 -> 1 instead of D -> 768 -> 768 -> 512 -> 512 -> 1");
  app.add_option("--dump-graph", dump, "print the IR before or after rewriting and exit")
      ->check(CLI::IsMember({"before", "after"}));
  app.add_flag("--collapse", show_collapse, "print rewrite statistics for each compiled operator to stderr");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    config.op = parse_operator(op_name);
    config.exact = !stochastic_flag;
    config.distribution = distribution == "gaussian" ? Distribution::Gaussian : Distribution::Rademacher;
    if (config.op == OperatorKind::Biharmonic && !config.exact && distribution != "gaussian" &&
        app.count("--distribution") == 0)
      config.distribution = Distribution::Gaussian;
    if (mode_name == "both")
      config.modes = {BenchMode::Standard, BenchMode::Collapsed};
    else
      config.modes = {parse_bench_mode(mode_name)};
    validate(config);

    const Program program = build_mlp(bench_mlp(config));
    const std::size_t s = config.exact ? 0 : config.samples.front();
    if (!dump.empty()) {
      const Mode mode = mode_name == "standard" ? Mode::Standard : Mode::Collapsed;
      const CompiledOperator op = compile_bench_operator(config, program, mode, s);
      std::cout << ir::serialize(dump == "before" ? op.captured() : op.graph());
      return 0;
    }
    if (show_collapse) {
      std::cerr << RewriteReport::csv_header() << '\n';
      const std::vector<std::size_t> sweep = config.exact ? std::vector<std::size_t>{0} : config.samples;
      for (std::size_t samples : sweep)
        std::cerr << compile_bench_operator(config, program, Mode::Collapsed, samples).report().csv_row() << '\n';
    }

    const std::vector<BenchRecord> rows = run_bench(config);
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw std::runtime_error("cannot open " + out_path);
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    os << bench_csv_header() << '\n';
    for (const BenchRecord& r : rows) os << to_csv(r) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

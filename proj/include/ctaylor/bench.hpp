#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctaylor/cost.hpp"
#include "ctaylor/mlp.hpp"
#include "ctaylor/operators.hpp"
#include "ctaylor/random.hpp"

namespace ctaylor {

class BenchConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class BenchMode { Standard, Collapsed, Oracle };

BenchMode parse_bench_mode(const std::string& name);  // "both" is expanded by the caller
std::string to_string(BenchMode mode);

struct BenchConfig {
  OperatorKind op = OperatorKind::Laplacian;
  std::vector<BenchMode> modes{BenchMode::Standard, BenchMode::Collapsed};
  bool exact = true;
  std::size_t dim = 50;
  std::vector<std::size_t> batches{8, 16, 32};
  std::vector<std::size_t> samples;  // swept when stochastic
  Distribution distribution = Distribution::Rademacher;
  std::uint64_t seed = 0;
  std::size_t reps = 5;
  bool small = false;
};

// Exact runs sweep the batch size; stochastic runs fix one batch size and
// sweep the sample count. Throws BenchConfigError for combinations that
// are rejected, including stochastic sample counts at which the collapsed
// exact operator is no more expensive.
void validate(const BenchConfig& config);

struct BenchRecord {
  std::string op;
  std::string mode;
  bool exact = true;
  std::size_t dim = 0;
  std::size_t n = 0;        // 0 on exact slope rows
  std::size_t samples = 0;  // 0 for exact rows and on stochastic slope rows
  std::uint64_t seed = 0;
  double wall_ns_min = 0;
  double flops = 0;
  double vectors_per_node = 0;
  bool slope = false;
  double r2 = 1.0;  // fit quality of slope rows, not written to CSV
};

std::string bench_csv_header();
std::string to_csv(const BenchRecord& record);

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 1.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

MlpSpec bench_mlp(const BenchConfig& config);
// sigma (D, D) used for the weighted Laplacian: diagonal with entries in [0.5, 1.5].
Tensor bench_sigma(std::size_t dim, std::uint64_t seed);
// (N, D) standard normal inputs.
Tensor bench_inputs(std::size_t batch, std::size_t dim, std::uint64_t seed);

CompiledOperator compile_bench_operator(const BenchConfig& config, const Program& program, Mode mode,
                                        std::size_t samples);

// One data row per (mode, sweep value) followed by one slope row per mode.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

}  // namespace ctaylor

#include "ctaylor/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <sstream>

#include "ctaylor/oracle.hpp"

namespace ctaylor {

BenchMode parse_bench_mode(const std::string& name) {
  if (name == "standard") return BenchMode::Standard;
  if (name == "collapsed") return BenchMode::Collapsed;
  if (name == "oracle") return BenchMode::Oracle;
  throw BenchConfigError("unknown mode '" + name + "'");
}

std::string to_string(BenchMode mode) {
  switch (mode) {
    case BenchMode::Standard: return "standard";
    case BenchMode::Collapsed: return "collapsed";
    case BenchMode::Oracle: return "oracle";
  }
  return "?";
}

void validate(const BenchConfig& c) {
  if (c.dim < 1) throw BenchConfigError("--dim must be at least 1");
  if (c.modes.empty()) throw BenchConfigError("no mode selected");
  if (c.reps < 1) throw BenchConfigError("--reps must be at least 1");
  if (c.batches.empty()) throw BenchConfigError("--batch needs at least one value");
  for (std::size_t n : c.batches)
    if (n < 1) throw BenchConfigError("batch sizes must be positive");
  if (c.exact) {
    if (!c.samples.empty()) throw BenchConfigError("--samples only applies to stochastic runs");
    return;
  }
  if (c.batches.size() != 1) throw BenchConfigError("stochastic runs fix a single batch size");
  if (c.samples.empty()) throw BenchConfigError("stochastic runs need --samples");
  if (std::find(c.modes.begin(), c.modes.end(), BenchMode::Oracle) != c.modes.end())
    throw BenchConfigError("the oracle mode is exact only");
  if (c.op == OperatorKind::Biharmonic && c.distribution != Distribution::Gaussian)
    throw BenchConfigError("the stochastic biharmonic estimator needs gaussian directions");
  const std::size_t exact_cost = count_vectors(c.op, true, Mode::Collapsed, c.dim, c.dim);
  for (std::size_t s : c.samples) {
    if (s < 1) throw BenchConfigError("sample counts must be positive");
    if (count_vectors(c.op, false, Mode::Collapsed, c.dim, s) >= exact_cost)
      throw BenchConfigError("S = " + std::to_string(s) + " costs at least as much as the exact collapsed operator (" +
                             std::to_string(exact_cost) + " vectors)");
  }
}

std::string bench_csv_header() {
  return "op,mode,exact,dim,n,samples,seed,wall_ns_min,flops,vectors_per_node,slope_flag";
}

namespace {

std::string number(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

}  // namespace

std::string to_csv(const BenchRecord& r) {
  std::ostringstream os;
  os << r.op << ',' << r.mode << ',' << (r.exact ? 1 : 0) << ',' << r.dim << ',' << r.n << ',' << r.samples << ','
     << r.seed << ',' << number(r.wall_ns_min) << ',' << number(r.flops) << ',' << number(r.vectors_per_node) << ','
     << (r.slope ? 1 : 0);
  return os.str();
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("a line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("a line fit needs two distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

MlpSpec bench_mlp(const BenchConfig& c) {
  return c.small ? MlpSpec::small(c.dim, c.seed) : MlpSpec::reference(c.dim, c.seed);
}

Tensor bench_sigma(std::size_t dim, std::uint64_t seed) {
  CounterRng rng(seed, 2);
  Tensor s = Tensor::zeros({dim, dim});
  for (std::size_t d = 0; d < dim; ++d) s.at({d, d}) = rng.uniform(0.5, 1.5);
  return s;
}

Tensor bench_inputs(std::size_t batch, std::size_t dim, std::uint64_t seed) {
  CounterRng rng(seed, 3);
  Tensor x = Tensor::zeros({batch, dim});
  for (std::size_t i = 0; i < x.numel(); ++i) x[i] = rng.gaussian();
  return x;
}

CompiledOperator compile_bench_operator(const BenchConfig& c, const Program& program, Mode mode,
                                        std::size_t samples) {
  switch (c.op) {
    case OperatorKind::Laplacian:
      return compile_laplacian(program,
                               c.exact ? DirectionSet::basis(c.dim)
                                       : DirectionSet::sampled(c.distribution, samples, c.dim, c.seed),
                               mode);
    case OperatorKind::WeightedLaplacian: {
      const Tensor sigma = bench_sigma(c.dim, c.seed);
      return compile_laplacian(program,
                               c.exact ? DirectionSet::columns(sigma)
                                       : DirectionSet::sampled_through(sigma, c.distribution, samples, c.seed),
                               mode);
    }
    case OperatorKind::Biharmonic:
      return c.exact ? compile_biharmonic_exact(program, c.dim, mode)
                     : compile_biharmonic_stochastic(program, c.dim, samples, c.seed, mode);
  }
  throw std::logic_error("unknown operator");
}

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double min_wall_ns(std::size_t reps, F&& fn) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    const auto t1 = Clock::now();
    best = std::min(best, static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
  }
  return best;
}

Tensor oracle_rows(const BenchConfig& c, const Program& program, const Tensor& x, const Tensor& sigma) {
  std::vector<Tensor> rows;
  for (std::size_t n = 0; n < x.dim(0); ++n) {
    const Tensor xn = x.row(n);
    switch (c.op) {
      case OperatorKind::Laplacian: rows.push_back(oracle_laplacian(program, xn)); break;
      case OperatorKind::WeightedLaplacian: {
        Tensor total;
        for (std::size_t d = 0; d < c.dim; ++d) {
          const double s = sigma.at({d, d});
          Tensor e = scale(oracle_entry(program, xn, {d, d}), s * s);
          total = d == 0 ? e : add(total, e);
        }
        rows.push_back(total);
        break;
      }
      case OperatorKind::Biharmonic: rows.push_back(oracle_biharmonic(program, xn)); break;
    }
  }
  return stack(rows);
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& c) {
  validate(c);
  const Program program = build_mlp(bench_mlp(c));
  const Tensor sigma = bench_sigma(c.dim, c.seed);
  std::vector<BenchRecord> out;
  for (BenchMode bm : c.modes) {
    BenchRecord base;
    base.op = to_string(c.op);
    base.mode = to_string(bm);
    base.exact = c.exact;
    base.dim = c.dim;
    base.seed = c.seed;
    std::vector<double> xs, wall, flops, vectors;
    const Mode mode = bm == BenchMode::Collapsed ? Mode::Collapsed : Mode::Standard;
    if (c.exact) {
      std::optional<CompiledOperator> op;
      if (bm != BenchMode::Oracle) op.emplace(compile_bench_operator(c, program, mode, 0));
      for (std::size_t n : c.batches) {
        const Tensor x = bench_inputs(n, c.dim, c.seed);
        BenchRecord r = base;
        r.n = n;
        if (op) {
          std::uint64_t f = 0;
          r.wall_ns_min = min_wall_ns(c.reps, [&] { f = op->run(x).flops; });
          r.flops = static_cast<double>(f);
          r.vectors_per_node = static_cast<double>(op->vectors_per_node());
        } else {
          r.wall_ns_min = min_wall_ns(c.reps, [&] { oracle_rows(c, program, x, sigma); });
        }
        xs.push_back(static_cast<double>(n));
        wall.push_back(r.wall_ns_min);
        flops.push_back(r.flops);
        vectors.push_back(r.vectors_per_node * static_cast<double>(n));
        out.push_back(r);
      }
    } else {
      const std::size_t n = c.batches.front();
      const Tensor x = bench_inputs(n, c.dim, c.seed);
      for (std::size_t s : c.samples) {
        const CompiledOperator op = compile_bench_operator(c, program, mode, s);
        BenchRecord r = base;
        r.n = n;
        r.samples = s;
        std::uint64_t f = 0;
        r.wall_ns_min = min_wall_ns(c.reps, [&] { f = op.run(x).flops; });
        r.flops = static_cast<double>(f);
        r.vectors_per_node = static_cast<double>(op.vectors_per_node());
        xs.push_back(static_cast<double>(s));
        wall.push_back(r.wall_ns_min);
        flops.push_back(r.flops);
        vectors.push_back(r.vectors_per_node);
        out.push_back(r);
      }
    }
    if (xs.size() >= 2) {
      BenchRecord r = base;
      r.slope = true;
      if (!c.exact) r.n = c.batches.front();
      r.wall_ns_min = fit_line(xs, wall).slope;
      const LineFit ff = fit_line(xs, flops);
      r.flops = ff.slope;
      r.r2 = ff.r2;
      r.vectors_per_node = fit_line(xs, vectors).slope;
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace ctaylor

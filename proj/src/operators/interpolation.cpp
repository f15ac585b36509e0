#include "ctaylor/interpolation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "ctaylor/jet.hpp"
#include "ctaylor/partitions.hpp"

namespace ctaylor {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using boost::multiprecision::cpp_int;

Rational generalized_binomial(const Rational& a, int b) {
  Rational r = 1;
  for (int l = 0; l < b; ++l) r *= (a - l) / Rational(b - l);
  return r;
}

Rational pow(const Rational& base, int e) {
  Rational r = 1;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

Fraction to_fraction(const Rational& r) {
  cpp_int num = boost::multiprecision::numerator(r);
  cpp_int den = boost::multiprecision::denominator(r);
  const cpp_int limit = std::numeric_limits<std::int64_t>::max();
  if (abs(num) > limit || den > limit) throw std::overflow_error("fraction does not fit in 64 bits");
  return {num.convert_to<std::int64_t>(), den.convert_to<std::int64_t>()};
}

Rational to_rational(const Fraction& f) { return Rational(f.num) / Rational(f.den); }

Rational exact_gamma(const std::vector<int>& i, const std::vector<int>& j) {
  const int norm_i = std::accumulate(i.begin(), i.end(), 0);
  Rational total = 0;
  std::vector<int> m(i.size(), 0);
  while (true) {
    // advance m through 0 <= m <= i componentwise (odometer)
    std::size_t pos = 0;
    while (pos < m.size() && m[pos] == i[pos]) m[pos++] = 0;
    if (pos == m.size()) break;
    ++m[pos];

    const int norm_m = std::accumulate(m.begin(), m.end(), 0);
    Rational term = (norm_i - norm_m) % 2 == 0 ? 1 : -1;
    for (std::size_t l = 0; l < i.size(); ++l) {
      term *= binomial(i[l], m[l]);
      term *= generalized_binomial(Rational(norm_i * m[l], norm_m), j[l]);
    }
    term *= pow(Rational(norm_m, norm_i), norm_i);
    total += term;
  }
  return total;
}

void compositions(int remaining, std::size_t parts, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
  if (prefix.size() + 1 == parts) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    prefix.push_back(v);
    compositions(remaining - v, parts, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::string Fraction::to_string() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Fraction gamma(const std::vector<int>& i, const std::vector<int>& j) {
  if (i.empty() || i.size() != j.size()) throw std::invalid_argument("gamma: index vectors must be nonempty and equal length");
  for (std::size_t l = 0; l < i.size(); ++l)
    if (i[l] < 0 || j[l] < 0) throw std::invalid_argument("gamma: negative index");
  const int norm_i = std::accumulate(i.begin(), i.end(), 0);
  if (norm_i == 0) throw std::invalid_argument("gamma: |i| must be positive");
  if (std::accumulate(j.begin(), j.end(), 0) != norm_i) throw std::invalid_argument("gamma: |j| must equal |i|");
  return to_fraction(exact_gamma(i, j));
}

InterpolationPlan InterpolationPlan::make(const std::vector<int>& i) {
  InterpolationPlan plan;
  plan.i = i;
  plan.degree = std::accumulate(i.begin(), i.end(), 0);
  if (i.empty() || plan.degree < 1 || plan.degree > kMaxDegree)
    throw std::out_of_range("interpolation degree must lie in [1, " + std::to_string(kMaxDegree) + "]");
  std::vector<std::vector<int>> js;
  std::vector<int> prefix;
  compositions(plan.degree, i.size(), prefix, js);
  for (auto& j : js) plan.members.push_back({j, gamma(i, j)});
  return plan;
}

std::vector<DirectionClass> reduce_on_basis(const InterpolationPlan& plan, std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("reduce_on_basis: dimension must be at least 1");
  using Sparse = std::vector<std::pair<std::size_t, int>>;  // (axis, coefficient), sorted by axis
  std::map<Sparse, Rational> weights;
  const std::size_t slots = plan.i.size();
  for (const PlanMember& member : plan.members) {
    if (member.gamma.num == 0) continue;
    const Rational g = to_rational(member.gamma);
    std::vector<std::size_t> d(slots, 0);
    while (true) {
      std::map<std::size_t, int> acc;
      for (std::size_t l = 0; l < slots; ++l)
        if (member.j[l] != 0) acc[d[l]] += member.j[l];
      weights[Sparse(acc.begin(), acc.end())] += g;
      std::size_t pos = 0;
      while (pos < slots && d[pos] == dim - 1) d[pos++] = 0;
      if (pos == slots) break;
      ++d[pos];
    }
  }

  std::map<std::pair<std::vector<int>, Rational>, std::vector<Sparse>, std::greater<>> classes;
  for (const auto& [dir, w] : weights) {
    if (w == 0) continue;
    std::vector<int> pattern;
    for (const auto& [axis, c] : dir) pattern.push_back(c);
    std::sort(pattern.rbegin(), pattern.rend());
    classes[{pattern, w}].push_back(dir);
  }

  std::vector<DirectionClass> out;
  for (const auto& [key, dirs] : classes) {
    Tensor m = Tensor::zeros({dirs.size(), dim});
    for (std::size_t r = 0; r < dirs.size(); ++r)
      for (const auto& [axis, c] : dirs[r]) m.at({r, axis}) = c;
    out.push_back({key.first, to_fraction(key.second), std::move(m)});
  }
  return out;
}

Tensor interpolation_identity_check(const Program& program, const Tensor& x0, const std::vector<Tensor>& vectors,
                                    const std::vector<int>& i) {
  if (vectors.size() != i.size()) throw std::invalid_argument("need one vector per index");
  InterpolationPlan plan = InterpolationPlan::make(i);
  std::vector<Tensor> dirs;
  for (const PlanMember& member : plan.members) {
    Tensor u = Tensor::zeros(x0.shape());
    for (std::size_t l = 0; l < i.size(); ++l) u = add(u, scale(vectors[l], member.j[l]));
    dirs.push_back(u);
  }
  Jet out = jet_eval(program, directional_jet(x0, stack(dirs), plan.degree));
  const Tensor& top = out.coeff(plan.degree);
  Tensor total = Tensor::zeros(top.trailing_shape());
  const double kfact = static_cast<double>(factorial(plan.degree));
  for (std::size_t m = 0; m < plan.members.size(); ++m)
    total = add(total, scale(top.row(m), plan.members[m].gamma.value() / kfact));
  return total;
}

}  // namespace ctaylor

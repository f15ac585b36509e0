#include "ctaylor/partitions.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace ctaylor {

std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

int Partition::count(int s) const { return static_cast<int>(std::count(parts.begin(), parts.end(), s)); }

std::string Partition::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(parts[i]);
  }
  return out + "}";
}

namespace {

void enumerate(int remaining, int max_part, std::vector<int>& prefix, std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back({std::vector<int>(prefix.rbegin(), prefix.rend()), 0});
    return;
  }
  for (int p = 1; p <= std::min(remaining, max_part); ++p) {
    prefix.push_back(p);
    enumerate(remaining - p, p, prefix, out);
    prefix.pop_back();
  }
}

std::vector<Partition> build(int k) {
  std::vector<Partition> out;
  std::vector<int> prefix;
  enumerate(k, k, prefix, out);
  std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) { return a.parts < b.parts; });
  for (Partition& p : out) {
    std::int64_t denom = 1;
    for (int s = 1; s <= k; ++s) {
      int n = p.count(s);
      denom *= factorial(n);
      for (int i = 0; i < n; ++i) denom *= factorial(s);
    }
    p.multiplicity = factorial(k) / denom;
  }
  return out;
}

}  // namespace

const std::vector<Partition>& partitions(int k) {
  static const std::array<std::vector<Partition>, kMaxDegree + 1> table = [] {
    std::array<std::vector<Partition>, kMaxDegree + 1> t;
    for (int d = 1; d <= kMaxDegree; ++d) t[d] = build(d);
    return t;
  }();
  if (k < 1 || k > kMaxDegree) {
    throw std::out_of_range("partition degree " + std::to_string(k) + " outside [1, " +
                            std::to_string(kMaxDegree) + "]");
  }
  return table[k];
}

}  // namespace ctaylor

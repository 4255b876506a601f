#include "bst/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bst {

BigCount sigs(unsigned bits, unsigned len, unsigned tau) {
  if (tau > len) throw std::invalid_argument("threshold exceeds sketch length");
  const BigCount other = (BigCount(1) << bits) - 1;
  BigCount total = 0;
  BigCount binom = 1; // C(len, k)
  BigCount power = 1; // other^k
  for (unsigned k = 0; k <= tau; ++k) {
    total += binom * power;
    binom = binom * (len - k) / (k + 1);
    power *= other;
  }
  return total;
}

namespace {

long double to_real(const BigCount& v) { return v.convert_to<long double>(); }

// count * n / 2^(bits * len)
long double expected_hits(const BigCount& count, long double n, unsigned bits, unsigned len) {
  return std::ldexp(to_real(count) * n, -static_cast<int>(bits * len));
}

} // namespace

long double CostEstimate::total_expected_candidates() const {
  long double total = 0;
  for (auto c : expected_candidates) total += c;
  return total;
}

CostEstimate cost_single(unsigned bits, unsigned len, unsigned tau, long double n) {
  CostEstimate e;
  e.bits = bits;
  e.length = len;
  e.tau = tau;
  e.n = n;
  e.signatures = sigs(bits, len, tau);
  e.expected_solutions = expected_hits(e.signatures, n, bits, len);
  e.cost_single = to_real(e.signatures) * len + e.expected_solutions;
  e.block_lengths = {len};
  e.block_thresholds = {static_cast<int>(tau)};
  e.expected_candidates = {e.expected_solutions};
  e.cost_multi = to_real(e.signatures) * len + static_cast<long double>(len) * e.expected_solutions;
  return e;
}

CostEstimate cost_multi(unsigned bits, unsigned len, unsigned tau, long double n, unsigned m,
                        ThresholdPolicy policy) {
  if (m == 0) throw std::invalid_argument("block count must be at least 1");
  CostEstimate e = cost_single(bits, len, tau, n);
  e.blocks = m;
  const auto parts = partition(SketchParams(bits, len), m);
  const auto thresholds = assign_thresholds(tau, m, policy);
  e.block_lengths.clear();
  e.expected_candidates.clear();
  e.block_thresholds = thresholds.thresholds;
  e.cost_multi = 0;
  for (unsigned j = 0; j < m; ++j) {
    const unsigned lj = parts[j].length;
    e.block_lengths.push_back(lj);
    const int tj = thresholds.thresholds[j];
    if (tj < 0) {
      e.expected_candidates.push_back(0);
      continue;
    }
    const BigCount s = sigs(bits, lj, static_cast<unsigned>(tj));
    const long double candidates = expected_hits(s, n, bits, lj);
    e.expected_candidates.push_back(candidates);
    e.cost_multi += to_real(s) * lj + static_cast<long double>(len) * candidates;
  }
  return e;
}

unsigned choose_blocks(unsigned bits, unsigned len, long double n, std::span<const unsigned> taus,
                       ThresholdPolicy policy, std::span<const unsigned> candidates) {
  static constexpr unsigned kDefault[] = {2, 3, 4};
  if (candidates.empty()) candidates = kDefault;
  unsigned best = 0;
  long double best_cost = std::numeric_limits<long double>::infinity();
  for (unsigned m : candidates) {
    m = std::min(std::max(m, 1U), len);
    long double total = 0;
    for (unsigned tau : taus) total += cost_multi(bits, len, std::min(tau, len), n, m, policy).cost_multi;
    if (best == 0 || total < best_cost) {
      best = m;
      best_cost = total;
    }
  }
  return best;
}

} // namespace bst

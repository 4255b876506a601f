#ifndef BST_COST_MODEL_HPP_
#define BST_COST_MODEL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bst/indexes.hpp"

namespace bst {

using BigCount = boost::multiprecision::cpp_int;

// Number of strings within Hamming distance tau of a length-len string
// over 2^bits symbols: sum_{k=0}^{tau} C(len, k) (2^bits - 1)^k.
BigCount sigs(unsigned bits, unsigned len, unsigned tau);

// Analytic per-query costs under uniformly distributed sketches.
// long double keeps the exponent range of values such as 256^256.
struct CostEstimate {
  unsigned bits = 0;
  unsigned length = 0;
  unsigned tau = 0;
  unsigned blocks = 1;
  long double n = 0;

  BigCount signatures = 0;   // sigs(b, L, tau)
  long double expected_solutions = 0;  // sigs n / 2^(bL)
  long double cost_single = 0;         // sigs L + expected_solutions

  std::vector<unsigned> block_lengths;
  std::vector<int> block_thresholds;
  std::vector<long double> expected_candidates; // per block, 0 if skipped
  long double cost_multi = 0;

  long double total_expected_candidates() const;
};

CostEstimate cost_single(unsigned bits, unsigned len, unsigned tau, long double n);
CostEstimate cost_multi(unsigned bits, unsigned len, unsigned tau, long double n, unsigned m,
                        ThresholdPolicy policy);

// The m in candidates (clamped to [1, len]) minimizing the summed
// multi-index cost over taus.
unsigned choose_blocks(unsigned bits, unsigned len, long double n, std::span<const unsigned> taus,
                       ThresholdPolicy policy, std::span<const unsigned> candidates = {});

} // namespace bst

#endif // BST_COST_MODEL_HPP_

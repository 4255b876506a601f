#include "bst/signatures.hpp"

#include <limits>
#include <stdexcept>

namespace bst {

std::vector<std::vector<Symbol>> enumerate_signatures(std::span<const Symbol> q, unsigned tau,
                                                      const SketchParams& params) {
  if (q.size() != params.length) throw std::invalid_argument("query length does not match");
  if (tau > params.length) throw std::invalid_argument("threshold exceeds sketch length");
  std::vector<Symbol> work(q.begin(), q.end());
  std::vector<std::vector<Symbol>> out;
  for_each_signature(
      std::span<Symbol>(work), tau, params.alphabet_size(), [](std::size_t, Symbol, Symbol) {},
      [&](std::span<const Symbol> s) { out.emplace_back(s.begin(), s.end()); });
  return out;
}

std::uint64_t signature_count_saturated(unsigned bits, unsigned len, unsigned tau) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const unsigned __int128 base = (1U << bits) - 1;
  unsigned __int128 term = 1; // C(len, k) * base^k
  unsigned __int128 total = 1;
  for (unsigned k = 1; k <= tau && k <= len; ++k) {
    // C(len,k) base^k = C(len,k-1) base^(k-1) * (len-k+1) / k * base
    term = term * (len - k + 1) / k * base;
    total += term;
    if (total > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(total);
}

} // namespace bst

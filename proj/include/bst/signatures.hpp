#ifndef BST_SIGNATURES_HPP_
#define BST_SIGNATURES_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bst/sketch.hpp"

namespace bst {

namespace detail {

template <class OnChange, class Visit>
void signatures_from(std::span<Symbol> work, std::size_t start, unsigned remaining,
                     unsigned sigma, OnChange& on_change, Visit& visit) {
  for (std::size_t p = start; p < work.size(); ++p) {
    const Symbol original = work[p];
    for (unsigned c = 0; c < sigma; ++c) {
      if (c == original) continue;
      on_change(p, work[p], static_cast<Symbol>(c));
      work[p] = static_cast<Symbol>(c);
      visit(std::span<const Symbol>(work));
      if (remaining > 1) signatures_from(work, p + 1, remaining - 1, sigma, on_change, visit);
    }
    on_change(p, work[p], original);
    work[p] = original;
  }
}

} // namespace detail

// Visits every string within Hamming distance tau of the contents of
// work exactly once (work itself first), modifying work in place and
// restoring it on return. on_change(pos, old, new) is called before each
// single-symbol edit so callers can maintain derived keys incrementally.
template <class OnChange, class Visit>
void for_each_signature(std::span<Symbol> work, unsigned tau, unsigned sigma,
                        OnChange&& on_change, Visit&& visit) {
  visit(std::span<const Symbol>(work));
  if (tau > 0) detail::signatures_from(work, 0, tau, sigma, on_change, visit);
}

// All signatures of q at threshold tau, in enumeration order.
std::vector<std::vector<Symbol>> enumerate_signatures(std::span<const Symbol> q, unsigned tau,
                                                      const SketchParams& params);

// sum_{k<=tau} C(len, k) (sigma-1)^k, saturating at UINT64_MAX.
std::uint64_t signature_count_saturated(unsigned bits, unsigned len, unsigned tau);

} // namespace bst

#endif // BST_SIGNATURES_HPP_

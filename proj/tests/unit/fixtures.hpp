#ifndef BST_TESTS_FIXTURES_HPP_
#define BST_TESTS_FIXTURES_HPP_

#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bst/sketch.hpp"

namespace bst::test {

// Letters a, b, c, ... map to symbols 0, 1, 2, ...
inline std::vector<Symbol> sym(std::string_view s) {
  std::vector<Symbol> out;
  for (char c : s) out.push_back(static_cast<Symbol>(c - 'a'));
  return out;
}

inline std::string letters(std::span<const Symbol> s) {
  std::string out;
  for (Symbol c : s) out += static_cast<char>('a' + c);
  return out;
}

inline SketchDataset from_strings(unsigned bits, const std::vector<std::string>& rows) {
  SketchDataset ds(SketchParams(bits, static_cast<unsigned>(rows.front().size())));
  for (const auto& r : rows) ds.push_back(sym(r));
  return ds;
}

// The eleven 2-bit sketches of length 5 used throughout the worked examples.
inline SketchDataset worked_dataset() {
  return from_strings(2, {"baabb", "aaaaa", "baaaa", "caaca", "caacc", "aaaaa", "caacc", "ddccc",
                          "abaab", "bcbcb", "ddddd"});
}

inline SketchDataset random_dataset(unsigned bits, unsigned len, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Symbol> symbols(n * len);
  for (auto& s : symbols) s = static_cast<Symbol>(rng() & ((1U << bits) - 1));
  return SketchDataset(SketchParams(bits, len), std::move(symbols));
}

inline std::vector<Symbol> random_sketch(const SketchParams& p, std::mt19937_64& rng) {
  std::vector<Symbol> out(p.length);
  for (auto& s : out) s = static_cast<Symbol>(rng() & (p.alphabet_size() - 1));
  return out;
}

} // namespace bst::test

#endif // BST_TESTS_FIXTURES_HPP_

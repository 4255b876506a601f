#ifndef BST_INGEST_HPP_
#define BST_INGEST_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "bst/sketch.hpp"

namespace bst {

struct MinhashParams {
  unsigned bits = 2;
  unsigned length = 64;
  std::uint64_t seed = 0;
};

// b-bit minhash: symbol j is the low b bits of min over tokens of h_j(token),
// with h_j a seeded 64-bit mixer keyed by j. Throws on an empty token set.
std::vector<Symbol> bbit_minhash(std::span<const std::uint64_t> tokens, const MinhashParams& p);

enum class SyntheticKind { kUniform, kPlanted };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kUniform;
  std::size_t n = 0;
  SketchParams params;
  std::uint64_t seed = 0;
  std::size_t clusters = 1; // planted only
  unsigned radius = 0;      // planted only: max mutated positions per member
};

// Uniform: i.i.d. symbols. Planted: the first min(clusters, n) rows are
// cluster centers; each later row i copies center (i - clusters) mod
// clusters and rewrites k in [0, radius] distinct positions with
// different symbols, so it lies at distance exactly k from its center.
SketchDataset generate(const SyntheticSpec& spec);

// "BSK1" sketch files.
SketchDataset read_sketches(std::istream& in);
SketchDataset read_sketches(const std::filesystem::path& path);
void write_sketches(const SketchDataset& ds, std::ostream& out);
void write_sketches(const SketchDataset& ds, const std::filesystem::path& path);

// One token set per non-blank line, whitespace-separated 64-bit hex values
// (an optional 0x prefix is accepted). Throws FormatError on bad tokens.
std::vector<std::vector<std::uint64_t>> read_token_sets(std::istream& in);

} // namespace bst

#endif // BST_INGEST_HPP_

#ifndef BST_SKETCH_HPP_
#define BST_SKETCH_HPP_

#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace bst {

class BinaryReader;
class BinaryWriter;

using Symbol = std::uint8_t;
// Sketch identifiers are 1-based row numbers of the dataset.
using SketchId = std::uint32_t;

inline constexpr unsigned kDistanceExceeded = std::numeric_limits<unsigned>::max();

struct SketchParams {
  unsigned bits = 1;   // b, bits per symbol
  unsigned length = 1; // L, symbols per sketch

  SketchParams() = default;
  SketchParams(unsigned b, unsigned l);

  unsigned alphabet_size() const { return 1U << bits; }
  // ceil(L / 64), words per vertical bit-plane.
  std::size_t plane_words() const { return (length + 63) / 64; }
  std::size_t vertical_words() const { return bits * plane_words(); }

  friend bool operator==(const SketchParams&, const SketchParams&) = default;
};

// n sketches stored row-major, one byte per symbol.
class SketchDataset {
public:
  SketchDataset() = default;
  explicit SketchDataset(SketchParams params) : params_(params) {}
  SketchDataset(SketchParams params, std::vector<Symbol> symbols);

  const SketchParams& params() const { return params_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // 0-based row index; the sketch id of row i is i + 1.
  std::span<const Symbol> row(std::size_t i) const {
    return {symbols_.data() + i * params_.length, params_.length};
  }
  const std::vector<Symbol>& symbols() const { return symbols_; }

  void push_back(std::span<const Symbol> sketch);
  void reserve(std::size_t n) { symbols_.reserve(n * params_.length); }

  // Columns [begin, begin + length) of every row, as a new dataset.
  SketchDataset columns(unsigned begin, unsigned length) const;

  friend bool operator==(const SketchDataset&, const SketchDataset&) = default;

private:
  SketchParams params_;
  std::size_t size_ = 0;
  std::vector<Symbol> symbols_;
};

// A sketch in vertical (bit-plane) format: plane p, word k lives at
// words[p * plane_words + k]. Plane 0 holds the most significant bit of
// each symbol; bit j of a plane's word k is position 64 * k + j.
struct VerticalRowView {
  std::span<const std::uint64_t> words;
  SketchParams params;
};

void encode_vertical(std::span<const Symbol> sketch, unsigned bits, std::span<std::uint64_t> out);
std::vector<std::uint64_t> encode_vertical(std::span<const Symbol> sketch, unsigned bits);
void decode_vertical(std::span<const std::uint64_t> words, SketchParams params,
                     std::span<Symbol> out);

// Vertical mirror of a SketchDataset.
class VerticalSketchSet {
public:
  VerticalSketchSet() = default;
  explicit VerticalSketchSet(const SketchDataset& ds);

  const SketchParams& params() const { return params_; }
  std::size_t size() const { return size_; }
  std::size_t stride() const { return stride_; }

  std::span<const std::uint64_t> row_words(std::size_t i) const {
    return {words_.data() + i * stride_, stride_};
  }
  VerticalRowView row(std::size_t i) const { return {row_words(i), params_}; }
  bool plane_bit(std::size_t i, unsigned plane, unsigned pos) const;
  std::vector<Symbol> horizontal(std::size_t i) const;

  std::size_t bytes() const { return words_.size() * sizeof(std::uint64_t); }

  void write(BinaryWriter& out) const;
  static VerticalSketchSet read(BinaryReader& in);

private:
  SketchParams params_;
  std::size_t size_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> words_;
};

VerticalSketchSet to_vertical(const SketchDataset& ds);

unsigned hamming_naive(std::span<const Symbol> s, std::span<const Symbol> q);

// OR over planes of (s' xor q'); its popcount is the Hamming distance.
std::vector<std::uint64_t> mismatch_mask(const VerticalRowView& s, const VerticalRowView& q);
unsigned hamming_vertical(const VerticalRowView& s, const VerticalRowView& q);
// Exact distance when it is <= limit, kDistanceExceeded otherwise.
unsigned hamming_vertical_bounded(const VerticalRowView& s, const VerticalRowView& q,
                                  unsigned limit);

namespace detail {

inline unsigned vertical_distance_bounded(const std::uint64_t* s, const std::uint64_t* q,
                                          unsigned bits, std::size_t plane_words,
                                          unsigned limit) {
  unsigned dist = 0;
  for (std::size_t k = 0; k < plane_words; ++k) {
    std::uint64_t diff = 0;
    for (unsigned p = 0; p < bits; ++p) {
      diff |= s[p * plane_words + k] ^ q[p * plane_words + k];
    }
    dist += static_cast<unsigned>(std::popcount(diff));
    if (dist > limit) return kDistanceExceeded;
  }
  return dist;
}

} // namespace detail

struct Block {
  unsigned begin = 0; // 0-based first symbol position
  unsigned length = 0;

  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockPartition {
  std::vector<Block> blocks;

  std::size_t size() const { return blocks.size(); }
  const Block& operator[](std::size_t j) const { return blocks[j]; }
};

// Equal-length contiguous blocks; the first L mod m blocks get one extra
// symbol.
BlockPartition partition(const SketchParams& params, unsigned m);

} // namespace bst

#endif // BST_SKETCH_HPP_

#ifndef BST_BIT_VECTOR_HPP_
#define BST_BIT_VECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bst {

class BinaryReader;
class BinaryWriter;

// Accumulates bits before a RankSelectBitVector is built.
class BitVectorBuilder {
public:
  BitVectorBuilder() = default;
  explicit BitVectorBuilder(std::size_t size, bool value = false);

  void push_back(bool bit);
  void set(std::size_t pos, bool bit = true); // 0-based
  bool get(std::size_t pos) const;            // 0-based

  std::size_t size() const { return size_; }
  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t> release() { size_ = 0; return std::move(words_); }

private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

// Immutable bit array with rank and select support.
//
// Positions in the public API are 1-based: rank(i) counts the 1s in
// B[1..i] and select(k) is the position of the k-th 1, or size()+1 when
// there are fewer than k ones.
//
// Layout: 512-bit blocks, each with a 64-bit absolute count and seven
// 9-bit relative word counts (128 bits of rank overhead per block), plus
// one block hint for every kSelectSample ones.
class RankSelectBitVector {
public:
  RankSelectBitVector() { build_index(); }
  explicit RankSelectBitVector(BitVectorBuilder&& builder);
  RankSelectBitVector(std::vector<std::uint64_t> words, std::size_t size);

  static RankSelectBitVector from_bits(std::span<const bool> bits);

  std::size_t size() const { return size_; }
  std::size_t num_ones() const { return num_ones_; }

  bool access(std::size_t i) const; // 1-based
  std::size_t rank(std::size_t i) const;
  std::size_t select(std::size_t k) const;

  // Unchecked variants used on hot paths: bit(pos) and rank0(pos) take
  // 0-based positions (rank0(p) = rank(p)); select0 takes k >= 1 and
  // returns the 0-based position (size() when out of ones).
  bool bit(std::size_t pos) const {
    return (words_[pos >> 6] >> (pos & 63)) & 1ULL;
  }
  std::size_t rank0(std::size_t pos) const;
  std::size_t select0(std::size_t k) const;

  std::span<const std::uint64_t> words() const { return words_; }

  // Payload = size() bits; auxiliary = rank/select acceleration tables.
  std::size_t payload_bits() const { return size_; }
  std::size_t auxiliary_bits() const;

  void write(BinaryWriter& out) const;
  static RankSelectBitVector read(BinaryReader& in);

private:
  static constexpr std::size_t kBlockBits = 512;
  static constexpr std::size_t kWordsPerBlock = kBlockBits / 64;
  static constexpr std::size_t kSelectSample = 4096;

  void build_index();

  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> block_ranks_;  // absolute count before block
  std::vector<std::uint64_t> block_counts_; // packed 9-bit word prefix counts
  std::vector<std::uint64_t> select_hints_; // block containing 1 + j*sample
  std::size_t size_ = 0;
  std::size_t num_ones_ = 0;
};

// Position (0-based) of the k-th set bit (k 0-based) of a word.
std::size_t select_in_word(std::uint64_t word, std::size_t k);

} // namespace bst

#endif // BST_BIT_VECTOR_HPP_

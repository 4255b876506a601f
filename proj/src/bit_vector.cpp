#include "bst/bit_vector.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

#include "bst/binary_io.hpp"

namespace bst {

BitVectorBuilder::BitVectorBuilder(std::size_t size, bool value)
    : words_((size + 63) / 64, value ? ~0ULL : 0ULL), size_(size) {
  if (value && (size & 63) != 0) words_.back() &= (1ULL << (size & 63)) - 1;
}

void BitVectorBuilder::push_back(bool bit) {
  if ((size_ & 63) == 0) words_.push_back(0);
  if (bit) words_.back() |= 1ULL << (size_ & 63);
  ++size_;
}

void BitVectorBuilder::set(std::size_t pos, bool bit) {
  if (bit) {
    words_[pos >> 6] |= 1ULL << (pos & 63);
  } else {
    words_[pos >> 6] &= ~(1ULL << (pos & 63));
  }
}

bool BitVectorBuilder::get(std::size_t pos) const { return (words_[pos >> 6] >> (pos & 63)) & 1ULL; }

std::size_t select_in_word(std::uint64_t word, std::size_t k) {
#if defined(__BMI2__)
  return static_cast<std::size_t>(std::countr_zero(_pdep_u64(1ULL << k, word)));
#else
  // Byte-wise prefix popcounts, then finish inside the selected byte.
  std::uint64_t s = word - ((word >> 1) & 0x5555555555555555ULL);
  s = (s & 0x3333333333333333ULL) + ((s >> 2) & 0x3333333333333333ULL);
  s = (s + (s >> 4)) & 0x0F0F0F0F0F0F0F0FULL;
  std::uint64_t prefix = s * 0x0101010101010101ULL;
  std::size_t byte = 0;
  std::size_t before = 0;
  for (; byte < 8; ++byte) {
    std::size_t upto = (prefix >> (8 * byte)) & 0xFF;
    if (upto > k) break;
    before = upto;
  }
  std::uint64_t b = (word >> (8 * byte)) & 0xFF;
  for (std::size_t r = k - before; r > 0; --r) b &= b - 1;
  return 8 * byte + static_cast<std::size_t>(std::countr_zero(b));
#endif
}

RankSelectBitVector::RankSelectBitVector(BitVectorBuilder&& builder) {
  size_ = builder.size();
  words_ = builder.release();
  build_index();
}

RankSelectBitVector::RankSelectBitVector(std::vector<std::uint64_t> words, std::size_t size)
    : words_(std::move(words)), size_(size) {
  if (words_.size() != (size_ + 63) / 64) {
    throw std::invalid_argument("bit vector word count does not match its length");
  }
  if ((size_ & 63) != 0) words_.back() &= (1ULL << (size_ & 63)) - 1;
  build_index();
}

RankSelectBitVector RankSelectBitVector::from_bits(std::span<const bool> bits) {
  BitVectorBuilder b;
  for (bool bit : bits) b.push_back(bit);
  return RankSelectBitVector(std::move(b));
}

void RankSelectBitVector::build_index() {
  const std::size_t num_blocks = (words_.size() + kWordsPerBlock - 1) / kWordsPerBlock;
  block_ranks_.assign(num_blocks + 1, 0);
  block_counts_.assign(num_blocks, 0);
  select_hints_.clear();

  std::uint64_t total = 0;
  std::uint64_t next_hint = 1; // the rank whose block the next hint records
  for (std::size_t blk = 0; blk < num_blocks; ++blk) {
    block_ranks_[blk] = total;
    std::uint64_t rel = 0;
    std::uint64_t packed = 0;
    for (std::size_t w = 0; w < kWordsPerBlock; ++w) {
      std::size_t idx = blk * kWordsPerBlock + w;
      if (w > 0) packed |= rel << (9 * (w - 1));
      if (idx < words_.size()) rel += static_cast<std::uint64_t>(std::popcount(words_[idx]));
    }
    block_counts_[blk] = packed;
    total += rel;
    while (next_hint <= total) {
      select_hints_.push_back(blk);
      next_hint += kSelectSample;
    }
  }
  block_ranks_[num_blocks] = total;
  num_ones_ = total;
}

bool RankSelectBitVector::access(std::size_t i) const {
  if (i == 0 || i > size_) {
    throw std::out_of_range("access position " + std::to_string(i) + " outside [1, " +
                            std::to_string(size_) + "]");
  }
  return bit(i - 1);
}

std::size_t RankSelectBitVector::rank0(std::size_t pos) const {
  if (pos >= size_) return num_ones_;
  const std::size_t word = pos >> 6;
  const std::size_t blk = word / kWordsPerBlock;
  const std::size_t in_block = word % kWordsPerBlock;
  std::size_t r = block_ranks_[blk];
  if (in_block > 0) r += (block_counts_[blk] >> (9 * (in_block - 1))) & 0x1FF;
  const std::size_t offset = pos & 63;
  if (offset > 0) r += static_cast<std::size_t>(std::popcount(words_[word] << (64 - offset)));
  return r;
}

std::size_t RankSelectBitVector::rank(std::size_t i) const {
  if (i > size_) {
    throw std::out_of_range("rank position " + std::to_string(i) + " outside [0, " +
                            std::to_string(size_) + "]");
  }
  return rank0(i);
}

std::size_t RankSelectBitVector::select0(std::size_t k) const {
  if (k > num_ones_) return size_;
  const std::size_t sample = (k - 1) / kSelectSample;
  std::size_t lo = select_hints_[sample];
  std::size_t hi = sample + 1 < select_hints_.size() ? select_hints_[sample + 1] + 1
                                                     : block_ranks_.size() - 1;
  // Last block whose preceding count is below k.
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (block_ranks_[mid] < k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::size_t remaining = k - block_ranks_[lo];
  const std::uint64_t packed = block_counts_[lo];
  std::size_t in_block = 0;
  for (std::size_t w = kWordsPerBlock - 1; w > 0; --w) {
    std::size_t before = (packed >> (9 * (w - 1))) & 0x1FF;
    if (before < remaining) {
      in_block = w;
      remaining -= before;
      break;
    }
  }
  const std::size_t word = lo * kWordsPerBlock + in_block;
  return word * 64 + select_in_word(words_[word], remaining - 1);
}

std::size_t RankSelectBitVector::select(std::size_t k) const {
  if (k == 0) throw std::invalid_argument("select rank must be at least 1");
  return select0(k) + 1;
}

std::size_t RankSelectBitVector::auxiliary_bits() const {
  return 64 * (block_ranks_.size() + block_counts_.size() + select_hints_.size());
}

void RankSelectBitVector::write(BinaryWriter& out) const {
  out.u64(size_);
  for (auto w : words_) out.u64(w);
}

RankSelectBitVector RankSelectBitVector::read(BinaryReader& in) {
  auto size = in.u64();
  if (size > (1ULL << 46)) in.fail("implausible bit vector length");
  std::vector<std::uint64_t> words((size + 63) / 64);
  for (auto& w : words) w = in.u64();
  return RankSelectBitVector(std::move(words), size);
}

} // namespace bst

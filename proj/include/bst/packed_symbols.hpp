#ifndef BST_PACKED_SYMBOLS_HPP_
#define BST_PACKED_SYMBOLS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bst/binary_io.hpp"

namespace bst {

// Fixed-width array of b-bit symbols packed into 64-bit words.
class PackedSymbols {
public:
  PackedSymbols() = default;
  PackedSymbols(unsigned width, std::size_t size)
      : words_((static_cast<std::size_t>(width) * size + 63) / 64 + 1, 0),
        size_(size), width_(width) {}

  std::size_t size() const { return size_; }
  unsigned width() const { return width_; }

  std::uint8_t operator[](std::size_t i) const {
    const std::size_t bitpos = i * width_;
    const std::size_t w = bitpos >> 6;
    const unsigned off = bitpos & 63;
    std::uint64_t v = words_[w] >> off;
    if (off + width_ > 64) v |= words_[w + 1] << (64 - off);
    return static_cast<std::uint8_t>(v & mask());
  }

  void set(std::size_t i, std::uint8_t value) {
    const std::size_t bitpos = i * width_;
    const std::size_t w = bitpos >> 6;
    const unsigned off = bitpos & 63;
    const std::uint64_t v = value & mask();
    words_[w] = (words_[w] & ~(mask() << off)) | (v << off);
    if (off + width_ > 64) {
      const unsigned spill = off + width_ - 64;
      words_[w + 1] = (words_[w + 1] & ~((1ULL << spill) - 1)) | (v >> (64 - off));
    }
  }

  // Exact payload, width * size bits.
  std::size_t payload_bits() const { return static_cast<std::size_t>(width_) * size_; }

  void write(BinaryWriter& out) const {
    out.u8(static_cast<std::uint8_t>(width_));
    out.u64(size_);
    out.words(words_);
  }

  static PackedSymbols read(BinaryReader& in) {
    PackedSymbols p;
    p.width_ = in.u8();
    if (p.width_ < 1 || p.width_ > 8) in.fail("symbol width out of range");
    p.size_ = in.u64();
    p.words_ = in.words();
    if (p.words_.size() != (static_cast<std::size_t>(p.width_) * p.size_ + 63) / 64 + 1) {
      in.fail("packed symbol array has inconsistent length");
    }
    return p;
  }

private:
  std::uint64_t mask() const { return (1ULL << width_) - 1; }

  // One trailing padding word so reads never straddle the end.
  std::vector<std::uint64_t> words_{0};
  std::size_t size_ = 0;
  unsigned width_ = 1;
};

} // namespace bst

#endif // BST_PACKED_SYMBOLS_HPP_

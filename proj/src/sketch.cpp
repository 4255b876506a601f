#include "bst/sketch.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "bst/binary_io.hpp"

namespace bst {

SketchParams::SketchParams(unsigned b, unsigned l) : bits(b), length(l) {
  if (b < 1 || b > 8) {
    throw std::invalid_argument("bits per symbol must be in [1, 8], got " + std::to_string(b));
  }
  if (l < 1 || l > 256) {
    throw std::invalid_argument("sketch length must be in [1, 256], got " + std::to_string(l));
  }
}

SketchDataset::SketchDataset(SketchParams params, std::vector<Symbol> symbols)
    : params_(params), symbols_(std::move(symbols)) {
  if (symbols_.size() % params_.length != 0) {
    throw std::invalid_argument("symbol count is not a multiple of the sketch length");
  }
  size_ = symbols_.size() / params_.length;
  const unsigned sigma = params_.alphabet_size();
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] >= sigma) {
      throw std::invalid_argument("symbol " + std::to_string(symbols_[i]) + " at index " +
                                  std::to_string(i) + " exceeds the alphabet");
    }
  }
}

void SketchDataset::push_back(std::span<const Symbol> sketch) {
  if (sketch.size() != params_.length) {
    throw std::invalid_argument("sketch length " + std::to_string(sketch.size()) +
                                " does not match " + std::to_string(params_.length));
  }
  for (Symbol c : sketch) {
    if (c >= params_.alphabet_size()) {
      throw std::invalid_argument("symbol " + std::to_string(c) + " exceeds the alphabet");
    }
  }
  symbols_.insert(symbols_.end(), sketch.begin(), sketch.end());
  ++size_;
}

SketchDataset SketchDataset::columns(unsigned begin, unsigned length) const {
  if (length == 0 || begin + length > params_.length) {
    throw std::invalid_argument("column range outside the sketch");
  }
  SketchDataset out(SketchParams(params_.bits, length));
  out.symbols_.resize(size_ * length);
  for (std::size_t i = 0; i < size_; ++i) {
    auto r = row(i);
    std::copy(r.begin() + begin, r.begin() + begin + length, out.symbols_.begin() + i * length);
  }
  out.size_ = size_;
  return out;
}

void encode_vertical(std::span<const Symbol> sketch, unsigned bits, std::span<std::uint64_t> out) {
  const std::size_t plane_words = (sketch.size() + 63) / 64;
  std::fill(out.begin(), out.end(), 0);
  for (std::size_t j = 0; j < sketch.size(); ++j) {
    const std::uint64_t bit = 1ULL << (j & 63);
    for (unsigned p = 0; p < bits; ++p) {
      if ((sketch[j] >> (bits - 1 - p)) & 1U) out[p * plane_words + (j >> 6)] |= bit;
    }
  }
}

std::vector<std::uint64_t> encode_vertical(std::span<const Symbol> sketch, unsigned bits) {
  std::vector<std::uint64_t> out(bits * ((sketch.size() + 63) / 64));
  encode_vertical(sketch, bits, out);
  return out;
}

void decode_vertical(std::span<const std::uint64_t> words, SketchParams params,
                     std::span<Symbol> out) {
  const std::size_t plane_words = params.plane_words();
  for (unsigned j = 0; j < params.length; ++j) {
    unsigned c = 0;
    for (unsigned p = 0; p < params.bits; ++p) {
      c = (c << 1) | ((words[p * plane_words + (j >> 6)] >> (j & 63)) & 1U);
    }
    out[j] = static_cast<Symbol>(c);
  }
}

VerticalSketchSet::VerticalSketchSet(const SketchDataset& ds)
    : params_(ds.params()), size_(ds.size()), stride_(ds.params().vertical_words()),
      words_(ds.size() * stride_, 0) {
  for (std::size_t i = 0; i < size_; ++i) {
    encode_vertical(ds.row(i), params_.bits, {words_.data() + i * stride_, stride_});
  }
}

bool VerticalSketchSet::plane_bit(std::size_t i, unsigned plane, unsigned pos) const {
  return (row_words(i)[plane * params_.plane_words() + (pos >> 6)] >> (pos & 63)) & 1U;
}

std::vector<Symbol> VerticalSketchSet::horizontal(std::size_t i) const {
  std::vector<Symbol> out(params_.length);
  decode_vertical(row_words(i), params_, out);
  return out;
}

void VerticalSketchSet::write(BinaryWriter& out) const {
  out.tag("VERT");
  out.u8(static_cast<std::uint8_t>(params_.bits));
  out.u16(static_cast<std::uint16_t>(params_.length));
  out.u64(size_);
  out.words(words_);
}

VerticalSketchSet VerticalSketchSet::read(BinaryReader& in) {
  in.expect_tag("VERT");
  VerticalSketchSet v;
  const unsigned bits = in.u8();
  const unsigned len = in.u16();
  if (bits < 1 || bits > 8 || len < 1 || len > 256) in.fail("sketch parameters out of range");
  v.params_ = SketchParams(bits, len);
  v.size_ = in.u64();
  v.stride_ = v.params_.vertical_words();
  v.words_ = in.words();
  if (v.words_.size() != v.size_ * v.stride_) in.fail("vertical store size mismatch");
  return v;
}

VerticalSketchSet to_vertical(const SketchDataset& ds) { return VerticalSketchSet(ds); }

unsigned hamming_naive(std::span<const Symbol> s, std::span<const Symbol> q) {
  if (s.size() != q.size()) {
    throw std::invalid_argument("Hamming distance of sketches with lengths " +
                                std::to_string(s.size()) + " and " + std::to_string(q.size()));
  }
  unsigned d = 0;
  for (std::size_t i = 0; i < s.size(); ++i) d += s[i] != q[i];
  return d;
}

namespace {

void check_compatible(const VerticalRowView& s, const VerticalRowView& q) {
  if (!(s.params == q.params)) {
    throw std::invalid_argument("vertical rows encoded under different parameters");
  }
  const std::size_t expected = s.params.vertical_words();
  if (s.words.size() != expected || q.words.size() != expected) {
    throw std::invalid_argument("vertical row size does not match its parameters");
  }
}

} // namespace

std::vector<std::uint64_t> mismatch_mask(const VerticalRowView& s, const VerticalRowView& q) {
  check_compatible(s, q);
  const std::size_t w = s.params.plane_words();
  std::vector<std::uint64_t> bits(w, 0);
  for (unsigned p = 0; p < s.params.bits; ++p) {
    for (std::size_t k = 0; k < w; ++k) bits[k] |= s.words[p * w + k] ^ q.words[p * w + k];
  }
  return bits;
}

unsigned hamming_vertical(const VerticalRowView& s, const VerticalRowView& q) {
  check_compatible(s, q);
  return detail::vertical_distance_bounded(s.words.data(), q.words.data(), s.params.bits,
                                           s.params.plane_words(), kDistanceExceeded - 1);
}

unsigned hamming_vertical_bounded(const VerticalRowView& s, const VerticalRowView& q,
                                  unsigned limit) {
  check_compatible(s, q);
  return detail::vertical_distance_bounded(s.words.data(), q.words.data(), s.params.bits,
                                           s.params.plane_words(), limit);
}

BlockPartition partition(const SketchParams& params, unsigned m) {
  if (m < 1 || m > params.length) {
    throw std::invalid_argument("block count " + std::to_string(m) + " outside [1, " +
                                std::to_string(params.length) + "]");
  }
  BlockPartition out;
  const unsigned base = params.length / m;
  const unsigned extra = params.length % m;
  unsigned pos = 0;
  for (unsigned j = 0; j < m; ++j) {
    unsigned len = base + (j < extra ? 1 : 0);
    out.blocks.push_back({pos, len});
    pos += len;
  }
  return out;
}

} // namespace bst

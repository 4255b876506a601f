#include "bst/binary_io.hpp"

#include <bit>
#include <cstring>

#include "bst/errors.hpp"

namespace bst {

void BinaryWriter::bytes(std::span<const std::uint8_t> data) {
  os_.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  written_ += data.size();
}

void BinaryWriter::u16(std::uint16_t v) {
  std::array<std::uint8_t, 2> b{static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8)};
  bytes(b);
}

void BinaryWriter::u32(std::uint32_t v) {
  std::array<std::uint8_t, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  bytes(b);
}

void BinaryWriter::u64(std::uint64_t v) {
  std::array<std::uint8_t, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  bytes(b);
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::tag(std::string_view four_chars) {
  std::array<std::uint8_t, 4> b{};
  std::memcpy(b.data(), four_chars.data(), std::min<std::size_t>(4, four_chars.size()));
  bytes(b);
}

void BinaryWriter::words(std::span<const std::uint64_t> data) {
  u64(data.size());
  if constexpr (std::endian::native == std::endian::little) {
    bytes({reinterpret_cast<const std::uint8_t*>(data.data()), data.size() * 8});
  } else {
    for (auto w : data) u64(w);
  }
}

void BinaryWriter::u32s(std::span<const std::uint32_t> data) {
  u64(data.size());
  if constexpr (std::endian::native == std::endian::little) {
    bytes({reinterpret_cast<const std::uint8_t*>(data.data()), data.size() * 4});
  } else {
    for (auto v : data) u32(v);
  }
}

void BinaryReader::fail(const std::string& what) const { throw FormatError(what, read_); }

void BinaryReader::bytes(std::span<std::uint8_t> out) {
  is_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(out.size()));
  auto got = static_cast<std::size_t>(is_.gcount());
  if (got != out.size()) {
    read_ += got;
    fail("unexpected end of file");
  }
  read_ += got;
}

std::uint8_t BinaryReader::u8() {
  std::uint8_t v;
  bytes(std::span<std::uint8_t>(&v, 1));
  return v;
}

std::uint16_t BinaryReader::u16() {
  std::array<std::uint8_t, 2> b{};
  bytes(b);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t BinaryReader::u32() {
  std::array<std::uint8_t, 4> b{};
  bytes(b);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t BinaryReader::u64() {
  std::array<std::uint8_t, 8> b{};
  bytes(b);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::tag() {
  std::array<std::uint8_t, 4> b{};
  bytes(b);
  return std::string(b.begin(), b.end());
}

void BinaryReader::expect_tag(std::string_view four_chars) {
  auto start = read_;
  auto got = tag();
  if (got != four_chars) {
    throw FormatError("expected section '" + std::string(four_chars) + "', found '" + got + "'",
                      start);
  }
}

namespace {

// Guards against absurd length prefixes before allocating.
constexpr std::uint64_t kMaxElements = 1ULL << 40;

} // namespace

std::vector<std::uint64_t> BinaryReader::words() {
  auto n = u64();
  if (n > kMaxElements) fail("implausible array length");
  std::vector<std::uint64_t> out(n);
  if constexpr (std::endian::native == std::endian::little) {
    bytes({reinterpret_cast<std::uint8_t*>(out.data()), n * 8});
  } else {
    for (auto& w : out) w = u64();
  }
  return out;
}

std::vector<std::uint32_t> BinaryReader::u32s() {
  auto n = u64();
  if (n > kMaxElements) fail("implausible array length");
  std::vector<std::uint32_t> out(n);
  if constexpr (std::endian::native == std::endian::little) {
    bytes({reinterpret_cast<std::uint8_t*>(out.data()), n * 4});
  } else {
    for (auto& v : out) v = u32();
  }
  return out;
}

} // namespace bst

#ifndef BST_BINARY_IO_HPP_
#define BST_BINARY_IO_HPP_

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bst {

// Little-endian primitive writer that counts emitted bytes.
class BinaryWriter {
public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  void bytes(std::span<const std::uint8_t> data);
  void u8(std::uint8_t v) { bytes(std::span<const std::uint8_t>(&v, 1)); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void tag(std::string_view four_chars);
  void words(std::span<const std::uint64_t> data); // u64 count + words
  void u32s(std::span<const std::uint32_t> data);  // u64 count + values

  std::uint64_t position() const { return written_; }

private:
  std::ostream& os_;
  std::uint64_t written_ = 0;
};

// Counterpart of BinaryWriter; throws FormatError on truncation.
class BinaryReader {
public:
  explicit BinaryReader(std::istream& is) : is_(is) {}

  void bytes(std::span<std::uint8_t> out);
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string tag();
  void expect_tag(std::string_view four_chars);
  std::vector<std::uint64_t> words();
  std::vector<std::uint32_t> u32s();

  std::uint64_t position() const { return read_; }
  [[noreturn]] void fail(const std::string& what) const;

private:
  std::istream& is_;
  std::uint64_t read_ = 0;
};

} // namespace bst

#endif // BST_BINARY_IO_HPP_

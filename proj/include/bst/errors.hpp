#ifndef BST_ERRORS_HPP_
#define BST_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bst {

// Malformed sketch or index file. offset is the byte position where the
// problem was detected.
class FormatError : public std::runtime_error {
public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

private:
  std::uint64_t offset_;
};

} // namespace bst

#endif // BST_ERRORS_HPP_

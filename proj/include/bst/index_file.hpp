#ifndef BST_INDEX_FILE_HPP_
#define BST_INDEX_FILE_HPP_

#include <filesystem>
#include <istream>
#include <memory>
#include <ostream>

#include "bst/indexes.hpp"

namespace bst {

// "BST1" container: magic, a u8 IndexKind tag, then the variant payload.
// The layout is described in docs/index_format.md.
void save_index(const SimilarityIndex& index, std::ostream& out);
void save_index(const SimilarityIndex& index, const std::filesystem::path& path);

// Throws FormatError on a malformed or truncated container.
std::unique_ptr<SimilarityIndex> load_index(std::istream& in);
std::unique_ptr<SimilarityIndex> load_index(const std::filesystem::path& path);

} // namespace bst

#endif // BST_INDEX_FILE_HPP_

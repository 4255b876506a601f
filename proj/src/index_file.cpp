#include "bst/index_file.hpp"

#include <fstream>
#include <stdexcept>

#include "bst/binary_io.hpp"
#include "bst/errors.hpp"

namespace bst {

void save_index(const SimilarityIndex& index, std::ostream& out) {
  BinaryWriter w(out);
  w.tag("BST1");
  w.u8(static_cast<std::uint8_t>(index.kind()));
  index.write(w);
}

void save_index(const SimilarityIndex& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_index(index, out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::unique_ptr<SimilarityIndex> load_index(std::istream& in) {
  BinaryReader r(in);
  r.expect_tag("BST1");
  const auto tag = r.u8();
  std::unique_ptr<SimilarityIndex> out;
  switch (static_cast<IndexKind>(tag)) {
    case IndexKind::kSiBst:
      out = std::make_unique<SingleIndexBst>(SketchTrie::read(r));
      break;
    case IndexKind::kMiBst:
      out = std::make_unique<MultiIndexBst>(MultiIndexBst::read(r));
      break;
    case IndexKind::kSih:
      out = std::make_unique<SingleIndexHash>(HashInvertedIndex::read(r));
      break;
    case IndexKind::kMih:
      out = std::make_unique<MultiIndexHash>(MultiIndexHash::read(r));
      break;
    case IndexKind::kScan:
      out = std::make_unique<LinearScanIndex>(VerticalSketchSet::read(r));
      break;
    default:
      throw FormatError("unknown index variant tag " + std::to_string(tag), r.position() - 1);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after the index payload", r.position());
  }
  return out;
}

std::unique_ptr<SimilarityIndex> load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_index(in);
}

} // namespace bst

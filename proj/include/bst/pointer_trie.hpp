#ifndef BST_POINTER_TRIE_HPP_
#define BST_POINTER_TRIE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bst/sketch.hpp"

namespace bst {

// A child reached from some node: its 1-based id at the next level and
// the (0-based) symbol on the connecting edge.
struct ChildEdge {
  std::uint64_t node = 0;
  Symbol label = 0;

  friend bool operator==(const ChildEdge&, const ChildEdge&) = default;
};

// Plain trie over a sketch dataset, one node array per level.
//
// Nodes at each level are numbered 1..t_l in lexicographic order of their
// prefixes; every node stores its edge label and the index of its first
// child, so the structure costs O(t log t + t b) bits like a
// pointer-based trie. Leaves (level L) carry the ids of equal sketches.
// Used to build the succinct trie and as its structural oracle.
class PointerTrie {
public:
  PointerTrie() = default;

  static PointerTrie build(const SketchDataset& ds);

  const SketchParams& params() const { return params_; }
  std::size_t num_sketches() const { return leaf_ids_.size(); }
  std::size_t num_leaves() const { return level_size(params_.length); }

  // t_l for level l in [0, L].
  std::size_t level_size(unsigned level) const { return levels_[level].labels.size(); }
  std::vector<std::uint64_t> level_counts() const;
  std::size_t num_nodes() const;

  // Edge label entering node u at level l >= 1.
  Symbol label(unsigned level, std::uint64_t u) const;
  std::vector<ChildEdge> children(unsigned level, std::uint64_t u) const;
  // str(u_l), the prefix spelled by node u at level l.
  std::vector<Symbol> prefix(unsigned level, std::uint64_t u) const;
  std::span<const SketchId> leaf_ids(std::uint64_t leaf) const;

  std::size_t memory_bytes() const;

  // Raw level arrays: labels of level l and, for l < L, the 0-based index
  // of each node's first child (t_l + 1 entries).
  std::span<const Symbol> level_labels(unsigned level) const { return levels_[level].labels; }
  std::span<const std::uint32_t> child_begin(unsigned level) const {
    return levels_[level].child_begin;
  }
  std::span<const std::uint32_t> leaf_offsets() const { return leaf_offsets_; }
  std::span<const SketchId> leaf_id_array() const { return leaf_ids_; }

private:
  struct Level {
    std::vector<Symbol> labels;             // root level holds one dummy label
    std::vector<std::uint32_t> child_begin; // size t_l + 1, 0-based into next level
  };

  void check_node(unsigned level, std::uint64_t u) const;

  SketchParams params_;
  std::vector<Level> levels_;
  std::vector<std::uint32_t> leaf_offsets_;
  std::vector<SketchId> leaf_ids_;
};

} // namespace bst

#endif // BST_POINTER_TRIE_HPP_

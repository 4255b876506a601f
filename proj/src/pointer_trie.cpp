#include "bst/pointer_trie.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bst {

PointerTrie PointerTrie::build(const SketchDataset& ds) {
  if (ds.empty()) throw std::invalid_argument("cannot build a trie from an empty dataset");
  if (ds.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("too many sketches for 32-bit ids");
  }
  const unsigned len = ds.params().length;
  const std::size_t n = ds.size();

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::memcmp(ds.row(a).data(), ds.row(b).data(), len) < 0;
  });

  // lcp[i]: common prefix length of sorted rows i-1 and i.
  std::vector<std::uint16_t> lcp(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    auto a = ds.row(order[i - 1]);
    auto b = ds.row(order[i]);
    unsigned k = 0;
    while (k < len && a[k] == b[k]) ++k;
    lcp[i] = static_cast<std::uint16_t>(k);
  }

  PointerTrie t;
  t.params_ = ds.params();
  t.levels_.resize(len + 1);
  t.levels_[0].labels.push_back(0);

  // A sorted row starts a node at level l iff it is the first row or
  // shares fewer than l symbols with its predecessor.
  for (unsigned level = 1; level <= len; ++level) {
    Level& parent = t.levels_[level - 1];
    Level& cur = t.levels_[level];
    parent.child_begin.reserve(parent.labels.size() + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const bool starts_parent = i == 0 || lcp[i] < level - 1;
      const bool starts_node = i == 0 || lcp[i] < level;
      if (starts_parent) parent.child_begin.push_back(static_cast<std::uint32_t>(cur.labels.size()));
      if (starts_node) cur.labels.push_back(ds.row(order[i])[level - 1]);
    }
    parent.child_begin.push_back(static_cast<std::uint32_t>(cur.labels.size()));
  }

  t.leaf_ids_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || lcp[i] < len) t.leaf_offsets_.push_back(static_cast<std::uint32_t>(i));
    t.leaf_ids_.push_back(order[i] + 1);
  }
  t.leaf_offsets_.push_back(static_cast<std::uint32_t>(n));
  return t;
}

std::vector<std::uint64_t> PointerTrie::level_counts() const {
  std::vector<std::uint64_t> out;
  for (const auto& lv : levels_) out.push_back(lv.labels.size());
  return out;
}

std::size_t PointerTrie::num_nodes() const {
  std::size_t total = 0;
  for (const auto& lv : levels_) total += lv.labels.size();
  return total;
}

void PointerTrie::check_node(unsigned level, std::uint64_t u) const {
  if (level > params_.length) {
    throw std::out_of_range("level " + std::to_string(level) + " exceeds sketch length");
  }
  if (u < 1 || u > levels_[level].labels.size()) {
    throw std::out_of_range("node " + std::to_string(u) + " outside level " +
                            std::to_string(level));
  }
}

Symbol PointerTrie::label(unsigned level, std::uint64_t u) const {
  check_node(level, u);
  if (level == 0) throw std::out_of_range("the root has no incoming edge");
  return levels_[level].labels[u - 1];
}

std::vector<ChildEdge> PointerTrie::children(unsigned level, std::uint64_t u) const {
  check_node(level, u);
  std::vector<ChildEdge> out;
  if (level == params_.length) return out;
  const Level& lv = levels_[level];
  const Level& next = levels_[level + 1];
  for (std::uint32_t v = lv.child_begin[u - 1]; v < lv.child_begin[u]; ++v) {
    out.push_back({static_cast<std::uint64_t>(v) + 1, next.labels[v]});
  }
  return out;
}

std::vector<Symbol> PointerTrie::prefix(unsigned level, std::uint64_t u) const {
  check_node(level, u);
  std::vector<Symbol> out(level);
  std::uint64_t idx = u - 1;
  for (unsigned l = level; l > 0; --l) {
    out[l - 1] = levels_[l].labels[idx];
    const auto& begins = levels_[l - 1].child_begin;
    auto it = std::upper_bound(begins.begin(), begins.end(), static_cast<std::uint32_t>(idx));
    idx = static_cast<std::uint64_t>(it - begins.begin()) - 1;
  }
  return out;
}

std::span<const SketchId> PointerTrie::leaf_ids(std::uint64_t leaf) const {
  check_node(params_.length, leaf);
  return {leaf_ids_.data() + leaf_offsets_[leaf - 1], leaf_offsets_[leaf] - leaf_offsets_[leaf - 1]};
}

std::size_t PointerTrie::memory_bytes() const {
  std::size_t bytes = sizeof(*this);
  for (const auto& lv : levels_) {
    bytes += sizeof(Level) + lv.labels.capacity() * sizeof(Symbol) +
             lv.child_begin.capacity() * sizeof(std::uint32_t);
  }
  bytes += leaf_offsets_.capacity() * sizeof(std::uint32_t);
  bytes += leaf_ids_.capacity() * sizeof(SketchId);
  return bytes;
}

} // namespace bst

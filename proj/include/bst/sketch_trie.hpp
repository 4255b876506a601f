#ifndef BST_SKETCH_TRIE_HPP_
#define BST_SKETCH_TRIE_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "bst/bit_vector.hpp"
#include "bst/packed_symbols.hpp"
#include "bst/pointer_trie.hpp"
#include "bst/sketch.hpp"

namespace bst {

class BinaryReader;
class BinaryWriter;

enum class LevelEncoding : std::uint8_t { kDense = 0, kTable = 1, kList = 2, kSparse = 3 };

std::string_view to_string(LevelEncoding e);

// How middle levels pick between TABLE and LIST.
enum class EncodingChoice { kAuto, kTable, kList };

struct PlanOptions {
  double lambda = 0.5;
  std::optional<unsigned> dense_level;
  std::optional<unsigned> sparse_level;
  EncodingChoice encoding = EncodingChoice::kAuto;
};

// Division of the trie levels into dense [0, dense_level], middle
// (dense_level, sparse_level] and sparse [sparse_level, L] layers.
struct LayerPlan {
  unsigned dense_level = 0;
  unsigned sparse_level = 0;
  double lambda = 0.5;
  std::vector<std::uint64_t> level_counts;  // t_0 .. t_L
  std::vector<LevelEncoding> middle;        // levels dense_level+1 .. sparse_level

  LevelEncoding encoding(unsigned level) const;
};

// Automatic layer boundaries and encodings from per-level node counts.
//
// dense_level is the deepest l with t_l = 2^(b l). sparse_level is the
// shallowest l >= dense_level with t_l / t_L > lambda, i.e. a lambda
// fraction of the leaves already have distinct level-l ancestors. A middle
// level uses TABLE when t_l / t_(l-1) > 2^b / (b + 1), else LIST.
LayerPlan plan_layers(std::span<const std::uint64_t> level_counts, const SketchParams& params,
                      const PlanOptions& options = {});
LayerPlan plan_layers(const PointerTrie& trie, const PlanOptions& options = {});

struct TableLevel {
  RankSelectBitVector table; // H, 2^b bits per parent
};

struct ListLevel {
  PackedSymbols labels;               // C, edge label per node
  RankSelectBitVector first_sibling;  // B
};

struct SparseLayer {
  unsigned suffix_length = 0;          // L - sparse_level
  PackedSymbols paths;                 // P, suffix_length symbols per leaf
  RankSelectBitVector leftmost;        // D
  std::size_t stride = 0;              // vertical words per leaf
  std::vector<std::uint64_t> vertical; // vertical-format copy of P
};

struct LeafPath {
  std::uint64_t leaf = 0; // 1-based leaf id
  std::vector<Symbol> suffix;
  std::span<const std::uint64_t> vertical;
};

struct LevelSpace {
  unsigned level = 0;
  LevelEncoding encoding = LevelEncoding::kDense;
  std::uint64_t nodes = 0;
  std::uint64_t payload_bits = 0;
  std::uint64_t auxiliary_bits = 0;
};

struct SpaceReport {
  std::vector<LevelSpace> levels; // levels 1 .. sparse_level
  std::uint64_t sparse_path_bits = 0;     // P
  std::uint64_t sparse_leftmost_bits = 0; // D payload
  std::uint64_t sparse_auxiliary_bits = 0;
  std::uint64_t vertical_copy_bits = 0;   // in-memory only, rebuilt on load
  std::uint64_t leaf_id_bits = 0;         // id array
  std::uint64_t leaf_group_bits = 0;      // group delimiters payload
  std::uint64_t leaf_auxiliary_bits = 0;

  std::uint64_t middle_payload_bits() const;
  std::uint64_t total_bits() const;
};

// Per-query workspace for SketchTrie::search. Also exposes counters from
// the last search.
struct SearchScratch {
  struct Frame {
    std::uint64_t node;
    std::uint32_t level;
    std::uint32_t dist;
  };

  std::vector<Frame> stack;
  std::vector<std::uint64_t> query_suffix;
  bool record_leaves = false;
  std::vector<std::uint64_t> accepted_leaves;

  std::uint64_t traversed_nodes = 0; // nodes reached within the threshold
  std::uint64_t scanned_leaves = 0;  // sparse-layer paths checked
};

// The b-bit sketch trie.
class SketchTrie {
public:
  SketchTrie() = default;

  static SketchTrie encode(const PointerTrie& trie, const LayerPlan& plan);
  static SketchTrie build(const SketchDataset& ds, const PlanOptions& options = {});

  const SketchParams& params() const { return params_; }
  const LayerPlan& plan() const { return plan_; }
  std::size_t num_sketches() const { return leaf_ids_.size(); }
  std::size_t num_leaves() const { return sparse_.leftmost.size(); }
  std::uint64_t level_size(unsigned level) const { return plan_.level_counts.at(level); }

  const std::variant<TableLevel, ListLevel>& middle_level(unsigned level) const;
  const SparseLayer& sparse() const { return sparse_; }

  // Children of node u at level < sparse_level, ascending by label.
  std::vector<ChildEdge> children(unsigned level, std::uint64_t u) const;
  // Paths from node u at sparse_level down to its leaves.
  std::vector<LeafPath> leaf_paths(std::uint64_t u) const;
  std::span<const SketchId> leaf_ids(std::uint64_t leaf) const;

  // Ids of sketches within Hamming distance tau of q, ascending.
  std::vector<SketchId> search(std::span<const Symbol> q, unsigned tau,
                               SearchScratch& scratch) const;
  // Calls visit(leaf, ids) for every accepted leaf, in no particular order.
  template <class Visit>
  void search_leaves(std::span<const Symbol> q, unsigned tau, SearchScratch& scratch,
                     Visit&& visit) const;

  SpaceReport space_report() const;

  void write(BinaryWriter& out) const;
  static SketchTrie read(BinaryReader& in);

private:
  void check_query(std::span<const Symbol> q, unsigned tau) const;
  void check_node(unsigned level, std::uint64_t u) const;
  void build_vertical();

  // Calls f(child, label) for each child of u at level < sparse_level;
  // child ids are 1-based.
  template <class F>
  void for_each_child(unsigned level, std::uint64_t u, F&& f) const;
  // Child of u reached through label c, or 0.
  std::uint64_t find_child(unsigned level, std::uint64_t u, Symbol c) const;

  SketchParams params_;
  LayerPlan plan_;
  std::vector<std::variant<TableLevel, ListLevel>> middle_;
  SparseLayer sparse_;
  std::vector<SketchId> leaf_ids_;
  RankSelectBitVector leaf_groups_; // 1 where a leaf's id group starts
};

template <class F>
void SketchTrie::for_each_child(unsigned level, std::uint64_t u, F&& f) const {
  const unsigned sigma = params_.alphabet_size();
  if (level < plan_.dense_level) {
    const std::uint64_t base = (u - 1) * sigma;
    for (unsigned c = 0; c < sigma; ++c) f(base + c + 1, static_cast<Symbol>(c));
    return;
  }
  const auto& mid = middle_[level + 1 - plan_.dense_level];
  if (const auto* t = std::get_if<TableLevel>(&mid)) {
    // H[(u-1)*sigma + 1 .. u*sigma] is word aligned since sigma divides 64
    // or is a multiple of it.
    const std::size_t begin = (u - 1) * sigma;
    std::uint64_t child = t->table.rank0(begin);
    const auto words = t->table.words();
    for (std::size_t pos = begin; pos < begin + sigma; pos += 64) {
      std::uint64_t w = words[pos >> 6];
      if (sigma < 64) w = (w >> (pos & 63)) & ((1ULL << sigma) - 1);
      while (w != 0) {
        const unsigned bit = static_cast<unsigned>(std::countr_zero(w));
        w &= w - 1;
        f(++child, static_cast<Symbol>((pos - begin) + bit));
      }
    }
    return;
  }
  const auto& l = std::get<ListLevel>(mid);
  const std::size_t first = l.first_sibling.select0(u);
  const std::size_t end = l.first_sibling.select0(u + 1);
  for (std::size_t v = first; v < end; ++v) f(v + 1, l.labels[v]);
}

template <class Visit>
void SketchTrie::search_leaves(std::span<const Symbol> q, unsigned tau, SearchScratch& scratch,
                               Visit&& visit) const {
  check_query(q, tau);
  scratch.traversed_nodes = 0;
  scratch.scanned_leaves = 0;
  scratch.accepted_leaves.clear();
  if (num_leaves() == 0) return;

  const unsigned sparse_level = plan_.sparse_level;
  const unsigned bits = params_.bits;
  const std::size_t plane_words = (sparse_.suffix_length + 63) / 64;
  scratch.query_suffix.assign(sparse_.stride, 0);
  if (sparse_.suffix_length > 0) {
    encode_vertical(q.subspan(sparse_level), bits, scratch.query_suffix);
  }

  auto& stack = scratch.stack;
  stack.clear();
  stack.push_back({1, 0, 0});
  while (!stack.empty()) {
    const auto frame = stack.back();
    stack.pop_back();
    ++scratch.traversed_nodes;

    if (frame.level == sparse_level) {
      const std::size_t first = sparse_.leftmost.select0(frame.node);
      const std::size_t end = sparse_.leftmost.select0(frame.node + 1);
      const unsigned budget = tau - frame.dist;
      for (std::size_t leaf = first; leaf < end; ++leaf) {
        ++scratch.scanned_leaves;
        const unsigned d = detail::vertical_distance_bounded(
            sparse_.vertical.data() + leaf * sparse_.stride, scratch.query_suffix.data(), bits,
            plane_words, budget);
        if (d == kDistanceExceeded) continue;
        if (scratch.record_leaves) scratch.accepted_leaves.push_back(leaf + 1);
        visit(leaf + 1, leaf_ids(leaf + 1));
      }
      continue;
    }

    const Symbol want = q[frame.level];
    if (frame.dist == tau) {
      // Only the matching edge keeps the distance within tau.
      if (auto child = find_child(frame.level, frame.node, want); child != 0) {
        stack.push_back({child, frame.level + 1, frame.dist});
      }
      continue;
    }
    const std::size_t mark = stack.size();
    for_each_child(frame.level, frame.node, [&](std::uint64_t child, Symbol c) {
      stack.push_back({child, frame.level + 1, frame.dist + (c != want ? 1U : 0U)});
    });
    std::reverse(stack.begin() + static_cast<std::ptrdiff_t>(mark), stack.end());
  }
}

} // namespace bst

#endif // BST_SKETCH_TRIE_HPP_

#ifndef BST_INDEXES_HPP_
#define BST_INDEXES_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bst/signatures.hpp"
#include "bst/sketch.hpp"
#include "bst/sketch_trie.hpp"

namespace bst {

class BinaryReader;
class BinaryWriter;

enum class IndexKind : std::uint8_t { kSiBst = 1, kMiBst = 2, kSih = 3, kMih = 4, kScan = 5 };

std::string_view to_string(IndexKind kind);
std::optional<IndexKind> parse_index_kind(std::string_view name);

enum class ThresholdPolicy : std::uint8_t { kUniform = 0, kRefined = 1 };

std::string_view to_string(ThresholdPolicy policy);
std::optional<ThresholdPolicy> parse_threshold_policy(std::string_view name);

// Per-block thresholds; -1 marks a block that is skipped.
struct ThresholdAssignment {
  ThresholdPolicy policy = ThresholdPolicy::kUniform;
  std::vector<int> thresholds;
};

// uniform: floor(tau/m) everywhere. refined: with a = floor(tau/m) and
// z = tau - m a, the first z+1 blocks get a and the rest a-1. Both are
// complete: any distance split summing to <= tau meets some block bound.
ThresholdAssignment assign_thresholds(unsigned tau, unsigned m, ThresholdPolicy policy);

struct QueryStats {
  std::uint64_t traversed_nodes = 0;
  std::uint64_t scanned_leaves = 0;
  std::uint64_t signatures = 0;      // hash probes issued
  std::uint64_t key_scans = 0;       // probe-budget fallbacks
  std::vector<std::uint64_t> block_candidates; // |C^j| per block
  std::uint64_t candidates = 0;      // distinct candidates verified

  void clear();
};

// Caller-owned per-query workspace; one per concurrent query.
struct QueryScratch {
  SearchScratch trie;
  std::vector<Symbol> work;
  std::vector<std::uint8_t> key;
  std::vector<std::uint64_t> query_vertical;
  std::vector<std::uint32_t> seen;
  std::uint32_t stamp = 0;
  std::vector<SketchId> candidates;
  QueryStats stats;

  // Starts a new deduplication generation over ids 1..n.
  void next_generation(std::size_t n);
};

// Hash-table inverted index from packed sketch keys to groups of ids.
// Open addressing with linear probing; keys are b-bit symbols packed
// into ceil(b * len / 8) bytes.
class HashInvertedIndex {
public:
  HashInvertedIndex() = default;

  static HashInvertedIndex build(const SketchDataset& ds);

  const SketchParams& params() const { return params_; }
  std::size_t num_keys() const { return group_offsets_.empty() ? 0 : group_offsets_.size() - 1; }
  std::size_t num_ids() const { return ids_.size(); }

  // Ids of sketches equal to key, or empty.
  std::span<const SketchId> lookup(std::span<const Symbol> key) const;

  // Calls visit(ids) for each group within distance tau of q. Enumerates
  // signatures unless their count exceeds probe_budget, in which case the
  // keys are scanned instead.
  template <class Visit>
  void probe(std::span<const Symbol> q, unsigned tau, QueryScratch& scratch,
             std::optional<std::uint64_t> probe_budget, Visit&& visit) const;

  std::size_t memory_bytes() const;

  void write(BinaryWriter& out) const;
  static HashInvertedIndex read(BinaryReader& in);

private:
  static constexpr std::uint32_t kEmpty = 0xFFFFFFFFU;

  void build_table();
  std::uint64_t hash_key(const std::uint8_t* key) const;
  std::uint32_t find(const std::uint8_t* key) const;
  const std::uint8_t* key_of(std::size_t group) const { return keys_.data() + group * key_bytes_; }
  std::span<const SketchId> group(std::uint32_t g) const {
    return {ids_.data() + group_offsets_[g], group_offsets_[g + 1] - group_offsets_[g]};
  }
  unsigned key_distance(std::size_t group, std::span<const Symbol> q, unsigned limit) const;

  SketchParams params_;
  std::size_t key_bytes_ = 0;
  std::vector<std::uint8_t> keys_;  // one packed key per group, plus a pad byte
  std::vector<std::uint32_t> group_offsets_;
  std::vector<SketchId> ids_;
  std::vector<std::uint32_t> slots_;
  std::uint64_t slot_mask_ = 0;
};

// Packed key helpers shared by the hash index and its scratch buffers.
void pack_symbol(std::span<std::uint8_t> key, unsigned bits, std::size_t pos, Symbol value);
Symbol unpack_symbol(const std::uint8_t* key, unsigned bits, std::size_t pos);

// Common Hamming-range query contract of every index variant: the ids of
// all sketches within distance tau of q, ascending and without duplicates.
class SimilarityIndex {
public:
  virtual ~SimilarityIndex() = default;

  virtual IndexKind kind() const = 0;
  virtual const SketchParams& params() const = 0;
  virtual std::size_t size() const = 0;
  virtual std::vector<SketchId> search(std::span<const Symbol> q, unsigned tau,
                                       QueryScratch& scratch) const = 0;
  virtual std::size_t memory_bytes() const = 0;
  // Payload following the container header; see docs/index_format.md.
  virtual void write(BinaryWriter& out) const = 0;
};

class SingleIndexBst final : public SimilarityIndex {
public:
  explicit SingleIndexBst(SketchTrie trie) : trie_(std::move(trie)) {}
  static SingleIndexBst build(const SketchDataset& ds, const PlanOptions& options = {});

  IndexKind kind() const override { return IndexKind::kSiBst; }
  const SketchParams& params() const override { return trie_.params(); }
  std::size_t size() const override { return trie_.num_sketches(); }
  std::vector<SketchId> search(std::span<const Symbol> q, unsigned tau,
                               QueryScratch& scratch) const override;
  std::size_t memory_bytes() const override;
  void write(BinaryWriter& out) const override;

  const SketchTrie& trie() const { return trie_; }

private:
  SketchTrie trie_;
};

class SingleIndexHash final : public SimilarityIndex {
public:
  explicit SingleIndexHash(HashInvertedIndex table) : table_(std::move(table)) {}
  static SingleIndexHash build(const SketchDataset& ds);

  IndexKind kind() const override { return IndexKind::kSih; }
  const SketchParams& params() const override { return table_.params(); }
  std::size_t size() const override { return table_.num_ids(); }
  std::vector<SketchId> search(std::span<const Symbol> q, unsigned tau,
                               QueryScratch& scratch) const override;
  std::size_t memory_bytes() const override { return table_.memory_bytes(); }
  void write(BinaryWriter& out) const override;

  void set_probe_budget(std::optional<std::uint64_t> budget) { probe_budget_ = budget; }
  const HashInvertedIndex& table() const { return table_; }

private:
  HashInvertedIndex table_;
  std::optional<std::uint64_t> probe_budget_;
};

template <class BlockIndex>
struct MultiIndexTraits;

template <>
struct MultiIndexTraits<SketchTrie> {
  static constexpr IndexKind kind = IndexKind::kMiBst;
};

template <>
struct MultiIndexTraits<HashInvertedIndex> {
  static constexpr IndexKind kind = IndexKind::kMih;
};

struct MultiIndexOptions {
  unsigned blocks = 2;
  ThresholdPolicy policy = ThresholdPolicy::kRefined;
  PlanOptions plan; // block tries only; layer overrides are ignored
};

// Filter-and-verify multi-index over m contiguous blocks, with either
// succinct tries or hash tables as the per-block inverted indexes.
template <class BlockIndex>
class MultiIndex final : public SimilarityIndex {
public:
  MultiIndex() = default;
  static MultiIndex build(const SketchDataset& ds, const MultiIndexOptions& options);

  IndexKind kind() const override { return MultiIndexTraits<BlockIndex>::kind; }
  const SketchParams& params() const override { return vertical_.params(); }
  std::size_t size() const override { return vertical_.size(); }
  std::vector<SketchId> search(std::span<const Symbol> q, unsigned tau,
                               QueryScratch& scratch) const override;
  std::size_t memory_bytes() const override;
  void write(BinaryWriter& out) const override;
  static MultiIndex read(BinaryReader& in);

  const BlockPartition& partition() const { return partition_; }
  ThresholdPolicy policy() const { return policy_; }
  void set_policy(ThresholdPolicy p) { policy_ = p; }
  const BlockIndex& block(std::size_t j) const { return blocks_[j]; }
  void set_probe_budget(std::optional<std::uint64_t> budget) { probe_budget_ = budget; }

  // Candidate ids (deduplicated, unverified) for q at tau.
  std::vector<SketchId> candidates(std::span<const Symbol> q, unsigned tau,
                                   QueryScratch& scratch) const;

private:
  void collect(std::span<const Symbol> q, unsigned tau, QueryScratch& scratch) const;

  BlockPartition partition_;
  ThresholdPolicy policy_ = ThresholdPolicy::kRefined;
  std::vector<BlockIndex> blocks_;
  VerticalSketchSet vertical_;
  std::optional<std::uint64_t> probe_budget_;
};

using MultiIndexBst = MultiIndex<SketchTrie>;
using MultiIndexHash = MultiIndex<HashInvertedIndex>;

extern template class MultiIndex<SketchTrie>;
extern template class MultiIndex<HashInvertedIndex>;

class LinearScanIndex final : public SimilarityIndex {
public:
  explicit LinearScanIndex(VerticalSketchSet data) : data_(std::move(data)) {}
  static LinearScanIndex build(const SketchDataset& ds) { return LinearScanIndex(to_vertical(ds)); }

  IndexKind kind() const override { return IndexKind::kScan; }
  const SketchParams& params() const override { return data_.params(); }
  std::size_t size() const override { return data_.size(); }
  std::vector<SketchId> search(std::span<const Symbol> q, unsigned tau,
                               QueryScratch& scratch) const override;
  std::size_t memory_bytes() const override { return data_.bytes(); }
  void write(BinaryWriter& out) const override;

  const VerticalSketchSet& data() const { return data_; }

private:
  VerticalSketchSet data_;
};

// Exact answers by scanning every row; the ground truth for all variants.
std::vector<SketchId> linear_scan(const VerticalSketchSet& data, std::span<const Symbol> q,
                                  unsigned tau);
std::vector<SketchId> linear_scan(const SketchDataset& data, std::span<const Symbol> q,
                                  unsigned tau);

struct IndexOptions {
  IndexKind kind = IndexKind::kSiBst;
  unsigned blocks = 0; // 0 picks m in {2,3,4} from the cost model
  ThresholdPolicy policy = ThresholdPolicy::kRefined;
  PlanOptions plan;
  std::optional<std::uint64_t> probe_budget;
  std::vector<unsigned> expected_taus{1, 2, 3, 4, 5}; // for automatic m
};

std::unique_ptr<SimilarityIndex> build_index(const SketchDataset& ds, const IndexOptions& options);

// Applies a probe budget to hash-based variants; no-op for the others.
void set_probe_budget(SimilarityIndex& index, std::optional<std::uint64_t> budget);

// Validates a query against index parameters; throws std::invalid_argument.
void check_query(const SketchParams& params, std::span<const Symbol> q, unsigned tau);

template <class Visit>
void HashInvertedIndex::probe(std::span<const Symbol> q, unsigned tau, QueryScratch& scratch,
                              std::optional<std::uint64_t> probe_budget, Visit&& visit) const {
  if (num_keys() == 0) return;
  const unsigned bits = params_.bits;
  if (probe_budget && signature_count_saturated(bits, params_.length, tau) > *probe_budget) {
    ++scratch.stats.key_scans;
    for (std::size_t g = 0; g < num_keys(); ++g) {
      if (key_distance(g, q, tau) != kDistanceExceeded) visit(group(static_cast<std::uint32_t>(g)));
    }
    return;
  }
  scratch.work.assign(q.begin(), q.end());
  scratch.key.assign(key_bytes_ + 1, 0);
  for (std::size_t p = 0; p < q.size(); ++p) pack_symbol(scratch.key, bits, p, q[p]);
  std::uint64_t probes = 0;
  for_each_signature(
      std::span<Symbol>(scratch.work), tau, params_.alphabet_size(),
      [&](std::size_t pos, Symbol, Symbol now) { pack_symbol(scratch.key, bits, pos, now); },
      [&](std::span<const Symbol>) {
        ++probes;
        const std::uint32_t g = find(scratch.key.data());
        if (g != kEmpty) visit(group(g));
      });
  scratch.stats.signatures += probes;
}

} // namespace bst

#endif // BST_INDEXES_HPP_

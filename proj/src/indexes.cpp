#include "bst/indexes.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bst/binary_io.hpp"
#include "bst/cost_model.hpp"

namespace bst {

std::string_view to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::kSiBst: return "si-bst";
    case IndexKind::kMiBst: return "mi-bst";
    case IndexKind::kSih: return "sih";
    case IndexKind::kMih: return "mih";
    case IndexKind::kScan: return "scan";
  }
  return "unknown";
}

std::optional<IndexKind> parse_index_kind(std::string_view name) {
  for (auto k : {IndexKind::kSiBst, IndexKind::kMiBst, IndexKind::kSih, IndexKind::kMih,
                 IndexKind::kScan}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ThresholdPolicy policy) {
  return policy == ThresholdPolicy::kUniform ? "uniform" : "refined";
}

std::optional<ThresholdPolicy> parse_threshold_policy(std::string_view name) {
  if (name == "uniform") return ThresholdPolicy::kUniform;
  if (name == "refined") return ThresholdPolicy::kRefined;
  return std::nullopt;
}

ThresholdAssignment assign_thresholds(unsigned tau, unsigned m, ThresholdPolicy policy) {
  if (m == 0) throw std::invalid_argument("block count must be at least 1");
  ThresholdAssignment out;
  out.policy = policy;
  const int a = static_cast<int>(tau / m);
  if (policy == ThresholdPolicy::kUniform) {
    out.thresholds.assign(m, a);
    return out;
  }
  const unsigned z = tau - m * static_cast<unsigned>(a);
  for (unsigned j = 0; j < m; ++j) out.thresholds.push_back(j <= z ? a : a - 1);
  return out;
}

void QueryStats::clear() {
  traversed_nodes = 0;
  scanned_leaves = 0;
  signatures = 0;
  key_scans = 0;
  block_candidates.clear();
  candidates = 0;
}

void QueryScratch::next_generation(std::size_t n) {
  if (seen.size() < n) seen.resize(n, 0);
  if (++stamp == 0) {
    std::fill(seen.begin(), seen.end(), 0);
    stamp = 1;
  }
}

void check_query(const SketchParams& params, std::span<const Symbol> q, unsigned tau) {
  if (q.size() != params.length) {
    throw std::invalid_argument("query length " + std::to_string(q.size()) +
                                " does not match sketch length " + std::to_string(params.length));
  }
  for (Symbol c : q) {
    if (c >= params.alphabet_size()) {
      throw std::invalid_argument("query symbol " + std::to_string(c) + " exceeds the alphabet");
    }
  }
  if (tau > params.length) {
    throw std::invalid_argument("threshold " + std::to_string(tau) + " exceeds sketch length");
  }
}

// ---- packed keys and the hash inverted index ----

void pack_symbol(std::span<std::uint8_t> key, unsigned bits, std::size_t pos, Symbol value) {
  const std::size_t bitpos = pos * bits;
  const std::size_t byte = bitpos >> 3;
  const unsigned off = bitpos & 7;
  unsigned window = key[byte] | (key[byte + 1] << 8);
  const unsigned mask = ((1U << bits) - 1) << off;
  window = (window & ~mask) | (static_cast<unsigned>(value) << off);
  key[byte] = static_cast<std::uint8_t>(window);
  key[byte + 1] = static_cast<std::uint8_t>(window >> 8);
}

Symbol unpack_symbol(const std::uint8_t* key, unsigned bits, std::size_t pos) {
  const std::size_t bitpos = pos * bits;
  const std::size_t byte = bitpos >> 3;
  const unsigned window = key[byte] | (key[byte + 1] << 8);
  return static_cast<Symbol>((window >> (bitpos & 7)) & ((1U << bits) - 1));
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::vector<std::uint32_t> sorted_rows(const SketchDataset& ds) {
  std::vector<std::uint32_t> order(ds.size());
  std::iota(order.begin(), order.end(), 0U);
  const unsigned len = ds.params().length;
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return std::memcmp(ds.row(a).data(), ds.row(b).data(), len) < 0;
  });
  return order;
}

} // namespace

HashInvertedIndex HashInvertedIndex::build(const SketchDataset& ds) {
  HashInvertedIndex h;
  h.params_ = ds.params();
  const unsigned bits = h.params_.bits;
  const unsigned len = h.params_.length;
  h.key_bytes_ = (static_cast<std::size_t>(bits) * len + 7) / 8;

  const auto order = sorted_rows(ds);
  std::vector<std::uint8_t> key(h.key_bytes_ + 1, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto row = ds.row(order[i]);
    const bool starts = i == 0 || std::memcmp(ds.row(order[i - 1]).data(), row.data(), len) != 0;
    if (starts) {
      h.group_offsets_.push_back(static_cast<std::uint32_t>(i));
      std::fill(key.begin(), key.end(), 0);
      for (unsigned p = 0; p < len; ++p) pack_symbol(key, bits, p, row[p]);
      h.keys_.insert(h.keys_.end(), key.begin(), key.begin() + static_cast<std::ptrdiff_t>(h.key_bytes_));
    }
    h.ids_.push_back(order[i] + 1);
  }
  h.group_offsets_.push_back(static_cast<std::uint32_t>(order.size()));
  h.keys_.push_back(0);
  h.build_table();
  return h;
}

std::uint64_t HashInvertedIndex::hash_key(const std::uint8_t* key) const {
  std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ key_bytes_;
  std::size_t i = 0;
  for (; i + 8 <= key_bytes_; i += 8) {
    std::uint64_t w;
    std::memcpy(&w, key + i, 8);
    h = mix64(h ^ w);
  }
  if (i < key_bytes_) {
    std::uint64_t w = 0;
    std::memcpy(&w, key + i, key_bytes_ - i);
    h = mix64(h ^ w);
  }
  return h;
}

void HashInvertedIndex::build_table() {
  std::size_t capacity = 2;
  while (capacity < 2 * num_keys()) capacity <<= 1;
  slots_.assign(capacity, kEmpty);
  slot_mask_ = capacity - 1;
  for (std::uint32_t g = 0; g < num_keys(); ++g) {
    std::uint64_t s = hash_key(key_of(g)) & slot_mask_;
    while (slots_[s] != kEmpty) s = (s + 1) & slot_mask_;
    slots_[s] = g;
  }
}

std::uint32_t HashInvertedIndex::find(const std::uint8_t* key) const {
  std::uint64_t s = hash_key(key) & slot_mask_;
  while (slots_[s] != kEmpty) {
    if (std::memcmp(key_of(slots_[s]), key, key_bytes_) == 0) return slots_[s];
    s = (s + 1) & slot_mask_;
  }
  return kEmpty;
}

std::span<const SketchId> HashInvertedIndex::lookup(std::span<const Symbol> key) const {
  check_query(params_, key, 0);
  if (num_keys() == 0) return {};
  std::vector<std::uint8_t> packed(key_bytes_ + 1, 0);
  for (std::size_t p = 0; p < key.size(); ++p) pack_symbol(packed, params_.bits, p, key[p]);
  const std::uint32_t g = find(packed.data());
  if (g == kEmpty) return {};
  return group(g);
}

unsigned HashInvertedIndex::key_distance(std::size_t g, std::span<const Symbol> q,
                                         unsigned limit) const {
  const std::uint8_t* key = key_of(g);
  unsigned d = 0;
  for (std::size_t p = 0; p < q.size(); ++p) {
    if (unpack_symbol(key, params_.bits, p) != q[p] && ++d > limit) return kDistanceExceeded;
  }
  return d;
}

std::size_t HashInvertedIndex::memory_bytes() const {
  return keys_.size() + 4 * (group_offsets_.size() + ids_.size() + slots_.size());
}

void HashInvertedIndex::write(BinaryWriter& out) const {
  out.tag("HASH");
  out.u8(static_cast<std::uint8_t>(params_.bits));
  out.u16(static_cast<std::uint16_t>(params_.length));
  out.u64(keys_.size());
  out.bytes(keys_);
  out.u32s(group_offsets_);
  out.u32s(ids_);
}

HashInvertedIndex HashInvertedIndex::read(BinaryReader& in) {
  in.expect_tag("HASH");
  HashInvertedIndex h;
  const unsigned bits = in.u8();
  const unsigned len = in.u16();
  if (bits < 1 || bits > 8 || len < 1 || len > 256) in.fail("sketch parameters out of range");
  h.params_ = SketchParams(bits, len);
  h.key_bytes_ = (static_cast<std::size_t>(bits) * len + 7) / 8;
  const auto key_size = in.u64();
  if (key_size > (1ULL << 40)) in.fail("implausible key array length");
  h.keys_.resize(key_size);
  in.bytes(h.keys_);
  h.group_offsets_ = in.u32s();
  auto ids = in.u32s();
  h.ids_.assign(ids.begin(), ids.end());
  if (h.group_offsets_.empty() || h.keys_.size() != h.num_keys() * h.key_bytes_ + 1 ||
      h.group_offsets_.back() != h.ids_.size()) {
    in.fail("hash index size mismatch");
  }
  h.build_table();
  return h;
}

// ---- single-index front-ends ----

SingleIndexBst SingleIndexBst::build(const SketchDataset& ds, const PlanOptions& options) {
  return SingleIndexBst(SketchTrie::build(ds, options));
}

std::vector<SketchId> SingleIndexBst::search(std::span<const Symbol> q, unsigned tau,
                                             QueryScratch& scratch) const {
  scratch.stats.clear();
  auto out = trie_.search(q, tau, scratch.trie);
  scratch.stats.traversed_nodes = scratch.trie.traversed_nodes;
  scratch.stats.scanned_leaves = scratch.trie.scanned_leaves;
  scratch.stats.candidates = out.size();
  return out;
}

std::size_t SingleIndexBst::memory_bytes() const { return trie_.space_report().total_bits() / 8; }

void SingleIndexBst::write(BinaryWriter& out) const { trie_.write(out); }

SingleIndexHash SingleIndexHash::build(const SketchDataset& ds) {
  return SingleIndexHash(HashInvertedIndex::build(ds));
}

std::vector<SketchId> SingleIndexHash::search(std::span<const Symbol> q, unsigned tau,
                                              QueryScratch& scratch) const {
  check_query(table_.params(), q, tau);
  scratch.stats.clear();
  std::vector<SketchId> out;
  table_.probe(q, tau, scratch, probe_budget_,
               [&](std::span<const SketchId> ids) { out.insert(out.end(), ids.begin(), ids.end()); });
  std::sort(out.begin(), out.end());
  scratch.stats.candidates = out.size();
  return out;
}

void SingleIndexHash::write(BinaryWriter& out) const { table_.write(out); }

// ---- multi-index ----

namespace {

SketchTrie build_block(const SketchDataset& ds, const MultiIndexOptions& options,
                       const SketchTrie*) {
  PlanOptions plan;
  plan.lambda = options.plan.lambda;
  plan.encoding = options.plan.encoding;
  return SketchTrie::build(ds, plan);
}

HashInvertedIndex build_block(const SketchDataset& ds, const MultiIndexOptions&,
                              const HashInvertedIndex*) {
  return HashInvertedIndex::build(ds);
}

} // namespace

template <class BlockIndex>
MultiIndex<BlockIndex> MultiIndex<BlockIndex>::build(const SketchDataset& ds,
                                                     const MultiIndexOptions& options) {
  MultiIndex idx;
  idx.partition_ = bst::partition(ds.params(), options.blocks);
  idx.policy_ = options.policy;
  for (const auto& blk : idx.partition_.blocks) {
    idx.blocks_.push_back(build_block(ds.columns(blk.begin, blk.length), options,
                                      static_cast<const BlockIndex*>(nullptr)));
  }
  idx.vertical_ = to_vertical(ds);
  return idx;
}

template <class BlockIndex>
void MultiIndex<BlockIndex>::collect(std::span<const Symbol> q, unsigned tau,
                                     QueryScratch& scratch) const {
  const unsigned m = static_cast<unsigned>(partition_.size());
  const auto assignment = assign_thresholds(tau, m, policy_);
  auto& stats = scratch.stats;
  stats.block_candidates.assign(m, 0);
  scratch.next_generation(size());
  scratch.candidates.clear();

  for (unsigned j = 0; j < m; ++j) {
    const int tj = assignment.thresholds[j];
    if (tj < 0) continue;
    const auto qj = q.subspan(partition_[j].begin, partition_[j].length);
    auto take = [&](std::span<const SketchId> ids) {
      stats.block_candidates[j] += ids.size();
      for (SketchId id : ids) {
        if (scratch.seen[id - 1] != scratch.stamp) {
          scratch.seen[id - 1] = scratch.stamp;
          scratch.candidates.push_back(id);
        }
      }
    };
    if constexpr (std::is_same_v<BlockIndex, SketchTrie>) {
      blocks_[j].search_leaves(qj, static_cast<unsigned>(tj), scratch.trie,
                               [&](std::uint64_t, std::span<const SketchId> ids) { take(ids); });
      stats.traversed_nodes += scratch.trie.traversed_nodes;
      stats.scanned_leaves += scratch.trie.scanned_leaves;
    } else {
      blocks_[j].probe(qj, static_cast<unsigned>(tj), scratch, probe_budget_, take);
    }
  }
  stats.candidates = scratch.candidates.size();
}

template <class BlockIndex>
std::vector<SketchId> MultiIndex<BlockIndex>::candidates(std::span<const Symbol> q, unsigned tau,
                                                         QueryScratch& scratch) const {
  check_query(params(), q, tau);
  scratch.stats.clear();
  collect(q, tau, scratch);
  auto out = scratch.candidates;
  std::sort(out.begin(), out.end());
  return out;
}

template <class BlockIndex>
std::vector<SketchId> MultiIndex<BlockIndex>::search(std::span<const Symbol> q, unsigned tau,
                                                     QueryScratch& scratch) const {
  check_query(params(), q, tau);
  scratch.stats.clear();
  collect(q, tau, scratch);

  const SketchParams& p = params();
  scratch.query_vertical.resize(p.vertical_words());
  encode_vertical(q, p.bits, scratch.query_vertical);
  std::vector<SketchId> out;
  for (SketchId id : scratch.candidates) {
    const unsigned d = detail::vertical_distance_bounded(vertical_.row_words(id - 1).data(),
                                                         scratch.query_vertical.data(), p.bits,
                                                         p.plane_words(), tau);
    if (d != kDistanceExceeded) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <class BlockIndex>
std::size_t MultiIndex<BlockIndex>::memory_bytes() const {
  std::size_t total = vertical_.bytes();
  for (const auto& b : blocks_) {
    if constexpr (std::is_same_v<BlockIndex, SketchTrie>) {
      total += b.space_report().total_bits() / 8;
    } else {
      total += b.memory_bytes();
    }
  }
  return total;
}

template <class BlockIndex>
void MultiIndex<BlockIndex>::write(BinaryWriter& out) const {
  out.tag("PART");
  out.u8(static_cast<std::uint8_t>(policy_));
  out.u32(static_cast<std::uint32_t>(partition_.size()));
  for (const auto& blk : partition_.blocks) {
    out.u16(static_cast<std::uint16_t>(blk.begin));
    out.u16(static_cast<std::uint16_t>(blk.length));
  }
  for (const auto& b : blocks_) b.write(out);
  vertical_.write(out);
}

template <class BlockIndex>
MultiIndex<BlockIndex> MultiIndex<BlockIndex>::read(BinaryReader& in) {
  MultiIndex idx;
  in.expect_tag("PART");
  const auto policy = in.u8();
  if (policy > 1) in.fail("unknown threshold policy");
  idx.policy_ = static_cast<ThresholdPolicy>(policy);
  const auto m = in.u32();
  if (m == 0 || m > 256) in.fail("block count out of range");
  unsigned expected_begin = 0;
  for (std::uint32_t j = 0; j < m; ++j) {
    Block blk;
    blk.begin = in.u16();
    blk.length = in.u16();
    if (blk.begin != expected_begin || blk.length == 0) in.fail("blocks are not contiguous");
    expected_begin += blk.length;
    idx.partition_.blocks.push_back(blk);
  }
  for (std::uint32_t j = 0; j < m; ++j) idx.blocks_.push_back(BlockIndex::read(in));
  idx.vertical_ = VerticalSketchSet::read(in);
  if (expected_begin != idx.vertical_.params().length) in.fail("blocks do not cover the sketch");
  for (std::uint32_t j = 0; j < m; ++j) {
    const auto& bp = idx.blocks_[j].params();
    if (bp.bits != idx.vertical_.params().bits || bp.length != idx.partition_[j].length) {
      in.fail("block index parameters disagree with the partition");
    }
  }
  return idx;
}

template class MultiIndex<SketchTrie>;
template class MultiIndex<HashInvertedIndex>;

// ---- linear scan ----

std::vector<SketchId> linear_scan(const VerticalSketchSet& data, std::span<const Symbol> q,
                                  unsigned tau) {
  const SketchParams& p = data.params();
  check_query(p, q, tau);
  const auto qv = encode_vertical(q, p.bits);
  std::vector<SketchId> out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const unsigned d = detail::vertical_distance_bounded(data.row_words(i).data(), qv.data(),
                                                         p.bits, p.plane_words(), tau);
    if (d != kDistanceExceeded) out.push_back(static_cast<SketchId>(i + 1));
  }
  return out;
}

std::vector<SketchId> linear_scan(const SketchDataset& data, std::span<const Symbol> q,
                                  unsigned tau) {
  return linear_scan(to_vertical(data), q, tau);
}

std::vector<SketchId> LinearScanIndex::search(std::span<const Symbol> q, unsigned tau,
                                              QueryScratch& scratch) const {
  scratch.stats.clear();
  auto out = linear_scan(data_, q, tau);
  scratch.stats.candidates = data_.size();
  return out;
}

void LinearScanIndex::write(BinaryWriter& out) const { data_.write(out); }

// ---- construction ----

std::unique_ptr<SimilarityIndex> build_index(const SketchDataset& ds, const IndexOptions& options) {
  if (ds.empty()) throw std::invalid_argument("cannot index an empty dataset");
  auto multi_options = [&] {
    MultiIndexOptions mo;
    mo.policy = options.policy;
    mo.plan = options.plan;
    mo.blocks = options.blocks;
    if (mo.blocks == 0) {
      mo.blocks = choose_blocks(ds.params().bits, ds.params().length,
                                static_cast<long double>(std::max<std::size_t>(ds.size(), 1)),
                                options.expected_taus, options.policy);
    }
    return mo;
  };

  std::unique_ptr<SimilarityIndex> out;
  switch (options.kind) {
    case IndexKind::kSiBst:
      out = std::make_unique<SingleIndexBst>(SingleIndexBst::build(ds, options.plan));
      break;
    case IndexKind::kSih:
      out = std::make_unique<SingleIndexHash>(SingleIndexHash::build(ds));
      break;
    case IndexKind::kMiBst:
      out = std::make_unique<MultiIndexBst>(MultiIndexBst::build(ds, multi_options()));
      break;
    case IndexKind::kMih:
      out = std::make_unique<MultiIndexHash>(MultiIndexHash::build(ds, multi_options()));
      break;
    case IndexKind::kScan:
      out = std::make_unique<LinearScanIndex>(LinearScanIndex::build(ds));
      break;
  }
  set_probe_budget(*out, options.probe_budget);
  return out;
}

void set_probe_budget(SimilarityIndex& index, std::optional<std::uint64_t> budget) {
  if (auto* s = dynamic_cast<SingleIndexHash*>(&index)) s->set_probe_budget(budget);
  if (auto* m = dynamic_cast<MultiIndexHash*>(&index)) m->set_probe_budget(budget);
}

} // namespace bst

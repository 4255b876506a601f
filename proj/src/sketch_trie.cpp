#include "bst/sketch_trie.hpp"

#include <stdexcept>
#include <string>

#include "bst/binary_io.hpp"

namespace bst {

std::string_view to_string(LevelEncoding e) {
  switch (e) {
    case LevelEncoding::kDense: return "dense";
    case LevelEncoding::kTable: return "table";
    case LevelEncoding::kList: return "list";
    case LevelEncoding::kSparse: return "sparse";
  }
  return "unknown";
}

LevelEncoding LayerPlan::encoding(unsigned level) const {
  if (level <= dense_level) return LevelEncoding::kDense;
  if (level <= sparse_level) return middle[level - dense_level - 1];
  return LevelEncoding::kSparse;
}

LayerPlan plan_layers(std::span<const std::uint64_t> counts, const SketchParams& params,
                      const PlanOptions& options) {
  if (!(options.lambda > 0.0 && options.lambda < 1.0)) {
    throw std::invalid_argument("lambda must lie in (0, 1), got " + std::to_string(options.lambda));
  }
  const unsigned len = params.length;
  if (counts.size() != len + 1) {
    throw std::invalid_argument("expected " + std::to_string(len + 1) + " level counts");
  }

  unsigned complete = 0;
  for (unsigned level = 1; level <= len; ++level) {
    const unsigned shift = params.bits * level;
    if (shift >= 64 || counts[level] != (1ULL << shift)) break;
    complete = level;
  }

  LayerPlan plan;
  plan.lambda = options.lambda;
  plan.level_counts.assign(counts.begin(), counts.end());

  if (options.dense_level) {
    if (*options.dense_level > len) {
      throw std::invalid_argument("dense level exceeds the sketch length");
    }
    if (*options.dense_level > complete) {
      throw std::invalid_argument("dense level " + std::to_string(*options.dense_level) +
                                  " is deeper than the last complete level " +
                                  std::to_string(complete));
    }
    plan.dense_level = *options.dense_level;
  } else {
    plan.dense_level = complete;
  }

  if (options.sparse_level) {
    const unsigned s = *options.sparse_level;
    if (s > len) throw std::invalid_argument("sparse level exceeds the sketch length");
    if (s < plan.dense_level) {
      if (options.dense_level) {
        throw std::invalid_argument("sparse level must not be above the dense level");
      }
      plan.dense_level = s;
    }
    plan.sparse_level = s;
  } else {
    const double leaves = static_cast<double>(counts[len]);
    unsigned s = plan.dense_level;
    while (s < len && !(static_cast<double>(counts[s]) > options.lambda * leaves)) ++s;
    plan.sparse_level = s;
  }

  const std::uint64_t sigma = params.alphabet_size();
  for (unsigned level = plan.dense_level + 1; level <= plan.sparse_level; ++level) {
    LevelEncoding e;
    switch (options.encoding) {
      case EncodingChoice::kTable: e = LevelEncoding::kTable; break;
      case EncodingChoice::kList: e = LevelEncoding::kList; break;
      default:
        // D(l-1, l) > 2^b / (b+1), compared exactly in integers.
        e = counts[level] * (params.bits + 1) > sigma * counts[level - 1] ? LevelEncoding::kTable
                                                                          : LevelEncoding::kList;
    }
    plan.middle.push_back(e);
  }
  return plan;
}

LayerPlan plan_layers(const PointerTrie& trie, const PlanOptions& options) {
  auto counts = trie.level_counts();
  return plan_layers(counts, trie.params(), options);
}

std::uint64_t SpaceReport::middle_payload_bits() const {
  std::uint64_t total = 0;
  for (const auto& l : levels) total += l.payload_bits;
  return total;
}

std::uint64_t SpaceReport::total_bits() const {
  std::uint64_t total = 0;
  for (const auto& l : levels) total += l.payload_bits + l.auxiliary_bits;
  return total + sparse_path_bits + sparse_leftmost_bits + sparse_auxiliary_bits +
         vertical_copy_bits + leaf_id_bits + leaf_group_bits + leaf_auxiliary_bits;
}

SketchTrie SketchTrie::encode(const PointerTrie& trie, const LayerPlan& plan) {
  const SketchParams& params = trie.params();
  const unsigned len = params.length;
  const auto counts = trie.level_counts();
  if (plan.level_counts != counts) {
    throw std::invalid_argument("layer plan does not match the trie's level counts");
  }
  if (plan.dense_level > plan.sparse_level || plan.sparse_level > len ||
      plan.middle.size() != plan.sparse_level - plan.dense_level) {
    throw std::invalid_argument("inconsistent layer plan");
  }
  for (unsigned level = 1; level <= plan.dense_level; ++level) {
    if (params.bits * level >= 64 || counts[level] != (1ULL << (params.bits * level))) {
      throw std::invalid_argument("dense layer reaches an incomplete level");
    }
  }

  SketchTrie out;
  out.params_ = params;
  out.plan_ = plan;
  const std::uint64_t sigma = params.alphabet_size();

  // Index 0 is a placeholder so that middle_[l - dense_level] is level l.
  out.middle_.emplace_back(TableLevel{});
  for (unsigned level = plan.dense_level + 1; level <= plan.sparse_level; ++level) {
    const auto labels = trie.level_labels(level);
    const auto begins = trie.child_begin(level - 1);
    const std::size_t parents = counts[level - 1];
    if (plan.encoding(level) == LevelEncoding::kTable) {
      BitVectorBuilder h(sigma * parents);
      for (std::size_t x = 0; x < parents; ++x) {
        for (std::uint32_t y = begins[x]; y < begins[x + 1]; ++y) h.set(x * sigma + labels[y]);
      }
      out.middle_.emplace_back(TableLevel{RankSelectBitVector(std::move(h))});
    } else {
      ListLevel l;
      l.labels = PackedSymbols(params.bits, labels.size());
      for (std::size_t y = 0; y < labels.size(); ++y) l.labels.set(y, labels[y]);
      BitVectorBuilder b(labels.size());
      for (std::size_t x = 0; x < parents; ++x) b.set(begins[x]);
      l.first_sibling = RankSelectBitVector(std::move(b));
      out.middle_.emplace_back(std::move(l));
    }
  }

  // Sparse layer: first_leaf[x] is the first leaf below node x of the
  // current level, computed bottom-up.
  const std::size_t leaves = counts[len];
  const unsigned suffix = len - plan.sparse_level;
  SparseLayer& sp = out.sparse_;
  sp.suffix_length = suffix;
  sp.paths = PackedSymbols(params.bits, suffix * leaves);

  std::vector<std::uint32_t> first_leaf(leaves + 1);
  for (std::size_t v = 0; v <= leaves; ++v) first_leaf[v] = static_cast<std::uint32_t>(v);
  for (unsigned level = len; level > plan.sparse_level; --level) {
    const auto labels = trie.level_labels(level);
    const unsigned col = level - plan.sparse_level - 1;
    for (std::size_t x = 0; x < labels.size(); ++x) {
      for (std::uint32_t v = first_leaf[x]; v < first_leaf[x + 1]; ++v) {
        sp.paths.set(static_cast<std::size_t>(v) * suffix + col, labels[x]);
      }
    }
    const auto begins = trie.child_begin(level - 1);
    std::vector<std::uint32_t> up(counts[level - 1] + 1);
    for (std::size_t x = 0; x < up.size(); ++x) up[x] = first_leaf[begins[x]];
    first_leaf = std::move(up);
  }
  BitVectorBuilder d(leaves);
  for (std::size_t x = 0; x + 1 < first_leaf.size(); ++x) d.set(first_leaf[x]);
  sp.leftmost = RankSelectBitVector(std::move(d));
  out.build_vertical();

  const auto ids = trie.leaf_id_array();
  const auto offsets = trie.leaf_offsets();
  out.leaf_ids_.assign(ids.begin(), ids.end());
  BitVectorBuilder g(ids.size());
  for (std::size_t v = 0; v + 1 < offsets.size(); ++v) g.set(offsets[v]);
  out.leaf_groups_ = RankSelectBitVector(std::move(g));
  return out;
}

SketchTrie SketchTrie::build(const SketchDataset& ds, const PlanOptions& options) {
  auto trie = PointerTrie::build(ds);
  auto plan = plan_layers(trie, options);
  return encode(trie, plan);
}

void SketchTrie::build_vertical() {
  SparseLayer& sp = sparse_;
  const std::size_t leaves = sp.leftmost.size();
  const std::size_t plane_words = (sp.suffix_length + 63) / 64;
  sp.stride = params_.bits * plane_words;
  sp.vertical.assign(leaves * sp.stride, 0);
  std::vector<Symbol> buf(sp.suffix_length);
  for (std::size_t v = 0; v < leaves; ++v) {
    for (unsigned k = 0; k < sp.suffix_length; ++k) buf[k] = sp.paths[v * sp.suffix_length + k];
    encode_vertical(buf, params_.bits, {sp.vertical.data() + v * sp.stride, sp.stride});
  }
}

const std::variant<TableLevel, ListLevel>& SketchTrie::middle_level(unsigned level) const {
  if (level <= plan_.dense_level || level > plan_.sparse_level) {
    throw std::out_of_range("level " + std::to_string(level) + " is not a middle level");
  }
  return middle_[level - plan_.dense_level];
}

void SketchTrie::check_node(unsigned level, std::uint64_t u) const {
  if (level > params_.length) throw std::out_of_range("level exceeds the sketch length");
  if (u < 1 || u > plan_.level_counts[level]) {
    throw std::out_of_range("node " + std::to_string(u) + " outside level " +
                            std::to_string(level) + " (" +
                            std::to_string(plan_.level_counts[level]) + " nodes)");
  }
}

std::vector<ChildEdge> SketchTrie::children(unsigned level, std::uint64_t u) const {
  check_node(level, u);
  if (level >= plan_.sparse_level) {
    throw std::out_of_range("children is defined above the sparse level only");
  }
  std::vector<ChildEdge> out;
  for_each_child(level, u, [&](std::uint64_t v, Symbol c) { out.push_back({v, c}); });
  return out;
}

std::uint64_t SketchTrie::find_child(unsigned level, std::uint64_t u, Symbol c) const {
  const std::uint64_t sigma = params_.alphabet_size();
  if (level < plan_.dense_level) return (u - 1) * sigma + c + 1;
  const auto& mid = middle_[level + 1 - plan_.dense_level];
  if (const auto* t = std::get_if<TableLevel>(&mid)) {
    const std::size_t pos = (u - 1) * sigma + c;
    return t->table.bit(pos) ? t->table.rank0(pos) + 1 : 0;
  }
  const auto& l = std::get<ListLevel>(mid);
  const std::size_t end = l.first_sibling.select0(u + 1);
  for (std::size_t v = l.first_sibling.select0(u); v < end; ++v) {
    const Symbol label = l.labels[v];
    if (label == c) return v + 1;
    if (label > c) break;
  }
  return 0;
}

std::vector<LeafPath> SketchTrie::leaf_paths(std::uint64_t u) const {
  check_node(plan_.sparse_level, u);
  std::vector<LeafPath> out;
  const std::size_t first = sparse_.leftmost.select0(u);
  const std::size_t end = sparse_.leftmost.select0(u + 1);
  for (std::size_t v = first; v < end; ++v) {
    LeafPath p;
    p.leaf = v + 1;
    for (unsigned k = 0; k < sparse_.suffix_length; ++k) {
      p.suffix.push_back(sparse_.paths[v * sparse_.suffix_length + k]);
    }
    p.vertical = {sparse_.vertical.data() + v * sparse_.stride, sparse_.stride};
    out.push_back(std::move(p));
  }
  return out;
}

std::span<const SketchId> SketchTrie::leaf_ids(std::uint64_t leaf) const {
  const std::size_t first = leaf_groups_.select0(leaf);
  const std::size_t end = leaf_groups_.select0(leaf + 1);
  return {leaf_ids_.data() + first, end - first};
}

void SketchTrie::check_query(std::span<const Symbol> q, unsigned tau) const {
  if (q.size() != params_.length) {
    throw std::invalid_argument("query length " + std::to_string(q.size()) +
                                " does not match sketch length " +
                                std::to_string(params_.length));
  }
  for (Symbol c : q) {
    if (c >= params_.alphabet_size()) {
      throw std::invalid_argument("query symbol " + std::to_string(c) + " exceeds the alphabet");
    }
  }
  if (tau > params_.length) {
    throw std::invalid_argument("threshold " + std::to_string(tau) + " exceeds sketch length");
  }
}

std::vector<SketchId> SketchTrie::search(std::span<const Symbol> q, unsigned tau,
                                         SearchScratch& scratch) const {
  std::vector<SketchId> out;
  search_leaves(q, tau, scratch, [&](std::uint64_t, std::span<const SketchId> ids) {
    out.insert(out.end(), ids.begin(), ids.end());
  });
  std::sort(out.begin(), out.end());
  if (scratch.record_leaves) {
    std::sort(scratch.accepted_leaves.begin(), scratch.accepted_leaves.end());
  }
  return out;
}

SpaceReport SketchTrie::space_report() const {
  SpaceReport r;
  for (unsigned level = 1; level <= plan_.sparse_level; ++level) {
    LevelSpace ls;
    ls.level = level;
    ls.encoding = plan_.encoding(level);
    ls.nodes = plan_.level_counts[level];
    if (ls.encoding == LevelEncoding::kTable) {
      const auto& t = std::get<TableLevel>(middle_level(level));
      ls.payload_bits = t.table.payload_bits();
      ls.auxiliary_bits = t.table.auxiliary_bits();
    } else if (ls.encoding == LevelEncoding::kList) {
      const auto& l = std::get<ListLevel>(middle_level(level));
      ls.payload_bits = l.labels.payload_bits() + l.first_sibling.payload_bits();
      ls.auxiliary_bits = l.first_sibling.auxiliary_bits();
    }
    r.levels.push_back(ls);
  }
  r.sparse_path_bits = sparse_.paths.payload_bits();
  r.sparse_leftmost_bits = sparse_.leftmost.payload_bits();
  r.sparse_auxiliary_bits = sparse_.leftmost.auxiliary_bits();
  r.vertical_copy_bits = 64ULL * sparse_.vertical.size();
  r.leaf_id_bits = 32ULL * leaf_ids_.size();
  r.leaf_group_bits = leaf_groups_.payload_bits();
  r.leaf_auxiliary_bits = leaf_groups_.auxiliary_bits();
  return r;
}

void SketchTrie::write(BinaryWriter& out) const {
  out.tag("PARM");
  out.u8(static_cast<std::uint8_t>(params_.bits));
  out.u16(static_cast<std::uint16_t>(params_.length));
  out.u64(leaf_ids_.size());

  out.tag("PLAN");
  out.u16(static_cast<std::uint16_t>(plan_.dense_level));
  out.u16(static_cast<std::uint16_t>(plan_.sparse_level));
  out.f64(plan_.lambda);
  out.words(plan_.level_counts);
  for (auto e : plan_.middle) out.u8(static_cast<std::uint8_t>(e));

  out.tag("MIDL");
  for (std::size_t i = 1; i < middle_.size(); ++i) {
    if (const auto* t = std::get_if<TableLevel>(&middle_[i])) {
      out.u8(static_cast<std::uint8_t>(LevelEncoding::kTable));
      t->table.write(out);
    } else {
      const auto& l = std::get<ListLevel>(middle_[i]);
      out.u8(static_cast<std::uint8_t>(LevelEncoding::kList));
      l.labels.write(out);
      l.first_sibling.write(out);
    }
  }

  out.tag("SPRS");
  out.u16(static_cast<std::uint16_t>(sparse_.suffix_length));
  sparse_.paths.write(out);
  sparse_.leftmost.write(out);

  out.tag("LIDS");
  out.u32s(leaf_ids_);
  leaf_groups_.write(out);
}

SketchTrie SketchTrie::read(BinaryReader& in) {
  SketchTrie t;
  in.expect_tag("PARM");
  const unsigned bits = in.u8();
  const unsigned len = in.u16();
  if (bits < 1 || bits > 8 || len < 1 || len > 256) in.fail("sketch parameters out of range");
  t.params_ = SketchParams(bits, len);
  const std::uint64_t n = in.u64();

  in.expect_tag("PLAN");
  t.plan_.dense_level = in.u16();
  t.plan_.sparse_level = in.u16();
  t.plan_.lambda = in.f64();
  t.plan_.level_counts = in.words();
  if (t.plan_.level_counts.size() != len + 1 || t.plan_.dense_level > t.plan_.sparse_level ||
      t.plan_.sparse_level > len) {
    in.fail("inconsistent layer plan");
  }
  for (unsigned level = t.plan_.dense_level + 1; level <= t.plan_.sparse_level; ++level) {
    auto e = static_cast<LevelEncoding>(in.u8());
    if (e != LevelEncoding::kTable && e != LevelEncoding::kList) in.fail("bad level encoding");
    t.plan_.middle.push_back(e);
  }

  in.expect_tag("MIDL");
  const auto& counts = t.plan_.level_counts;
  const std::uint64_t sigma = t.params_.alphabet_size();
  t.middle_.emplace_back(TableLevel{});
  for (unsigned level = t.plan_.dense_level + 1; level <= t.plan_.sparse_level; ++level) {
    auto e = static_cast<LevelEncoding>(in.u8());
    if (e != t.plan_.encoding(level)) in.fail("level encoding disagrees with the plan");
    if (e == LevelEncoding::kTable) {
      TableLevel tl{RankSelectBitVector::read(in)};
      if (tl.table.size() != sigma * counts[level - 1] || tl.table.num_ones() != counts[level]) {
        in.fail("TABLE level size mismatch");
      }
      t.middle_.emplace_back(std::move(tl));
    } else {
      ListLevel l;
      l.labels = PackedSymbols::read(in);
      l.first_sibling = RankSelectBitVector::read(in);
      if (l.labels.size() != counts[level] || l.first_sibling.size() != counts[level] ||
          l.first_sibling.num_ones() != counts[level - 1] || l.labels.width() != bits) {
        in.fail("LIST level size mismatch");
      }
      t.middle_.emplace_back(std::move(l));
    }
  }

  in.expect_tag("SPRS");
  t.sparse_.suffix_length = in.u16();
  if (t.sparse_.suffix_length != len - t.plan_.sparse_level) in.fail("sparse suffix mismatch");
  t.sparse_.paths = PackedSymbols::read(in);
  t.sparse_.leftmost = RankSelectBitVector::read(in);
  if (t.sparse_.leftmost.size() != counts[len] ||
      t.sparse_.leftmost.num_ones() != counts[t.plan_.sparse_level] ||
      t.sparse_.paths.size() != t.sparse_.suffix_length * counts[len]) {
    in.fail("sparse layer size mismatch");
  }
  t.build_vertical();

  in.expect_tag("LIDS");
  auto ids = in.u32s();
  t.leaf_ids_.assign(ids.begin(), ids.end());
  t.leaf_groups_ = RankSelectBitVector::read(in);
  if (t.leaf_ids_.size() != n || t.leaf_groups_.size() != n ||
      t.leaf_groups_.num_ones() != counts[len]) {
    in.fail("leaf id map size mismatch");
  }
  return t;
}

} // namespace bst

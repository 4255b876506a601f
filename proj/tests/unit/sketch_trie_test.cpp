#include <doctest.h>

#include <random>
#include <sstream>
#include <stdexcept>

#include "bst/binary_io.hpp"
#include "bst/errors.hpp"
#include "bst/indexes.hpp"
#include "bst/pointer_trie.hpp"
#include "bst/sketch_trie.hpp"
#include "fixtures.hpp"

using namespace bst;
using bst::test::letters;
using bst::test::sym;

namespace {

// lambda = 0.7 puts the sparse layer at level 3 for the worked dataset:
// t = (1, 4, 6, 7, 8, 9) and 6/9 < 0.7 < 7/9.
SketchTrie worked_trie() {
  PlanOptions o;
  o.lambda = 0.7;
  return SketchTrie::build(test::worked_dataset(), o);
}

std::vector<SketchId> ids(std::initializer_list<SketchId> l) { return l; }

} // namespace

TEST_CASE("pointer trie over the worked dataset") {
  const auto trie = PointerTrie::build(test::worked_dataset());
  CHECK(trie.level_counts() == std::vector<std::uint64_t>{1, 4, 6, 7, 8, 9});
  CHECK(trie.num_leaves() == 9);
  CHECK(letters(trie.prefix(3, 3)) == "baa");
  CHECK(letters(trie.prefix(3, 1)) == "aaa");
  CHECK(letters(trie.prefix(3, 2)) == "aba");
  const auto leaf = trie.leaf_ids(1);
  CHECK(letters(trie.prefix(5, 1)) == "aaaaa");
  CHECK(std::vector<SketchId>(leaf.begin(), leaf.end()) == ids({2, 6}));
  CHECK_THROWS_AS(trie.children(3, 8), std::out_of_range);
  CHECK_THROWS_AS(PointerTrie::build(SketchDataset(SketchParams(2, 5))), std::invalid_argument);
}

TEST_CASE("pointer trie shapes") {
  const auto single = PointerTrie::build(test::from_strings(2, {"cabd"}));
  CHECK(single.level_counts() == std::vector<std::uint64_t>{1, 1, 1, 1, 1});
  const auto distinct = test::random_dataset(8, 16, 500, 1);
  CHECK(PointerTrie::build(distinct).num_leaves() == 500);
}

TEST_CASE("automatic plan for the worked dataset") {
  const auto trie = worked_trie();
  const auto& plan = trie.plan();
  CHECK(plan.dense_level == 1);
  CHECK(plan.sparse_level == 3);
  CHECK(plan.encoding(1) == LevelEncoding::kDense);
  CHECK(plan.encoding(2) == LevelEncoding::kTable);
  CHECK(plan.encoding(3) == LevelEncoding::kList);
  CHECK(plan.encoding(4) == LevelEncoding::kSparse);
  // With the default lambda = 0.5 the sparse layer starts at level 2.
  CHECK(SketchTrie::build(test::worked_dataset()).plan().sparse_level == 2);
}

TEST_CASE("dense children of the root") {
  const auto trie = worked_trie();
  CHECK(trie.children(0, 1) ==
        std::vector<ChildEdge>{{1, 0}, {2, 1}, {3, 2}, {4, 3}});
}

TEST_CASE("TABLE level 2") {
  const auto trie = worked_trie();
  const auto& h = std::get<TableLevel>(trie.middle_level(2)).table;
  CHECK(h.size() == 16);
  CHECK(h.rank(4) == 2);
  CHECK(h.rank(8) == 4);
  CHECK(h.select(3) == 5);
  CHECK(h.select(4) == 7);
  CHECK(trie.children(1, 2) == std::vector<ChildEdge>{{3, 0}, {4, 2}});
}

TEST_CASE("LIST level 3") {
  const auto trie = worked_trie();
  const auto& l = std::get<ListLevel>(trie.middle_level(3));
  CHECK(l.first_sibling.select(6) == 6);
  CHECK(l.first_sibling.select(7) == 8);
  CHECK(l.labels[5] == 2); // C_3[6] = c
  CHECK(l.labels[6] == 3); // C_3[7] = d
  CHECK(trie.children(2, 6) == std::vector<ChildEdge>{{6, 2}, {7, 3}});
}

TEST_CASE("sparse layer paths below node 5 at level 3") {
  const auto trie = worked_trie();
  const auto& sp = trie.sparse();
  CHECK(sp.suffix_length == 2);
  CHECK(sp.leftmost.select(5) == 6);
  CHECK(sp.leftmost.select(6) - 1 == 7);
  // P[11..12] and P[13..14] in 1-based terms.
  CHECK(letters(std::vector<Symbol>{sp.paths[10], sp.paths[11]}) == "ca");
  CHECK(letters(std::vector<Symbol>{sp.paths[12], sp.paths[13]}) == "cc");
  const auto paths = trie.leaf_paths(5);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].leaf == 6);
  CHECK(letters(paths[0].suffix) == "ca");
  CHECK(paths[1].leaf == 7);
  CHECK(letters(paths[1].suffix) == "cc");
  CHECK(paths[1].vertical.size() == 2);
  CHECK_THROWS_AS(trie.leaf_paths(8), std::out_of_range);
}

TEST_CASE("degenerate sparse layers") {
  PlanOptions o;
  o.sparse_level = 5;
  const auto full = SketchTrie::build(test::worked_dataset(), o);
  const auto leaves = full.leaf_paths(4);
  REQUIRE(leaves.size() == 1);
  CHECK(leaves[0].leaf == 4);
  CHECK(leaves[0].suffix.empty());

  const auto one = SketchTrie::build(test::from_strings(2, {"dcbad"}));
  CHECK(one.plan().dense_level == 0);
  CHECK(one.plan().sparse_level == 0);
  const auto path = one.leaf_paths(1);
  REQUIRE(path.size() == 1);
  CHECK(letters(path[0].suffix) == "dcbad");
}

TEST_CASE("search over the worked dataset") {
  const auto trie = worked_trie();
  SearchScratch scratch;
  CHECK(trie.search(sym("aaaaa"), 1, scratch) == ids({2, 3, 6}));
  CHECK(trie.search(sym("aaaaa"), 0, scratch) == ids({2, 6}));
  CHECK(trie.search(sym("dbbba"), 0, scratch).empty());
  CHECK(trie.search(sym("bbbbb"), 5, scratch).size() == 11);
  CHECK_THROWS_AS(trie.search(sym("aaaa"), 1, scratch), std::invalid_argument);
  CHECK_THROWS_AS(trie.search(std::vector<Symbol>{0, 0, 0, 0, 4}, 1, scratch), std::invalid_argument);
  CHECK_THROWS_AS(trie.search(sym("aaaaa"), 6, scratch), std::invalid_argument);
}

TEST_CASE("children agree with the pointer trie") {
  for (unsigned b : {1U, 2U, 4U, 8U}) {
    for (unsigned len : {8U, 16U, 32U}) {
      for (std::size_t n : {1U, 100U, 3000U}) {
        const auto ds = test::random_dataset(b, len, n, b * 1000 + len + n);
        const auto pt = PointerTrie::build(ds);
        for (auto choice : {EncodingChoice::kAuto, EncodingChoice::kTable, EncodingChoice::kList}) {
          PlanOptions o;
          o.encoding = choice;
          const auto trie = SketchTrie::encode(pt, plan_layers(pt, o));
          for (unsigned level = 0; level < trie.plan().sparse_level; ++level) {
            for (std::uint64_t u = 1; u <= pt.level_size(level); ++u) {
              REQUIRE(trie.children(level, u) == pt.children(level, u));
            }
          }
          for (std::uint64_t u = 1; u <= pt.level_size(trie.plan().sparse_level); ++u) {
            for (const auto& leaf : trie.leaf_paths(u)) {
              const auto full = pt.prefix(len, leaf.leaf);
              REQUIRE(std::equal(leaf.suffix.begin(), leaf.suffix.end(),
                                 full.begin() + trie.plan().sparse_level));
              const auto a = trie.leaf_ids(leaf.leaf);
              const auto e = pt.leaf_ids(leaf.leaf);
              REQUIRE(std::equal(a.begin(), a.end(), e.begin(), e.end()));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("search agrees with linear scan and is monotone in tau") {
  std::mt19937_64 rng(99);
  for (unsigned b : {1U, 2U, 4U, 8U}) {
    for (unsigned len : {8U, 16U, 32U}) {
      const auto ds = test::random_dataset(b, len, 2000, b + len);
      const auto trie = SketchTrie::build(ds);
      SearchScratch scratch;
      for (int qi = 0; qi < 20; ++qi) {
        const auto row = ds.row(qi * 97 % ds.size());
        std::vector<Symbol> q(row.begin(), row.end());
        if (qi & 1) q[rng() % len] = static_cast<Symbol>(rng() & ((1U << b) - 1));
        std::size_t prev_answers = 0;
        std::uint64_t prev_nodes = 0;
        for (unsigned tau : {0U, 1U, 2U, 3U, 4U, 5U, len}) {
          const auto got = trie.search(q, tau, scratch);
          REQUIRE(got == linear_scan(ds, q, tau));
          REQUIRE(got.size() >= prev_answers);
          REQUIRE(scratch.traversed_nodes >= prev_nodes);
          prev_answers = got.size();
          prev_nodes = scratch.traversed_nodes;
        }
      }
    }
  }
}

TEST_CASE("plans over the same data accept the same leaves") {
  const auto ds = test::random_dataset(2, 16, 5000, 17);
  const auto pt = PointerTrie::build(ds);
  std::vector<SketchTrie> tries;
  tries.push_back(SketchTrie::encode(pt, plan_layers(pt)));
  PlanOptions flat;
  flat.dense_level = 0;
  flat.sparse_level = 16;
  tries.push_back(SketchTrie::encode(pt, plan_layers(pt, flat)));
  PlanOptions shallow;
  shallow.sparse_level = 0;
  tries.push_back(SketchTrie::encode(pt, plan_layers(pt, shallow)));
  PlanOptions lists;
  lists.encoding = EncodingChoice::kList;
  lists.lambda = 0.9;
  tries.push_back(SketchTrie::encode(pt, plan_layers(pt, lists)));

  std::mt19937_64 rng(4);
  SearchScratch scratch;
  scratch.record_leaves = true;
  for (int i = 0; i < 100; ++i) {
    const auto q = test::random_sketch(ds.params(), rng);
    for (unsigned tau : {1U, 3U, 5U}) {
      tries[0].search(q, tau, scratch);
      auto expected = scratch.accepted_leaves;
      std::sort(expected.begin(), expected.end());
      for (std::size_t t = 1; t < tries.size(); ++t) {
        tries[t].search(q, tau, scratch);
        auto got = scratch.accepted_leaves;
        std::sort(got.begin(), got.end());
        REQUIRE(got == expected);
      }
    }
  }
}

TEST_CASE("plan selection rules") {
  const auto ds = test::random_dataset(2, 16, 100000, 5);
  const auto pt = PointerTrie::build(ds);
  const auto plan = plan_layers(pt);
  CHECK(plan.dense_level >= 5);
  CHECK(plan.encoding(plan.dense_level + 1) == LevelEncoding::kTable);
  const auto trie = SketchTrie::encode(pt, plan);
  const auto report = trie.space_report();
  const unsigned b = 2;
  for (const auto& lvl : report.levels) {
    if (lvl.encoding == LevelEncoding::kDense) {
      CHECK(lvl.payload_bits == 0);
      continue;
    }
    const std::uint64_t table = (1ULL << b) * plan.level_counts[lvl.level - 1];
    const std::uint64_t list = (b + 1) * plan.level_counts[lvl.level];
    CHECK(lvl.payload_bits == (lvl.encoding == LevelEncoding::kTable ? table : list));
    CHECK(lvl.payload_bits == std::min(table, list));
  }
  // lambda condition: the sparse level is the first at or below the dense
  // level where more than half of the leaves have distinct ancestors.
  const double tl = static_cast<double>(plan.level_counts.back());
  CHECK(static_cast<double>(plan.level_counts[plan.sparse_level]) > 0.5 * tl);
  if (plan.sparse_level > plan.dense_level) {
    CHECK(static_cast<double>(plan.level_counts[plan.sparse_level - 1]) <= 0.5 * tl);
  }
}

TEST_CASE("fully dense trie") {
  SketchDataset ds(SketchParams(1, 4));
  for (unsigned code = 0; code < 16; ++code) {
    ds.push_back(std::vector<Symbol>{static_cast<Symbol>(code >> 3 & 1), static_cast<Symbol>(code >> 2 & 1),
                                     static_cast<Symbol>(code >> 1 & 1), static_cast<Symbol>(code & 1)});
  }
  const auto trie = SketchTrie::build(ds);
  CHECK(trie.plan().dense_level == 4);
  CHECK(trie.plan().sparse_level == 4);
  SearchScratch scratch;
  CHECK(trie.search(std::vector<Symbol>{0, 0, 0, 0}, 1, scratch) == ids({1, 2, 3, 5, 9}));
}

TEST_CASE("plan argument errors") {
  const auto pt = PointerTrie::build(test::worked_dataset());
  PlanOptions o;
  o.lambda = 1.5;
  CHECK_THROWS_AS(plan_layers(pt, o), std::invalid_argument);
  o.lambda = 0.0;
  CHECK_THROWS_AS(plan_layers(pt, o), std::invalid_argument);
  PlanOptions deep;
  deep.dense_level = 2; // level 2 is not complete
  CHECK_THROWS_AS(plan_layers(pt, deep), std::invalid_argument);
  PlanOptions past;
  past.sparse_level = 6;
  CHECK_THROWS_AS(plan_layers(pt, past), std::invalid_argument);
  PlanOptions crossed;
  crossed.dense_level = 1;
  crossed.sparse_level = 0;
  CHECK_THROWS_AS(plan_layers(pt, crossed), std::invalid_argument);
  const auto trie = worked_trie();
  CHECK_THROWS_AS(trie.children(3, 1), std::out_of_range);
  CHECK_THROWS_AS(trie.children(1, 5), std::out_of_range);
  CHECK_THROWS_AS(trie.children(1, 0), std::out_of_range);
  CHECK_THROWS_AS(trie.middle_level(1), std::out_of_range);
}

TEST_CASE("space report on the worked trie") {
  const auto trie = worked_trie();
  const auto r = trie.space_report();
  REQUIRE(r.levels.size() == 3);
  CHECK(r.levels[1].payload_bits == 16); // TABLE: 2^2 * t_1
  CHECK(r.levels[2].payload_bits == 21); // LIST: 3 * t_3
  CHECK(r.sparse_path_bits == 2 * 2 * 9);
  CHECK(r.sparse_leftmost_bits == 9);
  std::uint64_t sum = 0;
  for (const auto& l : r.levels) sum += l.payload_bits + l.auxiliary_bits;
  sum += r.sparse_path_bits + r.sparse_leftmost_bits + r.sparse_auxiliary_bits + r.vertical_copy_bits +
         r.leaf_id_bits + r.leaf_group_bits + r.leaf_auxiliary_bits;
  CHECK(r.total_bits() == sum);
}

TEST_CASE("TABLE payload with six parents and LIST payload with seven nodes") {
  // Level 3 of the worked trie has t_2 = 6 parents and t_3 = 7 nodes.
  const auto pt = PointerTrie::build(test::worked_dataset());
  PlanOptions table;
  table.lambda = 0.7;
  table.encoding = EncodingChoice::kTable;
  PlanOptions list = table;
  list.encoding = EncodingChoice::kList;
  const auto rt = SketchTrie::encode(pt, plan_layers(pt, table)).space_report();
  const auto rl = SketchTrie::encode(pt, plan_layers(pt, list)).space_report();
  CHECK(rt.levels[2].payload_bits == 24);
  CHECK(rl.levels[2].payload_bits == 21);
}

TEST_CASE("serialization round trip and corruption") {
  const auto ds = test::random_dataset(4, 24, 3000, 8);
  const auto trie = SketchTrie::build(ds);
  std::stringstream ss;
  BinaryWriter w(ss);
  trie.write(w);
  const std::string bytes = ss.str();

  std::istringstream in(bytes);
  BinaryReader r(in);
  const auto back = SketchTrie::read(r);
  SearchScratch s1;
  SearchScratch s2;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto q = test::random_sketch(ds.params(), rng);
    CHECK(back.search(q, 4, s1) == trie.search(q, 4, s2));
  }

  for (std::size_t cut : {std::size_t{3}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream short_in(bytes.substr(0, cut));
    BinaryReader rs(short_in);
    CHECK_THROWS_AS(SketchTrie::read(rs), FormatError);
  }
  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream bad_in(bad);
  BinaryReader rb(bad_in);
  CHECK_THROWS_AS(SketchTrie::read(rb), FormatError);
}

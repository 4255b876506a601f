#include <doctest.h>

#include <random>
#include <sstream>
#include <stdexcept>

#include "bst/binary_io.hpp"
#include "bst/sketch.hpp"
#include "fixtures.hpp"

using namespace bst;
using bst::test::sym;

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SketchParams(0, 8), std::invalid_argument);
  CHECK_THROWS_AS(SketchParams(9, 8), std::invalid_argument);
  CHECK_THROWS_AS(SketchParams(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(SketchParams(2, 257), std::invalid_argument);
  const SketchParams p(8, 256);
  CHECK(p.alphabet_size() == 256);
  CHECK(p.plane_words() == 4);
  CHECK(p.vertical_words() == 32);
}

TEST_CASE("dataset rejects out-of-alphabet symbols and ragged rows") {
  CHECK_THROWS_AS(SketchDataset(SketchParams(2, 3), {0, 1, 4}), std::invalid_argument);
  CHECK_THROWS_AS(SketchDataset(SketchParams(2, 3), {0, 1}), std::invalid_argument);
  SketchDataset ds(SketchParams(2, 3));
  CHECK_THROWS_AS(ds.push_back(sym("ab")), std::invalid_argument);
  CHECK_THROWS_AS(ds.push_back(std::vector<Symbol>{0, 0, 7}), std::invalid_argument);
}

TEST_CASE("naive Hamming distance") {
  CHECK(hamming_naive(sym("abd"), sym("acd")) == 1);
  CHECK(hamming_naive(sym("aaaaa"), sym("baabb")) == 3);
  CHECK(hamming_naive(sym("dcba"), sym("dcba")) == 0);
  CHECK_THROWS_AS(hamming_naive(sym("ab"), sym("abc")), std::invalid_argument);
}

TEST_CASE("vertical encoding of abd and acd") {
  const auto s = encode_vertical(sym("abd"), 2);
  const auto q = encode_vertical(sym("acd"), 2);
  // Reading position 1 as the leftmost character: plane 0 of abd is 001,
  // plane 1 is 011. Bit j of the word is position j + 1.
  REQUIRE(s.size() == 2);
  CHECK(s[0] == 0b100);
  CHECK(s[1] == 0b110);
  CHECK(q[0] == 0b110);
  CHECK(q[1] == 0b100);
  const SketchParams p(2, 3);
  const auto bits = mismatch_mask({s, p}, {q, p});
  CHECK(bits[0] == 0b010);
  CHECK(hamming_vertical({s, p}, {q, p}) == 1);
}

TEST_CASE("bounded vertical distance") {
  const SketchParams p(2, 5);
  const auto a = encode_vertical(sym("aaaaa"), 2);
  const auto b = encode_vertical(sym("baabb"), 2);
  const auto c = encode_vertical(sym("baaaa"), 2);
  CHECK(hamming_vertical_bounded({a, p}, {c, p}, 1) == 1);
  CHECK(hamming_vertical_bounded({a, p}, {b, p}, 1) == kDistanceExceeded);
  CHECK(hamming_vertical_bounded({a, p}, {b, p}, 5) == 3);
  CHECK(hamming_vertical({a, p}, {a, p}) == 0);
}

TEST_CASE("vertical kernel rejects mismatched parameters") {
  const auto a = encode_vertical(sym("aaaa"), 2);
  const auto b = encode_vertical(sym("aaaa"), 3);
  CHECK_THROWS_AS(hamming_vertical({a, SketchParams(2, 4)}, {b, SketchParams(3, 4)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(hamming_vertical({a, SketchParams(2, 4)}, {a, SketchParams(2, 100)}),
                  std::invalid_argument);
}

TEST_CASE("vertical kernel equals naive distance on random pairs") {
  std::mt19937_64 rng(11);
  for (unsigned b : {1U, 2U, 4U, 8U}) {
    for (unsigned len : {8U, 16U, 32U, 64U, 100U, 256U}) {
      const SketchParams p(b, len);
      for (int i = 0; i < 2000; ++i) {
        const auto s = test::random_sketch(p, rng);
        auto q = test::random_sketch(p, rng);
        // Half the pairs are near each other so small distances are covered.
        if (i & 1) {
          q = s;
          for (int k = 0; k < 3; ++k) q[rng() % len] = static_cast<Symbol>(rng() & (p.alphabet_size() - 1));
        }
        const auto sv = encode_vertical(s, b);
        const auto qv = encode_vertical(q, b);
        const unsigned d = hamming_naive(s, q);
        REQUIRE(hamming_vertical({sv, p}, {qv, p}) == d);
        const unsigned limit = static_cast<unsigned>(rng() % (len + 1));
        REQUIRE(hamming_vertical_bounded({sv, p}, {qv, p}, limit) == (d <= limit ? d : kDistanceExceeded));
      }
    }
  }
}

TEST_CASE("triangle inequality and symmetry") {
  std::mt19937_64 rng(5);
  const SketchParams p(2, 16);
  for (int i = 0; i < 1000; ++i) {
    const auto x = test::random_sketch(p, rng);
    const auto y = test::random_sketch(p, rng);
    const auto z = test::random_sketch(p, rng);
    CHECK(hamming_naive(x, y) == hamming_naive(y, x));
    CHECK(hamming_naive(x, z) <= hamming_naive(x, y) + hamming_naive(y, z));
  }
}

TEST_CASE("vertical set round trip") {
  const auto ds = test::random_dataset(3, 70, 200, 9);
  const auto v = to_vertical(ds);
  REQUIRE(v.size() == 200);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto h = v.horizontal(i);
    REQUIRE(std::equal(h.begin(), h.end(), ds.row(i).begin()));
  }
  CHECK(v.plane_bit(0, 0, 0) == ((ds.row(0)[0] >> 2) & 1U));

  std::stringstream ss;
  BinaryWriter w(ss);
  v.write(w);
  BinaryReader r(ss);
  const auto back = VerticalSketchSet::read(r);
  CHECK(back.size() == v.size());
  CHECK(back.horizontal(17) == v.horizontal(17));

  const auto empty = to_vertical(SketchDataset(SketchParams(2, 4)));
  CHECK(empty.size() == 0);
  CHECK(empty.bytes() == 0);
}

TEST_CASE("block partition") {
  auto lengths = [](const BlockPartition& bp) {
    std::vector<unsigned> out;
    for (const auto& b : bp.blocks) out.push_back(b.length);
    return out;
  };
  CHECK(lengths(partition(SketchParams(2, 32), 2)) == std::vector<unsigned>{16, 16});
  CHECK(lengths(partition(SketchParams(2, 16), 3)) == std::vector<unsigned>{6, 5, 5});
  CHECK(lengths(partition(SketchParams(2, 5), 5)) == std::vector<unsigned>{1, 1, 1, 1, 1});
  CHECK_THROWS_AS(partition(SketchParams(2, 5), 0), std::invalid_argument);
  CHECK_THROWS_AS(partition(SketchParams(2, 5), 6), std::invalid_argument);
  for (unsigned len = 1; len <= 40; ++len) {
    for (unsigned m = 1; m <= len; ++m) {
      const auto bp = partition(SketchParams(1, len), m);
      unsigned pos = 0;
      for (const auto& b : bp.blocks) {
        REQUIRE(b.begin == pos);
        REQUIRE(b.length >= 1);
        pos += b.length;
      }
      REQUIRE(pos == len);
    }
  }
}

TEST_CASE("column slices") {
  const auto ds = test::worked_dataset();
  const auto tail = ds.columns(3, 2);
  CHECK(tail.params().length == 2);
  CHECK(test::letters(tail.row(0)) == "bb");
  CHECK(test::letters(tail.row(10)) == "dd");
  CHECK_THROWS_AS(ds.columns(4, 2), std::invalid_argument);
}

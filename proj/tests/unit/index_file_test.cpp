#include <doctest.h>

#include <random>
#include <sstream>

#include "bst/errors.hpp"
#include "bst/index_file.hpp"
#include "fixtures.hpp"

using namespace bst;

TEST_CASE("every variant survives a save and load") {
  const auto ds = test::random_dataset(2, 18, 1500, 31);
  std::mt19937_64 rng(9);
  for (auto kind : {IndexKind::kSiBst, IndexKind::kMiBst, IndexKind::kSih, IndexKind::kMih, IndexKind::kScan}) {
    CAPTURE(to_string(kind));
    IndexOptions o;
    o.kind = kind;
    o.blocks = kind == IndexKind::kMiBst || kind == IndexKind::kMih ? 3 : 0;
    const auto idx = build_index(ds, o);
    std::stringstream ss;
    save_index(*idx, ss);
    const auto back = load_index(ss);
    CHECK(back->kind() == kind);
    CHECK(back->size() == ds.size());
    CHECK(back->params() == ds.params());
    QueryScratch a;
    QueryScratch b;
    for (int i = 0; i < 20; ++i) {
      const auto q = test::random_sketch(ds.params(), rng);
      CHECK(back->search(q, 3, a) == idx->search(q, 3, b));
    }
  }
}

TEST_CASE("container errors") {
  const auto idx = build_index(test::worked_dataset(), IndexOptions{});
  std::stringstream ss;
  save_index(*idx, ss);
  const std::string good = ss.str();

  std::string magic = good;
  magic[0] = 'Q';
  std::istringstream m(magic);
  CHECK_THROWS_AS(load_index(m), FormatError);

  std::string tag = good;
  tag[4] = 42;
  std::istringstream t(tag);
  CHECK_THROWS_AS(load_index(t), FormatError);

  for (std::size_t cut = 0; cut < good.size(); cut += 7) {
    std::istringstream c(good.substr(0, cut));
    CHECK_THROWS_AS(load_index(c), FormatError);
  }
  std::istringstream extra(good + "x");
  CHECK_THROWS_AS(load_index(extra), FormatError);
}

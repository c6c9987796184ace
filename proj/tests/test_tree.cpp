#include "doctest.h"

#include <vector>

#include "covertree/tree.hpp"

using namespace covertree;

namespace {

VertexId scan_ancestor(VertexId v, int j) {
  // Walk up one parent at a time.
  while (v.level > j) v = v.level == 0 ? VertexId::root() : VertexId{v.level - 1, v.index >> 1};
  return v;
}

VertexId scan_lca(VertexId u, VertexId v) {
  for (int j = std::min(u.level, v.level); j >= 0; --j) {
    if (scan_ancestor(u, j) == scan_ancestor(v, j)) return scan_ancestor(u, j);
  }
  return VertexId::root();
}

}  // namespace

TEST_CASE("ancestor") {
  CHECK(ancestor({3, 5}, 3) == VertexId{3, 5});
  CHECK(ancestor({3, 5}, -1) == VertexId::root());
  CHECK(ancestor({3, 5}, 1) == VertexId{1, 1});
  CHECK(ancestor({3, 5}, 1) == scan_ancestor({3, 5}, 1));
  CHECK(ancestor({3, 5}, 0) == VertexId{0, 0});
  CHECK_THROWS_AS(ancestor({3, 5}, 4), DomainError);
  CHECK_THROWS_AS(ancestor({3, 5}, -2), DomainError);
}

TEST_CASE("ancestor composes") {
  for (int level = 0; level <= 7; ++level) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << level); ++i) {
      const VertexId v{level, i};
      for (int j = -1; j <= level; ++j) {
        for (int jp = j; jp <= level; ++jp) REQUIRE(ancestor(ancestor(v, jp), j) == ancestor(v, j));
        REQUIRE(ancestor(v, j) == scan_ancestor(v, j));
      }
    }
  }
}

TEST_CASE("lca") {
  CHECK(lca({4, 9}, {4, 9}) == VertexId{4, 9});
  CHECK(lca({2, 0}, {2, 3}) == VertexId{0, 0});
  CHECK(lca({3, 4}, {3, 5}) == VertexId{2, 2});
  CHECK(lca({3, 4}, {3, 5}) == scan_lca({3, 4}, {3, 5}));
  CHECK(lca({1, 1}, {5, 31}) == VertexId{1, 1});
}

TEST_CASE("lca agrees with ancestor scan on T_6") {
  std::vector<VertexId> all;
  for (int level = 0; level <= 6; ++level) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << level); ++i) all.push_back({level, i});
  }
  for (const auto& u : all) {
    for (const auto& v : all) REQUIRE(lca(u, v) == scan_lca(u, v));
  }
}

TEST_CASE("subtree_leaves") {
  std::vector<VertexId> got;
  for (auto v : subtree_leaves({1, 0}, 3)) got.push_back(v);
  CHECK(got == std::vector<VertexId>{{3, 0}, {3, 1}, {3, 2}, {3, 3}});
  for (auto v : got) CHECK(ancestor(v, 1) == VertexId{1, 0});

  got.clear();
  for (auto v : subtree_leaves({4, 7}, 4)) got.push_back(v);
  CHECK(got == std::vector<VertexId>{{4, 7}});

  std::size_t count = 0;
  for (auto v : subtree_leaves({0, 0}, 5)) {
    CHECK(v.level == 5);
    ++count;
  }
  CHECK(count == 32);
  CHECK_THROWS_AS(subtree_leaves({4, 0}, 3), DomainError);
}

TEST_CASE("subtree leaves partition the leaves") {
  for (int n = 0; n <= 10; ++n) {
    for (int k = 0; k <= n; ++k) {
      std::uint64_t total = 0;
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) {
        for (auto v : subtree_leaves({k, i}, n)) {
          REQUIRE(ancestor(v, k) == VertexId{k, i});
          ++total;
        }
      }
      REQUIRE(total == (std::uint64_t{1} << n));
    }
  }
}

TEST_CASE("heap ids and shape") {
  CHECK(VertexId::root().heap_id() == 0);
  CHECK(VertexId{0, 0}.heap_id() == 1);
  CHECK(VertexId{3, 5}.heap_id() == 13);
  CHECK(VertexId::from_heap_id(13) == VertexId{3, 5});
  CHECK(VertexId::from_heap_id(0).is_root());
  CHECK(heap_level(13) == 3);
  CHECK(VertexId{2, 1}.child(1) == VertexId{3, 3});
  CHECK(TreeShape{4}.leaf_count() == 16);
  CHECK(TreeShape{4}.edge_count() == 31);
  CHECK(TreeShape{0}.edge_count() == 1);
}

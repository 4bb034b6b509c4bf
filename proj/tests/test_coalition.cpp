#include <doctest.h>

#include <bit>
#include <set>
#include <vector>

#include "jshap/coalition.hpp"

using jshap::Coalition;
using jshap::Permutation;

TEST_SUITE_BEGIN("coalition");

TEST_CASE("subset enumeration yields exactly 2^m distinct subsets") {
  for (int m = 0; m <= 6; ++m) {
    const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
    std::set<std::uint64_t> seen;
    jshap::for_each_subset(mask, [&](std::uint64_t s) {
      CHECK((s & ~mask) == 0);
      seen.insert(s);
    });
    CHECK(seen.size() == (std::size_t{1} << m));
  }
  // Non-contiguous mask.
  std::set<std::uint64_t> seen;
  jshap::for_each_subset(0b10110, [&](std::uint64_t s) { seen.insert(s); });
  CHECK(seen.size() == 8);
}

TEST_CASE("fixed-size mask enumeration is complete and ascending") {
  for (int n = 1; n <= 8; ++n) {
    std::size_t total = 0;
    for (int t = 0; t <= n; ++t) {
      std::uint64_t prev = 0;
      bool first = true;
      std::size_t count = 0;
      jshap::for_each_mask_of_size(n, t, [&](std::uint64_t m) {
        CHECK(std::popcount(m) == t);
        if (!first) CHECK(m > prev);
        prev = m;
        first = false;
        ++count;
      });
      total += count;
    }
    CHECK(total == (std::size_t{1} << n));
  }
}

TEST_CASE("basic set algebra") {
  const Coalition a = Coalition::from_agents(5, {0, 2, 4});
  CHECK(a.size() == 3);
  CHECK(a.contains(0));
  CHECK(!a.contains(1));
  CHECK(a.with(1).size() == 4);
  CHECK(a.without(2) == Coalition::from_agents(5, {0, 4}));
  const Coalition b = Coalition::from_agents(5, {1, 2});
  CHECK(a.unite(b) == Coalition::from_agents(5, {0, 1, 2, 4}));
  CHECK(a.minus(b) == Coalition::from_agents(5, {0, 4}));
  CHECK(a.intersect(b) == Coalition::from_agents(5, {2}));
  CHECK(a.complement() == Coalition::from_agents(5, {1, 3}));
  CHECK(Coalition::from_agents(5, {0, 4}).subset_of(a));
  CHECK(!a.subset_of(b));
  CHECK(a.intersects(b));
  CHECK(!Coalition::from_agents(5, {1}).intersects(a));
  CHECK(Coalition::empty(5).is_empty());
  CHECK(Coalition::full(5).size() == 5);
  CHECK_THROWS(a.contains(5));
  CHECK_THROWS(Coalition::from_agents(3, {3}));
  CHECK_THROWS(a.unite(Coalition::empty(4)));
}

TEST_CASE("cardinality equals the number of listed agents") {
  const Coalition c = Coalition::from_bits(8, 0b10110101);
  CHECK(c.size() == static_cast<int>(c.agents().size()));
  CHECK(c.agents() == std::vector<int>{0, 2, 4, 5, 7});
}

TEST_CASE("key round-trip") {
  const Coalition c = Coalition::from_agents(6, {0, 2, 3});
  CHECK(c.key() == "0,2,3");
  CHECK(Coalition::from_key(6, "0,2,3") == c);
  CHECK(Coalition::from_key(6, "3,0,2") == c);  // order-insensitive
  CHECK(Coalition::from_key(6, "").is_empty());
  CHECK_THROWS(Coalition::from_key(2, "5"));
}

TEST_CASE("wide path (n > 64)") {
  const int n = 100;
  const Coalition c = Coalition::from_agents(n, {3, 64, 99});
  CHECK(c.is_wide());
  CHECK(c.size() == 3);
  CHECK(c.contains(64));
  CHECK(!c.contains(63));
  CHECK(c.agents() == std::vector<int>{3, 64, 99});
  CHECK(c.key() == "3,64,99");
  const Coalition d = Coalition::from_agents(n, {64});
  CHECK(c.minus(d) == Coalition::from_agents(n, {3, 99}));
  CHECK(c.unite(Coalition::from_agents(n, {70})).size() == 4);
  CHECK(c.complement().size() == n - 3);
  CHECK(Coalition::full(n).size() == n);
  CHECK_THROWS(c.bits());
}

TEST_CASE("canonical ordering: cardinality then mask") {
  const Coalition s0 = Coalition::from_agents(3, {2});
  const Coalition p01 = Coalition::from_agents(3, {0, 1});
  const Coalition p02 = Coalition::from_agents(3, {0, 2});
  const Coalition p12 = Coalition::from_agents(3, {1, 2});
  CHECK(jshap::coalition_canonical_less(s0, p01));
  CHECK(jshap::coalition_canonical_less(p01, p02));
  CHECK(jshap::coalition_canonical_less(p02, p12));
  CHECK(!jshap::coalition_canonical_less(p12, p01));
}

TEST_CASE("permutations") {
  CHECK_THROWS(Permutation({0, 0, 1}));
  CHECK_THROWS(Permutation({0, 2}));
  const Permutation sigma({1, 2, 0});
  CHECK(sigma(0) == 1);
  CHECK(sigma.image(Coalition::from_agents(3, {0, 2})) == Coalition::from_agents(3, {1, 0}));
  const Permutation inv = sigma.inverse();
  for (int i = 0; i < 3; ++i) CHECK(inv(sigma(i)) == i);
  const Permutation sw = Permutation::swap_two(4, 1, 3);
  CHECK(sw(1) == 3);
  CHECK(sw(3) == 1);
  CHECK(sw(0) == 0);
}

TEST_SUITE_END();

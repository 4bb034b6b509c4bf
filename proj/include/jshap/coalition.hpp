// Coalitions are subsets of the agent set {0..n-1}, stored as bitmasks.
// A single 64-bit word covers n <= 64; larger agent counts (used only by the
// sampling paths) switch to a multi-word representation.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace jshap {

class Coalition {
 public:
  Coalition() = default;

  static Coalition empty(int n);
  static Coalition full(int n);
  static Coalition from_bits(int n, std::uint64_t bits);  // n <= 64
  static Coalition from_agents(int n, const std::vector<int>& agents);
  static Coalition singleton(int n, int agent);
  // Parses "0,2,3" ("" = empty coalition).
  static Coalition from_key(int n, const std::string& key);

  int agent_count() const { return n_; }
  int size() const;  // cardinality = popcount
  bool is_empty() const;
  bool is_wide() const { return n_ > 64; }

  bool contains(int agent) const;
  Coalition with(int agent) const;
  Coalition without(int agent) const;
  Coalition unite(const Coalition& o) const;
  Coalition minus(const Coalition& o) const;
  Coalition intersect(const Coalition& o) const;
  Coalition complement() const;
  bool subset_of(const Coalition& o) const;
  bool intersects(const Coalition& o) const;

  // Valid only when n <= 64.
  std::uint64_t bits() const;
  std::vector<int> agents() const;
  // Sorted-agent-list form, e.g. "0,2,3"; empty string for the empty set.
  std::string key() const;

  bool operator==(const Coalition& o) const;
  bool operator!=(const Coalition& o) const { return !(*this == o); }

 private:
  void check_agent(int agent) const;

  int n_ = 0;
  std::uint64_t bits_ = 0;           // n_ <= 64
  std::vector<std::uint64_t> ext_;   // n_ > 64: ceil(n/64) words, LSB-first
};

// Deterministic output ordering: by cardinality, then by mask value.
bool coalition_canonical_less(const Coalition& a, const Coalition& b);

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const;
};

// Enumerates all subsets of `mask` (including 0 and mask itself) in the
// standard descending subset order.
template <class F>
inline void for_each_subset(std::uint64_t mask, F&& f) {
  std::uint64_t s = mask;
  while (true) {
    f(s);
    if (s == 0) break;
    s = (s - 1) & mask;
  }
}

// Enumerates all n-bit masks of popcount t in increasing numeric order.
template <class F>
inline void for_each_mask_of_size(int n, int t, F&& f) {
  if (t < 0 || t > n) return;
  if (t == 0) {
    f(std::uint64_t{0});
    return;
  }
  std::uint64_t v = (t == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << t) - 1);
  const std::uint64_t limit = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  while (v <= limit) {
    f(v);
    // Gosper's hack: next mask with the same popcount.
    std::uint64_t c = v & (~v + 1);
    std::uint64_t r = v + c;
    if (r == 0) break;  // overflow: done
    v = (((r ^ v) >> 2) / c) | r;
  }
}

class Permutation {
 public:
  explicit Permutation(std::vector<int> map);  // validates bijection on {0..n-1}
  static Permutation identity(int n);
  static Permutation swap_two(int n, int a, int b);

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int agent) const;
  Coalition image(const Coalition& s) const;
  Permutation inverse() const;

 private:
  std::vector<int> map_;
};

}  // namespace jshap

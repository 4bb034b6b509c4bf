#include "jshap/coalition.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace jshap {

namespace {
int word_count(int n) { return (n + 63) / 64; }
}  // namespace

Coalition Coalition::empty(int n) {
  if (n < 0) throw std::invalid_argument("Coalition: negative agent count");
  Coalition c;
  c.n_ = n;
  if (n > 64) c.ext_.assign(word_count(n), 0);
  return c;
}

Coalition Coalition::full(int n) {
  Coalition c = empty(n);
  if (n <= 64) {
    c.bits_ = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  } else {
    for (int w = 0; w < word_count(n); ++w) c.ext_[w] = ~std::uint64_t{0};
    int rem = n % 64;
    if (rem != 0) c.ext_.back() = (std::uint64_t{1} << rem) - 1;
  }
  return c;
}

Coalition Coalition::from_bits(int n, std::uint64_t bits) {
  if (n < 0 || n > 64) throw std::invalid_argument("Coalition::from_bits requires n <= 64");
  if (n < 64 && (bits >> n) != 0)
    throw std::invalid_argument("Coalition::from_bits: bits out of range for n");
  Coalition c;
  c.n_ = n;
  c.bits_ = bits;
  return c;
}

Coalition Coalition::from_agents(int n, const std::vector<int>& agents) {
  Coalition c = empty(n);
  for (int a : agents) {
    c.check_agent(a);
    if (c.n_ <= 64) {
      c.bits_ |= std::uint64_t{1} << a;
    } else {
      c.ext_[a / 64] |= std::uint64_t{1} << (a % 64);
    }
  }
  return c;
}

Coalition Coalition::singleton(int n, int agent) { return from_agents(n, {agent}); }

Coalition Coalition::from_key(int n, const std::string& key) {
  std::vector<int> agents;
  std::stringstream ss(key);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    agents.push_back(std::stoi(tok));
  }
  return from_agents(n, agents);
}

void Coalition::check_agent(int agent) const {
  if (agent < 0 || agent >= n_)
    throw std::out_of_range("Coalition: agent " + std::to_string(agent) +
                            " out of range for n=" + std::to_string(n_));
}

int Coalition::size() const {
  if (n_ <= 64) return std::popcount(bits_);
  int s = 0;
  for (auto w : ext_) s += std::popcount(w);
  return s;
}

bool Coalition::is_empty() const {
  if (n_ <= 64) return bits_ == 0;
  return std::all_of(ext_.begin(), ext_.end(), [](std::uint64_t w) { return w == 0; });
}

bool Coalition::contains(int agent) const {
  check_agent(agent);
  if (n_ <= 64) return (bits_ >> agent) & 1;
  return (ext_[agent / 64] >> (agent % 64)) & 1;
}

Coalition Coalition::with(int agent) const {
  check_agent(agent);
  Coalition c = *this;
  if (n_ <= 64)
    c.bits_ |= std::uint64_t{1} << agent;
  else
    c.ext_[agent / 64] |= std::uint64_t{1} << (agent % 64);
  return c;
}

Coalition Coalition::without(int agent) const {
  check_agent(agent);
  Coalition c = *this;
  if (n_ <= 64)
    c.bits_ &= ~(std::uint64_t{1} << agent);
  else
    c.ext_[agent / 64] &= ~(std::uint64_t{1} << (agent % 64));
  return c;
}

namespace {
void check_same_n(const Coalition& a, const Coalition& b) {
  if (a.agent_count() != b.agent_count())
    throw std::invalid_argument("Coalition: agent-count mismatch (" +
                                std::to_string(a.agent_count()) + " vs " +
                                std::to_string(b.agent_count()) + ")");
}
}  // namespace

Coalition Coalition::unite(const Coalition& o) const {
  check_same_n(*this, o);
  Coalition c = *this;
  if (n_ <= 64)
    c.bits_ |= o.bits_;
  else
    for (std::size_t w = 0; w < ext_.size(); ++w) c.ext_[w] |= o.ext_[w];
  return c;
}

Coalition Coalition::minus(const Coalition& o) const {
  check_same_n(*this, o);
  Coalition c = *this;
  if (n_ <= 64)
    c.bits_ &= ~o.bits_;
  else
    for (std::size_t w = 0; w < ext_.size(); ++w) c.ext_[w] &= ~o.ext_[w];
  return c;
}

Coalition Coalition::intersect(const Coalition& o) const {
  check_same_n(*this, o);
  Coalition c = *this;
  if (n_ <= 64)
    c.bits_ &= o.bits_;
  else
    for (std::size_t w = 0; w < ext_.size(); ++w) c.ext_[w] &= o.ext_[w];
  return c;
}

Coalition Coalition::complement() const { return full(n_).minus(*this); }

bool Coalition::subset_of(const Coalition& o) const {
  check_same_n(*this, o);
  if (n_ <= 64) return (bits_ & ~o.bits_) == 0;
  for (std::size_t w = 0; w < ext_.size(); ++w)
    if ((ext_[w] & ~o.ext_[w]) != 0) return false;
  return true;
}

bool Coalition::intersects(const Coalition& o) const {
  check_same_n(*this, o);
  if (n_ <= 64) return (bits_ & o.bits_) != 0;
  for (std::size_t w = 0; w < ext_.size(); ++w)
    if ((ext_[w] & o.ext_[w]) != 0) return true;
  return false;
}

std::uint64_t Coalition::bits() const {
  if (n_ > 64) throw std::logic_error("Coalition::bits: n > 64");
  return bits_;
}

std::vector<int> Coalition::agents() const {
  std::vector<int> out;
  out.reserve(size());
  if (n_ <= 64) {
    for (int i = 0; i < n_; ++i)
      if ((bits_ >> i) & 1) out.push_back(i);
  } else {
    for (int i = 0; i < n_; ++i)
      if ((ext_[i / 64] >> (i % 64)) & 1) out.push_back(i);
  }
  return out;
}

std::string Coalition::key() const {
  std::string out;
  bool first = true;
  for (int a : agents()) {
    if (!first) out += ',';
    out += std::to_string(a);
    first = false;
  }
  return out;
}

bool Coalition::operator==(const Coalition& o) const {
  return n_ == o.n_ && bits_ == o.bits_ && ext_ == o.ext_;
}

bool coalition_canonical_less(const Coalition& a, const Coalition& b) {
  int sa = a.size(), sb = b.size();
  if (sa != sb) return sa < sb;
  if (!a.is_wide() && !b.is_wide()) return a.bits() < b.bits();
  // Wide masks compare as little-endian integers: most significant word first.
  const auto wa = a.agents(), wb = b.agents();
  return std::lexicographical_compare(wa.rbegin(), wa.rend(), wb.rbegin(), wb.rend());
}

std::size_t CoalitionHash::operator()(const Coalition& c) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(c.agent_count());
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  if (!c.is_wide()) {
    mix(c.bits());
  } else {
    for (int a : c.agents()) mix(static_cast<std::uint64_t>(a) + 1);
  }
  return static_cast<std::size_t>(h);
}

Permutation::Permutation(std::vector<int> map) : map_(std::move(map)) {
  const int n = static_cast<int>(map_.size());
  std::vector<char> seen(n, 0);
  for (int v : map_) {
    if (v < 0 || v >= n || seen[v])
      throw std::invalid_argument("Permutation: not a bijection on {0..n-1}");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = i;
  return Permutation(std::move(m));
}

Permutation Permutation::swap_two(int n, int a, int b) {
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = i;
  if (a < 0 || a >= n || b < 0 || b >= n)
    throw std::invalid_argument("Permutation::swap_two: agent out of range");
  std::swap(m[a], m[b]);
  return Permutation(std::move(m));
}

int Permutation::operator()(int agent) const {
  if (agent < 0 || agent >= size()) throw std::out_of_range("Permutation: agent out of range");
  return map_[agent];
}

Coalition Permutation::image(const Coalition& s) const {
  if (s.agent_count() != size())
    throw std::invalid_argument("Permutation: agent-count mismatch with coalition");
  std::vector<int> out;
  out.reserve(s.size());
  for (int a : s.agents()) out.push_back(map_[a]);
  return Coalition::from_agents(s.agent_count(), out);
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map_.size());
  for (int i = 0; i < size(); ++i) inv[map_[i]] = i;
  return Permutation(std::move(inv));
}

}  // namespace jshap

#include "jshap/indices.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <unordered_map>

#include "jshap/rng.hpp"

namespace jshap {

std::string index_kind_name(IndexKind kind) {
  switch (kind) {
    case IndexKind::joint_shapley: return "joint_shapley";
    case IndexKind::shapley: return "shapley";
    case IndexKind::shapley_interaction: return "shapley_interaction";
    case IndexKind::generalised_shapley: return "generalised_shapley";
    case IndexKind::added_value: return "added_value";
    case IndexKind::shapley_taylor: return "shapley_taylor";
  }
  return "?";
}

IndexKind index_kind_from_name(const std::string& name) {
  if (name == "joint" || name == "joint_shapley") return IndexKind::joint_shapley;
  if (name == "shapley") return IndexKind::shapley;
  if (name == "si" || name == "shapley_interaction") return IndexKind::shapley_interaction;
  if (name == "gs" || name == "generalised_shapley") return IndexKind::generalised_shapley;
  if (name == "av" || name == "added_value") return IndexKind::added_value;
  if (name == "st" || name == "shapley_taylor") return IndexKind::shapley_taylor;
  throw std::invalid_argument("unknown index '" + name +
                              "' (expected joint|st|si|gs|av|shapley)");
}

std::optional<std::size_t> IndexResult::find(const Coalition& t) const {
  auto it = std::lower_bound(coalitions.begin(), coalitions.end(), t,
                             coalition_canonical_less);
  if (it != coalitions.end() && *it == t)
    return static_cast<std::size_t>(it - coalitions.begin());
  return std::nullopt;
}

double IndexResult::at(const Coalition& t) const {
  auto idx = find(t);
  if (!idx) throw std::out_of_range("IndexResult: coalition '" + t.key() + "' not present");
  return values[*idx];
}

const Rational& IndexResult::at_exact(const Coalition& t) const {
  if (!rational_values) throw std::logic_error("IndexResult: no rational values stored");
  auto idx = find(t);
  if (!idx) throw std::out_of_range("IndexResult: coalition '" + t.key() + "' not present");
  return rationals[*idx];
}

namespace {

constexpr int kDenseMemoLimit = 20;

template <class V>
V value_from_rational(const Rational& r);
template <>
Rational value_from_rational<Rational>(const Rational& r) {
  return r;
}
template <>
double value_from_rational<double>(const Rational& r) {
  return r.to_double();
}

// Lazily filled worth table keyed by coalition bits. Filled single-threaded;
// shared across the index computations run on one game.
template <class V>
class WorthMemo {
 public:
  explicit WorthMemo(const Game& g) : g_(&g), n_(g.agents()) {
    if (n_ <= kDenseMemoLimit) {
      known_.assign(std::size_t{1} << n_, 0);
      dense_.resize(std::size_t{1} << n_);
    }
  }

  const V& operator()(std::uint64_t mask) {
    if (!known_.empty()) {
      if (!known_[mask]) {
        dense_[mask] = fetch(mask);
        known_[mask] = 1;
      }
      return dense_[mask];
    }
    auto it = map_.find(mask);
    if (it == map_.end()) it = map_.emplace(mask, fetch(mask)).first;
    return it->second;
  }

 private:
  V fetch(std::uint64_t mask) const {
    const Coalition c = Coalition::from_bits(n_, mask);
    if constexpr (std::is_same_v<V, Rational>) {
      return g_->eval_exact(c);
    } else {
      return g_->eval(c);
    }
  }

  const Game* g_;
  int n_;
  std::vector<char> known_;
  std::vector<V> dense_;
  std::unordered_map<std::uint64_t, V> map_;
};

template <class V>
IndexResult make_result(IndexKind kind, const Game& g, int k,
                        std::vector<std::pair<std::uint64_t, V>> entries) {
  IndexResult r;
  r.kind = kind;
  r.n = g.agents();
  r.k = k;
  r.sampled = false;
  r.rational_values = std::is_same_v<V, Rational>;
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    const int pa = std::popcount(a.first), pb = std::popcount(b.first);
    return pa != pb ? pa < pb : a.first < b.first;
  });
  r.coalitions.reserve(entries.size());
  r.values.reserve(entries.size());
  for (auto& [mask, v] : entries) {
    r.coalitions.push_back(Coalition::from_bits(r.n, mask));
    if constexpr (std::is_same_v<V, Rational>) {
      r.values.push_back(v.to_double());
      r.rationals.push_back(std::move(v));
    } else {
      r.values.push_back(v);
    }
  }
  return r;
}

void check_exact_guard(const Game& g, const char* op) {
  if (g.agents() > kExactAgentGuard)
    throw std::invalid_argument(std::string(op) + ": n=" + std::to_string(g.agents()) +
                                " exceeds the exact-path guard of " +
                                std::to_string(kExactAgentGuard) +
                                " agents; use the sampler instead");
}

void check_order(const Game& g, int k, const char* op) {
  if (k < 1 || k > g.agents())
    throw std::invalid_argument(std::string(op) + ": order k=" + std::to_string(k) +
                                " out of range 1 <= k <= n=" + std::to_string(g.agents()));
}

std::uint64_t full_mask(int n) {
  return (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}

template <class V>
std::vector<std::pair<std::uint64_t, V>> joint_shapley_entries(const Game& g, int k,
                                                               const CoefficientTable& table) {
  const int n = g.agents();
  WorthMemo<V> worth(g);
  std::vector<V> qv;
  qv.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) qv.push_back(value_from_rational<V>(table.q(r)));

  std::vector<std::pair<std::uint64_t, V>> out;
  for (int t = 1; t <= k; ++t) {
    for_each_mask_of_size(n, t, [&](std::uint64_t tmask) {
      const std::uint64_t comp = full_mask(n) & ~tmask;
      V acc = value_from_rational<V>(Rational(0));
      for_each_subset(comp, [&](std::uint64_t s) {
        acc += qv[static_cast<std::size_t>(std::popcount(s))] * (worth(s | tmask) - worth(s));
      });
      out.emplace_back(tmask, std::move(acc));
    });
  }
  return out;
}

template <class V>
std::vector<std::pair<std::uint64_t, V>> shapley_entries(const Game& g) {
  const int n = g.agents();
  WorthMemo<V> worth(g);
  std::vector<V> w;  // w[s] = s! (n-s-1)! / n!
  w.reserve(static_cast<std::size_t>(n));
  const BigInt nfact = BigInt::factorial(static_cast<unsigned long>(n));
  for (int s = 0; s < n; ++s) {
    const BigInt num = BigInt::factorial(static_cast<unsigned long>(s)) *
                       BigInt::factorial(static_cast<unsigned long>(n - s - 1));
    w.push_back(value_from_rational<V>(Rational(num, nfact)));
  }
  std::vector<std::pair<std::uint64_t, V>> out;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t imask = std::uint64_t{1} << i;
    const std::uint64_t comp = full_mask(n) & ~imask;
    V acc = value_from_rational<V>(Rational(0));
    for_each_subset(comp, [&](std::uint64_t s) {
      acc += w[static_cast<std::size_t>(std::popcount(s))] * (worth(s | imask) - worth(s));
    });
    out.emplace_back(imask, std::move(acc));
  }
  return out;
}

// Discrete derivative sum_{L subset T} (-1)^(t-l) v(S u L).
template <class V>
V discrete_derivative(WorthMemo<V>& worth, std::uint64_t smask, std::uint64_t tmask) {
  const int t = std::popcount(tmask);
  V acc = value_from_rational<V>(Rational(0));
  for_each_subset(tmask, [&](std::uint64_t l) {
    const V& v = worth(smask | l);
    if (((t - std::popcount(l)) & 1) != 0)
      acc -= v;
    else
      acc += v;
  });
  return acc;
}

template <class V>
std::vector<std::pair<std::uint64_t, V>> shapley_interaction_entries(const Game& g) {
  const int n = g.agents();
  WorthMemo<V> worth(g);
  BinomialTable binom;
  std::vector<std::pair<std::uint64_t, V>> out;
  for (int t = 1; t <= n; ++t) {
    // Weight on S: 1/(n-t+1) * C(n-t, s)^{-1}.
    std::vector<V> w;
    w.reserve(static_cast<std::size_t>(n - t) + 1);
    for (int s = 0; s <= n - t; ++s)
      w.push_back(value_from_rational<V>(
          Rational(BigInt(1), BigInt(n - t + 1) * binom.choose(n - t, s))));
    for_each_mask_of_size(n, t, [&](std::uint64_t tmask) {
      const std::uint64_t comp = full_mask(n) & ~tmask;
      V acc = value_from_rational<V>(Rational(0));
      for_each_subset(comp, [&](std::uint64_t s) {
        acc += w[static_cast<std::size_t>(std::popcount(s))] *
               discrete_derivative(worth, s, tmask);
      });
      out.emplace_back(tmask, std::move(acc));
    });
  }
  return out;
}

template <class V>
std::vector<std::pair<std::uint64_t, V>> generalised_shapley_entries(const Game& g) {
  const int n = g.agents();
  WorthMemo<V> worth(g);
  std::vector<std::pair<std::uint64_t, V>> out;
  for (int t = 1; t <= n; ++t) {
    // Weight on S: (n-s-t)! s! / (n-t+1)!.
    const BigInt denom = BigInt::factorial(static_cast<unsigned long>(n - t + 1));
    std::vector<V> w;
    w.reserve(static_cast<std::size_t>(n - t) + 1);
    for (int s = 0; s <= n - t; ++s) {
      const BigInt num = BigInt::factorial(static_cast<unsigned long>(n - s - t)) *
                         BigInt::factorial(static_cast<unsigned long>(s));
      w.push_back(value_from_rational<V>(Rational(num, denom)));
    }
    for_each_mask_of_size(n, t, [&](std::uint64_t tmask) {
      const std::uint64_t comp = full_mask(n) & ~tmask;
      V acc = value_from_rational<V>(Rational(0));
      for_each_subset(comp, [&](std::uint64_t s) {
        acc += w[static_cast<std::size_t>(std::popcount(s))] * (worth(s | tmask) - worth(s));
      });
      out.emplace_back(tmask, std::move(acc));
    });
  }
  return out;
}

template <class V>
std::vector<std::pair<std::uint64_t, V>> added_value_entries(const Game& g) {
  const int n = g.agents();
  WorthMemo<V> worth(g);
  BinomialTable binom;
  // The per-member inner term sums the member's subgame Shapley value over
  // every coalition containing it. Grouping by the member's predecessor set
  // C collapses that triple sum to one pass over C with weight
  //   alpha_c = sum_{s=c+1}^{n} C(n-1-c, s-1-c) c! (s-c-1)! / s!.
  std::vector<V> alpha;
  alpha.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    Rational a(0);
    for (int s = c + 1; s <= n; ++s) {
      const BigInt num = binom.choose(n - 1 - c, s - 1 - c) *
                         BigInt::factorial(static_cast<unsigned long>(c)) *
                         BigInt::factorial(static_cast<unsigned long>(s - c - 1));
      a += Rational(num, BigInt::factorial(static_cast<unsigned long>(s)));
    }
    alpha.push_back(value_from_rational<V>(a));
  }
  const V half_pow = value_from_rational<V>(
      Rational(BigInt(1), BigInt::pow2(static_cast<unsigned long>(n - 1))));

  std::vector<V> member_term;  // per agent i: sum_C alpha_|C| [v(C u i) - v(C)]
  member_term.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::uint64_t imask = std::uint64_t{1} << i;
    const std::uint64_t comp = full_mask(n) & ~imask;
    V acc = value_from_rational<V>(Rational(0));
    for_each_subset(comp, [&](std::uint64_t c) {
      acc += alpha[static_cast<std::size_t>(std::popcount(c))] *
             (worth(c | imask) - worth(c));
    });
    member_term.push_back(std::move(acc));
  }

  std::vector<std::pair<std::uint64_t, V>> out;
  for (int t = 1; t <= n; ++t) {
    for_each_mask_of_size(n, t, [&](std::uint64_t tmask) {
      V acc = worth(tmask);
      for (int i = 0; i < n; ++i)
        if ((tmask >> i) & 1) acc -= half_pow * member_term[static_cast<std::size_t>(i)];
      out.emplace_back(tmask, std::move(acc));
    });
  }
  return out;
}

template <class V>
std::vector<std::pair<std::uint64_t, V>> shapley_taylor_entries(const Game& g, int k,
                                                                BinomialTable& binom) {
  const int n = g.agents();
  WorthMemo<V> worth(g);
  std::vector<std::pair<std::uint64_t, V>> out;
  for (int t = 1; t < k; ++t) {
    for_each_mask_of_size(n, t, [&](std::uint64_t tmask) {
      out.emplace_back(tmask, discrete_derivative(worth, std::uint64_t{0}, tmask));
    });
  }
  {
    const int t = k;
    const V k_over_n = value_from_rational<V>(Rational(k, n));
    std::vector<V> w;  // C(n-1, s)^{-1}
    w.reserve(static_cast<std::size_t>(n - t) + 1);
    for (int s = 0; s <= n - t; ++s)
      w.push_back(value_from_rational<V>(Rational(BigInt(1), binom.choose(n - 1, s))));
    for_each_mask_of_size(n, t, [&](std::uint64_t tmask) {
      const std::uint64_t comp = full_mask(n) & ~tmask;
      V acc = value_from_rational<V>(Rational(0));
      for_each_subset(comp, [&](std::uint64_t s) {
        acc += w[static_cast<std::size_t>(std::popcount(s))] *
               discrete_derivative(worth, s, tmask);
      });
      out.emplace_back(tmask, k_over_n * acc);
    });
  }
  return out;
}

}  // namespace

IndexResult joint_shapley_exact(const Game& g, int k) {
  check_exact_guard(g, "joint_shapley_exact");
  check_order(g, k, "joint_shapley_exact");
  const CoefficientTable table = compute_q(g.agents(), k);
  if (g.kind() == GameKind::exact)
    return make_result(IndexKind::joint_shapley, g, k,
                       joint_shapley_entries<Rational>(g, k, table));
  return make_result(IndexKind::joint_shapley, g, k, joint_shapley_entries<double>(g, k, table));
}

IndexResult shapley(const Game& g) {
  check_exact_guard(g, "shapley");
  if (g.kind() == GameKind::exact)
    return make_result(IndexKind::shapley, g, 1, shapley_entries<Rational>(g));
  return make_result(IndexKind::shapley, g, 1, shapley_entries<double>(g));
}

IndexResult shapley_interaction(const Game& g) {
  check_exact_guard(g, "shapley_interaction");
  if (g.kind() == GameKind::exact)
    return make_result(IndexKind::shapley_interaction, g, g.agents(),
                       shapley_interaction_entries<Rational>(g));
  return make_result(IndexKind::shapley_interaction, g, g.agents(),
                     shapley_interaction_entries<double>(g));
}

IndexResult generalised_shapley(const Game& g) {
  check_exact_guard(g, "generalised_shapley");
  if (g.kind() == GameKind::exact)
    return make_result(IndexKind::generalised_shapley, g, g.agents(),
                       generalised_shapley_entries<Rational>(g));
  return make_result(IndexKind::generalised_shapley, g, g.agents(),
                     generalised_shapley_entries<double>(g));
}

IndexResult added_value(const Game& g) {
  check_exact_guard(g, "added_value");
  if (g.kind() == GameKind::exact)
    return make_result(IndexKind::added_value, g, g.agents(), added_value_entries<Rational>(g));
  return make_result(IndexKind::added_value, g, g.agents(), added_value_entries<double>(g));
}

IndexResult shapley_taylor(const Game& g, int k) {
  check_exact_guard(g, "shapley_taylor");
  check_order(g, k, "shapley_taylor");
  BinomialTable binom;
  if (g.kind() == GameKind::exact)
    return make_result(IndexKind::shapley_taylor, g, k,
                       shapley_taylor_entries<Rational>(g, k, binom));
  return make_result(IndexKind::shapley_taylor, g, k, shapley_taylor_entries<double>(g, k, binom));
}

namespace {

// Equality oracle: exact on rational games, 1e-9 tolerance on numeric ones.
class WorthComparer {
 public:
  explicit WorthComparer(const Game& g)
      : exact_(g.kind() == GameKind::exact),
        exact_memo_(exact_ ? std::make_unique<WorthMemo<Rational>>(g) : nullptr),
        num_memo_(exact_ ? nullptr : std::make_unique<WorthMemo<double>>(g)) {}

  bool equal(std::uint64_t a, std::uint64_t b) {
    if (exact_) return (*exact_memo_)(a) == (*exact_memo_)(b);
    return std::fabs((*num_memo_)(a) - (*num_memo_)(b)) <= 1e-9;
  }

 private:
  bool exact_;
  std::unique_ptr<WorthMemo<Rational>> exact_memo_;
  std::unique_ptr<WorthMemo<double>> num_memo_;
};

bool value_is_zero(const IndexResult& r, std::size_t i) {
  if (r.rational_values) return r.rationals[i].is_zero();
  return std::fabs(r.values[i]) <= 1e-9;
}

bool values_equal(const IndexResult& r, std::size_t i, std::size_t j) {
  if (r.rational_values) return r.rationals[i] == r.rationals[j];
  return std::fabs(r.values[i] - r.values[j]) <= 1e-9;
}

}  // namespace

AxiomReport check_axioms(const IndexResult& result, const Game& g, std::uint64_t seed,
                         int permutation_checks) {
  if (result.kind != IndexKind::joint_shapley)
    throw std::invalid_argument("check_axioms: result must be a joint Shapley value");
  if (result.sampled)
    throw std::invalid_argument("check_axioms: result must be exact-mode, not sampled");
  if (result.n != g.agents())
    throw std::invalid_argument("check_axioms: result and game disagree on n");
  const int n = g.agents();
  if (n > 12) throw std::invalid_argument("check_axioms: supported for n <= 12");

  AxiomReport rep;
  const std::uint64_t full = full_mask(n);

  // (a) joint efficiency.
  if (result.rational_values) {
    Rational sum(0);
    for (const auto& v : result.rationals) sum += v;
    const Rational residual = sum - g.eval_exact(Coalition::full(n));
    rep.efficiency_ok = residual.is_zero();
    rep.efficiency_residual = residual.str();
  } else {
    double sum = 0.0;
    for (double v : result.values) sum += v;
    const double residual = sum - g.eval(Coalition::full(n));
    rep.efficiency_ok = std::fabs(residual) <= 1e-9;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", residual);
    rep.efficiency_residual = buf;
  }

  WorthComparer cmp(g);

  // (b) detected null coalitions must have value 0.
  std::vector<char> is_null(result.size(), 0);
  for (std::size_t i = 0; i < result.size(); ++i) {
    const std::uint64_t tmask = result.coalitions[i].bits();
    bool null_coalition = true;
    for_each_subset(full & ~tmask, [&](std::uint64_t s) {
      if (null_coalition && !cmp.equal(s | tmask, s)) null_coalition = false;
    });
    if (null_coalition) {
      is_null[i] = 1;
      ++rep.nulls_found;
      if (!value_is_zero(result, i)) rep.null_violations.push_back(result.coalitions[i]);
    }
  }

  // (c) joint symmetry: equal values whenever the hypotheses hold.
  for (std::size_t i = 0; i < result.size(); ++i) {
    const std::uint64_t t1 = result.coalitions[i].bits();
    for (std::size_t j = i + 1; j < result.size(); ++j) {
      const std::uint64_t t2 = result.coalitions[j].bits();
      bool hyp = true;
      for_each_subset(full & ~(t1 | t2), [&](std::uint64_t s) {
        if (hyp && !cmp.equal(s | t1, s | t2)) hyp = false;
      });
      if (hyp) {
        for_each_subset(full & ~t1, [&](std::uint64_t s) {
          if (hyp && (s & t2) != 0 && !cmp.equal(s | t1, s)) hyp = false;
        });
      }
      if (hyp) {
        for_each_subset(full & ~t2, [&](std::uint64_t s) {
          if (hyp && (s & t1) != 0 && !cmp.equal(s | t2, s)) hyp = false;
        });
      }
      if (hyp) {
        ++rep.symmetric_pairs_found;
        if (!values_equal(result, i, j))
          rep.symmetry_violations.emplace_back(result.coalitions[i], result.coalitions[j]);
      }
    }
  }

  // (d) anonymity spot check under seeded random permutations.
  Xoshiro256ss rng(seed ^ 0xA11A11A11A11A11AULL);
  for (int p = 0; p < permutation_checks; ++p) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    const Permutation sigma(perm);
    const IndexResult permuted = joint_shapley_exact(permute_game(g, sigma), result.k);
    ++rep.anonymity_checks;
    for (std::size_t i = 0; i < result.size(); ++i) {
      const Coalition image = sigma.image(result.coalitions[i]);
      const auto idx = permuted.find(image);
      bool ok;
      if (!idx) {
        ok = false;
      } else if (result.rational_values && permuted.rational_values) {
        ok = result.rationals[i] == permuted.rationals[*idx];
      } else {
        ok = std::fabs(result.values[i] - permuted.values[*idx]) <= 1e-9;
      }
      if (!ok) {
        ++rep.anonymity_violations;
        break;
      }
    }
  }
  return rep;
}

}  // namespace jshap

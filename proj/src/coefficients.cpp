#include "jshap/coefficients.hpp"

#include <stdexcept>
#include <string>

namespace jshap {

BinomialTable::BinomialTable(int col_cap) : col_cap_(col_cap) {}

BigInt BinomialTable::choose(int m, int j) {
  if (m < 0) throw std::invalid_argument("BinomialTable: negative row");
  if (j < 0 || j > m) return BigInt(0);
  j = std::min(j, m - j);
  if (col_cap_ >= 0 && j > col_cap_)
    throw std::logic_error("BinomialTable: column " + std::to_string(j) +
                           " beyond cap " + std::to_string(col_cap_));
  while (static_cast<int>(rows_.size()) <= m) {
    const int r = static_cast<int>(rows_.size());
    const int width = (col_cap_ >= 0 ? std::min(r, col_cap_) : r) + 1;
    std::vector<BigInt> next(static_cast<std::size_t>(width), BigInt(1));
    if (r > 0) {
      const auto& prev = rows_.back();
      for (int c = 1; c < width; ++c) {
        next[static_cast<std::size_t>(c)] = prev[static_cast<std::size_t>(c - 1)];
        if (c < static_cast<int>(prev.size()))  // C(r-1, r) is 0, not stored
          next[static_cast<std::size_t>(c)] += prev[static_cast<std::size_t>(c)];
      }
    }
    rows_.push_back(std::move(next));
  }
  return rows_[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)];
}

std::vector<BigInt> BinomialTable::full_row(int m) {
  if (m < 0) throw std::invalid_argument("BinomialTable: negative row");
  std::vector<BigInt> row{BigInt(1)};
  row.reserve(static_cast<std::size_t>(m) + 1);
  for (int r = 1; r <= m; ++r) {
    row.push_back(BigInt(1));
    for (int j = r - 1; j >= 1; --j) row[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j - 1)];
  }
  return row;
}

CoefficientTable::CoefficientTable(int n, int k, std::vector<Rational> q)
    : n_(n), k_(k), q_(std::move(q)) {
  if (n < 1) throw std::invalid_argument("CoefficientTable: n must be >= 1");
  if (k < 1 || k > n)
    throw std::invalid_argument("CoefficientTable: k must satisfy 1 <= k <= n (n=" +
                                std::to_string(n) + ", k=" + std::to_string(k) + ")");
  if (static_cast<int>(q_.size()) != n)
    throw std::invalid_argument("CoefficientTable: expected n coefficients");
}

const Rational& CoefficientTable::q(int r) const {
  if (r < 0 || r >= n_) throw std::out_of_range("CoefficientTable::q: index out of range");
  return q_[static_cast<std::size_t>(r)];
}

CoefficientTable compute_q(int n, int k, ComputeStats* stats) {
  if (n < 1) throw std::invalid_argument("compute_q: n must be >= 1");
  if (k < 1 || k > n)
    throw std::invalid_argument("compute_q: k out of range 1 <= k <= n (n=" +
                                std::to_string(n) + ", k=" + std::to_string(k) + ")");
  std::uint64_t ops = 0;
  BinomialTable binom(k);
  std::vector<Rational> q;
  q.reserve(static_cast<std::size_t>(n));

  BigInt denom0(0);
  for (int i = 1; i <= k; ++i) {
    denom0 += binom.choose(n, i);
    ++ops;
  }
  q.emplace_back(BigInt(1), denom0);
  ++ops;

  for (int r = 1; r < n; ++r) {
    Rational numer(0);
    for (int s = std::max(0, r - k); s <= r - 1; ++s) {
      numer += Rational(binom.choose(r, s), BigInt(1)) * q[static_cast<std::size_t>(s)];
      ops += 2;
    }
    BigInt denom(0);
    const int hi = std::min(k, n - r);
    for (int s = 1; s <= hi; ++s) {
      denom += binom.choose(n - r, s);
      ++ops;
    }
    q.push_back(numer / Rational(denom, BigInt(1)));
    ++ops;
  }
  if (stats) stats->arithmetic_ops = ops;
  return CoefficientTable(n, k, std::move(q));
}

CoefficientTable closed_form_q(int n) {
  if (n < 1) throw std::invalid_argument("closed_form_q: n must be >= 1");
  BinomialTable binom;
  std::vector<Rational> q;
  q.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    Rational sum(0);
    BigInt pow_m2(1);  // (-2)^(r-j) built from j = r downward
    std::vector<Rational> terms(static_cast<std::size_t>(r) + 1, Rational(0));
    for (int j = r; j >= 0; --j) {
      const BigInt den = BigInt::pow2(static_cast<unsigned long>(n - j)) - BigInt(1);
      terms[static_cast<std::size_t>(j)] =
          Rational(binom.choose(r, j) * pow_m2, den);
      pow_m2 *= BigInt(-2);
    }
    for (const auto& t : terms) sum += t;
    q.push_back(std::move(sum));
  }
  return CoefficientTable(n, n, std::move(q));
}

CoefficientIdentityReport verify_coefficient_identities(const CoefficientTable& table) {
  CoefficientIdentityReport rep;
  const int n = table.n();
  const int k = table.k();
  BinomialTable binom(k);

  for (int r = 0; r < n; ++r)
    if (table.q(r).sign() < 0) rep.nonnegative_ok = false;

  // Recursion residuals, including the r = 0 base case.
  {
    BigInt denom0(0);
    for (int i = 1; i <= k; ++i) denom0 += binom.choose(n, i);
    if (table.q(0) * Rational(denom0, BigInt(1)) != Rational(1)) {
      rep.recursion_ok = false;
      rep.recursion_violations.push_back(0);
    }
  }
  for (int r = 1; r < n; ++r) {
    Rational numer(0);
    for (int s = std::max(0, r - k); s <= r - 1; ++s)
      numer += Rational(binom.choose(r, s), BigInt(1)) * table.q(s);
    BigInt denom(0);
    for (int s = 1; s <= std::min(k, n - r); ++s) denom += binom.choose(n - r, s);
    if (table.q(r) * Rational(denom, BigInt(1)) != numer) {
      rep.recursion_ok = false;
      rep.recursion_violations.push_back(r);
    }
  }

  {
    Rational sum(0);
    for (int s = n - k; s <= n - 1; ++s)
      sum += Rational(binom.choose(n, s), BigInt(1)) * table.q(s);
    rep.normalization_ok = (sum == Rational(1));
  }

  // Per-coalition balance: for every non-empty S the signed sum of the
  // coalition weights must be 1 at S = N and 0 otherwise. The expression
  // depends on S only through its cardinality, so each cardinality is
  // checked once and stands for all coalitions of that size.
  if (n <= 10) {
    rep.balance_checked = true;
    for (int s = 1; s <= n; ++s) {
      Rational lhs(0);
      for (int t = 1; t <= std::min(k, s); ++t)
        lhs += Rational(binom.choose(s, t), BigInt(1)) * table.q(s - t);
      for (int t = 1; t <= std::min(k, n - s); ++t)
        lhs -= Rational(binom.choose(n - s, t), BigInt(1)) * table.q(s);
      const Rational want(s == n ? 1 : 0);
      if (lhs != want) {
        rep.balance_ok = false;
        rep.balance_violations.push_back(s);
      }
    }
  }
  return rep;
}

ArrivalSizeDistribution arrival_size_distribution(const CoefficientTable& table, int t) {
  const int n = table.n();
  const int k = table.k();
  if (t < 1 || t > k)
    throw std::invalid_argument(
        "arrival_size_distribution: need 1 <= t <= k; coalitions larger than the order of "
        "explanation have no sampling law (t=" +
        std::to_string(t) + ", k=" + std::to_string(k) + ")");
  ArrivalSizeDistribution d;
  d.n = n;
  d.k = k;
  d.t = t;
  const int m = n - t;
  const std::vector<BigInt> row = BinomialTable::full_row(m);
  std::vector<Rational> weights;
  weights.reserve(static_cast<std::size_t>(m) + 1);
  Rational total(0);
  for (int i = 0; i <= m; ++i) {
    Rational w = Rational(row[static_cast<std::size_t>(i)], BigInt(1)) * table.q(i);
    total += w;
    weights.push_back(std::move(w));
  }
  d.scale_exact = total;
  d.scale = total.to_double();
  d.probs_exact.reserve(weights.size());
  d.probs.reserve(weights.size());
  d.cumulative.reserve(weights.size());
  double cum = 0.0;
  for (auto& w : weights) {
    Rational p = w / total;
    const double pd = p.to_double();
    d.probs_exact.push_back(std::move(p));
    d.probs.push_back(pd);
    cum += pd;
    d.cumulative.push_back(cum);
  }
  if (!d.cumulative.empty()) d.cumulative.back() = 1.0;
  return d;
}

}  // namespace jshap

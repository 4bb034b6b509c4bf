// The arrival-weight coefficients (q_0..q_{n-1}) for a given order of
// explanation k, the closed form at k = n, identity verification, and the
// arrival-size distribution that drives the sampler.

#pragma once

#include <cstdint>
#include <vector>

#include "jshap/rational.hpp"

namespace jshap {

// Binomial coefficients by the Pascal recurrence in big integers; rows are
// memoized on demand. A column cap bounds stored rows to C(m, 0..cap) —
// lookups use the symmetry C(m, j) = C(m, m-j), so a cap of k serves every
// query the coefficient recursion makes while keeping memory linear in n.
class BinomialTable {
 public:
  explicit BinomialTable(int col_cap = -1);  // -1: uncapped

  BigInt choose(int m, int j);

  // One full row C(m, 0..m), evolved in place without caching intermediates.
  static std::vector<BigInt> full_row(int m);

 private:
  int col_cap_;
  std::vector<std::vector<BigInt>> rows_;
};

struct ComputeStats {
  std::uint64_t arithmetic_ops = 0;  // exact-arithmetic operations performed
};

class CoefficientTable {
 public:
  // Builds directly from values; validation of the defining identities is
  // the job of verify_coefficient_identities, so perturbed tables can be
  // constructed for testing.
  CoefficientTable(int n, int k, std::vector<Rational> q);

  int n() const { return n_; }
  int k() const { return k_; }
  const Rational& q(int r) const;
  const std::vector<Rational>& all() const { return q_; }

 private:
  int n_;
  int k_;
  std::vector<Rational> q_;
};

// Solves the defining recursion exactly:
//   q_0 = 1 / sum_{i=1..k} C(n,i)
//   q_r = sum_{s=(r-k) v 0}^{r-1} C(r,s) q_s / sum_{s=1}^{k ^ (n-r)} C(n-r,s)
CoefficientTable compute_q(int n, int k, ComputeStats* stats = nullptr);

// k = n closed form: q_r = sum_{j=0..r} C(r,j) (-2)^(r-j) / (2^(n-j) - 1).
CoefficientTable closed_form_q(int n);

struct CoefficientIdentityReport {
  bool nonnegative_ok = true;
  bool recursion_ok = true;               // recursion residual zero at every r
  std::vector<int> recursion_violations;  // offending r values
  bool normalization_ok = true;           // sum_{s=n-k}^{n-1} C(n,s) q_s = 1
  bool balance_checked = false;           // per-coalition balance, run for n <= 10
  bool balance_ok = true;
  std::vector<int> balance_violations;    // offending |S| values
  bool all_ok() const {
    return nonnegative_ok && recursion_ok && normalization_ok &&
           (!balance_checked || balance_ok);
  }
};

// Violations are reported, never thrown.
CoefficientIdentityReport verify_coefficient_identities(const CoefficientTable& table);

struct ArrivalSizeDistribution {
  int n = 0;
  int k = 0;
  int t = 0;                           // size of the arriving coalition
  std::vector<Rational> probs_exact;   // P(X = i), i = 0..n-t
  std::vector<double> probs;           // float rendering of probs_exact
  std::vector<double> cumulative;      // inclusive prefix sums for sampling
  Rational scale_exact;                // sum_j C(n-t, j) q_j
  double scale = 0.0;
};

// P(X = i) proportional to C(n-t, i) q_i, normalized in exact arithmetic and
// converted to float at the end. Requires 1 <= t <= k.
ArrivalSizeDistribution arrival_size_distribution(const CoefficientTable& table, int t);

}  // namespace jshap

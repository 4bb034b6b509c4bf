// Exact computation of the joint Shapley value and the comparison indices
// over explicit games, plus the axiom checker.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jshap/coalition.hpp"
#include "jshap/coefficients.hpp"
#include "jshap/game.hpp"

namespace jshap {

enum class IndexKind {
  joint_shapley,
  shapley,
  shapley_interaction,
  generalised_shapley,
  added_value,
  shapley_taylor,
};

std::string index_kind_name(IndexKind kind);
IndexKind index_kind_from_name(const std::string& name);  // also accepts CLI aliases

struct IndexResult {
  IndexKind kind = IndexKind::joint_shapley;
  int n = 0;
  int k = 0;
  bool sampled = false;          // mode: exact (full evaluation) vs sampled
  bool rational_values = false;  // exact games carry rationals alongside doubles
  std::uint64_t seed = 0;        // meta, set when sampled
  std::uint64_t iterations = 0;  // meta, set when sampled

  // Parallel arrays in canonical coalition order (cardinality, then mask).
  std::vector<Coalition> coalitions;
  std::vector<double> values;
  std::vector<Rational> rationals;  // same length as values when rational_values

  std::size_t size() const { return coalitions.size(); }
  std::optional<std::size_t> find(const Coalition& t) const;
  double at(const Coalition& t) const;
  const Rational& at_exact(const Coalition& t) const;
};

// Exact paths enumerate subsets of each target's complement; the term count
// is sum_{|T|<=k} C(n,|T|) 2^(n-|T|), i.e. 3^n at k = n. Guarded at n <= 25;
// beyond that the sampler is the supported route.
inline constexpr int kExactAgentGuard = 25;

IndexResult joint_shapley_exact(const Game& g, int k);
IndexResult shapley(const Game& g);
IndexResult shapley_interaction(const Game& g);
IndexResult generalised_shapley(const Game& g);
IndexResult added_value(const Game& g);
IndexResult shapley_taylor(const Game& g, int k);

struct AxiomReport {
  bool efficiency_ok = false;
  std::string efficiency_residual;  // exact rational or decimal, per game kind

  int nulls_found = 0;
  std::vector<Coalition> null_violations;

  int symmetric_pairs_found = 0;
  std::vector<std::pair<Coalition, Coalition>> symmetry_violations;

  int anonymity_checks = 0;
  int anonymity_violations = 0;

  bool all_ok() const {
    return efficiency_ok && null_violations.empty() && symmetry_violations.empty() &&
           anonymity_violations == 0;
  }
};

// Verifies the defining axioms on a computed joint Shapley result:
// (a) the values up to order k sum to v(N);
// (b) coalitions detected null by enumeration have value 0;
// (c) coalition pairs satisfying the joint-symmetry hypotheses have equal
//     values;
// (d) spot-checks anonymity under seeded random permutations.
// Detection uses exact equality on rational games and tolerance 1e-9 on
// numeric games. Requires an exact-mode joint Shapley result.
AxiomReport check_axioms(const IndexResult& result, const Game& g, std::uint64_t seed = 7,
                         int permutation_checks = 5);

}  // namespace jshap

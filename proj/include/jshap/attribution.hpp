// ML attribution via the prediction-difference value function: local joint
// Shapley values per instance, mean-absolute and presence-adjusted global
// aggregation, the exact full-binary-cube engine, and the additive
// decomposition test.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "jshap/coalition.hpp"
#include "jshap/indices.hpp"
#include "jshap/model.hpp"
#include "jshap/sampler.hpp"

namespace jshap {

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;

  int n_features() const { return static_cast<int>(feature_names.size()); }
  bool is_binary() const;
  void validate() const;  // rectangular, at least one feature
};

// CSV with a header row of feature names.
Dataset load_dataset_csv(const std::string& path);

using Instance = std::vector<double>;

// Componentwise splice: feature i comes from x when i is in S, else from z.
Instance tau(const Instance& x, const Instance& z, const Coalition& s);
std::vector<Rational> tau_exact(const std::vector<Rational>& x, const std::vector<Rational>& z,
                                const Coalition& s);

// The game v_x(S) = mean_z [f(tau(x,z,S)) - f(z)].
//   exact_over_dataset: averages over every dataset row as the baseline z.
//   sampled_baselines: redraws one z per sampler iteration (shared by the
//   two evaluations of that iteration, so the f(z) term differences out).
class ValueFunction final : public WorthSource {
 public:
  enum class Mode { exact_over_dataset, sampled_baselines };

  ValueFunction(ModelPtr model, std::shared_ptr<const Dataset> data, Instance x, Mode mode);

  int agents() const override { return static_cast<int>(x_.size()); }
  std::unique_ptr<WorthSource> clone() const override;
  void begin_iteration(Xoshiro256ss& rng) override;
  double eval(const Coalition& s) override { return value(s); }
  bool parallel_safe() const override { return model_->parallel_safe(); }

  double value(const Coalition& s) const;  // v_x(S); exactly 0 at S = empty
  double mean_prediction() const;          // mean_z f(z) (exact_over_dataset mode)
  Mode mode() const { return mode_; }

 private:
  ModelPtr model_;
  std::shared_ptr<const Dataset> data_;
  Instance x_;
  Mode mode_;
  double mean_f_ = 0.0;  // exact_over_dataset
  Instance z_;           // sampled_baselines: current baseline
  double fz_ = 0.0;
};

std::unique_ptr<ValueFunction> build_value_function(ModelPtr model,
                                                    std::shared_ptr<const Dataset> data,
                                                    Instance x, ValueFunction::Mode mode);

// Deterministic numeric Game backed by an exact-over-dataset value function.
Game value_function_game(ModelPtr model, std::shared_ptr<const Dataset> data, Instance x);

// Local joint Shapley value of every coalition (or the given targets) at x.
// Exact mode runs the closed-form path over the value function; sampled mode
// runs the Monte-Carlo estimator (targets required when n > 25).
IndexResult local_joint_shapley(ModelPtr model, std::shared_ptr<const Dataset> data,
                                const Instance& x, int k, bool sampled,
                                const SamplerConfig& cfg,
                                const std::vector<Coalition>& targets = {});

struct GlobalReport {
  int n = 0;
  int k = 0;
  bool exact = false;  // rational-backed (full-cube path)
  std::vector<std::string> feature_names;
  std::vector<Coalition> coalitions;
  std::vector<double> mean_abs;
  std::vector<double> presence_adjusted;
  std::vector<Rational> mean_abs_rat;
  std::vector<Rational> presence_adjusted_rat;
  std::vector<std::uint64_t> presence_counts;

  // Coalition rendered as sorted feature names, e.g. "x1,x2".
  std::string coalition_names(std::size_t i) const;
};

// Per-coalition mean of |phi| over instances; locals must agree on (n, k).
GlobalReport global_mean_abs(const std::vector<IndexResult>& locals,
                             std::vector<std::string> feature_names = {});

// Presence-adjusted global over a strictly binary dataset: each local value
// is signed +1 when every feature of T is present in x and -1 otherwise,
// then averaged over the dataset. Locals are computed exactly over the
// dataset by default; pass a sampler config (and, for large n, explicit
// targets) to estimate them instead.
GlobalReport presence_adjusted_global(const ModelPtr& model,
                                      std::shared_ptr<const Dataset> data, int k,
                                      const SamplerConfig* sampled_cfg = nullptr,
                                      const std::vector<Coalition>& targets = {});

// Exact rational presence-adjusted globals with the feature space replaced
// by the full uniform cube {0,1}^n (requires an exact-capable model).
// The full report enumerates all T with |T| <= k (n <= 8); the single-target
// variant goes up to n <= 12.
GlobalReport presence_adjusted_cube_exact(const ModelPtr& model,
                                          std::vector<std::string> feature_names, int k);
Rational presence_adjusted_cube_exact_single(const ModelPtr& model, int n, int k,
                                             const Coalition& target);

struct DecompositionReport {
  int feature = 0;
  int n = 0;
  int k = 0;
  Rational predicted;   // half the mean feature effect times sum_s C(n-1,s) q_s
  Rational measured;    // presence-adjusted global of the feature singleton
  Rational residual;    // worst deviation of per-baseline predictions from measured
  bool delta_constant = false;
  bool accept = false;  // residual exactly zero
};

// Tests f = g(x_feature) + h(rest) over the uniform cube: the feature effect
// f(. ,1,.) - f(. ,0,.) must be constant across baselines, in which case the
// measured presence-adjusted global equals the predicted closed form.
DecompositionReport additive_decomposition_check(const ModelPtr& model, int n, int feature,
                                                 int k);

}  // namespace jshap

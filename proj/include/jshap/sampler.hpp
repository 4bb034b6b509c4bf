// Monte-Carlo estimation of joint Shapley values for large n, the arrival
// process simulator, and its exhaustive-expectation exact counterpart (an
// independent oracle for the closed-form values).

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "jshap/coalition.hpp"
#include "jshap/game.hpp"
#include "jshap/indices.hpp"
#include "jshap/rng.hpp"

namespace jshap {

struct SamplerConfig {
  std::uint64_t iterations = 10000;
  std::uint64_t seed = 0;
  std::uint64_t batch = 0;  // iterations per checkpoint; 0 = final checkpoint only
  int threads = 1;
};

// Numeric worth oracle the sampler draws from. Stochastic sources (e.g.
// model prediction differences with per-iteration baselines) redraw their
// context in begin_iteration; deterministic games ignore it. Each sampling
// target works on its own clone, so per-target streams stay independent.
class WorthSource {
 public:
  virtual ~WorthSource() = default;
  virtual int agents() const = 0;
  virtual std::unique_ptr<WorthSource> clone() const = 0;
  virtual void begin_iteration(Xoshiro256ss&) {}
  virtual double eval(const Coalition& s) = 0;
  virtual bool parallel_safe() const { return true; }
};

class GameWorthSource final : public WorthSource {
 public:
  explicit GameWorthSource(Game g) : game_(std::move(g)) {}
  int agents() const override { return game_.agents(); }
  std::unique_ptr<WorthSource> clone() const override {
    return std::make_unique<GameWorthSource>(game_);
  }
  double eval(const Coalition& s) override { return game_.eval(s); }

 private:
  Game game_;
};

// Estimates phi_T for each target T (1 <= |T| <= k): draws the pre-arrival
// size X from the arrival-size law, a uniform size-X subset S of the
// complement, and averages v(T u S) - v(S), scaled by sum_j C(n-t,j) q_j.
// Deterministic given (seed, targets); targets are embarrassingly parallel.
IndexResult sample_joint_shapley(const WorthSource& source, int k,
                                 const std::vector<Coalition>& targets,
                                 const SamplerConfig& cfg);

struct ArrivalSimResult {
  IndexResult values;                       // all non-empty T with |T| <= k
  std::vector<Coalition> tracked;           // echo of the track argument
  std::vector<std::uint64_t> union_visits;  // iterations whose union hit the tracked set
  std::uint64_t iterations = 0;
};

// Simulates full arrival sequences: the next set to arrive is uniform on the
// non-empty subsets of size <= k of the agents yet to arrive; each arriving
// coalition is credited its marginal worth (zero if it never arrives as a
// block). Requires n <= 20 — it estimates every coalition simultaneously.
ArrivalSimResult arrival_process_simulate(const Game& g, int k, const SamplerConfig& cfg,
                                          const std::vector<Coalition>& track = {});

// Exhaustive expectation of the same arrival process with exact
// probabilities — no sampling. Requires an exact game and n <= 12. This is
// the independent oracle the closed-form values are checked against.
IndexResult arrival_expectation_exact(const Game& g, int k);

struct ConvergenceTrace {
  struct Point {
    std::uint64_t iteration = 0;
    std::vector<double> estimates;  // one per target
    double l2 = 0.0;
  };
  std::vector<Coalition> targets;
  bool against_reference = false;
  std::vector<Point> points;
};

// Records estimates every cfg.batch iterations. With a reference result the
// l2 column is the distance to it; otherwise the distance between
// consecutive checkpoints (the first checkpoint compares against zero).
ConvergenceTrace convergence_trace(const WorthSource& source, int k,
                                   const std::vector<Coalition>& targets,
                                   const SamplerConfig& cfg,
                                   const IndexResult* reference = nullptr);

}  // namespace jshap

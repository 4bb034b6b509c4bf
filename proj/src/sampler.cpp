#include "jshap/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <thread>

#include "jshap/coefficients.hpp"

namespace jshap {

namespace {

void validate_cfg(const SamplerConfig& cfg) {
  if (cfg.iterations < 1) throw std::invalid_argument("sampler: iterations must be >= 1");
}

Xoshiro256ss stream_for_target(const SamplerConfig& cfg, int n, int k, const Coalition& t) {
  std::vector<std::uint64_t> key;
  key.push_back((static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(k));
  if (!t.is_wide()) {
    key.push_back(t.bits());
  } else {
    for (int a : t.agents()) key.push_back(static_cast<std::uint64_t>(a) + 1);
  }
  return Xoshiro256ss::for_stream(cfg.seed, key);
}

int draw_size(const std::vector<double>& cumulative, Xoshiro256ss& rng) {
  const double u = rng.unit();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                   static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
}

// First `x` entries of a partial Fisher-Yates shuffle of `work`.
void draw_prefix(std::vector<int>& work, int x, Xoshiro256ss& rng) {
  const int m = static_cast<int>(work.size());
  for (int i = 0; i < x; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - i)));
    std::swap(work[static_cast<std::size_t>(i)], work[static_cast<std::size_t>(j)]);
  }
}

struct TargetPlan {
  Coalition target;
  std::vector<int> complement_agents;
  const ArrivalSizeDistribution* dist = nullptr;
};

// Runs one target's sampling loop; reports the running mean at every
// checkpoint via `on_checkpoint(iteration, scaled_estimate)`.
template <class CheckpointFn>
double run_target(WorthSource& source, const TargetPlan& plan, const SamplerConfig& cfg,
                  Xoshiro256ss rng, CheckpointFn&& on_checkpoint) {
  const std::uint64_t batch = cfg.batch == 0 ? cfg.iterations : cfg.batch;
  double acc = 0.0;
  std::vector<int> work = plan.complement_agents;
  const int n = plan.target.agent_count();
  for (std::uint64_t it = 1; it <= cfg.iterations; ++it) {
    source.begin_iteration(rng);
    const int x = draw_size(plan.dist->cumulative, rng);
    work = plan.complement_agents;
    draw_prefix(work, x, rng);
    Coalition s = Coalition::from_agents(
        n, std::vector<int>(work.begin(), work.begin() + x));
    acc += source.eval(s.unite(plan.target)) - source.eval(s);
    if (it % batch == 0 || it == cfg.iterations) {
      on_checkpoint(it, plan.dist->scale * (acc / static_cast<double>(it)));
      if (it == cfg.iterations) break;
    }
  }
  return plan.dist->scale * (acc / static_cast<double>(cfg.iterations));
}

struct SamplePlanSet {
  std::vector<TargetPlan> plans;
  std::map<int, ArrivalSizeDistribution> dists;  // by coalition size
};

SamplePlanSet build_plans(const WorthSource& source, int k,
                          const std::vector<Coalition>& targets) {
  const int n = source.agents();
  if (k < 1 || k > n) throw std::invalid_argument("sampler: order k out of range");
  if (targets.empty()) throw std::invalid_argument("sampler: no targets given");
  SamplePlanSet set;
  const CoefficientTable table = compute_q(n, k);
  for (const auto& t : targets) {
    if (t.agent_count() != n)
      throw std::invalid_argument("sampler: target over wrong agent count");
    const int ts = t.size();
    if (ts < 1 || ts > k)
      throw std::invalid_argument("sampler: target '" + t.key() +
                                  "' must satisfy 1 <= |T| <= k=" + std::to_string(k));
    if (!set.dists.count(ts)) set.dists.emplace(ts, arrival_size_distribution(table, ts));
  }
  set.plans.reserve(targets.size());
  for (const auto& t : targets) {
    TargetPlan plan;
    plan.target = t;
    plan.complement_agents = t.complement().agents();
    plan.dist = &set.dists.at(t.size());
    set.plans.push_back(std::move(plan));
  }
  return set;
}

// Runs every target, possibly across threads; per-target work is fully
// independent, and results land in target order regardless of schedule.
void run_all_targets(const WorthSource& source, const SamplePlanSet& set,
                     const SamplerConfig& cfg,
                     const std::function<void(std::size_t, WorthSource&, const TargetPlan&,
                                              Xoshiro256ss)>& job) {
  const int n = source.agents();
  const int k = set.plans.empty() ? 1 : set.dists.begin()->second.k;
  std::vector<Xoshiro256ss> streams;
  streams.reserve(set.plans.size());
  for (const auto& plan : set.plans)
    streams.push_back(stream_for_target(cfg, n, k, plan.target));

  const int threads =
      source.parallel_safe() ? std::max(1, cfg.threads) : 1;
  if (threads <= 1 || set.plans.size() <= 1) {
    auto src = source.clone();
    for (std::size_t i = 0; i < set.plans.size(); ++i) job(i, *src, set.plans[i], streams[i]);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), set.plans.size());
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      auto src = source.clone();
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= set.plans.size()) break;
        job(i, *src, set.plans[i], streams[i]);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

IndexResult sample_joint_shapley(const WorthSource& source, int k,
                                 const std::vector<Coalition>& targets,
                                 const SamplerConfig& cfg) {
  validate_cfg(cfg);
  const SamplePlanSet set = build_plans(source, k, targets);
  std::vector<double> estimates(targets.size(), 0.0);
  run_all_targets(source, set, cfg,
                  [&](std::size_t i, WorthSource& src, const TargetPlan& plan,
                      Xoshiro256ss rng) {
                    estimates[i] =
                        run_target(src, plan, cfg, rng, [](std::uint64_t, double) {});
                  });

  IndexResult r;
  r.kind = IndexKind::joint_shapley;
  r.n = source.agents();
  r.k = k;
  r.sampled = true;
  r.rational_values = false;
  r.seed = cfg.seed;
  r.iterations = cfg.iterations;
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coalition_canonical_less(targets[a], targets[b]);
  });
  for (std::size_t i : order) {
    r.coalitions.push_back(targets[i]);
    r.values.push_back(estimates[i]);
  }
  return r;
}

ConvergenceTrace convergence_trace(const WorthSource& source, int k,
                                   const std::vector<Coalition>& targets,
                                   const SamplerConfig& cfg, const IndexResult* reference) {
  validate_cfg(cfg);
  if (cfg.batch == 0)
    throw std::invalid_argument("convergence_trace: batch (iterations per checkpoint) must be >= 1");
  const SamplePlanSet set = build_plans(source, k, targets);

  std::vector<std::uint64_t> ticks;
  for (std::uint64_t it = cfg.batch; it < cfg.iterations; it += cfg.batch) ticks.push_back(it);
  ticks.push_back(cfg.iterations);

  // estimates_at[tick][target]
  std::vector<std::vector<double>> estimates_at(ticks.size(),
                                                std::vector<double>(targets.size(), 0.0));
  run_all_targets(
      source, set, cfg,
      [&](std::size_t i, WorthSource& src, const TargetPlan& plan, Xoshiro256ss rng) {
        std::size_t tick = 0;
        run_target(src, plan, cfg, rng, [&](std::uint64_t it, double est) {
          while (tick < ticks.size() && ticks[tick] <= it) estimates_at[tick++][i] = est;
        });
      });

  ConvergenceTrace trace;
  trace.targets = targets;
  trace.against_reference = reference != nullptr;
  std::vector<double> ref(targets.size(), 0.0);
  if (reference)
    for (std::size_t i = 0; i < targets.size(); ++i) ref[i] = reference->at(targets[i]);

  std::vector<double> prev(targets.size(), 0.0);
  for (std::size_t tk = 0; tk < ticks.size(); ++tk) {
    ConvergenceTrace::Point p;
    p.iteration = ticks[tk];
    p.estimates = estimates_at[tk];
    double sq = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      const double d = p.estimates[i] - (reference ? ref[i] : prev[i]);
      sq += d * d;
    }
    p.l2 = std::sqrt(sq);
    prev = p.estimates;
    trace.points.push_back(std::move(p));
  }
  return trace;
}

ArrivalSimResult arrival_process_simulate(const Game& g, int k, const SamplerConfig& cfg,
                                          const std::vector<Coalition>& track) {
  validate_cfg(cfg);
  const int n = g.agents();
  if (n > 20)
    throw std::invalid_argument("arrival_process_simulate: n <= 20 (estimates all coalitions)");
  if (k < 1 || k > n) throw std::invalid_argument("arrival_process_simulate: k out of range");

  // Cumulative law of the next arrival's size for m remaining agents:
  // P(size = r) = C(m, r) / M(m), r = 1..min(k, m).
  BinomialTable binom;
  std::vector<std::vector<double>> size_cdf(static_cast<std::size_t>(n) + 1);
  for (int m = 1; m <= n; ++m) {
    const int hi = std::min(k, m);
    Rational total(0);
    for (int r = 1; r <= hi; ++r) total += Rational(binom.choose(m, r), BigInt(1));
    double cum = 0.0;
    for (int r = 1; r <= hi; ++r) {
      cum += (Rational(binom.choose(m, r), BigInt(1)) / total).to_double();
      size_cdf[static_cast<std::size_t>(m)].push_back(cum);
    }
    size_cdf[static_cast<std::size_t>(m)].back() = 1.0;
  }

  // Worth table, fully enumerable at n <= 20.
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::vector<double> worth(full + 1);
  for (std::uint64_t mask = 0; mask <= full; ++mask)
    worth[mask] = g.eval(Coalition::from_bits(n, mask));

  std::vector<std::uint64_t> track_masks;
  for (const auto& t : track) track_masks.push_back(t.bits());
  std::vector<std::uint64_t> visits(track.size(), 0);

  std::vector<double> credit(full + 1, 0.0);
  Xoshiro256ss rng(cfg.seed ^ 0x41525256414C2121ULL);
  std::vector<int> agents(static_cast<std::size_t>(n));

  for (std::uint64_t it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < n; ++i) agents[static_cast<std::size_t>(i)] = i;
    int m = n;
    std::uint64_t cur = 0;
    while (m > 0) {
      const auto& cdf = size_cdf[static_cast<std::size_t>(m)];
      const double u = rng.unit();
      int r = 1;
      while (r <= static_cast<int>(cdf.size()) && u >= cdf[static_cast<std::size_t>(r - 1)]) ++r;
      r = std::min(r, static_cast<int>(cdf.size()));
      // Move r uniformly chosen remaining agents to the tail.
      std::uint64_t arriving = 0;
      for (int i = 0; i < r; ++i) {
        const int pos = static_cast<int>(rng.below(static_cast<std::uint64_t>(m - i)));
        std::swap(agents[static_cast<std::size_t>(pos)],
                  agents[static_cast<std::size_t>(m - 1 - i)]);
        arriving |= std::uint64_t{1} << agents[static_cast<std::size_t>(m - 1 - i)];
      }
      m -= r;
      const std::uint64_t united = cur | arriving;
      credit[arriving] += worth[united] - worth[cur];
      cur = united;
      for (std::size_t ti = 0; ti < track_masks.size(); ++ti)
        if (cur == track_masks[ti]) ++visits[ti];
    }
  }

  ArrivalSimResult out;
  out.iterations = cfg.iterations;
  out.tracked = track;
  out.union_visits = visits;
  out.values.kind = IndexKind::joint_shapley;
  out.values.n = n;
  out.values.k = k;
  out.values.sampled = true;
  out.values.seed = cfg.seed;
  out.values.iterations = cfg.iterations;
  for (int t = 1; t <= k; ++t) {
    for_each_mask_of_size(n, t, [&](std::uint64_t tmask) {
      out.values.coalitions.push_back(Coalition::from_bits(n, tmask));
      out.values.values.push_back(credit[tmask] / static_cast<double>(cfg.iterations));
    });
  }
  return out;
}

IndexResult arrival_expectation_exact(const Game& g, int k) {
  const int n = g.agents();
  if (g.kind() != GameKind::exact)
    throw std::invalid_argument("arrival_expectation_exact: needs an exact game");
  if (n > 12) throw std::invalid_argument("arrival_expectation_exact: n <= 12");
  if (k < 1 || k > n) throw std::invalid_argument("arrival_expectation_exact: k out of range");

  BinomialTable binom;
  // inv_m[m] = 1 / M(m), M(m) = number of non-empty subsets of size <= k
  // among m remaining agents.
  std::vector<Rational> inv_m(static_cast<std::size_t>(n) + 1, Rational(0));
  for (int m = 1; m <= n; ++m) {
    BigInt total(0);
    for (int r = 1; r <= std::min(k, m); ++r) total += binom.choose(m, r);
    inv_m[static_cast<std::size_t>(m)] = Rational(BigInt(1), total);
  }

  const std::uint64_t full = (std::uint64_t{1} << n) - 1;

  // reach[S] = probability the union of arrived coalitions ever equals S.
  std::vector<Rational> reach(full + 1, Rational(0));
  reach[0] = Rational(1);
  for (std::uint64_t cur = 1; cur <= full; ++cur) {
    Rational p(0);
    for_each_subset(cur, [&](std::uint64_t prev) {
      if (prev == cur) return;
      const int arriving = std::popcount(cur ^ prev);
      if (arriving > k) return;
      p += reach[prev] * inv_m[static_cast<std::size_t>(n - std::popcount(prev))];
    });
    reach[cur] = std::move(p);
  }

  std::vector<Rational> worth(full + 1, Rational(0));
  for (std::uint64_t mask = 0; mask <= full; ++mask)
    worth[mask] = g.eval_exact(Coalition::from_bits(n, mask));

  std::vector<std::pair<std::uint64_t, Rational>> entries;
  for (int t = 1; t <= k; ++t) {
    for_each_mask_of_size(n, t, [&](std::uint64_t tmask) {
      Rational acc(0);
      for_each_subset(full & ~tmask, [&](std::uint64_t s) {
        acc += reach[s] * inv_m[static_cast<std::size_t>(n - std::popcount(s))] *
               (worth[s | tmask] - worth[s]);
      });
      entries.emplace_back(tmask, std::move(acc));
    });
  }

  IndexResult r;
  r.kind = IndexKind::joint_shapley;
  r.n = n;
  r.k = k;
  r.sampled = false;
  r.rational_values = true;
  for (auto& [mask, v] : entries) {
    r.coalitions.push_back(Coalition::from_bits(n, mask));
    r.values.push_back(v.to_double());
    r.rationals.push_back(std::move(v));
  }
  return r;
}

}  // namespace jshap

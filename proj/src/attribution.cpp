#include "jshap/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jshap/coefficients.hpp"

namespace jshap {

bool Dataset::is_binary() const {
  for (const auto& row : rows)
    for (double v : row)
      if (v != 0.0 && v != 1.0) return false;
  return true;
}

void Dataset::validate() const {
  if (feature_names.empty()) throw std::invalid_argument("dataset: needs at least one feature");
  for (const auto& row : rows)
    if (row.size() != feature_names.size())
      throw std::invalid_argument("dataset: ragged row (expected " +
                                  std::to_string(feature_names.size()) + " values, got " +
                                  std::to_string(row.size()) + ")");
}

Dataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  Dataset d;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset '" + path + "': empty file");
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) d.feature_names.push_back(tok);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw std::runtime_error("dataset '" + path + "': line " + std::to_string(lineno) +
                                 ": cannot parse '" + tok + "'");
      }
    }
    d.rows.push_back(std::move(row));
  }
  d.validate();
  return d;
}

Instance tau(const Instance& x, const Instance& z, const Coalition& s) {
  if (x.size() != z.size())
    throw std::invalid_argument("tau: x and z have different lengths");
  if (static_cast<int>(x.size()) != s.agent_count())
    throw std::invalid_argument("tau: coalition is over " + std::to_string(s.agent_count()) +
                                " agents, instances have " + std::to_string(x.size()));
  Instance out = z;
  for (int i : s.agents()) out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  return out;
}

std::vector<Rational> tau_exact(const std::vector<Rational>& x, const std::vector<Rational>& z,
                                const Coalition& s) {
  if (x.size() != z.size())
    throw std::invalid_argument("tau: x and z have different lengths");
  if (static_cast<int>(x.size()) != s.agent_count())
    throw std::invalid_argument("tau: coalition length mismatch");
  std::vector<Rational> out = z;
  for (int i : s.agents()) out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  return out;
}

ValueFunction::ValueFunction(ModelPtr model, std::shared_ptr<const Dataset> data, Instance x,
                             Mode mode)
    : model_(std::move(model)), data_(std::move(data)), x_(std::move(x)), mode_(mode) {
  if (!model_) throw std::invalid_argument("ValueFunction: null model");
  if (!data_) throw std::invalid_argument("ValueFunction: null dataset");
  data_->validate();
  if (data_->rows.empty()) throw std::invalid_argument("ValueFunction: dataset has no rows");
  if (x_.size() != data_->feature_names.size())
    throw std::invalid_argument("ValueFunction: instance length " + std::to_string(x_.size()) +
                                " does not match dataset width " +
                                std::to_string(data_->feature_names.size()));
  if (model_->n_features() > static_cast<int>(x_.size()))
    throw std::invalid_argument("ValueFunction: model needs " +
                                std::to_string(model_->n_features()) +
                                " features, dataset has " + std::to_string(x_.size()));
  if (mode_ == Mode::exact_over_dataset) {
    std::vector<double> preds(data_->rows.size());
    try {
      model_->predict_batch(data_->rows, preds);
    } catch (const std::exception&) {
      for (std::size_t r = 0; r < data_->rows.size(); ++r) {
        try {
          preds[r] = model_->predict(data_->rows[r]);
        } catch (const std::exception& e) {
          throw std::runtime_error("model failed on dataset row " + std::to_string(r) + ": " +
                                   e.what());
        }
      }
    }
    double acc = 0.0;
    for (double p : preds) acc += p;
    mean_f_ = acc / static_cast<double>(preds.size());
  } else {
    z_ = data_->rows.front();
    fz_ = model_->predict(z_);
  }
}

std::unique_ptr<WorthSource> ValueFunction::clone() const {
  return std::make_unique<ValueFunction>(model_, data_, x_, mode_);
}

void ValueFunction::begin_iteration(Xoshiro256ss& rng) {
  if (mode_ != Mode::sampled_baselines) return;
  const auto row = rng.below(data_->rows.size());
  z_ = data_->rows[static_cast<std::size_t>(row)];
  fz_ = model_->predict(z_);
}

double ValueFunction::value(const Coalition& s) const {
  if (static_cast<int>(x_.size()) != s.agent_count())
    throw std::invalid_argument("ValueFunction: coalition over wrong agent count");
  if (s.is_empty()) return 0.0;  // tau(x,z,empty) = z makes every summand vanish
  if (mode_ == Mode::sampled_baselines) {
    return model_->predict(tau(x_, z_, s)) - fz_;
  }
  std::vector<std::vector<double>> spliced;
  spliced.reserve(data_->rows.size());
  for (const auto& z : data_->rows) spliced.push_back(tau(x_, z, s));
  std::vector<double> preds(spliced.size());
  try {
    model_->predict_batch(spliced, preds);
  } catch (const std::exception&) {
    // Re-run row by row so the error names the failing baseline.
    for (std::size_t r = 0; r < spliced.size(); ++r) {
      try {
        preds[r] = model_->predict(spliced[r]);
      } catch (const std::exception& e) {
        throw std::runtime_error("model failed on baseline row " + std::to_string(r) + ": " +
                                 e.what());
      }
    }
  }
  double acc = 0.0;
  for (double p : preds) acc += p;
  return acc / static_cast<double>(preds.size()) - mean_f_;
}

double ValueFunction::mean_prediction() const {
  if (mode_ != Mode::exact_over_dataset)
    throw std::logic_error("mean_prediction: only available in exact_over_dataset mode");
  return mean_f_;
}

std::unique_ptr<ValueFunction> build_value_function(ModelPtr model,
                                                    std::shared_ptr<const Dataset> data,
                                                    Instance x, ValueFunction::Mode mode) {
  return std::make_unique<ValueFunction>(std::move(model), std::move(data), std::move(x), mode);
}

Game value_function_game(ModelPtr model, std::shared_ptr<const Dataset> data, Instance x) {
  auto vf = std::make_shared<ValueFunction>(std::move(model), std::move(data), std::move(x),
                                            ValueFunction::Mode::exact_over_dataset);
  const int n = vf->agents();
  return Game::numeric(
      n, [vf](const Coalition& s) { return vf->value(s); }, "value_function");
}

IndexResult local_joint_shapley(ModelPtr model, std::shared_ptr<const Dataset> data,
                                const Instance& x, int k, bool sampled,
                                const SamplerConfig& cfg, const std::vector<Coalition>& targets) {
  const int n = static_cast<int>(x.size());
  if (!sampled) {
    const Game g = value_function_game(std::move(model), std::move(data), x);
    return joint_shapley_exact(g, k);
  }
  ValueFunction vf(std::move(model), std::move(data), x, ValueFunction::Mode::sampled_baselines);
  std::vector<Coalition> ts = targets;
  if (ts.empty()) {
    if (n > kExactAgentGuard)
      throw std::invalid_argument(
          "local_joint_shapley: explicit targets are required for n > " +
          std::to_string(kExactAgentGuard));
    for (int t = 1; t <= k; ++t)
      for_each_mask_of_size(n, t,
                            [&](std::uint64_t m) { ts.push_back(Coalition::from_bits(n, m)); });
  }
  return sample_joint_shapley(vf, k, ts, cfg);
}

std::string GlobalReport::coalition_names(std::size_t i) const {
  std::string out;
  for (int a : coalitions[i].agents()) {
    if (!out.empty()) out += ',';
    out += (a < static_cast<int>(feature_names.size())) ? feature_names[static_cast<std::size_t>(a)]
                                                        : std::to_string(a);
  }
  return out;
}

GlobalReport global_mean_abs(const std::vector<IndexResult>& locals,
                             std::vector<std::string> feature_names) {
  if (locals.empty()) throw std::invalid_argument("global_mean_abs: no local results given");
  const int n = locals.front().n;
  const int k = locals.front().k;
  const std::size_t m = locals.front().size();
  bool exact = true;
  for (const auto& r : locals) {
    if (r.n != n || r.k != k)
      throw std::invalid_argument("global_mean_abs: locals disagree on (n, k)");
    if (r.size() != m)
      throw std::invalid_argument("global_mean_abs: locals disagree on coalition sets");
    exact = exact && r.rational_values;
  }
  GlobalReport rep;
  rep.n = n;
  rep.k = k;
  rep.exact = exact;
  rep.feature_names = std::move(feature_names);
  rep.coalitions = locals.front().coalitions;
  rep.mean_abs.assign(m, 0.0);
  if (exact) rep.mean_abs_rat.assign(m, Rational(0));
  const Rational count(static_cast<long>(locals.size()));
  for (std::size_t i = 0; i < m; ++i) {
    if (exact) {
      Rational acc(0);
      for (const auto& r : locals) acc += r.rationals[i].abs();
      rep.mean_abs_rat[i] = acc / count;
      rep.mean_abs[i] = rep.mean_abs_rat[i].to_double();
    } else {
      double acc = 0.0;
      for (const auto& r : locals) acc += std::abs(r.values[i]);
      rep.mean_abs[i] = acc / static_cast<double>(locals.size());
    }
  }
  return rep;
}

namespace {

bool all_present(const Instance& x, const Coalition& t) {
  for (int a : t.agents())
    if (x[static_cast<std::size_t>(a)] != 1.0) return false;
  return true;
}

}  // namespace

GlobalReport presence_adjusted_global(const ModelPtr& model, std::shared_ptr<const Dataset> data,
                                      int k, const SamplerConfig* sampled_cfg,
                                      const std::vector<Coalition>& targets) {
  data->validate();
  if (!data->is_binary())
    throw std::invalid_argument(
        "presence_adjusted_global: dataset must be strictly binary (presence is undefined "
        "otherwise)");
  if (data->rows.empty()) throw std::invalid_argument("presence_adjusted_global: empty dataset");

  GlobalReport rep;
  rep.n = data->n_features();
  rep.k = k;
  rep.feature_names = data->feature_names;
  std::vector<double> acc;
  std::vector<std::uint64_t> counts;
  for (const auto& row : data->rows) {
    const IndexResult local = local_joint_shapley(
        model, data, row, k, /*sampled=*/sampled_cfg != nullptr,
        sampled_cfg ? *sampled_cfg : SamplerConfig{}, targets);
    if (rep.coalitions.empty()) {
      rep.coalitions = local.coalitions;
      acc.assign(local.size(), 0.0);
      counts.assign(local.size(), 0);
    }
    for (std::size_t i = 0; i < local.size(); ++i) {
      const bool present = all_present(row, local.coalitions[i]);
      acc[i] += (present ? 1.0 : -1.0) * local.values[i];
      if (present) ++counts[i];
    }
  }
  rep.presence_adjusted.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i)
    rep.presence_adjusted[i] = acc[i] / static_cast<double>(data->rows.size());
  rep.presence_counts = std::move(counts);
  return rep;
}

namespace {

// Exact engine over the full uniform cube {0,1}^n. Subcube sums of the
// model's predictions are tabulated once per model: cell index is a trit
// string (per feature: free / fixed-0 / fixed-1), and W[cell] sums f over
// the cell's assignments. Then u_x(S) = W[x fixed on S, rest free] / 2^(n-s)
// and v_x differences cancel the constant mean term.
class CubeEngine {
 public:
  CubeEngine(const ModelPtr& model, int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("cube engine: n must be >= 1");
    if (!model->exact_capable())
      throw std::invalid_argument("cube engine: model '" + model->describe() +
                                  "' cannot be evaluated exactly");
    if (model->n_features() > n)
      throw std::invalid_argument("cube engine: model needs more features than n");
    pow3_.resize(static_cast<std::size_t>(n) + 1);
    pow3_[0] = 1;
    for (int i = 1; i <= n; ++i) pow3_[static_cast<std::size_t>(i)] = 3 * pow3_[static_cast<std::size_t>(i - 1)];

    std::vector<Rational> f(std::size_t{1} << n_);
    std::vector<Rational> inst(static_cast<std::size_t>(n_), Rational(0));
    for (std::uint64_t z = 0; z < f.size(); ++z) {
      for (int i = 0; i < n_; ++i) inst[static_cast<std::size_t>(i)] = Rational(((z >> i) & 1) ? 1 : 0);
      f[z] = model->predict_exact(inst);
    }

    w_.assign(pow3_[static_cast<std::size_t>(n_)], Rational(0));
    for (std::size_t cell = w_.size(); cell-- > 0;) {
      // Lowest free coordinate, if any.
      int free_coord = -1;
      std::uint64_t fixed_bits = 0;
      std::size_t rest = cell;
      for (int i = 0; i < n_; ++i) {
        const int trit = static_cast<int>(rest % 3);
        rest /= 3;
        if (trit == 0 && free_coord < 0)
          free_coord = i;
        else if (trit == 2)
          fixed_bits |= std::uint64_t{1} << i;
      }
      if (free_coord < 0) {
        w_[cell] = f[fixed_bits];
      } else {
        w_[cell] = w_[cell + pow3_[static_cast<std::size_t>(free_coord)]] +
                   w_[cell + 2 * pow3_[static_cast<std::size_t>(free_coord)]];
      }
    }

    inv_pow2_.resize(static_cast<std::size_t>(n_) + 1);
    for (int i = 0; i <= n_; ++i)
      inv_pow2_[static_cast<std::size_t>(i)] =
          Rational(BigInt(1), BigInt::pow2(static_cast<unsigned long>(i)));
  }

  // E_z f(tau(x, z, S)) for x given as a bit pattern.
  Rational mean_spliced(std::uint64_t x_bits, std::uint64_t s_mask) const {
    std::size_t cell = 0;
    int s_size = 0;
    for (int i = 0; i < n_; ++i) {
      if ((s_mask >> i) & 1) {
        cell += pow3_[static_cast<std::size_t>(i)] * (((x_bits >> i) & 1) ? 2 : 1);
        ++s_size;
      }
    }
    return w_[cell] * inv_pow2_[static_cast<std::size_t>(n_ - s_size)];
  }

  // phi_T(v_x) for one target.
  Rational local_value(std::uint64_t x_bits, std::uint64_t t_mask,
                       const std::vector<Rational>& q) const {
    const std::uint64_t full = (std::uint64_t{1} << n_) - 1;
    Rational acc(0);
    for_each_subset(full & ~t_mask, [&](std::uint64_t s) {
      acc += q[static_cast<std::size_t>(std::popcount(s))] *
             (mean_spliced(x_bits, s | t_mask) - mean_spliced(x_bits, s));
    });
    return acc;
  }

  int n() const { return n_; }

 private:
  int n_;
  std::vector<std::size_t> pow3_;
  std::vector<Rational> w_;
  std::vector<Rational> inv_pow2_;
};

Rational cube_presence_adjusted_single(const CubeEngine& engine, std::uint64_t t_mask,
                                       const std::vector<Rational>& q) {
  const int n = engine.n();
  Rational acc(0);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    const bool present = (x & t_mask) == t_mask;
    const Rational phi = engine.local_value(x, t_mask, q);
    acc += present ? phi : -phi;
  }
  return acc * Rational(BigInt(1), BigInt::pow2(static_cast<unsigned long>(n)));
}

}  // namespace

GlobalReport presence_adjusted_cube_exact(const ModelPtr& model,
                                          std::vector<std::string> feature_names, int k) {
  const int n = static_cast<int>(feature_names.size());
  if (n > 8)
    throw std::invalid_argument(
        "presence_adjusted_cube_exact: full enumeration supported for n <= 8");
  if (k < 1 || k > n) throw std::invalid_argument("presence_adjusted_cube_exact: k out of range");
  const CubeEngine engine(model, n);
  const CoefficientTable table = compute_q(n, k);
  const std::vector<Rational>& q = table.all();

  GlobalReport rep;
  rep.n = n;
  rep.k = k;
  rep.exact = true;
  rep.feature_names = std::move(feature_names);

  const Rational inv_cube(BigInt(1), BigInt::pow2(static_cast<unsigned long>(n)));
  for (int t = 1; t <= k; ++t) {
    for_each_mask_of_size(n, t, [&](std::uint64_t t_mask) {
      Rational presence(0);
      Rational mean_abs(0);
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
        const Rational phi = engine.local_value(x, t_mask, q);
        presence += ((x & t_mask) == t_mask) ? phi : -phi;
        mean_abs += phi.abs();
      }
      rep.coalitions.push_back(Coalition::from_bits(n, t_mask));
      rep.presence_adjusted_rat.push_back(presence * inv_cube);
      rep.mean_abs_rat.push_back(mean_abs * inv_cube);
      rep.presence_counts.push_back(std::uint64_t{1} << (n - t));
    });
  }
  rep.presence_adjusted.reserve(rep.presence_adjusted_rat.size());
  rep.mean_abs.reserve(rep.mean_abs_rat.size());
  for (const auto& r : rep.presence_adjusted_rat) rep.presence_adjusted.push_back(r.to_double());
  for (const auto& r : rep.mean_abs_rat) rep.mean_abs.push_back(r.to_double());
  return rep;
}

Rational presence_adjusted_cube_exact_single(const ModelPtr& model, int n, int k,
                                             const Coalition& target) {
  if (n > 12)
    throw std::invalid_argument("presence_adjusted_cube_exact_single: n <= 12 required");
  if (k < 1 || k > n)
    throw std::invalid_argument("presence_adjusted_cube_exact_single: k out of range");
  if (target.agent_count() != n || target.is_empty() || target.size() > k)
    throw std::invalid_argument("presence_adjusted_cube_exact_single: bad target");
  const CubeEngine engine(model, n);
  const CoefficientTable table = compute_q(n, k);
  return cube_presence_adjusted_single(engine, target.bits(), table.all());
}

DecompositionReport additive_decomposition_check(const ModelPtr& model, int n, int feature,
                                                 int k) {
  if (n < 1 || n > 12)
    throw std::invalid_argument("additive_decomposition_check: n must be in [1, 12]");
  if (feature < 0 || feature >= n)
    throw std::invalid_argument("additive_decomposition_check: feature index out of range");
  if (k < 1 || k > n) throw std::invalid_argument("additive_decomposition_check: k out of range");

  DecompositionReport rep;
  rep.feature = feature;
  rep.n = n;
  rep.k = k;
  rep.measured =
      presence_adjusted_cube_exact_single(model, n, k, Coalition::singleton(n, feature));

  const CoefficientTable table = compute_q(n, k);
  BinomialTable binom;
  Rational weight_sum(0);
  for (int s = 0; s <= n - 1; ++s)
    weight_sum += Rational(binom.choose(n - 1, s), BigInt(1)) * table.q(s);

  // Feature effect f(x_feature = 1, rest) - f(x_feature = 0, rest), swept
  // over every baseline pattern of the remaining features.
  std::vector<Rational> inst(static_cast<std::size_t>(n), Rational(0));
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (i != feature) rest.push_back(i);
  Rational delta_min, delta_max, delta_sum(0);
  bool first = true;
  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  for (std::uint64_t p = 0; p < patterns; ++p) {
    for (std::size_t r = 0; r < rest.size(); ++r)
      inst[static_cast<std::size_t>(rest[r])] = Rational(((p >> r) & 1) ? 1 : 0);
    inst[static_cast<std::size_t>(feature)] = Rational(1);
    const Rational f1 = model->predict_exact(inst);
    inst[static_cast<std::size_t>(feature)] = Rational(0);
    const Rational f0 = model->predict_exact(inst);
    const Rational delta = f1 - f0;
    delta_sum += delta;
    if (first || delta < delta_min) delta_min = delta;
    if (first || delta > delta_max) delta_max = delta;
    first = false;
  }
  const Rational half(1, 2);
  const Rational mean_delta = delta_sum / Rational(static_cast<long>(patterns));
  rep.predicted = half * mean_delta * weight_sum;
  const Rational lo = (half * delta_min * weight_sum - rep.measured).abs();
  const Rational hi = (half * delta_max * weight_sum - rep.measured).abs();
  rep.residual = lo > hi ? lo : hi;
  rep.delta_constant = (delta_min == delta_max);
  rep.accept = rep.residual.is_zero();
  return rep;
}

}  // namespace jshap

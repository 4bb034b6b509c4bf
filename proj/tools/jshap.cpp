// jshap: joint Shapley values for games and model attribution.
//
// Subcommands: coeffs, explain-game, explain-model, sample, compare,
// verify-axioms, trace. Every command writes machine-readable output (CSV or
// JSON) to stdout or --out; file outputs get a sibling .manifest.json with
// enough information to replay the run.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jshap/attribution.hpp"
#include "jshap/coefficients.hpp"
#include "jshap/game.hpp"
#include "jshap/indices.hpp"
#include "jshap/model.hpp"
#include "jshap/sampler.hpp"

namespace {

constexpr const char* kVersion = "jointshap 0.1.0";

using Clock = std::chrono::steady_clock;

std::string g_command_line;

std::string format_double(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_manifest(const std::string& out_path, std::uint64_t seed, double elapsed_ms) {
  nlohmann::json m;
  m["schema"] = 1;
  m["command"] = g_command_line;
  m["seed"] = seed;
  m["version"] = kVersion;
  m["elapsed_ms"] = elapsed_ms;
  m["output"] = out_path;
  std::ofstream out(out_path + ".manifest.json");
  out << m.dump(2) << "\n";
}

// Emits to stdout or --out (with manifest alongside file outputs).
void emit(const std::string& text, const std::string& out_path, std::uint64_t seed,
          Clock::time_point started) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write output file '" + out_path + "'");
  out << text;
  out.close();
  const double ms =
      std::chrono::duration<double, std::milli>(Clock::now() - started).count();
  write_manifest(out_path, seed, ms);
}

std::vector<jshap::Coalition> parse_targets(const std::string& spec, int n) {
  std::vector<jshap::Coalition> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    if (tok.empty()) continue;
    out.push_back(jshap::Coalition::from_key(n, tok));
  }
  if (out.empty()) throw std::invalid_argument("no targets parsed from '" + spec + "'");
  return out;
}

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------- coeffs --

struct CoeffsOpts {
  int n = 0;
  int k = 0;
  bool json = false;
  bool csv = false;
  int digits = 12;
  std::string out;
};

int cmd_coeffs(const CoeffsOpts& o) {
  const auto started = Clock::now();
  const jshap::CoefficientTable table = jshap::compute_q(o.n, o.k);
  std::string text;
  if (o.json) {
    nlohmann::json j;
    j["schema"] = 1;
    j["command"] = "coeffs";
    j["n"] = o.n;
    j["k"] = o.k;
    std::vector<std::string> qs;
    std::vector<double> qf;
    for (int r = 0; r < o.n; ++r) {
      qs.push_back(table.q(r).str());
      qf.push_back(table.q(r).to_double());
    }
    j["q"] = qs;
    j["q_float"] = qf;
    text = j.dump(2) + "\n";
  } else if (o.csv) {
    text = "r,q,q_float\n";
    for (int r = 0; r < o.n; ++r)
      text += std::to_string(r) + "," + table.q(r).str() + "," +
              format_double(table.q(r).to_double(), o.digits) + "\n";
  } else {
    for (int r = 0; r < o.n; ++r) {
      if (r) text += ",";
      text += table.q(r).str();
    }
    text += "\n";
  }
  emit(text, o.out, 0, started);
  return 0;
}

// ---------------------------------------------------------- explain-game --

struct ExplainGameOpts {
  std::string game;
  std::string index = "joint";
  int k = 0;  // 0: default to n
  bool exact_rationals = false;
  bool json = false;
  int digits = 12;
  std::string out;
};

jshap::IndexResult compute_index(const jshap::Game& g, jshap::IndexKind kind, int k) {
  switch (kind) {
    case jshap::IndexKind::joint_shapley: return jshap::joint_shapley_exact(g, k);
    case jshap::IndexKind::shapley: return jshap::shapley(g);
    case jshap::IndexKind::shapley_interaction: return jshap::shapley_interaction(g);
    case jshap::IndexKind::generalised_shapley: return jshap::generalised_shapley(g);
    case jshap::IndexKind::added_value: return jshap::added_value(g);
    case jshap::IndexKind::shapley_taylor: return jshap::shapley_taylor(g, k);
  }
  throw std::logic_error("unreachable");
}

int cmd_explain_game(const ExplainGameOpts& o) {
  const auto started = Clock::now();
  const jshap::Game g = jshap::parse_game_spec(o.game);
  const jshap::IndexKind kind = jshap::index_kind_from_name(o.index);
  const int k = o.k > 0 ? o.k : g.agents();
  const jshap::IndexResult r = compute_index(g, kind, k);
  const bool rationals = o.exact_rationals && r.rational_values;

  std::string text;
  if (o.json) {
    nlohmann::json j;
    j["schema"] = 1;
    j["command"] = "explain-game";
    j["game"] = o.game;
    j["index"] = jshap::index_kind_name(r.kind);
    j["n"] = r.n;
    j["k"] = r.k;
    j["mode"] = r.sampled ? "sampled" : "exact";
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (rationals)
        values[r.coalitions[i].key()] = r.rationals[i].str();
      else
        values[r.coalitions[i].key()] = r.values[i];
    }
    j["values"] = values;
    text = j.dump(2) + "\n";
  } else {
    text = "coalition,value\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
      text += csv_quote(r.coalitions[i].key()) + ",";
      text += rationals ? r.rationals[i].str() : format_double(r.values[i], o.digits);
      text += "\n";
    }
  }
  emit(text, o.out, 0, started);
  return 0;
}

// --------------------------------------------------------------- compare --

struct CompareOpts {
  std::string game;
  std::vector<int> ks;
  int digits = 12;
  std::string out;
};

int cmd_compare(const CompareOpts& o) {
  const auto started = Clock::now();
  const jshap::Game g = jshap::parse_game_spec(o.game);
  const int n = g.agents();
  std::vector<int> ks = o.ks;
  if (ks.empty()) ks.push_back(n);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  const bool exact = g.kind() == jshap::GameKind::exact;
  const auto sh = jshap::shapley(g);
  const auto si = jshap::shapley_interaction(g);
  const auto gs = jshap::generalised_shapley(g);
  const auto av = jshap::added_value(g);
  std::vector<jshap::IndexResult> st, js;
  for (int k : ks) {
    st.push_back(jshap::shapley_taylor(g, k));
    js.push_back(jshap::joint_shapley_exact(g, k));
  }

  auto cell = [&](const jshap::IndexResult& r, const jshap::Coalition& t) -> std::string {
    const auto idx = r.find(t);
    if (!idx) return "";
    return exact ? r.rationals[*idx].str() : format_double(r.values[*idx], o.digits);
  };

  std::string text = "coalition,v";
  text += ",shapley,si,gs,av";
  for (int k : ks) text += ",st_k" + std::to_string(k);
  for (int k : ks) text += ",joint_k" + std::to_string(k);
  text += "\n";
  for (int t = 1; t <= n; ++t) {
    jshap::for_each_mask_of_size(n, t, [&](std::uint64_t mask) {
      const jshap::Coalition c = jshap::Coalition::from_bits(n, mask);
      text += csv_quote(c.key()) + ",";
      text += exact ? g.eval_exact(c).str() : format_double(g.eval(c), o.digits);
      text += "," + cell(sh, c) + "," + cell(si, c) + "," + cell(gs, c) + "," + cell(av, c);
      for (std::size_t i = 0; i < ks.size(); ++i) text += "," + cell(st[i], c);
      for (std::size_t i = 0; i < ks.size(); ++i) text += "," + cell(js[i], c);
      text += "\n";
    });
  }
  emit(text, o.out, 0, started);
  return 0;
}

// --------------------------------------------------------- verify-axioms --

struct VerifyOpts {
  std::string game;
  int k = 0;
  std::uint64_t seed = 7;
  int digits = 12;
  std::string out;
};

int cmd_verify_axioms(const VerifyOpts& o) {
  const auto started = Clock::now();
  const jshap::Game g = jshap::parse_game_spec(o.game);
  const int k = o.k > 0 ? o.k : g.agents();
  const jshap::IndexResult r = jshap::joint_shapley_exact(g, k);
  const jshap::AxiomReport rep = jshap::check_axioms(r, g, o.seed);

  std::string text;
  text += "game: " + o.game + " (n=" + std::to_string(g.agents()) + "), k=" + std::to_string(k) +
          "\n";
  text += "joint Shapley values:\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    text += "  " + r.coalitions[i].key() + " = ";
    text += r.rational_values ? r.rationals[i].str() : format_double(r.values[i], o.digits);
    text += "\n";
  }
  text += "efficiency: residual = " + rep.efficiency_residual +
          (rep.efficiency_ok ? " [pass]" : " [FAIL]") + "\n";
  text += "null coalitions: found " + std::to_string(rep.nulls_found) + ", violations " +
          std::to_string(rep.null_violations.size()) +
          (rep.null_violations.empty() ? " [pass]" : " [FAIL]") + "\n";
  text += "symmetry pairs: found " + std::to_string(rep.symmetric_pairs_found) +
          ", violations " + std::to_string(rep.symmetry_violations.size()) +
          (rep.symmetry_violations.empty() ? " [pass]" : " [FAIL]") + "\n";
  text += "anonymity: " + std::to_string(rep.anonymity_checks) + " permutation checks, violations " +
          std::to_string(rep.anonymity_violations) +
          (rep.anonymity_violations == 0 ? " [pass]" : " [FAIL]") + "\n";
  text += std::string("RESULT: ") + (rep.all_ok() ? "PASS" : "FAIL") + "\n";
  emit(text, o.out, o.seed, started);
  return rep.all_ok() ? 0 : 1;
}

// ---------------------------------------------------------------- sample --

struct SampleOpts {
  std::string game;
  std::string model;
  std::string data;
  int x_row = -1;
  int k = 0;
  std::string targets;
  std::uint64_t iters = 10000;
  std::uint64_t seed = 0;
  std::uint64_t batch = 0;
  int threads = default_threads();
  std::string trace_path;
  bool reference_exact = false;
  int digits = 12;
  std::string out;
};

std::unique_ptr<jshap::WorthSource> make_source(const SampleOpts& o, int* n_out) {
  if (!o.game.empty()) {
    jshap::Game g = jshap::parse_game_spec(o.game);
    *n_out = g.agents();
    return std::make_unique<jshap::GameWorthSource>(std::move(g));
  }
  if (o.model.empty() || o.data.empty() || o.x_row < 0)
    throw std::invalid_argument("sample: need --game, or --model with --data and --x");
  auto data = std::make_shared<jshap::Dataset>(jshap::load_dataset_csv(o.data));
  if (o.x_row >= static_cast<int>(data->rows.size()))
    throw std::invalid_argument("sample: --x row out of range");
  auto model = jshap::parse_model_spec(o.model);
  *n_out = data->n_features();
  return std::make_unique<jshap::ValueFunction>(
      model, data, data->rows[static_cast<std::size_t>(o.x_row)],
      jshap::ValueFunction::Mode::sampled_baselines);
}

int cmd_sample(const SampleOpts& o) {
  const auto started = Clock::now();
  int n = 0;
  const auto source = make_source(o, &n);
  if (o.k < 1) throw std::invalid_argument("sample: --k is required");
  const auto targets = parse_targets(o.targets, n);
  jshap::SamplerConfig cfg;
  cfg.iterations = o.iters;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.batch = o.batch;

  std::string trace_text;
  jshap::IndexResult result;
  if (!o.trace_path.empty()) {
    if (cfg.batch == 0) cfg.batch = std::max<std::uint64_t>(1, cfg.iterations / 100);
    std::unique_ptr<jshap::IndexResult> ref;
    if (o.reference_exact && !o.game.empty())
      ref = std::make_unique<jshap::IndexResult>(
          jshap::joint_shapley_exact(jshap::parse_game_spec(o.game), o.k));
    const jshap::ConvergenceTrace trace =
        jshap::convergence_trace(*source, o.k, targets, cfg, ref.get());
    trace_text = "iteration,target,estimate,l2\n";
    for (const auto& p : trace.points)
      for (std::size_t i = 0; i < targets.size(); ++i)
        trace_text += std::to_string(p.iteration) + "," + csv_quote(targets[i].key()) + "," +
                      format_double(p.estimates[i], o.digits) + "," +
                      format_double(p.l2, o.digits) + "\n";
    // Final checkpoint estimates coincide with the plain sampler's output.
    result.kind = jshap::IndexKind::joint_shapley;
    result.n = n;
    result.k = o.k;
    result.sampled = true;
    result.seed = cfg.seed;
    result.iterations = cfg.iterations;
    std::vector<std::size_t> order(targets.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return jshap::coalition_canonical_less(targets[a], targets[b]);
    });
    for (std::size_t i : order) {
      result.coalitions.push_back(targets[i]);
      result.values.push_back(trace.points.back().estimates[i]);
    }
  } else {
    result = jshap::sample_joint_shapley(*source, o.k, targets, cfg);
  }

  std::string text = "target,estimate,iterations,seed\n";
  for (std::size_t i = 0; i < result.size(); ++i)
    text += csv_quote(result.coalitions[i].key()) + "," +
            format_double(result.values[i], o.digits) + "," + std::to_string(o.iters) + "," +
            std::to_string(o.seed) + "\n";
  emit(text, o.out, o.seed, started);
  if (!o.trace_path.empty()) {
    std::ofstream tf(o.trace_path);
    if (!tf) throw std::runtime_error("cannot write trace file '" + o.trace_path + "'");
    tf << trace_text;
    tf.close();
    write_manifest(o.trace_path, o.seed,
                   std::chrono::duration<double, std::milli>(Clock::now() - started).count());
  }
  return 0;
}

// ----------------------------------------------------------------- trace --

int cmd_trace(const SampleOpts& o) {
  const auto started = Clock::now();
  int n = 0;
  const auto source = make_source(o, &n);
  if (o.k < 1) throw std::invalid_argument("trace: --k is required");
  const auto targets = parse_targets(o.targets, n);
  jshap::SamplerConfig cfg;
  cfg.iterations = o.iters;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.batch = o.batch == 0 ? std::max<std::uint64_t>(1, o.iters / 100) : o.batch;

  std::unique_ptr<jshap::IndexResult> ref;
  if (o.reference_exact && !o.game.empty())
    ref = std::make_unique<jshap::IndexResult>(
        jshap::joint_shapley_exact(jshap::parse_game_spec(o.game), o.k));
  const jshap::ConvergenceTrace trace =
      jshap::convergence_trace(*source, o.k, targets, cfg, ref.get());

  std::string text = "iteration,target,estimate,l2\n";
  for (const auto& p : trace.points)
    for (std::size_t i = 0; i < targets.size(); ++i)
      text += std::to_string(p.iteration) + "," + csv_quote(targets[i].key()) + "," +
              format_double(p.estimates[i], o.digits) + "," + format_double(p.l2, o.digits) +
              "\n";
  emit(text, o.out, o.seed, started);
  return 0;
}

// --------------------------------------------------------- explain-model --

struct ExplainModelOpts {
  std::string data;
  std::string model;
  int x_row = -1;
  bool all = false;
  int k = 0;
  std::string global;  // "", "mean-abs", "presence"
  bool exact_enumerate_binary = false;
  bool sampled = false;
  std::string targets;
  std::uint64_t iters = 10000;
  std::uint64_t seed = 0;
  int threads = default_threads();
  bool json = false;
  int digits = 12;
  std::string out;
};

std::string coalition_feature_names(const jshap::Coalition& c,
                                    const std::vector<std::string>& names) {
  std::string out;
  for (int a : c.agents()) {
    if (!out.empty()) out += ',';
    out += names[static_cast<std::size_t>(a)];
  }
  return out;
}

int cmd_explain_model(const ExplainModelOpts& o) {
  const auto started = Clock::now();
  auto data = std::make_shared<jshap::Dataset>(jshap::load_dataset_csv(o.data));
  auto model = jshap::parse_model_spec(o.model);
  const int n = data->n_features();
  const int k = o.k > 0 ? o.k : n;
  const auto& names = data->feature_names;

  std::string text;
  nlohmann::json j;
  j["schema"] = 1;
  j["command"] = "explain-model";
  j["model"] = o.model;
  j["data"] = o.data;
  j["n"] = n;
  j["k"] = k;

  if (!o.global.empty()) {
    if (!o.all && !o.exact_enumerate_binary)
      throw std::invalid_argument(
          "explain-model: --global aggregates over instances; pass --all (or "
          "--exact-enumerate-binary)");
    jshap::SamplerConfig scfg;
    scfg.iterations = o.iters;
    scfg.seed = o.seed;
    scfg.threads = o.threads;
    std::vector<jshap::Coalition> targets;
    if (!o.targets.empty()) targets = parse_targets(o.targets, n);
    jshap::GlobalReport rep;
    if (o.global == "presence") {
      rep = o.exact_enumerate_binary
                ? jshap::presence_adjusted_cube_exact(model, names, k)
                : jshap::presence_adjusted_global(model, data, k,
                                                  o.sampled ? &scfg : nullptr, targets);
    } else if (o.global == "mean-abs") {
      if (o.exact_enumerate_binary) {
        rep = jshap::presence_adjusted_cube_exact(model, names, k);
      } else {
        std::vector<jshap::IndexResult> locals;
        for (const auto& row : data->rows)
          locals.push_back(jshap::local_joint_shapley(model, data, row, k, /*sampled=*/false,
                                                      jshap::SamplerConfig{}));
        rep = jshap::global_mean_abs(locals, names);
      }
    } else {
      throw std::invalid_argument("explain-model: --global must be mean-abs or presence");
    }
    const bool presence = o.global == "presence";
    if (o.json) {
      j["global"] = o.global;
      j["mode"] = rep.exact ? "exact-enumerate-binary" : "dataset";
      nlohmann::json values = nlohmann::json::object();
      for (std::size_t i = 0; i < rep.coalitions.size(); ++i) {
        const std::string key = rep.coalition_names(i);
        if (rep.exact)
          values[key] = (presence ? rep.presence_adjusted_rat[i] : rep.mean_abs_rat[i]).str();
        else
          values[key] = presence ? rep.presence_adjusted[i] : rep.mean_abs[i];
      }
      j["values"] = values;
      if (presence && !rep.presence_counts.empty()) {
        nlohmann::json counts = nlohmann::json::object();
        for (std::size_t i = 0; i < rep.coalitions.size(); ++i)
          counts[rep.coalition_names(i)] = rep.presence_counts[i];
        j["presence_counts"] = counts;
      }
      text = j.dump(2) + "\n";
    } else {
      text = presence ? "coalition,presence_adjusted,presence_count\n" : "coalition,mean_abs\n";
      for (std::size_t i = 0; i < rep.coalitions.size(); ++i) {
        text += csv_quote(rep.coalition_names(i)) + ",";
        if (rep.exact)
          text += (presence ? rep.presence_adjusted_rat[i] : rep.mean_abs_rat[i]).str();
        else
          text += format_double(presence ? rep.presence_adjusted[i] : rep.mean_abs[i], o.digits);
        if (presence)
          text += "," + std::to_string(rep.presence_counts.empty() ? 0 : rep.presence_counts[i]);
        text += "\n";
      }
    }
    emit(text, o.out, o.seed, started);
    return 0;
  }

  // Local attribution for one instance.
  if (o.x_row < 0) throw std::invalid_argument("explain-model: need --x ROW or --global");
  if (o.x_row >= static_cast<int>(data->rows.size()))
    throw std::invalid_argument("explain-model: --x row out of range");
  const auto& x = data->rows[static_cast<std::size_t>(o.x_row)];
  jshap::SamplerConfig cfg;
  cfg.iterations = o.iters;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  std::vector<jshap::Coalition> local_targets;
  if (!o.targets.empty()) local_targets = parse_targets(o.targets, n);
  const jshap::IndexResult local =
      jshap::local_joint_shapley(model, data, x, k, o.sampled, cfg, local_targets);

  if (o.json) {
    j["x"] = o.x_row;
    j["mode"] = local.sampled ? "sampled" : "exact";
    if (local.sampled) {
      j["seed"] = local.seed;
      j["iterations"] = local.iterations;
    }
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t i = 0; i < local.size(); ++i)
      values[coalition_feature_names(local.coalitions[i], names)] = local.values[i];
    j["values"] = values;
    text = j.dump(2) + "\n";
  } else {
    text = "coalition,value\n";
    for (std::size_t i = 0; i < local.size(); ++i)
      text += csv_quote(coalition_feature_names(local.coalitions[i], names)) + "," +
              format_double(local.values[i], o.digits) + "\n";
  }
  emit(text, o.out, o.seed, started);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) {
    if (i) g_command_line += ' ';
    g_command_line += argv[i];
  }

  CLI::App app{"joint Shapley values: exact indices, sampling, and model attribution"};
  app.require_subcommand(1);
  int rc = 0;

  auto* coeffs = app.add_subcommand("coeffs", "arrival-weight coefficients q_0..q_{n-1}");
  auto copts = std::make_shared<CoeffsOpts>();
  coeffs->add_option("--n", copts->n, "agent count")->required();
  coeffs->add_option("--k", copts->k, "order of explanation")->required();
  coeffs->add_flag("--json", copts->json, "JSON output");
  coeffs->add_flag("--csv", copts->csv, "CSV output");
  coeffs->add_option("--float-digits", copts->digits, "significant digits for floats");
  coeffs->add_option("--out", copts->out, "output path (default stdout)");
  coeffs->callback([copts, &rc]() { rc = cmd_coeffs(*copts); });

  auto* eg = app.add_subcommand("explain-game", "one index over an explicit game");
  auto egopts = std::make_shared<ExplainGameOpts>();
  eg->add_option("--game", egopts->game, "game spec (builtin:... or JSON file)")->required();
  eg->add_option("--index", egopts->index, "joint|st|si|gs|av|shapley");
  eg->add_option("--k", egopts->k, "order of explanation (default n)");
  eg->add_flag("--exact-rationals", egopts->exact_rationals, "emit p/q strings");
  eg->add_flag("--json", egopts->json, "JSON output (default CSV)");
  eg->add_option("--float-digits", egopts->digits, "significant digits for floats");
  eg->add_option("--out", egopts->out, "output path");
  eg->callback([egopts, &rc]() { rc = cmd_explain_game(*egopts); });

  auto* cmp = app.add_subcommand("compare", "all six indices side by side");
  auto cmpopts = std::make_shared<CompareOpts>();
  cmp->add_option("--game", cmpopts->game, "game spec")->required();
  cmp->add_option("--k", cmpopts->ks, "order(s) of explanation for joint/st (repeatable)");
  cmp->add_option("--float-digits", cmpopts->digits, "significant digits for floats");
  cmp->add_option("--out", cmpopts->out, "output path");
  cmp->callback([cmpopts, &rc]() { rc = cmd_compare(*cmpopts); });

  auto* va = app.add_subcommand("verify-axioms", "axiom report for the joint Shapley value");
  auto vaopts = std::make_shared<VerifyOpts>();
  va->add_option("--game", vaopts->game, "game spec")->required();
  va->add_option("--k", vaopts->k, "order of explanation (default n)");
  va->add_option("--seed", vaopts->seed, "seed for the anonymity spot check");
  va->add_option("--float-digits", vaopts->digits, "significant digits for floats");
  va->add_option("--out", vaopts->out, "output path");
  va->callback([vaopts, &rc]() { rc = cmd_verify_axioms(*vaopts); });

  auto* smp = app.add_subcommand("sample", "Monte-Carlo joint Shapley estimates");
  auto sopts = std::make_shared<SampleOpts>();
  smp->add_option("--game", sopts->game, "game spec");
  smp->add_option("--model", sopts->model, "model spec (builtin:...|table:...|exec:...)");
  smp->add_option("--data", sopts->data, "dataset CSV (with --model)");
  smp->add_option("--x", sopts->x_row, "instance row index (with --model)");
  smp->add_option("--k", sopts->k, "order of explanation")->required();
  smp->add_option("--targets", sopts->targets, "semicolon-separated coalitions, e.g. \"0;1;0,1\"")
      ->required();
  smp->add_option("--iters", sopts->iters, "iterations");
  smp->add_option("--seed", sopts->seed, "RNG seed");
  smp->add_option("--batch", sopts->batch, "iterations per checkpoint (trace)");
  smp->add_option("--threads", sopts->threads, "worker threads (targets in parallel)");
  smp->add_option("--trace", sopts->trace_path, "also write a convergence trace CSV");
  smp->add_flag("--reference-exact", sopts->reference_exact,
                "trace L2 against the exact values (game sources)");
  smp->add_option("--float-digits", sopts->digits, "significant digits for floats");
  smp->add_option("--out", sopts->out, "output path");
  smp->callback([sopts, &rc]() { rc = cmd_sample(*sopts); });

  auto* trc = app.add_subcommand("trace", "convergence trace CSV (iteration,target,estimate,l2)");
  auto topts = std::make_shared<SampleOpts>();
  trc->add_option("--game", topts->game, "game spec");
  trc->add_option("--model", topts->model, "model spec");
  trc->add_option("--data", topts->data, "dataset CSV (with --model)");
  trc->add_option("--x", topts->x_row, "instance row index (with --model)");
  trc->add_option("--k", topts->k, "order of explanation")->required();
  trc->add_option("--targets", topts->targets, "semicolon-separated coalitions")->required();
  trc->add_option("--iters", topts->iters, "iterations");
  trc->add_option("--seed", topts->seed, "RNG seed");
  trc->add_option("--batch", topts->batch, "iterations per checkpoint");
  trc->add_option("--threads", topts->threads, "worker threads");
  trc->add_flag("--reference-exact", topts->reference_exact,
                "L2 against exact values (game sources)");
  trc->add_option("--float-digits", topts->digits, "significant digits for floats");
  trc->add_option("--out", topts->out, "output path");
  trc->callback([topts, &rc]() { rc = cmd_trace(*topts); });

  auto* em = app.add_subcommand("explain-model", "attribution for a model over a dataset");
  auto emopts = std::make_shared<ExplainModelOpts>();
  em->add_option("--data", emopts->data, "dataset CSV with feature-name header")->required();
  em->add_option("--model", emopts->model, "model spec")->required();
  em->add_option("--x", emopts->x_row, "instance row index for a local explanation");
  em->add_flag("--all", emopts->all, "aggregate over all instances (with --global)");
  em->add_option("--k", emopts->k, "order of explanation (default n)");
  em->add_option("--global", emopts->global, "mean-abs|presence");
  em->add_flag("--exact-enumerate-binary", emopts->exact_enumerate_binary,
               "replace the dataset by the full binary cube (exact rationals)");
  em->add_flag("--sampled", emopts->sampled, "sample the local values");
  em->add_option("--targets", emopts->targets, "targets for sampled locals");
  em->add_option("--iters", emopts->iters, "sampler iterations");
  em->add_option("--seed", emopts->seed, "sampler seed");
  em->add_option("--threads", emopts->threads, "worker threads");
  em->add_flag("--json", emopts->json, "JSON output (default CSV)");
  em->add_option("--float-digits", emopts->digits, "significant digits for floats");
  em->add_option("--out", emopts->out, "output path");
  em->callback([emopts, &rc]() { rc = cmd_explain_model(*emopts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2, help exits 0
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

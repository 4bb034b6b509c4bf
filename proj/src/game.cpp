#include "jshap/game.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace jshap {

Game Game::exact(int n, std::function<Rational(const Coalition&)> worth, std::string name) {
  if (n < 1) throw std::invalid_argument("Game: need at least one agent");
  Game g;
  g.n_ = n;
  g.kind_ = GameKind::exact;
  g.name_ = std::move(name);
  g.exact_fn_ = std::move(worth);
  return g;
}

Game Game::numeric(int n, std::function<double(const Coalition&)> worth, std::string name) {
  if (n < 1) throw std::invalid_argument("Game: need at least one agent");
  Game g;
  g.n_ = n;
  g.kind_ = GameKind::numeric;
  g.name_ = std::move(name);
  g.numeric_fn_ = std::move(worth);
  return g;
}

Rational Game::eval_exact(const Coalition& s) const {
  if (s.agent_count() != n_)
    throw std::invalid_argument("Game::eval_exact: coalition is over " +
                                std::to_string(s.agent_count()) + " agents, game has " +
                                std::to_string(n_));
  if (kind_ != GameKind::exact)
    throw std::logic_error("Game::eval_exact: game '" + name_ + "' is numeric");
  return exact_fn_(s);
}

double Game::eval(const Coalition& s) const {
  if (s.agent_count() != n_)
    throw std::invalid_argument("Game::eval: coalition is over " +
                                std::to_string(s.agent_count()) + " agents, game has " +
                                std::to_string(n_));
  if (kind_ == GameKind::exact) return exact_fn_(s).to_double();
  return numeric_fn_(s);
}

Game permute_game(const Game& g, const Permutation& sigma) {
  if (sigma.size() != g.agents())
    throw std::invalid_argument("permute_game: permutation size mismatch");
  const Permutation inv = sigma.inverse();
  if (g.kind() == GameKind::exact) {
    return Game::exact(
        g.agents(), [g, inv](const Coalition& s) { return g.eval_exact(inv.image(s)); },
        g.name() + "|permuted");
  }
  return Game::numeric(
      g.agents(), [g, inv](const Coalition& s) { return g.eval(inv.image(s)); },
      g.name() + "|permuted");
}

namespace games {

Game majority(int n) {
  return Game::exact(
      n, [n](const Coalition& s) { return Rational(2 * s.size() > n ? 1 : 0); },
      "majority:" + std::to_string(n));
}

Game linear_crosses(int n, const Rational& c) {
  return Game::exact(
      n,
      [c](const Coalition& s) {
        const int t = s.size();
        Rational v(t);
        if (t > 2) v += c * Rational(t - 2);
        return v;
      },
      "linear_crosses:" + std::to_string(n) + ":c=" + c.str());
}

Game identity(int n, const Coalition& r) {
  if (r.agent_count() != n) throw std::invalid_argument("identity game: R has wrong agent count");
  if (r.is_empty())
    throw std::invalid_argument("identity game: R must be non-empty (v(empty) must stay 0)");
  return Game::exact(
      n, [r](const Coalition& s) { return Rational(s == r ? 1 : 0); },
      "identity:" + std::to_string(n) + ":R=" + r.key());
}

Game threshold_x(int n, int c, int t) {
  const int threshold = n - c - 1 + t;
  if (threshold < 1)
    throw std::invalid_argument("threshold_x game: n-c-1+t must be >= 1, got " +
                                std::to_string(threshold));
  return Game::exact(
      n, [threshold](const Coalition& s) { return Rational(s.size() >= threshold ? 1 : 0); },
      "threshold_x:" + std::to_string(n) + ":c=" + std::to_string(c) +
          ":t=" + std::to_string(t));
}

Game constant_zero(int n) {
  return Game::exact(
      n, [](const Coalition&) { return Rational(0); }, "constant_zero:" + std::to_string(n));
}

}  // namespace games

namespace {

int require_int_param(const std::map<std::string, std::string>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end())
    throw std::invalid_argument("builtin game: missing parameter '" + key + "'");
  return std::stoi(it->second);
}

}  // namespace

Game builtin_game(const std::string& name, const std::map<std::string, std::string>& params) {
  const int n = require_int_param(params, "n");
  if (name == "majority") return games::majority(n);
  if (name == "constant_zero") return games::constant_zero(n);
  if (name == "linear_crosses") {
    auto it = params.find("c");
    if (it == params.end()) throw std::invalid_argument("linear_crosses: missing parameter 'c'");
    return games::linear_crosses(n, Rational(it->second));
  }
  if (name == "identity") {
    auto it = params.find("R");
    if (it == params.end()) throw std::invalid_argument("identity: missing parameter 'R'");
    return games::identity(n, Coalition::from_key(n, it->second));
  }
  if (name == "threshold_x") {
    return games::threshold_x(n, require_int_param(params, "c"), require_int_param(params, "t"));
  }
  throw std::invalid_argument("unknown builtin game '" + name + "'");
}

namespace {

constexpr int kMaxFileGameAgents = 64;

// Keys are tried as sorted-agent-list first (the writer's format); a pure
// 0/1 string of length exactly n falls back to bit-string form with agent 0
// leftmost. The empty string denotes the empty coalition.
Coalition parse_worth_key(int n, const std::string& key, const std::string& origin) {
  if (key.empty()) return Coalition::empty(n);
  bool list_ok = true;
  std::vector<int> agents;
  {
    std::stringstream ss(key);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        int a = std::stoi(tok, &used);
        if (used != tok.size() || a < 0 || a >= n) {
          list_ok = false;
          break;
        }
        agents.push_back(a);
      } catch (const std::exception&) {
        list_ok = false;
        break;
      }
    }
  }
  if (list_ok && !agents.empty()) {
    std::vector<int> sorted = agents;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::runtime_error(origin + ": duplicate agent in key '" + key + "'");
    return Coalition::from_agents(n, sorted);
  }
  if (static_cast<int>(key.size()) == n &&
      key.find_first_not_of("01") == std::string::npos) {
    std::uint64_t bits = 0;
    for (int i = 0; i < n; ++i)
      if (key[static_cast<std::size_t>(i)] == '1') bits |= std::uint64_t{1} << i;
    return Coalition::from_bits(n, bits);
  }
  throw std::runtime_error(origin + ": cannot parse coalition key '" + key + "'");
}

Rational parse_worth_value(const nlohmann::json& v, const std::string& origin,
                           const std::string& key) {
  try {
    if (v.is_string()) return Rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number_float()) return Rational::from_double_exact(v.get<double>());
  } catch (const std::exception& e) {
    throw std::runtime_error(origin + ": bad worth for key '" + key + "': " + e.what());
  }
  throw std::runtime_error(origin + ": worth for key '" + key + "' must be a number or 'p/q'");
}

}  // namespace

Game game_from_json_string(const std::string& text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(origin + ": invalid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("n"))
    throw std::runtime_error(origin + ": game file needs an object with field 'n'");
  const int n = j["n"].get<int>();
  if (n < 1 || n > kMaxFileGameAgents)
    throw std::runtime_error(origin + ": n=" + std::to_string(n) +
                             " outside supported range [1," +
                             std::to_string(kMaxFileGameAgents) + "]");
  auto worths = std::make_shared<std::unordered_map<std::uint64_t, Rational>>();
  if (j.contains("worths")) {
    if (!j["worths"].is_object())
      throw std::runtime_error(origin + ": 'worths' must be an object");
    for (const auto& [key, value] : j["worths"].items()) {
      const Coalition c = parse_worth_key(n, key, origin);
      const Rational w = parse_worth_value(value, origin, key);
      if (c.is_empty() && !w.is_zero())
        throw std::runtime_error(origin + ": v(empty) must be 0, file lists " + w.str());
      auto [it, inserted] = worths->emplace(c.bits(), w);
      if (!inserted)
        throw std::runtime_error(origin + ": coalition '" + key + "' listed twice");
    }
  }
  return Game::exact(
      n,
      [worths](const Coalition& s) {
        auto it = worths->find(s.bits());
        return it == worths->end() ? Rational(0) : it->second;
      },
      origin);
}

Game game_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return game_from_json_string(buf.str(), path);
}

std::string game_to_json_string(const Game& g, int k) {
  if (g.kind() != GameKind::exact)
    throw std::logic_error("game_to_json_string: only exact games are serializable");
  const int n = g.agents();
  if (n > kMaxFileGameAgents)
    throw std::runtime_error("game_to_json_string: n > " + std::to_string(kMaxFileGameAgents));
  if (n > 25) throw std::runtime_error("game_to_json_string: full enumeration needs n <= 25");
  nlohmann::json worths = nlohmann::json::object();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const Coalition c = Coalition::from_bits(n, mask);
    const Rational w = g.eval_exact(c);
    if (!w.is_zero()) worths[c.key()] = w.str();
  }
  nlohmann::json j;
  j["n"] = n;
  if (k > 0) j["k"] = k;
  j["worths"] = worths;
  return j.dump(2) + "\n";
}

void game_to_file(const Game& g, const std::string& path, int k) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write game file '" + path + "'");
  out << game_to_json_string(g, k);
}

Game parse_game_spec(const std::string& spec) {
  if (spec.rfind("builtin:", 0) != 0) return game_from_file(spec);
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.size() < 3)
    throw std::invalid_argument("game spec '" + spec + "': expected builtin:NAME:N[:p=v]...");
  std::map<std::string, std::string> params;
  params["n"] = parts[2];
  for (std::size_t i = 3; i < parts.size(); ++i) {
    auto eq = parts[i].find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("game spec '" + spec + "': parameter '" + parts[i] +
                                  "' is not of the form key=value");
    params[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
  }
  return builtin_game(parts[1], params);
}

}  // namespace jshap

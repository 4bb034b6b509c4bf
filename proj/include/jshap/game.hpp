// Cooperative games: set functions v on coalitions with v(empty) = 0.
// Exact games evaluate to rationals, numeric games to doubles; the two kinds
// never mix inside one computation. Games are immutable after construction
// and safe for concurrent read-only evaluation.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "jshap/coalition.hpp"
#include "jshap/rational.hpp"

namespace jshap {

enum class GameKind { exact, numeric };

class Game {
 public:
  static Game exact(int n, std::function<Rational(const Coalition&)> worth,
                    std::string name = "");
  static Game numeric(int n, std::function<double(const Coalition&)> worth,
                      std::string name = "");

  int agents() const { return n_; }
  GameKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  // Throws on agent-count mismatch; eval_exact additionally requires an
  // exact game. eval() works for both kinds (exact worths are converted).
  Rational eval_exact(const Coalition& s) const;
  double eval(const Coalition& s) const;

 private:
  Game() = default;
  int n_ = 0;
  GameKind kind_ = GameKind::exact;
  std::string name_;
  std::function<Rational(const Coalition&)> exact_fn_;
  std::function<double(const Coalition&)> numeric_fn_;
};

// sigma v, defined by (sigma v)(sigma(S)) = v(S) for all S.
Game permute_game(const Game& g, const Permutation& sigma);

namespace games {
// Worth 1 for strict majorities (2|S| > n), 0 otherwise. At n=3 this is the
// textbook three-player majority game: worth 1 iff |S| >= 2.
Game majority(int n);
// v(S) = |S| + c * max(0, |S| - 2).
Game linear_crosses(int n, const Rational& c);
// Worth 1 only at S == r (r must be non-empty so that v(empty) = 0).
Game identity(int n, const Coalition& r);
// Worth 1 iff |S| >= n - c - 1 + t; the threshold must be >= 1.
Game threshold_x(int n, int c, int t);
Game constant_zero(int n);
}  // namespace games

// Dispatch by name with string params; "n" is required for every game.
// Names: majority, linear_crosses (c), identity (R as "0,1"),
// threshold_x (c, t), constant_zero.
Game builtin_game(const std::string& name, const std::map<std::string, std::string>& params);

// JSON game file format (see README): {"n": int, "k": optional int,
// "worths": {key: value}} where key is a sorted-agent-list ("0,2,3") or a
// length-n bit string with agent 0 as the leftmost character, and value is a
// number or a "p/q" string. Unlisted coalitions default to worth 0.
Game game_from_file(const std::string& path);
void game_to_file(const Game& g, const std::string& path, int k = 0);
std::string game_to_json_string(const Game& g, int k = 0);
Game game_from_json_string(const std::string& text, const std::string& origin = "<string>");

// "builtin:majority:3", "builtin:linear_crosses:3:c=-2",
// "builtin:identity:3:R=0,1", or a path to a JSON game file.
Game parse_game_spec(const std::string& spec);

}  // namespace jshap

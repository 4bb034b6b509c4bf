// Shared helpers for the test suites: random rational games, planted-null
// constructions, and a CLI runner.

#pragma once

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jshap/coalition.hpp"
#include "jshap/game.hpp"
#include "jshap/rng.hpp"

namespace testsupport {

inline jshap::Rational random_rational(jshap::Xoshiro256ss& rng, long num_range = 100,
                                       long den_range = 20) {
  const long num = static_cast<long>(rng.below(static_cast<std::uint64_t>(2 * num_range + 1))) -
                   num_range;
  const long den = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(den_range)));
  return jshap::Rational(num, den);
}

// Dense random exact game with v(empty) = 0, worths uniform rationals.
inline jshap::Game random_rational_game(int n, jshap::Xoshiro256ss& rng) {
  auto table = std::make_shared<std::vector<jshap::Rational>>(std::size_t{1} << n,
                                                              jshap::Rational(0));
  for (std::uint64_t mask = 1; mask < table->size(); ++mask)
    (*table)[mask] = random_rational(rng);
  return jshap::Game::exact(
      n, [table](const jshap::Coalition& s) { return (*table)[s.bits()]; }, "random");
}

// v(S) = w(S minus T) for a random w: every non-empty subset of T is null.
inline jshap::Game planted_null_game(int n, const jshap::Coalition& t,
                                     jshap::Xoshiro256ss& rng) {
  auto table = std::make_shared<std::vector<jshap::Rational>>(std::size_t{1} << n,
                                                              jshap::Rational(0));
  const std::uint64_t keep = ~t.bits();
  for (std::uint64_t mask = 1; mask < table->size(); ++mask) {
    if ((mask & keep) == mask && mask != 0) (*table)[mask] = random_rational(rng);
  }
  return jshap::Game::exact(
      n, [table, keep](const jshap::Coalition& s) { return (*table)[s.bits() & keep]; },
      "planted_null");
}

inline jshap::Game linear_combination(const jshap::Rational& a, const jshap::Game& v,
                                      const jshap::Rational& b, const jshap::Game& w) {
  if (v.agents() != w.agents()) throw std::invalid_argument("linear_combination: n mismatch");
  return jshap::Game::exact(
      v.agents(),
      [a, v, b, w](const jshap::Coalition& s) {
        return a * v.eval_exact(s) + b * w.eval_exact(s);
      },
      "combo");
}

inline jshap::Permutation random_permutation(int n, jshap::Xoshiro256ss& rng) {
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]);
  }
  return jshap::Permutation(m);
}

// Runs the built CLI binary; returns its exit code, captures stdout.
inline int run_cli(const std::string& args, std::string* out) {
  const std::string cmd = std::string(JSHAP_CLI_PATH) + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
  std::string text;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, got);
  const int status = pclose(pipe);
  if (out) *out = text;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string temp_path(const std::string& name) {
  return std::string("/tmp/jshap_test_") + name;
}

}  // namespace testsupport

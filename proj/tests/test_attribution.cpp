#include <doctest.h>

#include <cmath>
#include <memory>

#include "jshap/attribution.hpp"
#include "support.hpp"

using jshap::Coalition;
using jshap::Dataset;
using jshap::Instance;
using jshap::Rational;

namespace {

// All 2^n binary rows, in mask order.
std::shared_ptr<Dataset> binary_cube_dataset(int n) {
  auto d = std::make_shared<Dataset>();
  for (int i = 0; i < n; ++i) d->feature_names.push_back("x" + std::to_string(i + 1));
  for (std::uint64_t z = 0; z < (std::uint64_t{1} << n); ++z) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = (z >> i) & 1;
    d->rows.push_back(std::move(row));
  }
  return d;
}

std::shared_ptr<Dataset> uniform_dataset(int n, int rows, std::uint64_t seed) {
  auto d = std::make_shared<Dataset>();
  for (int i = 0; i < n; ++i) d->feature_names.push_back("x" + std::to_string(i + 1));
  jshap::Xoshiro256ss rng(seed);
  for (int r = 0; r < rows; ++r) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = rng.unit();
    d->rows.push_back(std::move(row));
  }
  return d;
}

Coalition C3(std::initializer_list<int> agents) { return Coalition::from_agents(3, agents); }

}  // namespace

TEST_SUITE_BEGIN("attribution");

TEST_CASE("tau splices componentwise") {
  const Instance x{1, 2, 3}, z{9, 9, 9};
  CHECK(jshap::tau(x, z, Coalition::full(3)) == x);
  CHECK(jshap::tau(x, z, Coalition::empty(3)) == z);
  CHECK(jshap::tau(x, z, C3({0, 2})) == Instance{1, 9, 3});
  CHECK_THROWS(jshap::tau(x, {1, 2}, Coalition::full(3)));
  CHECK_THROWS(jshap::tau(x, z, Coalition::full(2)));
}

TEST_CASE("dataset loading and validation") {
  const std::string path = testsupport::temp_path("data.csv");
  {
    std::ofstream out(path);
    out << "a,b\n1,0\n0.5,1\n";
  }
  const Dataset d = jshap::load_dataset_csv(path);
  CHECK(d.n_features() == 2);
  CHECK(d.rows.size() == 2);
  CHECK(!d.is_binary());
  std::remove(path.c_str());
  {
    std::ofstream out(path);
    out << "a,b\n1,0\n1\n";
  }
  CHECK_THROWS(jshap::load_dataset_csv(path));  // ragged
  std::remove(path.c_str());
  CHECK_THROWS(jshap::load_dataset_csv("/nonexistent.csv"));
}

TEST_CASE("value function basics") {
  const auto data = binary_cube_dataset(3);

  SUBCASE("v_x(empty) is exactly zero for any model") {
    for (const auto& spec : {"builtin:select:0", "builtin:sum:0,1", "builtin:product:0,1"}) {
      jshap::ValueFunction vf(jshap::parse_model_spec(spec), data, {1, 1, 0},
                              jshap::ValueFunction::Mode::exact_over_dataset);
      CHECK(vf.value(Coalition::empty(3)) == 0.0);
    }
  }

  SUBCASE("constant models induce the null game") {
    jshap::ValueFunction vf(jshap::models::constant(Rational(5)), data, {1, 0, 1},
                            jshap::ValueFunction::Mode::exact_over_dataset);
    for (std::uint64_t m = 0; m < 8; ++m)
      CHECK(vf.value(Coalition::from_bits(3, m)) == 0.0);
  }

  SUBCASE("select over the enumerated cube: v_x({0}) = 1 - mean z_1 = 1/2") {
    jshap::ValueFunction vf(jshap::models::select(0), data, {1, 0, 0},
                            jshap::ValueFunction::Mode::exact_over_dataset);
    CHECK(vf.value(C3({0})) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(vf.mean_prediction() == doctest::Approx(0.5));
  }

  SUBCASE("instance length must match the dataset") {
    CHECK_THROWS(jshap::ValueFunction(jshap::models::select(0), data, {1, 0},
                                      jshap::ValueFunction::Mode::exact_over_dataset));
  }
}

TEST_CASE("local joint Shapley values over a value function") {
  const auto data = binary_cube_dataset(3);

  SUBCASE("local efficiency: values sum to f(x) - mean f") {
    const auto model = jshap::parse_model_spec("builtin:product:0,1");
    for (int k = 1; k <= 3; ++k) {
      const auto local = jshap::local_joint_shapley(model, data, {1, 1, 0}, k,
                                                    /*sampled=*/false, jshap::SamplerConfig{});
      double total = 0;
      for (double v : local.values) total += v;
      jshap::ValueFunction vf(model, data, {1, 1, 0},
                              jshap::ValueFunction::Mode::exact_over_dataset);
      const double expected = model->predict({1, 1, 0}) - vf.mean_prediction();
      CHECK(total == doctest::Approx(expected).epsilon(1e-9));
    }
  }

  SUBCASE("features the model never reads get exactly zero") {
    const auto local =
        jshap::local_joint_shapley(jshap::models::select(0), data, {1, 0, 1}, 3,
                                   /*sampled=*/false, jshap::SamplerConfig{});
    for (std::size_t i = 0; i < local.size(); ++i)
      if (!local.coalitions[i].contains(0)) CHECK(local.values[i] == 0.0);
  }

  SUBCASE("sampled locals approach the exact ones") {
    const auto model = jshap::parse_model_spec("builtin:sum:0,1");
    const auto exact = jshap::local_joint_shapley(model, data, {1, 1, 1}, 2,
                                                  /*sampled=*/false, jshap::SamplerConfig{});
    jshap::SamplerConfig cfg;
    cfg.iterations = 40000;
    cfg.seed = 77;
    const auto sampled =
        jshap::local_joint_shapley(model, data, {1, 1, 1}, 2, /*sampled=*/true, cfg);
    for (std::size_t i = 0; i < sampled.size(); ++i)
      CHECK(std::fabs(sampled.values[i] - exact.at(sampled.coalitions[i])) < 0.02);
  }
}

TEST_CASE("mean-absolute global aggregation") {
  const auto data = binary_cube_dataset(2);
  const auto model = jshap::parse_model_spec("builtin:select:0");
  const auto l0 = jshap::local_joint_shapley(model, data, {0, 0}, 2, false, {});
  const auto l1 = jshap::local_joint_shapley(model, data, {1, 0}, 2, false, {});

  SUBCASE("a single local reports its absolute values") {
    const auto rep = jshap::global_mean_abs({l0}, data->feature_names);
    for (std::size_t i = 0; i < rep.coalitions.size(); ++i)
      CHECK(rep.mean_abs[i] == std::fabs(l0.values[i]));
  }

  SUBCASE("opposite locals average to the common magnitude") {
    // x=0 and x=1 sit symmetrically around the cube mean, so their locals
    // are negatives of each other and the mean of absolutes is |either|.
    const auto rep = jshap::global_mean_abs({l0, l1}, data->feature_names);
    for (std::size_t i = 0; i < rep.coalitions.size(); ++i) {
      CHECK(l0.values[i] == doctest::Approx(-l1.values[i]));
      CHECK(rep.mean_abs[i] == doctest::Approx(std::fabs(l0.values[i])));
    }
  }

  SUBCASE("empty input is an error") {
    CHECK_THROWS(jshap::global_mean_abs({}));
  }

  SUBCASE("mismatched locals are an error") {
    const auto other = jshap::local_joint_shapley(model, data, {1, 0}, 1, false, {});
    CHECK_THROWS(jshap::global_mean_abs({l0, other}));
  }
}

TEST_CASE("presence-adjusted global requires binary data") {
  const auto data = uniform_dataset(3, 5, 1);
  CHECK_THROWS_WITH_AS(
      jshap::presence_adjusted_global(jshap::models::select(0), data, 2),
      doctest::Contains("binary"), std::invalid_argument);
}

TEST_CASE("presence-adjusted global with sampled locals tracks the exact one") {
  const auto data = binary_cube_dataset(3);
  const auto model = jshap::models::sum(0, 1);
  const auto exact = jshap::presence_adjusted_global(model, data, 2);
  jshap::SamplerConfig cfg;
  cfg.iterations = 30000;
  cfg.seed = 8;
  const auto sampled = jshap::presence_adjusted_global(model, data, 2, &cfg);
  REQUIRE(exact.coalitions.size() == sampled.coalitions.size());
  for (std::size_t i = 0; i < exact.coalitions.size(); ++i)
    CHECK(std::fabs(exact.presence_adjusted[i] - sampled.presence_adjusted[i]) < 0.02);
}

TEST_CASE("model failures name the offending dataset row") {
  // A table model that only knows half the cube: splicing reaches a row it
  // cannot price, and the error identifies the baseline by index.
  const std::string path = testsupport::temp_path("partial_table.csv");
  {
    std::ofstream out(path);
    out << "a,b,p\n0,0,0\n0,1,1\n";
  }
  const auto model = jshap::table_model(path);
  auto data = std::make_shared<Dataset>();
  data->feature_names = {"a", "b"};
  data->rows = {{0, 0}, {0, 1}};
  jshap::ValueFunction vf(model, data, {1, 0}, jshap::ValueFunction::Mode::exact_over_dataset);
  CHECK_THROWS_WITH_AS(vf.value(Coalition::from_agents(2, {0})),
                       doctest::Contains("baseline row"), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("exact cube reproduction of the Bernoulli closed forms") {
  const std::vector<std::string> names{"x1", "x2", "x3"};

  SUBCASE("f(x) = x1") {
    const auto rep = jshap::presence_adjusted_cube_exact(jshap::models::select(0), names, 3);
    auto at = [&](std::initializer_list<int> t) {
      for (std::size_t i = 0; i < rep.coalitions.size(); ++i)
        if (rep.coalitions[i] == Coalition::from_agents(3, t)) return rep.presence_adjusted_rat[i];
      throw std::logic_error("coalition not found");
    };
    CHECK(at({0}) == Rational(5, 21));
    CHECK(at({1}) == Rational(0));
    CHECK(at({2}) == Rational(0));
    CHECK(at({0, 1}) == Rational(1, 21));
    CHECK(at({0, 2}) == Rational(1, 21));
    CHECK(at({1, 2}) == Rational(0));
    CHECK(at({0, 1, 2}) == Rational(1, 56));
  }

  SUBCASE("empirical route over the full-cube dataset matches the exact one") {
    const auto exact =
        jshap::presence_adjusted_cube_exact(jshap::parse_model_spec("builtin:product:0,1"),
                                            names, 3);
    const auto emp = jshap::presence_adjusted_global(
        jshap::parse_model_spec("builtin:product:0,1"), binary_cube_dataset(3), 3);
    REQUIRE(exact.coalitions.size() == emp.coalitions.size());
    for (std::size_t i = 0; i < exact.coalitions.size(); ++i) {
      CHECK(exact.coalitions[i] == emp.coalitions[i]);
      CHECK(emp.presence_adjusted[i] ==
            doctest::Approx(exact.presence_adjusted_rat[i].to_double()).epsilon(1e-12));
      CHECK(emp.presence_counts[i] == exact.presence_counts[i]);
    }
  }

  SUBCASE("presence counts over the cube") {
    const auto rep = jshap::presence_adjusted_cube_exact(jshap::models::select(0), names, 2);
    for (std::size_t i = 0; i < rep.coalitions.size(); ++i)
      CHECK(rep.presence_counts[i] ==
            (std::uint64_t{1} << (3 - rep.coalitions[i].size())));
  }
}

TEST_CASE("additive decomposition test") {
  SUBCASE("f(x) = x1 is additive: residual exactly zero, predicted 5/21") {
    const auto rep = jshap::additive_decomposition_check(jshap::models::select(0), 3, 0, 3);
    CHECK(rep.accept);
    CHECK(rep.delta_constant);
    CHECK(rep.residual == Rational(0));
    CHECK(rep.predicted == Rational(5, 21));
    CHECK(rep.measured == Rational(5, 21));
  }

  SUBCASE("f(x) = x1 + x2 is additive in x1") {
    const auto rep = jshap::additive_decomposition_check(jshap::models::sum(0, 1), 3, 0, 3);
    CHECK(rep.accept);
    CHECK(rep.measured == Rational(5, 21));
  }

  SUBCASE("f(x) = 2 x1 scales the prediction linearly") {
    const auto model = jshap::models::linear({Rational(2), Rational(0), Rational(0)});
    const auto rep = jshap::additive_decomposition_check(model, 3, 0, 3);
    CHECK(rep.accept);
    CHECK(rep.predicted == Rational(10, 21));
    CHECK(rep.measured == Rational(10, 21));
  }

  SUBCASE("f(x) = x1 x2 is rejected with residual 5/42") {
    const auto rep = jshap::additive_decomposition_check(jshap::models::product(0, 1), 3, 0, 3);
    CHECK(!rep.accept);
    CHECK(!rep.delta_constant);
    CHECK(rep.residual == Rational(5, 42));
    CHECK(rep.residual >= Rational(1, 42));
    CHECK(rep.measured == Rational(5, 42));
  }

  SUBCASE("argument validation") {
    CHECK_THROWS(jshap::additive_decomposition_check(jshap::models::select(0), 13, 0, 13));
    CHECK_THROWS(jshap::additive_decomposition_check(jshap::models::select(0), 3, 3, 3));
  }
}

TEST_CASE("value-function game guards") {
  const auto data = binary_cube_dataset(2);
  const auto g = jshap::value_function_game(jshap::models::select(0), data, {1, 0});
  CHECK(g.kind() == jshap::GameKind::numeric);
  CHECK(g.eval(Coalition::empty(2)) == 0.0);
  auto empty = std::make_shared<Dataset>();
  empty->feature_names = {"a"};
  CHECK_THROWS(jshap::value_function_game(jshap::models::select(0), empty, {1}));
}

TEST_SUITE_END();

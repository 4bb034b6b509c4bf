#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <fstream>

#include "jshap/model.hpp"
#include "jshap/rng.hpp"
#include "support.hpp"

using jshap::ModelPtr;
using jshap::Rational;

namespace {

std::string mock_cmd(const std::string& mode) {
  return std::string(JSHAP_MOCK_MODEL_PATH) + " " + mode;
}

double pred(const ModelPtr& m, const std::vector<double>& x) { return m->predict(x); }

Rational pred_exact(const ModelPtr& m, const std::vector<Rational>& x) {
  return m->predict_exact(x);
}

}  // namespace

TEST_SUITE_BEGIN("model-bridge");

TEST_CASE("builtin models evaluate analytically") {
  const std::vector<double> a{1, 0, 1};
  CHECK(jshap::models::select(0)->predict(a) == 1.0);
  const std::vector<double> b{0.3, 0.4, 9.0};
  CHECK(jshap::models::sum(0, 1)->predict(b) == doctest::Approx(0.7));
  CHECK(pred(jshap::models::product(0, 1), {1, 1, 0}) == 1.0);
  CHECK(pred(jshap::models::diff(0, 1), {5, 2}) == 3.0);
  CHECK(jshap::models::constant(Rational(7, 2))->predict({1.0}) == 3.5);
  const auto lin = jshap::models::linear({Rational(1, 2), Rational(-1, 3)});
  CHECK(pred(lin, {2, 3}) == doctest::Approx(0.0));
  CHECK(pred_exact(lin, {Rational(2), Rational(3)}) == Rational(0));
  CHECK(pred_exact(lin, {Rational(1), Rational(1)}) == Rational(1, 6));
  CHECK(jshap::models::select(2)->n_features() == 3);
  CHECK_THROWS(jshap::models::select(0)->predict(std::vector<double>{}));
  CHECK_THROWS(jshap::models::select(-1));
}

TEST_CASE("builtin spec parsing") {
  CHECK(pred(jshap::parse_model_spec("builtin:sum:0,1"), {2, 3, 4}) == 5.0);
  CHECK(pred(jshap::parse_model_spec("builtin:constant:1/4"), {0}) == 0.25);
  CHECK(pred(jshap::parse_model_spec("builtin:linear:0.5,0.25"), {1, 1}) == 0.75);
  CHECK_THROWS(jshap::parse_model_spec("builtin:nope:1"));
  CHECK_THROWS(jshap::parse_model_spec("builtin:sum:0"));
  CHECK_THROWS(jshap::parse_model_spec("whatever"));
}

TEST_CASE("table model") {
  const std::string path = testsupport::temp_path("table.csv");
  {
    std::ofstream out(path);
    out << "x1,x2,x3,prediction\n";
    for (int z = 0; z < 8; ++z)
      out << (z & 1) << "," << ((z >> 1) & 1) << "," << ((z >> 2) & 1) << "," << (z & 1)
          << "\n";
  }
  const ModelPtr table = jshap::table_model(path);
  const ModelPtr ref = jshap::models::select(0);
  CHECK(table->n_features() == 3);
  for (int z = 0; z < 8; ++z) {
    const std::vector<double> inst{static_cast<double>(z & 1), static_cast<double>((z >> 1) & 1),
                                   static_cast<double>((z >> 2) & 1)};
    CHECK(pred(table, inst) == pred(ref, inst));
  }
  // Missing instance names the query.
  CHECK_THROWS_WITH_AS(pred(table, {0.5, 0, 0}), doctest::Contains("0.5"),
                       std::runtime_error);
  std::remove(path.c_str());

  SUBCASE("conflicting duplicates fail to load, agreeing ones are fine") {
    const std::string dup = testsupport::temp_path("table_dup.csv");
    {
      std::ofstream out(dup);
      out << "a,b,p\n0,0,1\n0,0,2\n";
    }
    CHECK_THROWS(jshap::table_model(dup));
    {
      std::ofstream out(dup);
      out << "a,b,p\n0,0,1\n0,0,1\n1,0,3\n";
    }
    const ModelPtr m = jshap::table_model(dup);
    CHECK(pred(m, {1, 0}) == 3.0);
    std::remove(dup.c_str());
  }
}

TEST_CASE("external model protocol") {
  SUBCASE("echo model matches the builtin on random instances") {
    const ModelPtr ext = jshap::external_model(mock_cmd("select0"));
    const ModelPtr ref = jshap::models::select(0);
    jshap::Xoshiro256ss rng(123);
    for (int trial = 0; trial < 100; ++trial) {
      const std::vector<double> inst{rng.unit() * 10 - 5, rng.unit(), rng.unit()};
      CHECK(pred(ext, inst) == pred(ref, inst));
    }
  }

  SUBCASE("doubles survive the wire at full precision") {
    const ModelPtr ext = jshap::external_model(mock_cmd("select0"));
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 1.7976931348623157e308, -0.0, 12345.6789012345678}) {
      CHECK(pred(ext, {v, 0.0}) == v);
    }
  }

  SUBCASE("batched predictions pipeline and match ids out of order") {
    const ModelPtr ext = jshap::external_model(mock_cmd("reverse2"));
    std::vector<std::vector<double>> instances;
    for (int i = 0; i < 6; ++i) instances.push_back({static_cast<double>(i), 0.0});
    std::vector<double> out(instances.size());
    ext->predict_batch(instances, out);
    for (int i = 0; i < 6; ++i) CHECK(out[static_cast<std::size_t>(i)] == i);
  }

  SUBCASE("responses with unknown ids are a protocol error") {
    const ModelPtr ext = jshap::external_model(mock_cmd("bad-id"));
    CHECK_THROWS_WITH_AS(pred(ext, {1.0}), doctest::Contains("unknown id"),
                         std::runtime_error);
  }

  SUBCASE("slow models hit the configured timeout") {
    const ModelPtr ext =
        jshap::external_model(mock_cmd("slow"), std::chrono::milliseconds(150));
    CHECK_THROWS_WITH_AS(pred(ext, {1.0}), doctest::Contains("timeout"), std::runtime_error);
  }

  SUBCASE("a dead process surfaces as an error") {
    const ModelPtr ext = jshap::external_model("exit 0");
    CHECK_THROWS(pred(ext, {1.0}));
  }

  SUBCASE("serialized by default") {
    const ModelPtr ext = jshap::external_model(mock_cmd("select0"));
    CHECK(!ext->parallel_safe());
  }
}

TEST_SUITE_END();

#include <doctest.h>

#include "dissdoi/errors.hpp"
#include "dissdoi/io.hpp"
#include "dissdoi/random.hpp"
#include "dissdoi/sample.hpp"

using namespace dissdoi;

TEST_CASE("matrix round trip") {
  const ComplexMatrix a = Rng(3).gaussian(4);
  CHECK(matrix_from_json(to_json(a)) == a);
  CHECK(matrix_from_json(Json::parse(to_json(a).dump())) == a);
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"({"dim": 2, "entries": [[[1,0]]]})")), ParseError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"({"entries": []})")), ParseError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"({"dim": 1, "entries": [[[1]]]})")), ParseError);
}

TEST_CASE("instance round trip") {
  const auto g = gen_pair(3, 4);
  const auto inst = instance_from_json(Json::parse(to_json(g).dump()));
  CHECK(inst.first.first().matrix() == g.first.first().matrix());
  CHECK(inst.second.second().matrix() == g.second.second().matrix());
  CHECK(inst.seed == 3);
  CHECK(inst.style == "normal");
  // A non-dissipative entry is rejected.
  Json bad = to_json(g);
  bad["L1"] = to_json(ComplexMatrix::Identity(4, 4) * Complex(0, -1));
  CHECK_THROWS_AS(instance_from_json(bad), NotDissipative);
}

TEST_CASE("function round trip") {
  Rng rng(5);
  const auto f1 = random_expsum_1d(rng, 2.0);
  const auto back1 = std::get<ExpSum1D>(function_from_json(Json::parse(to_json(f1).dump())));
  CHECK(back1.sigma() == f1.sigma());
  REQUIRE(back1.terms().size() == f1.terms().size());
  for (std::size_t k = 0; k < f1.terms().size(); ++k) {
    CHECK(back1.terms()[k].freq == f1.terms()[k].freq);
    CHECK(back1.terms()[k].coeff == f1.terms()[k].coeff);
  }
  const auto f2 = random_expsum_2d(rng, 2.0);
  const auto back2 = std::get<ExpSum2D>(function_from_json(to_json(f2)));
  CHECK(back2.value(0.3, 0.4) == f2.value(0.3, 0.4));
  CHECK_THROWS_AS(function_from_json(Json::parse(R"({"sigma": 1, "dims": 3, "terms": []})")), ParseError);
  CHECK_THROWS_AS(function_from_json(Json::parse(R"({"sigma": 1, "dims": 1, "terms": [{"freq": [0.5]}]})")),
                  ParseError);
}

TEST_CASE("missing file") { CHECK_THROWS_AS(read_json_file("/nonexistent/file.json"), ParseError); }

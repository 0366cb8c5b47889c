#include "doctest.h"

#include "kanqft/error.hpp"
#include "kanqft/kan.hpp"
#include "kanqft/model.hpp"

using namespace kanqft;

TEST_CASE("every bundled fixture validates and round-trips") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    ModelSpec spec = fixture(name);
    Model m = validate_model(spec);
    Json j = model_to_json(spec);
    ModelSpec again = parse_model_json(j);
    CHECK(model_to_json(again) == j);
    CHECK(validate_model(again).str_category->num_morphisms() == m.str_category->num_morphisms());
  }
}

TEST_CASE("bz2-matrix has a 2-dimensional diagonal U") {
  Model m = validate_model(fixture("bz2-matrix"));
  FiberedModel fm = fibered(m);
  auto U = kan_functor(fm, m.A);
  REQUIRE(U.objects.size() == 1);
  CHECK(U.objects[0].dim() == 2);
}

TEST_CASE("nonflabby: U(f) kills the T slot") {
  Model m = validate_model(fixture("nonflabby"));
  FiberedModel fm = fibered(m);
  auto U = kan_functor(fm, m.A);
  ObjectId M1 = m.loc_category->object("M1");
  CHECK(U.objects[M1].dim() == 2);
  MorphismId f = m.loc_category->morphism("f");
  CHECK(U.morphisms[f].rows() == 1);
  CHECK(rank(U.morphisms[f]) == 1);
  auto flab = classify_flabbiness(fm, m.loc);
  CHECK_FALSE(flab.flabby.value);
}

TEST_CASE("schema errors carry a JSON path") {
  Json j = model_to_json(fixture("nonflabby"));
  j["str"]["morphisms"][3]["source"] = "nowhere";
  try {
    parse_model_json(j);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/str/morphisms/3/source") != std::string::npos);
  }
  j = model_to_json(fixture("nonflabby"));
  j["algebras"]["S"]["unit"][0] = "1/0";
  CHECK_THROWS_AS(parse_model_json(j), Error);
  j = model_to_json(fixture("nonflabby"));
  j["algebras"]["S"]["unit"][0] = 1.5;
  CHECK_THROWS_AS(parse_model_json(j), Error);
}

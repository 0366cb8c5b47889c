#include "doctest.h"

#include "kanqft/kan.hpp"
#include "kanqft/model.hpp"

using namespace kanqft;

namespace {

struct Built {
  Model m;
  FiberedModel fm;
  FiberedModel reversed;
  KanFunctorData U;
};

Built build(const std::string& name) {
  Model m = validate_model(fixture(name));
  FiberedModel fm = fibered(m);
  FiberedModel rev = fibered(m, TieBreak::Greatest);
  KanFunctorData U = kan_functor(fm, m.A);
  return {std::move(m), std::move(fm), std::move(rev), std::move(U)};
}

}  // namespace

TEST_CASE("kan structure on every fixture") {
  for (const auto& name : fixture_names()) {
    Built b = build(name);
    for (const auto& f : check_kan_structure(b.fm, b.reversed, b.m.A, b.U)) {
      CAPTURE(name);
      CAPTURE(f.name);
      CAPTURE(f.detail);
      CHECK(f.holds);
    }
  }
}

TEST_CASE("isotony against flabbiness") {
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    Built b = build(name);
    auto flab = classify_flabbiness(b.fm, b.m.loc);
    auto axioms = check_axioms_on_str(b.fm, b.m.loc, b.m.A);
    auto r = check_u_axioms(b.fm, b.m.loc, b.m.A, b.U, flab, axioms);
    CAPTURE(r.isotony.detail);
    CAPTURE(r.causality.detail);
    CHECK(r.biconditional_consistent);
    CHECK(r.unit_nonzero.holds);
    CHECK(r.time_slice.holds);
    if (name == "nonflabby") {
      CHECK_FALSE(r.flabby);
      CHECK_FALSE(r.isotony.holds);
    } else {
      CHECK(r.flabby);
      CHECK(r.isotony.holds);
    }
    if (name == "disjoint-wedge-prime") CHECK_FALSE(axioms.causality.holds);
    else CHECK(r.causality.holds);
  }
}

TEST_CASE("cauchy-z2: U(f) is invertible") {
  Built b = build("cauchy-z2");
  MorphismId f = b.m.loc_category->morphism("f");
  CHECK(is_invertible(b.U.morphisms[f]));
  CHECK(b.U.objects[0].dim() == 2);
}

TEST_CASE("bz2-matrix counit is the diagonal inclusion") {
  Built b = build("bz2-matrix");
  QMatrix e = counit(b.fm, b.U.objects[0], 0);
  CHECK(e.rows() == 4);
  CHECK(e.cols() == 2);
  Vector one = b.U.objects[0].algebra.unit();
  Vector img = e.apply(one);
  CHECK(img == b.m.A.algebra(0).unit());
}

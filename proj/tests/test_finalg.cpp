#include <random>

#include "doctest.h"

#include "kanqft/error.hpp"
#include "kanqft/finalg.hpp"
#include "kanqft/model.hpp"

using namespace kanqft;

namespace {

Vector V(std::initializer_list<int> xs) {
  Vector v;
  for (int x : xs) v.emplace_back(x);
  return v;
}

using Mat2 = std::array<std::array<Rational, 2>, 2>;

Mat2 unpack(const Vector& v) { return {{{v[0], v[1]}, {v[2], v[3]}}}; }

Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

Vector random_vector(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-4, 4);
  Vector v;
  for (std::size_t i = 0; i < n; ++i) v.emplace_back(d(rng));
  return v;
}

std::shared_ptr<const FinAlgebra> share(FinAlgebra a) {
  return std::make_shared<const FinAlgebra>(std::move(a));
}

struct Loaded {
  Model m;
  FiberedModel fm;
};

Loaded load(const std::string& name) {
  Model m = validate_model(fixture(name));
  FiberedModel fm = fibered(m);
  return {std::move(m), std::move(fm)};
}

}  // namespace

TEST_CASE("validate_algebra") {
  CHECK(validate_algebra(rationals()).dim() == 1);

  // every product of matrix units against explicit 2x2 multiplication
  FinAlgebra m2 = validate_algebra(matrix_algebra(2));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      Vector e = m2.basis_product(i, j);
      CHECK(unpack(e) == mul(unpack(m2.basis_vector(i)), unpack(m2.basis_vector(j))));
    }
  CHECK(m2.unit() == V({1, 0, 0, 1}));

  CHECK_THROWS_WITH_AS(validate_algebra(FinAlgebra(1, {Rational(1)}, V({0}))),
                       doctest::Contains("unit"), ValidationError);
  CHECK_THROWS_AS(validate_algebra(FinAlgebra(1, {Rational(2)}, V({1}))), ValidationError);

  std::vector<Rational> c(27, Rational(0));
  auto at = [&](int i, int j, int k) -> Rational& { return c[(i * 3 + j) * 3 + k]; };
  for (int x = 0; x < 3; ++x) at(0, x, x) = at(x, 0, x) = 1;
  at(1, 1, 1) = 1;
  at(1, 1, 2) = 1;
  at(1, 2, 2) = 1;
  // (e1 e1) e1 = e1 e1 + e2 e1 = e1 + e2, e1 (e1 e1) = e1 e1 + e1 e2 = e1 + 2 e2
  CHECK_THROWS_WITH_AS(validate_algebra(FinAlgebra(3, c, V({1, 0, 0}))),
                       doctest::Contains("associat"), ValidationError);
}

TEST_CASE("validate_qft") {
  FinCategory z2 = validate_category(z2_group());
  QftFunctor A;
  A.on_objects = {share(matrix_algebra(2))};
  A.on_morphisms = {QMatrix::identity(4), ad_diag_sign()};
  CHECK(ad_diag_sign() * ad_diag_sign() == QMatrix::identity(4));
  CHECK_NOTHROW(validate_qft(z2, A));

  // (a, b) -> (a, a) is a unital algebra map whose square is not the identity
  QftFunctor B;
  B.on_objects = {share(product_algebra({rationals(), rationals()}))};
  B.on_morphisms = {QMatrix::identity(2), QMatrix::from_dense({V({1, 0}), V({1, 0})})};
  CHECK(check_alg_morphism(*B.on_objects[0], *B.on_objects[0], B.on_morphisms[1]).empty());
  CHECK_THROWS_WITH_AS(validate_qft(z2, B), doctest::Contains("g"), ValidationError);

  QftFunctor C;
  C.on_objects = {share(rationals())};
  C.on_morphisms = {QMatrix::identity(1), QMatrix::identity(1)};
  CHECK_NOTHROW(validate_qft(z2, C));

  // not unital
  CHECK_FALSE(check_alg_morphism(rationals(), rationals(), QMatrix(1, 1)).empty());
}

TEST_CASE("commutator") {
  FinAlgebra m2 = matrix_algebra(2);
  Vector e11 = m2.basis_vector(0), e12 = m2.basis_vector(1);
  CHECK(commutator(m2, e11, e12) == e12);
  CHECK(is_zero(commutator(m2, e12, e12)));
  std::mt19937 rng(3);
  FinAlgebra q2 = product_algebra({rationals(), rationals()});
  for (int t = 0; t < 20; ++t) {
    Vector x = random_vector(rng, 4);
    CHECK(is_zero(commutator(m2, x, x)));
    CHECK(is_zero(commutator(q2, random_vector(rng, 2), random_vector(rng, 2))));
  }
}

TEST_CASE("products of algebras commute componentwise") {
  FinAlgebra m2 = matrix_algebra(2), q = rationals();
  FinAlgebra p = validate_algebra(product_algebra({m2, q, m2}));
  CHECK(p.dim() == 9);
  std::mt19937 rng(11);
  for (int t = 0; t < 30; ++t) {
    Vector x = random_vector(rng, 9), y = random_vector(rng, 9);
    Vector c = commutator(p, x, y);
    Vector xy = p.multiply(x, y);
    Vector c0 = commutator(m2, Vector(x.begin(), x.begin() + 4), Vector(y.begin(), y.begin() + 4));
    Vector c2 = commutator(m2, Vector(x.begin() + 5, x.end()), Vector(y.begin() + 5, y.end()));
    CHECK(Vector(c.begin(), c.begin() + 4) == c0);
    CHECK(c[4] == 0);
    CHECK(Vector(c.begin() + 5, c.end()) == c2);
    CHECK(xy[4] == x[4] * y[4]);
  }
}

TEST_CASE("is_mono") {
  CHECK(is_mono(QMatrix::identity(3)));
  QMatrix first = QMatrix::from_dense({V({1, 0})});
  CHECK_FALSE(is_mono(first));
  CHECK(kernel_basis(first).vector(0) == V({0, 1}));
  QMatrix embed = QMatrix::from_dense({V({1}), V({0}), V({0}), V({1})});
  CHECK(check_alg_morphism(rationals(), matrix_algebra(2), embed).empty());
  CHECK(is_mono(embed));

  // against injectivity on a small integer grid
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> d(-1, 1);
  for (int t = 0; t < 40; ++t) {
    QMatrix m(2, 3);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 3; ++j) m.set(i, j, d(rng));
    QMatrix tall = m.transpose();  // 3 x 2, sometimes injective
    bool injective = true;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b)
        if ((a || b) && is_zero(tall.apply(V({a, b})))) injective = false;
    CHECK(is_mono(tall) == injective);
    CHECK_FALSE(is_mono(m));
  }
}

TEST_CASE("check_axioms_on_str") {
  Loaded a = load("bz2-matrix");
  StrAxiomReport r = check_axioms_on_str(a.fm, a.m.loc, a.m.A);
  CHECK(r.unit_nonzero.holds);
  CHECK(r.isotony.holds);
  CHECK(r.causality.holds);
  CHECK(r.time_slice.holds);

  Loaded b = load("disjoint-wedge-prime");
  StrAxiomReport s = check_axioms_on_str(b.fm, b.m.loc, b.m.A);
  CHECK_FALSE(s.causality.holds);
  REQUIRE_FALSE(s.causality.violations.empty());
  CHECK(s.causality.violations.front().find("f1") != std::string::npos);
  Loaded w = load("disjoint-wedge");
  CHECK(check_axioms_on_str(w.fm, w.m.loc, w.m.A).causality.holds);

  Loaded d = load("cauchy-z2");
  CHECK(check_axioms_on_str(d.fm, d.m.loc, d.m.A).time_slice.holds);
  QMatrix af = d.m.A.map(d.m.str_category->morphism("(f,e)"));
  CHECK(af == QMatrix::identity(4));
  CHECK(is_invertible(af));
  CHECK(inverse(ad_diag_sign()) == ad_diag_sign());
}

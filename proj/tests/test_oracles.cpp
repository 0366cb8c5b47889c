// Brute-force cross-checks that share no code with the cochain builders.
#include <array>
#include <random>

#include "doctest.h"

#include "kanqft/hokan.hpp"
#include "kanqft/model.hpp"
#include "z2_bar_oracle.hpp"

using namespace kanqft;
using namespace z2_oracle;

namespace {

using Mat2 = std::array<std::array<Rational, 2>, 2>;

Mat2 unpack(const Vector& v, std::size_t at = 0) {
  return {{{v[at], v[at + 1]}, {v[at + 2], v[at + 3]}}};
}

Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

Mat2 conj(const Mat2& a, int times) {
  Mat2 c = a;
  if (times % 2) c[0][1] = -c[0][1], c[1][0] = -c[1][0];
  return c;
}

Vector random_vector(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-3, 3);
  Vector v;
  for (std::size_t i = 0; i < n; ++i) v.emplace_back(d(rng));
  return v;
}

struct Fx {
  Model m;
  FiberedModel fm;
};

Fx load(const std::string& name) {
  Model m = validate_model(fixture(name));
  FiberedModel fm = fibered(m);
  return {std::move(m), std::move(fm)};
}

constexpr int N = 4;

}  // namespace

TEST_CASE("bareiss rank agrees with small hand examples") {
  CHECK(bareiss_rank({{1, 2}, {2, 4}}) == 1);
  CHECK(bareiss_rank({{0, 1, 0}, {0, 0, 1}, {0, 1, 1}}) == 2);
  CHECK(bareiss_rank({{2, 0}, {0, 3}}) == 2);
}

TEST_CASE("unnormalized Z2 bar complex is a complex with the cohomology of hoU(bz2-matrix)") {
  for (int n = 0; n + 1 < 5; ++n) {
    IntMatrix a = bar_differential(n), b = bar_differential(n + 1);
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < a[0].size(); ++j) {
        mpz_class s = 0;
        for (std::size_t k = 0; k < a.size(); ++k) s += b[i][k] * a[k][j];
        REQUIRE(s == 0);
      }
  }
  Fx x = load("bz2-matrix");
  HoUAlgebra u = hou_object(x.fm, x.m.A, 0, N);
  CHECK(brute_cohomology(0) == 2);
  for (int n = 0; n < N; ++n) {
    CAPTURE(n);
    CHECK(cohomology(u.complex(), n).dim == brute_cohomology(n));
  }
  CHECK(brute_cohomology(4) == 0);
}

TEST_CASE("normalized differential is the bar differential on nondegenerate tuples") {
  Fx x = load("bz2-matrix");
  HoUAlgebra u = hou_object(x.fm, x.m.A, 0, N);
  for (int n = 0; n < N; ++n) {
    CAPTURE(n);
    IntMatrix d = bar_differential(n);
    // the only nondegenerate tuple is (g, .., g)
    std::size_t from = ((std::size_t{1} << n) - 1) * 4, to = ((std::size_t{1} << (n + 1)) - 1) * 4;
    const QMatrix& dn = u.complex().d[n];
    REQUIRE(dn.rows() == 4);
    REQUIRE(dn.cols() == 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(dn.at(i, j) == Rational(d[to + i][from + j]));
  }
}

TEST_CASE("cup product on hoU(bz2-matrix) against explicit 2x2 matrices") {
  Fx x = load("bz2-matrix");
  HoUAlgebra u = hou_object(x.fm, x.m.A, 0, N);
  std::mt19937 rng(41);
  for (int p = 0; p <= N; ++p)
    for (int q = 0; p + q <= N; ++q)
      for (int t = 0; t < 5; ++t) {
        Vector a = random_vector(rng, 4), b = random_vector(rng, 4);
        // a(g^p) · A(g^p)(b(g^q)); in degree 0 the tuple is empty and A(id) acts
        Mat2 want = mul(unpack(a), conj(unpack(b), p));
        CHECK(unpack(u.dga.multiply(p, a, q, b)) == want);
      }
}

TEST_CASE("random elements: Leibniz rule, multiplicativity and homotopies") {
  std::mt19937 rng(20241016);
  for (const auto& name : fixture_names()) {
    CAPTURE(name);
    Fx x = load(name);
    const auto& L = *x.m.loc_category;
    std::vector<HoUAlgebra> u;
    for (ObjectId M = 0; M < L.num_objects(); ++M) u.push_back(hou_object(x.fm, x.m.A, M, N));

    for (ObjectId M = 0; M < L.num_objects(); ++M) {
      const TruncatedDga& A = u[M].dga;
      for (int p = 0; p < N; ++p)
        for (int q = 0; p + q < N; ++q) {
          if (!A.dim(p) || !A.dim(q)) continue;
          Vector a = random_vector(rng, A.dim(p)), b = random_vector(rng, A.dim(q));
          Vector lhs = A.complex.d[p + q].apply(A.multiply(p, a, q, b));
          Vector r1 = A.multiply(p + 1, A.complex.d[p].apply(a), q, b);
          Vector r2 = A.multiply(p, a, q + 1, A.complex.d[q].apply(b));
          CHECK(lhs == r1 + Rational(p % 2 ? -1 : 1) * r2);
        }
    }

    for (MorphismId f = 0; f < L.num_morphisms(); ++f) {
      if (L.is_identity(f)) continue;
      const auto& s = u[L.source(f)];
      const auto& t = u[L.target(f)];
      GradedLinearMap F = hou_morphism(x.fm, x.m.A, f, s, t);
      for (int p = 0; p <= N; ++p)
        for (int q = 0; p + q <= N; ++q) {
          if (!s.dga.dim(p) || !s.dga.dim(q)) continue;
          Vector a = random_vector(rng, s.dga.dim(p)), b = random_vector(rng, s.dga.dim(q));
          CHECK(F.at(p + q).apply(s.dga.multiply(p, a, q, b)) ==
                t.dga.multiply(p, F.at(p).apply(a), q, F.at(q).apply(b)));
        }
    }

    // ζκ − id = ηd + dη, evaluated pointwise
    for (ObjectId M = 0; M < L.num_objects(); ++M) {
      HoRanAlgebra r = horan_object(x.fm, x.m.A, M, N);
      GradedLinearMap zk = compose(zeta_map(x.fm, x.m.A, u[M], r), kappa_map(x.fm, r, u[M]));
      GradedLinearMap eta = eta_map(x.fm, r);
      for (int n = 0; n < N; ++n) {
        if (!r.complex().dim(n)) continue;
        Vector v = random_vector(rng, r.complex().dim(n));
        Vector lhs = zk.at(n).apply(v) - v;
        Vector rhs = eta.at(n + 1).apply(r.complex().d[n].apply(v)) +
                     r.complex().differential(n - 1).apply(eta.at(n).apply(v));
        CHECK(lhs == rhs);
      }
    }
  }
}

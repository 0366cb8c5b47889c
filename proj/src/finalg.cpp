#include "kanqft/finalg.hpp"

#include "kanqft/error.hpp"

namespace kanqft {

FinAlgebra::FinAlgebra(std::size_t dim, std::vector<Rational> constants, Vector unit)
    : dim_(dim), constants_(std::move(constants)), unit_(std::move(unit)) {
  if (constants_.size() != dim_ * dim_ * dim_)
    throw Error("finalg", "structure constants must have dim^3 entries");
  if (unit_.size() != dim_) throw Error("finalg", "unit vector must have dim entries");
}

Vector FinAlgebra::multiply(const Vector& x, const Vector& y) const {
  Vector z = zero_vector(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < dim_; ++j) {
      if (y[j] == 0) continue;
      Rational xy = x[i] * y[j];
      for (std::size_t k = 0; k < dim_; ++k)
        if (c(i, j, k) != 0) z[k] += xy * c(i, j, k);
    }
  }
  return z;
}

Vector FinAlgebra::basis_product(std::size_t i, std::size_t j) const {
  Vector z(dim_);
  for (std::size_t k = 0; k < dim_; ++k) z[k] = c(i, j, k);
  return z;
}

Vector FinAlgebra::basis_vector(std::size_t i) const {
  Vector v = zero_vector(dim_);
  v[i] = 1;
  return v;
}

FinAlgebra validate_algebra(const FinAlgebra& a, const std::string& label) {
  std::vector<std::string> issues;
  const std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        Vector lhs = a.multiply(a.basis_product(i, j), a.basis_vector(k));
        Vector rhs = a.multiply(a.basis_vector(i), a.basis_product(j, k));
        if (lhs != rhs)
          issues.push_back(label + ": non-associative triple (e" + std::to_string(i) + ", e" +
                           std::to_string(j) + ", e" + std::to_string(k) + ")");
      }
  for (std::size_t i = 0; i < n; ++i) {
    if (a.multiply(a.unit(), a.basis_vector(i)) != a.basis_vector(i))
      issues.push_back(label + ": left unit law fails on e" + std::to_string(i));
    if (a.multiply(a.basis_vector(i), a.unit()) != a.basis_vector(i))
      issues.push_back(label + ": right unit law fails on e" + std::to_string(i));
  }
  if (is_zero(a.unit())) issues.push_back(label + ": unit is zero");
  if (!issues.empty()) throw ValidationError("finalg", issues);
  return a;
}

FinAlgebra rationals() { return FinAlgebra(1, {Rational(1)}, {Rational(1)}); }

FinAlgebra matrix_algebra(std::size_t n) {
  const std::size_t d = n * n;
  std::vector<Rational> c(d * d * d, Rational(0));
  // E_ab E_cd = δ_bc E_ad
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t e = 0; e < n; ++e)
        c[((a * n + b) * d + (b * n + e)) * d + (a * n + e)] = 1;
  Vector unit = zero_vector(d);
  for (std::size_t a = 0; a < n; ++a) unit[a * n + a] = 1;
  return FinAlgebra(d, std::move(c), std::move(unit));
}

FinAlgebra product_algebra(const std::vector<FinAlgebra>& factors) {
  std::size_t d = 0;
  for (const auto& f : factors) d += f.dim();
  std::vector<Rational> c(d * d * d, Rational(0));
  Vector unit = zero_vector(d);
  std::size_t off = 0;
  for (const auto& f : factors) {
    for (std::size_t i = 0; i < f.dim(); ++i) {
      unit[off + i] = f.unit()[i];
      for (std::size_t j = 0; j < f.dim(); ++j)
        for (std::size_t k = 0; k < f.dim(); ++k)
          c[((off + i) * d + off + j) * d + off + k] = f.c(i, j, k);
    }
    off += f.dim();
  }
  return FinAlgebra(d, std::move(c), std::move(unit));
}

std::vector<std::string> check_alg_morphism(const FinAlgebra& s, const FinAlgebra& t,
                                            const QMatrix& m) {
  std::vector<std::string> issues;
  if (m.rows() != t.dim() || m.cols() != s.dim()) {
    issues.push_back("matrix shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     " does not match " + std::to_string(t.dim()) + "x" + std::to_string(s.dim()));
    return issues;
  }
  if (m.apply(s.unit()) != t.unit()) issues.push_back("unit is not preserved");
  for (std::size_t i = 0; i < s.dim(); ++i) {
    Vector mi = m.apply(s.basis_vector(i));
    for (std::size_t j = 0; j < s.dim(); ++j) {
      Vector lhs = m.apply(s.basis_product(i, j));
      Vector rhs = t.multiply(mi, m.apply(s.basis_vector(j)));
      if (lhs != rhs)
        issues.push_back("not multiplicative on (e" + std::to_string(i) + ", e" +
                         std::to_string(j) + ")");
    }
  }
  return issues;
}

void validate_qft(const FinCategory& str, const QftFunctor& A) {
  std::vector<std::string> issues;
  if (A.on_objects.size() != str.num_objects() || A.on_morphisms.size() != str.num_morphisms())
    throw Error("finalg", "QFT assignment does not cover Str");
  for (MorphismId g = 0; g < str.num_morphisms(); ++g)
    for (const auto& s : check_alg_morphism(A.algebra(str.source(g)),
                                            A.algebra(str.target(g)), A.map(g)))
      issues.push_back("A(" + str.morphism_name(g) + "): " + s);
  if (!issues.empty()) throw ValidationError("finalg", issues);
  for (ObjectId S = 0; S < str.num_objects(); ++S)
    if (A.map(str.identity(S)) != QMatrix::identity(A.algebra(S).dim()))
      issues.push_back("A(" + str.morphism_name(str.identity(S)) + ") is not the identity");
  for (MorphismId g = 0; g < str.num_morphisms(); ++g)
    for (MorphismId f = 0; f < str.num_morphisms(); ++f)
      if (auto r = str.compose(g, f))
        if (A.map(*r) != A.map(g) * A.map(f))
          issues.push_back("A(" + str.morphism_name(*r) + ") != A(" + str.morphism_name(g) +
                           ")A(" + str.morphism_name(f) + ")");
  if (!issues.empty()) throw ValidationError("finalg", issues);
}

Vector commutator(const FinAlgebra& A, const Vector& x, const Vector& y) {
  return A.multiply(x, y) - A.multiply(y, x);
}

bool is_mono(const QMatrix& m) { return kernel_basis(m).dim() == 0; }

bool is_invertible(const QMatrix& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

QMatrix inverse(const QMatrix& m) {
  if (!is_invertible(m)) throw Error("finalg", "matrix is not invertible");
  const std::size_t n = m.rows();
  QMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    SparseRow r = m.row(i);
    r.push_back({n + i, Rational(1)});
    aug.set_row(i, std::move(r));
  }
  Echelon e = rref(aug);
  QMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    SparseRow r;
    for (const auto& x : e.rows.row(i))
      if (x.col >= n) r.push_back({x.col - n, x.value});
    inv.set_row(i, std::move(r));
  }
  return inv;
}

StrAxiomReport check_axioms_on_str(const FiberedModel& fm, const LocStructure& loc,
                                   const QftFunctor& A) {
  const FinCategory& str = fm.str();
  const FinCategory& base = fm.loc();
  StrAxiomReport rep;
  auto violate = [](AxiomCheck& c, std::string s) {
    c.holds = false;
    c.violations.push_back(std::move(s));
  };
  for (ObjectId S = 0; S < str.num_objects(); ++S)
    if (is_zero(A.algebra(S).unit())) violate(rep.unit_nonzero, "A(" + str.object_name(S) + ") has 1 = 0");
  for (MorphismId g = 0; g < str.num_morphisms(); ++g)
    if (!is_mono(A.map(g)))
      violate(rep.isotony, "A(" + str.morphism_name(g) + ") is not injective");
  for (const auto& [f1, f2] : loc.causal_cospans) {
    for (MorphismId g1 = 0; g1 < str.num_morphisms(); ++g1)
      for (MorphismId g2 = 0; g2 < str.num_morphisms(); ++g2) {
        if (str.target(g1) != str.target(g2)) continue;
        bool match = (fm.base_of(g1) == f1 && fm.base_of(g2) == f2) ||
                     (fm.base_of(g1) == f2 && fm.base_of(g2) == f1);
        if (!match || g1 > g2) continue;
        const FinAlgebra& T = A.algebra(str.target(g1));
        const FinAlgebra& S1 = A.algebra(str.source(g1));
        const FinAlgebra& S2 = A.algebra(str.source(g2));
        bool ok = true;
        for (std::size_t i = 0; i < S1.dim() && ok; ++i)
          for (std::size_t j = 0; j < S2.dim() && ok; ++j) {
            Vector x = A.map(g1).apply(S1.basis_vector(i));
            Vector y = A.map(g2).apply(S2.basis_vector(j));
            if (!is_zero(commutator(T, x, y))) {
              ok = false;
              violate(rep.causality, "[A(" + str.morphism_name(g1) + ")e" + std::to_string(i) +
                                         ", A(" + str.morphism_name(g2) + ")e" +
                                         std::to_string(j) + "] != 0 over the cospan (" +
                                         base.morphism_name(f1) + ", " +
                                         base.morphism_name(f2) + ")");
            }
          }
      }
  }
  for (MorphismId g = 0; g < str.num_morphisms(); ++g)
    if (loc.is_cauchy(fm.base_of(g)) && !is_invertible(A.map(g)))
      violate(rep.time_slice, "A(" + str.morphism_name(g) + ") is not invertible over the Cauchy morphism " +
                                  base.morphism_name(fm.base_of(g)));
  return rep;
}

}  // namespace kanqft

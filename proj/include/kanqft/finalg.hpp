#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kanqft/fincat.hpp"
#include "kanqft/qlinalg.hpp"

namespace kanqft {

// Finite-dimensional unital associative algebra over Q given by structure
// constants e_i e_j = Σ_k c[i][j][k] e_k.
class FinAlgebra {
 public:
  FinAlgebra() = default;
  FinAlgebra(std::size_t dim, std::vector<Rational> constants, Vector unit);

  std::size_t dim() const { return dim_; }
  const Rational& c(std::size_t i, std::size_t j, std::size_t k) const {
    return constants_[(i * dim_ + j) * dim_ + k];
  }
  const std::vector<Rational>& constants() const { return constants_; }
  const Vector& unit() const { return unit_; }

  Vector multiply(const Vector& x, const Vector& y) const;
  // e_i e_j as a coordinate vector
  Vector basis_product(std::size_t i, std::size_t j) const;
  Vector basis_vector(std::size_t i) const;

  friend bool operator==(const FinAlgebra& a, const FinAlgebra& b) {
    return a.dim_ == b.dim_ && a.constants_ == b.constants_ && a.unit_ == b.unit_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<Rational> constants_;
  Vector unit_;
};

// Checks associativity, both unit laws and 1 ≠ 0; throws ValidationError.
FinAlgebra validate_algebra(const FinAlgebra& spec, const std::string& label = "algebra");

FinAlgebra rationals();
FinAlgebra matrix_algebra(std::size_t n);  // basis E_11, E_12, …, row-major
FinAlgebra product_algebra(const std::vector<FinAlgebra>& factors);

struct AlgMorphism {
  std::shared_ptr<const FinAlgebra> source;
  std::shared_ptr<const FinAlgebra> target;
  QMatrix matrix;  // target.dim x source.dim
};

// Unitality and multiplicativity on all basis pairs; returns issues.
std::vector<std::string> check_alg_morphism(const FinAlgebra& source, const FinAlgebra& target,
                                            const QMatrix& m);

struct QftFunctor {
  std::vector<std::shared_ptr<const FinAlgebra>> on_objects;  // by Str object
  std::vector<QMatrix> on_morphisms;                          // by Str morphism

  const FinAlgebra& algebra(ObjectId S) const { return *on_objects[S]; }
  const QMatrix& map(MorphismId g) const { return on_morphisms[g]; }
};

// Functoriality against the full composition table; throws ValidationError.
void validate_qft(const FinCategory& str, const QftFunctor& A);

Vector commutator(const FinAlgebra& A, const Vector& x, const Vector& y);
bool is_mono(const QMatrix& m);
bool is_invertible(const QMatrix& m);
// Exact inverse of a square invertible matrix.
QMatrix inverse(const QMatrix& m);

struct AxiomCheck {
  bool holds = true;
  std::vector<std::string> violations;
};

struct StrAxiomReport {
  AxiomCheck unit_nonzero;
  AxiomCheck isotony;
  AxiomCheck causality;
  AxiomCheck time_slice;
};

StrAxiomReport check_axioms_on_str(const FiberedModel& fm, const LocStructure& loc,
                                   const QftFunctor& A);

}  // namespace kanqft

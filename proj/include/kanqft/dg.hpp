#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kanqft/finalg.hpp"
#include "kanqft/fincat.hpp"
#include "kanqft/qlinalg.hpp"

namespace kanqft {

// Degrees 0..max_degree, differentials d^n: n → n+1 for n < max_degree.
struct TruncatedDgVec {
  int max_degree = 0;
  std::vector<std::size_t> dims;
  std::vector<std::vector<std::string>> labels;  // per degree; may be empty
  std::vector<QMatrix> d;

  std::size_t dim(int n) const {
    return n < 0 || n > max_degree ? 0 : dims[static_cast<std::size_t>(n)];
  }
  // d^n, with d^{-1} the zero map into degree 0
  QMatrix differential(int n) const;
  std::string label(int n, std::size_t i) const;
};

// e_p · e_q for e_p in degree i and e_q in degree j, as a row in degree i+j.
using ProductFn = std::function<SparseRow(int i, std::size_t p, int j, std::size_t q)>;

struct TruncatedDga {
  TruncatedDgVec complex;
  ProductFn product;
  Vector unit;

  int max_degree() const { return complex.max_degree; }
  std::size_t dim(int n) const { return complex.dim(n); }
  Vector multiply(int i, const Vector& x, int j, const Vector& y) const;
  // dim(i+j) x (dim(i)·dim(j)); column p·dim(j)+q holds e_p e_q
  QMatrix product_matrix(int i, int j) const;
};

// A concentrated in degree 0 with zero differential.
TruncatedDga degree0_dga(const FinAlgebra& a, int N);

// Per source degree n a block into degree n + shift of the target.
struct GradedLinearMap {
  int shift = 0;
  std::vector<std::size_t> source_dims;
  std::vector<std::size_t> target_dims;
  std::vector<QMatrix> blocks;

  std::size_t source_dim(int n) const;
  std::size_t target_dim(int n) const;
  // block out of source degree n (zero block when n is out of range)
  QMatrix at(int n) const;
};

GradedLinearMap zero_map(const std::vector<std::size_t>& source,
                         const std::vector<std::size_t>& target, int shift);
GradedLinearMap identity_map(const TruncatedDgVec& v);
GradedLinearMap differential_map(const TruncatedDgVec& v);
GradedLinearMap compose(const GradedLinearMap& b, const GradedLinearMap& a);  // b∘a
GradedLinearMap operator+(const GradedLinearMap& a, const GradedLinearMap& b);
GradedLinearMap operator-(const GradedLinearMap& a, const GradedLinearMap& b);
GradedLinearMap operator*(const Rational& s, const GradedLinearMap& a);

// Outcome of one verified identity.
struct IdentityCheck {
  std::string name;
  bool holds = true;
  int lo = 0;
  int hi = -1;  // degrees lo..hi were compared
  std::string counterexample;
};

// lhs and rhs agree in source degrees lo..hi.
IdentityCheck compare_maps(const std::string& name, const GradedLinearMap& lhs,
                           const GradedLinearMap& rhs, int lo, int hi,
                           const TruncatedDgVec* source = nullptr);

// F − G = d∘H + H∘d in every degree ≤ up_to.
IdentityCheck check_homotopy_identity(const TruncatedDgVec& source, const TruncatedDgVec& target,
                                      const GradedLinearMap& F, const GradedLinearMap& G,
                                      const GradedLinearMap& H, int up_to,
                                      const std::string& name = "homotopy");

struct Cohomology {
  std::size_t dim = 0;
  std::vector<Vector> representatives;
};

Cohomology cohomology(const TruncatedDgVec& v, int n);

IdentityCheck check_cochain_map(const TruncatedDgVec& a, const TruncatedDgVec& b,
                                const GradedLinearMap& m, int up_to);
// Matrix of H^n(m) in the representative bases.
QMatrix induced_on_cohomology(const TruncatedDgVec& a, const TruncatedDgVec& b,
                              const GradedLinearMap& m, int n);
bool is_weak_equivalence(const TruncatedDgVec& a, const TruncatedDgVec& b,
                         const GradedLinearMap& m, int up_to);

// d² = 0, graded Leibniz, associativity and unit laws.
std::vector<IdentityCheck> check_structure(const TruncatedDga& A, const std::string& prefix);
// Chain map, multiplicative, unital.
std::vector<IdentityCheck> check_dga_map(const TruncatedDga& a, const TruncatedDga& b,
                                         const GradedLinearMap& m, const std::string& prefix);

struct DgDiagram {
  std::shared_ptr<const FinCategory> shape;
  std::vector<TruncatedDga> values;      // by object
  std::vector<GradedLinearMap> arrows;   // by morphism, shift 0
};

void validate_diagram(const DgDiagram& X);

struct DoubleComplex {
  int max_degree = 0;
  std::vector<std::vector<NerveTuple>> tuples;  // normalized, n = 0..N
  // X^{n,m} for n + m ≤ N: tuple blocks of size dim X(t(f1))^m
  std::vector<std::vector<std::size_t>> dims;
  std::vector<std::vector<QMatrix>> dv;  // X^{n,m} → X^{n+1,m}
  std::vector<std::vector<QMatrix>> dh;  // X^{n,m} → X^{n,m+1}
};

DoubleComplex double_complex(const DgDiagram& X, int N);
TruncatedDgVec total_complex(const DoubleComplex& D);
TruncatedDga holim_dgalg(const DgDiagram& X, int N);

struct LimDga {
  TruncatedDga dga;
  std::vector<Subspace> subspaces;  // per degree, inside Π_d X(d)^k
};

LimDga lim_dgalg(const DgDiagram& X);
GradedLinearMap canonical_e(const DgDiagram& X, const LimDga& lim, int N);

TruncatedDgVec graded_tensor(const TruncatedDgVec& a, const TruncatedDgVec& b, int N);
TruncatedDga graded_tensor_dga(const TruncatedDga& a, const TruncatedDga& b, int N);
// (F⊗G)(a⊗b) = (−1)^{|G||a|} F(a)⊗G(b), truncated at total degree N on both ends
GradedLinearMap tensor_maps(const GradedLinearMap& F, const GradedLinearMap& G, int N);

// Offsets of the (i, k−i) summands in degree k of a truncated tensor product.
struct TensorIndex {
  std::vector<std::size_t> a_dims, b_dims;
  int max_degree = 0;
  std::vector<std::vector<std::size_t>> offsets;  // offsets[k][i]
  std::vector<std::size_t> dims;

  TensorIndex(std::vector<std::size_t> a, std::vector<std::size_t> b, int N);
  std::size_t a_dim(int i) const;
  std::size_t b_dim(int j) const;
  std::size_t index(int i, std::size_t p, int j, std::size_t q) const;
};

}  // namespace kanqft

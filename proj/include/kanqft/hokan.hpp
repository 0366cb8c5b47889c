#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kanqft/dg.hpp"
#include "kanqft/finalg.hpp"
#include "kanqft/fincat.hpp"
#include "kanqft/kan.hpp"

namespace kanqft {

// Normalized cochains on a finite category D with coefficients A∘Φ for a
// functor Φ: D → Str. Degree n holds one block of size dim A(Φ(t(g1))) per
// normalized n-tuple (g1,…,gn), and one block per object in degree 0.
struct CochainLayout {
  ObjectId base = 0;  // the Loc object M
  int max_degree = 0;
  std::shared_ptr<const FinCategory> shape;
  CatFunctor to_str;
  std::vector<std::vector<NerveTuple>> tuples;         // degrees 0..N
  std::vector<std::vector<std::size_t>> offsets;       // per degree, plus the total
  std::vector<std::map<std::vector<MorphismId>, std::size_t>> index;  // degrees ≥ 1
  std::vector<std::size_t> coeff_dims;                 // by shape object
  std::vector<std::vector<MorphismId>> composite;      // Φ(g1∘…∘gn) per tuple; Φ(id) in degree 0
  std::shared_ptr<const Fiber> fiber;                  // set for hoU layouts
  std::shared_ptr<const UnderCategory> under;          // set for hoRan layouts

  std::size_t dim(int n) const { return n < 0 || n > max_degree ? 0 : offsets[n].back(); }
  std::vector<std::size_t> dims() const;
  ObjectId anchor(int n, std::size_t t) const { return tuples[n][t].object; }
  // tuple position, or nothing for degenerate or unknown tuples
  std::optional<std::size_t> find(const std::vector<MorphismId>& arrows) const;
  std::string label(int n, std::size_t t) const;
};

CochainLayout make_layout(std::shared_ptr<const FinCategory> shape, CatFunctor to_str,
                          const QftFunctor& A, ObjectId base, int N);

// Cochain dga with d(a)(g1..) = A(g1)a(g2..) + Σ(−1)^i a(..gi∘gi+1..) + (−1)^{n+1} a(g1..gn)
// and (a a')(g1..) = a(g1..gn)·A(g1∘…∘gn)(a'(gn+1..)).
struct CochainDga {
  std::shared_ptr<const CochainLayout> layout;
  TruncatedDga dga;

  int max_degree() const { return layout->max_degree; }
  const TruncatedDgVec& complex() const { return dga.complex; }
};

using HoUAlgebra = CochainDga;
using HoRanAlgebra = CochainDga;

CochainDga build_cochain_dga(std::shared_ptr<const CochainLayout> layout, const QftFunctor& A);

// C•(π⁻¹(M); A)
HoUAlgebra hou_object(const FiberedModel& fm, const QftFunctor& A, ObjectId M, int N);
// cochains on M↓π
HoRanAlgebra horan_object(const FiberedModel& fm, const QftFunctor& A, ObjectId M, int N);

// f: M → M' gives hoU(M) → hoU(M') and hoRan(M) → hoRan(M').
GradedLinearMap hou_morphism(const FiberedModel& fm, const QftFunctor& A, MorphismId f,
                             const HoUAlgebra& source, const HoUAlgebra& target);
GradedLinearMap horan_morphism(const FiberedModel& fm, MorphismId f, const HoRanAlgebra& source,
                               const HoRanAlgebra& target);

// The fiber over M as a diagram of degree-0 dgas, for the generic holim.
DgDiagram fiber_diagram(const FiberedModel& fm, const QftFunctor& A, ObjectId M, int N);

struct HomotopyWitness {
  std::string name;
  GradedLinearMap map;
  std::vector<IdentityCheck> checks;

  bool holds() const;
};

struct KappaZeta {
  HomotopyWitness kappa;  // hoRan(M) → hoU(M)
  HomotopyWitness zeta;   // hoU(M) → hoRan(M)
  HomotopyWitness eta;    // ζκ − id = ηd + dη on hoRan(M)
  bool weak_equivalence = false;
};

KappaZeta kappa_zeta(const FiberedModel& fm, const QftFunctor& A, const HoRanAlgebra& ran,
                     const HoUAlgebra& u);

GradedLinearMap kappa_map(const FiberedModel& fm, const HoRanAlgebra& ran, const HoUAlgebra& u);
GradedLinearMap zeta_map(const FiberedModel& fm, const QftFunctor& A, const HoUAlgebra& u,
                         const HoRanAlgebra& ran);
GradedLinearMap eta_map(const FiberedModel& fm, const HoRanAlgebra& ran);

struct RhoBeta {
  HomotopyWitness rho;   // ρρ = id
  HomotopyWitness beta;  // ρ − id = βd + dβ
};

GradedLinearMap rho_map(const QftFunctor& A, const HoUAlgebra& u);
GradedLinearMap beta_map(const HoUAlgebra& u);
RhoBeta rho_beta(const QftFunctor& A, const HoUAlgebra& u);

// μ and μ^op(a⊗a') = (−1)^{nn'} a'a on the truncated tensor square.
GradedLinearMap product_map(const CochainDga& u, bool opposite);

struct CausalityWitness {
  IdentityCheck rho_identity;  // ρμL = μ^op(ρ⊗ρ)L
  HomotopyWitness lambda;      // [·,·]L = λd + dλ
  std::size_t nonzero_commutators = 0;
};

CausalityWitness lambda_causality(const FiberedModel& fm, const QftFunctor& A, MorphismId f1,
                                  MorphismId f2, int N);

struct FunctorialityWitness {
  HomotopyWitness gamma2;                 // hoU(f')hoU(f) − hoU(f'f) = γ₂d + dγ₂
  std::optional<HomotopyWitness> gamma3;  // coherence, when f'' is given
};

GradedLinearMap gamma2_map(const FiberedModel& fm, const QftFunctor& A, MorphismId f,
                           MorphismId f_prime, int N);
FunctorialityWitness up_to_homotopy_functoriality(const FiberedModel& fm, const QftFunctor& A,
                                                  MorphismId f, MorphismId f_prime,
                                                  std::optional<MorphismId> f_second, int N);

struct TimeSliceWitness {
  HomotopyWitness ext_pullback;  // ext_f*: hoU(M') → hoU(M), a dga map
  HomotopyWitness phi;           // ext_f* hoU(f) − id = dφ + φd
  HomotopyWitness phibar;        // hoU(f) ext_f* − id = dφ̄ + φ̄d
  bool weak_equivalence = false; // hoU(f) directly by cohomology
  int phibar_first_index = 0;
};

// phibar_first_index is where the alternating sum in φ̄ starts (0 or 1).
TimeSliceWitness ext_pullback(const FiberedModel& fm, const LocStructure& loc,
                              const QftFunctor& A, MorphismId f, int N,
                              int phibar_first_index = 0);

struct H0Comparison {
  bool same_subspace = false;
  bool same_structure = false;
  std::size_t dim = 0;
  std::string detail;
};

H0Comparison h0_comparison(const HoUAlgebra& u, const InvariantSubalgebra& U);

// Induced maps H^n for n ≤ N−1, composed strictly.
IdentityCheck cohomology_composition(const HoUAlgebra& a, const HoUAlgebra& b,
                                     const HoUAlgebra& c, const GradedLinearMap& f,
                                     const GradedLinearMap& g, const GradedLinearMap& gf,
                                     const std::string& name);

// Graded commutators of images of cohomology classes are exact, total degree ≤ N−1.
IdentityCheck cohomology_causality(const HoUAlgebra& u1, const HoUAlgebra& u2,
                                   const HoUAlgebra& u, const GradedLinearMap& L1,
                                   const GradedLinearMap& L2, const std::string& name);

// Same induced maps on H^n, n ≤ N−1.
IdentityCheck same_on_cohomology(const TruncatedDgVec& a, const TruncatedDgVec& b,
                                 const GradedLinearMap& f, const GradedLinearMap& g,
                                 const std::string& name);

bool is_exact(const TruncatedDgVec& v, int n, const Vector& x);

}  // namespace kanqft

#pragma once

#include <map>
#include <string>
#include <vector>

#include "kanqft/finalg.hpp"
#include "kanqft/fincat.hpp"
#include "kanqft/qlinalg.hpp"

namespace kanqft {

// A subalgebra of Π_slots A(S_slot) cut out by compatibility constraints,
// together with the structure it inherits. Used both for the fiber model
// U(M) (slots = fiber objects) and for Ran(M) (slots = objects of M↓π).
struct KanAlgebra {
  ObjectId base = 0;
  std::vector<ObjectId> slot_objects;  // Str object of every slot
  std::vector<MorphismId> slot_base;   // h: M → π(S) of every slot (id_M for fibers)
  std::vector<std::string> slot_names;
  std::vector<std::size_t> offsets;    // slot blocks in the ambient product, plus the total
  Subspace subspace;
  FinAlgebra algebra;                  // structure constants in the subspace basis
  bool unit_is_zero = false;

  std::size_t ambient_dim() const { return offsets.back(); }
  std::size_t dim() const { return subspace.dim(); }
  Vector embed(const Vector& coords) const;
  Vector slot(const Vector& ambient, std::size_t s) const;
};

using InvariantSubalgebra = KanAlgebra;
using RanUnderAlgebra = KanAlgebra;

RanUnderAlgebra ran_under(const FiberedModel& fm, const QftFunctor& A, ObjectId M);
InvariantSubalgebra u_object(const FiberedModel& fm, const QftFunctor& A, ObjectId M);

// Restriction of an ambient linear map to the subspaces; throws when the
// image leaves the target subspace.
QMatrix restrict_map(const QMatrix& ambient, const KanAlgebra& source, const KanAlgebra& target,
                     const std::string& what);

// (U(f)a)(S') = A(f_*)(a(f*S'))
QMatrix u_morphism(const FiberedModel& fm, const QftFunctor& A, MorphismId f,
                   const InvariantSubalgebra& source, const InvariantSubalgebra& target);
// (Ran(f)a)(S', h') = a(S', h'∘f)
QMatrix ran_morphism(const FiberedModel& fm, MorphismId f, const RanUnderAlgebra& source,
                     const RanUnderAlgebra& target);

struct KappaIso {
  QMatrix kappa;          // Ran(M) → U(M), a ↦ (S ↦ a(S, id))
  QMatrix kappa_inverse;  // U(M) → Ran(M), a ↦ ((S,h) ↦ A(h_*)(a(h*S)))
  bool composites_identity = false;
  bool multiplicative = false;
};

KappaIso kappa_iso(const FiberedModel& fm, const QftFunctor& A, ObjectId M,
                   const RanUnderAlgebra& ran, const InvariantSubalgebra& u);

// ε_S: U(π(S)) → A(S)
QMatrix counit(const FiberedModel& fm, const InvariantSubalgebra& u, ObjectId S);

struct KanFunctorData {
  std::vector<InvariantSubalgebra> objects;  // by Loc object
  std::vector<QMatrix> morphisms;            // by Loc morphism
};

KanFunctorData kan_functor(const FiberedModel& fm, const QftFunctor& A);

struct Finding {
  std::string name;
  bool holds = true;
  std::string detail;
};

// Functoriality, counit naturality, both κ composites, the Ran route for
// U(f) and cleavage independence of U(M) and κ⁻¹.
std::vector<Finding> check_kan_structure(const FiberedModel& fm, const FiberedModel& reversed,
                                         const QftFunctor& A, const KanFunctorData& U);

struct UAxiomReport {
  Finding causality;
  Finding isotony;
  bool flabby = true;
  bool biconditional_consistent = true;
  bool biconditional_asserted = false;  // A has isotony and a nonzero unit
  Finding time_slice;
  bool time_slice_asserted = false;  // Cauchy flabby and A has time-slice
  Finding unit_nonzero;
  std::vector<Finding> pi0_checks;   // only for A of the form B∘π
};

UAxiomReport check_u_axioms(const FiberedModel& fm, const LocStructure& loc,
                                 const QftFunctor& A, const KanFunctorData& U,
                                 const FlabbinessReport& flab, const StrAxiomReport& str_axioms);

std::string format_vector(const Vector& v);

}  // namespace kanqft

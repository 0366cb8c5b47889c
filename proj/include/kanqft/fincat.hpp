#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kanqft {

using ObjectId = std::size_t;
using MorphismId = std::size_t;

struct MorphismSpec {
  std::string name;
  std::string source;
  std::string target;
};

// Raw, unvalidated category data as it appears in a model file.
struct CategorySpec {
  std::vector<std::string> objects;
  std::vector<MorphismSpec> morphisms;
  std::map<std::string, std::string> identities;
  std::vector<std::array<std::string, 3>> compose;  // {g, f, g∘f}
  bool groupoid = false;                            // every morphism must be invertible
};

class FinCategory {
 public:
  std::size_t num_objects() const { return objects_.size(); }
  std::size_t num_morphisms() const { return morphisms_.size(); }

  const std::string& object_name(ObjectId x) const { return objects_[x]; }
  const std::string& morphism_name(MorphismId g) const { return morphisms_[g].name; }
  ObjectId source(MorphismId g) const { return morphisms_[g].source; }
  ObjectId target(MorphismId g) const { return morphisms_[g].target; }
  MorphismId identity(ObjectId x) const { return identity_[x]; }
  bool is_identity(MorphismId g) const { return identity_[source(g)] == g; }

  // g∘f, or nothing when source(g) != target(f)
  std::optional<MorphismId> compose(MorphismId g, MorphismId f) const;
  // g∘f; throws when not composable
  MorphismId comp(MorphismId g, MorphismId f) const;
  // g1∘g2∘…∘gn for a composable tuple (n ≥ 1)
  MorphismId comp_all(const std::vector<MorphismId>& arrows) const;

  std::optional<ObjectId> find_object(const std::string& name) const;
  std::optional<MorphismId> find_morphism(const std::string& name) const;
  ObjectId object(const std::string& name) const;
  MorphismId morphism(const std::string& name) const;

  std::vector<MorphismId> hom(ObjectId a, ObjectId b) const;
  std::vector<MorphismId> out_of(ObjectId a) const;
  std::vector<MorphismId> into(ObjectId b) const;
  std::optional<MorphismId> inverse(MorphismId g) const;
  bool is_groupoid() const;

  CategorySpec to_spec() const;

  friend FinCategory validate_category(const CategorySpec& spec, const std::string& label);

 private:
  struct Arrow {
    std::string name;
    ObjectId source;
    ObjectId target;
  };
  static constexpr MorphismId kNone = static_cast<MorphismId>(-1);

  std::vector<std::string> objects_;
  std::vector<Arrow> morphisms_;
  std::vector<MorphismId> identity_;
  std::vector<MorphismId> table_;  // table_[g * |mor| + f] = g∘f
  std::map<std::string, ObjectId> object_index_;
  std::map<std::string, MorphismId> morphism_index_;
};

// Throws ValidationError listing every violated axiom.
FinCategory validate_category(const CategorySpec& spec, const std::string& label = "category");

struct LocStructure {
  FinCategory base;
  std::vector<std::pair<MorphismId, MorphismId>> causal_cospans;
  std::vector<bool> cauchy;  // indexed by morphism

  bool is_cauchy(MorphismId f) const { return cauchy[f]; }
};

LocStructure validate_loc(FinCategory base,
                          const std::vector<std::pair<std::string, std::string>>& cospans,
                          const std::vector<std::string>& cauchy);

struct CatFunctor {
  std::shared_ptr<const FinCategory> source;
  std::shared_ptr<const FinCategory> target;
  std::vector<ObjectId> object_map;
  std::vector<MorphismId> morphism_map;

  ObjectId operator()(ObjectId x) const { return object_map[x]; }
  MorphismId on_morphism(MorphismId g) const { return morphism_map[g]; }
};

CatFunctor validate_functor(std::shared_ptr<const FinCategory> source,
                            std::shared_ptr<const FinCategory> target,
                            const std::map<std::string, std::string>& objects,
                            const std::map<std::string, std::string>& morphisms);

// Checks identities, sources/targets and composition; throws ValidationError.
void check_functor(const CatFunctor& F, const std::string& label);

struct NerveTuple {
  std::vector<MorphismId> arrows;  // (g1,…,gn), source(gi) = target(g(i+1))
  ObjectId object = 0;             // meaningful for degree 0 only

  std::size_t degree() const { return arrows.size(); }
};

// Lexicographic in morphism index.
std::vector<NerveTuple> nerve(const FinCategory& cat, std::size_t n, bool normalized);

bool is_normalized(const FinCategory& cat, const std::vector<MorphismId>& arrows);

struct UnderCategory {
  std::shared_ptr<const FinCategory> category;
  CatFunctor projection;  // to Str
  ObjectId base_object;
  std::vector<std::pair<ObjectId, MorphismId>> objects;  // (S, h: M → π(S))
  std::vector<MorphismId> str_morphism;

  std::optional<ObjectId> find(ObjectId S, MorphismId h) const;
  // the M↓π morphism given by Str morphism g out of the object `from`
  std::optional<MorphismId> arrow(MorphismId g, ObjectId from) const;

  std::map<std::pair<ObjectId, MorphismId>, ObjectId> object_index;
  std::map<std::pair<MorphismId, ObjectId>, MorphismId> arrow_index;
};

UnderCategory under_category(const CatFunctor& pi, ObjectId M);

bool is_cartesian(const CatFunctor& pi, MorphismId g);

enum class TieBreak { Least, Greatest };

struct Lift {
  ObjectId pullback;     // f*S'
  MorphismId morphism;   // f_*: f*S' → S'
};

struct Fiber {
  ObjectId base;
  std::shared_ptr<const FinCategory> category;
  std::vector<ObjectId> objects;      // fiber object -> Str object
  std::vector<MorphismId> morphisms;  // fiber morphism -> Str morphism
  CatFunctor inclusion;               // to Str
};

class FiberedModel {
 public:
  const CatFunctor& proj() const { return pi_; }
  const FinCategory& str() const { return *pi_.source; }
  const FinCategory& loc() const { return *pi_.target; }
  TieBreak tie_break() const { return tie_break_; }

  ObjectId base(ObjectId S) const { return pi_.object_map[S]; }
  MorphismId base_of(MorphismId g) const { return pi_.morphism_map[g]; }
  bool is_fiber_morphism(MorphismId g) const;

  // chosen cartesian lift of f: M → π(S') into S'
  const Lift& lift(ObjectId S_prime, MorphismId f) const;
  const std::map<std::pair<ObjectId, MorphismId>, Lift>& cleavage() const { return cleavage_; }

  const Fiber& fiber(ObjectId M) const { return fibers_[M]; }
  MorphismId fiber_inverse(MorphismId g) const;

  friend FiberedModel build_fibered_model(CatFunctor pi, TieBreak order);

 private:
  CatFunctor pi_;
  TieBreak tie_break_ = TieBreak::Least;
  std::map<std::pair<ObjectId, MorphismId>, Lift> cleavage_;
  std::vector<Fiber> fibers_;
  std::vector<MorphismId> inverse_;
};

FiberedModel build_fibered_model(CatFunctor pi, TieBreak order = TieBreak::Least);

Fiber fiber_of(const CatFunctor& pi, ObjectId M);

// Unique fiber morphism x with c∘x = t (π(x) an identity). Throws if none or several.
MorphismId fiber_factor(const FiberedModel& fm, MorphismId c, MorphismId t);

// Pulls a composable tuple back into a single fiber. base[i] is the base
// morphism h_i: M → π(S_i) attached to S_0 = t(g1), S_i = s(g_i). For a fiber
// tuple pulled along f every base[i] equals f.
std::vector<MorphismId> pullback_tuple(const FiberedModel& fm,
                                       const std::vector<MorphismId>& arrows,
                                       const std::vector<MorphismId>& base);

struct FlabbinessFlag {
  bool value = true;
  std::string counterexample;  // empty iff value
};

struct FlabbinessReport {
  FlabbinessFlag flabby;
  FlabbinessFlag cauchy_flabby;
  FlabbinessFlag strongly_cauchy_flabby;
};

FlabbinessReport classify_flabbiness(const FiberedModel& fm, const LocStructure& loc);

struct ExtensionData {
  MorphismId f;
  std::map<ObjectId, std::pair<ObjectId, MorphismId>> objects;  // S -> (ext S, f♯)
  std::map<MorphismId, MorphismId> morphisms;                   // g -> ext g
};

ExtensionData extension_data(const FiberedModel& fm, const LocStructure& loc, MorphismId f);

std::vector<std::vector<ObjectId>> connected_components(const FinCategory& groupoid);

struct ExtensionWitnesses {
  std::map<ObjectId, MorphismId> g;        // S -> g_(S,f): S → f*ext S
  std::map<ObjectId, MorphismId> g_prime;  // S' -> g'_(S',f): S' → ext f*S'
};

ExtensionWitnesses extension_witnesses(const FiberedModel& fm, const LocStructure& loc,
                                   const ExtensionData& ext);

}  // namespace kanqft

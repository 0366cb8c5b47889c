#include "kanqft/fincat.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "kanqft/error.hpp"

namespace kanqft {

std::optional<MorphismId> FinCategory::compose(MorphismId g, MorphismId f) const {
  MorphismId r = table_[g * morphisms_.size() + f];
  if (r == kNone) return std::nullopt;
  return r;
}

MorphismId FinCategory::comp(MorphismId g, MorphismId f) const {
  auto r = compose(g, f);
  if (!r)
    throw Error("fincat", "cannot compose " + morphism_name(g) + " after " + morphism_name(f));
  return *r;
}

MorphismId FinCategory::comp_all(const std::vector<MorphismId>& arrows) const {
  if (arrows.empty()) throw Error("fincat", "composite of an empty tuple");
  MorphismId acc = arrows.back();
  for (std::size_t i = arrows.size() - 1; i-- > 0;) acc = comp(arrows[i], acc);
  return acc;
}

std::optional<ObjectId> FinCategory::find_object(const std::string& name) const {
  auto it = object_index_.find(name);
  if (it == object_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<MorphismId> FinCategory::find_morphism(const std::string& name) const {
  auto it = morphism_index_.find(name);
  if (it == morphism_index_.end()) return std::nullopt;
  return it->second;
}

ObjectId FinCategory::object(const std::string& name) const {
  auto x = find_object(name);
  if (!x) throw Error("fincat", "unknown object '" + name + "'");
  return *x;
}

MorphismId FinCategory::morphism(const std::string& name) const {
  auto g = find_morphism(name);
  if (!g) throw Error("fincat", "unknown morphism '" + name + "'");
  return *g;
}

std::vector<MorphismId> FinCategory::hom(ObjectId a, ObjectId b) const {
  std::vector<MorphismId> out;
  for (MorphismId g = 0; g < morphisms_.size(); ++g)
    if (morphisms_[g].source == a && morphisms_[g].target == b) out.push_back(g);
  return out;
}

std::vector<MorphismId> FinCategory::out_of(ObjectId a) const {
  std::vector<MorphismId> out;
  for (MorphismId g = 0; g < morphisms_.size(); ++g)
    if (morphisms_[g].source == a) out.push_back(g);
  return out;
}

std::vector<MorphismId> FinCategory::into(ObjectId b) const {
  std::vector<MorphismId> out;
  for (MorphismId g = 0; g < morphisms_.size(); ++g)
    if (morphisms_[g].target == b) out.push_back(g);
  return out;
}

std::optional<MorphismId> FinCategory::inverse(MorphismId g) const {
  for (MorphismId h : hom(target(g), source(g)))
    if (comp(h, g) == identity(source(g)) && comp(g, h) == identity(target(g))) return h;
  return std::nullopt;
}

bool FinCategory::is_groupoid() const {
  for (MorphismId g = 0; g < morphisms_.size(); ++g)
    if (!inverse(g)) return false;
  return true;
}

CategorySpec FinCategory::to_spec() const {
  CategorySpec s;
  s.objects = objects_;
  for (const auto& a : morphisms_)
    s.morphisms.push_back({a.name, objects_[a.source], objects_[a.target]});
  for (ObjectId x = 0; x < objects_.size(); ++x)
    s.identities[objects_[x]] = morphisms_[identity_[x]].name;
  for (MorphismId g = 0; g < morphisms_.size(); ++g)
    for (MorphismId f = 0; f < morphisms_.size(); ++f)
      if (auto r = compose(g, f))
        s.compose.push_back({morphisms_[g].name, morphisms_[f].name, morphisms_[*r].name});
  return s;
}

FinCategory validate_category(const CategorySpec& spec, const std::string& label) {
  std::vector<std::string> issues;
  FinCategory c;
  for (const auto& o : spec.objects) {
    if (!c.object_index_.emplace(o, c.objects_.size()).second)
      issues.push_back(label + ": duplicate object '" + o + "'");
    c.objects_.push_back(o);
  }
  for (const auto& m : spec.morphisms) {
    auto s = c.object_index_.find(m.source);
    auto t = c.object_index_.find(m.target);
    if (s == c.object_index_.end())
      issues.push_back(label + ": morphism '" + m.name + "' has unknown source '" + m.source + "'");
    if (t == c.object_index_.end())
      issues.push_back(label + ": morphism '" + m.name + "' has unknown target '" + m.target + "'");
    if (!c.morphism_index_.emplace(m.name, c.morphisms_.size()).second)
      issues.push_back(label + ": duplicate morphism '" + m.name + "'");
    c.morphisms_.push_back({m.name, s == c.object_index_.end() ? 0 : s->second,
                            t == c.object_index_.end() ? 0 : t->second});
  }
  if (!issues.empty()) throw ValidationError("fincat", issues);

  const std::size_t nm = c.morphisms_.size();
  c.identity_.assign(c.objects_.size(), FinCategory::kNone);
  for (ObjectId x = 0; x < c.objects_.size(); ++x) {
    auto it = spec.identities.find(c.objects_[x]);
    if (it == spec.identities.end()) {
      issues.push_back(label + ": missing identity for object '" + c.objects_[x] + "'");
      continue;
    }
    auto g = c.morphism_index_.find(it->second);
    if (g == c.morphism_index_.end()) {
      issues.push_back(label + ": identity of '" + c.objects_[x] + "' is unknown morphism '" +
                       it->second + "'");
      continue;
    }
    if (c.morphisms_[g->second].source != x || c.morphisms_[g->second].target != x) {
      issues.push_back(label + ": identity '" + it->second + "' is not an endomorphism of '" +
                       c.objects_[x] + "'");
      continue;
    }
    c.identity_[x] = g->second;
  }
  for (const auto& [o, _] : spec.identities)
    if (!c.object_index_.count(o))
      issues.push_back(label + ": identity declared for unknown object '" + o + "'");

  c.table_.assign(nm * nm, FinCategory::kNone);
  for (const auto& e : spec.compose) {
    auto g = c.morphism_index_.find(e[0]);
    auto f = c.morphism_index_.find(e[1]);
    auto r = c.morphism_index_.find(e[2]);
    if (g == c.morphism_index_.end() || f == c.morphism_index_.end() ||
        r == c.morphism_index_.end()) {
      issues.push_back(label + ": composition entry (" + e[0] + ", " + e[1] + ") -> " + e[2] +
                       " names an unknown morphism");
      continue;
    }
    const auto& G = c.morphisms_[g->second];
    const auto& F = c.morphisms_[f->second];
    const auto& R = c.morphisms_[r->second];
    if (G.source != F.target) {
      issues.push_back(label + ": ill-typed composition entry " + e[0] + "∘" + e[1] +
                       ": source of " + e[0] + " is not the target of " + e[1]);
      continue;
    }
    if (R.source != F.source || R.target != G.target) {
      issues.push_back(label + ": ill-typed composition entry " + e[0] + "∘" + e[1] + " = " +
                       e[2] + ": wrong source or target");
      continue;
    }
    auto& slot = c.table_[g->second * nm + f->second];
    if (slot != FinCategory::kNone && slot != r->second)
      issues.push_back(label + ": conflicting entries for " + e[0] + "∘" + e[1]);
    slot = r->second;
  }
  for (MorphismId g = 0; g < nm; ++g)
    for (MorphismId f = 0; f < nm; ++f)
      if (c.morphisms_[g].source == c.morphisms_[f].target &&
          c.table_[g * nm + f] == FinCategory::kNone)
        issues.push_back(label + ": missing composition " + c.morphisms_[g].name + "∘" +
                         c.morphisms_[f].name);
  if (!issues.empty()) throw ValidationError("fincat", issues);

  for (MorphismId f = 0; f < nm; ++f) {
    const auto& F = c.morphisms_[f];
    if (c.table_[c.identity_[F.target] * nm + f] != f)
      issues.push_back(label + ": unit law fails: " + c.morphisms_[c.identity_[F.target]].name +
                       "∘" + F.name + " != " + F.name);
    if (c.table_[f * nm + c.identity_[F.source]] != f)
      issues.push_back(label + ": unit law fails: " + F.name + "∘" +
                       c.morphisms_[c.identity_[F.source]].name + " != " + F.name);
  }
  for (MorphismId h = 0; h < nm; ++h)
    for (MorphismId g = 0; g < nm; ++g) {
      if (c.morphisms_[h].source != c.morphisms_[g].target) continue;
      MorphismId hg = c.table_[h * nm + g];
      for (MorphismId f = 0; f < nm; ++f) {
        if (c.morphisms_[g].source != c.morphisms_[f].target) continue;
        if (c.table_[hg * nm + f] != c.table_[h * nm + c.table_[g * nm + f]])
          issues.push_back(label + ": non-associative triple (" + c.morphisms_[h].name + ", " +
                           c.morphisms_[g].name + ", " + c.morphisms_[f].name + ")");
      }
    }
  if (!issues.empty()) throw ValidationError("fincat", issues);

  if (spec.groupoid)
    for (MorphismId g = 0; g < nm; ++g)
      if (!c.inverse(g))
        issues.push_back(label + ": '" + c.morphisms_[g].name +
                         "' has no two-sided inverse although the category is declared a groupoid");
  if (!issues.empty()) throw ValidationError("fincat", issues);
  return c;
}

LocStructure validate_loc(FinCategory base,
                          const std::vector<std::pair<std::string, std::string>>& cospans,
                          const std::vector<std::string>& cauchy) {
  std::vector<std::string> issues;
  LocStructure loc{std::move(base), {}, {}};
  const FinCategory& C = loc.base;
  loc.cauchy.assign(C.num_morphisms(), false);
  for (const auto& [a, b] : cospans) {
    auto f1 = C.find_morphism(a);
    auto f2 = C.find_morphism(b);
    if (!f1 || !f2) {
      issues.push_back("causal cospan (" + a + ", " + b + ") names an unknown morphism");
      continue;
    }
    if (C.target(*f1) != C.target(*f2)) {
      issues.push_back("causal cospan (" + a + ", " + b + ") does not share a target");
      continue;
    }
    loc.causal_cospans.emplace_back(*f1, *f2);
  }
  for (const auto& n : cauchy) {
    auto f = C.find_morphism(n);
    if (!f) {
      issues.push_back("cauchy set names unknown morphism '" + n + "'");
      continue;
    }
    loc.cauchy[*f] = true;
  }
  for (ObjectId x = 0; x < C.num_objects(); ++x)
    if (!loc.cauchy[C.identity(x)])
      issues.push_back("cauchy set is missing the identity " + C.morphism_name(C.identity(x)));
  for (MorphismId g = 0; g < C.num_morphisms(); ++g)
    for (MorphismId f = 0; f < C.num_morphisms(); ++f) {
      if (!loc.cauchy[g] || !loc.cauchy[f]) continue;
      if (auto r = C.compose(g, f); r && !loc.cauchy[*r])
        issues.push_back("cauchy set is not closed under composition: " + C.morphism_name(g) +
                         "∘" + C.morphism_name(f) + " missing");
    }
  if (!issues.empty()) throw ValidationError("fincat", issues);
  return loc;
}

CatFunctor validate_functor(std::shared_ptr<const FinCategory> source,
                            std::shared_ptr<const FinCategory> target,
                            const std::map<std::string, std::string>& objects,
                            const std::map<std::string, std::string>& morphisms) {
  std::vector<std::string> issues;
  CatFunctor F{source, target, std::vector<ObjectId>(source->num_objects(), 0),
               std::vector<MorphismId>(source->num_morphisms(), 0)};
  for (ObjectId x = 0; x < source->num_objects(); ++x) {
    auto it = objects.find(source->object_name(x));
    if (it == objects.end()) {
      issues.push_back("projection: object '" + source->object_name(x) + "' is not mapped");
      continue;
    }
    auto y = target->find_object(it->second);
    if (!y) {
      issues.push_back("projection: object '" + it->first + "' maps to unknown object '" +
                       it->second + "'");
      continue;
    }
    F.object_map[x] = *y;
  }
  for (MorphismId g = 0; g < source->num_morphisms(); ++g) {
    auto it = morphisms.find(source->morphism_name(g));
    if (it == morphisms.end()) {
      issues.push_back("projection: morphism '" + source->morphism_name(g) + "' is not mapped");
      continue;
    }
    auto h = target->find_morphism(it->second);
    if (!h) {
      issues.push_back("projection: morphism '" + it->first + "' maps to unknown morphism '" +
                       it->second + "'");
      continue;
    }
    F.morphism_map[g] = *h;
  }
  for (const auto& [k, _] : objects)
    if (!source->find_object(k)) issues.push_back("projection: unknown object '" + k + "'");
  for (const auto& [k, _] : morphisms)
    if (!source->find_morphism(k)) issues.push_back("projection: unknown morphism '" + k + "'");
  if (!issues.empty()) throw ValidationError("fincat", issues);
  check_functor(F, "projection");
  return F;
}

void check_functor(const CatFunctor& F, const std::string& label) {
  const FinCategory& S = *F.source;
  const FinCategory& T = *F.target;
  std::vector<std::string> issues;
  for (ObjectId x = 0; x < S.num_objects(); ++x)
    if (F.morphism_map[S.identity(x)] != T.identity(F.object_map[x]))
      issues.push_back(label + ": identity of '" + S.object_name(x) + "' is not preserved");
  for (MorphismId g = 0; g < S.num_morphisms(); ++g) {
    MorphismId h = F.morphism_map[g];
    if (T.source(h) != F.object_map[S.source(g)] || T.target(h) != F.object_map[S.target(g)])
      issues.push_back(label + ": '" + S.morphism_name(g) + "' is mapped to '" +
                       T.morphism_name(h) + "' with mismatched source or target");
  }
  if (!issues.empty()) throw ValidationError("fincat", issues);
  for (MorphismId g = 0; g < S.num_morphisms(); ++g)
    for (MorphismId f = 0; f < S.num_morphisms(); ++f)
      if (auto r = S.compose(g, f))
        if (F.morphism_map[*r] != T.comp(F.morphism_map[g], F.morphism_map[f]))
          issues.push_back(label + ": composition " + S.morphism_name(g) + "∘" +
                           S.morphism_name(f) + " is not preserved");
  if (!issues.empty()) throw ValidationError("fincat", issues);
}

bool is_normalized(const FinCategory& cat, const std::vector<MorphismId>& arrows) {
  return std::none_of(arrows.begin(), arrows.end(),
                      [&](MorphismId g) { return cat.is_identity(g); });
}

std::vector<NerveTuple> nerve(const FinCategory& cat, std::size_t n, bool normalized) {
  std::vector<NerveTuple> out;
  if (n == 0) {
    for (ObjectId x = 0; x < cat.num_objects(); ++x) out.push_back({{}, x});
    return out;
  }
  std::vector<MorphismId> cur;
  auto rec = [&](auto&& self) -> void {
    if (cur.size() == n) {
      out.push_back({cur, cat.target(cur.front())});
      return;
    }
    for (MorphismId g = 0; g < cat.num_morphisms(); ++g) {
      if (normalized && cat.is_identity(g)) continue;
      if (!cur.empty() && cat.target(g) != cat.source(cur.back())) continue;
      cur.push_back(g);
      self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  return out;
}

std::optional<ObjectId> UnderCategory::find(ObjectId S, MorphismId h) const {
  auto it = object_index.find({S, h});
  if (it == object_index.end()) return std::nullopt;
  return it->second;
}

std::optional<MorphismId> UnderCategory::arrow(MorphismId g, ObjectId from) const {
  auto it = arrow_index.find({g, from});
  if (it == arrow_index.end()) return std::nullopt;
  return it->second;
}

UnderCategory under_category(const CatFunctor& pi, ObjectId M) {
  const FinCategory& str = *pi.source;
  const FinCategory& loc = *pi.target;
  if (M >= loc.num_objects()) throw Error("fincat", "under_category: unknown base object");
  UnderCategory u;
  u.base_object = M;
  CategorySpec spec;
  auto obj_name = [&](ObjectId S, MorphismId h) {
    return "(" + str.object_name(S) + "," + loc.morphism_name(h) + ")";
  };
  for (ObjectId S = 0; S < str.num_objects(); ++S)
    for (MorphismId h : loc.hom(M, pi.object_map[S])) {
      u.object_index[{S, h}] = u.objects.size();
      u.objects.emplace_back(S, h);
      spec.objects.push_back(obj_name(S, h));
    }
  std::vector<std::pair<MorphismId, ObjectId>> arrows;  // (g, source under-object)
  for (ObjectId a = 0; a < u.objects.size(); ++a) {
    auto [S, h] = u.objects[a];
    for (MorphismId g : str.out_of(S)) {
      MorphismId ht = loc.comp(pi.morphism_map[g], h);
      ObjectId b = u.object_index.at({str.target(g), ht});
      u.arrow_index[{g, a}] = arrows.size();
      arrows.emplace_back(g, a);
      u.str_morphism.push_back(g);
      spec.morphisms.push_back(
          {str.morphism_name(g) + "@" + spec.objects[a], spec.objects[a], spec.objects[b]});
      if (g == str.identity(S)) spec.identities[spec.objects[a]] = spec.morphisms.back().name;
    }
  }
  for (MorphismId j = 0; j < arrows.size(); ++j)
    for (MorphismId i = 0; i < arrows.size(); ++i) {
      auto [g2, a2] = arrows[j];
      auto [g1, a1] = arrows[i];
      MorphismId ht = loc.comp(pi.morphism_map[g1], u.objects[a1].second);
      if (str.target(g1) != u.objects[a2].first || ht != u.objects[a2].second) continue;
      MorphismId r = u.arrow_index.at({str.comp(g2, g1), a1});
      spec.compose.push_back(
          {spec.morphisms[j].name, spec.morphisms[i].name, spec.morphisms[r].name});
    }
  auto cat = std::make_shared<const FinCategory>(validate_category(spec, "under-category"));
  u.category = cat;
  u.projection.source = cat;
  u.projection.target = pi.source;
  for (const auto& [S, h] : u.objects) u.projection.object_map.push_back(S);
  u.projection.morphism_map = u.str_morphism;
  return u;
}

bool is_cartesian(const CatFunctor& pi, MorphismId g) {
  const FinCategory& str = *pi.source;
  const FinCategory& loc = *pi.target;
  ObjectId S = str.source(g), Sp = str.target(g);
  MorphismId pg = pi.morphism_map[g];
  for (MorphismId gp : str.into(Sp)) {
    ObjectId X = str.source(gp);
    for (MorphismId f : loc.hom(pi.object_map[X], pi.object_map[S])) {
      if (loc.comp(pg, f) != pi.morphism_map[gp]) continue;
      int count = 0;
      for (MorphismId gt : str.hom(X, S))
        if (pi.morphism_map[gt] == f && str.comp(g, gt) == gp) ++count;
      if (count != 1) return false;
    }
  }
  return true;
}

Fiber fiber_of(const CatFunctor& pi, ObjectId M) {
  const FinCategory& str = *pi.source;
  const FinCategory& loc = *pi.target;
  Fiber fb;
  fb.base = M;
  CategorySpec spec;
  for (ObjectId S = 0; S < str.num_objects(); ++S)
    if (pi.object_map[S] == M) {
      fb.objects.push_back(S);
      spec.objects.push_back(str.object_name(S));
      spec.identities[str.object_name(S)] = str.morphism_name(str.identity(S));
    }
  for (MorphismId g = 0; g < str.num_morphisms(); ++g)
    if (pi.morphism_map[g] == loc.identity(M)) {
      fb.morphisms.push_back(g);
      spec.morphisms.push_back({str.morphism_name(g), str.object_name(str.source(g)),
                                str.object_name(str.target(g))});
    }
  for (MorphismId g : fb.morphisms)
    for (MorphismId f : fb.morphisms)
      if (auto r = str.compose(g, f))
        spec.compose.push_back(
            {str.morphism_name(g), str.morphism_name(f), str.morphism_name(*r)});
  auto cat = std::make_shared<const FinCategory>(
      validate_category(spec, "fiber over " + loc.object_name(M)));
  fb.category = cat;
  fb.inclusion = CatFunctor{cat, pi.source, fb.objects, fb.morphisms};
  return fb;
}

bool FiberedModel::is_fiber_morphism(MorphismId g) const {
  return loc().is_identity(base_of(g));
}

const Lift& FiberedModel::lift(ObjectId S_prime, MorphismId f) const {
  auto it = cleavage_.find({S_prime, f});
  if (it == cleavage_.end())
    throw Error("fincat", "no cleavage entry for (" + str().object_name(S_prime) + ", " +
                              loc().morphism_name(f) + ")");
  return it->second;
}

MorphismId FiberedModel::fiber_inverse(MorphismId g) const {
  if (!is_fiber_morphism(g))
    throw Error("fincat", "'" + str().morphism_name(g) + "' is not a fiber morphism");
  return inverse_[g];
}

FiberedModel build_fibered_model(CatFunctor pi, TieBreak order) {
  FiberedModel fm;
  fm.pi_ = std::move(pi);
  fm.tie_break_ = order;
  const FinCategory& str = fm.str();
  const FinCategory& loc = fm.loc();
  for (ObjectId M = 0; M < loc.num_objects(); ++M) fm.fibers_.push_back(fiber_of(fm.pi_, M));
  fm.inverse_.assign(str.num_morphisms(), 0);
  for (MorphismId g = 0; g < str.num_morphisms(); ++g) {
    if (!fm.is_fiber_morphism(g)) continue;
    auto inv = str.inverse(g);
    if (!inv)
      throw Error("fincat", "fiber over " + loc.object_name(fm.base(str.source(g))) +
                                " is not a groupoid: '" + str.morphism_name(g) +
                                "' is not invertible");
    fm.inverse_[g] = *inv;
  }
  for (ObjectId Sp = 0; Sp < str.num_objects(); ++Sp) {
    for (MorphismId f : loc.into(fm.base(Sp))) {
      if (loc.is_identity(f)) {
        fm.cleavage_[{Sp, f}] = {Sp, str.identity(Sp)};
        continue;
      }
      std::vector<MorphismId> candidates;
      for (MorphismId g : str.into(Sp))
        if (fm.base_of(g) == f && is_cartesian(fm.pi_, g)) candidates.push_back(g);
      if (candidates.empty())
        throw Error("fincat", "missing cartesian lift for (" + str.object_name(Sp) + ", " +
                                  loc.morphism_name(f) + ")");
      auto by_name = [&](MorphismId a, MorphismId b) {
        return str.morphism_name(a) < str.morphism_name(b);
      };
      MorphismId pick = order == TieBreak::Least
                            ? *std::min_element(candidates.begin(), candidates.end(), by_name)
                            : *std::max_element(candidates.begin(), candidates.end(), by_name);
      fm.cleavage_[{Sp, f}] = {str.source(pick), pick};
    }
  }
  return fm;
}

MorphismId fiber_factor(const FiberedModel& fm, MorphismId c, MorphismId t) {
  const FinCategory& str = fm.str();
  std::optional<MorphismId> found;
  int count = 0;
  for (MorphismId x : str.hom(str.source(t), str.source(c))) {
    if (!fm.is_fiber_morphism(x)) continue;
    if (str.comp(c, x) == t) {
      found = x;
      ++count;
    }
  }
  if (count != 1)
    throw Error("fincat", "no unique fiber factorization of '" + str.morphism_name(t) +
                              "' through '" + str.morphism_name(c) + "' (" +
                              std::to_string(count) + " found)");
  return *found;
}

std::vector<MorphismId> pullback_tuple(const FiberedModel& fm,
                                       const std::vector<MorphismId>& arrows,
                                       const std::vector<MorphismId>& base) {
  const FinCategory& str = fm.str();
  if (base.size() != arrows.size() + 1)
    throw Error("fincat", "pullback_tuple needs one base morphism per tuple object");
  std::vector<MorphismId> out;
  for (std::size_t i = 1; i <= arrows.size(); ++i) {
    MorphismId g = arrows[i - 1];
    const Lift& up = fm.lift(str.target(g), base[i - 1]);
    const Lift& down = fm.lift(str.source(g), base[i]);
    out.push_back(fiber_factor(fm, up.morphism, str.comp(g, down.morphism)));
  }
  return out;
}

namespace {

std::vector<MorphismId> extensions(const FiberedModel& fm, ObjectId S, MorphismId f) {
  std::vector<MorphismId> out;
  for (MorphismId g : fm.str().out_of(S))
    if (fm.base_of(g) == f) out.push_back(g);
  return out;
}

}  // namespace

FlabbinessReport classify_flabbiness(const FiberedModel& fm, const LocStructure& loc) {
  const FinCategory& str = fm.str();
  const FinCategory& base = fm.loc();
  FlabbinessReport rep;
  auto fail = [](FlabbinessFlag& flag, std::string why) {
    if (!flag.value) return;
    flag.value = false;
    flag.counterexample = std::move(why);
  };
  for (ObjectId S = 0; S < str.num_objects(); ++S) {
    for (MorphismId f : base.out_of(fm.base(S))) {
      auto ext = extensions(fm, S, f);
      std::string at = "(" + str.object_name(S) + ", " + base.morphism_name(f) + ")";
      if (ext.empty()) {
        fail(rep.flabby, at + ": no Str morphism out of " + str.object_name(S) + " over " +
                             base.morphism_name(f));
        if (loc.is_cauchy(f)) {
          fail(rep.cauchy_flabby, at + ": no extension along the Cauchy morphism " +
                                      base.morphism_name(f));
          fail(rep.strongly_cauchy_flabby, rep.cauchy_flabby.counterexample);
        }
        continue;
      }
      if (!loc.is_cauchy(f)) continue;
      for (MorphismId g : ext)
        for (MorphismId gt : ext) {
          int count = 0;
          for (MorphismId gp : str.hom(str.target(g), str.target(gt)))
            if (fm.is_fiber_morphism(gp) && str.comp(gp, g) == gt) ++count;
          if (count == 0) {
            fail(rep.cauchy_flabby, at + ": no fiber morphism closes the extensions " +
                                        str.morphism_name(g) + ", " + str.morphism_name(gt));
            fail(rep.strongly_cauchy_flabby, rep.cauchy_flabby.counterexample);
          } else if (count > 1) {
            fail(rep.strongly_cauchy_flabby,
                 at + ": " + std::to_string(count) + " fiber morphisms close the extensions " +
                     str.morphism_name(g) + ", " + str.morphism_name(gt));
          }
        }
    }
  }
  return rep;
}

ExtensionData extension_data(const FiberedModel& fm, const LocStructure& loc, MorphismId f) {
  const FinCategory& str = fm.str();
  const FinCategory& base = fm.loc();
  if (!loc.is_cauchy(f))
    throw Error("fincat", "extension_data: '" + base.morphism_name(f) + "' is not Cauchy");
  auto rep = classify_flabbiness(fm, loc);
  if (!rep.strongly_cauchy_flabby.value)
    throw Error("fincat", "extension_data: model is not strongly Cauchy flabby (" +
                              rep.strongly_cauchy_flabby.counterexample + ")");
  ExtensionData ed;
  ed.f = f;
  const Fiber& fb = fm.fiber(base.source(f));
  for (ObjectId S : fb.objects) {
    auto ext = extensions(fm, S, f);
    if (ext.empty())
      throw Error("fincat", "extension_data: no extension of " + str.object_name(S));
    auto by_name = [&](MorphismId a, MorphismId b) {
      return str.morphism_name(a) < str.morphism_name(b);
    };
    MorphismId sharp = fm.tie_break() == TieBreak::Least
                           ? *std::min_element(ext.begin(), ext.end(), by_name)
                           : *std::max_element(ext.begin(), ext.end(), by_name);
    ed.objects[S] = {str.target(sharp), sharp};
  }
  for (MorphismId g : fb.morphisms) {
    auto [eS, sS] = ed.objects.at(str.source(g));
    auto [eT, sT] = ed.objects.at(str.target(g));
    MorphismId rhs = str.comp(sT, g);
    std::optional<MorphismId> found;
    int count = 0;
    for (MorphismId x : str.hom(eS, eT))
      if (fm.is_fiber_morphism(x) && str.comp(x, sS) == rhs) {
        found = x;
        ++count;
      }
    if (count != 1)
      throw Error("fincat", "extension_data: ext of '" + str.morphism_name(g) +
                                "' is not uniquely determined");
    ed.morphisms[g] = *found;
  }
  for (ObjectId S : fb.objects)
    if (ed.morphisms.at(str.identity(S)) != str.identity(ed.objects.at(S).first))
      throw Error("fincat", "extension_data: ext does not preserve the identity of " +
                                str.object_name(S));
  for (MorphismId g : fb.morphisms)
    for (MorphismId h : fb.morphisms)
      if (auto gh = str.compose(g, h))
        if (ed.morphisms.at(*gh) != str.comp(ed.morphisms.at(g), ed.morphisms.at(h)))
          throw Error("fincat", "extension_data: ext does not preserve " + str.morphism_name(g) +
                                    "∘" + str.morphism_name(h));
  return ed;
}

std::vector<std::vector<ObjectId>> connected_components(const FinCategory& groupoid) {
  if (!groupoid.is_groupoid())
    throw Error("fincat", "connected_components: input is not a groupoid");
  std::vector<ObjectId> parent(groupoid.num_objects());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](ObjectId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (MorphismId g = 0; g < groupoid.num_morphisms(); ++g) {
    ObjectId a = find(groupoid.source(g)), b = find(groupoid.target(g));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<ObjectId, std::vector<ObjectId>> classes;
  for (ObjectId x = 0; x < groupoid.num_objects(); ++x) classes[find(x)].push_back(x);
  std::vector<std::vector<ObjectId>> out;
  for (auto& [_, v] : classes) out.push_back(std::move(v));
  return out;
}

ExtensionWitnesses extension_witnesses(const FiberedModel& fm, const LocStructure& loc,
                                   const ExtensionData& ext) {
  const FinCategory& str = fm.str();
  const FinCategory& base = fm.loc();
  (void)loc;
  MorphismId f = ext.f;
  ExtensionWitnesses w;
  for (const auto& [S, es] : ext.objects) {
    const Lift& l = fm.lift(es.first, f);
    w.g[S] = fiber_factor(fm, l.morphism, es.second);
  }
  for (ObjectId Sp : fm.fiber(base.target(f)).objects) {
    const Lift& l = fm.lift(Sp, f);
    auto [eP, sharp] = ext.objects.at(l.pullback);
    std::optional<MorphismId> found;
    int count = 0;
    for (MorphismId x : str.hom(Sp, eP))
      if (fm.is_fiber_morphism(x) && str.comp(x, l.morphism) == sharp) {
        found = x;
        ++count;
      }
    if (count != 1)
      throw Error("fincat", "extension_witnesses: g' for (" + str.object_name(Sp) + ", " +
                                base.morphism_name(f) + ") is not unique (" +
                                std::to_string(count) + " found)");
    w.g_prime[Sp] = *found;
  }
  return w;
}

}  // namespace kanqft

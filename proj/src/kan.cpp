#include "kanqft/kan.hpp"

#include "kanqft/error.hpp"

namespace kanqft {

namespace {

struct Constraint {
  MorphismId g;  // Str morphism
  std::size_t from, to;
};

Vector ambient_multiply(const KanAlgebra& K, const QftFunctor& A, const Vector& x,
                        const Vector& y) {
  Vector z = zero_vector(K.ambient_dim());
  for (std::size_t s = 0; s < K.slot_objects.size(); ++s) {
    Vector p = A.algebra(K.slot_objects[s]).multiply(K.slot(x, s), K.slot(y, s));
    for (std::size_t i = 0; i < p.size(); ++i) z[K.offsets[s] + i] = p[i];
  }
  return z;
}

KanAlgebra build(const QftFunctor& A, ObjectId M, std::vector<ObjectId> slots,
                 std::vector<MorphismId> slot_base, std::vector<std::string> names,
                 const std::vector<Constraint>& constraints) {
  KanAlgebra K;
  K.base = M;
  K.slot_objects = std::move(slots);
  K.slot_base = std::move(slot_base);
  K.slot_names = std::move(names);
  std::size_t acc = 0;
  for (ObjectId S : K.slot_objects) {
    K.offsets.push_back(acc);
    acc += A.algebra(S).dim();
  }
  K.offsets.push_back(acc);

  QMatrix cons(0, acc);
  for (const auto& c : constraints) {
    if (c.from == c.to && A.map(c.g) == QMatrix::identity(A.map(c.g).rows())) continue;
    const std::size_t rows = A.algebra(K.slot_objects[c.to]).dim();
    QMatrix blk(rows, acc);
    blk.add_block(0, K.offsets[c.from], A.map(c.g));
    blk.add_block(0, K.offsets[c.to], QMatrix::identity(rows), -1);
    cons = vstack(cons, blk);
  }
  K.subspace = kernel_basis(cons);

  const std::size_t n = K.subspace.dim();
  std::vector<Rational> constants(n * n * n, Rational(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Vector p = ambient_multiply(K, A, K.subspace.vector(i), K.subspace.vector(j));
      auto c = K.subspace.coordinates(p);
      if (!c) throw Error("kan", "invariant subspace is not closed under the product");
      for (std::size_t k = 0; k < n; ++k) constants[(i * n + j) * n + k] = (*c)[k];
    }
  Vector unit = zero_vector(acc);
  for (std::size_t s = 0; s < K.slot_objects.size(); ++s) {
    const Vector& u = A.algebra(K.slot_objects[s]).unit();
    for (std::size_t i = 0; i < u.size(); ++i) unit[K.offsets[s] + i] = u[i];
  }
  auto uc = K.subspace.coordinates(unit);
  if (!uc) throw Error("kan", "invariant subspace does not contain the unit");
  K.algebra = FinAlgebra(n, std::move(constants), *uc);
  K.unit_is_zero = is_zero(*uc);
  return K;
}

std::size_t slot_of(const KanAlgebra& K, ObjectId S, MorphismId h) {
  for (std::size_t s = 0; s < K.slot_objects.size(); ++s)
    if (K.slot_objects[s] == S && K.slot_base[s] == h) return s;
  throw Error("kan", "no slot for the requested object");
}

}  // namespace

Vector KanAlgebra::embed(const Vector& coords) const {
  Vector v = zero_vector(ambient_dim());
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] != 0) v = v + coords[i] * subspace.vector(i);
  return v;
}

Vector KanAlgebra::slot(const Vector& ambient, std::size_t s) const {
  return Vector(ambient.begin() + offsets[s], ambient.begin() + offsets[s + 1]);
}

RanUnderAlgebra ran_under(const FiberedModel& fm, const QftFunctor& A, ObjectId M) {
  UnderCategory uc = under_category(fm.proj(), M);
  const FinCategory& D = *uc.category;
  std::vector<ObjectId> slots;
  std::vector<MorphismId> bases;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < uc.objects.size(); ++i) {
    slots.push_back(uc.objects[i].first);
    bases.push_back(uc.objects[i].second);
    names.push_back(D.object_name(i));
  }
  std::vector<Constraint> cons;
  for (MorphismId m = 0; m < D.num_morphisms(); ++m)
    cons.push_back({uc.str_morphism[m], D.source(m), D.target(m)});
  return build(A, M, std::move(slots), std::move(bases), std::move(names), cons);
}

InvariantSubalgebra u_object(const FiberedModel& fm, const QftFunctor& A, ObjectId M) {
  const Fiber& F = fm.fiber(M);
  const FinCategory& D = *F.category;
  std::vector<ObjectId> slots = F.objects;
  std::vector<MorphismId> bases(slots.size(), fm.loc().identity(M));
  std::vector<std::string> names;
  for (ObjectId S : slots) names.push_back(fm.str().object_name(S));
  std::vector<Constraint> cons;
  for (MorphismId m = 0; m < D.num_morphisms(); ++m)
    cons.push_back({F.morphisms[m], D.source(m), D.target(m)});
  return build(A, M, std::move(slots), std::move(bases), std::move(names), cons);
}

QMatrix restrict_map(const QMatrix& ambient, const KanAlgebra& source, const KanAlgebra& target,
                     const std::string& what) {
  QMatrix out(target.dim(), source.dim());
  for (std::size_t i = 0; i < source.dim(); ++i) {
    auto c = target.subspace.coordinates(ambient.apply(source.subspace.vector(i)));
    if (!c) throw Error("kan", what + ": image leaves the target subalgebra");
    for (std::size_t k = 0; k < c->size(); ++k) out.set(k, i, (*c)[k]);
  }
  return out;
}

QMatrix u_morphism(const FiberedModel& fm, const QftFunctor& A, MorphismId f,
                   const InvariantSubalgebra& source, const InvariantSubalgebra& target) {
  QMatrix amb(target.ambient_dim(), source.ambient_dim());
  const MorphismId id_src = fm.loc().identity(source.base);
  for (std::size_t s = 0; s < target.slot_objects.size(); ++s) {
    const Lift& l = fm.lift(target.slot_objects[s], f);
    amb.add_block(target.offsets[s], source.offsets[slot_of(source, l.pullback, id_src)],
                  A.map(l.morphism));
  }
  return restrict_map(amb, source, target, "U(" + fm.loc().morphism_name(f) + ")");
}

QMatrix ran_morphism(const FiberedModel& fm, MorphismId f, const RanUnderAlgebra& source,
                     const RanUnderAlgebra& target) {
  QMatrix amb(target.ambient_dim(), source.ambient_dim());
  for (std::size_t s = 0; s < target.slot_objects.size(); ++s) {
    std::size_t from = slot_of(source, target.slot_objects[s], fm.loc().comp(target.slot_base[s], f));
    amb.add_block(target.offsets[s], source.offsets[from],
                  QMatrix::identity(target.offsets[s + 1] - target.offsets[s]));
  }
  return restrict_map(amb, source, target, "Ran(" + fm.loc().morphism_name(f) + ")");
}

KappaIso kappa_iso(const FiberedModel& fm, const QftFunctor& A, ObjectId M,
                   const RanUnderAlgebra& ran, const InvariantSubalgebra& u) {
  const MorphismId id = fm.loc().identity(M);
  QMatrix k(u.ambient_dim(), ran.ambient_dim());
  for (std::size_t s = 0; s < u.slot_objects.size(); ++s) {
    std::size_t from = slot_of(ran, u.slot_objects[s], id);
    k.add_block(u.offsets[s], ran.offsets[from],
                QMatrix::identity(u.offsets[s + 1] - u.offsets[s]));
  }
  QMatrix kinv(ran.ambient_dim(), u.ambient_dim());
  for (std::size_t s = 0; s < ran.slot_objects.size(); ++s) {
    const Lift& l = fm.lift(ran.slot_objects[s], ran.slot_base[s]);
    kinv.add_block(ran.offsets[s], u.offsets[slot_of(u, l.pullback, id)], A.map(l.morphism));
  }
  KappaIso out;
  out.kappa = restrict_map(k, ran, u, "kappa");
  out.kappa_inverse = restrict_map(kinv, u, ran, "kappa inverse");
  out.composites_identity = out.kappa * out.kappa_inverse == QMatrix::identity(u.dim()) &&
                            out.kappa_inverse * out.kappa == QMatrix::identity(ran.dim());
  out.multiplicative = check_alg_morphism(ran.algebra, u.algebra, out.kappa).empty();
  return out;
}

QMatrix counit(const FiberedModel& fm, const InvariantSubalgebra& u, ObjectId S) {
  std::size_t s = slot_of(u, S, fm.loc().identity(u.base));
  return u.subspace.embedding().rows_range(u.offsets[s], u.offsets[s + 1]);
}

KanFunctorData kan_functor(const FiberedModel& fm, const QftFunctor& A) {
  KanFunctorData U;
  for (ObjectId M = 0; M < fm.loc().num_objects(); ++M) U.objects.push_back(u_object(fm, A, M));
  for (MorphismId f = 0; f < fm.loc().num_morphisms(); ++f)
    U.morphisms.push_back(u_morphism(fm, A, f, U.objects[fm.loc().source(f)],
                                     U.objects[fm.loc().target(f)]));
  return U;
}

std::vector<Finding> check_kan_structure(const FiberedModel& fm, const FiberedModel& reversed,
                                         const QftFunctor& A, const KanFunctorData& U) {
  const FinCategory& loc = fm.loc();
  const FinCategory& str = fm.str();
  std::vector<Finding> out;

  Finding alg{"U(M) is a unital algebra", true, {}};
  for (ObjectId M = 0; M < loc.num_objects(); ++M) {
    if (U.objects[M].unit_is_zero) continue;
    try {
      validate_algebra(U.objects[M].algebra, "U(" + loc.object_name(M) + ")");
    } catch (const Error& e) {
      alg.holds = false;
      alg.detail = e.what();
    }
  }
  out.push_back(alg);

  Finding func{"U strictly functorial", true, {}};
  for (ObjectId M = 0; M < loc.num_objects() && func.holds; ++M)
    if (U.morphisms[loc.identity(M)] != QMatrix::identity(U.objects[M].dim())) {
      func.holds = false;
      func.detail = "U(" + loc.morphism_name(loc.identity(M)) + ") is not the identity";
    }
  for (MorphismId g = 0; g < loc.num_morphisms() && func.holds; ++g)
    for (MorphismId f = 0; f < loc.num_morphisms() && func.holds; ++f)
      if (auto r = loc.compose(g, f))
        if (U.morphisms[*r] != U.morphisms[g] * U.morphisms[f]) {
          func.holds = false;
          func.detail = "U(" + loc.morphism_name(*r) + ") != U(" + loc.morphism_name(g) + ")U(" +
                        loc.morphism_name(f) + ")";
        }
  out.push_back(func);

  Finding nat{"counit natural", true, {}};
  for (MorphismId g = 0; g < str.num_morphisms() && nat.holds; ++g) {
    ObjectId S = str.source(g), T = str.target(g);
    QMatrix lhs = counit(fm, U.objects[fm.base(T)], T) * U.morphisms[fm.base_of(g)];
    QMatrix rhs = A.map(g) * counit(fm, U.objects[fm.base(S)], S);
    if (lhs != rhs) {
      nat.holds = false;
      nat.detail = "naturality square fails for " + str.morphism_name(g);
    }
  }
  out.push_back(nat);

  Finding kap{"kappa isomorphism", true, {}};
  Finding route{"U(f) = kappa Ran(f) kappa^-1", true, {}};
  Finding indep{"cleavage independence", true, {}};
  std::vector<RanUnderAlgebra> ran;
  std::vector<KappaIso> kis;
  for (ObjectId M = 0; M < loc.num_objects(); ++M) {
    ran.push_back(ran_under(fm, A, M));
    kis.push_back(kappa_iso(fm, A, M, ran[M], U.objects[M]));
    if (!kis[M].composites_identity || !kis[M].multiplicative) {
      kap.holds = false;
      kap.detail = "kappa at " + loc.object_name(M) +
                   (kis[M].composites_identity ? " is not multiplicative"
                                               : ": composites are not identities");
    }
    InvariantSubalgebra ur = u_object(reversed, A, M);
    if (!(ur.subspace == U.objects[M].subspace)) {
      indep.holds = false;
      indep.detail = "U(" + loc.object_name(M) + ") changes under reversed tie-breaking";
    }
    KappaIso kr = kappa_iso(reversed, A, M, ran[M], ur);
    if (kr.kappa_inverse != kis[M].kappa_inverse) {
      indep.holds = false;
      indep.detail = "kappa^-1 at " + loc.object_name(M) + " changes under reversed tie-breaking";
    }
  }
  for (MorphismId f = 0; f < loc.num_morphisms(); ++f) {
    ObjectId a = loc.source(f), b = loc.target(f);
    QMatrix via = kis[b].kappa * ran_morphism(fm, f, ran[a], ran[b]) * kis[a].kappa_inverse;
    if (via != U.morphisms[f]) {
      route.holds = false;
      route.detail = "routes differ at " + loc.morphism_name(f);
    }
    QMatrix rev = u_morphism(reversed, A, f, U.objects[a], U.objects[b]);
    if (rev != U.morphisms[f]) {
      indep.holds = false;
      indep.detail = "U(" + loc.morphism_name(f) + ") changes under reversed tie-breaking";
    }
  }
  out.push_back(kap);
  out.push_back(route);
  out.push_back(indep);
  return out;
}

std::string format_vector(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + ")";
}

UAxiomReport check_u_axioms(const FiberedModel& fm, const LocStructure& loc,
                                 const QftFunctor& A, const KanFunctorData& U,
                                 const FlabbinessReport& flab, const StrAxiomReport& str_axioms) {
  const FinCategory& base = fm.loc();
  UAxiomReport r;
  r.unit_nonzero = {"u-unit-nonzero", true, {}};
  for (ObjectId M = 0; M < base.num_objects(); ++M)
    if (U.objects[M].unit_is_zero) {
      r.unit_nonzero.holds = false;
      r.unit_nonzero.detail += (r.unit_nonzero.detail.empty() ? "" : "; ") + std::string("U(") +
                               base.object_name(M) + ") is the zero algebra";
    }

  r.causality = {"u-causality", true, {}};
  for (const auto& [f1, f2] : loc.causal_cospans) {
    const ObjectId M = base.target(f1);
    const KanAlgebra& T = U.objects[M];
    const KanAlgebra& K1 = U.objects[base.source(f1)];
    const KanAlgebra& K2 = U.objects[base.source(f2)];
    for (std::size_t i = 0; i < K1.dim() && r.causality.holds; ++i)
      for (std::size_t j = 0; j < K2.dim() && r.causality.holds; ++j) {
        Vector x = U.morphisms[f1].column(i);
        Vector y = U.morphisms[f2].column(j);
        Vector c = T.algebra.multiply(x, y) - T.algebra.multiply(y, x);
        if (!is_zero(c)) {
          r.causality.holds = false;
          r.causality.detail = "[U(" + base.morphism_name(f1) + ")b" + std::to_string(i) + ", U(" +
                               base.morphism_name(f2) + ")b" + std::to_string(j) + "] = " +
                               format_vector(T.embed(c));
        }
      }
  }

  r.isotony = {"u-isotony", true, {}};
  for (MorphismId f = 0; f < base.num_morphisms() && r.isotony.holds; ++f) {
    Subspace ker = kernel_basis(U.morphisms[f]);
    if (ker.dim() > 0) {
      r.isotony.holds = false;
      r.isotony.detail = "U(" + base.morphism_name(f) + ") kills a = " +
                         format_vector(U.objects[base.source(f)].embed(ker.vector(0)));
    }
  }
  r.flabby = flab.flabby.value;
  r.biconditional_asserted = str_axioms.isotony.holds && str_axioms.unit_nonzero.holds;
  if (r.biconditional_asserted) r.biconditional_consistent = (r.isotony.holds == r.flabby);

  r.time_slice = {"u-time-slice", true, {}};
  for (MorphismId f = 0; f < base.num_morphisms() && r.time_slice.holds; ++f)
    if (loc.is_cauchy(f) && !is_invertible(U.morphisms[f])) {
      r.time_slice.holds = false;
      r.time_slice.detail = "U(" + base.morphism_name(f) + ") is not invertible";
    }
  r.time_slice_asserted = flab.cauchy_flabby.value && str_axioms.time_slice.holds;

  // A = B∘π: fiber morphisms act trivially and all objects over M carry the same algebra.
  const FinCategory& str = fm.str();
  bool pulled_back = true;
  for (MorphismId g = 0; g < str.num_morphisms() && pulled_back; ++g)
    if (fm.is_fiber_morphism(g) &&
        !(A.algebra(str.source(g)) == A.algebra(str.target(g)) &&
          A.map(g) == QMatrix::identity(A.algebra(str.source(g)).dim())))
      pulled_back = false;
  for (ObjectId M = 0; M < base.num_objects() && pulled_back; ++M) {
    const Fiber& F = fm.fiber(M);
    for (ObjectId S : F.objects)
      if (!(A.algebra(S) == A.algebra(F.objects[0]))) pulled_back = false;
  }
  if (pulled_back)
    for (ObjectId M = 0; M < base.num_objects(); ++M) {
      const Fiber& F = fm.fiber(M);
      if (F.objects.empty()) continue;
      std::size_t comps = connected_components(*F.category).size();
      std::size_t expected = comps * A.algebra(F.objects[0]).dim();
      Finding c{"pi0 dimension at " + base.object_name(M), U.objects[M].dim() == expected,
                "dim U = " + std::to_string(U.objects[M].dim()) + ", |pi0| * dim B = " +
                    std::to_string(expected)};
      r.pi0_checks.push_back(c);
    }
  return r;
}

}  // namespace kanqft

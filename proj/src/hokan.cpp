#include "kanqft/hokan.hpp"

#include <algorithm>

#include "kanqft/error.hpp"

namespace kanqft {

namespace {

Rational sign(long e) { return (e % 2 + 2) % 2 == 0 ? Rational(1) : Rational(-1); }

// Block of a graded map out of source degree n into target degree m, filled
// term by term: target tuple, source tuple, coefficient matrix and sign.
class Block {
 public:
  Block(const CochainLayout& src, int n, const CochainLayout& tgt, int m)
      : src_(src), tgt_(tgt), n_(n), m_(m), mat_(tgt.dim(m), src.dim(n)) {}

  // coeff == nullptr stands for the identity
  void add(std::size_t t, const std::vector<MorphismId>& arrows, const QMatrix* coeff,
           const Rational& s) {
    if (static_cast<int>(arrows.size()) != n_) throw Error("hokan", "source tuple has the wrong degree");
    auto pos = src_.find(arrows);
    if (!pos) return;  // degenerate
    place(t, *pos, coeff, s);
  }

  void add_object(std::size_t t, ObjectId x, const QMatrix* coeff, const Rational& s) {
    if (n_ != 0) throw Error("hokan", "object term outside degree 0");
    place(t, x, coeff, s);
  }

  QMatrix take() { return std::move(mat_); }

 private:
  void place(std::size_t t, std::size_t p, const QMatrix* coeff, const Rational& s) {
    const std::size_t r0 = tgt_.offsets[m_][t], c0 = src_.offsets[n_][p];
    if (coeff) {
      mat_.add_block(r0, c0, *coeff, s);
      return;
    }
    const std::size_t k = tgt_.coeff_dims[tgt_.anchor(m_, t)];
    for (std::size_t i = 0; i < k; ++i) mat_.add(r0 + i, c0 + i, s);
  }

  const CochainLayout& src_;
  const CochainLayout& tgt_;
  int n_, m_;
  QMatrix mat_;
};

template <class Fill>
GradedLinearMap make_map(const CochainLayout& src, const CochainLayout& tgt, int shift, Fill fill) {
  GradedLinearMap m{shift, src.dims(), tgt.dims(), {}};
  for (int n = 0; n <= src.max_degree; ++n) {
    const int k = n + shift;
    if (k < 0 || k > tgt.max_degree) {
      m.blocks.emplace_back(m.target_dim(k), src.dim(n));
      continue;
    }
    Block b(src, n, tgt, k);
    fill(b, n);
    m.blocks.push_back(b.take());
  }
  return m;
}

std::vector<MorphismId> str_arrows(const CochainLayout& L, const std::vector<MorphismId>& arrows) {
  std::vector<MorphismId> out;
  for (MorphismId g : arrows) out.push_back(L.to_str.morphism_map[g]);
  return out;
}

// Inverse of the fiber inclusion on objects and morphisms.
struct FiberIndex {
  std::map<ObjectId, ObjectId> object;
  std::map<MorphismId, MorphismId> morphism;

  explicit FiberIndex(const CochainLayout& L) {
    if (!L.fiber) throw Error("hokan", "expected a fiber layout");
    for (ObjectId x = 0; x < L.fiber->objects.size(); ++x) object[L.fiber->objects[x]] = x;
    for (MorphismId g = 0; g < L.fiber->morphisms.size(); ++g) morphism[L.fiber->morphisms[g]] = g;
  }
  ObjectId obj(ObjectId S) const {
    auto it = object.find(S);
    if (it == object.end()) throw Error("hokan", "object is not in the fiber");
    return it->second;
  }
  std::vector<MorphismId> arrows(const std::vector<MorphismId>& str) const {
    std::vector<MorphismId> out;
    for (MorphismId g : str) {
      auto it = morphism.find(g);
      if (it == morphism.end()) throw Error("hokan", "morphism is not in the fiber");
      out.push_back(it->second);
    }
    return out;
  }
};

const UnderCategory& under(const CochainLayout& L) {
  if (!L.under) throw Error("hokan", "expected an under-category layout");
  return *L.under;
}

// Objects (S_i, h_i), i = 0..n, of an M↓π tuple.
std::vector<std::pair<ObjectId, MorphismId>> tuple_objects(const UnderCategory& uc,
                                                           const NerveTuple& t) {
  std::vector<std::pair<ObjectId, MorphismId>> out{uc.objects[t.object]};
  for (MorphismId a : t.arrows) out.push_back(uc.objects[uc.category->source(a)]);
  return out;
}

ObjectId under_object(const UnderCategory& uc, ObjectId S, MorphismId h) {
  auto o = uc.find(S, h);
  if (!o) throw Error("hokan", "missing under-category object");
  return *o;
}

MorphismId under_arrow(const UnderCategory& uc, MorphismId g, ObjectId from) {
  auto a = uc.arrow(g, from);
  if (!a) throw Error("hokan", "missing under-category arrow");
  return *a;
}

}  // namespace

std::vector<std::size_t> CochainLayout::dims() const {
  std::vector<std::size_t> out;
  for (int n = 0; n <= max_degree; ++n) out.push_back(dim(n));
  return out;
}

std::optional<std::size_t> CochainLayout::find(const std::vector<MorphismId>& arrows) const {
  const std::size_t n = arrows.size();
  if (n == 0 || static_cast<int>(n) > max_degree) return std::nullopt;
  auto it = index[n].find(arrows);
  if (it == index[n].end()) return std::nullopt;
  return it->second;
}

std::string CochainLayout::label(int n, std::size_t t) const {
  if (n == 0) return shape->object_name(tuples[0][t].object);
  std::string s = "(";
  for (std::size_t i = 0; i < tuples[n][t].arrows.size(); ++i) {
    if (i) s += ",";
    s += shape->morphism_name(tuples[n][t].arrows[i]);
  }
  return s + ")";
}

CochainLayout make_layout(std::shared_ptr<const FinCategory> shape, CatFunctor to_str,
                          const QftFunctor& A, ObjectId base, int N) {
  if (N < 1) throw Error("hokan", "truncation degree must be at least 1");
  CochainLayout L;
  L.base = base;
  L.max_degree = N;
  L.shape = shape;
  L.to_str = std::move(to_str);
  for (ObjectId x = 0; x < shape->num_objects(); ++x)
    L.coeff_dims.push_back(A.algebra(L.to_str.object_map[x]).dim());
  L.index.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    L.tuples.push_back(nerve(*shape, n, true));
    L.offsets.emplace_back();
    L.composite.emplace_back();
    std::size_t acc = 0;
    for (std::size_t t = 0; t < L.tuples[n].size(); ++t) {
      const NerveTuple& tu = L.tuples[n][t];
      L.offsets[n].push_back(acc);
      acc += L.coeff_dims[tu.object];
      if (n > 0) L.index[n][tu.arrows] = t;
      MorphismId c = n == 0 ? shape->identity(tu.object) : shape->comp_all(tu.arrows);
      L.composite[n].push_back(L.to_str.morphism_map[c]);
    }
    L.offsets[n].push_back(acc);
  }
  return L;
}

CochainDga build_cochain_dga(std::shared_ptr<const CochainLayout> layout, const QftFunctor& A) {
  const CochainLayout& L = *layout;
  const FinCategory& D = *L.shape;
  const int N = L.max_degree;
  CochainDga out;
  out.layout = layout;
  TruncatedDgVec& V = out.dga.complex;
  V.max_degree = N;
  V.dims = L.dims();
  V.labels.resize(N + 1);
  for (int n = 0; n <= N; ++n)
    for (std::size_t t = 0; t < L.tuples[n].size(); ++t)
      for (std::size_t k = 0; k < L.coeff_dims[L.anchor(n, t)]; ++k)
        V.labels[n].push_back(L.label(n, t) + "[" + std::to_string(k) + "]");

  for (int n = 0; n < N; ++n) {
    Block b(L, n, L, n + 1);
    for (std::size_t t = 0; t < L.tuples[n + 1].size(); ++t) {
      const auto& g = L.tuples[n + 1][t].arrows;
      const QMatrix& first = A.map(L.to_str.morphism_map[g[0]]);
      if (n == 0) {
        b.add_object(t, D.source(g[0]), &first, 1);
        b.add_object(t, D.target(g[0]), nullptr, -1);
        continue;
      }
      b.add(t, std::vector<MorphismId>(g.begin() + 1, g.end()), &first, 1);
      for (int i = 1; i <= n; ++i) {
        std::vector<MorphismId> merged(g.begin(), g.begin() + (i - 1));
        merged.push_back(D.comp(g[i - 1], g[i]));
        merged.insert(merged.end(), g.begin() + (i + 1), g.end());
        b.add(t, merged, nullptr, sign(i));
      }
      b.add(t, std::vector<MorphismId>(g.begin(), g.end() - 1), nullptr, sign(n + 1));
    }
    V.d.push_back(b.take());
  }

  std::vector<QMatrix> transposed;
  for (const auto& m : A.on_morphisms) transposed.push_back(m.transpose());
  auto locate = [layout](int n, std::size_t p) {
    const auto& off = layout->offsets[n];
    std::size_t t = std::upper_bound(off.begin(), off.end(), p) - off.begin() - 1;
    return std::make_pair(t, p - off[t]);
  };
  out.dga.product = [layout, A, transposed, locate](int i, std::size_t p, int j,
                                                    std::size_t q) -> SparseRow {
    const CochainLayout& L = *layout;
    const FinCategory& D = *L.shape;
    if (i + j > L.max_degree) return {};
    auto [tp, alpha] = locate(i, p);
    auto [tq, beta] = locate(j, q);
    const NerveTuple& a = L.tuples[i][tp];
    const NerveTuple& b = L.tuples[j][tq];
    ObjectId left_end = i == 0 ? a.object : D.source(a.arrows.back());
    if (left_end != b.object) return {};
    std::size_t target;
    if (i + j == 0) {
      target = tp;
    } else {
      std::vector<MorphismId> cat = a.arrows;
      cat.insert(cat.end(), b.arrows.begin(), b.arrows.end());
      target = *L.find(cat);
    }
    const FinAlgebra& alg = A.algebra(L.to_str.object_map[a.object]);
    const SparseRow& moved = transposed[L.composite[i][tp]].row(beta);
    Vector acc = zero_vector(alg.dim());
    for (const auto& e : moved) acc = acc + e.value * alg.basis_product(alpha, e.col);
    SparseRow r;
    const std::size_t off = L.offsets[i + j][target];
    for (std::size_t k = 0; k < acc.size(); ++k)
      if (acc[k] != 0) r.push_back({off + k, acc[k]});
    return r;
  };

  out.dga.unit = zero_vector(L.dim(0));
  for (std::size_t x = 0; x < L.tuples[0].size(); ++x) {
    const Vector& u = A.algebra(L.to_str.object_map[x]).unit();
    for (std::size_t k = 0; k < u.size(); ++k) out.dga.unit[L.offsets[0][x] + k] = u[k];
  }
  return out;
}

HoUAlgebra hou_object(const FiberedModel& fm, const QftFunctor& A, ObjectId M, int N) {
  auto fiber = std::make_shared<const Fiber>(fm.fiber(M));
  CochainLayout L = make_layout(fiber->category, fiber->inclusion, A, M, N);
  L.fiber = fiber;
  return build_cochain_dga(std::make_shared<const CochainLayout>(std::move(L)), A);
}

HoRanAlgebra horan_object(const FiberedModel& fm, const QftFunctor& A, ObjectId M, int N) {
  auto uc = std::make_shared<const UnderCategory>(under_category(fm.proj(), M));
  CochainLayout L = make_layout(uc->category, uc->projection, A, M, N);
  L.under = uc;
  return build_cochain_dga(std::make_shared<const CochainLayout>(std::move(L)), A);
}

GradedLinearMap hou_morphism(const FiberedModel& fm, const QftFunctor& A, MorphismId f,
                             const HoUAlgebra& source, const HoUAlgebra& target) {
  const CochainLayout& S = *source.layout;
  const CochainLayout& T = *target.layout;
  if (fm.loc().source(f) != S.base || fm.loc().target(f) != T.base)
    throw Error("hokan", "hoU(f): base objects do not match");
  FiberIndex src(S);
  return make_map(S, T, 0, [&](Block& b, int n) {
    for (std::size_t t = 0; t < T.tuples[n].size(); ++t) {
      const NerveTuple& tu = T.tuples[n][t];
      const Lift& lift = fm.lift(T.to_str.object_map[tu.object], f);
      const QMatrix& c = A.map(lift.morphism);
      if (n == 0) {
        b.add_object(t, src.obj(lift.pullback), &c, 1);
        continue;
      }
      auto g = str_arrows(T, tu.arrows);
      b.add(t, src.arrows(pullback_tuple(fm, g, std::vector<MorphismId>(n + 1, f))), &c, 1);
    }
  });
}

GradedLinearMap horan_morphism(const FiberedModel& fm, MorphismId f, const HoRanAlgebra& source,
                               const HoRanAlgebra& target) {
  const CochainLayout& S = *source.layout;
  const CochainLayout& T = *target.layout;
  const FinCategory& loc = fm.loc();
  if (loc.source(f) != S.base || loc.target(f) != T.base)
    throw Error("hokan", "hoRan(f): base objects do not match");
  const UnderCategory& us = under(S);
  const UnderCategory& ut = under(T);
  return make_map(S, T, 0, [&](Block& b, int n) {
    for (std::size_t t = 0; t < T.tuples[n].size(); ++t) {
      const NerveTuple& tu = T.tuples[n][t];
      if (n == 0) {
        auto [Sx, h] = ut.objects[tu.object];
        b.add_object(t, under_object(us, Sx, loc.comp(h, f)), nullptr, 1);
        continue;
      }
      std::vector<MorphismId> arrows;
      for (MorphismId a : tu.arrows) {
        auto [Sx, h] = ut.objects[ut.category->source(a)];
        arrows.push_back(under_arrow(us, ut.str_morphism[a], under_object(us, Sx, loc.comp(h, f))));
      }
      b.add(t, arrows, nullptr, 1);
    }
  });
}

DgDiagram fiber_diagram(const FiberedModel& fm, const QftFunctor& A, ObjectId M, int N) {
  const Fiber& F = fm.fiber(M);
  DgDiagram X;
  X.shape = F.category;
  for (ObjectId S : F.objects) X.values.push_back(degree0_dga(A.algebra(S), N));
  for (MorphismId g = 0; g < F.morphisms.size(); ++g) {
    const TruncatedDgVec& s = X.values[F.category->source(g)].complex;
    const TruncatedDgVec& t = X.values[F.category->target(g)].complex;
    GradedLinearMap m = zero_map(s.dims, t.dims, 0);
    m.blocks[0] = A.map(F.morphisms[g]);
    X.arrows.push_back(std::move(m));
  }
  return X;
}

bool HomotopyWitness::holds() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.holds; });
}

GradedLinearMap kappa_map(const FiberedModel& fm, const HoRanAlgebra& ran, const HoUAlgebra& u) {
  const CochainLayout& R = *ran.layout;
  const CochainLayout& U = *u.layout;
  const UnderCategory& uc = under(R);
  const MorphismId id_M = fm.loc().identity(U.base);
  return make_map(R, U, 0, [&](Block& b, int n) {
    for (std::size_t t = 0; t < U.tuples[n].size(); ++t) {
      const NerveTuple& tu = U.tuples[n][t];
      if (n == 0) {
        b.add_object(t, under_object(uc, U.to_str.object_map[tu.object], id_M), nullptr, 1);
        continue;
      }
      std::vector<MorphismId> arrows;
      for (MorphismId g : str_arrows(U, tu.arrows))
        arrows.push_back(under_arrow(uc, g, under_object(uc, fm.str().source(g), id_M)));
      b.add(t, arrows, nullptr, 1);
    }
  });
}

GradedLinearMap zeta_map(const FiberedModel& fm, const QftFunctor& A, const HoUAlgebra& u,
                         const HoRanAlgebra& ran) {
  const CochainLayout& U = *u.layout;
  const CochainLayout& R = *ran.layout;
  const UnderCategory& uc = under(R);
  FiberIndex fib(U);
  return make_map(U, R, 0, [&](Block& b, int n) {
    for (std::size_t t = 0; t < R.tuples[n].size(); ++t) {
      const NerveTuple& tu = R.tuples[n][t];
      auto objs = tuple_objects(uc, tu);
      const Lift& lift = fm.lift(objs[0].first, objs[0].second);
      const QMatrix& c = A.map(lift.morphism);
      if (n == 0) {
        b.add_object(t, fib.obj(lift.pullback), &c, 1);
        continue;
      }
      std::vector<MorphismId> base;
      for (const auto& o : objs) base.push_back(o.second);
      auto pulled = pullback_tuple(fm, str_arrows(R, tu.arrows), base);
      b.add(t, fib.arrows(pulled), &c, 1);
    }
  });
}

GradedLinearMap eta_map(const FiberedModel& fm, const HoRanAlgebra& ran) {
  const CochainLayout& R = *ran.layout;
  const UnderCategory& uc = under(R);
  const MorphismId id_M = fm.loc().identity(R.base);
  // h_*: (h*S, id) → (S, h)
  auto hstar = [&](ObjectId S, MorphismId h) {
    const Lift& lift = fm.lift(S, h);
    return under_arrow(uc, lift.morphism, under_object(uc, lift.pullback, id_M));
  };
  return make_map(R, R, -1, [&](Block& b, int m) {
    const int n = m - 1;  // target degree
    if (n < 0) return;
    for (std::size_t t = 0; t < R.tuples[n].size(); ++t) {
      const NerveTuple& tu = R.tuples[n][t];
      auto objs = tuple_objects(uc, tu);
      std::vector<MorphismId> gh;  // g^h_j as arrows between (h_j*S_j, id) objects
      if (n > 0) {
        std::vector<MorphismId> base;
        for (const auto& o : objs) base.push_back(o.second);
        for (MorphismId x : pullback_tuple(fm, str_arrows(R, tu.arrows), base))
          gh.push_back(under_arrow(uc, x, under_object(uc, fm.str().source(x), id_M)));
      }
      for (int i = 0; i <= n; ++i) {
        std::vector<MorphismId> arrows(tu.arrows.begin(), tu.arrows.begin() + i);
        arrows.push_back(hstar(objs[i].first, objs[i].second));
        arrows.insert(arrows.end(), gh.begin() + i, gh.end());
        b.add(t, arrows, nullptr, sign(i));
      }
    }
  });
}

KappaZeta kappa_zeta(const FiberedModel& fm, const QftFunctor& A, const HoRanAlgebra& ran,
                     const HoUAlgebra& u) {
  const int N = u.max_degree();
  KappaZeta out;
  out.kappa = {"kappa", kappa_map(fm, ran, u), {}};
  out.zeta = {"zeta", zeta_map(fm, A, u, ran), {}};
  out.eta = {"eta", eta_map(fm, ran), {}};
  for (auto& c : check_dga_map(ran.dga, u.dga, out.kappa.map, "kappa ")) out.kappa.checks.push_back(c);
  for (auto& c : check_dga_map(u.dga, ran.dga, out.zeta.map, "zeta ")) out.zeta.checks.push_back(c);
  GradedLinearMap kz = compose(out.kappa.map, out.zeta.map);
  out.zeta.checks.push_back(compare_maps("kappa zeta = id", kz, identity_map(u.complex()), 0, N,
                                         &u.complex()));
  GradedLinearMap zk = compose(out.zeta.map, out.kappa.map);
  out.eta.checks.push_back(check_homotopy_identity(ran.complex(), ran.complex(), zk,
                                                   identity_map(ran.complex()), out.eta.map, N - 1,
                                                   "zeta kappa - id = d eta + eta d"));
  out.weak_equivalence = is_weak_equivalence(ran.complex(), u.complex(), out.kappa.map, N - 1);
  return out;
}

GradedLinearMap rho_map(const QftFunctor& A, const HoUAlgebra& u) {
  const CochainLayout& U = *u.layout;
  const FinCategory& D = *U.shape;
  return make_map(U, U, 0, [&](Block& b, int n) {
    for (std::size_t t = 0; t < U.tuples[n].size(); ++t) {
      const NerveTuple& tu = U.tuples[n][t];
      if (n == 0) {
        b.add_object(t, tu.object, nullptr, 1);
        continue;
      }
      std::vector<MorphismId> rev;
      for (auto it = tu.arrows.rbegin(); it != tu.arrows.rend(); ++it) rev.push_back(*D.inverse(*it));
      b.add(t, rev, &A.map(U.composite[n][t]), sign(static_cast<long>(n) * (n + 1) / 2));
    }
  });
}

GradedLinearMap beta_map(const HoUAlgebra& u) {
  const CochainLayout& U = *u.layout;
  const FinCategory& D = *U.shape;
  return make_map(U, U, -1, [&](Block& b, int m) {
    const int n = m - 1;
    if (n < 1) return;
    for (std::size_t t = 0; t < U.tuples[n].size(); ++t) {
      const auto& g = U.tuples[n][t].arrows;
      for (int i = 1; i <= n; ++i) {
        std::vector<MorphismId> arrows(g.begin(), g.begin() + (i - 1));
        arrows.push_back(D.comp_all(std::vector<MorphismId>(g.begin() + (i - 1), g.end())));
        for (int j = n; j >= i; --j) arrows.push_back(*D.inverse(g[j - 1]));
        b.add(t, arrows, nullptr, sign(n) * sign(static_cast<long>(n - i) * (n - i + 1) / 2));
      }
    }
  });
}

RhoBeta rho_beta(const QftFunctor& A, const HoUAlgebra& u) {
  const int N = u.max_degree();
  RhoBeta out;
  out.rho = {"rho", rho_map(A, u), {}};
  out.beta = {"beta", beta_map(u), {}};
  out.rho.checks.push_back(compare_maps("rho rho = id", compose(out.rho.map, out.rho.map),
                                        identity_map(u.complex()), 0, N, &u.complex()));
  out.beta.checks.push_back(check_homotopy_identity(u.complex(), u.complex(), out.rho.map,
                                                    identity_map(u.complex()), out.beta.map,
                                                    N - 1, "rho - id = d beta + beta d"));
  return out;
}

GradedLinearMap product_map(const CochainDga& u, bool opposite) {
  const int N = u.max_degree();
  auto dims = u.layout->dims();
  TensorIndex T(dims, dims, N);
  GradedLinearMap m{0, T.dims, dims, {}};
  for (int k = 0; k <= N; ++k) {
    QMatrix blk(dims[k], T.dims[k]);
    for (int i = 0; i <= k; ++i) {
      const int j = k - i;
      for (std::size_t p = 0; p < dims[i]; ++p)
        for (std::size_t q = 0; q < dims[j]; ++q) {
          const std::size_t col = T.index(i, p, j, q);
          SparseRow r = opposite ? u.dga.product(j, q, i, p) : u.dga.product(i, p, j, q);
          const Rational s = opposite ? sign(static_cast<long>(i) * j) : Rational(1);
          for (const auto& e : r) blk.add(e.col, col, s * e.value);
        }
    }
    m.blocks.push_back(std::move(blk));
  }
  return m;
}

CausalityWitness lambda_causality(const FiberedModel& fm, const QftFunctor& A, MorphismId f1,
                                  MorphismId f2, int N) {
  const FinCategory& loc = fm.loc();
  if (loc.target(f1) != loc.target(f2)) throw Error("hokan", "causal pair must share a target");
  HoUAlgebra u1 = hou_object(fm, A, loc.source(f1), N);
  HoUAlgebra u2 = hou_object(fm, A, loc.source(f2), N);
  HoUAlgebra u = hou_object(fm, A, loc.target(f1), N);
  GradedLinearMap L = tensor_maps(hou_morphism(fm, A, f1, u1, u), hou_morphism(fm, A, f2, u2, u), N);
  GradedLinearMap mu = product_map(u, false);
  GradedLinearMap mu_op = product_map(u, true);
  GradedLinearMap rho = rho_map(A, u);
  GradedLinearMap beta = beta_map(u);
  GradedLinearMap id = identity_map(u.complex());

  CausalityWitness out;
  out.rho_identity = compare_maps("rho mu L = mu^op (rho x rho) L", compose(rho, compose(mu, L)),
                           compose(mu_op, compose(tensor_maps(rho, rho, N), L)), 0, N);
  GradedLinearMap lambda =
      compose(compose(mu_op, tensor_maps(rho, beta, N) + tensor_maps(beta, id, N)) -
                  compose(beta, mu),
              L);
  TruncatedDgVec source = graded_tensor(u1.complex(), u2.complex(), N);
  GradedLinearMap F = compose(mu, L), G = compose(mu_op, L);
  out.lambda = {"lambda", lambda, {}};
  out.lambda.checks.push_back(check_homotopy_identity(source, u.complex(), F, G, lambda, N - 1,
                                                      "[.,.] L = d lambda + lambda d"));
  GradedLinearMap comm = F - G;
  for (int k = 0; k <= N - 1; ++k) {
    QMatrix c = comm.at(k).transpose();
    for (std::size_t i = 0; i < c.rows(); ++i)
      if (!c.row(i).empty()) ++out.nonzero_commutators;
  }
  return out;
}

namespace {

// hoRan/hoU objects over every base object touched by a chain of morphisms.
struct ChainObjects {
  std::map<ObjectId, HoRanAlgebra> ran;
  std::map<ObjectId, HoUAlgebra> u;

  ChainObjects(const FiberedModel& fm, const QftFunctor& A, const std::vector<MorphismId>& fs,
               int N) {
    for (MorphismId f : fs)
      for (ObjectId M : {fm.loc().source(f), fm.loc().target(f)})
        if (!ran.count(M)) {
          ran.emplace(M, horan_object(fm, A, M, N));
          u.emplace(M, hou_object(fm, A, M, N));
        }
  }
};

// κ hoRan(f_k) η … η hoRan(f_1) ζ
GradedLinearMap gamma_chain(const FiberedModel& fm, const QftFunctor& A,
                            const std::vector<MorphismId>& fs, ChainObjects& C) {
  const FinCategory& loc = fm.loc();
  ObjectId M = loc.source(fs.front());
  GradedLinearMap m = zeta_map(fm, A, C.u.at(M), C.ran.at(M));
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i > 0) m = compose(eta_map(fm, C.ran.at(M)), m);
    ObjectId next = loc.target(fs[i]);
    m = compose(horan_morphism(fm, fs[i], C.ran.at(M), C.ran.at(next)), m);
    M = next;
  }
  return compose(kappa_map(fm, C.ran.at(M), C.u.at(M)), m);
}

}  // namespace

GradedLinearMap gamma2_map(const FiberedModel& fm, const QftFunctor& A, MorphismId f,
                           MorphismId f_prime, int N) {
  ChainObjects C(fm, A, {f, f_prime}, N);
  return gamma_chain(fm, A, {f, f_prime}, C);
}

FunctorialityWitness up_to_homotopy_functoriality(const FiberedModel& fm, const QftFunctor& A,
                                                  MorphismId f, MorphismId f_prime,
                                                  std::optional<MorphismId> f_second, int N) {
  const FinCategory& loc = fm.loc();
  std::vector<MorphismId> fs{f, f_prime};
  if (f_second) fs.push_back(*f_second);
  ChainObjects C(fm, A, fs, N);
  auto U = [&](MorphismId g) {
    return hou_morphism(fm, A, g, C.u.at(loc.source(g)), C.u.at(loc.target(g)));
  };
  const MorphismId ff = loc.comp(f_prime, f);
  const HoUAlgebra& u0 = C.u.at(loc.source(f));
  const HoUAlgebra& u2 = C.u.at(loc.target(f_prime));

  FunctorialityWitness out;
  GradedLinearMap g2 = gamma_chain(fm, A, {f, f_prime}, C);
  out.gamma2 = {"gamma2", g2, {}};
  out.gamma2.checks.push_back(check_homotopy_identity(
      u0.complex(), u2.complex(), compose(U(f_prime), U(f)), U(ff), g2, N - 1,
      "hoU(f') hoU(f) - hoU(f' f) = d gamma2 + gamma2 d"));

  if (f_second) {
    const MorphismId f2 = *f_second;
    const HoUAlgebra& u3 = C.u.at(loc.target(f2));
    GradedLinearMap g3 = gamma_chain(fm, A, {f, f_prime, f2}, C);
    GradedLinearMap lhs = gamma_chain(fm, A, {ff, f2}, C) + compose(U(f2), g2) -
                          gamma_chain(fm, A, {f, loc.comp(f2, f_prime)}, C) -
                          compose(gamma_chain(fm, A, {f_prime, f2}, C), U(f));
    GradedLinearMap rhs = compose(differential_map(u3.complex()), g3) -
                          compose(g3, differential_map(u0.complex()));
    HomotopyWitness w{"gamma3", g3, {}};
    w.checks.push_back(compare_maps("gamma3 coherence", lhs, rhs, 0, N - 2, &u0.complex()));
    out.gamma3 = std::move(w);
  }
  return out;
}

TimeSliceWitness ext_pullback(const FiberedModel& fm, const LocStructure& loc,
                              const QftFunctor& A, MorphismId f, int N, int phibar_first_index) {
  if (phibar_first_index != 0 && phibar_first_index != 1)
    throw Error("hokan", "phibar sum starts at 0 or 1");
  if (!loc.is_cauchy(f)) throw Error("hokan", "ext_f* needs a Cauchy morphism");
  const FinCategory& L = fm.loc();
  const FinCategory& str = fm.str();
  ExtensionData ext = extension_data(fm, loc, f);
  ExtensionWitnesses w = extension_witnesses(fm, loc, ext);
  HoUAlgebra u = hou_object(fm, A, L.source(f), N);
  HoUAlgebra up = hou_object(fm, A, L.target(f), N);
  const CochainLayout& U = *u.layout;
  const CochainLayout& Up = *up.layout;
  FiberIndex fu(U), fup(Up);

  std::map<ObjectId, QMatrix> sharp_inv;
  for (const auto& [S, e] : ext.objects) {
    const QMatrix& m = A.map(e.second);
    if (!is_invertible(m))
      throw Error("hokan", "A(f#) is singular at " + str.object_name(S));
    sharp_inv.emplace(S, inverse(m));
  }
  auto ext_of = [&](const std::vector<MorphismId>& g) {
    std::vector<MorphismId> out;
    for (MorphismId x : g) out.push_back(ext.morphisms.at(x));
    return out;
  };

  GradedLinearMap ext_star = make_map(Up, U, 0, [&](Block& b, int n) {
    for (std::size_t t = 0; t < U.tuples[n].size(); ++t) {
      const NerveTuple& tu = U.tuples[n][t];
      const ObjectId S = U.to_str.object_map[tu.object];
      const QMatrix* c = &sharp_inv.at(S);
      if (n == 0)
        b.add_object(t, fup.obj(ext.objects.at(S).first), c, 1);
      else
        b.add(t, fup.arrows(ext_of(str_arrows(U, tu.arrows))), c, 1);
    }
  });

  auto objects_of = [&](const CochainLayout& Lay, const NerveTuple& tu) {
    std::vector<ObjectId> objs{Lay.to_str.object_map[tu.object]};
    for (MorphismId a : tu.arrows) objs.push_back(Lay.to_str.object_map[Lay.shape->source(a)]);
    return objs;
  };

  GradedLinearMap phi = make_map(U, U, -1, [&](Block& b, int m) {
    const int n = m - 1;
    if (n < 0) return;
    for (std::size_t t = 0; t < U.tuples[n].size(); ++t) {
      const NerveTuple& tu = U.tuples[n][t];
      auto objs = objects_of(U, tu);
      auto g = str_arrows(U, tu.arrows);
      for (int i = 0; i <= n; ++i) {
        std::vector<MorphismId> arrows(g.begin(), g.begin() + i);
        arrows.push_back(fm.fiber_inverse(w.g.at(objs[i])));
        std::vector<MorphismId> rest = ext_of(std::vector<MorphismId>(g.begin() + i, g.end()));
        if (!rest.empty()) {
          auto pulled = pullback_tuple(fm, rest, std::vector<MorphismId>(rest.size() + 1, f));
          arrows.insert(arrows.end(), pulled.begin(), pulled.end());
        }
        b.add(t, fu.arrows(arrows), nullptr, sign(i));
      }
    }
  });

  GradedLinearMap phibar = make_map(Up, Up, -1, [&](Block& b, int m) {
    const int n = m - 1;
    if (n < 0) return;
    for (std::size_t t = 0; t < Up.tuples[n].size(); ++t) {
      const NerveTuple& tu = Up.tuples[n][t];
      auto objs = objects_of(Up, tu);
      auto g = str_arrows(Up, tu.arrows);
      for (int i = (n == 0 ? 0 : phibar_first_index); i <= n; ++i) {
        std::vector<MorphismId> arrows(g.begin(), g.begin() + i);
        arrows.push_back(fm.fiber_inverse(w.g_prime.at(objs[i])));
        std::vector<MorphismId> rest(g.begin() + i, g.end());
        if (!rest.empty()) {
          auto pulled = pullback_tuple(fm, rest, std::vector<MorphismId>(rest.size() + 1, f));
          auto e = ext_of(pulled);
          arrows.insert(arrows.end(), e.begin(), e.end());
        }
        b.add(t, fup.arrows(arrows), nullptr, sign(i));
      }
    }
  });

  GradedLinearMap Uf = hou_morphism(fm, A, f, u, up);
  TimeSliceWitness out;
  out.phibar_first_index = phibar_first_index;
  out.ext_pullback = {"ext*", ext_star, check_dga_map(up.dga, u.dga, ext_star, "ext* ")};
  out.phi = {"phi", phi, {}};
  out.phi.checks.push_back(check_homotopy_identity(u.complex(), u.complex(), compose(ext_star, Uf),
                                                   identity_map(u.complex()), phi, N - 1,
                                                   "ext* hoU(f) - id = d phi + phi d"));
  out.phibar = {"phibar", phibar, {}};
  out.phibar.checks.push_back(check_homotopy_identity(
      up.complex(), up.complex(), compose(Uf, ext_star), identity_map(up.complex()), phibar, N - 1,
      "hoU(f) ext* - id = d phibar + phibar d"));
  out.weak_equivalence = is_weak_equivalence(u.complex(), up.complex(), Uf, N - 1);
  return out;
}

H0Comparison h0_comparison(const HoUAlgebra& u, const InvariantSubalgebra& U) {
  H0Comparison out;
  const TruncatedDgVec& V = u.complex();
  if (U.ambient_dim() != V.dim(0)) {
    out.detail = "ambient dimensions differ";
    return out;
  }
  for (std::size_t s = 0; s < U.slot_objects.size(); ++s)
    if (U.slot_objects[s] != u.layout->to_str.object_map[s] ||
        U.offsets[s] != u.layout->offsets[0][s]) {
      out.detail = "slot layouts differ";
      return out;
    }
  Subspace ker = kernel_basis(V.d[0]);
  out.dim = ker.dim();
  out.same_subspace = ker == U.subspace;
  if (!out.same_subspace) {
    out.detail = "ker d0 has dimension " + std::to_string(ker.dim()) + ", U(M) has " +
                 std::to_string(U.dim());
    return out;
  }
  out.same_structure = true;
  for (std::size_t i = 0; i < ker.dim() && out.same_structure; ++i)
    for (std::size_t j = 0; j < ker.dim() && out.same_structure; ++j) {
      auto c = ker.coordinates(u.dga.multiply(0, ker.vector(i), 0, ker.vector(j)));
      Vector expected = U.algebra.basis_product(i, j);
      if (!c || *c != expected) {
        out.same_structure = false;
        out.detail = "structure constants differ at (" + std::to_string(i) + ", " +
                     std::to_string(j) + ")";
      }
    }
  auto unit = ker.coordinates(u.dga.unit);
  if (out.same_structure && (!unit || *unit != U.algebra.unit())) {
    out.same_structure = false;
    out.detail = "units differ";
  }
  return out;
}

IdentityCheck cohomology_composition(const HoUAlgebra& a, const HoUAlgebra& b,
                                     const HoUAlgebra& c, const GradedLinearMap& f,
                                     const GradedLinearMap& g, const GradedLinearMap& gf,
                                     const std::string& name) {
  const int top = a.max_degree() - 1;
  IdentityCheck out{name, true, 0, top, {}};
  for (int n = 0; n <= top && out.holds; ++n) {
    QMatrix lhs = induced_on_cohomology(b.complex(), c.complex(), g, n) *
                  induced_on_cohomology(a.complex(), b.complex(), f, n);
    if (lhs != induced_on_cohomology(a.complex(), c.complex(), gf, n)) {
      out.holds = false;
      out.counterexample = "H^" + std::to_string(n);
    }
  }
  return out;
}

bool is_exact(const TruncatedDgVec& v, int n, const Vector& x) {
  if (is_zero(x)) return true;
  if (n == 0) return false;
  return solve(v.differential(n - 1), x).has_value();
}

IdentityCheck cohomology_causality(const HoUAlgebra& u1, const HoUAlgebra& u2,
                                   const HoUAlgebra& u, const GradedLinearMap& L1,
                                   const GradedLinearMap& L2, const std::string& name) {
  const int top = u.max_degree() - 1;
  IdentityCheck out{name, true, 0, top, {}};
  for (int i = 0; i <= top && out.holds; ++i) {
    Cohomology h1 = cohomology(u1.complex(), i);
    for (int j = 0; i + j <= top && out.holds; ++j) {
      Cohomology h2 = cohomology(u2.complex(), j);
      for (std::size_t p = 0; p < h1.dim && out.holds; ++p)
        for (std::size_t q = 0; q < h2.dim && out.holds; ++q) {
          Vector x = L1.at(i).apply(h1.representatives[p]);
          Vector y = L2.at(j).apply(h2.representatives[q]);
          Vector c = u.dga.multiply(i, x, j, y) -
                     sign(static_cast<long>(i) * j) * u.dga.multiply(j, y, i, x);
          if (!is_exact(u.complex(), i + j, c)) {
            out.holds = false;
            out.counterexample = "classes " + std::to_string(p) + " in H^" + std::to_string(i) +
                                 " and " + std::to_string(q) + " in H^" + std::to_string(j) +
                                 ": commutator " + format_vector(c);
          }
        }
    }
  }
  return out;
}

IdentityCheck same_on_cohomology(const TruncatedDgVec& a, const TruncatedDgVec& b,
                                 const GradedLinearMap& f, const GradedLinearMap& g,
                                 const std::string& name) {
  const int top = std::min(a.max_degree, b.max_degree) - 1;
  IdentityCheck out{name, true, 0, top, {}};
  for (int n = 0; n <= top && out.holds; ++n)
    if (induced_on_cohomology(a, b, f, n) != induced_on_cohomology(a, b, g, n)) {
      out.holds = false;
      out.counterexample = "H^" + std::to_string(n);
    }
  return out;
}

}  // namespace kanqft

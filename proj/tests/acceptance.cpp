// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "kanqft/error.hpp"
#include "kanqft/hokan.hpp"
#include "kanqft/kan.hpp"
#include "kanqft/model.hpp"
#include "z2_bar_oracle.hpp"

using namespace kanqft;

namespace {

constexpr int N = 4;

struct Fx {
  std::string name;
  Model m;
  FiberedModel fm;
  FiberedModel reversed;
  const FinCategory& L() const { return *m.loc_category; }
};

std::vector<std::unique_ptr<Fx>> load_all() {
  std::vector<std::unique_ptr<Fx>> out;
  for (const auto& name : fixture_names()) {
    Model m = validate_model(fixture(name));
    FiberedModel fm = fibered(m), rev = fibered(m, TieBreak::Greatest);
    out.push_back(std::make_unique<Fx>(Fx{name, std::move(m), std::move(fm), std::move(rev)}));
  }
  return out;
}

const Fx& get(const std::vector<std::unique_ptr<Fx>>& all, const std::string& name) {
  for (const auto& f : all)
    if (f->name == name) return *f;
  throw Error("acceptance", "no fixture " + name);
}

// First failure, or empty when everything holds.
struct Verdict {
  std::string failure;
  std::size_t checked = 0;

  void expect(bool ok, const std::string& what) {
    ++checked;
    if (!ok && failure.empty()) failure = what;
  }
  void expect(const IdentityCheck& c, const std::string& where) {
    expect(c.holds, where + ": " + c.name + (c.counterexample.empty() ? "" : " (" + c.counterexample + ")"));
  }
  void expect(const std::vector<IdentityCheck>& cs, const std::string& where) {
    for (const auto& c : cs) expect(c, where);
  }
  void expect(const HomotopyWitness& w, const std::string& where) { expect(w.checks, where + " " + w.name); }
};

bool same_blocks(const GradedLinearMap& a, const GradedLinearMap& b) { return a.blocks == b.blocks; }

std::vector<HoUAlgebra> all_hou(const Fx& x, int n = N) {
  std::vector<HoUAlgebra> u;
  for (ObjectId M = 0; M < x.L().num_objects(); ++M) u.push_back(hou_object(x.fm, x.m.A, M, n));
  return u;
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  ::pclose(p);
  return out;
}

using Criterion = std::function<void(const std::vector<std::unique_ptr<Fx>>&, Verdict&)>;

void structural(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const auto& x : all)
    for (ObjectId M = 0; M < x->L().num_objects(); ++M) {
      std::string at = x->name + " " + x->L().object_name(M);
      HoUAlgebra u = hou_object(x->fm, x->m.A, M, N);
      v.expect(check_structure(u.dga, "hoU "), at);
      v.expect(check_structure(horan_object(x->fm, x->m.A, M, N).dga, "hoRan "), at);
      v.expect(check_structure(holim_dgalg(fiber_diagram(x->fm, x->m.A, M, N), N), "holim "), at);
      v.expect(check_structure(graded_tensor_dga(u.dga, u.dga, N), "hoU⊗hoU "), at);
    }
}

void kan_recovery(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const auto& x : all)
    for (ObjectId M = 0; M < x->L().num_objects(); ++M) {
      std::string at = x->name + " " + x->L().object_name(M);
      H0Comparison c = h0_comparison(hou_object(x->fm, x->m.A, M, N), u_object(x->fm, x->m.A, M));
      v.expect(c.same_subspace, at + ": ker d0 differs from U(M) " + c.detail);
      v.expect(c.same_structure, at + ": structure constants differ " + c.detail);
      if (x->name == "bz2-matrix") v.expect(c.dim == 2, at + ": dim U = " + std::to_string(c.dim));
    }
}

void cohomology_oracle(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  const Fx& a = get(all, "bz2-matrix");
  HoUAlgebra u = hou_object(a.fm, a.m.A, 0, N);
  for (int n = 0; n < N; ++n) {
    std::size_t h = cohomology(u.complex(), n).dim, brute = z2_oracle::brute_cohomology(n);
    std::string at = "H^" + std::to_string(n) + " = " + std::to_string(h);
    v.expect(h == (n == 0 ? 2u : 0u), at);
    v.expect(h == brute, at + " but the bar complex gives " + std::to_string(brute));
  }
}

void kappa_iso_check(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const auto& x : all) {
    for (ObjectId M = 0; M < x->L().num_objects(); ++M) {
      std::string at = x->name + " " + x->L().object_name(M);
      InvariantSubalgebra u = u_object(x->fm, x->m.A, M);
      RanUnderAlgebra r = ran_under(x->fm, x->m.A, M);
      KappaIso k = kappa_iso(x->fm, x->m.A, M, r, u);
      v.expect(k.composites_identity, at + ": κ and its inverse do not compose to identities");
      v.expect(k.multiplicative, at + ": κ is not multiplicative");
      v.expect(u_object(x->reversed, x->m.A, M).subspace == u.subspace, at + ": U(M) depends on the cleavage");
    }
    for (const auto& f : check_kan_structure(x->fm, x->reversed, x->m.A, kan_functor(x->fm, x->m.A)))
      v.expect(f.holds, x->name + ": " + f.name + " " + f.detail);
  }
}

void biconditional(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const auto& x : all) {
    FlabbinessReport flab = classify_flabbiness(x->fm, x->m.loc);
    StrAxiomReport str = check_axioms_on_str(x->fm, x->m.loc, x->m.A);
    UAxiomReport ua = check_u_axioms(x->fm, x->m.loc, x->m.A, kan_functor(x->fm, x->m.A), flab, str);
    v.expect(ua.biconditional_consistent, x->name + ": flabbiness and isotony of U disagree");
    if (x->name == "nonflabby") {
      v.expect(!flab.flabby.value, x->name + ": reported flabby");
      v.expect(!ua.isotony.holds && ua.isotony.detail.find("(0, 1)") != std::string::npos,
               x->name + ": isotony should fail with kernel element (0, 1), got '" + ua.isotony.detail + "'");
    } else {
      v.expect(flab.flabby.value, x->name + ": not flabby " + flab.flabby.counterexample);
      v.expect(ua.isotony.holds, x->name + ": isotony fails " + ua.isotony.detail);
    }
    if (str.causality.holds) v.expect(ua.causality.holds, x->name + ": causality of U fails " + ua.causality.detail);
    if (x->name == "cauchy-z2") {
      v.expect(flab.strongly_cauchy_flabby.value, x->name + ": not strongly Cauchy flabby");
      v.expect(ua.time_slice.holds, x->name + ": time-slice of U fails " + ua.time_slice.detail);
    }
  }
}

void kappa_zeta_check(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const auto& x : all) {
    std::vector<HoUAlgebra> u = all_hou(*x);
    for (ObjectId M = 0; M < x->L().num_objects(); ++M) {
      std::string at = x->name + " " + x->L().object_name(M);
      KappaZeta kz = kappa_zeta(x->fm, x->m.A, horan_object(x->fm, x->m.A, M, N), u[M]);
      v.expect(kz.weak_equivalence, at + ": κ is not a cohomology isomorphism below N");
      v.expect(kz.kappa, at);
      v.expect(kz.zeta, at);
      v.expect(kz.eta, at);
    }
  }
}

void rho_check(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const char* name : {"bz2-matrix", "cauchy-z2"}) {
    const Fx& x = get(all, name);
    std::vector<HoUAlgebra> u = all_hou(x);
    for (ObjectId M = 0; M < x.L().num_objects(); ++M) {
      RhoBeta rb = rho_beta(x.m.A, u[M]);
      std::string at = x.name + " " + x.L().object_name(M);
      v.expect(rb.rho, at);
      v.expect(rb.beta, at);
    }
  }
}

void causality_check(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  const Fx& b = get(all, "disjoint-wedge");
  v.expect(!b.m.loc.causal_cospans.empty(), "disjoint-wedge declares no causal cospan");
  for (const auto& [f1, f2] : b.m.loc.causal_cospans) {
    CausalityWitness w = lambda_causality(b.fm, b.m.A, f1, f2, N);
    v.expect(w.rho_identity, "disjoint-wedge");
    v.expect(w.lambda, "disjoint-wedge");
  }
  const Fx& bp = get(all, "disjoint-wedge-prime");
  v.expect(!check_axioms_on_str(bp.fm, bp.m.loc, bp.m.A).causality.holds,
           "disjoint-wedge-prime passes causality on Str");
}

void functoriality_check(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const auto& x : all) {
    std::vector<HoUAlgebra> u = all_hou(*x);
    for (ObjectId M = 0; M < x->L().num_objects(); ++M)
      v.expect(same_blocks(hou_morphism(x->fm, x->m.A, x->L().identity(M), u[M], u[M]),
                           identity_map(u[M].complex())),
               x->name + ": hoU(id) is not the identity");
  }
  const Fx& e = get(all, "chain");
  const auto& L = e.L();
  std::size_t triples = 0;
  for (MorphismId f = 0; f < L.num_morphisms(); ++f)
    for (MorphismId g = 0; g < L.num_morphisms(); ++g) {
      if (L.is_identity(f) || L.is_identity(g) || L.source(g) != L.target(f)) continue;
      std::string at = "chain " + L.morphism_name(f) + ", " + L.morphism_name(g);
      v.expect(up_to_homotopy_functoriality(e.fm, e.m.A, f, g, std::nullopt, N).gamma2, at);
      for (MorphismId h = 0; h < L.num_morphisms(); ++h) {
        if (L.is_identity(h) || L.source(h) != L.target(g)) continue;
        FunctorialityWitness w = up_to_homotopy_functoriality(e.fm, e.m.A, f, g, h, N);
        v.expect(w.gamma3.has_value(), at + ": no γ₃");
        if (w.gamma3) v.expect(*w.gamma3, at + ", " + L.morphism_name(h));
        ++triples;
      }
    }
  v.expect(triples > 0, "chain has no composable triple");
}

void time_slice_check(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  const Fx& d = get(all, "cauchy-z2");
  std::size_t seen = 0;
  for (MorphismId f = 0; f < d.L().num_morphisms(); ++f) {
    if (d.L().is_identity(f) || !d.m.loc.is_cauchy(f)) continue;
    ++seen;
    std::string at = "cauchy-z2 " + d.L().morphism_name(f);
    TimeSliceWitness w = ext_pullback(d.fm, d.m.loc, d.m.A, f, N);
    v.expect(w.ext_pullback, at);
    v.expect(w.phi, at);
    v.expect(w.phibar, at);
    v.expect(w.weak_equivalence, at + ": hoU(f) is not a weak equivalence");
  }
  v.expect(seen > 0, "cauchy-z2 has no Cauchy morphism");
}

void cohomology_strictness(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  const Fx& e = get(all, "chain");
  const auto& L = e.L();
  std::vector<HoUAlgebra> u = all_hou(e);
  auto hou = [&](MorphismId f) { return hou_morphism(e.fm, e.m.A, f, u[L.source(f)], u[L.target(f)]); };
  for (MorphismId f = 0; f < L.num_morphisms(); ++f)
    for (MorphismId g = 0; g < L.num_morphisms(); ++g) {
      if (L.source(g) != L.target(f)) continue;
      v.expect(cohomology_composition(u[L.source(f)], u[L.target(f)], u[L.target(g)], hou(f), hou(g),
                                      hou(L.comp(g, f)), L.morphism_name(g) + "∘" + L.morphism_name(f)),
               "chain");
    }
  const Fx& b = get(all, "disjoint-wedge");
  std::vector<HoUAlgebra> ub = all_hou(b);
  const auto& Lb = b.L();
  for (const auto& [f1, f2] : b.m.loc.causal_cospans) {
    auto map = [&](MorphismId f) { return hou_morphism(b.fm, b.m.A, f, ub[Lb.source(f)], ub[Lb.target(f)]); };
    v.expect(cohomology_causality(ub[Lb.source(f1)], ub[Lb.source(f2)], ub[Lb.target(f1)], map(f1), map(f2),
                                  "H commutators"),
             "disjoint-wedge");
  }
}

void truncation(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const auto& x : all)
    for (ObjectId M = 0; M < x->L().num_objects(); ++M) {
      std::string at = x->name + " " + x->L().object_name(M);
      for (bool ran : {false, true}) {
        CochainDga a = ran ? horan_object(x->fm, x->m.A, M, N) : hou_object(x->fm, x->m.A, M, N);
        CochainDga b = ran ? horan_object(x->fm, x->m.A, M, N + 2) : hou_object(x->fm, x->m.A, M, N + 2);
        std::string what = at + (ran ? " hoRan" : " hoU");
        for (int n = 0; n <= N; ++n) {
          v.expect(a.complex().dim(n) == b.complex().dim(n), what + ": dimension in degree " + std::to_string(n));
          if (n < N) {
            v.expect(a.complex().d[n] == b.complex().d[n], what + ": d in degree " + std::to_string(n));
            Cohomology ha = cohomology(a.complex(), n), hb = cohomology(b.complex(), n);
            v.expect(ha.dim == hb.dim && ha.representatives == hb.representatives,
                     what + ": cohomology in degree " + std::to_string(n));
          }
          for (int q = 0; n + q <= N; ++q)
            v.expect(a.dga.product_matrix(n, q) == b.dga.product_matrix(n, q), what + ": products");
        }
        v.expect(kernel_basis(a.complex().d[0]) == kernel_basis(b.complex().d[0]), what + ": ker d0");
      }
    }
}

void determinism(const std::vector<std::unique_ptr<Fx>>& all, Verdict& v) {
  for (const auto& x : all) {
    std::string cmd = std::string("'") + KANQFT_CLI + "' verify --fixture " + x->name + " 2>/dev/null";
    std::string a = capture(cmd), b = capture(cmd);
    v.expect(!a.empty() && a == b, x->name + ": verify reports differ between runs");
    std::string md = std::string("'") + KANQFT_CLI + "' verify --format md --fixture " + x->name + " 2>/dev/null";
    v.expect(capture(md) == capture(md), x->name + ": markdown reports differ between runs");
  }
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, Criterion>> criteria = {
      {"structure of every constructed dga (d^2, Leibniz, associativity, unit)", structural},
      {"ker d0 of hoU(M) recovers U(M); bz2-matrix has dimension 2", kan_recovery},
      {"bz2-matrix cohomology H0 = 2, H^n = 0, against the Z2 bar complex", cohomology_oracle},
      {"kappa: Ran(M) -> U(M) is inverse to its explicit inverse; U(M) cleavage independent", kappa_iso_check},
      {"flabbiness decides isotony; causality and time-slice of U", biconditional},
      {"kappa is a weak equivalence, kappa zeta = id, zeta kappa - id = eta d + d eta", kappa_zeta_check},
      {"rho rho = id and rho - id = beta d + d beta", rho_check},
      {"hoU causality up to lambda on disjoint-wedge; disjoint-wedge-prime fails causality", causality_check},
      {"hoU(id) = id, gamma2 and gamma3 on chain", functoriality_check},
      {"ext pullback, phi and phibar on cauchy-z2; hoU(f) weak equivalence", time_slice_check},
      {"strict composition and vanishing commutators on cohomology", cohomology_strictness},
      {"truncation at N agrees with N+2", truncation},
      {"verify reports are byte-identical across runs", determinism},
  };

  std::vector<std::unique_ptr<Fx>> all;
  try {
    all = load_all();
  } catch (const std::exception& e) {
    std::cout << "FAIL fixtures do not load: " << e.what() << "\n";
    return 1;
  }

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].second(all, v);
    } catch (const std::exception& e) {
      v.failure = std::string("threw: ") + e.what();
    }
    bool ok = v.failure.empty();
    failed += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << i + 1 << ". " << criteria[i].first << " [" << v.checked
              << " checks]";
    if (!ok) std::cout << " -- " << v.failure;
    std::cout << "\n";
  }
  return failed ? 1 : 0;
}

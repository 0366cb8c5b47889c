#include "kanqft/report.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "kanqft/error.hpp"
#include "kanqft/finalg.hpp"
#include "kanqft/hokan.hpp"
#include "kanqft/kan.hpp"

namespace kanqft {

namespace {

Json matrix_json(const QMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (const auto& x : m.dense_row(i)) r.push_back(to_string(x));
    rows.push_back(r);
  }
  return rows;
}

Json vector_json(const Vector& v) {
  Json r = Json::array();
  for (const auto& x : v) r.push_back(to_string(x));
  return r;
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : sep) + x;
  return out;
}

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "?";
}

// Everything a command needs, built once.
struct Context {
  const RunOptions& opts;
  Model model;
  FiberedModel fm;
  FiberedModel reversed;
  Report report;

  Context(const ModelSpec& spec, const RunOptions& o, const std::string& command)
      : opts(o),
        model(validate_model(spec)),
        fm(fibered(model, o.order)),
        reversed(fibered(model, o.order == TieBreak::Least ? TieBreak::Greatest : TieBreak::Least)) {
    report.command = command;
    report.model = model.name;
    report.max_degree = o.max_degree;
    report.seed_order = o.order == TieBreak::Least ? "normal" : "reversed";
  }

  const FinCategory& loc() const { return *model.loc_category; }
  const FinCategory& str() const { return *model.str_category; }
  int N() const { return opts.max_degree; }

  void add(const std::string& name, CheckKind kind, bool holds, const std::string& detail = {},
           std::optional<std::pair<int, int>> degrees = std::nullopt) {
    report.checks.push_back(
        {name, kind, holds ? CheckStatus::Pass : CheckStatus::Fail, degrees, holds ? "" : detail});
  }
  void add_detail(const std::string& name, CheckKind kind, bool holds, const std::string& detail) {
    report.checks.push_back({name, kind, holds ? CheckStatus::Pass : CheckStatus::Fail,
                             std::nullopt, detail});
  }
  void skip(const std::string& name, const std::string& why) {
    report.checks.push_back({name, CheckKind::Assertion, CheckStatus::Skipped, std::nullopt, why});
  }
  void add(const std::string& prefix, const IdentityCheck& c) {
    std::optional<std::pair<int, int>> deg;
    if (c.hi >= c.lo) deg = std::make_pair(c.lo, c.hi);
    add(prefix + c.name, CheckKind::Assertion, c.holds, c.counterexample, deg);
  }
  void add(const std::string& prefix, const std::vector<IdentityCheck>& cs) {
    for (const auto& c : cs) add(prefix, c);
  }
  void add(const std::string& prefix, const HomotopyWitness& w) { add(prefix, w.checks); }

  std::vector<MorphismId> non_identities() const {
    std::vector<MorphismId> out;
    for (MorphismId f = 0; f < loc().num_morphisms(); ++f)
      if (!loc().is_identity(f)) out.push_back(f);
    return out;
  }
};

std::string first_violation(const AxiomCheck& c) {
  return c.violations.empty() ? std::string() : c.violations.front();
}

void str_axioms(Context& C, const StrAxiomReport& a) {
  C.add("a-unit-nonzero", CheckKind::Finding, a.unit_nonzero.holds, first_violation(a.unit_nonzero));
  C.add("a-isotony", CheckKind::Finding, a.isotony.holds, first_violation(a.isotony));
  C.add("a-causality", CheckKind::Finding, a.causality.holds, first_violation(a.causality));
  C.add("a-time-slice", CheckKind::Finding, a.time_slice.holds, first_violation(a.time_slice));
}

void flabbiness(Context& C, const FlabbinessReport& f) {
  C.add("flabby", CheckKind::Finding, f.flabby.value, f.flabby.counterexample);
  C.add("cauchy-flabby", CheckKind::Finding, f.cauchy_flabby.value, f.cauchy_flabby.counterexample);
  C.add("strongly-cauchy-flabby", CheckKind::Finding, f.strongly_cauchy_flabby.value,
        f.strongly_cauchy_flabby.counterexample);
}

void u_axioms(Context& C, const UAxiomReport& r, const StrAxiomReport& a) {
  C.add(r.causality.name, a.causality.holds ? CheckKind::Assertion : CheckKind::Finding,
        r.causality.holds, r.causality.detail);
  C.add(r.isotony.name, CheckKind::Finding, r.isotony.holds, r.isotony.detail);
  if (r.biconditional_asserted)
    C.add("u-isotony iff flabby", CheckKind::Assertion, r.biconditional_consistent,
          std::string("isotony ") + (r.isotony.holds ? "holds" : "fails") + ", flabby = " +
              (r.flabby ? "true" : "false"));
  else
    C.skip("u-isotony iff flabby", "A lacks isotony or has a zero unit");
  C.add(r.time_slice.name, r.time_slice_asserted ? CheckKind::Assertion : CheckKind::Finding,
        r.time_slice.holds, r.time_slice.detail);
  C.add(r.unit_nonzero.name, CheckKind::Finding, r.unit_nonzero.holds, r.unit_nonzero.detail);
  for (const auto& p : r.pi0_checks)
    C.add_detail(p.name, CheckKind::Assertion, p.holds, p.detail);
}

void cmd_validate(Context& C) {
  C.add("model validates", CheckKind::Assertion, true);
  C.add("fibered in groupoids with identity cleavage", CheckKind::Assertion, true);
  str_axioms(C, check_axioms_on_str(C.fm, C.model.loc, C.model.A));
  Json t;
  t["loc"] = {{"objects", C.loc().num_objects()}, {"morphisms", C.loc().num_morphisms()}};
  t["str"] = {{"objects", C.str().num_objects()}, {"morphisms", C.str().num_morphisms()}};
  t["fibers"] = Json::object();
  for (ObjectId M = 0; M < C.loc().num_objects(); ++M) {
    const Fiber& F = C.fm.fiber(M);
    t["fibers"][C.loc().object_name(M)] = {
        {"objects", F.objects.size()},
        {"morphisms", F.morphisms.size()},
        {"components", connected_components(*F.category).size()}};
  }
  C.report.tables = t;
}

void cmd_classify(Context& C) {
  flabbiness(C, classify_flabbiness(C.fm, C.model.loc));
}

void u_tables(Context& C, const KanFunctorData& U) {
  Json objs = Json::object();
  for (ObjectId M = 0; M < C.loc().num_objects(); ++M) {
    const KanAlgebra& K = U.objects[M];
    Json basis = Json::array();
    for (std::size_t i = 0; i < K.dim(); ++i) basis.push_back(vector_json(K.subspace.vector(i)));
    objs[C.loc().object_name(M)] = {{"dim", K.dim()},
                                    {"slots", K.slot_names},
                                    {"basis", basis},
                                    {"commutative", [&] {
                                       for (std::size_t i = 0; i < K.dim(); ++i)
                                         for (std::size_t j = 0; j < K.dim(); ++j)
                                           if (K.algebra.basis_product(i, j) !=
                                               K.algebra.basis_product(j, i))
                                             return false;
                                       return true;
                                     }()}};
  }
  Json maps = Json::object();
  for (MorphismId f = 0; f < C.loc().num_morphisms(); ++f)
    maps[C.loc().morphism_name(f)] = matrix_json(U.morphisms[f]);
  C.report.tables["U"] = objs;
  C.report.tables["U maps"] = maps;
}

void cmd_kan(Context& C) {
  KanFunctorData U = kan_functor(C.fm, C.model.A);
  for (const auto& f : check_kan_structure(C.fm, C.reversed, C.model.A, U))
    C.add_detail(f.name, CheckKind::Assertion, f.holds, f.detail);
  StrAxiomReport a = check_axioms_on_str(C.fm, C.model.loc, C.model.A);
  FlabbinessReport flab = classify_flabbiness(C.fm, C.model.loc);
  u_axioms(C, check_u_axioms(C.fm, C.model.loc, C.model.A, U, flab, a), a);
  u_tables(C, U);
}

std::string cospan_name(const Context& C, std::pair<MorphismId, MorphismId> c) {
  return "(" + C.loc().morphism_name(c.first) + "," + C.loc().morphism_name(c.second) + ")";
}

// Up-to-homotopy causality and time-slice for hoU.
void homotopy_axioms(Context& C, const StrAxiomReport& a, const FlabbinessReport& flab) {
  const int N = C.N();
  for (const auto& c : C.model.loc.causal_cospans) {
    const std::string p = "hoU causality " + cospan_name(C, c) + ": ";
    if (!a.causality.holds) {
      C.skip(p + "[.,.] L = d lambda + lambda d", "A violates causality");
      CausalityWitness w = lambda_causality(C.fm, C.model.A, c.first, c.second, N);
      C.add(p + "rho mu L = mu^op (rho x rho) L", CheckKind::Finding, w.rho_identity.holds,
            w.rho_identity.counterexample, std::make_pair(w.rho_identity.lo, w.rho_identity.hi));
      continue;
    }
    CausalityWitness w = lambda_causality(C.fm, C.model.A, c.first, c.second, N);
    C.add(p, w.rho_identity);
    C.add(p, w.lambda);
    const FinCategory& L = C.loc();
    HoUAlgebra u1 = hou_object(C.fm, C.model.A, L.source(c.first), N);
    HoUAlgebra u2 = hou_object(C.fm, C.model.A, L.source(c.second), N);
    HoUAlgebra u = hou_object(C.fm, C.model.A, L.target(c.first), N);
    C.add(p, cohomology_causality(u1, u2, u, hou_morphism(C.fm, C.model.A, c.first, u1, u),
                                  hou_morphism(C.fm, C.model.A, c.second, u2, u),
                                  "commutators vanish on cohomology"));
    C.report.tables["nonzero cochain commutators"][cospan_name(C, c)] = w.nonzero_commutators;
  }
  for (MorphismId f : C.non_identities()) {
    if (!C.model.loc.is_cauchy(f)) continue;
    const std::string p = "hoU time-slice " + C.loc().morphism_name(f) + ": ";
    if (!flab.strongly_cauchy_flabby.value) {
      C.skip(p + "ext*", "not strongly Cauchy flabby");
      continue;
    }
    if (!a.time_slice.holds) {
      C.skip(p + "ext*", "A violates time-slice");
      continue;
    }
    TimeSliceWitness w = ext_pullback(C.fm, C.model.loc, C.model.A, f, N);
    C.add(p, w.ext_pullback);
    C.add(p, w.phi);
    C.add(p, w.phibar);
    C.add(p + "hoU(f) weak equivalence", CheckKind::Assertion, w.weak_equivalence, {},
          std::make_pair(0, N - 1));
  }
}

void cmd_axioms(Context& C) {
  StrAxiomReport a = check_axioms_on_str(C.fm, C.model.loc, C.model.A);
  FlabbinessReport flab = classify_flabbiness(C.fm, C.model.loc);
  str_axioms(C, a);
  flabbiness(C, flab);
  KanFunctorData U = kan_functor(C.fm, C.model.A);
  u_axioms(C, check_u_axioms(C.fm, C.model.loc, C.model.A, U, flab, a), a);
  homotopy_axioms(C, a, flab);
}

std::vector<std::size_t> cohomology_dims(const TruncatedDgVec& v) {
  std::vector<std::size_t> out;
  for (int n = 0; n < v.max_degree; ++n) out.push_back(cohomology(v, n).dim);
  return out;
}

// Components, differentials, cocycles and cohomology at N against N + 2.
IdentityCheck truncation_stability(const TruncatedDgVec& a, const TruncatedDgVec& b) {
  const int N = a.max_degree;
  IdentityCheck out{"truncation stability against N+2", true, 0, N, {}};
  for (int n = 0; n <= N && out.holds; ++n) {
    if (a.dim(n) != b.dim(n)) {
      out.holds = false;
      out.counterexample = "dimension differs in degree " + std::to_string(n);
    } else if (n < N && a.d[n] != b.d[n]) {
      out.holds = false;
      out.counterexample = "d differs in degree " + std::to_string(n);
    } else if (n < N && !(kernel_basis(a.d[n]) == kernel_basis(b.d[n]))) {
      out.holds = false;
      out.counterexample = "cocycles differ in degree " + std::to_string(n);
    } else if (n < N && cohomology(a, n).dim != cohomology(b, n).dim) {
      out.holds = false;
      out.counterexample = "cohomology differs in degree " + std::to_string(n);
    }
  }
  return out;
}

void cmd_hokan(Context& C) {
  const int N = C.N();
  KanFunctorData U = kan_functor(C.fm, C.model.A);
  Json t = Json::object();
  for (ObjectId M = 0; M < C.loc().num_objects(); ++M) {
    const std::string name = C.loc().object_name(M);
    const std::string p = "hoU(" + name + ") ";
    HoUAlgebra u = hou_object(C.fm, C.model.A, M, N);
    HoRanAlgebra r = horan_object(C.fm, C.model.A, M, N);
    C.add("", check_structure(u.dga, p));
    C.add("", check_structure(r.dga, "hoRan(" + name + ") "));

    H0Comparison h0 = h0_comparison(u, U.objects[M]);
    C.add(p + "ker d0 = U(M)", CheckKind::Assertion, h0.same_subspace, h0.detail);
    C.add(p + "ker d0 structure = U(M) structure", CheckKind::Assertion, h0.same_structure,
          h0.detail);

    DgDiagram X = fiber_diagram(C.fm, C.model.A, M, N);
    TruncatedDga h = holim_dgalg(X, N);
    bool same = h.complex.dims == u.complex().dims && h.unit == u.dga.unit;
    for (int n = 0; same && n < N; ++n) same = h.complex.d[n] == u.complex().d[n];
    for (int i = 0; same && i <= N; ++i)
      for (int j = 0; same && i + j <= N; ++j) same = h.product_matrix(i, j) == u.dga.product_matrix(i, j);
    C.add(p + "= holim of the fiber diagram", CheckKind::Assertion, same, "matrices differ",
          std::make_pair(0, N));
    C.add("holim(" + name + ") ", check_structure(h, ""));
    LimDga lim = lim_dgalg(X);
    C.add("lim(" + name + ") ", check_structure(lim.dga, ""));
    C.add(p + "lim = U(M)", CheckKind::Assertion, lim.subspaces[0] == U.objects[M].subspace,
          "subspaces differ");
    C.add("e(" + name + ") ", check_dga_map(lim.dga, h, canonical_e(X, lim, N), ""));

    C.add(p + "hoU(id) = id", CheckKind::Assertion,
          hou_morphism(C.fm, C.model.A, C.loc().identity(M), u, u).blocks ==
              identity_map(u.complex()).blocks,
          "hoU(id) differs from the identity", std::make_pair(0, N));

    HoUAlgebra big = hou_object(C.fm, C.model.A, M, N + 2);
    C.add(p, truncation_stability(u.complex(), big.complex()));

    t[name] = {{"hoU dims", u.complex().dims},
               {"hoRan dims", r.complex().dims},
               {"cohomology", cohomology_dims(u.complex())},
               {"hoRan cohomology", cohomology_dims(r.complex())}};
  }
  C.report.tables["hoU"] = t;
}

void cmd_verify(Context& C) {
  const int N = C.N();
  const FinCategory& L = C.loc();
  const QftFunctor& A = C.model.A;
  KanFunctorData U = kan_functor(C.fm, A);
  std::vector<HoUAlgebra> u;
  Json t = Json::object();
  for (ObjectId M = 0; M < L.num_objects(); ++M) {
    const std::string name = L.object_name(M);
    u.push_back(hou_object(C.fm, A, M, N));
    HoRanAlgebra r = horan_object(C.fm, A, M, N);
    KappaZeta kz = kappa_zeta(C.fm, A, r, u[M]);
    const std::string p = "at " + name + ": ";
    C.add(p, kz.kappa);
    C.add(p, kz.zeta);
    C.add(p, kz.eta);
    C.add(p + "kappa weak equivalence", CheckKind::Assertion, kz.weak_equivalence, {},
          std::make_pair(0, N - 1));
    RhoBeta rb = rho_beta(A, u[M]);
    C.add(p, rb.rho);
    C.add(p, rb.beta);
    H0Comparison h0 = h0_comparison(u[M], U.objects[M]);
    C.add(p + "ker d0 = U(M) with its structure", CheckKind::Assertion,
          h0.same_subspace && h0.same_structure, h0.detail);
    C.add(p + "hoU(id) = id", CheckKind::Assertion,
          hou_morphism(C.fm, A, L.identity(M), u[M], u[M]).blocks ==
              identity_map(u[M].complex()).blocks,
          "hoU(id) differs from the identity", std::make_pair(0, N));
    t[name] = {{"hoU dims", u[M].complex().dims}, {"cohomology", cohomology_dims(u[M].complex())}};
  }

  auto Uf = [&](const FiberedModel& fm, MorphismId f) {
    return hou_morphism(fm, A, f, u[L.source(f)], u[L.target(f)]);
  };
  for (MorphismId f : C.non_identities()) {
    const std::string p = "hoU(" + L.morphism_name(f) + ") ";
    GradedLinearMap m = Uf(C.fm, f);
    C.add("", check_dga_map(u[L.source(f)].dga, u[L.target(f)].dga, m, p));
    C.add("", same_on_cohomology(u[L.source(f)].complex(), u[L.target(f)].complex(), m,
                                 Uf(C.reversed, f), p + "cleavage independent on cohomology"));
  }

  const auto nonid = C.non_identities();
  for (MorphismId f : nonid)
    for (MorphismId g : nonid) {
      if (L.source(g) != L.target(f)) continue;
      const std::string p = "(" + L.morphism_name(f) + ", " + L.morphism_name(g) + "): ";
      FunctorialityWitness w = up_to_homotopy_functoriality(C.fm, A, f, g, std::nullopt, N);
      C.add(p, w.gamma2);
      C.add(p, cohomology_composition(u[L.source(f)], u[L.target(f)], u[L.target(g)], Uf(C.fm, f),
                                      Uf(C.fm, g), Uf(C.fm, L.comp(g, f)),
                                      "H(hoU(g)) H(hoU(f)) = H(hoU(g f))"));
      for (MorphismId h : nonid) {
        if (L.source(h) != L.target(g)) continue;
        FunctorialityWitness w3 = up_to_homotopy_functoriality(C.fm, A, f, g, h, N);
        C.add("(" + L.morphism_name(f) + ", " + L.morphism_name(g) + ", " + L.morphism_name(h) +
                  "): ",
              *w3.gamma3);
      }
    }

  StrAxiomReport a = check_axioms_on_str(C.fm, C.model.loc, A);
  homotopy_axioms(C, a, classify_flabbiness(C.fm, C.model.loc));
  C.report.tables["hoU"] = t;
}

using Command = std::function<void(Context&)>;

const std::vector<std::pair<std::string, Command>>& commands() {
  static const std::vector<std::pair<std::string, Command>> table{
      {"validate", cmd_validate}, {"classify", cmd_classify}, {"kan", cmd_kan},
      {"hokan", cmd_hokan},       {"verify", cmd_verify},     {"axioms", cmd_axioms}};
  return table;
}

std::string degrees_text(const CheckRecord& c) {
  if (!c.degrees) return "";
  if (c.degrees->second < c.degrees->first) return "none";
  return std::to_string(c.degrees->first) + ".." + std::to_string(c.degrees->second);
}

}  // namespace

bool Report::assertions_hold() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckRecord& c) {
    return c.kind == CheckKind::Assertion && c.status == CheckStatus::Fail;
  });
}

std::vector<std::string> Report::failed_findings() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (c.kind == CheckKind::Finding && c.status == CheckStatus::Fail) out.push_back(c.name);
  return out;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, _] : commands()) n.push_back(k);
    return n;
  }();
  return names;
}

Report run_command(const std::string& command, const ModelSpec& spec, const RunOptions& opts) {
  if (opts.max_degree < 2) throw Error("report", "--max-degree must be at least 2");
  for (const auto& [name, fn] : commands())
    if (name == command) {
      Context C(spec, opts, command);
      fn(C);
      return std::move(C.report);
    }
  throw Error("report", "unknown command '" + command + "' (expected one of " +
                            join(command_names(), ", ") + ")");
}

Json report_json(const Report& r) {
  Json j;
  j["command"] = r.command;
  j["model"] = r.model;
  j["max_degree"] = r.max_degree;
  j["seed_order"] = r.seed_order;
  j["windows"] = {{"one homotopy", r.max_degree - 1}, {"two nested homotopies", r.max_degree - 2}};
  j["checks"] = Json::array();
  for (const auto& c : r.checks) {
    Json e;
    e["name"] = c.name;
    e["kind"] = c.kind == CheckKind::Assertion ? "assertion" : "finding";
    e["status"] = status_name(c.status);
    if (c.degrees) e["degrees"] = {c.degrees->first, c.degrees->second};
    if (!c.detail.empty()) e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  std::size_t failed = 0, passed = 0, skipped = 0;
  for (const auto& c : r.checks) {
    if (c.kind != CheckKind::Assertion) continue;
    if (c.status == CheckStatus::Pass) ++passed;
    else if (c.status == CheckStatus::Fail) ++failed;
    else ++skipped;
  }
  j["summary"] = {{"assertions passed", passed},
                  {"assertions failed", failed},
                  {"assertions skipped", skipped},
                  {"failed findings", r.failed_findings()}};
  j["tables"] = r.tables;
  return j;
}

std::string report_markdown(const Report& r) {
  Json j = report_json(r);
  std::ostringstream out;
  out << "# kanqft " << r.command << ": " << r.model << "\n\n";
  out << "Truncation N = " << r.max_degree << ", cleavage order " << r.seed_order
      << ". One-homotopy identities are checked in degrees <= " << r.max_degree - 1
      << ", nested ones in degrees <= " << r.max_degree - 2 << ".\n\n";
  const Json& s = j["summary"];
  out << "Assertions: " << s["assertions passed"].get<std::size_t>() << " passed, "
      << s["assertions failed"].get<std::size_t>() << " failed, "
      << s["assertions skipped"].get<std::size_t>() << " skipped.";
  auto ff = r.failed_findings();
  out << " Failed findings: " << (ff.empty() ? "none" : join(ff, ", ")) << ".\n\n";
  out << "| check | kind | status | degrees | detail |\n|---|---|---|---|---|\n";
  for (const auto& c : r.checks) {
    std::string detail;
    for (char ch : c.detail) detail += ch == '|' ? std::string("\\|") : std::string(1, ch);
    out << "| " << c.name << " | " << (c.kind == CheckKind::Assertion ? "assertion" : "finding")
        << " | " << status_name(c.status) << " | " << degrees_text(c) << " | " << detail << " |\n";
  }
  if (!r.tables.empty()) {
    out << "\n## Tables\n\n";
    for (auto it = r.tables.begin(); it != r.tables.end(); ++it)
      out << "### " << it.key() << "\n\n```json\n" << it.value().dump(2) << "\n```\n\n";
  }
  return out.str();
}

ExpectResult match_expectations(const Report& r, const std::vector<std::string>& expected) {
  ExpectResult e;
  std::set<std::string> failed;
  for (const auto& c : r.failed_findings()) failed.insert(c);
  std::set<std::string> want(expected.begin(), expected.end());
  for (const auto& f : failed)
    if (!want.count(f)) e.unexpected.push_back(f);
  for (const auto& w : want)
    if (!failed.count(w)) e.missing.push_back(w);
  e.matched = e.unexpected.empty() && e.missing.empty();
  return e;
}

int exit_code(const Report& r, const std::optional<std::vector<std::string>>& expected) {
  if (!r.assertions_hold()) return 1;
  if (expected && !match_expectations(r, *expected).matched) return 3;
  return 0;
}

}  // namespace kanqft

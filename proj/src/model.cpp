#include "kanqft/model.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "kanqft/error.hpp"

namespace kanqft {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error("model", (path.empty() ? "/" : path) + ": " + what);
}

const Json& member(const Json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, "missing key '" + key + "'");
  return *it;
}

std::string str_at(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<std::string> strings_at(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(str_at(j[i], path + "/" + std::to_string(i)));
  return out;
}

Rational rational_at(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.dump());
  if (!j.is_string()) fail(path, "expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

CategorySpec category_at(const Json& j, const std::string& path) {
  CategorySpec c;
  c.objects = strings_at(member(j, path, "objects"), path + "/objects");
  std::set<std::string> objs(c.objects.begin(), c.objects.end());
  std::set<std::string> mors;
  const Json& ms = member(j, path, "morphisms");
  if (!ms.is_array()) fail(path + "/morphisms", "expected an array");
  for (std::size_t i = 0; i < ms.size(); ++i) {
    std::string p = path + "/morphisms/" + std::to_string(i);
    MorphismSpec m{str_at(member(ms[i], p, "name"), p + "/name"),
                   str_at(member(ms[i], p, "source"), p + "/source"),
                   str_at(member(ms[i], p, "target"), p + "/target")};
    if (!objs.count(m.source)) fail(p + "/source", "unknown object '" + m.source + "'");
    if (!objs.count(m.target)) fail(p + "/target", "unknown object '" + m.target + "'");
    mors.insert(m.name);
    c.morphisms.push_back(m);
  }
  const Json& ids = member(j, path, "identities");
  if (!ids.is_object()) fail(path + "/identities", "expected an object");
  for (auto it = ids.begin(); it != ids.end(); ++it) {
    std::string p = path + "/identities/" + it.key();
    if (!objs.count(it.key())) fail(p, "unknown object '" + it.key() + "'");
    std::string g = str_at(it.value(), p);
    if (!mors.count(g)) fail(p, "unknown morphism '" + g + "'");
    c.identities[it.key()] = g;
  }
  const Json& comp = member(j, path, "compose");
  if (!comp.is_array()) fail(path + "/compose", "expected an array");
  for (std::size_t i = 0; i < comp.size(); ++i) {
    std::string p = path + "/compose/" + std::to_string(i);
    auto e = strings_at(comp[i], p);
    if (e.size() != 3) fail(p, "expected [g, f, g∘f]");
    for (std::size_t k = 0; k < 3; ++k)
      if (!mors.count(e[k])) fail(p + "/" + std::to_string(k), "unknown morphism '" + e[k] + "'");
    c.compose.push_back({e[0], e[1], e[2]});
  }
  if (j.contains("groupoid")) {
    if (!j["groupoid"].is_boolean()) fail(path + "/groupoid", "expected a boolean");
    c.groupoid = j["groupoid"].get<bool>();
  }
  return c;
}

QMatrix matrix_at(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  std::vector<Vector> rows;
  std::size_t cols = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string p = path + "/" + std::to_string(i);
    if (!j[i].is_array()) fail(p, "expected a row");
    Vector r;
    for (std::size_t k = 0; k < j[i].size(); ++k)
      r.push_back(rational_at(j[i][k], p + "/" + std::to_string(k)));
    if (i > 0 && r.size() != cols) fail(p, "ragged matrix");
    cols = r.size();
    rows.push_back(std::move(r));
  }
  return QMatrix::from_dense(rows, cols);
}

FinAlgebra algebra_at(const Json& j, const std::string& path) {
  const Json& dj = member(j, path, "dim");
  if (!dj.is_number_unsigned()) fail(path + "/dim", "expected a non-negative integer");
  const std::size_t d = dj.get<std::size_t>();
  const Json& c = member(j, path, "structure_constants");
  std::string cp = path + "/structure_constants";
  if (!c.is_array() || c.size() != d) fail(cp, "expected a dim x dim x dim array");
  std::vector<Rational> constants(d * d * d);
  for (std::size_t a = 0; a < d; ++a) {
    if (!c[a].is_array() || c[a].size() != d) fail(cp + "/" + std::to_string(a), "expected dim x dim");
    for (std::size_t b = 0; b < d; ++b) {
      std::string p = cp + "/" + std::to_string(a) + "/" + std::to_string(b);
      if (!c[a][b].is_array() || c[a][b].size() != d) fail(p, "expected dim entries");
      for (std::size_t k = 0; k < d; ++k)
        constants[(a * d + b) * d + k] = rational_at(c[a][b][k], p + "/" + std::to_string(k));
    }
  }
  const Json& u = member(j, path, "unit");
  if (!u.is_array() || u.size() != d) fail(path + "/unit", "expected dim entries");
  Vector unit;
  for (std::size_t k = 0; k < d; ++k) unit.push_back(rational_at(u[k], path + "/unit/" + std::to_string(k)));
  return FinAlgebra(d, std::move(constants), std::move(unit));
}

Json category_json(const CategorySpec& c, bool with_groupoid) {
  Json j;
  j["objects"] = c.objects;
  j["morphisms"] = Json::array();
  for (const auto& m : c.morphisms)
    j["morphisms"].push_back({{"name", m.name}, {"source", m.source}, {"target", m.target}});
  j["identities"] = Json::object();
  for (const auto& o : c.objects)
    if (c.identities.count(o)) j["identities"][o] = c.identities.at(o);
  j["compose"] = Json::array();
  for (const auto& e : c.compose) j["compose"].push_back({e[0], e[1], e[2]});
  if (with_groupoid) j["groupoid"] = c.groupoid;
  return j;
}

Json matrix_json(const QMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (const auto& x : m.dense_row(i)) r.push_back(to_string(x));
    rows.push_back(r);
  }
  return rows;
}

Json algebra_json(const FinAlgebra& a) {
  const std::size_t d = a.dim();
  Json c = Json::array();
  for (std::size_t i = 0; i < d; ++i) {
    Json ci = Json::array();
    for (std::size_t k = 0; k < d; ++k) {
      Json cik = Json::array();
      for (std::size_t l = 0; l < d; ++l) cik.push_back(to_string(a.c(i, k, l)));
      ci.push_back(cik);
    }
    c.push_back(ci);
  }
  Json u = Json::array();
  for (const auto& x : a.unit()) u.push_back(to_string(x));
  return {{"dim", d}, {"structure_constants", c}, {"unit", u}};
}

}  // namespace

ModelSpec parse_model_json(const Json& j) {
  if (!j.is_object()) fail("", "expected a JSON object");
  if (j.contains("format") && (!j["format"].is_number_integer() || j["format"].get<int>() != 1))
    fail("/format", "unsupported format (expected 1)");
  ModelSpec m;
  m.name = j.contains("name") ? str_at(j["name"], "/name") : std::string("unnamed");
  m.description = j.contains("description") ? str_at(j["description"], "/description") : "";
  const Json& loc = member(j, "", "loc");
  m.loc = category_at(loc, "/loc");
  std::set<std::string> loc_mors;
  for (const auto& x : m.loc.morphisms) loc_mors.insert(x.name);
  if (loc.contains("causal_cospans")) {
    const Json& cc = loc["causal_cospans"];
    if (!cc.is_array()) fail("/loc/causal_cospans", "expected an array");
    for (std::size_t i = 0; i < cc.size(); ++i) {
      std::string p = "/loc/causal_cospans/" + std::to_string(i);
      auto e = strings_at(cc[i], p);
      if (e.size() != 2) fail(p, "expected a pair [f1, f2]");
      for (std::size_t k = 0; k < 2; ++k)
        if (!loc_mors.count(e[k])) fail(p + "/" + std::to_string(k), "unknown morphism '" + e[k] + "'");
      m.causal_cospans.emplace_back(e[0], e[1]);
    }
  }
  if (loc.contains("cauchy")) {
    m.cauchy = strings_at(loc["cauchy"], "/loc/cauchy");
    for (std::size_t i = 0; i < m.cauchy.size(); ++i)
      if (!loc_mors.count(m.cauchy[i]))
        fail("/loc/cauchy/" + std::to_string(i), "unknown morphism '" + m.cauchy[i] + "'");
  }
  m.str = category_at(member(j, "", "str"), "/str");

  const Json& proj = member(j, "", "projection");
  for (const char* key : {"objects", "morphisms"}) {
    const Json& pm = member(proj, "/projection", key);
    std::string p = std::string("/projection/") + key;
    if (!pm.is_object()) fail(p, "expected an object");
    for (auto it = pm.begin(); it != pm.end(); ++it) {
      std::string v = str_at(it.value(), p + "/" + it.key());
      (std::string(key) == "objects" ? m.projection_objects : m.projection_morphisms)[it.key()] = v;
    }
  }

  const Json& algs = member(j, "", "algebras");
  if (!algs.is_object()) fail("/algebras", "expected an object");
  for (const auto& o : m.str.objects) {
    if (!algs.contains(o)) fail("/algebras", "missing algebra for Str object '" + o + "'");
    m.algebras.emplace(o, algebra_at(algs[o], "/algebras/" + o));
  }
  for (auto it = algs.begin(); it != algs.end(); ++it)
    if (!m.algebras.count(it.key())) fail("/algebras/" + it.key(), "unknown Str object");

  const Json& maps = member(j, "", "algebra_maps");
  if (!maps.is_object()) fail("/algebra_maps", "expected an object");
  std::set<std::string> str_mors;
  for (const auto& x : m.str.morphisms) str_mors.insert(x.name);
  for (auto it = maps.begin(); it != maps.end(); ++it) {
    if (!str_mors.count(it.key())) fail("/algebra_maps/" + it.key(), "unknown Str morphism");
    m.algebra_maps.emplace(it.key(), matrix_at(it.value(), "/algebra_maps/" + it.key()));
  }
  return m;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("model", "cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("model", path + ": " + e.what());
  }
  return parse_model_json(j);
}

Json model_to_json(const ModelSpec& m) {
  Json j;
  j["format"] = 1;
  j["name"] = m.name;
  j["description"] = m.description;
  j["loc"] = category_json(m.loc, false);
  j["loc"]["causal_cospans"] = Json::array();
  for (const auto& [a, b] : m.causal_cospans) j["loc"]["causal_cospans"].push_back({a, b});
  j["loc"]["cauchy"] = m.cauchy;
  j["str"] = category_json(m.str, m.str.groupoid);
  j["projection"]["objects"] = Json::object();
  for (const auto& o : m.str.objects)
    if (m.projection_objects.count(o)) j["projection"]["objects"][o] = m.projection_objects.at(o);
  j["projection"]["morphisms"] = Json::object();
  for (const auto& g : m.str.morphisms)
    if (m.projection_morphisms.count(g.name))
      j["projection"]["morphisms"][g.name] = m.projection_morphisms.at(g.name);
  j["algebras"] = Json::object();
  for (const auto& o : m.str.objects)
    if (m.algebras.count(o)) j["algebras"][o] = algebra_json(m.algebras.at(o));
  j["algebra_maps"] = Json::object();
  for (const auto& g : m.str.morphisms)
    if (m.algebra_maps.count(g.name)) j["algebra_maps"][g.name] = matrix_json(m.algebra_maps.at(g.name));
  return j;
}

Model validate_model(const ModelSpec& spec) {
  Model m;
  m.name = spec.name;
  m.description = spec.description;
  auto loc = std::make_shared<FinCategory>(validate_category(spec.loc, "loc"));
  auto str = std::make_shared<FinCategory>(validate_category(spec.str, "str"));
  m.loc_category = loc;
  m.str_category = str;
  m.loc = validate_loc(*loc, spec.causal_cospans, spec.cauchy);
  m.pi = validate_functor(str, loc, spec.projection_objects, spec.projection_morphisms);
  check_functor(m.pi, "projection");

  std::vector<std::string> issues;
  for (ObjectId S = 0; S < str->num_objects(); ++S) {
    const FinAlgebra& a = spec.algebras.at(str->object_name(S));
    try {
      validate_algebra(a, "A(" + str->object_name(S) + ")");
    } catch (const ValidationError& e) {
      for (const auto& s : e.issues()) issues.push_back(s);
    }
    m.A.on_objects.push_back(std::make_shared<FinAlgebra>(a));
  }
  for (MorphismId g = 0; g < str->num_morphisms(); ++g) {
    auto it = spec.algebra_maps.find(str->morphism_name(g));
    if (it != spec.algebra_maps.end()) {
      m.A.on_morphisms.push_back(it->second);
    } else if (str->is_identity(g)) {
      m.A.on_morphisms.push_back(QMatrix::identity(m.A.algebra(str->source(g)).dim()));
    } else {
      issues.push_back("missing algebra map for '" + str->morphism_name(g) + "'");
      m.A.on_morphisms.emplace_back();
    }
  }
  if (!issues.empty()) throw ValidationError("model", issues);
  validate_qft(*str, m.A);
  return m;
}

FiberedModel fibered(const Model& m, TieBreak order) { return build_fibered_model(m.pi, order); }

ModelSpec global_gauge(const GlobalGaugeSpec& g) {
  ModelSpec m;
  m.name = g.name;
  m.description = g.description;
  m.loc = g.loc;
  m.causal_cospans = g.causal_cospans;
  m.cauchy = g.cauchy;
  if (g.group.objects.size() != 1) throw Error("model", "group must be a one-object category");
  const std::string star = g.group.objects[0];
  const std::string e = g.group.identities.at(star);
  auto pair_name = [](const std::string& f, const std::string& x) { return "(" + f + "," + x + ")"; };
  std::map<std::string, const MorphismSpec*> locm;
  for (const auto& f : g.loc.morphisms) locm[f.name] = &f;
  std::map<std::pair<std::string, std::string>, std::string> loc_comp, grp_comp;
  for (const auto& c : g.loc.compose) loc_comp[{c[0], c[1]}] = c[2];
  for (const auto& c : g.group.compose) grp_comp[{c[0], c[1]}] = c[2];

  m.str.objects = g.loc.objects;
  m.str.groupoid = false;
  for (const auto& f : g.loc.morphisms)
    for (const auto& x : g.group.morphisms) {
      m.str.morphisms.push_back({pair_name(f.name, x.name), f.source, f.target});
      m.projection_morphisms[pair_name(f.name, x.name)] = f.name;
    }
  for (const auto& o : g.loc.objects) {
    m.str.identities[o] = pair_name(g.loc.identities.at(o), e);
    m.projection_objects[o] = o;
  }
  for (const auto& [fg, h] : loc_comp)
    for (const auto& [xy, z] : grp_comp)
      m.str.compose.push_back({pair_name(fg.first, xy.first), pair_name(fg.second, xy.second),
                               pair_name(h, z)});

  for (const auto& o : g.loc.objects) m.algebras.emplace(o, g.b_algebras.at(o));
  for (const auto& f : g.loc.morphisms) {
    const std::size_t ds = g.b_algebras.at(f.source).dim();
    const std::size_t dt = g.b_algebras.at(f.target).dim();
    bool is_id = g.loc.identities.at(f.source) == f.name && f.source == f.target;
    QMatrix bf = is_id ? QMatrix::identity(ds) : g.b_maps.at(f.name);
    if (bf.rows() != dt || bf.cols() != ds) throw Error("model", "B(" + f.name + ") has the wrong shape");
    for (const auto& x : g.group.morphisms) {
      auto it = g.eta.find({f.source, x.name});
      QMatrix eta = x.name == e ? QMatrix::identity(ds)
                                : (it != g.eta.end() ? it->second : throw Error("model", "missing eta"));
      m.algebra_maps.emplace(pair_name(f.name, x.name), bf * eta);
    }
  }
  return m;
}

CategorySpec z2_group() {
  CategorySpec c;
  c.objects = {"*"};
  c.morphisms = {{"e", "*", "*"}, {"g", "*", "*"}};
  c.identities = {{"*", "e"}};
  c.compose = {{"e", "e", "e"}, {"e", "g", "g"}, {"g", "e", "g"}, {"g", "g", "e"}};
  c.groupoid = true;
  return c;
}

QMatrix ad_diag_sign() {
  QMatrix m(4, 4);
  m.set(0, 0, 1);
  m.set(1, 1, -1);
  m.set(2, 2, -1);
  m.set(3, 3, 1);
  return m;
}

namespace {

// Objects, identities "id_X" and the full composition table of a poset-like
// category given by its non-identity morphisms and their composites.
CategorySpec thin_category(const std::vector<std::string>& objects,
                           const std::vector<MorphismSpec>& arrows,
                           const std::vector<std::array<std::string, 3>>& composites) {
  CategorySpec c;
  c.objects = objects;
  for (const auto& o : objects) {
    c.morphisms.push_back({"id_" + o, o, o});
    c.identities[o] = "id_" + o;
  }
  for (const auto& a : arrows) c.morphisms.push_back(a);
  for (const auto& a : c.morphisms) {
    c.compose.push_back({"id_" + a.target, a.name, a.name});
    if (a.source != a.target) c.compose.push_back({a.name, "id_" + a.source, a.name});
  }
  for (const auto& k : composites) c.compose.push_back(k);
  return c;
}

ModelSpec gauge_fixture(const std::string& name, const std::string& description,
                        const CategorySpec& loc,
                        std::vector<std::pair<std::string, std::string>> cospans,
                        std::vector<std::string> cauchy, const FinAlgebra& b, const QMatrix& eta_g) {
  GlobalGaugeSpec g;
  g.name = name;
  g.description = description;
  g.loc = loc;
  g.causal_cospans = std::move(cospans);
  g.cauchy = std::move(cauchy);
  for (const auto& o : loc.objects) g.cauchy.push_back(loc.identities.at(o));
  g.group = z2_group();
  for (const auto& o : loc.objects) {
    g.b_algebras.emplace(o, b);
    g.eta[{o, "g"}] = eta_g;
  }
  for (const auto& f : loc.morphisms)
    if (f.source != f.target) g.b_maps[f.name] = QMatrix::identity(b.dim());
  return global_gauge(g);
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"bz2-matrix", "disjoint-wedge", "disjoint-wedge-prime", "nonflabby", "cauchy-z2", "chain"};
}

ModelSpec fixture(const std::string& name) {
  QMatrix swap(2, 2);
  swap.set(0, 1, 1);
  swap.set(1, 0, 1);
  if (name == "bz2-matrix")
    return gauge_fixture(name, "one spacetime, Z2 acting on M2(Q) by Ad diag(1,-1)",
                         thin_category({"*"}, {}, {}), {}, {}, matrix_algebra(2), ad_diag_sign());
  if (name == "disjoint-wedge" || name == "disjoint-wedge-prime") {
    CategorySpec loc = thin_category({"M1", "M2", "M"}, {{"f1", "M1", "M"}, {"f2", "M2", "M"}}, {});
    if (name == "disjoint-wedge")
      return gauge_fixture(name, "causal cospan M1 -> M <- M2, Z2 swapping the factors of Q x Q", loc,
                           {{"f1", "f2"}}, {}, product_algebra({rationals(), rationals()}), swap);
    return gauge_fixture(name, "causal cospan M1 -> M <- M2 with the noncommutative M2(Q)", loc,
                         {{"f1", "f2"}}, {}, matrix_algebra(2), ad_diag_sign());
  }
  if (name == "nonflabby") {
    ModelSpec m;
    m.name = name;
    m.description = "T over M1 has no extension along f";
    m.loc = thin_category({"M1", "M"}, {{"f", "M1", "M"}}, {});
    m.cauchy = {"id_M1", "id_M"};
    m.str = thin_category({"S", "T", "S'"}, {{"fS", "S", "S'"}}, {});
    m.projection_objects = {{"S", "M1"}, {"T", "M1"}, {"S'", "M"}};
    m.projection_morphisms = {{"id_S", "id_M1"}, {"id_T", "id_M1"}, {"id_S'", "id_M"}, {"fS", "f"}};
    for (const auto& o : m.str.objects) m.algebras.emplace(o, rationals());
    m.algebra_maps.emplace("fS", QMatrix::identity(1));
    return m;
  }
  if (name == "cauchy-z2")
    return gauge_fixture(name, "Cauchy morphism N -> Np, Z2 acting on M2(Q) by Ad diag(1,-1)",
                         thin_category({"N", "Np"}, {{"f", "N", "Np"}}, {}), {}, {"f"},
                         matrix_algebra(2), ad_diag_sign());
  if (name == "chain")
    return gauge_fixture(
        name, "chain M0 -> M1 -> M2 -> M3 with all composites, Z2 acting on M2(Q)",
        thin_category({"M0", "M1", "M2", "M3"},
                      {{"f01", "M0", "M1"}, {"f12", "M1", "M2"}, {"f23", "M2", "M3"},
                       {"f02", "M0", "M2"}, {"f13", "M1", "M3"}, {"f03", "M0", "M3"}},
                      {{"f12", "f01", "f02"}, {"f23", "f12", "f13"}, {"f23", "f02", "f03"},
                       {"f13", "f01", "f03"}}),
        {}, {}, matrix_algebra(2), ad_diag_sign());
  throw Error("model", "unknown fixture '" + name + "'");
}

}  // namespace kanqft

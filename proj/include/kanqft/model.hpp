#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kanqft/finalg.hpp"
#include "kanqft/fincat.hpp"

namespace kanqft {

using Json = nlohmann::ordered_json;

// A model exactly as written in a model file, with everything referenced by name.
struct ModelSpec {
  std::string name;
  std::string description;
  CategorySpec loc;
  std::vector<std::pair<std::string, std::string>> causal_cospans;
  std::vector<std::string> cauchy;
  CategorySpec str;
  std::map<std::string, std::string> projection_objects;
  std::map<std::string, std::string> projection_morphisms;
  std::map<std::string, FinAlgebra> algebras;   // by Str object
  std::map<std::string, QMatrix> algebra_maps;  // by Str morphism
};

struct Model {
  std::string name;
  std::string description;
  std::shared_ptr<const FinCategory> loc_category;
  std::shared_ptr<const FinCategory> str_category;
  LocStructure loc;
  CatFunctor pi;
  QftFunctor A;
};

// Schema errors name the JSON path, e.g. "/str/morphisms/2/source".
ModelSpec parse_model_json(const Json& j);
ModelSpec load_model_file(const std::string& path);
Json model_to_json(const ModelSpec& m);

Model validate_model(const ModelSpec& spec);
FiberedModel fibered(const Model& m, TieBreak order = TieBreak::Least);

// Str = Loc × G for a group G given as a one-object groupoid; A(f, x) = B(f)∘η(x).
struct GlobalGaugeSpec {
  std::string name;
  std::string description;
  CategorySpec loc;
  std::vector<std::pair<std::string, std::string>> causal_cospans;
  std::vector<std::string> cauchy;
  CategorySpec group;
  std::map<std::string, FinAlgebra> b_algebras;  // by Loc object
  std::map<std::string, QMatrix> b_maps;         // by non-identity Loc morphism
  std::map<std::pair<std::string, std::string>, QMatrix> eta;  // (M, x) → η(x)_M
};

ModelSpec global_gauge(const GlobalGaugeSpec& g);

std::vector<std::string> fixture_names();
ModelSpec fixture(const std::string& name);

// Ad diag(1,-1) on M2(Q) in the E_11, E_12, E_21, E_22 basis.
QMatrix ad_diag_sign();
CategorySpec z2_group();

}  // namespace kanqft

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "kanqft/error.hpp"
#include "kanqft/hokan.hpp"
#include "kanqft/model.hpp"
#include "kanqft/report.hpp"

namespace py = pybind11;
using namespace kanqft;

namespace {

using TextMatrix = std::vector<std::vector<std::string>>;

QMatrix from_text(const TextMatrix& rows, std::size_t cols) {
  QMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error("qlinalg", "ragged matrix at row " + std::to_string(i));
    for (std::size_t j = 0; j < cols; ++j) m.set(i, j, parse_rational(rows[i][j]));
  }
  return m;
}

std::vector<std::string> to_text(const Vector& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

ModelSpec parse_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error("model", std::string("invalid JSON: ") + e.what());
  }
  return parse_model_json(j);
}

std::pair<std::string, int> run(const std::string& command, const std::string& model_text, int max_degree,
                                const std::string& seed_order, const std::string& format,
                                const std::optional<std::vector<std::string>>& expect) {
  if (seed_order != "normal" && seed_order != "reversed")
    throw Error("report", "seed order must be normal or reversed, got " + seed_order);
  RunOptions opts;
  opts.max_degree = max_degree;
  opts.order = seed_order == "reversed" ? TieBreak::Greatest : TieBreak::Least;
  Report r;
  {
    py::gil_scoped_release nogil;
    r = run_command(command, parse_text(model_text), opts);
  }
  std::string out = format == "md" ? report_markdown(r) : report_json(r).dump(2);
  return {out, exit_code(r, expect)};
}

std::vector<std::size_t> cohomology_dims(const std::string& model_text, const std::string& object, int N,
                                         bool ran) {
  Model m = validate_model(parse_text(model_text));
  FiberedModel fm = fibered(m);
  ObjectId M = m.loc_category->object(object);
  CochainDga a = ran ? horan_object(fm, m.A, M, N) : hou_object(fm, m.A, M, N);
  std::vector<std::size_t> dims;
  for (int n = 0; n < N; ++n) dims.push_back(cohomology(a.complex(), n).dim);
  return dims;
}

std::vector<std::size_t> cochain_dims(const std::string& model_text, const std::string& object, int N, bool ran) {
  Model m = validate_model(parse_text(model_text));
  FiberedModel fm = fibered(m);
  ObjectId M = m.loc_category->object(object);
  CochainDga a = ran ? horan_object(fm, m.A, M, N) : hou_object(fm, m.A, M, N);
  return a.complex().dims;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact Kan extensions of finite toy AQFTs";

  static py::exception<Error> error(m, "KanqftError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("fixture_names", &fixture_names);
  m.def("fixture_json", [](const std::string& name) { return model_to_json(fixture(name)).dump(2); });
  m.def("command_names", &command_names);
  m.def("run", &run, py::arg("command"), py::arg("model"), py::arg("max_degree") = 4,
        py::arg("seed_order") = "normal", py::arg("format") = "json", py::arg("expect") = py::none());
  m.def("cohomology_dims", &cohomology_dims, py::arg("model"), py::arg("object"), py::arg("max_degree") = 4,
        py::arg("ran") = false);
  m.def("cochain_dims", &cochain_dims, py::arg("model"), py::arg("object"), py::arg("max_degree") = 4,
        py::arg("ran") = false);

  m.def("rank", [](const TextMatrix& rows, std::size_t cols) { return rank(from_text(rows, cols)); });
  m.def("kernel", [](const TextMatrix& rows, std::size_t cols) {
    Subspace k = kernel_basis(from_text(rows, cols));
    std::vector<std::vector<std::string>> out;
    for (std::size_t i = 0; i < k.dim(); ++i) out.push_back(to_text(k.vector(i)));
    return out;
  });
  m.def("solve", [](const TextMatrix& rows, std::size_t cols,
                    const std::vector<std::string>& b) -> std::optional<std::vector<std::string>> {
    Vector rhs;
    for (const auto& x : b) rhs.push_back(parse_rational(x));
    auto x = solve(from_text(rows, cols), rhs);
    if (!x) return std::nullopt;
    return to_text(*x);
  });
}

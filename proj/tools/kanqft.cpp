#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kanqft/error.hpp"
#include "kanqft/model.hpp"
#include "kanqft/report.hpp"

namespace {

constexpr int kInvalidInput = 2;

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream in(item);
    std::string part;
    while (std::getline(in, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

int default_degree() {
  const char* env = std::getenv("KANQFT_MAX_DEGREE");
  if (!env || !*env) return 4;
  try {
    std::size_t used = 0;
    int n = std::stoi(env, &used);
    if (used == std::string(env).size()) return n;
  } catch (const std::exception&) {
  }
  throw kanqft::Error("cli", std::string("KANQFT_MAX_DEGREE is not an integer: '") + env + "'");
}

}  // namespace

int main(int argc, char** argv) {
  std::string command;
  std::string model_path;
  std::string fixture_name;
  std::optional<int> max_degree;
  std::string format = "json";
  std::vector<std::string> expect_raw;
  std::string seed_order = "normal";
  bool list_fixtures = false;

  std::vector<std::string> commands = kanqft::command_names();
  commands.push_back("export");

  CLI::App app{"Kan extensions of toy algebraic QFTs over exact rationals"};
  app.add_option("command", command, "validate, classify, kan, hokan, verify, axioms or export")
      ->check(CLI::IsMember(commands));
  app.add_option("model", model_path, "model JSON file");
  app.add_option("--fixture", fixture_name, "run a bundled fixture instead of a file");
  app.add_option("--max-degree", max_degree, "truncation degree N (default 4, or KANQFT_MAX_DEGREE)");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "md"}));
  app.add_option("--expect", expect_raw, "comma-separated findings expected to fail");
  app.add_option("--seed-order", seed_order, "cleavage tie-break")
      ->check(CLI::IsMember({"normal", "reversed"}));
  app.add_flag("--list-fixtures", list_fixtures, "print bundled fixture names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  if (list_fixtures) {
    for (const auto& n : kanqft::fixture_names()) std::cout << n << "\n";
    return 0;
  }

  try {
    if (command.empty()) throw kanqft::Error("cli", "missing command");
    if (model_path.empty() == fixture_name.empty())
      throw kanqft::Error("cli", "give exactly one of a model file or --fixture");

    kanqft::ModelSpec spec =
        fixture_name.empty() ? kanqft::load_model_file(model_path) : kanqft::fixture(fixture_name);

    if (command == "export") {
      kanqft::validate_model(spec);
      std::cout << kanqft::model_to_json(spec).dump(2) << "\n";
      return 0;
    }

    kanqft::RunOptions opts;
    opts.max_degree = max_degree ? *max_degree : default_degree();
    opts.order = seed_order == "reversed" ? kanqft::TieBreak::Greatest : kanqft::TieBreak::Least;

    kanqft::Report report = kanqft::run_command(command, spec, opts);
    if (format == "md")
      std::cout << kanqft::report_markdown(report);
    else
      std::cout << kanqft::report_json(report).dump(2) << "\n";

    std::optional<std::vector<std::string>> expected;
    if (!expect_raw.empty()) expected = split_list(expect_raw);
    int code = kanqft::exit_code(report, expected);
    if (code == 3) {
      auto m = kanqft::match_expectations(report, *expected);
      for (const auto& u : m.unexpected) std::cerr << "unexpected failed finding: " << u << "\n";
      for (const auto& u : m.missing) std::cerr << "expected finding did not fail: " << u << "\n";
    } else if (code == 1) {
      for (const auto& c : report.checks)
        if (c.kind == kanqft::CheckKind::Assertion && c.status == kanqft::CheckStatus::Fail)
          std::cerr << "assertion failed: " << c.name << (c.detail.empty() ? "" : ": " + c.detail)
                    << "\n";
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kInvalidInput;
  }
}

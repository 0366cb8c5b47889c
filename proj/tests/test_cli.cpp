#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "kanqft/report.hpp"

using namespace kanqft;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / ("kanqft_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args, const std::string& env = "") {
  fs::path dir = scratch();
  fs::path out = dir / "out", err = dir / "err";
  std::string cmd = env + " '" KANQFT_CLI "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_file(const std::string& name, const std::string& text) {
  fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string fixture_file(const std::string& name) { return std::string(KANQFT_FIXTURES) + "/" + name; }

}  // namespace

TEST_CASE("bundled fixtures run clean") {
  Run v = run("verify " + fixture_file("fix-a.json"));
  CHECK(v.code == 0);
  Json j = Json::parse(v.out);
  CHECK(j["command"] == "verify");
  CHECK(j["max_degree"] == 4);
  CHECK(j["summary"]["assertions failed"] == 0);
  CHECK(v.err.empty());

  for (const char* cmd : {"validate", "classify", "kan", "hokan", "verify", "axioms"}) {
    CAPTURE(cmd);
    CHECK(run(std::string(cmd) + " --fixture cauchy-z2").code == 0);
  }
}

TEST_CASE("expected findings decide between 0 and 3") {
  CHECK(run("axioms --fixture nonflabby --expect flabby,u-isotony").code == 0);
  CHECK(run("axioms --fixture nonflabby --expect flabby --expect u-isotony").code == 0);
  Run partial = run("axioms --fixture nonflabby --expect flabby");
  CHECK(partial.code == 3);
  CHECK(partial.err.find("u-isotony") != std::string::npos);
  Run extra = run("axioms --fixture bz2-matrix --expect flabby");
  CHECK(extra.code == 3);
  CHECK(extra.err.find("did not fail") != std::string::npos);
  // without --expect findings never change the exit code
  CHECK(run("axioms --fixture nonflabby").code == 0);
}

TEST_CASE("the isotony counterexample is reported") {
  Run r = run("axioms " + fixture_file("fix-c.json"));
  Json j = Json::parse(r.out);
  bool seen = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "u-isotony") {
      seen = true;
      CHECK(c["status"] == "fail");
      CHECK(c["detail"].get<std::string>().find("(0, 1)") != std::string::npos);
    }
  CHECK(seen);
}

TEST_CASE("invalid input exits 2 with a message on stderr") {
  CHECK(run("verify /nonexistent/model.json").code == 2);
  CHECK(run("verify --fixture no-such-fixture").code == 2);
  CHECK(run("bogus --fixture chain").code == 2);
  CHECK(run("verify").code == 2);
  CHECK(run("verify " + fixture_file("fix-a.json") + " --fixture chain").code == 2);
  CHECK(run("verify --fixture chain --max-degree 1").code == 2);

  std::string text = slurp(fixture_file("fix-a.json"));
  std::string bad_rational = text;
  auto at = bad_rational.find("\"-1\"");
  REQUIRE(at != std::string::npos);
  bad_rational.replace(at, 4, "\"1/0\"");
  Run r = run("validate " + write_file("bad_rational.json", bad_rational).string());
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  CHECK(r.out.empty());

  Json dangling = Json::parse(text);
  dangling["loc"]["morphisms"].push_back({{"name", "x"}, {"source", "*"}, {"target", "nowhere"}});
  Run d = run("validate " + write_file("dangling.json", dangling.dump()).string());
  CHECK(d.code == 2);
  CHECK(d.err.find("nowhere") != std::string::npos);
}

TEST_CASE("verify is byte-identical across runs and tie-breaks change nothing") {
  for (const char* f : {"fix-a.json", "fix-b.json", "fix-c.json", "fix-d.json", "fix-e.json"}) {
    CAPTURE(f);
    Run a = run(std::string("verify ") + fixture_file(f));
    Run b = run(std::string("verify ") + fixture_file(f));
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(run(std::string("verify --seed-order reversed ") + fixture_file(f)).code == 0);
  }
}

TEST_CASE("max degree: flag, environment and default") {
  CHECK(Json::parse(run("hokan --fixture chain").out)["max_degree"] == 4);
  CHECK(Json::parse(run("hokan --fixture chain", "KANQFT_MAX_DEGREE=3").out)["max_degree"] == 3);
  CHECK(Json::parse(run("hokan --fixture chain --max-degree 5", "KANQFT_MAX_DEGREE=3").out)["max_degree"] ==
        5);
  CHECK(run("hokan --fixture chain", "KANQFT_MAX_DEGREE=four").code == 2);
}

TEST_CASE("markdown output, fixture listing and export round trip") {
  Run md = run("classify --fixture cauchy-z2 --format md");
  CHECK(md.code == 0);
  CHECK(md.out.rfind("# ", 0) == 0);
  CHECK(md.out.find("strongly-cauchy-flabby") != std::string::npos);

  Run list = run("--list-fixtures");
  CHECK(list.code == 0);
  for (const auto& n : fixture_names()) CHECK(list.out.find(n + "\n") != std::string::npos);

  Run ex = run("export --fixture chain");
  REQUIRE(ex.code == 0);
  CHECK(Json::parse(ex.out) == Json::parse(slurp(fixture_file("fix-e.json"))));
  fs::path copy = write_file("chain.json", ex.out);
  CHECK(run("verify " + copy.string()).out == run("verify " + fixture_file("fix-e.json")).out);
}

TEST_CASE("a failing assertion maps to exit code 1") {
  Report r = run_command("validate", fixture("bz2-matrix"), RunOptions{});
  CHECK(exit_code(r, std::nullopt) == 0);
  r.checks.push_back({"forced", CheckKind::Assertion, CheckStatus::Fail, std::nullopt, ""});
  CHECK_FALSE(r.assertions_hold());
  CHECK(exit_code(r, std::nullopt) == 1);
  CHECK(exit_code(r, std::vector<std::string>{"nonexistent"}) == 1);
  Report f = run_command("axioms", fixture("nonflabby"), RunOptions{});
  CHECK(exit_code(f, std::vector<std::string>{"flabby", "u-isotony"}) == 0);
  CHECK(exit_code(f, std::vector<std::string>{}) == 3);
}

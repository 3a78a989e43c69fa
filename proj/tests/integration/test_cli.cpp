#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "finpart/cli/commands.hpp"

using namespace finpart;
using namespace finpart::cli;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(FINPART_DATA) + "/" + name; }

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Invocation {
  int exit_code = -1;
  std::string out;
  std::string err;
};

Invocation invoke(const std::string& args) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string out = (dir / "finpart_cli_out.txt").string();
  const std::string err = (dir / "finpart_cli_err.txt").string();
  const std::string cmd = std::string(FINPART_TOOL) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Invocation r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read(out);
  r.err = read(err);
  return r;
}

Complex value(const json& j) { return {j[0].get<double>(), j[1].get<double>()}; }

}  // namespace

TEST_CASE("finite-part with both engines on the 2 pi problem") {
  const Invocation r = invoke("finite-part " + data("two_pi.json") + " --engine both");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["schema"] == 1);
  const auto& ex = j["result"]["expansions"];
  REQUIRE(ex.size() == 2);
  CHECK(ex[0]["engine"] == "mellin");
  CHECK(ex[1]["engine"] == "cutoff");
  const double pi2 = 2 * 3.14159265358979323846;
  CHECK(std::abs(value(ex[0]["log"]) - pi2) < 1e-8);
  CHECK(std::abs(value(ex[1]["log"]) - pi2) < 1e-4);
  CHECK(j["result"]["comparison"]["log_difference"].get<double>() < 1e-4);
}

TEST_CASE("check exact on a random d psi problem") {
  const Invocation r = invoke("check exact " + data("conformal.json") + " --tol 1e-8 --seed 9");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  for (const auto& c : j["result"]["checks"]) {
    CHECK(c["tag"] == "pr-02");
    CHECK(c["pass"] == true);
    CHECK(c["residual"].get<double>() < 1e-8);
  }
  CHECK(j["command"]["seed"] == 9);
}

TEST_CASE("zeta at a pole exits 3 and reports the residue") {
  const Invocation r = invoke("zeta " + data("two_pi.json") + " --s 0,0");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("residue 6.28319") != std::string::npos);
  const json j = json::parse(r.out);
  CHECK(j["status"] == "numerical_failure");
  CHECK(std::abs(value(j["error"]["pole"]["residue"]) - 2 * 3.14159265358979323846) < 1e-12);
}

TEST_CASE("invalid input exits 2") {
  const Invocation r = invoke("poles " + data("bad_window.json"));
  CHECK(r.exit_code == 2);
  CHECK(json::parse(r.out)["error"]["path"] == "window.inner");
  CHECK(invoke("residue " + data("not_tame.json")).exit_code == 2);
  CHECK(invoke("check crossing " + data("two_pi.json")).exit_code == 2);
  CHECK(invoke("check nonsense " + data("two_pi.json")).exit_code == 2);
  CHECK(invoke("zeta " + data("two_pi.json") + " --s x").exit_code == 2);
  CHECK(invoke("finite-part " + data("missing.json")).exit_code == 2);
  CHECK(invoke("cutoff " + data("two_pi.json") + " --eps 0.7").exit_code == 2);
}

TEST_CASE("a failing check exits 1") {
  const Invocation r = invoke("check conformal " + data("conformal.json") + " --tol 1e-14");
  CHECK(r.exit_code == 1);
  const json j = json::parse(r.out);
  CHECK(j["status"] == "check_failed");
  bool any_fail = false;
  for (const auto& c : j["result"]["checks"]) any_fail = any_fail || c["pass"] == false;
  CHECK(any_fail);
}

TEST_CASE("conformal checks pass at the spec tolerance") {
  const Invocation r = invoke("check conformal " + data("conformal.json"));
  CHECK(r.exit_code == 0);
  const json j = json::parse(r.out);
  std::set<std::string> tags;
  for (const auto& c : j["result"]["checks"]) tags.insert(c["tag"].get<std::string>());
  CHECK(tags == std::set<std::string>{"t-01iii", "t-02"});
  CHECK(j["result"]["notes"]["conformal"]["phi_source"] == "spec");
}

TEST_CASE("crossing and boundary checks") {
  const Invocation c = invoke("check all " + data("crossing.json"));
  CHECK(c.exit_code == 0);
  const json jc = json::parse(c.out);
  CHECK(!jc["result"]["checks"].empty());
  for (const auto& v : jc["result"]["checks"]) CHECK(v["tag"] == "t-06");

  const Invocation b = invoke("check boundary " + data("boundary.json"));
  CHECK(b.exit_code == 0);
  const json jb = json::parse(b.out);
  std::set<std::string> tags;
  for (const auto& v : jb["result"]["checks"]) tags.insert(v["tag"].get<std::string>());
  CHECK(tags == std::set<std::string>{"t-b01iii", "t-b01iv", "t-b04"});
}

TEST_CASE("json-out writes the report") {
  const auto path = (std::filesystem::temp_directory_path() / "finpart_report.json").string();
  std::filesystem::remove(path);
  const Invocation r = invoke("poles " + data("two_pi.json") + " --json-out " + path);
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(read(path));
  CHECK(payload(j) == payload(json::parse(r.out)));
  CHECK(j["result"]["poles"].size() == 1);
}

TEST_CASE("every subcommand runs through the library entry point") {
  const std::string text = read(data("boundary.json"));
  RunOptions opt;
  opt.s = Complex(0.5, 0.5);
  CHECK(run_text("zeta", text, opt).exit_code == kOk);
  CHECK(run_text("poles", text, opt).exit_code == kOk);
  const Report res = run_text("residue", text, opt);
  REQUIRE(res.exit_code == kOk);
  CHECK(res.json["result"]["pairing"]["difference"].get<double>() < 1e-8);
  opt.t = 0.3;
  const Report ls = run_text("level-set", text, opt);
  REQUIRE(ls.exit_code == kOk);
  const auto& vals = ls.json["result"]["values"];
  CHECK(std::abs(value(vals[0]["value"]) - value(vals[1]["value"])) < 1e-8);
  opt.eps = 0.01;
  const Report cut = run_text("cutoff", text, opt);
  REQUIRE(cut.exit_code == kOk);
  CHECK(std::abs(value(cut.json["result"]["value"]["value"]) -
                 value(cut.json["result"]["expansion_without_remainder"]["value"])) < 1e-3);
  const Report fp = run_text("finite-part", read(data("crossing.json")), opt);
  REQUIRE(fp.exit_code == kOk);
  CHECK(fp.json["result"]["expansions"][0]["coefficients"].size() == 4);
  CHECK(run_text("frobnicate", text, opt).exit_code == kInvalidInput);
}

TEST_CASE("byte-identical payloads across runs") {
  const Invocation a = invoke("check all " + data("two_pi.json") + " --seed 3");
  const Invocation b = invoke("check all " + data("two_pi.json") + " --seed 3");
  REQUIRE(a.exit_code == 0);
  CHECK(payload(json::parse(a.out)) == payload(json::parse(b.out)));
}

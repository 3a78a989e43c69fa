#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "finpart/cli/commands.hpp"

namespace {

struct Arguments {
  std::string spec_path;
  std::string engine;
  std::string json_out;
  std::string s;
  std::string check;
  double tol = 0.0;
  double t = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace

int main(int argc, char** argv) {
  using namespace finpart::cli;
  CLI::App app{"Regularized integrals of differential forms singular on a linear subspace"};
  app.require_subcommand(1);
  Arguments args;

  auto common = [&](CLI::App* sub) {
    sub->add_option("spec", args.spec_path, "Problem description (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--engine", args.engine, "mellin, cutoff or both")
        ->check(CLI::IsMember({"mellin", "cutoff", "both"}));
    sub->add_option("--tol", args.tol, "Tolerance for check verdicts")->check(CLI::PositiveNumber);
    sub->add_option("--json-out", args.json_out, "Also write the report to this file");
    sub->add_option("--seed", args.seed, "Seed for randomized checks");
  };

  std::map<std::string, CLI::App*> subs;
  subs["finite-part"] = app.add_subcommand("finite-part", "Divergent coefficients, I_0 and the finite part");
  subs["zeta"] = app.add_subcommand("zeta", "Continued zeta function at s");
  subs["poles"] = app.add_subcommand("poles", "Poles and residues of the zeta function");
  subs["residue"] = app.add_subcommand("residue", "Residue form on the singular locus");
  subs["level-set"] = app.add_subcommand("level-set", "Level-set integral I(t)");
  subs["cutoff"] = app.add_subcommand("cutoff", "Cutoff integral over the region mu >= eps^2");
  subs["check"] = app.add_subcommand("check", "Verify a transformation law numerically");
  subs["check"]->add_option("kind", args.check, "conformal, exact, residue, homogeneity, parity, crossing, boundary or all")
      ->required()
      ->check(CLI::IsMember(check_names()));
  for (auto& [name, sub] : subs) common(sub);
  subs["zeta"]->add_option("--s", args.s, "Point RE,IM")->required();
  subs["level-set"]->add_option("--t", args.t, "Level t")->required();
  subs["cutoff"]->add_option("--eps", args.eps, "Cutoff radius")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  std::string command;
  for (auto& [name, sub] : subs)
    if (sub->parsed()) command = name;

  RunOptions options;
  if (!args.engine.empty()) options.engine = args.engine;
  if (app.get_subcommand(command)->count("--tol") > 0) options.tolerance = args.tol;
  if (app.get_subcommand(command)->count("--seed") > 0) options.seed = args.seed;
  if (command == "level-set") options.t = args.t;
  if (command == "cutoff") options.eps = args.eps;
  options.check = args.check;

  std::ifstream in(args.spec_path);
  std::stringstream text;
  text << in.rdbuf();

  Report report;
  if (command == "zeta") {
    try {
      options.s = parse_complex_argument(args.s);
    } catch (const finpart::InvalidArgument& e) {
      std::cerr << "finpart: " << e.what() << '\n';
      return kInvalidInput;
    }
  }
  report = run_text(command, text.str(), options);

  const std::string out = report.json.dump(2);
  std::cout << out << '\n';
  if (!args.json_out.empty()) {
    std::ofstream file(args.json_out);
    file << out << '\n';
    if (!file) {
      std::cerr << "finpart: cannot write " << args.json_out << '\n';
      return kInvalidInput;
    }
  }
  if (!report.message.empty()) std::cerr << "finpart: " << report.message << '\n';
  return report.exit_code;
}

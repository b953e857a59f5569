// posvcg: classify utilities, run the affine VCG mechanism, verify incentive
// compatibility and ontoness, fit affine maximizers, enumerate no-transfer
// rules. Input and output are JSON documents.

#include "posvcg/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

namespace {

std::string read_all(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw posvcg::Error(posvcg::ErrorCode::ParseError, "cannot open input file \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int emit(const posvcg::io::Json& report, const std::string& output) {
  const std::string text = report.dump(2) + "\n";
  if (output.empty() || output == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) {
    std::cerr << "posvcg: cannot write \"" << output << "\"\n";
    return 1;
  }
  out << text;
  return out ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  using posvcg::cli::Command;

  CLI::App app{"Quasi-linear representation and affine VCG toolkit"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string output;
  std::uint64_t budget = 0;
  std::string mode;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("-i,--input", input, "input JSON path, '-' for stdin")->required();
    sub->add_option("-o,--output", output, "output path (default stdout)");
  };
  auto add_scenario_flags = [&](CLI::App* sub) {
    sub->add_option("--budget", budget, "outcome evaluation cap");
    sub->add_option("--mode", mode, "representation mode override")->check(CLI::IsMember({"pos", "full"}));
  };

  auto* classify = app.add_subcommand("classify", "classify a utility function");
  add_io(classify);
  auto* run = app.add_subcommand("run", "run the mechanism on the true types");
  add_io(run);
  add_scenario_flags(run);
  auto* verify = app.add_subcommand("verify", "exhaustive verification");
  verify->require_subcommand(1);
  auto* ic = verify->add_subcommand("ic", "dominant-strategy incentive compatibility");
  add_io(ic);
  add_scenario_flags(ic);
  auto* onto = verify->add_subcommand("onto", "every alternative is chosen somewhere");
  add_io(onto);
  add_scenario_flags(onto);
  auto* fit = app.add_subcommand("fit", "recover affine maximizer parameters from a table");
  add_io(fit);
  auto* enumerate = app.add_subcommand("enumerate", "enumerate IC onto no-transfer rules");
  add_io(enumerate);
  enumerate->add_option("--budget", budget, "search node cap");

  CLI11_PARSE(app, argc, argv);

  Command command = Command::Classify;
  if (*run) command = Command::Run;
  else if (*ic) command = Command::VerifyIc;
  else if (*onto) command = Command::VerifyOnto;
  else if (*fit) command = Command::Fit;
  else if (*enumerate) command = Command::Enumerate;

  posvcg::cli::Options opts;
  if (budget > 0) opts.budget = budget;
  if (!mode.empty()) opts.mode = posvcg::io::mode_from_string(mode);

  posvcg::cli::CommandResult result;
  try {
    result = posvcg::cli::execute(command, read_all(input), opts);
  } catch (const posvcg::Error& e) {
    posvcg::cli::detail::Sorted top;
    top["command"] = posvcg::cli::command_name(command);
    top["error"] = posvcg::cli::detail::error_object(e, nullptr);
    top["schema_version"] = posvcg::cli::kSchemaVersion;
    result = {posvcg::cli::kInputError, posvcg::cli::detail::freeze(top)};
  }
  if (emit(result.report, output) != 0) return posvcg::cli::kInputError;
  return result.exit_code;
}

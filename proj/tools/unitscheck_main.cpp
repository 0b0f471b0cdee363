#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unitscheck/cli.hpp"

namespace {

void add_files_option(CLI::App* cmd, std::vector<std::string>& files) {
  cmd->add_option("files", files, "source files (.f90)")->required()->expected(-1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"units-of-measure checker for mini-Fortran sources"};
  app.require_subcommand(1);

  unitscheck::CliConfig config;

  auto* suggest = app.add_subcommand(
      "suggest", "report the critical variables that need a unit annotation");
  suggest->alias("units-suggest");
  suggest->add_flag("--json", config.json, "machine-readable output");
  suggest->add_flag("--burden", config.show_burden,
                    "also report the annotation-burden reduction");
  add_files_option(suggest, config.files);

  auto* infer = app.add_subcommand("infer", "report inferred unit specifications");
  infer->alias("units-infer");
  infer->add_flag("--json", config.json, "machine-readable output");
  add_files_option(infer, config.files);

  auto* check = app.add_subcommand("check", "check the code against its unit annotations");
  check->alias("units-check");
  check->add_flag("--json", config.json, "machine-readable output");
  add_files_option(check, config.files);

  auto* synth = app.add_subcommand(
      "synth", "insert inferred unit annotations into the source");
  synth->alias("units-synth");
  auto* in_place = synth->add_flag("--in-place", config.in_place, "rewrite the files themselves");
  std::string output_path;
  auto* output = synth->add_option("--output", output_path,
                                   "write the rewritten source to this path");
  output->excludes(in_place);
  add_files_option(synth, config.files);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (suggest->parsed()) config.mode = unitscheck::CliConfig::Mode::Suggest;
  if (infer->parsed()) config.mode = unitscheck::CliConfig::Mode::Infer;
  if (check->parsed()) config.mode = unitscheck::CliConfig::Mode::Check;
  if (synth->parsed()) {
    config.mode = unitscheck::CliConfig::Mode::Synth;
    if (!output_path.empty()) config.output_path = output_path;
  }

  return unitscheck::run(config, std::cout, std::cerr);
}

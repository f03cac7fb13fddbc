#include <CLI11.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pfd/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pfd: probability functional descent on finite spaces"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a configured run");
  std::vector<std::string> configs;
  std::string out_dir;
  int jobs = 1;
  bool timing = false;
  run->add_option("--config", configs, "run configuration file (repeatable)")
      ->required()
      ->expected(-1);
  run->add_option("--out", out_dir,
                  "output directory (overrides [run] out_dir; with several "
                  "configs, each writes to <out>/<config-stem>/)");
  run->add_option("--jobs", jobs, "concurrent runs when several configs are given")
      ->check(CLI::PositiveNumber);
  run->add_flag("--timing", timing,
                "fill the wall_ms column (breaks byte-identical reruns)");

  auto* verify = app.add_subcommand("verify", "run verification suites");
  std::string suite;
  verify->add_option("--suite", suite, "suite name (default: all)");

  auto* list = app.add_subcommand("list-presets", "print the preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run->parsed()) {
    const std::optional<std::string> out =
        out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir);
    return pfd::cmd_run_many(configs, out, jobs, timing);
  }
  if (verify->parsed()) {
    const std::optional<std::string> s =
        suite.empty() ? std::nullopt : std::optional<std::string>(suite);
    return pfd::cmd_verify(s);
  }
  if (list->parsed()) return pfd::cmd_list_presets();
  return 1;
}

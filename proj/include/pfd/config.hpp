#pragma once

#include <optional>
#include <string>

#include "pfd/engine.hpp"

namespace pfd {

// The INI keys as written, kept for canonical serialization. [run] values are
// resolved (defaults filled) when the PfdConfig is built.
struct ConfigData {
  // [problem]
  std::string kind;  // gan | vi | rl
  std::uint64_t problem_seed = 0;
  std::optional<int> n;
  std::optional<std::string> target;    // gan: comma-separated masses
  std::optional<std::string> metric;    // gan: "line"
  std::optional<std::string> instance;  // rl: mdp file path
  std::optional<int> states;
  std::optional<int> actions;
  std::optional<double> gamma;
  std::optional<std::string> prior;  // vi: comma-separated masses
  std::optional<std::string> lik;    // vi: comma-separated likelihood values

  // [algorithm]
  std::optional<std::string> preset;
  std::optional<std::string> functional;  // js | ns | w | vi | rl
  std::optional<std::string> estimator;   // exact | dual_ascent | classifier | mc_q | lsq_v
  std::optional<std::string> descent;     // gradient | global_min
  std::optional<std::string> grad_kind;   // exact | score

  // [run], resolved
  int outer_steps = 100;
  std::optional<double> learning_rate;  // absent for global_min descent
  double inner_learning_rate = 0.1;
  int inner_steps = 100;
  int samples = 1000;
  double tolerance = 1e-3;
  double lr_v = 0.5;  // saddle runs only
  std::uint64_t seed = 0;
  std::string out_dir;
  bool record_residual = false;
};

struct RunSpec {
  ConfigData data;
  PfdConfig cfg;
};

// Parses and validates a run configuration. Documented defaults:
// learning_rate = 0.1, inner_steps = 100, seed = 0. Unknown keys, missing
// required keys, and bad enum values raise ConfigError with line numbers.
RunSpec parse_config_file(const std::string& path);
RunSpec parse_config_text(const std::string& text, const std::string& origin = "<config>");

// Canonical INI form; parse(serialize(spec)) reproduces the same resolved
// configuration.
std::string serialize_config(const RunSpec& spec);

}  // namespace pfd

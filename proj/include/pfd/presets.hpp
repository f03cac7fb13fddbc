#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfd/engine.hpp"

namespace pfd {

// The named algorithm wirings. Each preset fixes the functional, the
// influence estimator, and the descent rule of one PFD configuration.
enum class PresetName {
  minimax_gan,
  nonsaturating_gan,
  wasserstein_gan,
  bbvi,
  avb,
  policy_iteration,
  policy_gradient,
  actor_critic,
  dual_actor_critic,
};

std::vector<std::string> preset_names();
std::optional<PresetName> preset_from_name(std::string_view name);
std::string to_string(PresetName name);

// Wires the preset over the given problem context. Throws ConfigError when
// the context family does not match (GANs need two measures, VI a latent
// model, RL an MDP). Step counts and seeds stay at PfdConfig defaults for the
// caller to override.
PfdConfig build_preset(PresetName name, ProblemContext context);

struct DacRunConfig {
  int outer_steps = 20000;
  double lr_policy = 0.1;
  double lr_v = 0.5;
};

struct DacResult {
  Policy policy;       // conditional policy recovered from the joint
  Eigen::VectorXd V;   // critic at the final step
  ProbVector joint;    // joint occupancy iterate
  std::vector<TraceRecord> trace;
};

// Simultaneous full-batch ascent on joint-occupancy logits and descent on the
// tabular critic of the saddle objective dac_objective. Signs are fixed so the
// recovered policy maximizes expected reward.
DacResult run_dual_actor_critic(const TabularMdp& mdp, const DacRunConfig& cfg,
                                const TraceCallback& on_record = {});

// Runs any PfdConfig, dispatching saddle configs to run_dual_actor_critic.
PfdResult run_config(const PfdConfig& cfg, const TraceCallback& on_record = {});

}  // namespace pfd

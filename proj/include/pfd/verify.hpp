#pragma once

#include <string>
#include <vector>

#include "pfd/functional.hpp"
#include "pfd/mdp.hpp"
#include "pfd/transport.hpp"

namespace pfd {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // worst observed value
  double threshold = 0.0;
  std::string note;
};

// Suite names, one per acceptance criterion:
// influence, chain_rule, duality, classifier, transport, gan_presets,
// vi_presets, rl_exact, policy_iteration, dual_actor_critic, unbiasedness,
// determinism.
std::vector<std::string> verify_suite_names();

std::vector<CheckResult> run_verify_suite(const std::string& suite);
std::vector<CheckResult> run_all_suites();

// Worst influence residual of J's own closed-form influence over random
// interior (mu, probe) pairs on an n-point space. Used both by the influence
// suite and by mutation tests on deliberately broken influences.
double max_influence_residual(const FunctionalHandle& J, Eigen::Index n, int instances,
                              CounterRng rng, double eps = kFdStep);

// Transportation LP solved by exhaustive basic-feasible-solution enumeration
// over all spanning-tree bases; independent of the simplex implementation.
double w1_bruteforce(const ProbVector& mu, const ProbVector& nu, const MetricSpace& m);

// Greedy policy of the value-iteration fixed point (sup-norm tolerance tol).
Policy value_iteration_policy(const TabularMdp& mdp, double tol = 1e-13);

}  // namespace pfd

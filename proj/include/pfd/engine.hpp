#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pfd/divergences.hpp"
#include "pfd/estimators.hpp"
#include "pfd/mdp.hpp"
#include "pfd/space.hpp"
#include "pfd/transport.hpp"

namespace pfd {

enum class GradKind { exact_chain_rule, score_function };

struct GradientRule {
  double learning_rate = 0.1;
  GradKind kind = GradKind::exact_chain_rule;
  int samples = 1000;  // score-function draws per descent step
};

struct GlobalMinRule {};

using DescentRule = std::variant<GradientRule, GlobalMinRule>;

struct TraceRecord {
  int step = 0;
  double j_value = 0.0;
  std::optional<double> grad_norm;  // empty on the initial record
  std::optional<double> influence_residual;
  std::optional<double> tv_to_target;
  double wall_ms = 0.0;
};

enum class DivergenceKind { js, ns, wasserstein };

struct GanContext {
  DivergenceKind div = DivergenceKind::js;
  ProbVector nu;
  std::optional<MetricSpace> metric;  // wasserstein only; defaults to the unit line
  LogitParam theta0;
};

struct ViContext {
  LatentModel model;
  LogitParam theta0;
};

struct RlContext {
  TabularMdp mdp;
  Policy policy0;
};

using ProblemContext = std::variant<GanContext, ViContext, RlContext>;

// Learning rates of the dual actor-critic saddle loop.
struct DacConfig {
  double lr_policy = 0.1;  // ascent on joint-occupancy logits
  double lr_v = 0.5;       // descent on the tabular critic
};

struct PfdConfig {
  ProblemContext context;
  EstimatorConfig estimator;
  DescentRule descent = GradientRule{};
  int outer_steps = 100;
  std::uint64_t seed = 0;
  std::optional<ProbVector> target;  // TV diagnostic
  bool record_residual = false;
  std::optional<DacConfig> saddle;  // set only by the dual_actor_critic preset
};

using TraceCallback = std::function<void(const TraceRecord&)>;

struct PfdResult {
  ProbVector final_measure;        // mu_theta, q, or the joint occupancy
  Eigen::MatrixXd final_logits;    // 1 x n for measure problems, S x A for RL
  std::vector<TraceRecord> trace;  // outer_steps + 1 records
  std::string summary;
};

// Algorithm loop: alternately estimate the influence (centered) and descend
// E_mu[psi_hat] under the configured rule. Deterministic given cfg.seed.
// Estimator state (dual variable, classifier logits) persists across outer
// steps, so inner_steps = 1 realizes simultaneous-update variants.
// Saddle configs are rejected here; they run via run_dual_actor_critic.
PfdResult pfd_run(const PfdConfig& cfg, const TraceCallback& on_record = {});

// theta - lr * g, g the exact chain-rule or score-function gradient of
// theta -> E_{softmax(theta)}[psi_hat].
LogitParam descent_gradient_step(const LogitParam& theta, const InfluenceVector& psi_hat,
                                 double lr, GradKind kind, CounterRng& rng,
                                 int samples = 1000);

// Per state, all conditional mass on argmin_a psi_hat(s, .); lowest-index ties.
Policy descent_global_min(const Eigen::MatrixXd& psi_hat_sa, const Policy& policy);

}  // namespace pfd

#include "pfd/presets.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "pfd/numerics.hpp"

namespace pfd {
namespace {

using Clock = std::chrono::steady_clock;

const GanContext& require_gan(const ProblemContext& ctx, PresetName name) {
  if (const auto* gan = std::get_if<GanContext>(&ctx)) return *gan;
  throw ConfigError("preset " + to_string(name) + " needs a GAN context (two measures)");
}

const ViContext& require_vi(const ProblemContext& ctx, PresetName name) {
  if (const auto* vi = std::get_if<ViContext>(&ctx)) return *vi;
  throw ConfigError("preset " + to_string(name) + " needs a VI context (latent model)");
}

const RlContext& require_rl(const ProblemContext& ctx, PresetName name) {
  if (const auto* rl = std::get_if<RlContext>(&ctx)) return *rl;
  throw ConfigError("preset " + to_string(name) + " needs an RL context (tabular MDP)");
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"minimax_gan", "nonsaturating_gan", "wasserstein_gan",
          "bbvi",        "avb",               "policy_iteration",
          "policy_gradient", "actor_critic",  "dual_actor_critic"};
}

std::optional<PresetName> preset_from_name(std::string_view name) {
  const auto names = preset_names();
  for (std::size_t k = 0; k < names.size(); ++k)
    if (name == names[k]) return static_cast<PresetName>(k);
  return std::nullopt;
}

std::string to_string(PresetName name) {
  return preset_names()[static_cast<std::size_t>(name)];
}

PfdConfig build_preset(PresetName name, ProblemContext context) {
  PfdConfig cfg;
  switch (name) {
    case PresetName::minimax_gan: {
      GanContext gan = require_gan(context, name);
      gan.div = DivergenceKind::js;
      cfg.context = std::move(gan);
      cfg.estimator = {EstimatorKind::dual_ascent, 100, 1.0, 1000, 1e-3};
      cfg.descent = GradientRule{1.0, GradKind::exact_chain_rule, 1000};
      break;
    }
    case PresetName::nonsaturating_gan: {
      GanContext gan = require_gan(context, name);
      gan.div = DivergenceKind::ns;
      cfg.context = std::move(gan);
      cfg.estimator = {EstimatorKind::classifier, 200, 2.0, 1000, 1e-3};
      cfg.descent = GradientRule{0.5, GradKind::exact_chain_rule, 1000};
      break;
    }
    case PresetName::wasserstein_gan: {
      GanContext gan = require_gan(context, name);
      gan.div = DivergenceKind::wasserstein;
      if (!gan.metric) gan.metric = MetricSpace::line(gan.nu.size());
      cfg.context = std::move(gan);
      cfg.estimator = {EstimatorKind::dual_ascent, 30, 0.05, 1000, 1e-3};
      cfg.descent = GradientRule{2e-3, GradKind::exact_chain_rule, 1000};
      break;
    }
    case PresetName::bbvi: {
      cfg.context = require_vi(context, name);
      cfg.estimator = {EstimatorKind::exact, 1, 0.1, 1000, 1e-3};
      cfg.descent = GradientRule{0.2, GradKind::score_function, 1000};
      break;
    }
    case PresetName::avb: {
      cfg.context = require_vi(context, name);
      cfg.estimator = {EstimatorKind::classifier, 200, 2.0, 1000, 1e-3};
      cfg.descent = GradientRule{0.5, GradKind::exact_chain_rule, 1000};
      break;
    }
    case PresetName::policy_iteration: {
      cfg.context = require_rl(context, name);
      cfg.estimator = {EstimatorKind::exact, 1, 0.1, 1000, 1e-3};
      cfg.descent = GlobalMinRule{};
      break;
    }
    case PresetName::policy_gradient: {
      cfg.context = require_rl(context, name);
      cfg.estimator = {EstimatorKind::mc_q, 1, 0.1, 100, 1e-3};
      cfg.descent = GradientRule{0.1, GradKind::score_function, 1000};
      break;
    }
    case PresetName::actor_critic: {
      cfg.context = require_rl(context, name);
      cfg.estimator = {EstimatorKind::lsq_v, 1, 0.1, 100, 1e-3};
      cfg.descent = GradientRule{0.1, GradKind::score_function, 1000};
      break;
    }
    case PresetName::dual_actor_critic: {
      cfg.context = require_rl(context, name);
      cfg.estimator = {EstimatorKind::dual_ascent, 1, 0.1, 1000, 1e-3};
      cfg.descent = GradientRule{0.1, GradKind::exact_chain_rule, 1000};
      cfg.saddle = DacConfig{0.1, 0.5};
      cfg.outer_steps = 20000;
      break;
    }
  }
  return cfg;
}

DacResult run_dual_actor_critic(const TabularMdp& mdp, const DacRunConfig& cfg,
                                const TraceCallback& on_record) {
  if (cfg.outer_steps < 0) throw ConfigError("run_dual_actor_critic: outer_steps < 0");
  const int n = mdp.S * mdp.A;
  Eigen::VectorXd logits = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd V = Eigen::VectorXd::Zero(mdp.S);

  DacResult out;
  auto emit = [&](TraceRecord r) {
    out.trace.push_back(r);
    if (on_record) on_record(r);
  };

  auto joint_of = [&](const Eigen::VectorXd& L) { return softmax(L); };

  auto t0 = Clock::now();
  emit({0, j_rl(mdp, policy_from_joint(mdp, joint_of(logits))), std::nullopt,
        std::nullopt, std::nullopt,
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count()});

  for (int k = 1; k <= cfg.outer_steps; ++k) {
    t0 = Clock::now();
    const ProbVector joint = joint_of(logits);
    const Eigen::MatrixXd AV = bellman_apply(mdp, V);

    // d objective / d joint = A V; pull back through the softmax.
    Eigen::VectorXd av_flat(n);
    for (int s = 0; s < mdp.S; ++s)
      for (int a = 0; a < mdp.A; ++a) av_flat[mdp.sa(s, a)] = AV(s, a);
    const double mean = cdot(joint.vec(), av_flat);
    const Eigen::VectorXd g_logits =
        joint.vec().array() * (av_flat.array() - mean);

    // d objective / d V(s) = (1-gamma) p0(s) + gamma * inflow(s) - marginal(s).
    Eigen::VectorXd g_v = (1.0 - mdp.gamma) * mdp.p0.vec();
    for (int s = 0; s < mdp.S; ++s)
      for (int a = 0; a < mdp.A; ++a) {
        const double w = joint[mdp.sa(s, a)];
        g_v += mdp.gamma * w * mdp.P.row(mdp.sa(s, a)).transpose();
        g_v[s] -= w;
      }

    logits += cfg.lr_policy * g_logits;  // ascent on the occupancy player
    V -= cfg.lr_v * g_v;                 // descent on the critic

    const double j = j_rl(mdp, policy_from_joint(mdp, joint_of(logits)));
    if (!std::isfinite(j))
      throw NumericalError("run_dual_actor_critic: non-finite objective at step " +
                           std::to_string(k));
    emit({k, j,
          std::sqrt(g_logits.squaredNorm() + g_v.squaredNorm()), std::nullopt,
          std::nullopt,
          std::chrono::duration<double, std::milli>(Clock::now() - t0).count()});
  }

  out.joint = joint_of(logits);
  out.policy = policy_from_joint(mdp, out.joint);
  out.V = V;
  return out;
}

PfdResult run_config(const PfdConfig& cfg, const TraceCallback& on_record) {
  if (!cfg.saddle) return pfd_run(cfg, on_record);
  const auto* rl = std::get_if<RlContext>(&cfg.context);
  if (!rl) throw ConfigError("saddle runs need an RL context");
  DacRunConfig dac;
  dac.outer_steps = cfg.outer_steps;
  dac.lr_policy = cfg.saddle->lr_policy;
  dac.lr_v = cfg.saddle->lr_v;
  DacResult r = run_dual_actor_critic(rl->mdp, dac, on_record);

  PfdResult out;
  out.final_measure = r.joint;
  out.final_logits = r.policy.logits;
  out.trace = std::move(r.trace);
  std::ostringstream os;
  os.precision(17);
  const Eigen::MatrixXd probs = r.policy.probs();
  os << "policy pi(a|s), one row per state\n";
  for (int s = 0; s < rl->mdp.S; ++s) {
    os << s;
    for (int a = 0; a < rl->mdp.A; ++a) os << ' ' << probs(s, a);
    os << '\n';
  }
  os << "V\n";
  for (int s = 0; s < rl->mdp.S; ++s) os << s << ' ' << r.V[s] << '\n';
  out.summary = os.str();
  return out;
}

}  // namespace pfd

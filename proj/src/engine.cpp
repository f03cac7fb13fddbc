#include "pfd/engine.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include "pfd/numerics.hpp"

namespace pfd {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Differentiation step for measure-space problems; inner state (dual
// variable or classifier logits) lives across outer steps.
struct MeasureEstimator {
  std::function<InfluenceVector(const ProbVector&, CounterRng&)> run;
};

MeasureEstimator make_gan_estimator(const GanContext& ctx, const FunctionalHandle& J,
                                    const MetricSpace* metric,
                                    const EstimatorConfig& cfg) {
  switch (cfg.kind) {
    case EstimatorKind::exact:
      return {[J](const ProbVector& mu, CounterRng&) { return estimate_exact(J, mu); }};
    case EstimatorKind::dual_ascent: {
      DualProblem problem;
      if (ctx.div == DivergenceKind::js) {
        problem = js_dual_problem(ctx.nu);
      } else if (ctx.div == DivergenceKind::wasserstein) {
        problem = w1_dual_problem(ctx.nu, *metric);
      } else {
        throw ConfigError("dual_ascent estimator: no conjugate wired for J_NS");
      }
      auto state = std::make_shared<Eigen::VectorXd>();
      return {[problem, cfg, state](const ProbVector& mu, CounterRng&) {
        return estimate_dual_ascent(problem, mu, cfg, state.get()).phi;
      }};
    }
    case EstimatorKind::classifier: {
      if (ctx.div != DivergenceKind::ns)
        throw ConfigError("classifier estimator: GAN wiring targets J_NS");
      auto state = std::make_shared<Eigen::VectorXd>();
      const ProbVector nu = ctx.nu;
      return {[nu, cfg, state](const ProbVector& mu, CounterRng&) {
        return estimate_classifier(mu, nu, cfg, state.get()).log_ratio;
      }};
    }
    default:
      throw ConfigError("estimator kind not available for a GAN problem");
  }
}

MeasureEstimator make_vi_estimator(const ViContext& ctx, const FunctionalHandle& J,
                                   const EstimatorConfig& cfg) {
  switch (cfg.kind) {
    case EstimatorKind::exact:
      return {[J](const ProbVector& q, CounterRng&) { return estimate_exact(J, q); }};
    case EstimatorKind::classifier: {
      // Adversarial wiring: the classifier of q against the prior recovers
      // f = log(q/p(z)); the influence estimate is f - log p(x|z).
      if (ctx.model.likelihood().minCoeff() <= 0.0)
        throw BoundaryError("avb estimator: likelihood has zero mass");
      const ProbVector prior = ctx.model.prior();
      const Eigen::VectorXd log_lik = ctx.model.likelihood().array().log();
      auto state = std::make_shared<Eigen::VectorXd>();
      return {[prior, log_lik, cfg, state](const ProbVector& q, CounterRng&) {
        const ClassifierResult c = estimate_classifier(q, prior, cfg, state.get());
        return center(c.log_ratio - log_lik, q);
      }};
    }
    default:
      throw ConfigError("estimator kind not available for a VI problem");
  }
}

struct MeasureProblem {
  FunctionalHandle J;
  LogitParam theta0;
  MeasureEstimator estimator;
};

MeasureProblem assemble_measure_problem(const PfdConfig& cfg) {
  if (const auto* gan = std::get_if<GanContext>(&cfg.context)) {
    if (gan->theta0.size() != gan->nu.size())
      throw ConfigError("pfd_run: theta0 size does not match the target measure");
    MeasureProblem p;
    std::optional<MetricSpace> metric = gan->metric;
    if (gan->div == DivergenceKind::wasserstein && !metric)
      metric = MetricSpace::line(gan->nu.size());
    switch (gan->div) {
      case DivergenceKind::js: p.J = make_js(gan->nu); break;
      case DivergenceKind::ns: p.J = make_ns(gan->nu); break;
      case DivergenceKind::wasserstein: p.J = make_w1(gan->nu, *metric); break;
    }
    p.theta0 = gan->theta0;
    p.estimator = make_gan_estimator(*gan, p.J, metric ? &*metric : nullptr,
                                     cfg.estimator);
    return p;
  }
  const auto& vi = std::get<ViContext>(cfg.context);
  if (vi.theta0.size() != vi.model.latent_size())
    throw ConfigError("pfd_run: theta0 size does not match the latent space");
  MeasureProblem p;
  p.J = make_vi(vi.model);
  p.theta0 = vi.theta0;
  p.estimator = make_vi_estimator(vi, p.J, cfg.estimator);
  return p;
}

std::string describe_measure(const ProbVector& mu) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < mu.size(); ++i) os << i << ' ' << mu[i] << '\n';
  return os.str();
}

PfdResult run_measure(const PfdConfig& cfg, const TraceCallback& cb) {
  MeasureProblem prob = assemble_measure_problem(cfg);
  const auto* rule = std::get_if<GradientRule>(&cfg.descent);
  if (!rule) throw ConfigError("pfd_run: global_min descent requires an MDP problem");
  if (!(rule->learning_rate > 0.0))
    throw ConfigError("pfd_run: learning rate must be > 0");
  if (cfg.target && cfg.target->size() != prob.theta0.size())
    throw ConfigError("pfd_run: target size does not match the problem space");

  CounterRng root(cfg.seed);
  LogitParam theta = prob.theta0;
  PfdResult out;
  auto emit = [&](TraceRecord r) {
    out.trace.push_back(r);
    if (cb) cb(r);
  };

  auto t0 = Clock::now();
  ProbVector mu = softmax(theta);
  const double j0 = prob.J.value(mu);
  if (!std::isfinite(j0))
    throw NumericalError("pfd_run: J not finite at the initial measure");
  emit({0, j0, std::nullopt, std::nullopt,
        cfg.target ? std::optional<double>(tv_distance(mu, *cfg.target)) : std::nullopt,
        ms_since(t0)});

  for (int k = 1; k <= cfg.outer_steps; ++k) {
    t0 = Clock::now();
    mu = softmax(theta);
    CounterRng est_rng = root.fork(2 * static_cast<std::uint64_t>(k));
    CounterRng descent_rng = root.fork(2 * static_cast<std::uint64_t>(k) + 1);

    InfluenceVector psi;
    try {
      psi = prob.estimator.run(mu, est_rng);
    } catch (const DivergenceError& e) {
      throw DivergenceError("outer step " + std::to_string(k) + ": " + e.what());
    }

    std::optional<double> resid;
    if (cfg.record_residual) {
      CounterRng probe_rng = root.fork(0x1000000ull + static_cast<std::uint64_t>(k));
      resid = influence_residual(prob.J, psi, mu,
                                 residual_probes(mu, 20, probe_rng));
    }

    const Eigen::VectorXd g =
        rule->kind == GradKind::exact_chain_rule
            ? chain_rule_grad(psi, theta)
            : score_function_grad(psi, theta, descent_rng, rule->samples);
    theta -= rule->learning_rate * g;

    mu = softmax(theta);
    const double j = prob.J.value(mu);
    if (!std::isfinite(j))
      throw NumericalError("pfd_run: J not finite after outer step " + std::to_string(k));
    emit({k, j, g.norm(), resid,
          cfg.target ? std::optional<double>(tv_distance(mu, *cfg.target)) : std::nullopt,
          ms_since(t0)});
  }

  out.final_measure = softmax(theta);
  out.final_logits = theta.transpose();
  out.summary = describe_measure(out.final_measure);
  return out;
}

Eigen::MatrixXd rl_chain_rule_grad(const Eigen::MatrixXd& psi, const Occupancy& occ,
                                   const Eigen::MatrixXd& probs) {
  Eigen::MatrixXd g(psi.rows(), psi.cols());
  for (Eigen::Index s = 0; s < psi.rows(); ++s) {
    const double mean = probs.row(s).dot(psi.row(s));
    g.row(s) = occ.d[s] * (probs.row(s).array() * (psi.row(s).array() - mean)).matrix();
  }
  return g;
}

std::string describe_policy(const TabularMdp& mdp, const Policy& policy) {
  std::ostringstream os;
  os.precision(17);
  const Eigen::MatrixXd probs = policy.probs();
  const PolicyEval pe = policy_eval(mdp, policy);
  os << "policy pi(a|s), one row per state\n";
  for (int s = 0; s < mdp.S; ++s) {
    os << s;
    for (int a = 0; a < mdp.A; ++a) os << ' ' << probs(s, a);
    os << '\n';
  }
  os << "V\n";
  for (int s = 0; s < mdp.S; ++s) os << s << ' ' << pe.V[s] << '\n';
  return os.str();
}

PfdResult run_rl(const PfdConfig& cfg, const TraceCallback& cb) {
  const auto& ctx = std::get<RlContext>(cfg.context);
  const TabularMdp& mdp = ctx.mdp;
  if (ctx.policy0.logits.rows() != mdp.S || ctx.policy0.logits.cols() != mdp.A)
    throw ConfigError("pfd_run: policy0 shape does not match the MDP");
  if (cfg.target && cfg.target->size() != static_cast<Eigen::Index>(mdp.S) * mdp.A)
    throw ConfigError("pfd_run: target size does not match the joint space");
  if (cfg.estimator.kind == EstimatorKind::classifier ||
      cfg.estimator.kind == EstimatorKind::dual_ascent)
    throw ConfigError(
        "pfd_run: RL problems support exact, mc_q, and lsq_v estimators "
        "(dual_actor_critic runs the saddle loop)");
  const auto* grule = std::get_if<GradientRule>(&cfg.descent);
  if (grule && !(grule->learning_rate > 0.0))
    throw ConfigError("pfd_run: learning rate must be > 0");

  const FunctionalHandle J_joint = make_rl_joint(mdp);
  CounterRng root(cfg.seed);
  Policy policy = ctx.policy0;
  PfdResult out;
  auto emit = [&](TraceRecord r) {
    out.trace.push_back(r);
    if (cb) cb(r);
  };

  auto record_tv = [&](const ProbVector& joint) {
    return cfg.target ? std::optional<double>(tv_distance(joint, *cfg.target))
                      : std::nullopt;
  };

  auto t0 = Clock::now();
  emit({0, j_rl(mdp, policy), std::nullopt, std::nullopt,
        record_tv(occupancy_measure(mdp, policy)), ms_since(t0)});

  for (int k = 1; k <= cfg.outer_steps; ++k) {
    t0 = Clock::now();
    CounterRng est_rng = root.fork(2 * static_cast<std::uint64_t>(k));
    CounterRng descent_rng = root.fork(2 * static_cast<std::uint64_t>(k) + 1);

    const Occupancy occ = discounted_occupancy(mdp, policy);
    const Eigen::MatrixXd probs = policy.probs();
    Eigen::MatrixXd psi(mdp.S, mdp.A);
    try {
      switch (cfg.estimator.kind) {
        case EstimatorKind::exact:
          psi = rl_influence(mdp, policy);
          break;
        case EstimatorKind::mc_q:
          // Monte Carlo Q directly as the (negated, scaled) estimate; the
          // descent step is invariant to the missing per-state baseline.
          psi = -estimate_mc_q(mdp, policy, est_rng, cfg.estimator) /
                (1.0 - mdp.gamma);
          break;
        case EstimatorKind::lsq_v: {
          const Eigen::MatrixXd q_hat =
              estimate_mc_q(mdp, policy, est_rng, cfg.estimator);
          const LsqVResult fit = estimate_lsq_v(mdp, policy, q_hat, occ.d);
          for (int s = 0; s < mdp.S; ++s) {
            if (std::isnan(fit.V[s])) {
              psi.row(s).setZero();  // zero-weight state: no descent signal
            } else {
              psi.row(s) =
                  (-(q_hat.row(s).array() - fit.V[s]) / (1.0 - mdp.gamma)).matrix();
            }
          }
          break;
        }
        default:
          throw ConfigError("unreachable estimator kind");
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError("outer step " + std::to_string(k) + ": " + e.what());
    }

    // Center under the current joint occupancy measure.
    ProbVector joint = occupancy_measure(mdp, policy);
    {
      Eigen::VectorXd flat(mdp.S * mdp.A);
      for (int s = 0; s < mdp.S; ++s)
        for (int a = 0; a < mdp.A; ++a) flat[mdp.sa(s, a)] = psi(s, a);
      flat = center(flat, joint);
      for (int s = 0; s < mdp.S; ++s)
        for (int a = 0; a < mdp.A; ++a) psi(s, a) = flat[mdp.sa(s, a)];
    }

    std::optional<double> resid;
    if (cfg.record_residual && joint.strictly_positive()) {
      // Probes preserve the state marginal: psi estimates lacking the exact
      // V-baseline are influence functions only along such directions.
      CounterRng probe_rng = root.fork(0x1000000ull + static_cast<std::uint64_t>(k));
      Eigen::VectorXd flat(mdp.S * mdp.A);
      for (int s = 0; s < mdp.S; ++s)
        for (int a = 0; a < mdp.A; ++a) flat[mdp.sa(s, a)] = psi(s, a);
      std::vector<ProbVector> probes;
      for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd probe(mdp.S * mdp.A);
        for (int s = 0; s < mdp.S; ++s) {
          const ProbVector row = random_interior(mdp.A, probe_rng);
          for (int a = 0; a < mdp.A; ++a) probe[mdp.sa(s, a)] = occ.d[s] * row[a];
        }
        probes.emplace_back(ProbVector::normalized(probe));
      }
      resid = influence_residual(J_joint, flat, joint, probes);
    }

    const Eigen::MatrixXd g_exact = rl_chain_rule_grad(psi, occ, probs);
    double grad_norm = g_exact.norm();
    if (std::holds_alternative<GlobalMinRule>(cfg.descent)) {
      policy = descent_global_min(psi, policy);
    } else {
      Eigen::MatrixXd g = g_exact;
      if (grule->kind == GradKind::score_function) {
        g.setZero();
        for (int t = 0; t < grule->samples; ++t) {
          const int s = static_cast<int>(sample_one(occ.d, descent_rng));
          const ProbVector row(probs.row(s).transpose());
          const int a = static_cast<int>(sample_one(row, descent_rng));
          g.row(s) += psi(s, a) * (Eigen::RowVectorXd::Unit(mdp.A, a) - probs.row(s));
        }
        g /= grule->samples;
        grad_norm = g.norm();
      }
      policy.logits -= grule->learning_rate * g;
    }

    const double j = j_rl(mdp, policy);
    if (!std::isfinite(j))
      throw NumericalError("pfd_run: J not finite after outer step " + std::to_string(k));
    emit({k, j, grad_norm, resid, record_tv(occupancy_measure(mdp, policy)),
          ms_since(t0)});
  }

  out.final_measure = occupancy_measure(mdp, policy);
  out.final_logits = policy.logits;
  out.summary = describe_policy(mdp, policy);
  return out;
}

}  // namespace

PfdResult pfd_run(const PfdConfig& cfg, const TraceCallback& on_record) {
  if (cfg.outer_steps < 0) throw ConfigError("pfd_run: outer_steps must be >= 0");
  if (cfg.saddle)
    throw ConfigError("pfd_run: saddle configs run via run_dual_actor_critic");
  if (std::holds_alternative<RlContext>(cfg.context)) return run_rl(cfg, on_record);
  return run_measure(cfg, on_record);
}

LogitParam descent_gradient_step(const LogitParam& theta, const InfluenceVector& psi_hat,
                                 double lr, GradKind kind, CounterRng& rng, int samples) {
  if (!(lr > 0.0)) throw DomainError("descent_gradient_step: lr must be > 0");
  const Eigen::VectorXd g = kind == GradKind::exact_chain_rule
                                ? chain_rule_grad(psi_hat, theta)
                                : score_function_grad(psi_hat, theta, rng, samples);
  return theta - lr * g;
}

Policy descent_global_min(const Eigen::MatrixXd& psi_hat_sa, const Policy& policy) {
  if (!psi_hat_sa.allFinite())
    throw DomainError("descent_global_min: non-finite influence estimate");
  if (psi_hat_sa.rows() != policy.logits.rows() ||
      psi_hat_sa.cols() != policy.logits.cols())
    throw DomainError("descent_global_min: shape mismatch");
  std::vector<int> acts(psi_hat_sa.rows());
  for (Eigen::Index s = 0; s < psi_hat_sa.rows(); ++s) {
    int best = 0;
    for (int a = 1; a < psi_hat_sa.cols(); ++a)
      if (psi_hat_sa(s, a) < psi_hat_sa(s, best)) best = a;
    acts[s] = best;
  }
  return Policy::deterministic(static_cast<int>(psi_hat_sa.rows()),
                               static_cast<int>(psi_hat_sa.cols()), acts);
}

}  // namespace pfd

#include "pfd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "pfd/divergences.hpp"
#include "pfd/engine.hpp"
#include "pfd/estimators.hpp"
#include "pfd/numerics.hpp"
#include "pfd/presets.hpp"
#include "pfd/runner.hpp"

namespace pfd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MetricSpace random_point_metric(Eigen::Index n, CounterRng& rng) {
  Eigen::VectorXd x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x[i] = rng.next_double();
    y[i] = rng.next_double();
  }
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      d(i, j) = std::hypot(x[i] - x[j], y[i] - y[j]);
  return MetricSpace(std::move(d));
}

LatentModel random_latent_model(Eigen::Index nz, CounterRng& rng) {
  const ProbVector pz = random_interior(nz, rng, 0.25);
  Eigen::VectorXd lik(nz);
  for (Eigen::Index z = 0; z < nz; ++z) lik[z] = 0.2 + 0.8 * rng.next_double();
  return LatentModel(pz, lik);
}

Eigen::VectorXd random_logits(Eigen::Index n, CounterRng& rng, double scale = 1.5) {
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) t[i] = scale * (2.0 * rng.next_double() - 1.0);
  return t;
}

Eigen::VectorXd fd_grad(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& theta, double h) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    g[k] = (f(tp) - f(tm)) / (2.0 * h);
  }
  return g;
}

CheckResult make_result(std::string name, double measured, double threshold,
                        std::string note = "") {
  return CheckResult{std::move(name), measured <= threshold, measured, threshold,
                     std::move(note)};
}

// ---------------------------------------------------------------- criterion 1

std::vector<CheckResult> suite_influence() {
  std::vector<CheckResult> out;

  {
    CounterRng rng(101);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Index n = 2 + k % 11;
      const ProbVector nu = random_interior(n, rng, 0.25);
      worst = std::max(worst, max_influence_residual(make_js(nu), n, 1, rng.fork(k)));
    }
    out.push_back(make_result("influence.js", worst, 1e-5, "100 instances, n<=12"));
  }
  {
    CounterRng rng(102);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Index n = 2 + k % 11;
      const ProbVector nu = random_interior(n, rng, 0.25);
      worst = std::max(worst, max_influence_residual(make_ns(nu), n, 1, rng.fork(k)));
    }
    out.push_back(make_result("influence.ns", worst, 1e-5, "100 instances, n<=12"));
  }
  {
    CounterRng rng(103);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Index nz = 2 + k % 9;
      const LatentModel model = random_latent_model(nz, rng);
      worst = std::max(worst, max_influence_residual(make_vi(model), nz, 1, rng.fork(k)));
    }
    out.push_back(make_result("influence.vi", worst, 1e-5, "100 instances, |Z|<=10"));
  }
  {
    CounterRng rng(104);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Index n = 3 + k % 10;
      const MetricSpace m = random_point_metric(n, rng);
      const ProbVector nu = random_interior(n, rng, 0.25);
      worst = std::max(worst, max_influence_residual(make_w1(nu, m), n, 1, rng.fork(k)));
    }
    out.push_back(make_result("influence.w1_potential", worst, 1e-4,
                              "100 instances, n<=12"));
  }
  {
    CounterRng rng(105);
    double worst = 0.0;
    const int shapes[][2] = {{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 3}, {2, 5}, {3, 4}};
    for (int k = 0; k < 100; ++k) {
      const auto& sh = shapes[k % 7];
      CounterRng inst = rng.fork(k);
      const TabularMdp mdp = random_mdp(sh[0], sh[1], 0.9, inst);
      worst = std::max(
          worst, max_influence_residual(make_rl_joint(mdp), sh[0] * sh[1], 1, inst));
    }
    out.push_back(make_result("influence.rl", worst, 1e-5, "100 instances, S*A<=12"));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 2

std::vector<CheckResult> suite_chain_rule() {
  std::vector<CheckResult> out;
  const double h = 1e-5;

  auto check_measure = [&](const std::string& name,
                           const std::function<FunctionalHandle(Eigen::Index, CounterRng&)>&
                               make_instance,
                           Eigen::Index max_n) {
    CounterRng rng(200 + static_cast<std::uint64_t>(name.size()));
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Eigen::Index n = 2 + k % (max_n - 1);
      CounterRng inst = rng.fork(k);
      const FunctionalHandle J = make_instance(n, inst);
      const Eigen::VectorXd theta = random_logits(n, inst);
      const Eigen::VectorXd exact = chain_rule_grad(J.influence(softmax(theta)), theta);
      const Eigen::VectorXd fd =
          fd_grad([&](const Eigen::VectorXd& t) { return J.value(softmax(t)); }, theta, h);
      worst = std::max(worst, (exact - fd).lpNorm<Eigen::Infinity>());
    }
    out.push_back(make_result("chain_rule." + name, worst, 1e-6, "50 pairs"));
  };

  check_measure("js",
                [](Eigen::Index n, CounterRng& rng) {
                  return make_js(random_interior(n, rng, 0.25));
                },
                8);
  check_measure("ns",
                [](Eigen::Index n, CounterRng& rng) {
                  return make_ns(random_interior(n, rng, 0.25));
                },
                8);
  check_measure("vi",
                [](Eigen::Index n, CounterRng& rng) {
                  return make_vi(random_latent_model(n, rng));
                },
                8);
  check_measure("w1",
                [](Eigen::Index n, CounterRng& rng) {
                  const MetricSpace m = random_point_metric(n, rng);
                  return make_w1(random_interior(n, rng, 0.25), m);
                },
                6);

  {
    // Policy-gradient-theorem form: per-state softmax against FD of j_rl.
    CounterRng rng(250);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      CounterRng inst = rng.fork(k);
      const TabularMdp mdp = random_mdp(4, 3, 0.9, inst);
      const Eigen::VectorXd theta_flat = random_logits(12, inst);
      auto policy_of = [&](const Eigen::VectorXd& t) {
        Eigen::MatrixXd logits(4, 3);
        for (int s = 0; s < 4; ++s)
          for (int a = 0; a < 3; ++a) logits(s, a) = t[s * 3 + a];
        return Policy{logits};
      };
      const Policy policy = policy_of(theta_flat);
      const Eigen::MatrixXd psi = rl_influence(mdp, policy);
      const Occupancy occ = discounted_occupancy(mdp, policy);
      const Eigen::MatrixXd probs = policy.probs();
      Eigen::VectorXd exact(12);
      for (int s = 0; s < 4; ++s) {
        const double mean = probs.row(s).dot(psi.row(s));
        for (int a = 0; a < 3; ++a)
          exact[s * 3 + a] = occ.d[s] * probs(s, a) * (psi(s, a) - mean);
      }
      const Eigen::VectorXd fd = fd_grad(
          [&](const Eigen::VectorXd& t) { return j_rl(mdp, policy_of(t)); }, theta_flat, h);
      worst = std::max(worst, (exact - fd).lpNorm<Eigen::Infinity>());
    }
    out.push_back(make_result("chain_rule.rl", worst, 1e-6, "50 random 4x3 MDPs"));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 3

std::vector<CheckResult> suite_duality() {
  std::vector<CheckResult> out;
  {
    CounterRng rng(301);
    double worst_value = 0.0, worst_phi = 0.0, worst_weak = -kInf;
    for (int k = 0; k < 30; ++k) {
      const Eigen::Index n = 2 + k % 11;
      CounterRng inst = rng.fork(k);
      const ProbVector mu = random_interior(n, inst, 0.25);
      const ProbVector nu = random_interior(n, inst, 0.25);
      EstimatorConfig cfg{EstimatorKind::dual_ascent, 4000, 2.0, 1, 1e-3};
      const DualAscentResult r = estimate_dual_ascent(js_dual_problem(nu), mu, cfg);
      const double j = js_value(mu, nu);
      worst_value = std::max(worst_value, std::abs(r.achieved - j));
      worst_weak = std::max(worst_weak, r.achieved - j);
      const InfluenceVector exact = center(js_influence(mu, nu), mu);
      worst_phi = std::max(worst_phi, (r.phi - exact).lpNorm<Eigen::Infinity>());
    }
    out.push_back(make_result("duality.js_value", worst_value, 1e-4, "30 instances"));
    out.push_back(make_result("duality.js_maximizer", worst_phi, 1e-3));
    out.push_back(make_result("duality.js_weak_slack", worst_weak, 1e-9,
                              "achieved minus J, must stay <= 1e-9"));
  }
  {
    CounterRng rng(302);
    double worst_value = 0.0, worst_phi = 0.0, worst_weak = -kInf;
    for (int k = 0; k < 20; ++k) {
      const Eigen::Index n = 3 + k % 4;
      CounterRng inst = rng.fork(k);
      const MetricSpace m = random_point_metric(n, inst);
      const ProbVector mu = random_interior(n, inst, 0.25);
      const ProbVector nu = random_interior(n, inst, 0.25);
      EstimatorConfig cfg{EstimatorKind::dual_ascent, 60000, 0.005, 1, 1e-3};
      const DualAscentResult r = estimate_dual_ascent(w1_dual_problem(nu, m), mu, cfg);
      const W1Solution w = w1_solve(mu, nu, m);
      worst_value = std::max(worst_value, std::abs(r.achieved - w.value));
      worst_weak = std::max(worst_weak, r.achieved - w.value);
      const InfluenceVector exact = center(w.potential, mu);
      worst_phi = std::max(worst_phi, (r.phi - exact).lpNorm<Eigen::Infinity>());
    }
    out.push_back(make_result("duality.w1_value", worst_value, 1e-4, "20 instances"));
    out.push_back(make_result("duality.w1_maximizer", worst_phi, 1e-3));
    out.push_back(make_result("duality.w1_weak_slack", worst_weak, 1e-9,
                              "achieved minus J, must stay <= 1e-9"));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 4

std::vector<CheckResult> suite_classifier() {
  CounterRng rng(401);
  double worst_d = 0.0, worst_ratio = 0.0;
  for (int k = 0; k < 30; ++k) {
    const Eigen::Index n = 2 + k % 11;
    CounterRng inst = rng.fork(k);
    const ProbVector mu = random_interior(n, inst, 0.25);
    const ProbVector nu = random_interior(n, inst, 0.25);
    EstimatorConfig cfg{EstimatorKind::classifier, 6000, 2.0, 1, 1e-3};
    const ClassifierResult r = estimate_classifier(mu, nu, cfg);
    const Eigen::VectorXd d_star =
        nu.vec().array() / (mu.vec().array() + nu.vec().array());
    worst_d = std::max(worst_d, (r.D - d_star).lpNorm<Eigen::Infinity>());
    const InfluenceVector exact = center(ns_influence(mu, nu), mu);
    worst_ratio = std::max(worst_ratio, (r.log_ratio - exact).lpNorm<Eigen::Infinity>());
  }
  return {make_result("classifier.optimal_discriminator", worst_d, 1e-4, "30 instances"),
          make_result("classifier.log_ratio_vs_ns_influence", worst_ratio, 1e-4)};
}

// ---------------------------------------------------------------- criterion 5

std::vector<CheckResult> suite_transport() {
  CounterRng rng(501);
  double worst_oracle = 0.0, worst_gap = 0.0, worst_lip = 0.0;
  int count = 0;
  for (Eigen::Index n = 2; n <= 4; ++n) {
    for (int k = 0; k < 15; ++k) {
      CounterRng inst = rng.fork(100 * n + k);
      const MetricSpace m = k % 3 == 0 ? MetricSpace::line(n)
                                       : random_point_metric(n, inst);
      ProbVector mu, nu;
      if (k % 5 == 4) {
        // boundary instances: point masses
        mu = ProbVector::delta(n, static_cast<Eigen::Index>(inst.next_u64() % n));
        nu = random_simplex(n, inst);
      } else {
        mu = random_simplex(n, inst);
        nu = random_simplex(n, inst);
      }
      const W1Solution w = w1_solve(mu, nu, m);
      worst_oracle = std::max(worst_oracle, std::abs(w.value - w1_bruteforce(mu, nu, m)));
      const double dual = cdot(w.potential, mu.vec()) - cdot(w.potential, nu.vec());
      worst_gap = std::max(worst_gap, std::abs(w.value - dual));
      worst_lip = std::max(worst_lip, lipschitz_constant(w.potential, m) - 1.0);
      ++count;
    }
  }
  return {make_result("transport.vertex_oracle", worst_oracle, 1e-10,
                      std::to_string(count) + " instances, n<=4"),
          make_result("transport.duality_gap", worst_gap, 1e-8),
          make_result("transport.potential_lipschitz_excess", worst_lip, 1e-9)};
}

// ---------------------------------------------------------------- criterion 6

std::vector<CheckResult> suite_gan_presets() {
  std::vector<CheckResult> out;
  const PresetName presets[] = {PresetName::minimax_gan, PresetName::nonsaturating_gan,
                                PresetName::wasserstein_gan};
  CounterRng rng(601);
  for (const PresetName preset : presets) {
    double worst = 0.0;
    for (int trial = 0; trial < 2; ++trial) {
      CounterRng inst = rng.fork(16 * static_cast<int>(preset) + trial);
      const ProbVector nu = random_interior(8, inst, 0.3);
      GanContext ctx;
      ctx.nu = nu;
      ctx.theta0 = Eigen::VectorXd::Zero(8);
      PfdConfig cfg = build_preset(preset, ctx);
      cfg.outer_steps = 5000;
      cfg.seed = 7 + trial;
      cfg.target = nu;
      const PfdResult r = pfd_run(cfg);
      worst = std::max(worst, tv_distance(r.final_measure, nu));
    }
    out.push_back(make_result("gan_presets." + to_string(preset) + "_tv", worst, 1e-3,
                              "n=8, 5000 outer steps"));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 7

std::vector<CheckResult> suite_vi_presets() {
  std::vector<CheckResult> out;
  CounterRng rng(701);
  double worst_bbvi = 0.0, worst_avb = 0.0;
  for (int k = 0; k < 4; ++k) {
    CounterRng inst = rng.fork(k);
    const Eigen::Index nz = 4 + 2 * k;
    const LatentModel model = random_latent_model(nz, inst);
    const ProbVector post = model.posterior();
    for (const PresetName preset : {PresetName::bbvi, PresetName::avb}) {
      ViContext ctx{model, Eigen::VectorXd::Zero(nz)};
      PfdConfig cfg = build_preset(preset, ctx);
      cfg.outer_steps = preset == PresetName::bbvi ? 6000 : 3000;
      cfg.seed = 13 + k;
      cfg.target = post;
      const PfdResult r = pfd_run(cfg);
      const double tv = tv_distance(r.final_measure, post);
      if (preset == PresetName::bbvi)
        worst_bbvi = std::max(worst_bbvi, tv);
      else
        worst_avb = std::max(worst_avb, tv);
    }
  }
  out.push_back(make_result("vi_presets.bbvi_tv_to_posterior", worst_bbvi, 1e-3,
                            "|Z| in 4..10"));
  out.push_back(make_result("vi_presets.avb_tv_to_posterior", worst_avb, 1e-3));

  {
    CounterRng rng2(702);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      CounterRng inst = rng2.fork(k);
      const Eigen::Index nz = 2 + k % 9;
      const LatentModel model = random_latent_model(nz, inst);
      const ProbVector q = random_interior(nz, inst, 0.2);
      // direct KL(q || posterior) summation against log p(x) - ELBO
      const ProbVector post = model.posterior();
      Eigen::VectorXd terms(nz);
      for (Eigen::Index z = 0; z < nz; ++z)
        terms[z] = xlogy(q[z], q[z] / post[z]);
      worst = std::max(worst, std::abs(vi_value(q, model) - csum(terms)));
    }
    out.push_back(make_result("vi_presets.elbo_identity", worst, 1e-12,
                              "two independent summations, 50 instances"));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 8

std::vector<CheckResult> suite_rl_exact() {
  std::vector<CheckResult> out;
  CounterRng rng(801);
  double worst_bellman = 0.0, worst_flow = 0.0;
  for (int k = 0; k < 30; ++k) {
    CounterRng inst = rng.fork(k);
    const int S = 2 + static_cast<int>(inst.next_u64() % 5);
    const int A = 2 + static_cast<int>(inst.next_u64() % 3);
    const TabularMdp mdp = random_mdp(S, A, k % 2 == 0 ? 0.9 : 0.95, inst);
    const Policy policy{Eigen::MatrixXd(random_logits(S * A, inst).reshaped(S, A))};
    const Eigen::MatrixXd probs = policy.probs();

    const PolicyEval pe = policy_eval(mdp, policy);
    Eigen::VectorXd bellman(S);
    for (int s = 0; s < S; ++s) {
      double acc = 0.0;
      for (int a = 0; a < A; ++a)
        acc += probs(s, a) * (mdp.R(s, a) + mdp.gamma * mdp.P.row(mdp.sa(s, a)).dot(pe.V));
      bellman[s] = pe.V[s] - acc;
    }
    worst_bellman = std::max(worst_bellman, bellman.lpNorm<Eigen::Infinity>());

    const Occupancy occ = discounted_occupancy(mdp, policy);
    Eigen::VectorXd flow = occ.d.vec() - (1.0 - mdp.gamma) * mdp.p0.vec();
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        flow -= mdp.gamma * occ.joint(s, a) * mdp.P.row(mdp.sa(s, a)).transpose();
    worst_flow = std::max(worst_flow, flow.lpNorm<Eigen::Infinity>());
  }
  out.push_back(make_result("rl_exact.bellman_residual", worst_bellman, 1e-10,
                            "30 random MDPs"));
  out.push_back(make_result("rl_exact.flow_residual", worst_flow, 1e-10));

  {
    // policy-gradient-theorem check on 4x3 MDPs
    CounterRng rng2(802);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      CounterRng inst = rng2.fork(k);
      const TabularMdp mdp = random_mdp(4, 3, 0.9, inst);
      const Eigen::VectorXd theta = random_logits(12, inst);
      auto policy_of = [&](const Eigen::VectorXd& t) {
        Eigen::MatrixXd logits(4, 3);
        for (int s = 0; s < 4; ++s)
          for (int a = 0; a < 3; ++a) logits(s, a) = t[s * 3 + a];
        return Policy{logits};
      };
      const Policy policy = policy_of(theta);
      const Eigen::MatrixXd psi = rl_influence(mdp, policy);
      const Occupancy occ = discounted_occupancy(mdp, policy);
      const Eigen::MatrixXd probs = policy.probs();
      Eigen::VectorXd exact(12);
      for (int s = 0; s < 4; ++s) {
        const double mean = probs.row(s).dot(psi.row(s));
        for (int a = 0; a < 3; ++a)
          exact[s * 3 + a] = occ.d[s] * probs(s, a) * (psi(s, a) - mean);
      }
      const Eigen::VectorXd fd = fd_grad(
          [&](const Eigen::VectorXd& t) { return j_rl(mdp, policy_of(t)); }, theta, 1e-5);
      worst = std::max(worst, (exact - fd).lpNorm<Eigen::Infinity>());
    }
    out.push_back(make_result("rl_exact.policy_gradient_theorem", worst, 1e-6,
                              "20 random 4x3 MDPs"));
  }
  return out;
}

// ---------------------------------------------------------------- criterion 9

std::vector<CheckResult> suite_policy_iteration() {
  CounterRng rng(901);
  double worst_match = 0.0, worst_monotone = -kInf;
  int worst_step_excess = std::numeric_limits<int>::min();
  for (int k = 0; k < 20; ++k) {
    CounterRng inst = rng.fork(k);
    const int S = 2 + static_cast<int>(inst.next_u64() % 5);
    const int A = 2 + static_cast<int>(inst.next_u64() % 3);
    const TabularMdp mdp = random_mdp(S, A, 0.9, inst);

    Policy policy = Policy::uniform(S, A);
    double prev_j = j_rl(mdp, policy);
    std::vector<int> actions(S, -1);
    int improvements = 0;
    bool converged = false;
    for (int it = 0; it <= S * A; ++it) {
      const PolicyEval pe = policy_eval(mdp, policy);
      const Policy improved = greedy_policy(pe.Q);
      const std::vector<int> acts = improved.greedy_actions();
      const double j = j_rl(mdp, improved);
      worst_monotone = std::max(worst_monotone, j - prev_j);
      prev_j = j;
      policy = improved;
      if (acts == actions) {
        converged = true;
        break;
      }
      actions = acts;
      ++improvements;
    }
    worst_step_excess = std::max(worst_step_excess, improvements - S * A);

    const std::vector<int> vi_acts = value_iteration_policy(mdp).greedy_actions();
    worst_match =
        std::max(worst_match, converged && actions == vi_acts ? 0.0 : 1.0);
  }
  return {make_result("policy_iteration.matches_value_iteration", worst_match, 0.0,
                      "exact action equality, 20 MDPs"),
          make_result("policy_iteration.j_rl_monotone", worst_monotone, 1e-12,
                      "max increase across improvement steps"),
          make_result("policy_iteration.improvement_steps_minus_bound",
                      static_cast<double>(worst_step_excess), 0.0,
                      "improvement steps never exceed S*A")};
}

// --------------------------------------------------------------- criterion 10

std::vector<CheckResult> suite_dual_actor_critic() {
  CounterRng rng(1001);
  double worst_gap = 0.0;
  for (int k = 0; k < 20; ++k) {
    CounterRng inst = rng.fork(k);
    const TabularMdp mdp = random_mdp(3, 2, 0.9, inst);

    Policy pi_opt = Policy::uniform(3, 2);
    for (int it = 0; it < 20; ++it) pi_opt = greedy_policy(policy_eval(mdp, pi_opt).Q);
    const double j_opt = j_rl(mdp, pi_opt);

    DacRunConfig cfg;
    cfg.outer_steps = 60000;
    const DacResult r = run_dual_actor_critic(mdp, cfg);
    worst_gap = std::max(worst_gap, std::abs(j_rl(mdp, r.policy) - j_opt));
  }

  CounterRng rng2(1002);
  double worst_spread = 0.0;
  for (int k = 0; k < 10; ++k) {
    CounterRng inst = rng2.fork(k);
    const TabularMdp mdp = random_mdp(3, 2, 0.9, inst);
    const Policy policy{Eigen::MatrixXd(random_logits(6, inst).reshaped(3, 2))};
    const ProbVector joint = occupancy_measure(mdp, policy);
    double lo = kInf, hi = -kInf;
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd V = 5.0 * random_logits(3, inst, 1.0);
      const double obj = dac_objective(mdp, joint, V);
      lo = std::min(lo, obj);
      hi = std::max(hi, obj);
    }
    worst_spread = std::max(worst_spread, hi - lo);
  }
  return {make_result("dual_actor_critic.j_rl_gap", worst_gap, 1e-2,
                      "20 random 3x2 MDPs vs policy iteration"),
          make_result("dual_actor_critic.v_invariance_spread", worst_spread, 1e-10,
                      "feasible occupancies, 10 random V each")};
}

// --------------------------------------------------------------- criterion 11

std::vector<CheckResult> suite_unbiasedness() {
  std::vector<CheckResult> out;
  {
    CounterRng rng(1101);
    double worst_se = 0.0;
    for (int k = 0; k < 10; ++k) {
      CounterRng inst = rng.fork(k);
      const Eigen::VectorXd theta = random_logits(5, inst);
      const Eigen::VectorXd psi = random_logits(5, inst, 1.0);
      CounterRng draw = inst.fork(99);
      const ScoreGradStats stats = score_function_grad_stats(psi, theta, draw, 100000);
      const Eigen::VectorXd exact = chain_rule_grad(psi, theta);
      for (Eigen::Index i = 0; i < 5; ++i) {
        const double se = std::max(stats.std_error[i], 1e-300);
        worst_se = std::max(worst_se, std::abs(stats.grad[i] - exact[i]) / se);
      }
    }
    out.push_back(make_result("unbiasedness.score_function_grad", worst_se, 3.0,
                              "deviation in standard errors, 1e5 samples"));
  }
  {
    CounterRng rng(1102);
    double worst_se = 0.0;
    for (int k = 0; k < 5; ++k) {
      CounterRng inst = rng.fork(k);
      const TabularMdp mdp = random_mdp(3, 2, 0.9, inst);
      const Policy policy = Policy::uniform(3, 2);
      EstimatorConfig cfg{EstimatorKind::mc_q, 1, 0.1, 10000, 1e-4};
      CounterRng draw = inst.fork(99);
      const McQStats stats = estimate_mc_q_stats(mdp, policy, draw, cfg);
      const PolicyEval pe = policy_eval(mdp, policy);
      for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) {
          const double slack =
              std::max(std::abs(stats.Q(s, a) - pe.Q(s, a)) - cfg.tolerance, 0.0);
          worst_se = std::max(worst_se, slack / std::max(stats.std_error(s, a), 1e-300));
        }
    }
    out.push_back(make_result("unbiasedness.mc_q", worst_se, 3.0,
                              "deviation beyond truncation, in standard errors"));
  }
  return out;
}

// --------------------------------------------------------------- criterion 12

std::vector<CheckResult> suite_determinism() {
  namespace fs = std::filesystem;
  const std::string config_text =
      "[problem]\n"
      "kind = vi\n"
      "n = 6\n"
      "seed = 11\n"
      "[algorithm]\n"
      "preset = bbvi\n"
      "[run]\n"
      "outer_steps = 40\n"
      "samples = 200\n"
      "seed = 3\n";

  const fs::path base = fs::temp_directory_path() / "pfd_verify_determinism";
  std::error_code ec;
  fs::remove_all(base, ec);
  fs::create_directories(base);
  const fs::path cfg_path = base / "run.ini";
  {
    std::ofstream cfg(cfg_path);
    cfg << config_text;
  }

  auto read_all = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };

  const int code_a = cmd_run(cfg_path.string(), (base / "a").string());
  const int code_b = cmd_run(cfg_path.string(), (base / "b").string());
  const std::string trace_a = read_all(base / "a" / "trace.csv");
  const std::string trace_b = read_all(base / "b" / "trace.csv");
  fs::remove_all(base, ec);

  const bool ok =
      code_a == 0 && code_b == 0 && !trace_a.empty() && trace_a == trace_b;
  return {CheckResult{"determinism.trace_bytes", ok, ok ? 0.0 : 1.0, 0.0,
                      "two cmd_run invocations, identical config+seed"}};
}

using SuiteFn = std::vector<CheckResult> (*)();

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"influence", suite_influence},
      {"chain_rule", suite_chain_rule},
      {"duality", suite_duality},
      {"classifier", suite_classifier},
      {"transport", suite_transport},
      {"gan_presets", suite_gan_presets},
      {"vi_presets", suite_vi_presets},
      {"rl_exact", suite_rl_exact},
      {"policy_iteration", suite_policy_iteration},
      {"dual_actor_critic", suite_dual_actor_critic},
      {"unbiasedness", suite_unbiasedness},
      {"determinism", suite_determinism},
  };
  return table;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : suite_table()) names.push_back(name);
  return names;
}

std::vector<CheckResult> run_verify_suite(const std::string& suite) {
  for (const auto& [name, fn] : suite_table())
    if (name == suite) return fn();
  throw ConfigError("unknown verification suite '" + suite + "'");
}

std::vector<CheckResult> run_all_suites() {
  std::vector<CheckResult> all;
  for (const auto& [name, fn] : suite_table()) {
    const auto results = fn();
    all.insert(all.end(), results.begin(), results.end());
  }
  return all;
}

double max_influence_residual(const FunctionalHandle& J, Eigen::Index n, int instances,
                              CounterRng rng, double eps) {
  double worst = 0.0;
  for (int k = 0; k < instances; ++k) {
    const ProbVector mu = random_interior(n, rng, 0.25);
    const ProbVector probe = random_interior(n, rng, 0.25);
    const InfluenceVector psi = J.influence(mu);
    worst = std::max(worst, influence_residual(J, psi, mu, {probe}, eps));
  }
  return worst;
}

double w1_bruteforce(const ProbVector& mu, const ProbVector& nu, const MetricSpace& m) {
  const int n = static_cast<int>(mu.size());
  const int cells = n * n;
  const int basis_size = 2 * n - 1;

  std::vector<int> pick(basis_size);
  for (int i = 0; i < basis_size; ++i) pick[i] = i;

  double best = kInf;
  auto try_basis = [&](const std::vector<int>& chosen) {
    // Leaf elimination over the bipartite graph; rejects non-trees and
    // negative-flow bases.
    std::vector<std::vector<int>> incident(2 * n);
    for (int c : chosen) {
      incident[c / n].push_back(c);
      incident[n + c % n].push_back(c);
    }
    std::vector<double> rem(2 * n);
    for (int i = 0; i < n; ++i) rem[i] = mu[i];
    for (int j = 0; j < n; ++j) rem[n + j] = nu[j];
    std::vector<bool> used(static_cast<std::size_t>(cells), false);
    std::vector<int> degree(2 * n);
    for (int v = 0; v < 2 * n; ++v) degree[v] = static_cast<int>(incident[v].size());
    std::vector<double> flow(static_cast<std::size_t>(cells), 0.0);

    int removed = 0;
    bool progress = true;
    while (removed < basis_size && progress) {
      progress = false;
      for (int v = 0; v < 2 * n; ++v) {
        if (degree[v] != 1) continue;
        int cell = -1;
        for (int c : incident[v])
          if (!used[c]) cell = c;
        if (cell < 0) continue;
        const double f = rem[v];
        if (f < -1e-12) return;  // infeasible basis
        flow[cell] = std::max(f, 0.0);
        used[cell] = true;
        const int i = cell / n, j = n + cell % n;
        rem[i] -= flow[cell];
        rem[j] -= flow[cell];
        --degree[i];
        --degree[j];
        ++removed;
        progress = true;
      }
    }
    if (removed != basis_size) return;  // not a spanning tree
    for (int v = 0; v < 2 * n; ++v)
      if (std::abs(rem[v]) > 1e-9) return;

    double cost = 0.0;
    for (int c : chosen) cost += flow[c] * m(c / n, c % n);
    best = std::min(best, cost);
  };

  // enumerate all C(cells, basis_size) subsets
  for (;;) {
    try_basis(pick);
    int k = basis_size - 1;
    while (k >= 0 && pick[k] == cells - basis_size + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int t = k + 1; t < basis_size; ++t) pick[t] = pick[t - 1] + 1;
  }
  if (best == kInf) throw NumericalError("w1_bruteforce: no feasible basis found");
  return best;
}

Policy value_iteration_policy(const TabularMdp& mdp, double tol) {
  Eigen::VectorXd V = Eigen::VectorXd::Zero(mdp.S);
  for (int it = 0; it < 1000000; ++it) {
    Eigen::VectorXd next(mdp.S);
    for (int s = 0; s < mdp.S; ++s) {
      double best = -kInf;
      for (int a = 0; a < mdp.A; ++a)
        best = std::max(best,
                        mdp.R(s, a) + mdp.gamma * mdp.P.row(mdp.sa(s, a)).dot(V));
      next[s] = best;
    }
    const double delta = (next - V).lpNorm<Eigen::Infinity>();
    V = next;
    if (delta <= tol) break;
  }
  Eigen::MatrixXd Q(mdp.S, mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a)
      Q(s, a) = mdp.R(s, a) + mdp.gamma * mdp.P.row(mdp.sa(s, a)).dot(V);
  return greedy_policy(Q);
}

}  // namespace pfd

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pfd/functional.hpp"
#include "pfd/mdp.hpp"
#include "pfd/space.hpp"
#include "pfd/transport.hpp"

namespace pfd {

enum class EstimatorKind { exact, dual_ascent, classifier, mc_q, lsq_v };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::exact;
  int inner_steps = 100;
  double learning_rate = 0.1;
  int samples = 1000;      // stochastic kinds
  double tolerance = 1e-3;  // rollout truncation target for mc_q
};

// psi - E_mu[psi]; zero mean under mu, idempotent.
InfluenceVector center(const InfluenceVector& psi, const ProbVector& mu);

// The exact influence of J at mu, centered. Requires J.has_influence().
InfluenceVector estimate_exact(const FunctionalHandle& J, const ProbVector& mu);

// A conjugate maximization phi -> <phi, mu> - J*(phi), written over an inner
// parameter w with phi = phi_of(w) so feasibility holds by construction.
// `project`, when present, is applied after every ascent step (Lipschitz
// reprojection for J_W).
struct DualProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> phi_of;
  std::function<double(const Eigen::VectorXd&, const ProbVector&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const ProbVector&)> gradient;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> project;  // optional
  Eigen::VectorXd w0;
};

struct DualAscentResult {
  InfluenceVector phi;  // centered under mu
  double achieved;      // best <phi,mu> - J*(phi) reached
  int steps;
};

// Full-batch gradient ascent with halving on objective regression; throws
// DivergenceError after 50 consecutive regressions. `state`, when non-null,
// warm-starts the inner parameter and receives the final one.
DualAscentResult estimate_dual_ascent(const DualProblem& problem, const ProbVector& mu,
                                      const EstimatorConfig& cfg,
                                      Eigen::VectorXd* state = nullptr);

// phi = (1/2) log(2 sigma(w)) keeps phi < (1/2) log 2 everywhere, so the JS
// conjugate stays finite for every w.
DualProblem js_dual_problem(const ProbVector& nu);

// phi = w with c-transform reprojection; objective <w, mu> - <w, nu>.
DualProblem w1_dual_problem(const ProbVector& nu, const MetricSpace& m);

struct ClassifierResult {
  Eigen::VectorXd D;          // in (0,1)^n by the logistic parameterization
  InfluenceVector log_ratio;  // log((1-D)/D), estimates log(mu/nu); centered under mu
  double loss;
};

// Minimizes -(1/2)E_nu[log D] - (1/2)E_mu[log(1-D)] over per-point logits.
// The optimum is D = nu/(mu+nu) and log_ratio recovers Psi_NS.
ClassifierResult estimate_classifier(const ProbVector& mu, const ProbVector& nu,
                                     const EstimatorConfig& cfg,
                                     Eigen::VectorXd* state = nullptr);

// Rollout horizon with truncation bias at most tol: gamma^T rmax/(1-gamma) <= tol.
int mc_horizon(double gamma, double rmax, double tol);

// Monte Carlo Q estimates from truncated rollouts started at every (s,a).
Eigen::MatrixXd estimate_mc_q(const TabularMdp& mdp, const Policy& policy,
                              CounterRng& rng, const EstimatorConfig& cfg);

struct McQStats {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd std_error;  // per-(s,a) standard error of the mean
};

McQStats estimate_mc_q_stats(const TabularMdp& mdp, const Policy& policy,
                             CounterRng& rng, const EstimatorConfig& cfg);

struct LsqVResult {
  Eigen::VectorXd V;  // NaN at zero-weight states
  std::vector<int> undefined_states;
};

// Weighted least-squares fit of V to the targets E_{pi(a|s)}[Qhat(s,a)]; at
// tabular capacity the fit interpolates wherever the weight is positive.
LsqVResult estimate_lsq_v(const TabularMdp& mdp, const Policy& policy,
                          const Eigen::MatrixXd& q_hat, const ProbVector& weights);

}  // namespace pfd

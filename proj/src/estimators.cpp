#include "pfd/estimators.hpp"

#include <cmath>
#include <limits>

#include "pfd/numerics.hpp"

namespace pfd {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxConsecutiveRegressions = 50;

struct AscentOutcome {
  Eigen::VectorXd best_w;
  double best_obj;
  int steps;
};

// Accept-all gradient ascent. A step whose objective is non-finite or
// strictly below the previous one halves the learning rate; 50 such steps in
// a row raise DivergenceError.
AscentOutcome ascend(const std::function<double(const Eigen::VectorXd&)>& objective,
                     const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
                     const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project,
                     Eigen::VectorXd w, double lr, int steps) {
  if (steps < 1) throw DomainError("inner optimizer: inner_steps must be >= 1");
  if (!(lr > 0.0)) throw DomainError("inner optimizer: learning rate must be > 0");

  if (project) w = project(w);
  double prev = objective(w);
  AscentOutcome out{w, prev, 0};
  int regressions = 0;
  for (int k = 0; k < steps; ++k) {
    w += lr * gradient(w);
    if (project) w = project(w);
    const double obj = objective(w);
    const bool regressed =
        !std::isfinite(obj) || obj < prev - 1e-12 * (1.0 + std::abs(prev));
    if (regressed) {
      lr *= 0.5;
      if (++regressions >= kMaxConsecutiveRegressions)
        throw DivergenceError(
            "inner optimizer diverged: objective regressed for " +
            std::to_string(regressions) + " consecutive steps (learning rate too high)");
    } else {
      regressions = 0;
    }
    if (std::isfinite(obj) && obj > out.best_obj) {
      out.best_obj = obj;
      out.best_w = w;
    }
    prev = obj;
    out.steps = k + 1;
  }
  return out;
}

}  // namespace

InfluenceVector center(const InfluenceVector& psi, const ProbVector& mu) {
  if (psi.size() != mu.size()) throw DomainError("center: size mismatch");
  return psi.array() - cdot(mu.vec(), psi);
}

InfluenceVector estimate_exact(const FunctionalHandle& J, const ProbVector& mu) {
  if (!J.has_influence())
    throw UnsupportedError("estimate_exact: " + J.name + " carries no exact influence");
  return center(J.influence(mu), mu);
}

DualAscentResult estimate_dual_ascent(const DualProblem& problem, const ProbVector& mu,
                                      const EstimatorConfig& cfg,
                                      Eigen::VectorXd* state) {
  Eigen::VectorXd w0 = (state && state->size() == problem.w0.size() && state->size() > 0)
                           ? *state
                           : problem.w0;
  const auto outcome = ascend(
      [&](const Eigen::VectorXd& w) { return problem.objective(w, mu); },
      [&](const Eigen::VectorXd& w) { return problem.gradient(w, mu); },
      problem.project, std::move(w0), cfg.learning_rate, cfg.inner_steps);
  if (state) *state = outcome.best_w;
  return DualAscentResult{center(problem.phi_of(outcome.best_w), mu), outcome.best_obj,
                          outcome.steps};
}

DualProblem js_dual_problem(const ProbVector& nu) {
  DualProblem p;
  p.w0 = Eigen::VectorXd::Zero(nu.size());
  p.phi_of = [](const Eigen::VectorXd& w) {
    Eigen::VectorXd phi(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
      phi[i] = 0.5 * (std::log(2.0) + log_logistic(w[i]));
    return phi;
  };
  // <phi(w), mu> - J*(phi(w)) with J*(phi) = -(1/2) E_nu[log(2 - e^{2 phi})]
  // and 2 - e^{2 phi(w)} = 2(1 - sigma(w)).
  p.objective = [nu](const Eigen::VectorXd& w, const ProbVector& mu) {
    Eigen::VectorXd terms(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
      terms[i] = 0.5 * (mu[i] * (std::log(2.0) + log_logistic(w[i])) +
                        nu[i] * (std::log(2.0) + log_logistic(-w[i])));
    return csum(terms);
  };
  p.gradient = [nu](const Eigen::VectorXd& w, const ProbVector& mu) {
    Eigen::VectorXd g(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double s = logistic(w[i]);
      g[i] = 0.5 * (mu[i] * (1.0 - s) - nu[i] * s);
    }
    return g;
  };
  return p;
}

DualProblem w1_dual_problem(const ProbVector& nu, const MetricSpace& m) {
  if (nu.size() != m.size()) throw DomainError("w1_dual_problem: dimension mismatch");
  DualProblem p;
  p.w0 = Eigen::VectorXd::Zero(nu.size());
  p.phi_of = [](const Eigen::VectorXd& w) { return w; };
  p.objective = [nu](const Eigen::VectorXd& w, const ProbVector& mu) {
    return cdot(w, mu.vec() - nu.vec());
  };
  p.gradient = [nu](const Eigen::VectorXd&, const ProbVector& mu) {
    return Eigen::VectorXd(mu.vec() - nu.vec());
  };
  p.project = [m](const Eigen::VectorXd& w) { return c_transform(w, m); };
  return p;
}

ClassifierResult estimate_classifier(const ProbVector& mu, const ProbVector& nu,
                                     const EstimatorConfig& cfg, Eigen::VectorXd* state) {
  if (mu.size() != nu.size()) throw DomainError("estimate_classifier: dimension mismatch");
  if (!mu.strictly_positive() || !nu.strictly_positive())
    throw BoundaryError("estimate_classifier: arguments must be strictly positive");

  auto loss = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd terms(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
      terms[i] = -0.5 * (nu[i] * log_logistic(w[i]) + mu[i] * log_logistic(-w[i]));
    return csum(terms);
  };
  auto grad = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd g(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const double s = logistic(w[i]);
      g[i] = 0.5 * (mu[i] * s - nu[i] * (1.0 - s));
    }
    return g;
  };

  Eigen::VectorXd w0 = (state && state->size() == mu.size() && state->size() > 0)
                           ? *state
                           : Eigen::VectorXd::Zero(mu.size());
  const auto outcome = ascend(
      [&](const Eigen::VectorXd& w) { return -loss(w); },
      [&](const Eigen::VectorXd& w) { return Eigen::VectorXd(-grad(w)); }, nullptr,
      std::move(w0), cfg.learning_rate, cfg.inner_steps);
  if (state) *state = outcome.best_w;

  ClassifierResult out;
  out.D = outcome.best_w.unaryExpr([](double w) { return logistic(w); });
  out.log_ratio = center(-outcome.best_w, mu);  // log((1-D)/D) = -w
  out.loss = -outcome.best_obj;
  return out;
}

int mc_horizon(double gamma, double rmax, double tol) {
  if (!(tol > 0.0)) throw DomainError("mc_horizon: tolerance must be > 0");
  if (gamma <= 0.0 || rmax == 0.0) return 1;
  const double ratio = tol * (1.0 - gamma) / rmax;
  if (ratio >= 1.0) return 1;
  const int T = static_cast<int>(std::ceil(std::log(ratio) / std::log(gamma)));
  return std::max(T, 1);
}

McQStats estimate_mc_q_stats(const TabularMdp& mdp, const Policy& policy,
                             CounterRng& rng, const EstimatorConfig& cfg) {
  if (cfg.samples < 1) throw DomainError("estimate_mc_q: samples must be >= 1");
  const Eigen::MatrixXd probs = policy.probs();
  std::vector<ProbVector> transition_rows;
  transition_rows.reserve(static_cast<std::size_t>(mdp.S) * mdp.A);
  for (int row = 0; row < mdp.S * mdp.A; ++row)
    transition_rows.emplace_back(mdp.P.row(row).transpose());
  std::vector<ProbVector> policy_rows;
  policy_rows.reserve(mdp.S);
  for (int s = 0; s < mdp.S; ++s)
    policy_rows.emplace_back(probs.row(s).transpose());

  const double rmax = mdp.R.cwiseAbs().maxCoeff();
  const int T = mc_horizon(mdp.gamma, rmax, cfg.tolerance);

  McQStats out;
  out.Q.resize(mdp.S, mdp.A);
  out.std_error.resize(mdp.S, mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a) {
      double sum = 0.0, sumsq = 0.0;
      for (int k = 0; k < cfg.samples; ++k) {
        double ret = 0.0, disc = 1.0;
        int cs = s, ca = a;
        for (int t = 0; t < T; ++t) {
          ret += disc * mdp.R(cs, ca);
          if (t + 1 == T) break;
          cs = static_cast<int>(sample_one(transition_rows[mdp.sa(cs, ca)], rng));
          ca = static_cast<int>(sample_one(policy_rows[cs], rng));
          disc *= mdp.gamma;
        }
        sum += ret;
        sumsq += ret * ret;
      }
      out.Q(s, a) = sum / cfg.samples;
      const double var = cfg.samples > 1
                             ? std::max(0.0, (sumsq - sum * sum / cfg.samples) /
                                                 (cfg.samples - 1.0))
                             : 0.0;
      out.std_error(s, a) = std::sqrt(var / cfg.samples);
    }
  return out;
}

Eigen::MatrixXd estimate_mc_q(const TabularMdp& mdp, const Policy& policy,
                              CounterRng& rng, const EstimatorConfig& cfg) {
  return estimate_mc_q_stats(mdp, policy, rng, cfg).Q;
}

LsqVResult estimate_lsq_v(const TabularMdp& mdp, const Policy& policy,
                          const Eigen::MatrixXd& q_hat, const ProbVector& weights) {
  if (q_hat.rows() != mdp.S || q_hat.cols() != mdp.A)
    throw DomainError("estimate_lsq_v: q_hat shape");
  if (weights.size() != mdp.S) throw DomainError("estimate_lsq_v: weights size != S");
  const Eigen::MatrixXd probs = policy.probs();
  LsqVResult out;
  out.V.resize(mdp.S);
  for (int s = 0; s < mdp.S; ++s) {
    if (weights[s] > 0.0) {
      // Tabular capacity: the weighted fit interpolates the target exactly.
      out.V[s] = probs.row(s).dot(q_hat.row(s));
    } else {
      out.V[s] = kNaN;
      out.undefined_states.push_back(s);
    }
  }
  return out;
}

}  // namespace pfd

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "pfd/space.hpp"

namespace pfd {

// A probability functional J : P(X) -> R-bar, with an optional closed-form
// influence function. Handles close over their context (target measure,
// latent model, MDP) by value and are safe to evaluate concurrently.
struct FunctionalHandle {
  std::string name;
  std::function<double(const ProbVector&)> value;
  std::function<InfluenceVector(const ProbVector&)> influence;  // empty if none

  bool has_influence() const { return static_cast<bool>(influence); }
};

// Default step for the finite-difference derivative oracle.
inline constexpr double kFdStep = 1e-5;

// Directional derivative of J at mu toward nu (direction chi = nu - mu).
// Central difference on the interior; falls back to the one-sided quotient
// when mu - eps*chi leaves the simplex. eps must lie in (0, 1].
double gateaux_fd(const FunctionalHandle& J, const ProbVector& mu,
                  const ProbVector& nu, double eps = kFdStep);

// Probe set for residual checks: `dirichlet_count` uniform-simplex draws plus
// the n vertex-pulled mixtures 0.9*mu + 0.1*delta_i, which expose
// log-singular directions.
std::vector<ProbVector> residual_probes(const ProbVector& mu, int dirichlet_count,
                                        CounterRng& rng);

// max over probes nu of |gateaux_fd(J, mu, nu) - <psi, nu - mu>|.
// Insensitive to additive constants in psi, since probe directions sum to 0.
double influence_residual(const FunctionalHandle& J, const InfluenceVector& psi,
                          const ProbVector& mu, const std::vector<ProbVector>& probes,
                          double eps = kFdStep);

// The von Mises linearization nu -> J(mu0) + <Psi_mu0, nu - mu0>.
struct AffineFunctional {
  double j0;
  InfluenceVector psi;
  Eigen::VectorXd mu0;

  double operator()(const ProbVector& nu) const;
};

AffineFunctional linearize(const FunctionalHandle& J, const ProbVector& mu0);

// Exact gradient of theta -> E_{softmax(theta)}[psi_hat]; component k equals
// p_k * (psi_k - E_p[psi]). Orthogonal to the all-ones direction.
Eigen::VectorXd chain_rule_grad(const InfluenceVector& psi_hat, const LogitParam& theta);

// Monte Carlo estimate of the same gradient via the log-derivative trick:
// average of psi_hat(x) * grad_theta log mu_theta(x) over x ~ mu_theta.
Eigen::VectorXd score_function_grad(const InfluenceVector& psi_hat, const LogitParam& theta,
                                    CounterRng& rng, int samples);

struct ScoreGradStats {
  Eigen::VectorXd grad;
  Eigen::VectorXd std_error;  // per-coordinate standard error of the mean
};

ScoreGradStats score_function_grad_stats(const InfluenceVector& psi_hat,
                                         const LogitParam& theta, CounterRng& rng,
                                         int samples);

}  // namespace pfd

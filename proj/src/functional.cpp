#include "pfd/functional.hpp"

#include <cmath>

#include "pfd/numerics.hpp"

namespace pfd {

double gateaux_fd(const FunctionalHandle& J, const ProbVector& mu,
                  const ProbVector& nu, double eps) {
  if (mu.size() != nu.size()) throw DomainError("gateaux_fd: dimension mismatch");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("gateaux_fd: eps must lie in (0,1]");

  const Eigen::VectorXd chi = nu.vec() - mu.vec();
  const ProbVector plus(mu.vec() + eps * chi);
  const double jp = J.value(plus);
  if (!std::isfinite(jp))
    throw NumericalError("gateaux_fd: J not finite at mu + eps*chi (" + J.name + ")");

  const Eigen::VectorXd minus = mu.vec() - eps * chi;
  if (minus.minCoeff() >= 0.0) {
    const double jm = J.value(ProbVector(minus));
    if (!std::isfinite(jm))
      throw NumericalError("gateaux_fd: J not finite at mu - eps*chi (" + J.name + ")");
    return (jp - jm) / (2.0 * eps);
  }

  // mu - eps*chi left the simplex: one-sided quotient.
  const double j0 = J.value(mu);
  if (!std::isfinite(j0))
    throw NumericalError("gateaux_fd: J not finite at mu (" + J.name + ")");
  return (jp - j0) / eps;
}

std::vector<ProbVector> residual_probes(const ProbVector& mu, int dirichlet_count,
                                        CounterRng& rng) {
  std::vector<ProbVector> probes;
  probes.reserve(static_cast<std::size_t>(dirichlet_count) + mu.size());
  for (int k = 0; k < dirichlet_count; ++k)
    probes.push_back(random_simplex(mu.size(), rng));
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    probes.push_back(mix(mu, ProbVector::delta(mu.size(), i), 0.1));
  return probes;
}

double influence_residual(const FunctionalHandle& J, const InfluenceVector& psi,
                          const ProbVector& mu, const std::vector<ProbVector>& probes,
                          double eps) {
  if (probes.empty()) throw DomainError("influence_residual: no probes");
  if (psi.size() != mu.size()) throw DomainError("influence_residual: psi size mismatch");
  double worst = 0.0;
  for (const ProbVector& nu : probes) {
    const double fd = gateaux_fd(J, mu, nu, eps);
    const double lin = cdot(psi, nu.vec() - mu.vec());
    worst = std::max(worst, std::abs(fd - lin));
  }
  return worst;
}

double AffineFunctional::operator()(const ProbVector& nu) const {
  return j0 + cdot(psi, nu.vec() - mu0);
}

AffineFunctional linearize(const FunctionalHandle& J, const ProbVector& mu0) {
  if (!J.has_influence())
    throw UnsupportedError("linearize: " + J.name + " has no exact influence");
  return AffineFunctional{J.value(mu0), J.influence(mu0), mu0.vec()};
}

Eigen::VectorXd chain_rule_grad(const InfluenceVector& psi_hat, const LogitParam& theta) {
  if (psi_hat.size() != theta.size()) throw DomainError("chain_rule_grad: size mismatch");
  const ProbVector p = softmax(theta);
  const double mean = cdot(p.vec(), psi_hat);
  return p.vec().array() * (psi_hat.array() - mean);
}

Eigen::VectorXd score_function_grad(const InfluenceVector& psi_hat, const LogitParam& theta,
                                    CounterRng& rng, int samples) {
  return score_function_grad_stats(psi_hat, theta, rng, samples).grad;
}

ScoreGradStats score_function_grad_stats(const InfluenceVector& psi_hat,
                                         const LogitParam& theta, CounterRng& rng,
                                         int samples) {
  if (psi_hat.size() != theta.size())
    throw DomainError("score_function_grad: size mismatch");
  if (samples < 1) throw DomainError("score_function_grad: samples must be >= 1");

  const ProbVector p = softmax(theta);
  const Eigen::Index n = theta.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < samples; ++k) {
    const Eigen::Index x = sample_one(p, rng);
    // grad_theta log p(x) = e_x - p
    Eigen::VectorXd g = -psi_hat[x] * p.vec();
    g[x] += psi_hat[x];
    sum += g;
    sumsq += g.cwiseProduct(g);
  }
  ScoreGradStats out;
  out.grad = sum / samples;
  if (samples > 1) {
    const Eigen::VectorXd var =
        (sumsq - sum.cwiseProduct(sum) / samples) / (samples - 1.0);
    out.std_error = (var.cwiseMax(0.0) / samples).cwiseSqrt();
  } else {
    out.std_error = Eigen::VectorXd::Zero(n);
  }
  return out;
}

}  // namespace pfd

#pragma once

#include <Eigen/Dense>

#include "pfd/functional.hpp"
#include "pfd/space.hpp"

namespace pfd {

// Jensen-Shannon divergence (1/2)KL(mu||m) + (1/2)KL(nu||m), m = (mu+nu)/2.
// Natural log; finite for all pairs since m dominates both arguments.
double js_value(const ProbVector& mu, const ProbVector& nu);

// Psi_JS(x) = (1/2) log(mu_x / (mu_x + nu_x)). Requires mu strictly positive.
InfluenceVector js_influence(const ProbVector& mu, const ProbVector& nu);

// Convex conjugate of J_JS in the self-consistent closed form
//   J*_JS(phi) = -(1/2) E_nu[ log(2 - e^{2 phi}) ],
// finite iff phi < (1/2) log 2 nu-a.s.; +infinity otherwise.
double js_conjugate(const Eigen::VectorXd& phi, const ProbVector& nu);

// Feasibility bound for js_conjugate.
inline constexpr double kJsConjugateBound = 0.34657359027997264;  // (1/2) log 2

// Reverse KL: sum mu_i log(mu_i/nu_i), with 0 log 0 = 0; +infinity when mu
// charges a nu-null point.
double ns_value(const ProbVector& mu, const ProbVector& nu);

// Psi_NS(x) = log(mu_x / nu_x). Requires both arguments strictly positive.
InfluenceVector ns_influence(const ProbVector& mu, const ProbVector& nu);

// A finite latent-variable model for one fixed observation x: prior p(z) and
// likelihood values p(x|z). The posterior is p(x|z)p(z)/p(x).
class LatentModel {
 public:
  LatentModel(ProbVector prior, Eigen::VectorXd likelihood);

  Eigen::Index latent_size() const { return prior_.size(); }
  const ProbVector& prior() const { return prior_; }
  const Eigen::VectorXd& likelihood() const { return lik_; }
  // joint_z = p(x|z) p(z)
  const Eigen::VectorXd& joint() const { return joint_; }
  double evidence() const { return evidence_; }
  double log_evidence() const;
  ProbVector posterior() const;

 private:
  ProbVector prior_;
  Eigen::VectorXd lik_;
  Eigen::VectorXd joint_;
  double evidence_;
};

// E_q[log(joint_z / q_z)]; -infinity when q charges a joint-null point.
double elbo(const ProbVector& q, const LatentModel& model);

// KL(q || posterior) = log p(x) - ELBO(q); +infinity admissible.
double vi_value(const ProbVector& q, const LatentModel& model);

// Psi_VI(z) = log q_z - log(p(x|z) p(z)). Requires q and the joint strictly
// positive.
InfluenceVector vi_influence(const ProbVector& q, const LatentModel& model);

FunctionalHandle make_js(const ProbVector& nu);
FunctionalHandle make_ns(const ProbVector& nu);
FunctionalHandle make_vi(const LatentModel& model);

}  // namespace pfd

#include "pfd/divergences.hpp"

#include <cmath>
#include <limits>

#include "pfd/numerics.hpp"

namespace pfd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_size(Eigen::Index a, Eigen::Index b, const char* who) {
  if (a != b) throw DomainError(std::string(who) + ": dimension mismatch");
}

}  // namespace

double js_value(const ProbVector& mu, const ProbVector& nu) {
  require_same_size(mu.size(), nu.size(), "js_value");
  const Eigen::Index n = mu.size();
  Eigen::VectorXd terms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = 0.5 * (mu[i] + nu[i]);
    terms[i] = m == 0.0 ? 0.0
                        : 0.5 * (xlogy(mu[i], mu[i] / m) + xlogy(nu[i], nu[i] / m));
  }
  return csum(terms);
}

InfluenceVector js_influence(const ProbVector& mu, const ProbVector& nu) {
  require_same_size(mu.size(), nu.size(), "js_influence");
  if (!mu.strictly_positive())
    throw BoundaryError("js_influence: mu has zero mass (influence log-singular)");
  InfluenceVector psi(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    psi[i] = 0.5 * std::log(mu[i] / (mu[i] + nu[i]));
  return psi;
}

double js_conjugate(const Eigen::VectorXd& phi, const ProbVector& nu) {
  require_same_size(phi.size(), nu.size(), "js_conjugate");
  Eigen::VectorXd terms(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    if (nu[i] == 0.0) {
      terms[i] = 0.0;
      continue;
    }
    const double arg = 2.0 - std::exp(2.0 * phi[i]);
    if (!(arg > 0.0)) return kInf;  // phi >= (1/2) log 2 on nu's support
    terms[i] = -0.5 * nu[i] * std::log(arg);
  }
  return csum(terms);
}

double ns_value(const ProbVector& mu, const ProbVector& nu) {
  require_same_size(mu.size(), nu.size(), "ns_value");
  Eigen::VectorXd terms(mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) {
      terms[i] = 0.0;
    } else if (nu[i] == 0.0) {
      return kInf;  // absolute continuity fails
    } else {
      terms[i] = mu[i] * std::log(mu[i] / nu[i]);
    }
  }
  return csum(terms);
}

InfluenceVector ns_influence(const ProbVector& mu, const ProbVector& nu) {
  require_same_size(mu.size(), nu.size(), "ns_influence");
  if (!mu.strictly_positive() || !nu.strictly_positive())
    throw BoundaryError("ns_influence: zero mass in mu or nu");
  return (mu.vec().array() / nu.vec().array()).log();
}

LatentModel::LatentModel(ProbVector prior, Eigen::VectorXd likelihood)
    : prior_(std::move(prior)), lik_(std::move(likelihood)) {
  if (lik_.size() != prior_.size())
    throw DomainError("LatentModel: likelihood size does not match prior");
  if (lik_.minCoeff() < 0.0) throw DomainError("LatentModel: negative likelihood");
  joint_ = lik_.cwiseProduct(prior_.vec());
  evidence_ = csum(joint_);
  if (!(evidence_ > 0.0)) throw DomainError("LatentModel: zero evidence");
}

double LatentModel::log_evidence() const { return std::log(evidence_); }

ProbVector LatentModel::posterior() const { return ProbVector::normalized(joint_); }

double elbo(const ProbVector& q, const LatentModel& model) {
  require_same_size(q.size(), model.latent_size(), "elbo");
  Eigen::VectorXd terms(q.size());
  for (Eigen::Index z = 0; z < q.size(); ++z) {
    if (q[z] == 0.0) {
      terms[z] = 0.0;
    } else if (model.joint()[z] == 0.0) {
      return -kInf;
    } else {
      terms[z] = q[z] * (std::log(model.joint()[z]) - std::log(q[z]));
    }
  }
  return csum(terms);
}

double vi_value(const ProbVector& q, const LatentModel& model) {
  const double lower = elbo(q, model);
  if (lower == -kInf) return kInf;
  return model.log_evidence() - lower;
}

InfluenceVector vi_influence(const ProbVector& q, const LatentModel& model) {
  require_same_size(q.size(), model.latent_size(), "vi_influence");
  if (!q.strictly_positive())
    throw BoundaryError("vi_influence: q has zero mass");
  if (model.joint().minCoeff() <= 0.0)
    throw BoundaryError("vi_influence: model joint has zero mass");
  return q.vec().array().log() - model.joint().array().log();
}

FunctionalHandle make_js(const ProbVector& nu) {
  return FunctionalHandle{
      "J_JS",
      [nu](const ProbVector& mu) { return js_value(mu, nu); },
      [nu](const ProbVector& mu) { return js_influence(mu, nu); }};
}

FunctionalHandle make_ns(const ProbVector& nu) {
  return FunctionalHandle{
      "J_NS",
      [nu](const ProbVector& mu) { return ns_value(mu, nu); },
      [nu](const ProbVector& mu) { return ns_influence(mu, nu); }};
}

FunctionalHandle make_vi(const LatentModel& model) {
  return FunctionalHandle{
      "J_VI",
      [model](const ProbVector& q) { return vi_value(q, model); },
      [model](const ProbVector& q) { return vi_influence(q, model); }};
}

}  // namespace pfd

#include "pfd/space.hpp"

#include <cmath>
#include <limits>

#include "pfd/numerics.hpp"

namespace pfd {

FiniteSpace::FiniteSpace(Eigen::Index count, std::vector<std::string> names)
    : n(count), labels(std::move(names)) {
  if (n < 1) throw DomainError("FiniteSpace: point count must be >= 1");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n)
    throw DomainError("FiniteSpace: label count does not match point count");
}

ProbVector::ProbVector(Eigen::VectorXd p) : p_(std::move(p)) {
  if (p_.size() < 1) throw DomainError("ProbVector: empty");
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= -1e-12))
      throw DomainError("ProbVector: negative mass at index " + std::to_string(i));
    if (p_[i] < 0.0) p_[i] = 0.0;  // scrub roundoff-negative entries
  }
  const double s = csum(p_);
  if (std::abs(s - 1.0) > 1e-12)
    throw DomainError("ProbVector: masses sum to " + std::to_string(s) + ", not 1");
}

ProbVector ProbVector::uniform(Eigen::Index n) {
  return ProbVector(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::delta(Eigen::Index n, Eigen::Index point) {
  if (point < 0 || point >= n) throw DomainError("ProbVector::delta: point out of range");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p[point] = 1.0;
  return ProbVector(std::move(p));
}

ProbVector ProbVector::normalized(const Eigen::VectorXd& weights) {
  if (weights.size() < 1) throw DomainError("ProbVector::normalized: empty");
  if (weights.minCoeff() < 0.0)
    throw DomainError("ProbVector::normalized: negative weight");
  const double s = csum(weights);
  if (!(s > 0.0)) throw DomainError("ProbVector::normalized: zero total weight");
  return ProbVector(weights / s);
}

ProbVector softmax(const LogitParam& theta) {
  if (theta.size() < 1) throw DomainError("softmax: empty logits");
  const double m = theta.maxCoeff();
  if (!std::isfinite(m))
    throw DomainError("softmax: logits have no finite maximum");
  Eigen::VectorXd e = (theta.array() - m).exp();
  return ProbVector(e / csum(e));
}

ProbVector mix(const ProbVector& mu, const ProbVector& nu, double eps) {
  if (mu.size() != nu.size()) throw DomainError("mix: dimension mismatch");
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("mix: eps outside [0,1]");
  return ProbVector((1.0 - eps) * mu.vec() + eps * nu.vec());
}

double tv_distance(const ProbVector& mu, const ProbVector& nu) {
  if (mu.size() != nu.size()) throw DomainError("tv_distance: dimension mismatch");
  return 0.5 * csum((mu.vec() - nu.vec()).cwiseAbs());
}

Eigen::Index sample_one(const ProbVector& mu, CounterRng& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    acc += mu[i];
    if (u < acc) return i;
  }
  return mu.size() - 1;  // u landed in the roundoff tail
}

std::vector<Eigen::Index> sample(const ProbVector& mu, CounterRng& rng, int count) {
  if (count < 0) throw DomainError("sample: negative count");
  std::vector<Eigen::Index> draws(static_cast<std::size_t>(count));
  for (auto& d : draws) d = sample_one(mu, rng);
  return draws;
}

ProbVector random_simplex(Eigen::Index n, CounterRng& rng) {
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i)
    g[i] = -std::log1p(-rng.next_double());  // Exp(1)
  return ProbVector::normalized(g);
}

ProbVector random_interior(Eigen::Index n, CounterRng& rng, double floor) {
  const ProbVector d = random_simplex(n, rng);
  Eigen::VectorXd p = (1.0 - floor) * d.vec() +
                      Eigen::VectorXd::Constant(n, floor / static_cast<double>(n));
  return ProbVector(std::move(p));
}

bool is_admissible_direction(const SignedVector& c, double tol) {
  return std::abs(csum(c)) <= tol;
}

}  // namespace pfd

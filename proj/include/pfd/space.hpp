#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pfd/errors.hpp"
#include "pfd/rng.hpp"

namespace pfd {

// Finite sample space: points are the indices 0..n-1. Labels are cosmetic.
struct FiniteSpace {
  Eigen::Index n = 1;
  std::vector<std::string> labels;  // empty, or one per point

  explicit FiniteSpace(Eigen::Index count, std::vector<std::string> names = {});
};

// Unconstrained parameters; softmax(theta) is the represented measure.
using LogitParam = Eigen::VectorXd;

// A function X -> R stored pointwise; defined modulo an additive constant.
using InfluenceVector = Eigen::VectorXd;

// Coordinates of a signed measure. Admissible directions chi = nu - mu sum to zero.
using SignedVector = Eigen::VectorXd;

// Probability mass vector: nonnegative entries summing to 1 within 1e-12.
// Immutable after construction.
class ProbVector {
 public:
  ProbVector() : p_(Eigen::VectorXd::Ones(1)) {}
  explicit ProbVector(Eigen::VectorXd p);

  static ProbVector uniform(Eigen::Index n);
  static ProbVector delta(Eigen::Index n, Eigen::Index point);
  // Normalizes a nonnegative, not-all-zero weight vector.
  static ProbVector normalized(const Eigen::VectorXd& weights);

  Eigen::Index size() const { return p_.size(); }
  double operator[](Eigen::Index i) const { return p_[i]; }
  const Eigen::VectorXd& vec() const { return p_; }
  bool strictly_positive() const { return p_.minCoeff() > 0.0; }

 private:
  Eigen::VectorXd p_;
};

// Strictly positive for finite logits; invariant under adding a constant.
// Rows containing -inf yield exact zeros (used for deterministic policies).
ProbVector softmax(const LogitParam& theta);

// (1-eps)*mu + eps*nu, the segment point mu + eps*(nu - mu).
ProbVector mix(const ProbVector& mu, const ProbVector& nu, double eps);

// Total variation distance (1/2)*sum |mu_i - nu_i|, in [0, 1].
double tv_distance(const ProbVector& mu, const ProbVector& nu);

// i.i.d. draws; deterministic in the rng state.
std::vector<Eigen::Index> sample(const ProbVector& mu, CounterRng& rng, int count);
Eigen::Index sample_one(const ProbVector& mu, CounterRng& rng);

// Dirichlet(1,...,1), i.e. uniform on the simplex.
ProbVector random_simplex(Eigen::Index n, CounterRng& rng);

// Dirichlet draw mixed with the uniform measure; every mass >= floor/n.
// Keeps finite-difference probes away from log-singular boundaries.
ProbVector random_interior(Eigen::Index n, CounterRng& rng, double floor = 0.2);

bool is_admissible_direction(const SignedVector& c, double tol = 1e-12);

}  // namespace pfd

#pragma once

#include <Eigen/Dense>

#include "pfd/functional.hpp"
#include "pfd/space.hpp"

namespace pfd {

// Finite metric space: symmetric nonnegative distance table with zero
// diagonal satisfying the triangle inequality.
class MetricSpace {
 public:
  explicit MetricSpace(Eigen::MatrixXd d);

  static MetricSpace line(Eigen::Index n, double spacing = 1.0);

  Eigen::Index size() const { return d_.rows(); }
  const Eigen::MatrixXd& dist() const { return d_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return d_(i, j); }

 private:
  Eigen::MatrixXd d_;
};

struct W1Solution {
  double value;               // sum pi_ij d_ij at the optimum
  Eigen::MatrixXd plan;       // optimal coupling; rows sum to mu, cols to nu
  Eigen::VectorXd potential;  // Kantorovich potential, 1-Lipschitz, phi_0 = 0
};

// Exact W1 via the transportation simplex (Bland pivoting); the potential is
// read off the optimal dual and satisfies <phi,mu> - <phi,nu> = value.
W1Solution w1_solve(const ProbVector& mu, const ProbVector& nu, const MetricSpace& m);

// x -> min_y [phi(y) + d(x,y)]. Output is 1-Lipschitz; fixes every
// 1-Lipschitz input.
Eigen::VectorXd c_transform(const Eigen::VectorXd& phi, const MetricSpace& m);

// max over i != j of |phi_i - phi_j| / d_ij; pairs at distance zero require
// equal values, else +infinity.
double lipschitz_constant(const Eigen::VectorXd& phi, const MetricSpace& m);

// J_W(mu) = W1(mu, nu), with the Kantorovich potential as influence.
FunctionalHandle make_w1(const ProbVector& nu, const MetricSpace& m);

}  // namespace pfd

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "pfd/functional.hpp"
#include "pfd/space.hpp"

namespace pfd {

// Finite MDP with expected rewards: reward randomness enters every formula
// only through R(s,a) = E[r | s,a], so only the mean is stored.
struct TabularMdp {
  int S = 1;
  int A = 1;
  ProbVector p0;      // initial state distribution
  Eigen::MatrixXd P;  // (S*A) x S, row s*A+a is p(.|s,a)
  Eigen::MatrixXd R;  // S x A expected rewards
  double gamma = 0.9;

  static TabularMdp make(int S, int A, ProbVector p0, Eigen::MatrixXd P,
                         Eigen::MatrixXd R, double gamma);

  int sa(int s, int a) const { return s * A + a; }
};

// Conditional policy pi(a|s) as a per-state softmax over logits. Logits may
// be -inf to place exactly zero mass (deterministic policies); each row must
// keep a finite maximum.
struct Policy {
  Eigen::MatrixXd logits;  // S x A

  Eigen::MatrixXd probs() const;
  static Policy uniform(int S, int A);
  static Policy deterministic(int S, int A, const std::vector<int>& actions);
  // argmax action per state (first index on ties).
  std::vector<int> greedy_actions() const;
};

struct PolicyEval {
  Eigen::VectorXd V;  // S
  Eigen::MatrixXd Q;  // S x A
};

// Exact policy evaluation: V solves (I - gamma P_pi) V = R_pi directly,
// Q(s,a) = R(s,a) + gamma E_{P(.|s,a)}[V].
PolicyEval policy_eval(const TabularMdp& mdp, const Policy& policy);

struct Occupancy {
  ProbVector d;          // discounted state occupancy, sums to 1
  Eigen::MatrixXd joint;  // S x A, d(s) * pi(a|s)
};

// d = (1-gamma) sum_t gamma^t p_t via the Bellman flow equation's linear solve.
Occupancy discounted_occupancy(const TabularMdp& mdp, const Policy& policy);

// J_RL = -(1/(1-gamma)) E_{d,pi}[R] = -E[sum gamma^{t-1} r_t].
double j_rl(const TabularMdp& mdp, const Policy& policy);

enum class StateDist { occupancy, uniform };

// Psi_RL(s,a) = -[sum_t gamma^t p_t(s) / rho(s)] (Q(s,a) - V(s)). With the
// default rho = d^pi this is the scaled negative advantage -(Q-V)/(1-gamma).
Eigen::MatrixXd rl_influence(const TabularMdp& mdp, const Policy& policy,
                             StateDist ref = StateDist::occupancy);

// Same with an explicit reference state distribution rho.
Eigen::MatrixXd rl_influence_wrt(const TabularMdp& mdp, const Policy& policy,
                                 const Eigen::VectorXd& rho);

// Deterministic argmax_a Q(s,a) policy; ties go to the lowest action index.
Policy greedy_policy(const Eigen::MatrixXd& Q);

// Bellman operator residual A V(s,a) = R(s,a) + gamma E[V(s')] - V(s).
Eigen::MatrixXd bellman_apply(const TabularMdp& mdp, const Eigen::VectorXd& V);

// Dual actor-critic saddle objective
//   (1-gamma) E_{p0}[V] + E_{joint}[A V],
// V-invariant exactly when the joint satisfies the Bellman flow equation.
double dac_objective(const TabularMdp& mdp, const ProbVector& joint,
                     const Eigen::VectorXd& V);

// Conditional policy recovered from a joint state-action measure.
Policy policy_from_joint(const TabularMdp& mdp, const ProbVector& joint);

// J_RL as a functional of the joint measure pi(s,a) over the S*A point space,
// with the influence taken w.r.t. the joint's own state marginal.
FunctionalHandle make_rl_joint(const TabularMdp& mdp);

// Flattened d^pi(s) pi(a|s) as a measure on the S*A space.
ProbVector occupancy_measure(const TabularMdp& mdp, const Policy& policy);

// Plain-text instance format: header "S A gamma", then the p0 row, then
// S*A lines "s a R(s,a) P(0|s,a) ... P(S-1|s,a)".
TabularMdp read_mdp(std::istream& in);
TabularMdp read_mdp_file(const std::string& path);
void write_mdp(std::ostream& out, const TabularMdp& mdp);

TabularMdp random_mdp(int S, int A, double gamma, CounterRng& rng);

}  // namespace pfd

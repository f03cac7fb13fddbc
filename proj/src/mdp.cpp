#include "pfd/mdp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pfd/numerics.hpp"

namespace pfd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd transition_under(const TabularMdp& mdp, const Eigen::MatrixXd& probs) {
  Eigen::MatrixXd P_pi = Eigen::MatrixXd::Zero(mdp.S, mdp.S);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a)
      P_pi.row(s) += probs(s, a) * mdp.P.row(mdp.sa(s, a));
  return P_pi;
}

}  // namespace

TabularMdp TabularMdp::make(int S, int A, ProbVector p0, Eigen::MatrixXd P,
                            Eigen::MatrixXd R, double gamma) {
  if (S < 1 || A < 1) throw DomainError("TabularMdp: need S >= 1 and A >= 1");
  if (p0.size() != S) throw DomainError("TabularMdp: p0 size != S");
  if (P.rows() != S * A || P.cols() != S) throw DomainError("TabularMdp: P shape");
  if (R.rows() != S || R.cols() != A) throw DomainError("TabularMdp: R shape");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("TabularMdp: gamma outside (0,1)");
  if (!R.allFinite()) throw DomainError("TabularMdp: non-finite reward");
  for (int row = 0; row < S * A; ++row)
    ProbVector(P.row(row).transpose());  // validates each transition row
  TabularMdp mdp;
  mdp.S = S;
  mdp.A = A;
  mdp.p0 = std::move(p0);
  mdp.P = std::move(P);
  mdp.R = std::move(R);
  mdp.gamma = gamma;
  return mdp;
}

Eigen::MatrixXd Policy::probs() const {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    const double m = logits.row(s).maxCoeff();
    if (!std::isfinite(m)) throw DomainError("Policy: row without finite logit");
    Eigen::ArrayXd e = (logits.row(s).array() - m).exp();
    p.row(s) = e / e.sum();
  }
  return p;
}

Policy Policy::uniform(int S, int A) { return Policy{Eigen::MatrixXd::Zero(S, A)}; }

Policy Policy::deterministic(int S, int A, const std::vector<int>& actions) {
  if (static_cast<int>(actions.size()) != S)
    throw DomainError("Policy::deterministic: one action per state required");
  Eigen::MatrixXd logits = Eigen::MatrixXd::Constant(S, A, -kInf);
  for (int s = 0; s < S; ++s) {
    if (actions[s] < 0 || actions[s] >= A)
      throw DomainError("Policy::deterministic: action out of range");
    logits(s, actions[s]) = 0.0;
  }
  return Policy{logits};
}

std::vector<int> Policy::greedy_actions() const {
  std::vector<int> acts(logits.rows());
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    Eigen::Index best = 0;
    logits.row(s).maxCoeff(&best);
    acts[s] = static_cast<int>(best);
  }
  return acts;
}

PolicyEval policy_eval(const TabularMdp& mdp, const Policy& policy) {
  const Eigen::MatrixXd probs = policy.probs();
  const Eigen::MatrixXd P_pi = transition_under(mdp, probs);
  const Eigen::VectorXd R_pi = (probs.array() * mdp.R.array()).rowwise().sum();

  const Eigen::MatrixXd A_sys =
      Eigen::MatrixXd::Identity(mdp.S, mdp.S) - mdp.gamma * P_pi;
  const Eigen::VectorXd V = A_sys.partialPivLu().solve(R_pi);
  if ((A_sys * V - R_pi).lpNorm<Eigen::Infinity>() > 1e-9 * (1.0 + R_pi.lpNorm<Eigen::Infinity>()))
    throw NumericalError("policy_eval: linear solve failed");

  Eigen::MatrixXd Q(mdp.S, mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a)
      Q(s, a) = mdp.R(s, a) + mdp.gamma * mdp.P.row(mdp.sa(s, a)).dot(V);
  return PolicyEval{V, Q};
}

Occupancy discounted_occupancy(const TabularMdp& mdp, const Policy& policy) {
  const Eigen::MatrixXd probs = policy.probs();
  const Eigen::MatrixXd P_pi = transition_under(mdp, probs);
  const Eigen::MatrixXd A_sys =
      Eigen::MatrixXd::Identity(mdp.S, mdp.S) - mdp.gamma * P_pi.transpose();
  const Eigen::VectorXd d = A_sys.partialPivLu().solve(
      Eigen::VectorXd((1.0 - mdp.gamma) * mdp.p0.vec()));
  Occupancy occ;
  occ.d = ProbVector(d / csum(d));
  occ.joint = occ.d.vec().asDiagonal() * probs;
  return occ;
}

double j_rl(const TabularMdp& mdp, const Policy& policy) {
  const Occupancy occ = discounted_occupancy(mdp, policy);
  Eigen::VectorXd terms(mdp.S * mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a)
      terms[mdp.sa(s, a)] = occ.joint(s, a) * mdp.R(s, a);
  return -csum(terms) / (1.0 - mdp.gamma);
}

Eigen::MatrixXd rl_influence(const TabularMdp& mdp, const Policy& policy, StateDist ref) {
  if (ref == StateDist::occupancy) {
    // rho = d^pi cancels the occupancy factor exactly.
    const PolicyEval pe = policy_eval(mdp, policy);
    return -(pe.Q.colwise() - pe.V) / (1.0 - mdp.gamma);
  }
  return rl_influence_wrt(mdp, policy,
                          Eigen::VectorXd::Constant(mdp.S, 1.0 / mdp.S));
}

Eigen::MatrixXd rl_influence_wrt(const TabularMdp& mdp, const Policy& policy,
                                 const Eigen::VectorXd& rho) {
  if (rho.size() != mdp.S) throw DomainError("rl_influence_wrt: rho size != S");
  const PolicyEval pe = policy_eval(mdp, policy);
  const Occupancy occ = discounted_occupancy(mdp, policy);
  Eigen::MatrixXd psi(mdp.S, mdp.A);
  for (int s = 0; s < mdp.S; ++s) {
    if (rho[s] <= 0.0) {
      if (occ.d[s] > 1e-14)
        throw DomainError("rl_influence: zero-mass reference at reachable state " +
                          std::to_string(s));
      psi.row(s).setZero();
      continue;
    }
    const double scale = occ.d[s] / ((1.0 - mdp.gamma) * rho[s]);
    for (int a = 0; a < mdp.A; ++a)
      psi(s, a) = -scale * (pe.Q(s, a) - pe.V[s]);
  }
  return psi;
}

Policy greedy_policy(const Eigen::MatrixXd& Q) {
  if (!Q.allFinite()) throw DomainError("greedy_policy: non-finite Q");
  std::vector<int> acts(Q.rows());
  for (Eigen::Index s = 0; s < Q.rows(); ++s) {
    int best = 0;
    for (int a = 1; a < Q.cols(); ++a)
      if (Q(s, a) > Q(s, best)) best = a;  // strict: ties keep the lower index
    acts[s] = best;
  }
  return Policy::deterministic(static_cast<int>(Q.rows()), static_cast<int>(Q.cols()), acts);
}

Eigen::MatrixXd bellman_apply(const TabularMdp& mdp, const Eigen::VectorXd& V) {
  if (V.size() != mdp.S) throw DomainError("bellman_apply: V size != S");
  if (!V.allFinite()) throw DomainError("bellman_apply: non-finite V");
  Eigen::MatrixXd out(mdp.S, mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a)
      out(s, a) = mdp.R(s, a) + mdp.gamma * mdp.P.row(mdp.sa(s, a)).dot(V) - V[s];
  return out;
}

double dac_objective(const TabularMdp& mdp, const ProbVector& joint,
                     const Eigen::VectorXd& V) {
  if (joint.size() != mdp.S * mdp.A) throw DomainError("dac_objective: joint size != S*A");
  const Eigen::MatrixXd AV = bellman_apply(mdp, V);
  Eigen::VectorXd terms(mdp.S * mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a)
      terms[mdp.sa(s, a)] = joint[mdp.sa(s, a)] * AV(s, a);
  return (1.0 - mdp.gamma) * cdot(mdp.p0.vec(), V) + csum(terms);
}

Policy policy_from_joint(const TabularMdp& mdp, const ProbVector& joint) {
  if (joint.size() != mdp.S * mdp.A) throw DomainError("policy_from_joint: size != S*A");
  Eigen::MatrixXd logits(mdp.S, mdp.A);
  for (int s = 0; s < mdp.S; ++s) {
    double marg = 0.0;
    for (int a = 0; a < mdp.A; ++a) marg += joint[mdp.sa(s, a)];
    if (!(marg > 0.0))
      throw BoundaryError("policy_from_joint: zero state marginal at state " +
                          std::to_string(s));
    for (int a = 0; a < mdp.A; ++a)
      logits(s, a) = joint[mdp.sa(s, a)] > 0.0 ? std::log(joint[mdp.sa(s, a)] / marg)
                                               : -kInf;
  }
  return Policy{logits};
}

ProbVector occupancy_measure(const TabularMdp& mdp, const Policy& policy) {
  const Occupancy occ = discounted_occupancy(mdp, policy);
  Eigen::VectorXd flat(mdp.S * mdp.A);
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a) flat[mdp.sa(s, a)] = occ.joint(s, a);
  return ProbVector::normalized(flat.cwiseMax(0.0));
}

FunctionalHandle make_rl_joint(const TabularMdp& mdp) {
  auto value = [mdp](const ProbVector& joint) {
    return j_rl(mdp, policy_from_joint(mdp, joint));
  };
  auto influence = [mdp](const ProbVector& joint) {
    const Policy pi = policy_from_joint(mdp, joint);
    Eigen::VectorXd rho(mdp.S);
    for (int s = 0; s < mdp.S; ++s) {
      double marg = 0.0;
      for (int a = 0; a < mdp.A; ++a) marg += joint[mdp.sa(s, a)];
      rho[s] = marg;
    }
    const Eigen::MatrixXd psi = rl_influence_wrt(mdp, pi, rho);
    Eigen::VectorXd flat(mdp.S * mdp.A);
    for (int s = 0; s < mdp.S; ++s)
      for (int a = 0; a < mdp.A; ++a) flat[mdp.sa(s, a)] = psi(s, a);
    return flat;
  };
  return FunctionalHandle{"J_RL", value, influence};
}

TabularMdp read_mdp(std::istream& in) {
  int S = 0, A = 0;
  double gamma = 0.0;
  if (!(in >> S >> A >> gamma))
    throw ConfigError("mdp file: bad header, expected 'S A gamma'");
  if (S < 1 || A < 1) throw ConfigError("mdp file: invalid S or A");

  Eigen::VectorXd p0(S);
  for (int s = 0; s < S; ++s)
    if (!(in >> p0[s])) throw ConfigError("mdp file: truncated p0 row");

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S * A, S);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(S, A);
  std::vector<bool> seen(static_cast<std::size_t>(S) * A, false);
  for (int row = 0; row < S * A; ++row) {
    int s = 0, a = 0;
    if (!(in >> s >> a))
      throw ConfigError("mdp file: truncated at row " + std::to_string(row));
    if (s < 0 || s >= S || a < 0 || a >= A)
      throw ConfigError("mdp file: state-action out of range at row " +
                        std::to_string(row));
    if (seen[static_cast<std::size_t>(s) * A + a])
      throw ConfigError("mdp file: duplicate entry for s=" + std::to_string(s) +
                        " a=" + std::to_string(a));
    seen[static_cast<std::size_t>(s) * A + a] = true;
    if (!(in >> R(s, a))) throw ConfigError("mdp file: missing reward");
    for (int sp = 0; sp < S; ++sp)
      if (!(in >> P(s * A + a, sp)))
        throw ConfigError("mdp file: truncated transition row for s=" +
                          std::to_string(s) + " a=" + std::to_string(a));
  }
  try {
    return TabularMdp::make(S, A, ProbVector(p0), std::move(P), std::move(R), gamma);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("mdp file: ") + e.what());
  }
}

TabularMdp read_mdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mdp instance file: " + path);
  return read_mdp(in);
}

void write_mdp(std::ostream& out, const TabularMdp& mdp) {
  out.precision(17);
  out << mdp.S << ' ' << mdp.A << ' ' << mdp.gamma << '\n';
  for (int s = 0; s < mdp.S; ++s) out << mdp.p0[s] << (s + 1 < mdp.S ? ' ' : '\n');
  for (int s = 0; s < mdp.S; ++s)
    for (int a = 0; a < mdp.A; ++a) {
      out << s << ' ' << a << ' ' << mdp.R(s, a);
      for (int sp = 0; sp < mdp.S; ++sp) out << ' ' << mdp.P(mdp.sa(s, a), sp);
      out << '\n';
    }
}

TabularMdp random_mdp(int S, int A, double gamma, CounterRng& rng) {
  Eigen::MatrixXd P(S * A, S);
  for (int row = 0; row < S * A; ++row)
    P.row(row) = random_interior(S, rng).vec().transpose();
  Eigen::MatrixXd R(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) R(s, a) = 2.0 * rng.next_double() - 1.0;
  return TabularMdp::make(S, A, random_interior(S, rng), std::move(P), std::move(R),
                          gamma);
}

}  // namespace pfd

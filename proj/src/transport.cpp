#include "pfd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pfd/numerics.hpp"

namespace pfd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-12;

struct Cell {
  int i, j;
  double flow;
};

// Transportation simplex on the n x n bipartite problem. The basis is kept
// as a spanning tree over row nodes 0..n-1 and column nodes n..2n-1; ties in
// entering/leaving choices go to the lexicographically smallest cell (Bland),
// which rules out cycling through degenerate pivots.
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::VectorXd& supply, const Eigen::VectorXd& demand,
                   const Eigen::MatrixXd& cost)
      : n_(static_cast<int>(supply.size())), cost_(cost) {
    northwest_corner(supply, demand);
  }

  void solve() {
    const long max_pivots = 4000L * n_ * n_ + 10000L;
    for (long iter = 0; iter < max_pivots; ++iter) {
      compute_duals();
      int ei = -1, ej = -1;
      if (!find_entering(&ei, &ej)) return;  // all reduced costs >= -tol
      pivot(ei, ej);
    }
    throw NumericalError("w1_solve: pivot limit exceeded");
  }

  Eigen::MatrixXd plan() const {
    Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n_, n_);
    for (const Cell& c : basis_) pi(c.i, c.j) = std::max(c.flow, 0.0);
    return pi;
  }

  const Eigen::VectorXd& col_duals() const { return v_; }

 private:
  void northwest_corner(Eigen::VectorXd a, Eigen::VectorXd b) {
    basis_.reserve(2 * n_ - 1);
    int i = 0, j = 0;
    for (int step = 0; step < 2 * n_ - 1; ++step) {
      const double f = std::min(a[i], b[j]);
      basis_.push_back({i, j, f});
      a[i] -= f;
      b[j] -= f;
      if (step == 2 * n_ - 2) break;
      if (i == n_ - 1) {
        ++j;
      } else if (j == n_ - 1) {
        ++i;
      } else if (a[i] <= b[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Node ids: rows 0..n-1, columns n..2n-1.
  void build_adjacency(std::vector<std::vector<std::pair<int, int>>>& adj) const {
    adj.assign(2 * n_, {});
    for (int c = 0; c < static_cast<int>(basis_.size()); ++c) {
      adj[basis_[c].i].push_back({n_ + basis_[c].j, c});
      adj[n_ + basis_[c].j].push_back({basis_[c].i, c});
    }
  }

  void compute_duals() {
    u_.setConstant(n_, kInf);
    v_.setConstant(n_, kInf);
    std::vector<std::vector<std::pair<int, int>>> adj;
    build_adjacency(adj);
    std::vector<int> stack = {0};
    u_[0] = 0.0;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (const auto& [other, c] : adj[node]) {
        const int ri = basis_[c].i, cj = basis_[c].j;
        if (node < n_ && v_[cj] == kInf) {
          v_[cj] = cost_(ri, cj) - u_[ri];
          stack.push_back(other);
        } else if (node >= n_ && u_[ri] == kInf) {
          u_[ri] = cost_(ri, cj) - v_[cj];
          stack.push_back(other);
        }
      }
    }
  }

  bool find_entering(int* ei, int* ej) const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        if (is_basic(i, j)) continue;
        if (cost_(i, j) - u_[i] - v_[j] < -kPivotTol) {
          *ei = i;
          *ej = j;
          return true;
        }
      }
    return false;
  }

  bool is_basic(int i, int j) const {
    for (const Cell& c : basis_)
      if (c.i == i && c.j == j) return true;
    return false;
  }

  // Adds (ei, ej), walks the unique tree cycle, and removes the Bland-minimal
  // cell among those whose flow hits zero.
  void pivot(int ei, int ej) {
    std::vector<std::vector<std::pair<int, int>>> adj;
    build_adjacency(adj);

    // Tree path from row node ei to column node n_+ej.
    std::vector<int> parent_node(2 * n_, -1), parent_cell(2 * n_, -1);
    std::vector<int> stack = {ei};
    parent_node[ei] = ei;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node == n_ + ej) break;
      for (const auto& [other, c] : adj[node]) {
        if (parent_node[other] == -1) {
          parent_node[other] = node;
          parent_cell[other] = c;
          stack.push_back(other);
        }
      }
    }
    if (parent_node[n_ + ej] == -1)
      throw NumericalError("w1_solve: basis lost connectivity");

    std::vector<int> path;  // basis cell indices from ei to n_+ej
    for (int node = n_ + ej; node != ei; node = parent_node[node])
      path.push_back(parent_cell[node]);
    std::reverse(path.begin(), path.end());

    // Entering cell takes +theta; path cells alternate -,+,-,... from ei.
    double theta = kInf;
    for (std::size_t k = 0; k < path.size(); k += 2)
      theta = std::min(theta, basis_[path[k]].flow);

    int leave = -1;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = basis_[path[k]];
      if (c.flow <= theta &&
          (leave == -1 || c.i < basis_[leave].i ||
           (c.i == basis_[leave].i && c.j < basis_[leave].j)))
        leave = path[k];
    }

    for (std::size_t k = 0; k < path.size(); ++k)
      basis_[path[k]].flow += (k % 2 == 0) ? -theta : theta;
    basis_[leave] = {ei, ej, theta};
  }

  int n_;
  const Eigen::MatrixXd& cost_;
  std::vector<Cell> basis_;
  Eigen::VectorXd u_, v_;
};

}  // namespace

MetricSpace::MetricSpace(Eigen::MatrixXd d) : d_(std::move(d)) {
  const Eigen::Index n = d_.rows();
  if (n < 1 || d_.cols() != n) throw DomainError("MetricSpace: table not square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d_(i, i) != 0.0) throw DomainError("MetricSpace: nonzero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(d_(i, j) >= 0.0)) throw DomainError("MetricSpace: negative distance");
      if (std::abs(d_(i, j) - d_(j, i)) > 1e-12)
        throw DomainError("MetricSpace: asymmetric table");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        if (d_(i, j) > d_(i, k) + d_(k, j) + 1e-12)
          throw DomainError("MetricSpace: triangle inequality violated");
}

MetricSpace MetricSpace::line(Eigen::Index n, double spacing) {
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      d(i, j) = spacing * std::abs(static_cast<double>(i - j));
  return MetricSpace(std::move(d));
}

W1Solution w1_solve(const ProbVector& mu, const ProbVector& nu, const MetricSpace& m) {
  if (mu.size() != nu.size() || mu.size() != m.size())
    throw DomainError("w1_solve: dimension mismatch");

  TransportSimplex simplex(mu.vec(), nu.vec(), m.dist());
  simplex.solve();

  W1Solution out;
  out.plan = simplex.plan();
  Eigen::VectorXd terms(mu.size() * mu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = 0; j < mu.size(); ++j)
      terms[i * mu.size() + j] = out.plan(i, j) * m(i, j);
  out.value = csum(terms);

  // phi_i = min_j (d_ij - v_j) is 1-Lipschitz and attains the dual optimum,
  // so <phi, mu - nu> equals the primal value.
  const Eigen::VectorXd& v = simplex.col_duals();
  out.potential = c_transform(-v, m);
  out.potential.array() -= out.potential[0];
  return out;
}

Eigen::VectorXd c_transform(const Eigen::VectorXd& phi, const MetricSpace& m) {
  if (phi.size() != m.size()) throw DomainError("c_transform: dimension mismatch");
  Eigen::VectorXd out(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    double best = kInf;
    for (Eigen::Index j = 0; j < phi.size(); ++j)
      best = std::min(best, phi[j] + m(i, j));
    out[i] = best;
  }
  return out;
}

double lipschitz_constant(const Eigen::VectorXd& phi, const MetricSpace& m) {
  if (phi.size() != m.size())
    throw DomainError("lipschitz_constant: dimension mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < phi.size(); ++i)
    for (Eigen::Index j = i + 1; j < phi.size(); ++j) {
      const double gap = std::abs(phi[i] - phi[j]);
      if (m(i, j) == 0.0) {
        if (gap > 0.0) return kInf;
      } else {
        worst = std::max(worst, gap / m(i, j));
      }
    }
  return worst;
}

FunctionalHandle make_w1(const ProbVector& nu, const MetricSpace& m) {
  return FunctionalHandle{
      "J_W",
      [nu, m](const ProbVector& mu) { return w1_solve(mu, nu, m).value; },
      [nu, m](const ProbVector& mu) { return w1_solve(mu, nu, m).potential; }};
}

}  // namespace pfd

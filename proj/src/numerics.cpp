#include "pfd/numerics.hpp"

namespace pfd {

double csum(const Eigen::Ref<const Eigen::VectorXd>& v) {
  double sum = 0.0;
  double comp = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = v[i];
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

double cdot(const Eigen::Ref<const Eigen::VectorXd>& a,
            const Eigen::Ref<const Eigen::VectorXd>& b) {
  double sum = 0.0;
  double comp = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = a[i] * b[i];
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace pfd

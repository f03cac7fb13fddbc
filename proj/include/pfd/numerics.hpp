#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace pfd {

// Neumaier-compensated sum; used wherever test tolerances sit below 1e-8.
double csum(const Eigen::Ref<const Eigen::VectorXd>& v);

// Compensated dot product.
double cdot(const Eigen::Ref<const Eigen::VectorXd>& a,
            const Eigen::Ref<const Eigen::VectorXd>& b);

// x*log(y) with the 0*log(.) = 0 convention of entropy sums.
inline double xlogy(double x, double y) {
  return x == 0.0 ? 0.0 : x * std::log(y);
}

inline double logistic(double w) { return 1.0 / (1.0 + std::exp(-w)); }

// log(logistic(w)), stable for large |w|.
inline double log_logistic(double w) {
  return w < 0.0 ? w - std::log1p(std::exp(w)) : -std::log1p(std::exp(-w));
}

}  // namespace pfd

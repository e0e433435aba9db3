#pragma once

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace ipdyn {

// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488); }

// Two-sided p-value for an asymptotically standard normal statistic.
inline double normal_two_sided_p(double z) {
  return std::erfc(std::abs(z) / 1.4142135623730950488);
}

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
inline double chi_square_upper_tail(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

}  // namespace ipdyn

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "relayee/errors.hpp"

namespace relayee {

/// Adaptive integration on [a, b]; b may be +infinity. Finite intervals use
/// double-exponential (tanh-sinh) refinement, which also absorbs integrable
/// endpoint singularities; the semi-infinite tail uses adaptive
/// Gauss-Kronrod. Throws NumericError with the achieved residual when the
/// error estimate stays far above `abs_tol`.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
  double value = 0.0;
  double err = 0.0;
  if (std::isinf(b)) {
    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    value = gk::integrate(std::forward<F>(f), a, b, 14, abs_tol, &err);
  } else {
    if (!(b > a)) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts(14);
    double l1 = 0.0;
    std::size_t levels = 0;
    value = ts.integrate(std::forward<F>(f), a, b, 1e-12, &err, &l1, &levels);
    err *= std::max(l1, 1.0);  // tanh_sinh reports a relative estimate
  }
  const double scale = std::max(1.0, std::abs(value));
  if (!std::isfinite(value) || err > 1e-6 * scale + 1e4 * abs_tol) {
    throw NumericError("quadrature did not converge", err);
  }
  return value;
}

}  // namespace relayee

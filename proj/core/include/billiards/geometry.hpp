#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace billiards {

using Complex = std::complex<double>;

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <class Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

using Vec2d = Vec2<double>;
using Vec2c = Vec2<Complex>;
using Mat2d = Mat2<double>;
using Mat2c = Mat2<Complex>;

/// Reduce x into [0, 1).
inline double wrap_unit(double x) {
  x -= std::floor(x);
  if (x >= 1.0) x = 0.0;  // guard against floor(1.0 - eps) rounding
  return x;
}

/// Representative of a - b on the circle R/Z, in [-0.5, 0.5).
inline double circle_diff(double a, double b) {
  double d = a - b;
  return d - std::round(d);
}

/// Representative of x - ref + ref closest to ref (branch alignment on R/Z).
inline double align_branch(double x, double ref) {
  return x - std::round(x - ref);
}

inline double abs_val(double x) { return std::abs(x); }
inline double abs_val(const Complex& x) { return std::abs(x); }

}  // namespace billiards

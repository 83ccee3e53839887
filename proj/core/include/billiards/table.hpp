#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "billiards/geometry.hpp"

namespace billiards {

/// Fourier coefficients of a closed boundary curve B(theta) = (x, y),
///
///   x(theta) = sum_k  cos_x[k] cos(2 pi k theta) + sin_x[k] sin(2 pi k theta)
///   y(theta) = sum_k (sin_y[k] + sin2_y[k]) sin(2 pi k theta)
///
/// with k = 1..max_order and theta in [0, 1). Coefficients are stored densely;
/// absent modes are explicit zeros. All angles are in units of full turns.
struct TableSpec {
  std::vector<double> cos_x;   // cosine modes of x, index 0 <-> k = 1
  std::vector<double> sin_x;   // sine modes of x
  std::vector<double> sin_y;   // primary sine modes of y
  std::vector<double> sin2_y;  // secondary sine modes of y

  int max_order() const { return static_cast<int>(cos_x.size()); }

  double coeff_cos_x(int k) const { return mode(cos_x, k); }
  double coeff_sin_x(int k) const { return mode(sin_x, k); }
  double coeff_sin_y(int k) const { return mode(sin_y, k); }
  double coeff_sin2_y(int k) const { return mode(sin2_y, k); }

  static TableSpec circle();
  static TableSpec ellipse(double a1, double b1);

  /// Ellipse perturbed by second modes growing linearly in eps; loses
  /// convexity near eps = 9.
  static TableSpec convexity_family(double eps);

 private:
  static double mode(const std::vector<double>& c, int k) {
    return (k >= 1 && k <= static_cast<int>(c.size())) ? c[k - 1] : 0.0;
  }
};

/// Axis-aligned ellipse with semi-axes a1 (horizontal) and b1 (vertical).
struct EllipseSpec {
  double a1 = 1.0;
  double b1 = 1.0;
};

/// Built-in example tables "A".."E" (perturbations of two base ellipses).
TableSpec builtin_table(const std::string& name);

/// Parse a key/value table file with keys ax.k, bx.k, ay.k, by.k (k >= 1).
TableSpec read_table_file(const std::string& path);
TableSpec parse_table_text(const std::string& text);

/// The ellipse sharing the first-mode coefficients of the table.
/// Throws std::invalid_argument if either first mode vanishes.
EllipseSpec associated_ellipse(const TableSpec& spec);

/// Boundary point B(theta). Entire in theta, real for real theta.
template <class Scalar>
Vec2<Scalar> eval_boundary(const TableSpec& spec, const Scalar& theta);

/// Derivative of the boundary curve: order 1 gives B', order 2 gives B''.
template <class Scalar>
Vec2<Scalar> eval_tangent(const TableSpec& spec, const Scalar& theta, int order);

template <class Scalar>
Vec2<Scalar> eval_boundary(const EllipseSpec& ell, const Scalar& theta);

template <class Scalar>
Vec2<Scalar> eval_tangent(const EllipseSpec& ell, const Scalar& theta, int order);

/// Minimum of the signed curvature kappa(theta) over a uniform sample grid.
/// A positive value certifies convexity at the sampled resolution.
/// Throws std::runtime_error on a degenerate tangent (|B'| < 1e-12).
double min_signed_curvature(const TableSpec& spec, int samples = 4096);

/// Both eccentricity-like quantities of an ellipse: the classical
/// sqrt(1 - b^2/a^2) (for a >= b) and the ratio sqrt(|a^2 - b^2|)/b.
struct EccentricityReport {
  double classical;    // sqrt(1 - min^2/max^2)
  double axis_ratio;   // sqrt(|a1^2 - b1^2|)/b1
};
EccentricityReport eccentricity_report(const EllipseSpec& ell);

extern template Vec2<double> eval_boundary(const TableSpec&, const double&);
extern template Vec2<Complex> eval_boundary(const TableSpec&, const Complex&);
extern template Vec2<double> eval_tangent(const TableSpec&, const double&, int);
extern template Vec2<Complex> eval_tangent(const TableSpec&, const Complex&, int);
extern template Vec2<double> eval_boundary(const EllipseSpec&, const double&);
extern template Vec2<Complex> eval_boundary(const EllipseSpec&, const Complex&);
extern template Vec2<double> eval_tangent(const EllipseSpec&, const double&, int);
extern template Vec2<Complex> eval_tangent(const EllipseSpec&, const Complex&, int);

}  // namespace billiards

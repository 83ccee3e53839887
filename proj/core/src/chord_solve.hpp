#pragma once

// Deflated Newton solve of the chord equation
//   h(s, theta_hat) = B(theta) + s v - B(theta_hat) = 0,
// shared by the real and the complexified map. The known root at
// (s, theta_hat) = (0, theta) is deflated away by dividing h by
// rho = sqrt(s^2 + (theta_hat - theta)^2), which agrees with the Euclidean
// norm on the real slice and stays analytic off it.

#include <cmath>
#include <complex>

#include "billiards/geometry.hpp"
#include "billiards/table.hpp"

namespace billiards::detail {

template <class Scalar>
struct ChordSolveResult {
  Scalar s{};
  Scalar theta_hat{};
  double residual = 0.0;         // plain |h| at the accepted root
  bool converged = false;
  bool first_step_contracted = true;
  int iterations = 0;
};

template <class Scalar>
ChordSolveResult<Scalar> solve_chord(const TableSpec& spec, const Scalar& theta,
                                     const Vec2<Scalar>& v, Scalar s0, Scalar theta_hat0,
                                     double tol = 1e-13, int max_iter = 50) {
  using std::abs;
  using std::sqrt;
  const Vec2<Scalar> base = eval_boundary(spec, theta);

  Scalar s = s0, th = theta_hat0;
  ChordSolveResult<Scalar> out;

  auto deflated = [&](const Scalar& ss, const Scalar& tt, Vec2<Scalar>& ht, Scalar& rho) {
    Vec2<Scalar> h = base + ss * v - eval_boundary(spec, tt);
    Scalar dth = tt - theta;
    Scalar rho2 = ss * ss + dth * dth;
    if (abs(rho2) < 1e-20) {
      // sitting on the deflated root itself; nudge s before dividing
      Scalar ss2 = ss + Scalar(1e-8);
      rho2 = ss2 * ss2 + dth * dth;
    }
    rho = sqrt(rho2);
    ht = h / rho;
    return h;
  };

  double prev_norm = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec2<Scalar> ht;
    Scalar rho;
    Vec2<Scalar> h = deflated(s, th, ht, rho);
    double norm_ht = std::max(abs_val(ht(0)), abs_val(ht(1)));
    if (it == 1 && prev_norm > 0.0 && norm_ht > 0.5 * prev_norm && norm_ht > tol)
      out.first_step_contracted = false;
    if (it == 0) prev_norm = norm_ht;
    if (norm_ht < tol) {
      out.s = s;
      out.theta_hat = th;
      out.residual = std::max(abs_val(h(0)), abs_val(h(1)));
      out.converged = true;
      out.iterations = it;
      return out;
    }

    Scalar dth = th - theta;
    Vec2<Scalar> that = eval_tangent(spec, th, 1);
    // J~ = J_h/rho - h (grad rho)^T / rho^2
    Mat2<Scalar> J;
    J.col(0) = v / rho - h * (s / (rho * rho * rho));
    J.col(1) = -that / rho - h * (dth / (rho * rho * rho));

    Scalar det = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    if (abs(det) < 1e-300) break;
    Scalar ds = (-ht(0) * J(1, 1) + ht(1) * J(0, 1)) / det;
    Scalar dt = (-ht(1) * J(0, 0) + ht(0) * J(1, 0)) / det;
    s += ds;
    th += dt;
    out.iterations = it + 1;
  }

  Vec2<Scalar> ht;
  Scalar rho;
  Vec2<Scalar> h = deflated(s, th, ht, rho);
  out.s = s;
  out.theta_hat = th;
  out.residual = std::max(abs_val(h(0)), abs_val(h(1)));
  out.converged = std::max(abs_val(ht(0)), abs_val(ht(1))) < tol;
  return out;
}

}  // namespace billiards::detail

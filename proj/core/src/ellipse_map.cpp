#include "billiards/ellipse_map.hpp"

#include <numbers>
#include <stdexcept>

namespace billiards {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

EllipseChord ellipse_chord(const EllipseSpec& ell, double theta, const Vec2d& v) {
  double d1 = v(0) / ell.a1;
  double d2 = v(1) / ell.b1;
  double denom = d1 * d1 + d2 * d2;
  if (denom < 1e-300) throw std::runtime_error("ellipse chord: degenerate direction");
  double arg = kTwoPi * theta;
  EllipseChord out;
  out.s_star = -2.0 * (d1 * std::cos(arg) + d2 * std::sin(arg)) / denom;
  Vec2d hit = eval_boundary(ell, theta) + out.s_star * v;
  out.theta_hat = wrap_unit(std::atan2(hit(1) / ell.b1, hit(0) / ell.a1) / kTwoPi);
  return out;
}

EllipseStep ellipse_step(const EllipseSpec& ell, const PhasePoint& p) {
  if (!(std::abs(p.r) < 1.0)) throw std::domain_error("ellipse_step: |r| must be < 1");

  Vec2d tangent = eval_tangent(ell, p.theta, 1);
  double tau = std::atan2(tangent(1), tangent(0));
  double gamma = std::acos(p.r);
  Vec2d v(std::cos(gamma + tau), std::sin(gamma + tau));

  EllipseChord chord = ellipse_chord(ell, p.theta, v);

  // Reflected angle at the new point, computed from v and the new tangent.
  Vec2d that = eval_tangent(ell, chord.theta_hat, 1);
  double tau_hat = std::atan2(that(1), that(0));
  double rho_hat = std::atan2(v(1), v(0));
  double r_hat = std::cos(rho_hat - tau_hat);

  return EllipseStep{PhasePoint{chord.theta_hat, r_hat}, chord.s_star};
}

}  // namespace billiards

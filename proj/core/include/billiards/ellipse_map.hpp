#pragma once

#include "billiards/phase.hpp"
#include "billiards/table.hpp"

namespace billiards {

struct EllipseStep {
  PhasePoint next;
  double chord = 0.0;  // distance s* > 0 to the next collision
};

/// Closed-form billiard step on an ellipse. Throws std::domain_error
/// when |r| >= 1.
EllipseStep ellipse_step(const EllipseSpec& ell, const PhasePoint& p);

/// Chord intersection of the ray E(theta) + s*v with the ellipse, where v is
/// an arbitrary unit direction. Returns s* (possibly <= 0 when v exits the
/// ellipse) and the parameter of the far intersection point.
struct EllipseChord {
  double s_star = 0.0;
  double theta_hat = 0.0;
};
EllipseChord ellipse_chord(const EllipseSpec& ell, double theta, const Vec2d& v);

}  // namespace billiards

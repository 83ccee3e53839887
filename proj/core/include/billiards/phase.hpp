#pragma once

#include "billiards/geometry.hpp"

namespace billiards {

/// Billiard state: boundary parameter theta in [0,1) and r = cos of the
/// bounce angle, |r| < 1.
struct PhasePoint {
  double theta = 0.0;
  double r = 0.0;
};

/// Complexified billiard state used by the analytically continued map.
struct CPhasePoint {
  Complex theta{0.0, 0.0};
  Complex r{0.0, 0.0};

  CPhasePoint() = default;
  CPhasePoint(Complex t, Complex rr) : theta(t), r(rr) {}
  explicit CPhasePoint(const PhasePoint& p) : theta(p.theta), r(p.r) {}
};

inline PhasePoint reverse(const PhasePoint& p) { return {p.theta, -p.r}; }

}  // namespace billiards

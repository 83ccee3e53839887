#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "billiards/ellipse_map.hpp"
#include "billiards/phase.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Auxiliary quantities of one billiard step: tau is the tangent angle at the
/// source point, gamma the bounce angle (cos gamma = r), v the outgoing unit
/// direction, s the chord parameter, and (rho_hat, tau_hat) the direction and
/// tangent angles at the image point. gamma_hat = rho_hat - tau_hat.
template <class Scalar>
struct AngleBundleT {
  Scalar tau{};
  Scalar gamma{};
  Vec2<Scalar> v = Vec2<Scalar>::Zero();
  Scalar s{};
  Scalar theta_hat{};
  Scalar rho_hat{};
  Scalar tau_hat{};

  Scalar gamma_hat() const { return rho_hat - tau_hat; }
};

using AngleBundle = AngleBundleT<double>;
using CAngleBundle = AngleBundleT<Complex>;

/// Newton failed to locate the next collision; carries the last iterate.
struct NewtonDivergence : std::runtime_error {
  NewtonDivergence(const std::string& what, double s, double theta_hat, int step_index = -1)
      : std::runtime_error(what), last_s(s), last_theta_hat(theta_hat), index(step_index) {}
  double last_s;
  double last_theta_hat;
  int index;  // failing step of an orbit, or -1 for a single step
};

/// Tangent angle, bounce angle and outgoing direction at p.
/// Throws std::domain_error for |r| >= 1 and std::runtime_error on a
/// degenerate tangent.
AngleBundle reflection_data(const TableSpec& spec, const PhasePoint& p);

struct StepResult {
  PhasePoint next;
  AngleBundle aux;
};

/// One step of the billiard map. The optional previous chord direction is
/// used to rebuild the initial guess when the outgoing direction exits the
/// associated ellipse.
StepResult billiard_step(const TableSpec& spec, const PhasePoint& p,
                         const std::optional<Vec2d>& v_prev = std::nullopt);

/// Inverse step, realized as R o f o R with R(theta, r) = (theta, -r).
PhasePoint billiard_step_inverse(const TableSpec& spec, const PhasePoint& p);

/// Forward orbit of n steps. dtheta holds the per-step advance of theta,
/// lifted to its representative in (0, 1); chord holds the step lengths.
struct Orbit {
  std::vector<PhasePoint> points;  // p_1 .. p_n (seed excluded)
  std::vector<double> dtheta;
  std::vector<double> chord;
};
Orbit orbit(const TableSpec& spec, const PhasePoint& p0, int n);

/// Inverse orbit of n steps of f^{-1}; dtheta is the lifted advance of the
/// underlying forward map at each inverse step.
Orbit inverse_orbit(const TableSpec& spec, const PhasePoint& p0, int n);

}  // namespace billiards

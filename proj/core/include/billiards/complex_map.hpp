#pragma once

#include <optional>
#include <stdexcept>

#include "billiards/phase.hpp"
#include "billiards/real_map.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Solved step data at a complex phase point, used to seed nearby solves.
/// `at` is the point where the angle data is valid and `mapped` its image.
struct GuessBundle {
  CPhasePoint at;
  CAngleBundle aux;
  CPhasePoint mapped;
};

struct ContinuationError : std::runtime_error {
  ContinuationError(const std::string& what, int depth_reached)
      : std::runtime_error(what), depth(depth_reached) {}
  int depth;
};

struct SingularSolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Solve cos(gamma) = r and T1 sin(tau) = T2 cos(tau) for complex (gamma,
/// tau) near the guess; returns the bundle prefix (tau, gamma, v).
struct AngleSolution {
  Complex tau, gamma;
  Vec2c v;
};
AngleSolution solve_angles_g(const TableSpec& spec, const CPhasePoint& p, Complex tau_guess,
                             Complex gamma_guess);

/// Continue the chord equation B(theta) + s v = B(theta_hat) from the guess;
/// the spurious root at s = 0 is deflated away. No branch reduction is
/// applied to theta_hat.
struct ChordSolution {
  Complex s, theta_hat;
};
ChordSolution solve_chord_h(const TableSpec& spec, Complex theta, const Vec2c& v, Complex s_guess,
                            Complex theta_hat_guess);

/// Solve the reflection system for (rho_hat, tau_hat) at theta_hat given the
/// incoming direction v; r_hat = cos(rho_hat - tau_hat).
struct ReflectionSolution {
  Complex rho_hat, tau_hat, r_hat;
};
ReflectionSolution solve_reflection_k(const TableSpec& spec, Complex theta_hat, const Vec2c& v,
                                      Complex rho_guess, Complex tau_guess);

/// One step of the analytically continued billiard map. The guess must come
/// from a solved nearby point; the segment from guess.at to p is bisected
/// adaptively (depth <= 20) until every implicit solve converges. theta_hat
/// is never reduced mod 1: branches are fixed by continuation history.
struct CStepResult {
  CPhasePoint next;
  GuessBundle bundle;  // solved data at p, reusable as the next guess
};
CStepResult complex_step(const TableSpec& spec, const CPhasePoint& p, const GuessBundle& guess);

/// Jacobian of the billiard map assembled from the implicit-function
/// derivatives of the three solves; requires the solved bundle at p.
template <class Scalar>
Mat2<Scalar> jacobian_df(const TableSpec& spec, Scalar theta, Scalar r,
                         const AngleBundleT<Scalar>& aux);

/// Real-slice Jacobian from a real step bundle.
Mat2d jacobian_df_real(const TableSpec& spec, const PhasePoint& p, const AngleBundle& aux);

/// Bundle a real billiard step as a continuation seed. When theta_hat_ref is
/// given, the image branch is shifted by an integer so that theta_hat lands
/// on the representative nearest the reference.
GuessBundle seed_from_real(const TableSpec& spec, const PhasePoint& p,
                           std::optional<double> theta_hat_ref = std::nullopt);

extern template Mat2<double> jacobian_df(const TableSpec&, double, double,
                                         const AngleBundleT<double>&);
extern template Mat2<Complex> jacobian_df(const TableSpec&, Complex, Complex,
                                          const AngleBundleT<Complex>&);

}  // namespace billiards

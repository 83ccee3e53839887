#include "billiards/complex_map.hpp"

#include <cmath>

#include "chord_solve.hpp"

namespace billiards {

namespace {

constexpr double kTol = 1e-13;
constexpr int kMaxIter = 30;
constexpr int kMaxDepth = 20;

struct ScalarNewton {
  Complex root{};
  bool converged = false;
  bool first_step_contracted = true;
};

// Newton iteration for a scalar analytic equation f(x) = 0.
template <class F, class DF>
ScalarNewton scalar_newton(Complex x0, F f, DF df, double singular_floor) {
  ScalarNewton out;
  Complex x = x0;
  double first = -1.0;
  for (int it = 0; it < kMaxIter; ++it) {
    Complex fx = f(x);
    double n = std::abs(fx);
    if (it == 0) first = n;
    if (it == 1 && n > 0.5 * first && n > kTol) out.first_step_contracted = false;
    if (n < kTol) {
      out.root = x;
      out.converged = true;
      return out;
    }
    Complex d = df(x);
    if (std::abs(d) < singular_floor)
      throw SingularSolveError("scalar Newton: singular derivative");
    x -= fx / d;
  }
  out.root = x;
  out.converged = std::abs(f(x)) < kTol;
  return out;
}

bool acceptable(const ScalarNewton& s) { return s.converged && s.first_step_contracted; }

}  // namespace

AngleSolution solve_angles_g(const TableSpec& spec, const CPhasePoint& p, Complex tau_guess,
                             Complex gamma_guess) {
  const Vec2c tangent = eval_tangent(spec, p.theta, 1);

  auto g_gamma = [&](Complex g) { return std::cos(g) - p.r; };
  auto dg_gamma = [](Complex g) { return -std::sin(g); };
  ScalarNewton gamma = scalar_newton(gamma_guess, g_gamma, dg_gamma, 1e-12);

  auto g_tau = [&](Complex t) { return tangent(0) * std::sin(t) - tangent(1) * std::cos(t); };
  auto dg_tau = [&](Complex t) { return tangent(0) * std::cos(t) + tangent(1) * std::sin(t); };
  ScalarNewton tau = scalar_newton(tau_guess, g_tau, dg_tau, 1e-12);

  if (!acceptable(gamma) || !acceptable(tau))
    throw ContinuationError("angle system did not converge from the guess", 0);

  AngleSolution out;
  out.gamma = gamma.root;
  out.tau = tau.root;
  out.v = Vec2c(std::cos(out.gamma + out.tau), std::sin(out.gamma + out.tau));
  return out;
}

ChordSolution solve_chord_h(const TableSpec& spec, Complex theta, const Vec2c& v, Complex s_guess,
                            Complex theta_hat_guess) {
  auto sol = detail::solve_chord<Complex>(spec, theta, v, s_guess, theta_hat_guess, kTol, kMaxIter);
  if (!(sol.converged && sol.first_step_contracted))
    throw ContinuationError("chord system did not converge from the guess", 0);
  return ChordSolution{sol.s, sol.theta_hat};
}

ReflectionSolution solve_reflection_k(const TableSpec& spec, Complex theta_hat, const Vec2c& v,
                                      Complex rho_guess, Complex tau_guess) {
  const Vec2c that = eval_tangent(spec, theta_hat, 1);

  auto k_tau = [&](Complex t) { return that(0) * std::sin(t) - that(1) * std::cos(t); };
  auto dk_tau = [&](Complex t) { return that(0) * std::cos(t) + that(1) * std::sin(t); };
  ScalarNewton tau_hat = scalar_newton(tau_guess, k_tau, dk_tau, 1e-12);

  auto k_rho = [&](Complex r) { return v(0) * std::sin(r) - v(1) * std::cos(r); };
  auto dk_rho = [&](Complex r) { return v(0) * std::cos(r) + v(1) * std::sin(r); };
  ScalarNewton rho_hat = scalar_newton(rho_guess, k_rho, dk_rho, 1e-12);

  if (!acceptable(tau_hat) || !acceptable(rho_hat))
    throw ContinuationError("reflection system did not converge from the guess", 0);

  ReflectionSolution out;
  out.tau_hat = tau_hat.root;
  out.rho_hat = rho_hat.root;
  out.r_hat = std::cos(out.rho_hat - out.tau_hat);
  return out;
}

namespace {

// All three solves at p, seeded from a nearby bundle. Throws
// ContinuationError/SingularSolveError when the seed is too far.
CStepResult solve_at(const TableSpec& spec, const CPhasePoint& p, const CAngleBundle& seed) {
  AngleSolution ang = solve_angles_g(spec, p, seed.tau, seed.gamma);
  ChordSolution chord = solve_chord_h(spec, p.theta, ang.v, seed.s, seed.theta_hat);
  ReflectionSolution refl =
      solve_reflection_k(spec, chord.theta_hat, ang.v, seed.rho_hat, seed.tau_hat);

  CStepResult out;
  out.bundle.at = p;
  out.bundle.aux.tau = ang.tau;
  out.bundle.aux.gamma = ang.gamma;
  out.bundle.aux.v = ang.v;
  out.bundle.aux.s = chord.s;
  out.bundle.aux.theta_hat = chord.theta_hat;
  out.bundle.aux.rho_hat = refl.rho_hat;
  out.bundle.aux.tau_hat = refl.tau_hat;
  out.next = CPhasePoint(chord.theta_hat, refl.r_hat);
  out.bundle.mapped = out.next;
  return out;
}

CStepResult continue_to(const TableSpec& spec, const CPhasePoint& from_at,
                        const CAngleBundle& from_aux, const CPhasePoint& target, int depth) {
  try {
    return solve_at(spec, target, from_aux);
  } catch (const ContinuationError&) {
    if (depth >= kMaxDepth)
      throw ContinuationError("continuation lost: bisection depth exhausted", depth);
  } catch (const SingularSolveError&) {
    if (depth >= kMaxDepth)
      throw ContinuationError("continuation lost: singular solve persists", depth);
  }
  CPhasePoint mid(0.5 * (from_at.theta + target.theta), 0.5 * (from_at.r + target.r));
  CStepResult at_mid = continue_to(spec, from_at, from_aux, mid, depth + 1);
  return continue_to(spec, mid, at_mid.bundle.aux, target, depth + 1);
}

}  // namespace

CStepResult complex_step(const TableSpec& spec, const CPhasePoint& p, const GuessBundle& guess) {
  return continue_to(spec, guess.at, guess.aux, p, 0);
}

GuessBundle seed_from_real(const TableSpec& spec, const PhasePoint& p,
                           std::optional<double> theta_hat_ref) {
  StepResult step = billiard_step(spec, p);
  AngleBundle a = step.aux;
  if (theta_hat_ref) a.theta_hat = align_branch(a.theta_hat, *theta_hat_ref);

  GuessBundle out;
  out.at = CPhasePoint(p);
  out.aux.tau = a.tau;
  out.aux.gamma = a.gamma;
  out.aux.v = Vec2c(Complex(a.v(0)), Complex(a.v(1)));
  out.aux.s = a.s;
  out.aux.theta_hat = a.theta_hat;
  out.aux.rho_hat = a.rho_hat;
  out.aux.tau_hat = a.tau_hat;
  out.mapped = CPhasePoint(Complex(a.theta_hat), Complex(step.next.r));
  return out;
}

template <class Scalar>
Mat2<Scalar> jacobian_df(const TableSpec& spec, Scalar theta, Scalar r,
                         const AngleBundleT<Scalar>& aux) {
  using std::cos;
  using std::sin;
  (void)r;

  const Vec2<Scalar> T = eval_tangent(spec, theta, 1);
  const Vec2<Scalar> Tp = eval_tangent(spec, theta, 2);

  // stage 1: gamma and tau as functions of (theta, r)
  Scalar sin_gamma = sin(aux.gamma);
  Scalar tau_den = T(0) * cos(aux.tau) + T(1) * sin(aux.tau);
  if (abs_val(sin_gamma) < 1e-12 || abs_val(tau_den) < 1e-12)
    throw SingularSolveError("jacobian: singular angle system");
  Scalar gamma_r = Scalar(-1) / sin_gamma;
  Scalar tau_theta = -(Tp(0) * sin(aux.tau) - Tp(1) * cos(aux.tau)) / tau_den;

  Vec2<Scalar> w(-sin(aux.gamma + aux.tau), cos(aux.gamma + aux.tau));
  Vec2<Scalar> v_theta = w * tau_theta;
  Vec2<Scalar> v_r = w * gamma_r;

  // stage 2: s and theta_hat
  const Vec2<Scalar> That = eval_tangent(spec, aux.theta_hat, 1);
  Mat2<Scalar> M;
  M.col(0) = aux.v;
  M.col(1) = -That;
  Scalar detM = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  if (abs_val(detM) < 1e-12)
    throw SingularSolveError("jacobian: chord direction parallel to image tangent");
  Mat2<Scalar> Minv;
  Minv << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
  Minv /= detM;

  Vec2<Scalar> col_theta = T + aux.s * v_theta;
  Vec2<Scalar> col_r = aux.s * v_r;
  Vec2<Scalar> st_theta = -Minv * col_theta;  // (ds/dtheta, dtheta_hat/dtheta)
  Vec2<Scalar> st_r = -Minv * col_r;

  // stage 3: rho_hat, tau_hat, r_hat
  const Vec2<Scalar> Thatp = eval_tangent(spec, aux.theta_hat, 2);
  Scalar tau_hat_den = That(0) * cos(aux.tau_hat) + That(1) * sin(aux.tau_hat);
  Scalar rho_hat_den = aux.v(0) * cos(aux.rho_hat) + aux.v(1) * sin(aux.rho_hat);
  if (abs_val(tau_hat_den) < 1e-12 || abs_val(rho_hat_den) < 1e-12)
    throw SingularSolveError("jacobian: singular reflection system");

  Scalar tau_hat_slope = -(Thatp(0) * sin(aux.tau_hat) - Thatp(1) * cos(aux.tau_hat)) / tau_hat_den;
  Scalar tau_hat_theta = tau_hat_slope * st_theta(1);
  Scalar tau_hat_r = tau_hat_slope * st_r(1);

  auto rho_from_v = [&](const Vec2<Scalar>& vx) {
    return -(vx(0) * sin(aux.rho_hat) - vx(1) * cos(aux.rho_hat)) / rho_hat_den;
  };
  Scalar rho_hat_theta = rho_from_v(v_theta);
  Scalar rho_hat_r = rho_from_v(v_r);

  Scalar msin = -sin(aux.rho_hat - aux.tau_hat);
  Scalar rhat_theta = msin * (rho_hat_theta - tau_hat_theta);
  Scalar rhat_r = msin * (rho_hat_r - tau_hat_r);

  Mat2<Scalar> Df;
  Df << st_theta(1), st_r(1), rhat_theta, rhat_r;
  return Df;
}

Mat2d jacobian_df_real(const TableSpec& spec, const PhasePoint& p, const AngleBundle& aux) {
  return jacobian_df<double>(spec, p.theta, p.r, aux);
}

template Mat2<double> jacobian_df(const TableSpec&, double, double, const AngleBundleT<double>&);
template Mat2<Complex> jacobian_df(const TableSpec&, Complex, Complex,
                                   const AngleBundleT<Complex>&);

}  // namespace billiards

#include "billiards/real_map.hpp"

#include <cmath>
#include <numbers>

#include "chord_solve.hpp"

namespace billiards {

namespace {

constexpr double kAcceptTol = 1e-12;

// Best chord guess for a candidate theta_hat: project the connecting segment
// onto v and measure the defect of the chord equation.
double grid_misfit(const TableSpec& spec, const Vec2d& base, const Vec2d& v, double theta_hat,
                   double& s_out) {
  Vec2d target = eval_boundary(spec, theta_hat);
  double s = (target - base).dot(v);
  s_out = s;
  return (base + s * v - target).norm();
}

struct Guess {
  double s;
  double theta_hat;
};

// Initial guess chain: chord on the associated ellipse in the direction of v;
// if v exits the ellipse (s* <= 0), reflect the previous direction on the
// ellipse tangent; as a last resort scan candidate exit points on a coarse
// grid.
Guess initial_guess(const TableSpec& spec, const PhasePoint& p, const Vec2d& v,
                    const std::optional<Vec2d>& v_prev) {
  EllipseSpec ell = associated_ellipse(spec);

  EllipseChord c = ellipse_chord(ell, p.theta, v);
  if (c.s_star > 0.0) return {c.s_star, c.theta_hat};

  if (v_prev) {
    Vec2d t = eval_tangent(ell, p.theta, 1).normalized();
    Vec2d reflected = 2.0 * v_prev->dot(t) * t - *v_prev;
    EllipseChord c2 = ellipse_chord(ell, p.theta, reflected);
    if (c2.s_star > 0.0) return {c2.s_star, c2.theta_hat};
  }

  // coarse scan, excluding the neighborhood of the spurious root at theta
  Vec2d base = eval_boundary(spec, p.theta);
  double best_err = std::numeric_limits<double>::infinity();
  Guess best{1.0, wrap_unit(p.theta + 0.5)};
  constexpr int kCand = 64;
  for (int i = 0; i < kCand; ++i) {
    double cand = wrap_unit(p.theta + (i + 0.5) / (kCand + 1.0));
    if (std::abs(circle_diff(cand, p.theta)) < 0.02) continue;
    double s;
    double err = grid_misfit(spec, base, v, cand, s);
    if (s > 0.0 && err < best_err) {
      best_err = err;
      best = {s, cand};
    }
  }
  return best;
}

}  // namespace

AngleBundle reflection_data(const TableSpec& spec, const PhasePoint& p) {
  if (!(std::abs(p.r) < 1.0)) throw std::domain_error("billiard map: |r| must be < 1");
  Vec2d tangent = eval_tangent(spec, p.theta, 1);
  if (tangent.norm() < 1e-12) throw std::runtime_error("degenerate tangent vector");

  AngleBundle b;
  b.tau = std::atan2(tangent(1), tangent(0));
  b.gamma = std::acos(p.r);
  b.v = Vec2d(std::cos(b.gamma + b.tau), std::sin(b.gamma + b.tau));
  return b;
}

StepResult billiard_step(const TableSpec& spec, const PhasePoint& p,
                         const std::optional<Vec2d>& v_prev) {
  AngleBundle aux = reflection_data(spec, p);

  Guess guess = initial_guess(spec, p, aux.v, v_prev);
  auto sol = detail::solve_chord<double>(spec, p.theta, aux.v, guess.s, guess.theta_hat);

  if (!(sol.converged && sol.residual < kAcceptTol && sol.s > 0.0)) {
    // retry from the fallback guesses before giving up
    Vec2d base = eval_boundary(spec, p.theta);
    bool ok = false;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
      Guess g{};
      if (attempt == 0 && v_prev) {
        EllipseSpec ell = associated_ellipse(spec);
        Vec2d t = eval_tangent(ell, p.theta, 1).normalized();
        Vec2d reflected = 2.0 * v_prev->dot(t) * t - *v_prev;
        EllipseChord c = ellipse_chord(ell, p.theta, reflected);
        if (c.s_star <= 0.0) continue;
        g = {c.s_star, c.theta_hat};
      } else {
        double best_err = std::numeric_limits<double>::infinity();
        constexpr int kCand = 64;
        for (int i = 0; i < kCand; ++i) {
          double cand = wrap_unit(p.theta + (i + 0.5) / (kCand + 1.0));
          if (std::abs(circle_diff(cand, p.theta)) < 0.02) continue;
          double s;
          double err = grid_misfit(spec, base, aux.v, cand, s);
          if (s > 0.0 && err < best_err) {
            best_err = err;
            g = {s, cand};
          }
        }
        if (best_err == std::numeric_limits<double>::infinity()) break;
      }
      sol = detail::solve_chord<double>(spec, p.theta, aux.v, g.s, g.theta_hat);
      ok = sol.converged && sol.residual < kAcceptTol && sol.s > 0.0;
    }
    if (!ok)
      throw NewtonDivergence("billiard step: Newton did not converge", sol.s, sol.theta_hat);
  }

  aux.s = sol.s;
  aux.theta_hat = wrap_unit(sol.theta_hat);

  Vec2d that = eval_tangent(spec, aux.theta_hat, 1);
  aux.tau_hat = std::atan2(that(1), that(0));
  aux.rho_hat = std::atan2(aux.v(1), aux.v(0));
  double r_hat = std::cos(aux.gamma_hat());

  return StepResult{PhasePoint{aux.theta_hat, r_hat}, aux};
}

PhasePoint billiard_step_inverse(const TableSpec& spec, const PhasePoint& p) {
  StepResult fwd = billiard_step(spec, reverse(p));
  return reverse(fwd.next);
}

Orbit orbit(const TableSpec& spec, const PhasePoint& p0, int n) {
  if (n < 1) throw std::invalid_argument("orbit length must be >= 1");
  Orbit out;
  out.points.reserve(n);
  out.dtheta.reserve(n);
  out.chord.reserve(n);

  PhasePoint p = p0;
  std::optional<Vec2d> v_prev;
  for (int i = 0; i < n; ++i) {
    StepResult step;
    try {
      step = billiard_step(spec, p, v_prev);
    } catch (const NewtonDivergence& e) {
      throw NewtonDivergence(e.what(), e.last_s, e.last_theta_hat, i);
    }
    double lift = step.next.theta - p.theta;
    lift -= std::floor(lift);
    if (lift == 0.0) lift = 1.0;
    out.points.push_back(step.next);
    out.dtheta.push_back(lift);
    out.chord.push_back(step.aux.s);
    v_prev = step.aux.v;
    p = step.next;
  }
  return out;
}

Orbit inverse_orbit(const TableSpec& spec, const PhasePoint& p0, int n) {
  if (n < 1) throw std::invalid_argument("orbit length must be >= 1");
  // R o f^n o R: run the forward orbit of the reversed point, then flip r.
  Orbit rev = orbit(spec, reverse(p0), n);
  Orbit out;
  out.points.reserve(n);
  out.dtheta = rev.dtheta;
  out.chord = rev.chord;
  for (const PhasePoint& q : rev.points) out.points.push_back(reverse(q));
  return out;
}

}  // namespace billiards

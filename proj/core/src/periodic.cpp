#include "billiards/periodic.hpp"

#include <algorithm>
#include <cmath>

#include "billiards/complex_map.hpp"
#include "billiards/real_map.hpp"

namespace billiards {

namespace {

// f(u_j) for every j, with bundles for the Jacobian blocks.
std::vector<StepResult> step_all(const TableSpec& spec, const ShootVector& u) {
  std::vector<StepResult> steps;
  steps.reserve(u.points.size());
  for (const PhasePoint& p : u.points) steps.push_back(billiard_step(spec, p));
  return steps;
}

}  // namespace

Eigen::VectorXd multishoot_residual(const TableSpec& spec, const ShootVector& u) {
  const int K = u.period();
  if (K < 1) throw std::invalid_argument("shooting vector is empty");
  std::vector<StepResult> steps = step_all(spec, u);

  Eigen::VectorXd g(2 * K);
  for (int j = 0; j < K; ++j) {
    // component j of F is f applied to the previous point (cyclically)
    const StepResult& s = steps[(j + K - 1) % K];
    g(2 * j) = circle_diff(s.next.theta, u.points[j].theta);
    g(2 * j + 1) = s.next.r - u.points[j].r;
  }
  return g;
}

Eigen::MatrixXd multishoot_jacobian(const TableSpec& spec, const ShootVector& u) {
  const int K = u.period();
  std::vector<StepResult> steps = step_all(spec, u);
  Eigen::MatrixXd DF = Eigen::MatrixXd::Zero(2 * K, 2 * K);
  for (int j = 0; j < K; ++j) {
    int src = (j + K - 1) % K;
    Mat2d block = jacobian_df_real(spec, u.points[src], steps[src].aux);
    DF.block<2, 2>(2 * j, 2 * src) = block;
  }
  return DF;
}

ShootVector newton_periodic(const TableSpec& spec, const ShootVector& u0, double tol,
                            int max_iter) {
  ShootVector u = u0;
  const int K = u.period();
  if (K < 1) throw std::invalid_argument("shooting vector is empty");

  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd g = multishoot_residual(spec, u);
    if (g.norm() < tol) return u;

    Eigen::MatrixXd DG = multishoot_jacobian(spec, u) - Eigen::MatrixXd::Identity(2 * K, 2 * K);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(DG);
    if (!lu.isInvertible())
      throw std::runtime_error(
          "shooting Newton matrix is singular (orbit non-hyperbolic or period not least)");
    Eigen::VectorXd delta = lu.solve(-g);
    for (int j = 0; j < K; ++j) {
      u.points[j].theta = wrap_unit(u.points[j].theta + delta(2 * j));
      u.points[j].r += delta(2 * j + 1);
      if (!(std::abs(u.points[j].r) < 1.0))
        throw NewtonDivergence("shooting Newton left the phase cylinder", u.points[j].r,
                               u.points[j].theta, j);
    }
  }
  Eigen::VectorXd g = multishoot_residual(spec, u);
  if (g.norm() < tol) return u;
  throw NewtonDivergence("shooting Newton did not converge", g.norm(), u.points[0].theta);
}

EigenData multipliers_and_eigvecs(const TableSpec& spec, const ShootVector& u) {
  const int K = u.period();
  Eigen::MatrixXd DF = multishoot_jacobian(spec, u);
  Eigen::EigenSolver<Eigen::MatrixXd> es(DF);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  const auto& vals = es.eigenvalues();

  // hyperbolicity check on the magnitude levels
  double min_mag = vals.cwiseAbs().minCoeff();
  double max_mag = vals.cwiseAbs().maxCoeff();
  if (std::abs(min_mag - 1.0) < 1e-8 && std::abs(max_mag - 1.0) < 1e-8)
    throw std::runtime_error("orbit is not hyperbolic (multipliers on the unit circle)");

  // the positive real K-th roots of the two multipliers
  int idx_s = -1, idx_u = -1;
  for (int i = 0; i < vals.size(); ++i) {
    if (std::abs(vals(i).imag()) > 1e-8 * std::max(1.0, std::abs(vals(i)))) continue;
    double re = vals(i).real();
    if (re <= 0.0) continue;
    if (re < 1.0 && (idx_s < 0 || re < vals(idx_s).real())) idx_s = i;
    if (re > 1.0 && (idx_u < 0 || re > vals(idx_u).real())) idx_u = i;
  }
  if (idx_s < 0 || idx_u < 0)
    throw std::runtime_error(
        "no real positive multiplier roots found (negative or complex multipliers)");

  EigenData out;
  out.lambda = vals(idx_s).real();
  double big = vals(idx_u).real();
  out.alpha = std::pow(out.lambda, K);
  out.beta = std::pow(big, K);
  out.mu = 1.0 / big;

  auto real_unit_vector = [&](int idx) {
    Eigen::VectorXd v = es.eigenvectors().col(idx).real();
    if (v.norm() < 1e-12) v = es.eigenvectors().col(idx).imag();
    v.normalize();
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    return v;
  };
  out.dfvec_s = real_unit_vector(idx_s);
  out.dfvec_u = real_unit_vector(idx_u);

  auto per_point = [&](const Eigen::VectorXd& v) {
    std::vector<Vec2d> xs(K);
    for (int j = 0; j < K; ++j) {
      Vec2d x = v.segment<2>(2 * j);
      double n = x.norm();
      if (n > 0.0) x /= n;
      if (std::abs(x(0)) > 1e-12 ? x(0) < 0.0 : x(1) < 0.0) x = -x;
      xs[j] = x;
    }
    return xs;
  };
  out.xi_s = per_point(out.dfvec_s);
  out.xi_u = per_point(out.dfvec_u);
  return out;
}

ShootVector complete_seed(const TableSpec& spec, const std::vector<PhasePoint>& given,
                          int period) {
  if (period < 1) throw std::invalid_argument("period must be >= 1");
  if (given.empty()) throw std::invalid_argument("seed needs at least one point");
  ShootVector u;
  u.points = given;
  u.points.resize(std::min<std::size_t>(given.size(), period));
  while (u.period() < period) {
    StepResult s = billiard_step(spec, u.points.back());
    u.points.push_back(s.next);
  }
  return u;
}

}  // namespace billiards

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "billiards/phase.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Period-K orbit as the fixed point of the cyclic shooting map
/// F(u_1..u_K) = (f(u_K), f(u_1), ..., f(u_{K-1})).
struct ShootVector {
  std::vector<PhasePoint> points;

  int period() const { return static_cast<int>(points.size()); }
};

/// Floquet data of a saddle orbit with positive multipliers: alpha < 1 < beta
/// with alpha*beta = 1; lambda and mu are the positive real K-th roots of
/// alpha and 1/beta. xi_s/xi_u hold per-point unit eigenvectors of Df^K(u_j);
/// dfvec_s/dfvec_u are the coherent eigenvectors of the 2K x 2K shooting
/// Jacobian (unit 2K-norm) whose block scalings seed the manifold charts.
struct EigenData {
  double alpha = 0.0;
  double beta = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  std::vector<Vec2d> xi_s, xi_u;
  Eigen::VectorXd dfvec_s, dfvec_u;
};

/// Cyclic residuals (f(u_K) - u_1, f(u_1) - u_2, ...). Theta components are
/// compared on the circle (representative in [-1/2, 1/2)).
Eigen::VectorXd multishoot_residual(const TableSpec& spec, const ShootVector& u);

/// Block-cyclic Jacobian of the shooting map.
Eigen::MatrixXd multishoot_jacobian(const TableSpec& spec, const ShootVector& u);

/// Newton on G(u) = F(u) - u. Throws NewtonDivergence on failure and
/// std::runtime_error when the Newton matrix is singular.
ShootVector newton_periodic(const TableSpec& spec, const ShootVector& u0, double tol = 1e-12,
                            int max_iter = 30);

/// Extract multipliers and eigenvectors from the shooting Jacobian. Throws
/// std::runtime_error for elliptic orbits or negative multipliers.
EigenData multipliers_and_eigvecs(const TableSpec& spec, const ShootVector& u);

/// Extend a partial seed to K points by iterating the map.
ShootVector complete_seed(const TableSpec& spec, const std::vector<PhasePoint>& given, int period);

}  // namespace billiards

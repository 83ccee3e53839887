#include <doctest.h>

#include <cmath>

#include "billiards/complex_map.hpp"
#include "billiards/periodic.hpp"
#include "billiards/real_map.hpp"

using namespace billiards;

namespace {

Mat2d df_power(const TableSpec& spec, const ShootVector& u, int j) {
  // Jacobian of f^K at u_j: chain of step Jacobians along the orbit
  const int K = u.period();
  Mat2d M = Mat2d::Identity();
  for (int m = 0; m < K; ++m) {
    const PhasePoint& p = u.points[(j + m) % K];
    StepResult s = billiard_step(spec, p);
    M = jacobian_df_real(spec, p, s.aux) * M;
  }
  return M;
}

}  // namespace

TEST_CASE("shooting residual at the axis orbit") {
  TableSpec a = builtin_table("A");
  ShootVector u{{{0.5, 0.0}, {0.0, 0.0}}};
  CHECK(multishoot_residual(a, u).norm() < 1e-10);

  ShootVector circle_diam{{{0.0, 0.0}, {0.5, 0.0}}};
  CHECK(multishoot_residual(TableSpec::circle(), circle_diam).norm() < 1e-12);

  ShootVector perturbed{{{0.5, 0.01}, {0.0, -0.01}}};
  double n = multishoot_residual(a, perturbed).norm();
  CHECK(n > 1e-4);
  CHECK(n < 0.2);
}

TEST_CASE("newton finds the period-2 orbit from a perturbed seed") {
  for (const char* name : {"A", "B", "C", "D", "E"}) {
    TableSpec spec = builtin_table(name);
    ShootVector seed{{{0.5, 0.01}, {0.0, -0.01}}};
    ShootVector u = newton_periodic(spec, seed);
    CHECK(std::abs(circle_diff(u.points[0].theta, 0.5)) < 1e-9);
    CHECK(std::abs(u.points[0].r) < 1e-10);
    CHECK(std::abs(circle_diff(u.points[1].theta, 0.0)) < 1e-9);
    CHECK(multishoot_residual(spec, u).norm() < 1e-12);
  }
}

TEST_CASE("converged input needs no correction") {
  TableSpec a = builtin_table("A");
  ShootVector u{{{0.5, 0.0}, {0.0, 0.0}}};
  ShootVector v = newton_periodic(a, u);
  CHECK(std::abs(v.points[0].theta - u.points[0].theta) < 1e-12);
  CHECK(std::abs(v.points[0].r - u.points[0].r) < 1e-12);
}

TEST_CASE("period-3 orbit near the tabulated point") {
  TableSpec a = builtin_table("A");
  ShootVector seed = complete_seed(a, {PhasePoint{0.8534, 0.5333}}, 3);
  ShootVector u = newton_periodic(a, seed);
  CHECK(multishoot_residual(a, u).norm() < 1e-12);
  bool close = false;
  for (const auto& p : u.points)
    if (std::abs(circle_diff(p.theta, 0.8534)) < 5e-3 && std::abs(p.r - 0.5333) < 5e-3)
      close = true;
  CHECK(close);
}

TEST_CASE("floquet data of the period-2 saddle") {
  TableSpec a = builtin_table("A");
  ShootVector u = newton_periodic(a, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
  EigenData eig = multipliers_and_eigvecs(a, u);

  CHECK(eig.alpha > 0.0);
  CHECK(eig.alpha < 1.0);
  CHECK(eig.beta > 1.0);
  CHECK(std::abs(eig.alpha * eig.beta - 1.0) < 1e-10);
  CHECK(std::abs(std::pow(eig.lambda, u.period()) - eig.alpha) < 1e-10);
  CHECK(std::abs(std::pow(eig.mu, u.period()) - 1.0 / eig.beta) < 1e-10);

  // per-point eigenvector residuals against Df^K
  for (int j = 0; j < u.period(); ++j) {
    Mat2d M = df_power(a, u, j);
    CHECK((M * eig.xi_s[j] - eig.alpha * eig.xi_s[j]).norm() < 1e-8);
    CHECK((M * eig.xi_u[j] - eig.beta * eig.xi_u[j]).norm() < 1e-8);
  }

  // coherent shooting eigenvectors
  Eigen::MatrixXd DF = multishoot_jacobian(a, u);
  CHECK((DF * eig.dfvec_s - eig.lambda * eig.dfvec_s).norm() < 1e-9);
  CHECK((DF * eig.dfvec_u - (1.0 / eig.mu) * eig.dfvec_u).norm() < 1e-9);
}

TEST_CASE("shooting eigenvalues sort into two magnitude levels") {
  TableSpec a = builtin_table("A");
  ShootVector seed = complete_seed(a, {PhasePoint{0.8534, 0.5333}}, 3);
  ShootVector u = newton_periodic(a, seed);
  EigenData eig = multipliers_and_eigvecs(a, u);

  Eigen::MatrixXd DF = multishoot_jacobian(a, u);
  Eigen::VectorXcd vals = Eigen::EigenSolver<Eigen::MatrixXd>(DF).eigenvalues();
  double lo = std::pow(eig.alpha, 1.0 / u.period());
  double hi = std::pow(eig.beta, 1.0 / u.period());
  for (int i = 0; i < vals.size(); ++i) {
    double m = std::abs(vals(i));
    CHECK((std::abs(m - lo) < 1e-7 || std::abs(m - hi) < 1e-7));
  }
}

TEST_CASE("cyclic shift preserves the orbit and its multipliers") {
  TableSpec b = builtin_table("B");
  ShootVector u = newton_periodic(b, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
  ShootVector shifted{{u.points[1], u.points[0]}};
  CHECK(multishoot_residual(b, shifted).norm() < 1e-10);
  EigenData e1 = multipliers_and_eigvecs(b, u);
  EigenData e2 = multipliers_and_eigvecs(b, shifted);
  CHECK(e1.alpha == doctest::Approx(e2.alpha).epsilon(1e-10));
  CHECK(e1.beta == doctest::Approx(e2.beta).epsilon(1e-10));
}

TEST_CASE("integrable orbits are rejected") {
  TableSpec circle = TableSpec::circle();
  ShootVector diam{{{0.0, 0.0}, {0.5, 0.0}}};
  CHECK_THROWS_AS(multipliers_and_eigvecs(circle, diam), std::runtime_error);
}

TEST_CASE("regression orbits across tables and periods") {
  struct Row {
    const char* table;
    int period;
    double r, theta;
    double match;  // seed precision: printed digits bound the match radius
  };
  const Row rows[] = {
      {"A", 2, 0.0, 0.5, 5e-3},       {"B", 2, 0.0, 0.5, 5e-3},
      {"C", 2, 0.0, 0.5, 5e-3},       {"D", 2, 0.0, 0.5, 5e-3},
      {"E", 2, 0.0, 0.5, 5e-3},       {"A", 3, 0.5333, 0.8534, 5e-3},
      {"A", 3, -0.5333, 0.8534, 5e-3}, {"B", 3, 0.5328, 0.3348, 5e-3},
      {"B", 3, -0.5328, 0.3348, 5e-3}, {"C", 3, 0.4454, 0.5, 5e-3},
      {"C", 3, -0.4454, 0.5, 5e-3},   {"C", 4, 0.7078, 0.0, 5e-3},
      {"C", 4, -0.7334, 0.2152, 5e-3}, {"D", 4, 0.5, 0.0, 5e-3},
      {"D", 4, -0.8923, 0.2216, 5e-3}, {"E", 4, 0.89, 0.22, 1e-1},
      {"E", 4, -0.89, 0.22, 1e-1},    {"A", 5, 0.2585, 0.4308, 5e-3},
      {"A", 5, -0.2585, 0.4308, 5e-3}, {"C", 5, 0.7695, 0.5, 5e-3},
      {"C", 5, -0.7695, 0.5, 5e-3},   {"D", 5, 0.75, 0.44, 1e-1},
      {"D", 5, -0.75, 0.44, 1e-1},    {"E", 5, 0.7, 0.46, 1e-1},
      {"E", 5, -0.7, 0.46, 1e-1},     {"A", 10, -0.3283, 0.701, 5e-3},
      {"B", 10, -0.1746, 0.3767, 5e-3}, {"C", 10, 0.1653, 0.122, 5e-3},
      {"D", 10, 0.0, 0.3802, 5e-3},   {"E", 10, -0.4106, 0.1275, 5e-3},
      {"A", 30, 0.1667, 0.5103, 5e-3}, {"A", 30, -0.1667, 0.4897, 5e-3},
      {"B", 30, 0.4877, 0.5, 5e-3},   {"B", 30, -0.4877, 0.5, 5e-3},
  };
  for (const Row& row : rows) {
    CAPTURE(row.table);
    CAPTURE(row.period);
    CAPTURE(row.theta);
    CAPTURE(row.r);
    TableSpec spec = builtin_table(row.table);
    ShootVector u =
        newton_periodic(spec, complete_seed(spec, {PhasePoint{row.theta, row.r}}, row.period));
    CHECK(multishoot_residual(spec, u).norm() < 1e-12);
    bool near = false;
    for (const auto& p : u.points)
      near |= std::abs(circle_diff(p.theta, row.theta)) < row.match &&
              std::abs(p.r - row.r) < row.match;
    CHECK(near);
    EigenData eig = multipliers_and_eigvecs(spec, u);
    CHECK(std::abs(eig.alpha * eig.beta - 1.0) < 1e-8);
    CHECK(eig.beta > 1.0);
  }
}

TEST_CASE("flip saddles are rejected") {
  // the table B period-5 orbit is a saddle with two negative multipliers
  // (trace of Df^5 below -2); only positive-multiplier orbits are supported
  TableSpec b = builtin_table("B");
  ShootVector u =
      newton_periodic(b, complete_seed(b, {PhasePoint{0.4223, 0.2641}}, 5));
  CHECK(multishoot_residual(b, u).norm() < 1e-12);

  Mat2d M = df_power(b, u, 0);
  CHECK(M.trace() < -2.0);
  CHECK(std::abs(M.determinant() - 1.0) < 1e-8);
  CHECK_THROWS_AS(multipliers_and_eigvecs(b, u), std::runtime_error);
}

TEST_CASE("seed completion") {
  TableSpec a = builtin_table("A");
  ShootVector u = complete_seed(a, {PhasePoint{0.5, 0.0}}, 2);
  REQUIRE(u.period() == 2);
  CHECK(std::abs(circle_diff(u.points[1].theta, 0.0)) < 1e-10);
  CHECK_THROWS_AS(complete_seed(a, {}, 2), std::invalid_argument);
}

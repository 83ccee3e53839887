#include <doctest.h>

#include <cmath>
#include <random>

#include "billiards/spectral.hpp"
#include "test_oracles.hpp"

using namespace billiards;
using namespace testing_oracles;

namespace {

// Table B period-2 charts are reused across several cases; build them once.
struct TableBFixture {
  TableSpec spec = builtin_table("B");
  ShootVector orbit;
  EigenData eig;
  SpectralChart stable, unstable;

  TableBFixture() {
    orbit = newton_periodic(spec, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
    eig = multipliers_and_eigvecs(spec, orbit);
    stable = newton_parameterization(spec, orbit, eig, ChartKind::stable, 0.3, 60);
    unstable = newton_parameterization(spec, orbit, eig, ChartKind::unstable, 0.3, 60);
  }

  static const TableBFixture& get() {
    static TableBFixture fixture;
    return fixture;
  }
};

}  // namespace

TEST_CASE("convolution matrix basics") {
  Eigen::VectorXd a(2);
  a << 1.0, 2.0;
  Eigen::MatrixXd M = cauchy_conv_mat(a);
  CHECK(M(0, 0) == 1.0);
  CHECK(M(0, 1) == 0.0);
  CHECK(M(1, 0) == 2.0);
  CHECK(M(1, 1) == 1.0);

  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(5);
  e0(0) = 1.0;
  CHECK(cauchy_conv_mat(e0).isIdentity(1e-15));

  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(8), y(8);
  for (int i = 0; i < 8; ++i) {
    x(i) = u(rng);
    y(i) = u(rng);
  }
  CHECK((cauchy_conv_mat(x) * y - cauchy_product(x, y)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("DFT matrices invert each other") {
  for (int N : {7, 16, 60}) {
    DFTGrid g = DFTGrid::make(N);
    CHECK((g.V * g.Vinv - Eigen::MatrixXcd::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("composition of a constant chart") {
  QuadMapOracle oracle;
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(9, 2);
  coeffs(0, 0) = 0.4;
  coeffs(0, 1) = -0.3;
  ComposeResult r = dft_compose(oracle, coeffs);

  auto direct = QuadMapOracle().eval(0, Eigen::Vector2cd(0.4, -0.3), false);
  CHECK(std::abs(r.coeffs(0, 0) - direct.F(0).real()) < 1e-14);
  CHECK(std::abs(r.coeffs(0, 1) - direct.F(1).real()) < 1e-14);
  CHECK(r.coeffs.bottomRows(8).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("DFT composition equals the Cauchy composer") {
  QuadMapCoeffs mc;
  for (int N : {8, 32, 64}) {
    Eigen::MatrixXd coeffs = half_support_chart(N, 1000 + N);
    QuadMapOracle oracle(mc);
    ComposeResult dft = dft_compose(oracle, coeffs);
    Eigen::MatrixXd exact = cauchy_compose_quad(mc, coeffs);
    CHECK((dft.coeffs - exact).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(dft.max_imag < 1e-12);
  }
}

TEST_CASE("dense DFT agrees with direct polynomial evaluation at the nodes") {
  const int N = 24;
  DFTGrid g = DFTGrid::make(N);
  Eigen::MatrixXd coeffs = half_support_chart(N, 77);
  Eigen::MatrixXcd by_matrix = g.V * coeffs.cast<Complex>();
  for (int k = 0; k <= N; ++k) {
    Complex sigma = g.nodes(k);
    for (int c = 0; c < 2; ++c) {
      Complex acc = 0.0;
      for (int n = N; n >= 0; --n) acc = acc * sigma + coeffs(n, c);
      CHECK(std::abs(by_matrix(k, c) - acc) < 1e-12);
    }
  }
}

TEST_CASE("composition through the billiard map is linear on the circle") {
  // diameter orbit of the circle: f is a rigid half-turn along the r = 0 line,
  // so composing with a theta-only linear chart stays linear
  TableSpec circle = TableSpec::circle();
  ShootVector u{{{0.0, 0.0}, {0.5, 0.0}}};
  BilliardShootOracle oracle(circle, u);

  const int N = 16;
  const double c = 0.05;
  Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(N + 1, 4);
  coeffs(0, 0) = 0.0;
  coeffs(0, 2) = 0.5;
  coeffs(1, 0) = c;
  coeffs(1, 2) = c;
  ComposeResult r = dft_compose(oracle, coeffs);

  // output pair 0 is the image of input pair 1 and vice versa
  CHECK(std::abs(circle_diff(r.coeffs(0, 0), 0.0)) < 1e-10);
  CHECK(std::abs(circle_diff(r.coeffs(0, 2), 0.5)) < 1e-10);
  CHECK(std::abs(r.coeffs(1, 0) - c) < 1e-10);
  CHECK(std::abs(r.coeffs(1, 2) - c) < 1e-10);
  CHECK(r.coeffs.bottomRows(N - 1).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(r.coeffs(0, 1)) < 1e-10);
  CHECK(std::abs(r.coeffs(0, 3)) < 1e-10);
}

TEST_CASE("linear seed chart is a quadratically good solution") {
  TableSpec b = builtin_table("B");
  ShootVector u = newton_periodic(b, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
  EigenData eig = multipliers_and_eigvecs(b, u);

  auto seed_residual = [&](double scale) {
    SpectralChart chart;
    chart.kind = ChartKind::stable;
    chart.rate = eig.lambda;
    chart.scale = scale;
    chart.trunc = 16;
    chart.coeffs = Eigen::MatrixXd::Zero(17, 4);
    for (int j = 0; j < 2; ++j) {
      chart.coeffs(0, 2 * j) = u.points[j].theta;
      chart.coeffs(0, 2 * j + 1) = u.points[j].r;
    }
    chart.coeffs.row(1) = scale * eig.dfvec_s.transpose();
    BilliardShootOracle oracle(b, u);
    Eigen::VectorXd res = psi_residual(oracle, chart);
    CHECK(std::abs(res(0)) < 1e-12);  // scale row satisfied by construction
    return res.lpNorm<Eigen::Infinity>();
  };

  double r1 = seed_residual(0.1);
  double r2 = seed_residual(0.2);
  CHECK(r1 < 0.05);
  // at least quadratic in the eigenvector length: doubling the scale must
  // grow the defect by >= 4 (a linear defect would only double)
  CHECK(r2 / r1 > 3.5);
  CHECK(r2 / r1 < 12.0);
}

TEST_CASE("psi jacobian matches finite differences exactly on alias-free directions") {
  // With a quadratic map, a chart supported on modes <= N/2 and directions
  // supported on modes <= N/2, the node collocation is exact and the
  // triangular convolution blocks are the exact Jacobian.
  const int N = 16, half = 8;
  QuadMapCoeffs mc;

  for (ChartKind kind : {ChartKind::stable, ChartKind::unstable}) {
    SpectralChart chart;
    chart.kind = kind;
    chart.rate = 0.55;
    chart.scale = 0.0;  // the scale row only shifts the residual constant
    chart.trunc = N;
    chart.coeffs = half_support_chart(N, 500 + static_cast<int>(kind));
    chart.coeffs *= 0.3;

    QuadMapOracle oracle(mc);
    PsiSystem sys = psi_system(oracle, chart);

    std::mt19937_64 rng(53 + static_cast<int>(kind));
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    Eigen::VectorXd dir_vec = Eigen::VectorXd::Zero(1 + 2 * (N + 1));
    dir_vec(0) = uu(rng);
    for (int i = 0; i < 2; ++i)
      for (int n = 0; n <= half; ++n) dir_vec(1 + i * (N + 1) + n) = uu(rng);
    dir_vec.normalize();

    const double h = 1e-6;
    auto perturbed = [&](double sign) {
      SpectralChart c2 = chart;
      c2.rate += sign * h * dir_vec(0);
      for (int i = 0; i < 2; ++i)
        for (int n = 0; n <= N; ++n) c2.coeffs(n, i) += sign * h * dir_vec(1 + i * (N + 1) + n);
      QuadMapOracle o2(mc);
      return psi_residual(o2, c2);
    };
    Eigen::VectorXd fd = (perturbed(1.0) - perturbed(-1.0)) / (2.0 * h);
    Eigen::VectorXd an = sys.jacobian * dir_vec;
    CHECK((fd - an).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("psi jacobian rate column is exact for the billiard oracle") {
  // the conjugacy-rate column involves no interpolation, so finite
  // differences must agree to rounding even at small N
  TableSpec a = builtin_table("A");
  ShootVector u = newton_periodic(a, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
  EigenData eig = multipliers_and_eigvecs(a, u);

  for (ChartKind kind : {ChartKind::stable, ChartKind::unstable}) {
    SpectralChart chart;
    chart.kind = kind;
    chart.rate = kind == ChartKind::stable ? eig.lambda : eig.mu;
    chart.scale = 0.05;
    chart.trunc = 8;
    chart.coeffs = Eigen::MatrixXd::Zero(9, 4);
    for (int j = 0; j < 2; ++j) {
      chart.coeffs(0, 2 * j) = u.points[j].theta;
      chart.coeffs(0, 2 * j + 1) = u.points[j].r;
    }
    const Eigen::VectorXd& dir = kind == ChartKind::stable ? eig.dfvec_s : eig.dfvec_u;
    chart.coeffs.row(1) = chart.scale * dir.transpose();

    BilliardShootOracle oracle(a, u);
    PsiSystem sys = psi_system(oracle, chart);

    const double h = 1e-6;
    auto at_rate = [&](double rate) {
      SpectralChart c2 = chart;
      c2.rate = rate;
      BilliardShootOracle o2(a, u);
      return psi_residual(o2, c2);
    };
    Eigen::VectorXd fd = (at_rate(chart.rate + h) - at_rate(chart.rate - h)) / (2.0 * h);
    Eigen::VectorXd an = sys.jacobian.col(0);
    // the stable column bypasses the interpolation entirely; the unstable one
    // passes through the convolution blocks, whose triangular form drops
    // collocation wrap-around terms of the size of the composed-series tail
    double tol = kind == ChartKind::stable ? 1e-5 : 5e-4;
    CHECK((fd - an).lpNorm<Eigen::Infinity>() < tol);
  }
}

TEST_CASE("chart Newton converges for the period-2 saddle") {
  const auto& fx = TableBFixture::get();
  const TableSpec& b = fx.spec;
  const ShootVector& u = fx.orbit;
  const SpectralChart& chart = fx.unstable;

  CHECK(chart.rate > 0.0);
  CHECK(chart.rate < 1.0);
  // rate stays consistent with the shooting eigenvalues
  CHECK(std::abs(chart.rate - fx.eig.mu) < 1e-8);

  // constraint row and anchoring at the orbit
  double n1 = chart.coeffs.row(1).norm();
  CHECK(std::abs(n1 - chart.scale) < 1e-10);
  for (int j = 0; j < 2; ++j) {
    CHECK(std::abs(chart.coeffs(0, 2 * j) - u.points[j].theta) < 1e-10);
    CHECK(std::abs(chart.coeffs(0, 2 * j + 1) - u.points[j].r) < 1e-10);
  }

  BilliardShootOracle oracle(b, u);
  CHECK(psi_residual(oracle, chart).lpNorm<Eigen::Infinity>() < 1e-11);

  // component conjugacy f^K(P_j(sigma)) = P_j(rate^K sigma) on real sigma;
  // for the unstable chart, the forward map advances sigma by rate^{-K}
  const double rK = std::pow(chart.rate, 2);
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 32; ++i) {
      double sigma = -1.0 + (2.0 * i + 1.0) / 32.0;
      PhasePoint from = chart.component_point(j, sigma * rK);
      PhasePoint expect = chart.component_point(j, sigma);
      PhasePoint got = billiard_step(b, billiard_step(b, from).next).next;
      CHECK(std::abs(circle_diff(got.theta, expect.theta)) < 1e-8);
      CHECK(std::abs(got.r - expect.r) < 1e-8);
    }
  }
}

TEST_CASE("stable chart conjugacy on real sigma") {
  const auto& fx = TableBFixture::get();
  const TableSpec& b = fx.spec;
  const SpectralChart& chart = fx.stable;
  const double rK = std::pow(chart.rate, 2);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 32; ++i) {
      double sigma = -1.0 + (2.0 * i + 1.0) / 32.0;
      PhasePoint from = chart.component_point(j, sigma);
      PhasePoint expect = chart.component_point(j, sigma * rK);
      PhasePoint got = billiard_step(b, billiard_step(b, from).next).next;
      CHECK(std::abs(circle_diff(got.theta, expect.theta)) < 1e-8);
      CHECK(std::abs(got.r - expect.r) < 1e-8);
    }
}

TEST_CASE("rescaling covariance of the chart coefficients") {
  TableSpec b = builtin_table("B");
  ShootVector u = newton_periodic(b, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
  EigenData eig = multipliers_and_eigvecs(b, u);

  const double scale = 0.1, factor = 1.25;  // scale' = factor * scale
  SpectralChart c1 = newton_parameterization(b, u, eig, ChartKind::unstable, scale, 30);
  SpectralChart c2 =
      newton_parameterization(b, u, eig, ChartKind::unstable, factor * scale, 30);

  double fpow = 1.0;
  for (int n = 0; n <= 30; ++n) {
    for (int i = 0; i < 4; ++i) CHECK(std::abs(c2.coeffs(n, i) - fpow * c1.coeffs(n, i)) < 1e-8);
    fpow *= factor;
  }
}

TEST_CASE("conjugacy error of converged and truncated charts") {
  const auto& fx = TableBFixture::get();
  const SpectralChart& chart = fx.stable;

  double err = conjugacy_error(fx.spec, fx.orbit, chart, 128);
  CHECK(err < 1e-9);

  // dropping substantial modes raises the defect to their magnitude
  SpectralChart damaged = chart;
  damaged.coeffs.bottomRows(41).setZero();  // zero modes 20..60
  double dropped = chart.coeffs.bottomRows(41).cwiseAbs().maxCoeff();
  double err2 = conjugacy_error(fx.spec, fx.orbit, damaged, 128);
  CHECK(err2 > 10.0 * err);
  CHECK(err2 > 0.01 * dropped);
  CHECK(err2 < 100.0 * dropped);
}

TEST_CASE("decay report") {
  const auto& fx = TableBFixture::get();

  SpectralChart seed;
  seed.kind = ChartKind::stable;
  seed.rate = fx.eig.lambda;
  seed.scale = 0.04;
  seed.trunc = 10;
  seed.coeffs = Eigen::MatrixXd::Zero(11, 4);
  seed.coeffs.row(1) = 0.2 * fx.eig.dfvec_s.transpose();
  seed.coeffs(0, 0) = 0.5;
  auto rep = coeff_decay_report(seed);
  REQUIRE(rep.size() == 11);
  CHECK(rep[0].second > -2.0);
  CHECK(rep[1].second > -2.0);
  for (std::size_t n = 2; n < rep.size(); ++n) CHECK(rep[n].second < -200.0);

  auto dec = coeff_decay_report(fx.stable);
  CHECK(dec.back().second < -13.0);  // spectral decay reaches the tail
}

TEST_CASE("rate column degenerates to the mode-1 pattern as rate -> 0") {
  // d/drate of P(rate sigma) keeps only n p_n rate^{n-1}: at rate ~ 0 the
  // column reduces to the p_1 entries at mode index 1
  QuadMapOracle oracle;
  const int N = 6;
  SpectralChart chart;
  chart.kind = ChartKind::stable;
  chart.rate = 1e-12;
  chart.scale = 0.0;
  chart.trunc = N;
  chart.coeffs = half_support_chart(N, 91);

  PsiSystem sys = psi_system(oracle, chart);
  for (int i = 0; i < 2; ++i)
    for (int n = 0; n <= N; ++n) {
      double got = sys.jacobian(1 + i * (N + 1) + n, 0);
      double expect = n == 1 ? -chart.coeffs(1, i) : 0.0;
      CHECK(std::abs(got - expect) < 1e-10);
    }
}

TEST_CASE("psi jacobian block structure") {
  const auto& fx = TableBFixture::get();
  SpectralChart chart = fx.stable;
  chart.trunc = 12;
  chart.coeffs = fx.stable.coeffs.topRows(13);

  BilliardShootOracle oracle(fx.spec, fx.orbit);
  PsiSystem sys = psi_system(oracle, chart);

  CHECK(sys.jacobian(0, 0) == 0.0);  // scale row does not involve the rate
  // scale row touches only mode-1 entries
  for (int i = 0; i < 4; ++i)
    for (int n = 0; n <= 12; ++n)
      if (n != 1) CHECK(sys.jacobian(0, 1 + i * 13 + n) == 0.0);

  // cyclic pair coupling of the shooting map: output pair o depends only on
  // input pair o-1 (plus the diagonal from the -L term)
  for (int o = 0; o < 2; ++o)
    for (int j = 0; j < 2; ++j) {
      if (j == (o + 1) % 2) continue;  // the coupled source pair
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          int row0 = 1 + (2 * o + a) * 13;
          int col0 = 1 + (2 * j + b) * 13;
          Eigen::MatrixXd block = sys.jacobian.block(row0, col0, 13, 13);
          if (2 * o + a == 2 * j + b)  // diagonal carries -Lambda
            block.diagonal().setZero();
          CHECK(block.cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("composition stays real") {
  const auto& fx = TableBFixture::get();
  BilliardShootOracle oracle(fx.spec, fx.orbit);
  PsiSystem sys = psi_system(oracle, fx.unstable);
  CHECK(sys.max_imag < 1e-9);
}

TEST_CASE("period-10 charts on table D at the published scale") {
  TableSpec d = builtin_table("D");
  ShootVector u = newton_periodic(d, complete_seed(d, {PhasePoint{0.3802, 0.0}}, 10));
  REQUIRE(multishoot_residual(d, u).norm() < 1e-12);
  EigenData eig = multipliers_and_eigvecs(d, u);
  CHECK(std::abs(eig.alpha * eig.beta - 1.0) < 1e-8);

  SpectralChart cu = newton_parameterization(d, u, eig, ChartKind::unstable, 0.7, 60);
  SpectralChart cs = newton_parameterization(d, u, eig, ChartKind::stable, 0.7, 60);
  CHECK(cu.coeffs.row(60).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(cs.coeffs.row(60).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(conjugacy_error(d, u, cu, 128) < 1e-9);
  CHECK(conjugacy_error(d, u, cs, 128) < 1e-9);
}

TEST_CASE("charts survive a global rescaling of the table") {
  // scaling every coefficient leaves (theta, r) dynamics unchanged, so the
  // solver must reproduce the plain Table C results on the enlarged geometry
  TableSpec c = builtin_table("C");
  TableSpec big = c;
  for (auto* v : {&big.cos_x, &big.sin_x, &big.sin_y, &big.sin2_y})
    for (double& x : *v) x *= 3.5;
  CHECK(min_signed_curvature(big) > 0.0);

  ShootVector u0 = newton_periodic(c, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
  ShootVector u1 = newton_periodic(big, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
  EigenData e0 = multipliers_and_eigvecs(c, u0);
  EigenData e1 = multipliers_and_eigvecs(big, u1);
  CHECK(std::abs(e0.alpha - e1.alpha) < 1e-9);
  CHECK(std::abs(e0.beta - e1.beta) < 1e-9);

  SpectralChart chart = newton_parameterization(big, u1, e1, ChartKind::unstable, 0.2, 40);
  BilliardShootOracle oracle(big, u1);
  CHECK(psi_residual(oracle, chart).lpNorm<Eigen::Infinity>() < 1e-11);
}

TEST_CASE("newton input validation") {
  TableSpec b = builtin_table("B");
  ShootVector u = newton_periodic(b, ShootVector{{{0.5, 0.01}, {0.0, -0.01}}});
  EigenData eig = multipliers_and_eigvecs(b, u);
  CHECK_THROWS_AS(newton_parameterization(b, u, eig, ChartKind::stable, -1.0, 30),
                  std::invalid_argument);
  CHECK_THROWS_AS(newton_parameterization(b, u, eig, ChartKind::stable, 0.1, 2),
                  std::invalid_argument);
}

TEST_CASE("divergence at an excessive scale reports the largest converged one") {
  const auto& fx = TableBFixture::get();
  try {
    newton_parameterization(fx.spec, fx.orbit, fx.eig, ChartKind::unstable, 5.0, 16);
    FAIL("expected divergence");
  } catch (const SpectralNewtonError& e) {
    CHECK(std::string(e.what()).find("largest converged scale") != std::string::npos);
    CHECK(e.best_scale > 0.3);  // well below the requested 5.0
    CHECK(e.best_scale < 2.0);
  }
}

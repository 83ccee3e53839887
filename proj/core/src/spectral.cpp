#include "billiards/spectral.hpp"

#include <cmath>
#include <numbers>

namespace billiards {

namespace {

constexpr int kWarmupSteps = 16;

Eigen::VectorXcd horner(const Eigen::MatrixXd& coeffs, Complex sigma) {
  const int rows = static_cast<int>(coeffs.rows());
  const int d = static_cast<int>(coeffs.cols());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
  for (int i = 0; i < d; ++i) {
    Complex acc = 0.0;
    for (int n = rows - 1; n >= 0; --n) acc = acc * sigma + coeffs(n, i);
    out(i) = acc;
  }
  return out;
}

Eigen::VectorXd rate_powers(int N, double rate) {
  Eigen::VectorXd p(N + 1);
  double acc = 1.0;
  for (int n = 0; n <= N; ++n) {
    p(n) = acc;
    acc *= rate;
  }
  return p;
}

// Oracle evaluation at chart point for sigma, walking radially outward from
// sigma = 0 on the first visit of a continuation-backed node.
ShootMapOracle::Eval eval_node(ShootMapOracle& oracle, const Eigen::MatrixXd& coeffs,
                               Complex sigma, long key, bool want_df) {
  double rho_reached = 0.0;
  try {
    if (oracle.needs_continuation() && !oracle.visited(key)) {
      for (int step = 1; step < kWarmupSteps; ++step) {
        double rho = static_cast<double>(step) / kWarmupSteps;
        oracle.eval(key, horner(coeffs, rho * sigma), false);
        rho_reached = rho;
      }
    }
    return oracle.eval(key, horner(coeffs, sigma), want_df);
  } catch (const ContinuationError& e) {
    throw ContinuationError("node " + std::to_string(key) + " (radius reached " +
                                std::to_string(rho_reached) + "): " + e.what(),
                            e.depth);
  }
}

struct NodeSweep {
  std::vector<Eigen::VectorXcd> F;           // per node
  std::vector<std::vector<Mat2c>> df;        // per node, per input pair
};

// Evaluate the oracle on the full DFT grid, mirroring conjugate nodes.
NodeSweep sweep_grid(ShootMapOracle& oracle, const DFTGrid& grid, const Eigen::MatrixXd& coeffs,
                     bool want_df) {
  const int M = grid.order + 1;
  const int K = oracle.pairs();
  NodeSweep sweep;
  sweep.F.resize(M);
  if (want_df) sweep.df.resize(M);

  const int half = M / 2;  // nodes above `half` are conjugates of earlier ones
  for (int k = 0; k <= half; ++k) {
    auto ev = eval_node(oracle, coeffs, grid.nodes(k), k, want_df);
    sweep.F[k] = ev.F;
    if (want_df) sweep.df[k] = std::move(ev.df);
  }
  for (int k = half + 1; k < M; ++k) {
    int mate = M - k;
    sweep.F[k] = sweep.F[mate].conjugate();
    if (want_df) {
      sweep.df[k].resize(K);
      for (int j = 0; j < K; ++j) sweep.df[k][j] = sweep.df[mate][j].conjugate();
    }
  }
  return sweep;
}

Eigen::MatrixXd premultiplied(const Eigen::MatrixXd& coeffs, double rate) {
  Eigen::MatrixXd out = coeffs;
  double acc = 1.0;
  for (int n = 0; n < out.rows(); ++n) {
    out.row(n) *= acc;
    acc *= rate;
  }
  return out;
}

}  // namespace

PhasePoint SpectralChart::component_point(int j, double sigma) const {
  double th = 0.0, rr = 0.0;
  for (int n = static_cast<int>(coeffs.rows()) - 1; n >= 0; --n) {
    th = th * sigma + coeffs(n, 2 * j);
    rr = rr * sigma + coeffs(n, 2 * j + 1);
  }
  return PhasePoint{th, rr};
}

Eigen::VectorXcd SpectralChart::value(Complex sigma) const { return horner(coeffs, sigma); }

DFTGrid DFTGrid::make(int N) {
  DFTGrid g;
  g.order = N;
  const int M = N + 1;
  g.nodes.resize(M);
  g.V.resize(M, M);
  for (int k = 0; k < M; ++k) {
    double ang = 2.0 * std::numbers::pi * k / M;
    g.nodes(k) = Complex(std::cos(ang), std::sin(ang));
  }
  for (int k = 0; k < M; ++k)
    for (int n = 0; n < M; ++n) {
      double ang = 2.0 * std::numbers::pi * k * n / M;
      g.V(k, n) = Complex(std::cos(ang), std::sin(ang));
    }
  g.Vinv = g.V.adjoint() / static_cast<double>(M);
  return g;
}

BilliardShootOracle::BilliardShootOracle(const TableSpec& spec, const ShootVector& orbit)
    : spec_(spec), orbit_(orbit) {
  const int K = orbit_.period();
  seeds_.reserve(K);
  cache_.resize(K);
  for (int j = 0; j < K; ++j) {
    // align the image branch with the stored representative of the next point
    double ref = orbit_.points[(j + 1) % K].theta;
    seeds_.push_back(seed_from_real(spec_, orbit_.points[j], ref));
  }
}

ShootMapOracle::Eval BilliardShootOracle::eval_impl(long key, const Eigen::VectorXcd& z,
                                                    bool want_df) {
  const int K = pairs();
  Eval out;
  out.F.resize(2 * K);
  if (want_df) out.df.resize(K);

  for (int j = 0; j < K; ++j) {
    CPhasePoint target(z(2 * j), z(2 * j + 1));

    const GuessBundle* guess = nullptr;
    auto& cache = cache_[j];
    if (auto it = cache.find(key); it != cache.end()) {
      guess = &it->second;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [k2, b] : cache) {
        double dist = std::abs(b.at.theta - target.theta) + std::abs(b.at.r - target.r);
        if (dist < best) {
          best = dist;
          guess = &b;
        }
      }
      double seed_dist = std::abs(seeds_[j].at.theta - target.theta) +
                         std::abs(seeds_[j].at.r - target.r);
      if (!guess || seed_dist < best) guess = &seeds_[j];
    }

    CStepResult res = complex_step(spec_, target, *guess);
    int o = (j + 1) % K;
    out.F(2 * o) = res.next.theta;
    out.F(2 * o + 1) = res.next.r;
    if (want_df) out.df[j] = jacobian_df<Complex>(spec_, target.theta, target.r, res.bundle.aux);
    cache[key] = std::move(res.bundle);
  }
  return out;
}

ComposeResult dft_compose(ShootMapOracle& oracle, const Eigen::MatrixXd& coeffs,
                          std::optional<double> premultiply_rate) {
  const int N = static_cast<int>(coeffs.rows()) - 1;
  const int d = oracle.dim();
  if (coeffs.cols() != d) throw std::invalid_argument("chart dimension mismatch");
  DFTGrid grid = DFTGrid::make(N);

  Eigen::MatrixXd work = premultiply_rate ? premultiplied(coeffs, *premultiply_rate) : coeffs;
  NodeSweep sweep = sweep_grid(oracle, grid, work, false);

  Eigen::MatrixXcd values(N + 1, d);
  for (int k = 0; k <= N; ++k) values.row(k) = sweep.F[k].transpose();
  Eigen::MatrixXcd series = grid.Vinv * values;

  ComposeResult out;
  out.coeffs = series.real();
  out.max_imag = series.imag().cwiseAbs().maxCoeff();
  if (out.max_imag > 1e-8)
    throw std::runtime_error("composition lost realness (imaginary residue " +
                             std::to_string(out.max_imag) + ")");
  return out;
}

Eigen::MatrixXd cauchy_conv_mat(const Eigen::VectorXd& a) {
  const int m = static_cast<int>(a.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) M(i, j) = a(i - j);
  return M;
}

namespace {

// Shared assembly for psi_residual / psi_system.
struct PsiBuild {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
  double max_imag = 0.0;
};

PsiBuild build_psi(ShootMapOracle& oracle, const SpectralChart& chart, bool want_jacobian) {
  const int N = chart.trunc;
  const int d = oracle.dim();
  const int K = oracle.pairs();
  const int nunk = d * (N + 1);
  if (chart.coeffs.rows() != N + 1 || chart.coeffs.cols() != d)
    throw std::invalid_argument("chart dimensions inconsistent with oracle");

  DFTGrid grid = DFTGrid::make(N);
  const bool unstable = chart.kind == ChartKind::unstable;
  Eigen::MatrixXd arg = unstable ? premultiplied(chart.coeffs, chart.rate) : chart.coeffs;

  NodeSweep sweep = sweep_grid(oracle, grid, arg, want_jacobian);

  Eigen::MatrixXcd values(N + 1, d);
  for (int k = 0; k <= N; ++k) values.row(k) = sweep.F[k].transpose();
  Eigen::MatrixXcd series = grid.Vinv * values;
  Eigen::MatrixXd composed = series.real();
  double max_imag = series.imag().cwiseAbs().maxCoeff();
  if (max_imag > 1e-8)
    throw std::runtime_error("composition lost realness (imaginary residue " +
                             std::to_string(max_imag) + ")");

  Eigen::VectorXd rp = rate_powers(N, chart.rate);

  PsiBuild out;
  out.residual.resize(1 + nunk);
  double norm1 = 0.0;
  for (int i = 0; i < d; ++i) norm1 += chart.coeffs(1, i) * chart.coeffs(1, i);
  out.residual(0) = norm1 - chart.scale * chart.scale;  // ||P'(0)||^2 = scale^2
  for (int i = 0; i < d; ++i)
    for (int n = 0; n <= N; ++n) {
      double lhs = composed(n, i);
      double rhs = unstable ? chart.coeffs(n, i) : rp(n) * chart.coeffs(n, i);
      out.residual(1 + i * (N + 1) + n) = lhs - rhs;
    }
  out.max_imag = max_imag;
  if (!want_jacobian) return out;

  // convolution blocks of DF along the chart
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nunk, nunk);
  for (int o = 0; o < K; ++o) {
    int src = (o + K - 1) % K;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Eigen::VectorXcd node_vals(N + 1);
        for (int k = 0; k <= N; ++k) node_vals(k) = sweep.df[k][src](a, b);
        Eigen::VectorXcd entry_series = grid.Vinv * node_vals;
        out.max_imag = std::max(out.max_imag, entry_series.imag().cwiseAbs().maxCoeff());
        Eigen::MatrixXd conv = cauchy_conv_mat(entry_series.real());
        B.block((2 * o + a) * (N + 1), (2 * src + b) * (N + 1), N + 1, N + 1) = conv;
      }
  }

  // d/drate of the premultiplied coefficients: n p_n rate^{n-1}
  Eigen::VectorXd c_rate(nunk);
  for (int i = 0; i < d; ++i) {
    c_rate(i * (N + 1)) = 0.0;
    for (int n = 1; n <= N; ++n)
      c_rate(i * (N + 1) + n) = n * chart.coeffs(n, i) * (n == 1 ? 1.0 : rp(n - 1));
  }

  out.jacobian = Eigen::MatrixXd::Zero(1 + nunk, 1 + nunk);
  for (int i = 0; i < d; ++i) out.jacobian(0, 1 + i * (N + 1) + 1) = 2.0 * chart.coeffs(1, i);

  if (!unstable) {
    out.jacobian.block(1, 0, nunk, 1) = -c_rate;
    out.jacobian.block(1, 1, nunk, nunk) = B;
    for (int i = 0; i < d; ++i)
      for (int n = 0; n <= N; ++n) {
        int idx = i * (N + 1) + n;
        out.jacobian(1 + idx, 1 + idx) -= rp(n);
      }
  } else {
    out.jacobian.block(1, 0, nunk, 1) = B * c_rate;
    Eigen::MatrixXd BL = B;
    for (int i = 0; i < d; ++i)
      for (int n = 0; n <= N; ++n) BL.col(i * (N + 1) + n) *= rp(n);
    out.jacobian.block(1, 1, nunk, nunk) = BL - Eigen::MatrixXd::Identity(nunk, nunk);
  }
  return out;
}

}  // namespace

Eigen::VectorXd psi_residual(ShootMapOracle& oracle, const SpectralChart& chart) {
  return build_psi(oracle, chart, false).residual;
}

PsiSystem psi_system(ShootMapOracle& oracle, const SpectralChart& chart) {
  PsiBuild b = build_psi(oracle, chart, true);
  return PsiSystem{std::move(b.residual), std::move(b.jacobian), b.max_imag};
}

namespace {

// Newton on (rate, coefficients) starting from the given chart.
SpectralChart newton_from_seed(const TableSpec& spec, const ShootVector& orbit,
                               SpectralChart chart, const NewtonParameterizationOptions& opts) {
  const int N = chart.trunc;
  const int d = static_cast<int>(chart.coeffs.cols());
  BilliardShootOracle oracle(spec, orbit);

  double best = std::numeric_limits<double>::infinity();
  int grew = 0;
  for (int it = 0; it < opts.max_iter; ++it) {
    PsiSystem sys = psi_system(oracle, chart);
    double rnorm = sys.residual.lpNorm<Eigen::Infinity>();
    if (rnorm < opts.tol) return chart;
    if (rnorm < best) {
      best = rnorm;
      grew = 0;
    } else if (++grew >= 3) {
      throw SpectralNewtonError(
          "chart Newton stalled; consider a smaller scale (best residual " +
              std::to_string(best) + ")",
          best);
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.jacobian);
    Eigen::VectorXd delta = lu.solve(-sys.residual);
    chart.rate += delta(0);
    for (int i = 0; i < d; ++i)
      for (int n = 0; n <= N; ++n) chart.coeffs(n, i) += delta(1 + i * (N + 1) + n);
    if (!(chart.rate > 0.0 && chart.rate < 1.0))
      throw SpectralNewtonError("conjugacy rate left (0,1); consider a smaller scale", best);
  }

  PsiSystem sys = psi_system(oracle, chart);
  if (sys.residual.lpNorm<Eigen::Infinity>() < opts.tol) return chart;
  throw SpectralNewtonError("chart Newton did not reach tolerance (best residual " +
                                std::to_string(best) + "); consider a smaller scale",
                            best);
}

SpectralChart linear_seed(const ShootVector& orbit, const EigenData& eig, ChartKind kind,
                          double scale, int N) {
  const int K = orbit.period();
  SpectralChart chart;
  chart.kind = kind;
  chart.rate = kind == ChartKind::stable ? eig.lambda : eig.mu;
  chart.scale = scale;
  chart.trunc = N;
  chart.coeffs = Eigen::MatrixXd::Zero(N + 1, 2 * K);
  for (int j = 0; j < K; ++j) {
    chart.coeffs(0, 2 * j) = orbit.points[j].theta;
    chart.coeffs(0, 2 * j + 1) = orbit.points[j].r;
  }
  const Eigen::VectorXd& dir = kind == ChartKind::stable ? eig.dfvec_s : eig.dfvec_u;
  chart.coeffs.row(1) = (scale / dir.norm()) * dir.transpose();
  return chart;
}

// The chart family is unique up to the eigenvector length, so a converged
// chart rescales exactly: p_n -> c^n p_n scales ||P'(0)|| by c.
SpectralChart rescaled(const SpectralChart& chart, double new_scale) {
  SpectralChart out = chart;
  out.scale = new_scale;
  double c = new_scale / chart.scale;
  double acc = 1.0;
  for (int n = 0; n < out.coeffs.rows(); ++n) {
    out.coeffs.row(n) *= acc;
    acc *= c;
  }
  return out;
}

}  // namespace

SpectralChart newton_parameterization(const TableSpec& spec, const ShootVector& orbit,
                                      const EigenData& eig, ChartKind kind, double scale, int N,
                                      const NewtonParameterizationOptions& opts) {
  if (scale <= 0.0) throw std::invalid_argument("scale must be positive");
  if (N < 4) throw std::invalid_argument("truncation order must be >= 4");

  try {
    return newton_from_seed(spec, orbit, linear_seed(orbit, eig, kind, scale, N), opts);
  } catch (const std::exception&) {
    // The linear seed can leave the domain where the map continues (the seed
    // overshoots the manifold at large eigenvector scalings). Converge at a
    // smaller scale first, then walk the scale up by rescaling the converged
    // chart, which tracks the manifold itself.
  }

  double s_lo = scale;
  SpectralChart chart;
  bool have = false;
  for (int halvings = 0; halvings < 7 && !have; ++halvings) {
    s_lo *= 0.5;
    try {
      chart = newton_from_seed(spec, orbit, linear_seed(orbit, eig, kind, s_lo, N), opts);
      have = true;
    } catch (const std::exception&) {
    }
  }
  if (!have)
    throw SpectralNewtonError(
        "chart Newton failed even at a fraction of the requested scale; reduce the scale", -1.0);

  while (chart.scale < scale) {
    double s_next = std::min(scale, chart.scale * 1.2);
    try {
      chart = newton_from_seed(spec, orbit, rescaled(chart, s_next), opts);
    } catch (const std::exception& e) {
      double best = -1.0;
      if (const auto* sn = dynamic_cast<const SpectralNewtonError*>(&e))
        best = sn->best_residual;
      throw SpectralNewtonError(std::string(e.what()) + " (largest converged scale " +
                                    std::to_string(chart.scale) + ")",
                                best, chart.scale);
    }
  }
  return chart;
}

double conjugacy_error(const TableSpec& spec, const ShootVector& orbit, const SpectralChart& chart,
                       int M) {
  if (M < chart.trunc) throw std::invalid_argument("conjugacy check needs M >= N");
  BilliardShootOracle oracle(spec, orbit);
  const bool unstable = chart.kind == ChartKind::unstable;

  double err = 0.0;
  const int nodes = M + 1;
  const int half = nodes / 2;  // defect magnitudes mirror under conjugation
  for (int m = 0; m <= half; ++m) {
    double ang = 2.0 * std::numbers::pi * m / nodes;
    Complex sigma(std::cos(ang), std::sin(ang));
    Complex arg_in = unstable ? chart.rate * sigma : sigma;
    Complex arg_out = unstable ? sigma : chart.rate * sigma;

    auto ev = eval_node(oracle, chart.coeffs, arg_in, m, false);
    Eigen::VectorXcd rhs = chart.value(arg_out);
    err = std::max(err, (ev.F - rhs).norm());
  }
  return err;
}

std::vector<std::pair<int, double>> coeff_decay_report(const SpectralChart& chart) {
  std::vector<std::pair<int, double>> out;
  out.reserve(chart.coeffs.rows());
  for (int n = 0; n < chart.coeffs.rows(); ++n) {
    double norm = chart.coeffs.row(n).cwiseAbs().maxCoeff();
    out.emplace_back(n, std::log10(std::max(norm, 1e-300)));
  }
  return out;
}

}  // namespace billiards

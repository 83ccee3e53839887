#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "billiards/complex_map.hpp"
#include "billiards/periodic.hpp"
#include "billiards/phase.hpp"
#include "billiards/table.hpp"

namespace billiards {

enum class ChartKind { stable, unstable };

/// Truncated power-series chart P^N(sigma) = sum_n p_n sigma^n of a local
/// stable or unstable manifold of a period-K orbit, satisfying
///   F(P(sigma)) = P(lambda sigma)        (stable, rate = lambda)
///   F(P(mu sigma)) = P(sigma)            (unstable, rate = mu)
/// for the cyclic shooting map F. Coefficients are real; row n of `coeffs`
/// holds p_n across the d = 2K components (theta_1, r_1, theta_2, r_2, ...).
struct SpectralChart {
  ChartKind kind = ChartKind::stable;
  double rate = 0.0;   // in (0, 1)
  double scale = 0.0;  // eigenvector length: ||p_1|| = scale
  int trunc = 0;       // N
  Eigen::MatrixXd coeffs;  // (N+1) x 2K

  int period() const { return static_cast<int>(coeffs.cols()) / 2; }

  /// P_j(sigma) for orbit component j (0-based), real sigma.
  PhasePoint component_point(int j, double sigma) const;

  /// P(sigma) for complex sigma, all components.
  Eigen::VectorXcd value(Complex sigma) const;
};

/// Equidistributed interpolation nodes on the unit circle with the DFT
/// matrix pair V, V^{-1}.
struct DFTGrid {
  int order = 0;  // N; N+1 nodes
  Eigen::VectorXcd nodes;
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd Vinv;

  static DFTGrid make(int N);
};

/// Map oracle used for compositions: evaluates the (complexified) cyclic
/// shooting map at interpolation points. Keys identify nodes so that
/// implementations can cache continuation state per node.
class ShootMapOracle {
 public:
  virtual ~ShootMapOracle() = default;

  struct Eval {
    Eigen::VectorXcd F;        // map value, length 2K
    std::vector<Mat2c> df;     // Df at input pair j (when requested)
  };

  virtual int pairs() const = 0;  // K
  int dim() const { return 2 * pairs(); }

  /// True when node evaluation requires continuation warm-up from sigma = 0.
  virtual bool needs_continuation() const { return false; }

  Eval eval(long key, const Eigen::VectorXcd& z, bool want_df) {
    visited_.insert(key);
    return eval_impl(key, z, want_df);
  }
  bool visited(long key) const { return visited_.count(key) != 0; }

 protected:
  virtual Eval eval_impl(long key, const Eigen::VectorXcd& z, bool want_df) = 0;

 private:
  std::set<long> visited_;
};

/// Oracle backed by the analytically continued billiard map. Per-node,
/// per-component guess bundles are cached; cold nodes are continued
/// radially outward from sigma = 0 where the real periodic orbit seeds
/// the solves.
class BilliardShootOracle : public ShootMapOracle {
 public:
  BilliardShootOracle(const TableSpec& spec, const ShootVector& orbit);

  int pairs() const override { return static_cast<int>(orbit_.points.size()); }
  bool needs_continuation() const override { return true; }

 protected:
  Eval eval_impl(long key, const Eigen::VectorXcd& z, bool want_df) override;

 private:
  TableSpec spec_;
  ShootVector orbit_;
  std::vector<GuessBundle> seeds_;                    // sigma = 0 bundles per pair
  std::vector<std::map<long, GuessBundle>> cache_;    // per pair, per node key
};

struct ComposeResult {
  Eigen::MatrixXd coeffs;  // (N+1) x d
  double max_imag = 0.0;   // largest imaginary residue dropped by the inverse DFT
};

/// Series coefficients of F composed with the chart, via forward DFT of the
/// chart, the map oracle at the nodes, and the inverse DFT. When
/// premultiply_rate is given the composition argument is P(rate * sigma).
ComposeResult dft_compose(ShootMapOracle& oracle, const Eigen::MatrixXd& coeffs,
                          std::optional<double> premultiply_rate = std::nullopt);

/// Lower-triangular Toeplitz matrix of the Cauchy product with a.
Eigen::MatrixXd cauchy_conv_mat(const Eigen::VectorXd& a);

/// Residual of the truncated conjugacy system; layout (scale row; component-
/// major coefficient rows).
Eigen::VectorXd psi_residual(ShootMapOracle& oracle, const SpectralChart& chart);

struct PsiSystem {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;  // unknowns ordered (rate; coefficients)
  double max_imag = 0.0;
};

/// Residual and Jacobian in one node sweep.
PsiSystem psi_system(ShootMapOracle& oracle, const SpectralChart& chart);

struct SpectralNewtonError : std::runtime_error {
  SpectralNewtonError(const std::string& what, double best_residual_, double best_scale_ = -1.0)
      : std::runtime_error(what), best_residual(best_residual_), best_scale(best_scale_) {}
  double best_residual;  // smallest residual reached before giving up
  double best_scale;     // largest scale that converged, -1 when none did
};

struct NewtonParameterizationOptions {
  double tol = 1e-11;
  int max_iter = 25;
};

/// Solve the conjugacy equations for the chart of the given kind, seeding
/// with the linear eigenvector chart and solving for (rate, coefficients)
/// simultaneously. Throws SpectralNewtonError on divergence (a smaller scale
/// usually helps).
SpectralChart newton_parameterization(const TableSpec& spec, const ShootVector& orbit,
                                      const EigenData& eig, ChartKind kind, double scale, int N,
                                      const NewtonParameterizationOptions& opts = {});

/// A-posteriori sup-norm defect of the conjugacy relation, sampled at M+1
/// points on the unit circle.
double conjugacy_error(const TableSpec& spec, const ShootVector& orbit, const SpectralChart& chart,
                       int M);

/// Per-mode infinity norms: (n, log10 max_i |p_n^i|).
std::vector<std::pair<int, double>> coeff_decay_report(const SpectralChart& chart);

}  // namespace billiards

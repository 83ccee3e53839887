#include "billiards/globalize.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "billiards/real_map.hpp"

namespace billiards {

std::vector<double> fundamental_domain_sigmas(const SpectralChart& chart, int J) {
  if (J < 2) throw std::invalid_argument("fundamental domain needs J >= 2 samples");
  double tail = chart.coeffs.row(chart.trunc).cwiseAbs().maxCoeff();
  if (tail > 1e-8)
    throw std::runtime_error(
        "chart tail too large for globalization; increase the order or reduce the scale");

  const int K = chart.period();
  double lo = std::pow(chart.rate, K);
  std::vector<double> sigmas(J);
  for (int i = 0; i < J; ++i) {
    double t = static_cast<double>(i) / (J - 1);
    sigmas[i] = std::pow(lo, 1.0 - t);  // log spacing from rate^K to 1
  }
  return sigmas;
}

std::vector<ManifoldCurve> fundamental_domain_points(const SpectralChart& chart, int J) {
  std::vector<double> sigmas = fundamental_domain_sigmas(chart, J);
  const int K = chart.period();

  std::vector<ManifoldCurve> curves;
  curves.reserve(2 * K);
  for (int j = 0; j < K; ++j) {
    for (int sign : {+1, -1}) {
      ManifoldCurve c;
      c.component = j;
      c.sign = sign;
      c.kind = chart.kind;
      c.samples.reserve(sigmas.size());
      for (double s : sigmas) {
        double sigma = sign * s;
        PhasePoint p = chart.component_point(j, sigma);
        p.theta = wrap_unit(p.theta);
        c.samples.push_back(ManifoldSample{0, sigma, p});
      }
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

namespace {

// Iterate every strand of one branch; strand i of iterate n lands in row n
// of a dense grid, compacted afterwards so truncated strands leave no holes.
void grow_curve(const TableSpec& spec, bool forward, int M, ManifoldCurve& curve) {
  const std::size_t base = curve.samples.size();
  std::vector<ManifoldSample> grid(base * M);
  std::vector<int> reached(base, 0);

  for (std::size_t i = 0; i < base; ++i) {
    PhasePoint head = curve.samples[i].point;
    std::optional<Vec2d> vprev;
    for (int n = 1; n <= M; ++n) {
      try {
        if (forward) {
          StepResult s = billiard_step(spec, head, vprev);
          head = s.next;
          vprev = s.aux.v;
        } else {
          // inverse step through the reversal; carry the reversed direction
          StepResult s = billiard_step(spec, reverse(head), vprev);
          head = reverse(s.next);
          vprev = s.aux.v;
        }
      } catch (const std::exception&) {
        break;  // strand truncated
      }
      grid[(n - 1) * base + i] = ManifoldSample{n, curve.samples[i].sigma, head};
      reached[i] = n;
    }
  }

  for (int n = 1; n <= M; ++n)
    for (std::size_t i = 0; i < base; ++i)
      if (reached[i] >= n) curve.samples.push_back(grid[(n - 1) * base + i]);
}

}  // namespace

std::vector<ManifoldCurve> grow_manifolds(const TableSpec& spec, const SpectralChart& chart, int J,
                                          int M, int threads) {
  if (M < 0) throw std::invalid_argument("iterate count must be >= 0");
  std::vector<ManifoldCurve> curves = fundamental_domain_points(chart, J);
  if (M == 0) return curves;
  const bool forward = chart.kind == ChartKind::unstable;

  unsigned hw = std::thread::hardware_concurrency();
  std::size_t nthreads = threads > 0 ? static_cast<std::size_t>(threads) : (hw ? hw : 1);
  nthreads = std::min(nthreads, curves.size());

  if (nthreads <= 1) {
    for (ManifoldCurve& curve : curves) grow_curve(spec, forward, M, curve);
    return curves;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < curves.size(); i = next.fetch_add(1))
      grow_curve(spec, forward, M, curves[i]);
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return curves;
}

}  // namespace billiards

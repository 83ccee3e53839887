#pragma once

#include <vector>

#include "billiards/phase.hpp"
#include "billiards/spectral.hpp"
#include "billiards/table.hpp"

namespace billiards {

struct ManifoldSample {
  int iterate = 0;     // n in f^{+-n}
  double sigma = 0.0;  // source chart parameter (signed)
  PhasePoint point;    // theta reduced mod 1
};

/// One manifold strand: all iterates of the fundamental-domain samples of a
/// single (component, sign) branch of a chart.
struct ManifoldCurve {
  int component = 0;  // orbit point index j
  int sign = +1;      // branch sigma > 0 or sigma < 0
  ChartKind kind = ChartKind::unstable;
  std::vector<ManifoldSample> samples;  // ordered by (iterate, sigma)
};

/// Fundamental-domain parameters: J logarithmically spaced sigma values on
/// [rate^K, 1], so that one application of f^{+-K} maps the segment onto the
/// adjacent one. Throws std::runtime_error when the chart tail exceeds 1e-8.
std::vector<double> fundamental_domain_sigmas(const SpectralChart& chart, int J);

/// Chart images of the fundamental domain: per component and sign, the points
/// P_j(+-sigma_i).
std::vector<ManifoldCurve> fundamental_domain_points(const SpectralChart& chart, int J);

/// Grow the local chart into a global manifold: forward images for unstable
/// charts, inverse images for stable ones, for iterates 0..M. Step failures
/// truncate the affected strand. Strands are independent and grown on worker
/// threads (0 = all cores); the output is deterministic either way.
std::vector<ManifoldCurve> grow_manifolds(const TableSpec& spec, const SpectralChart& chart, int J,
                                          int M, int threads = 0);

}  // namespace billiards

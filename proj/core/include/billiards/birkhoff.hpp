#pragma once

#include <optional>
#include <span>
#include <vector>

#include "billiards/phase.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// Weighted Birkhoff average of a sampled observable: the bump weight
/// w(t) = exp(-1/(t(1-t))) on (0,1) with w(0) = w(1) = 0 accelerates
/// convergence to super-polynomial order on regular orbits.
double weighted_birkhoff_average(std::span<const double> values);

struct ClassifiedPoint {
  PhasePoint seed;
  std::optional<double> frequency;  // rotation number in (0,1), regular orbits only
  bool chaotic = false;
  double wba_gap = 0.0;  // |first-half average - second-half average|
  bool ok = true;        // false when the orbit could not be iterated
};

inline constexpr double kDefaultChaosGap = 1e-6;

/// Iterate n steps and compare the weighted averages of the two orbit halves;
/// a gap above the threshold marks the orbit chaotic, otherwise the full
/// average gives the frequency.
ClassifiedPoint classify_orbit(const TableSpec& spec, const PhasePoint& p0, int n = 1000,
                               double chaos_gap = kDefaultChaosGap);

/// Classify every seed. Seeds are processed independently (optionally on
/// several threads); the output order always matches the input order.
std::vector<ClassifiedPoint> phase_portrait_scan(const TableSpec& spec,
                                                 const std::vector<PhasePoint>& seeds,
                                                 int n_per_orbit = 1000,
                                                 double chaos_gap = kDefaultChaosGap,
                                                 int threads = 0);

}  // namespace billiards

#include "billiards/birkhoff.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "billiards/real_map.hpp"

namespace billiards {

namespace {

double bump(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(-1.0 / (t * (1.0 - t)));
}

}  // namespace

double weighted_birkhoff_average(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("weighted average needs at least 2 samples");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double w = bump(static_cast<double>(k) / static_cast<double>(n));
    num += w * values[k];
    den += w;
  }
  return num / den;
}

ClassifiedPoint classify_orbit(const TableSpec& spec, const PhasePoint& p0, int n,
                               double chaos_gap) {
  ClassifiedPoint out;
  out.seed = p0;
  Orbit orb;
  try {
    orb = orbit(spec, p0, n);
  } catch (const std::exception&) {
    out.ok = false;
    return out;
  }

  std::span<const double> dtheta(orb.dtheta);
  const std::size_t half = dtheta.size() / 2;
  double first = weighted_birkhoff_average(dtheta.subspan(0, half));
  double second = weighted_birkhoff_average(dtheta.subspan(half));
  out.wba_gap = std::abs(first - second);
  out.chaotic = out.wba_gap > chaos_gap;
  if (!out.chaotic) out.frequency = weighted_birkhoff_average(dtheta);
  return out;
}

std::vector<ClassifiedPoint> phase_portrait_scan(const TableSpec& spec,
                                                 const std::vector<PhasePoint>& seeds,
                                                 int n_per_orbit, double chaos_gap, int threads) {
  if (seeds.empty()) throw std::invalid_argument("scan needs at least one seed");
  std::vector<ClassifiedPoint> out(seeds.size());

  unsigned hw = std::thread::hardware_concurrency();
  std::size_t nthreads = threads > 0 ? static_cast<std::size_t>(threads) : (hw ? hw : 1);
  nthreads = std::min(nthreads, seeds.size());

  if (nthreads <= 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i)
      out[i] = classify_orbit(spec, seeds[i], n_per_orbit, chaos_gap);
    return out;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1))
      out[i] = classify_orbit(spec, seeds[i], n_per_orbit, chaos_gap);
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace billiards

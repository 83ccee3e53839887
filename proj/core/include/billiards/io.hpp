#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "billiards/birkhoff.hpp"
#include "billiards/globalize.hpp"
#include "billiards/periodic.hpp"
#include "billiards/real_map.hpp"
#include "billiards/spectral.hpp"
#include "billiards/table.hpp"

namespace billiards {

/// '#'-prefixed metadata lines written at the top of every CSV artifact.
using CsvMeta = std::vector<std::pair<std::string, std::string>>;

void write_orbit_csv(const std::string& path, const CsvMeta& meta, const PhasePoint& seed,
                     const Orbit& orbit);

void write_scan_csv(const std::string& path, const CsvMeta& meta,
                    const std::vector<ClassifiedPoint>& points);

void write_manifold_csv(const std::string& path, const CsvMeta& meta,
                        const std::vector<ManifoldCurve>& curves);

/// Periodic-orbit artifact: the orbit, its Floquet data, and the table it
/// belongs to (embedded so downstream commands can rebuild the map).
struct OrbitArtifact {
  TableSpec table;
  ShootVector orbit;
  EigenData eig;
  double residual = 0.0;
};

void write_orbit_json(const std::string& path, const OrbitArtifact& art);
OrbitArtifact read_orbit_json(const std::string& path);

/// Manifold-chart artifact; self-contained input for globalization.
struct ChartArtifact {
  TableSpec table;
  ShootVector orbit;
  SpectralChart chart;
  double conjugacy_err = 0.0;
};

void write_chart_json(const std::string& path, const ChartArtifact& art);
ChartArtifact read_chart_json(const std::string& path);

/// Emit a standalone matplotlib script that renders the given CSV artifacts:
/// a frequency-colored phase portrait with gray chaotic seeds, optionally
/// overlaid with red/blue manifold strands.
void emit_plot_script(const std::string& path, const std::optional<std::string>& scan_csv,
                      const std::optional<std::string>& manifold_csv);

}  // namespace billiards

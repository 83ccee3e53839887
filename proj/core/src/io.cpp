#include "billiards/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "billiards/version.hpp"

namespace billiards {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

void write_meta(std::ofstream& out, const CsvMeta& meta) {
  out << "# version = " << kVersion << "\n";
  for (const auto& [k, v] : meta) out << "# " << k << " = " << v << "\n";
}

json table_to_json(const TableSpec& t) {
  return json{{"ax", t.cos_x}, {"bx", t.sin_x}, {"ay", t.sin2_y}, {"by", t.sin_y}};
}

TableSpec table_from_json(const json& j) {
  TableSpec t;
  t.cos_x = j.at("ax").get<std::vector<double>>();
  t.sin_x = j.at("bx").get<std::vector<double>>();
  t.sin2_y = j.at("ay").get<std::vector<double>>();
  t.sin_y = j.at("by").get<std::vector<double>>();
  return t;
}

json points_to_json(const std::vector<PhasePoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back({p.theta, p.r});
  return arr;
}

std::vector<PhasePoint> points_from_json(const json& arr) {
  std::vector<PhasePoint> pts;
  for (const auto& e : arr) pts.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return pts;
}

json vec2list_to_json(const std::vector<Vec2d>& vs) {
  json arr = json::array();
  for (const auto& v : vs) arr.push_back({v(0), v(1)});
  return arr;
}

std::vector<Vec2d> vec2list_from_json(const json& arr) {
  std::vector<Vec2d> vs;
  for (const auto& e : arr) vs.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  return vs;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

void write_orbit_csv(const std::string& path, const CsvMeta& meta, const PhasePoint& seed,
                     const Orbit& orbit) {
  std::ofstream out = open_out(path);
  write_meta(out, meta);
  out << "step,theta,r,s\n";
  out << "0," << fmt(seed.theta) << "," << fmt(seed.r) << ",\n";
  for (std::size_t i = 0; i < orbit.points.size(); ++i)
    out << (i + 1) << "," << fmt(orbit.points[i].theta) << "," << fmt(orbit.points[i].r) << ","
        << fmt(orbit.chord[i]) << "\n";
}

void write_scan_csv(const std::string& path, const CsvMeta& meta,
                    const std::vector<ClassifiedPoint>& points) {
  std::ofstream out = open_out(path);
  write_meta(out, meta);
  out << "theta0,r0,frequency,chaotic,gap\n";
  for (const auto& c : points) {
    out << fmt(c.seed.theta) << "," << fmt(c.seed.r) << ",";
    if (!c.ok)
      out << "nan,-1,nan";
    else
      out << (c.frequency ? fmt(*c.frequency) : "nan") << "," << (c.chaotic ? 1 : 0) << ","
          << fmt(c.wba_gap);
    out << "\n";
  }
}

void write_manifold_csv(const std::string& path, const CsvMeta& meta,
                        const std::vector<ManifoldCurve>& curves) {
  std::ofstream out = open_out(path);
  write_meta(out, meta);
  out << "branch,iterate,sigma,theta,r\n";
  for (const auto& c : curves) {
    std::string branch = std::string(c.kind == ChartKind::stable ? "s" : "u") +
                         (c.sign > 0 ? "+" : "-") + std::to_string(c.component);
    for (const auto& s : c.samples)
      out << branch << "," << s.iterate << "," << fmt(s.sigma) << "," << fmt(s.point.theta) << ","
          << fmt(s.point.r) << "\n";
  }
}

void write_orbit_json(const std::string& path, const OrbitArtifact& art) {
  json j;
  j["version"] = kVersion;
  j["table"] = table_to_json(art.table);
  j["period"] = art.orbit.period();
  j["points"] = points_to_json(art.orbit.points);
  j["residual"] = art.residual;
  j["multipliers"] = {{"alpha", art.eig.alpha},
                      {"beta", art.eig.beta},
                      {"lambda", art.eig.lambda},
                      {"mu", art.eig.mu}};
  j["eigenvectors"] = {{"stable", vec2list_to_json(art.eig.xi_s)},
                       {"unstable", vec2list_to_json(art.eig.xi_u)}};
  std::vector<double> vs(art.eig.dfvec_s.data(), art.eig.dfvec_s.data() + art.eig.dfvec_s.size());
  std::vector<double> vu(art.eig.dfvec_u.data(), art.eig.dfvec_u.data() + art.eig.dfvec_u.size());
  j["shooting_eigenvectors"] = {{"stable", vs}, {"unstable", vu}};
  open_out(path) << j.dump(2) << "\n";
}

OrbitArtifact read_orbit_json(const std::string& path) {
  json j = read_json_file(path);
  OrbitArtifact art;
  art.table = table_from_json(j.at("table"));
  art.orbit.points = points_from_json(j.at("points"));
  art.residual = j.at("residual").get<double>();
  const json& m = j.at("multipliers");
  art.eig.alpha = m.at("alpha").get<double>();
  art.eig.beta = m.at("beta").get<double>();
  art.eig.lambda = m.at("lambda").get<double>();
  art.eig.mu = m.at("mu").get<double>();
  art.eig.xi_s = vec2list_from_json(j.at("eigenvectors").at("stable"));
  art.eig.xi_u = vec2list_from_json(j.at("eigenvectors").at("unstable"));
  auto vs = j.at("shooting_eigenvectors").at("stable").get<std::vector<double>>();
  auto vu = j.at("shooting_eigenvectors").at("unstable").get<std::vector<double>>();
  art.eig.dfvec_s = Eigen::Map<Eigen::VectorXd>(vs.data(), vs.size());
  art.eig.dfvec_u = Eigen::Map<Eigen::VectorXd>(vu.data(), vu.size());
  return art;
}

void write_chart_json(const std::string& path, const ChartArtifact& art) {
  json j;
  j["version"] = kVersion;
  j["table"] = table_to_json(art.table);
  j["kind"] = art.chart.kind == ChartKind::stable ? "stable" : "unstable";
  j["rate"] = art.chart.rate;
  j["scale"] = art.chart.scale;
  j["order"] = art.chart.trunc;
  j["period"] = art.chart.period();
  j["points"] = points_to_json(art.orbit.points);
  j["conjugacy_error"] = art.conjugacy_err;

  json coeffs = json::array();
  for (int i = 0; i < art.chart.coeffs.cols(); ++i) {
    std::vector<double> col(art.chart.coeffs.rows());
    for (int n = 0; n < art.chart.coeffs.rows(); ++n) col[n] = art.chart.coeffs(n, i);
    coeffs.push_back(col);
  }
  j["coefficients"] = coeffs;

  json decay = json::array();
  for (auto [n, lg] : coeff_decay_report(art.chart)) decay.push_back({n, lg});
  j["decay"] = decay;
  open_out(path) << j.dump(2) << "\n";
}

ChartArtifact read_chart_json(const std::string& path) {
  json j = read_json_file(path);
  ChartArtifact art;
  art.table = table_from_json(j.at("table"));
  art.orbit.points = points_from_json(j.at("points"));
  art.chart.kind = j.at("kind").get<std::string>() == "stable" ? ChartKind::stable
                                                               : ChartKind::unstable;
  art.chart.rate = j.at("rate").get<double>();
  art.chart.scale = j.at("scale").get<double>();
  art.chart.trunc = j.at("order").get<int>();
  art.conjugacy_err = j.at("conjugacy_error").get<double>();
  const json& coeffs = j.at("coefficients");
  const int d = static_cast<int>(coeffs.size());
  art.chart.coeffs.resize(art.chart.trunc + 1, d);
  for (int i = 0; i < d; ++i) {
    auto col = coeffs[i].get<std::vector<double>>();
    if (static_cast<int>(col.size()) != art.chart.trunc + 1)
      throw std::runtime_error("chart file: coefficient block length mismatch");
    for (int n = 0; n <= art.chart.trunc; ++n) art.chart.coeffs(n, i) = col[n];
  }
  return art;
}

namespace {

// the emitted script only understands our column layout; fail fast otherwise
void require_columns(const std::string& path, const std::string& columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("plot script input missing: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    if (line.find(columns) == std::string::npos)
      throw std::runtime_error("plot script input " + path + " lacks columns " + columns);
    return;
  }
  throw std::runtime_error("plot script input is empty: " + path);
}

}  // namespace

void emit_plot_script(const std::string& path, const std::optional<std::string>& scan_csv,
                      const std::optional<std::string>& manifold_csv) {
  if (scan_csv) require_columns(*scan_csv, "theta0,r0,frequency,chaotic,gap");
  if (manifold_csv) require_columns(*manifold_csv, "branch,iterate,sigma,theta,r");
  std::ofstream out = open_out(path);
  out << "#!/usr/bin/env python3\n";
  out << "# Phase-portrait rendering for the CSV artifacts named below.\n";
  out << "import csv\n";
  out << "import matplotlib.pyplot as plt\n\n";
  out << "fig, ax = plt.subplots(figsize=(8, 6))\n\n";

  if (scan_csv) {
    out << "scan_path = \"" << *scan_csv << "\"\n";
    out << "theta, r, freq = [], [], []\n";
    out << "gray_theta, gray_r = [], []\n";
    out << "with open(scan_path) as fh:\n";
    out << "    rows = csv.DictReader(row for row in fh if not row.startswith('#'))\n";
    out << "    for row in rows:\n";
    out << "        if row['chaotic'] == '1':\n";
    out << "            gray_theta.append(float(row['theta0']))\n";
    out << "            gray_r.append(float(row['r0']))\n";
    out << "        elif row['chaotic'] == '0':\n";
    out << "            theta.append(float(row['theta0']))\n";
    out << "            r.append(float(row['r0']))\n";
    out << "            freq.append(float(row['frequency']))\n";
    out << "ax.scatter(gray_theta, gray_r, s=2, c='0.6', label='chaotic')\n";
    out << "sc = ax.scatter(theta, r, s=2, c=freq, cmap='viridis')\n";
    out << "fig.colorbar(sc, ax=ax, label='frequency')\n\n";
  }

  if (manifold_csv) {
    out << "manifold_path = \"" << *manifold_csv << "\"\n";
    out << "curves = {}\n";
    out << "with open(manifold_path) as fh:\n";
    out << "    rows = csv.DictReader(row for row in fh if not row.startswith('#'))\n";
    out << "    for row in rows:\n";
    out << "        key = (row['branch'], int(row['iterate']))\n";
    out << "        curves.setdefault(key, []).append((float(row['theta']), float(row['r'])))\n";
    out << "if not curves:\n";
    out << "    print('warning: manifold file has no samples')\n";
    out << "for (branch, _), pts in curves.items():\n";
    out << "    color = 'tab:blue' if branch.startswith('s') else 'tab:red'\n";
    out << "    ax.plot([p[0] for p in pts], [p[1] for p in pts], '.', ms=1.5, color=color)\n\n";
  }

  out << "ax.set_xlabel('theta')\n";
  out << "ax.set_ylabel('r')\n";
  out << "ax.set_xlim(0, 1)\n";
  out << "ax.set_ylim(-1, 1)\n";
  out << "plt.tight_layout()\n";
  out << "plt.savefig('phase_portrait.png', dpi=200)\n";
  out << "print('wrote phase_portrait.png')\n";
}

}  // namespace billiards

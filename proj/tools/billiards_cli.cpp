// Command line front end: orbits, phase-portrait scans, periodic orbits,
// manifold charts and their globalization, all written to CSV/JSON artifacts.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>

#include "billiards/io.hpp"
#include "billiards/version.hpp"

using namespace billiards;

namespace {

struct TableChoice {
  std::string name;  // A..E, empty when a file is used
  std::string file;

  TableSpec resolve() const {
    if (!file.empty()) return read_table_file(file);
    if (!name.empty()) return builtin_table(name);
    throw CLI::ValidationError("--table or --table-file is required");
  }
  std::string describe() const { return !file.empty() ? file : name; }
};

void add_table_options(CLI::App* cmd, TableChoice& choice) {
  auto* by_name = cmd->add_option("--table", choice.name, "built-in table name (A..E)");
  auto* by_file = cmd->add_option("--table-file", choice.file, "table coefficient file");
  by_name->excludes(by_file);
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("BILLIARDS_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;  // auto
}

// console output only; file artifacts are written at full precision by io
std::string fmt_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<PhasePoint> parse_seed_list(const std::string& csv) {
  std::vector<double> nums;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    nums.push_back(std::stod(token));
  }
  if (nums.empty() || nums.size() % 2 != 0)
    throw CLI::ValidationError("--seed expects comma separated theta,r pairs");
  std::vector<PhasePoint> pts;
  for (std::size_t i = 0; i < nums.size(); i += 2) pts.push_back({nums[i], nums[i + 1]});
  return pts;
}

// ---- subcommand payloads -------------------------------------------------

struct TableInfoArgs {
  TableChoice table;
};

int run_table_info(const TableInfoArgs& a) {
  TableSpec spec = a.table.resolve();
  std::cout << "table " << a.table.describe() << "\n";
  for (int k = 1; k <= spec.max_order(); ++k) {
    std::cout << "  ax." << k << " = " << fmt_num(spec.coeff_cos_x(k)) << "  bx." << k << " = "
              << fmt_num(spec.coeff_sin_x(k)) << "  ay." << k << " = "
              << fmt_num(spec.coeff_sin2_y(k)) << "  by." << k << " = "
              << fmt_num(spec.coeff_sin_y(k)) << "\n";
  }
  std::cout << "min signed curvature (4096 samples) = " << fmt_num(min_signed_curvature(spec))
            << "\n";
  EllipseSpec ell = associated_ellipse(spec);
  auto ecc = eccentricity_report(ell);
  std::cout << "associated ellipse a1 = " << fmt_num(ell.a1) << ", b1 = " << fmt_num(ell.b1)
            << "\n";
  std::cout << "eccentricity sqrt(1 - min^2/max^2) = " << fmt_num(ecc.classical) << "\n";
  std::cout << "axis ratio sqrt(|a1^2 - b1^2|)/b1  = " << fmt_num(ecc.axis_ratio) << "\n";
  return 0;
}

struct OrbitArgs {
  TableChoice table;
  double theta0 = 0.0, r0 = 0.0;
  int steps = 100;
  bool ellipse_only = false;
  std::string out = "orbit.csv";
};

int run_orbit(const OrbitArgs& a) {
  TableSpec spec = a.table.resolve();
  CsvMeta meta{{"command", "orbit"},
               {"table", a.table.describe()},
               {"theta0", fmt_num(a.theta0)},
               {"r0", fmt_num(a.r0)},
               {"steps", std::to_string(a.steps)},
               {"ellipse-only", a.ellipse_only ? "1" : "0"}};

  PhasePoint p0{a.theta0, a.r0};
  Orbit orb;
  if (a.ellipse_only) {
    EllipseSpec ell = associated_ellipse(spec);
    PhasePoint p = p0;
    for (int i = 0; i < a.steps; ++i) {
      EllipseStep s = ellipse_step(ell, p);
      double lift = s.next.theta - p.theta;
      lift -= std::floor(lift);
      orb.points.push_back(s.next);
      orb.dtheta.push_back(lift);
      orb.chord.push_back(s.chord);
      p = s.next;
    }
  } else {
    orb = orbit(spec, p0, a.steps);
  }
  write_orbit_csv(a.out, meta, p0, orb);
  std::cout << "wrote " << a.out << " (" << orb.points.size() << " steps)\n";
  return 0;
}

struct ScanArgs {
  TableChoice table;
  int grid_theta = 0, grid_r = 0;
  int random = 0;
  std::uint64_t rng_seed = 2024;
  int steps = 1000;
  double chaos_threshold = kDefaultChaosGap;
  double r_min = -0.95, r_max = 0.95;
  int threads = 0;
  std::string out = "scan.csv";
  std::string plot_script;
};

int run_scan(const ScanArgs& a) {
  TableSpec spec = a.table.resolve();
  std::vector<PhasePoint> seeds;
  if (a.random > 0) {
    std::mt19937_64 rng(a.rng_seed);
    std::uniform_real_distribution<double> utheta(0.0, 1.0);
    std::uniform_real_distribution<double> ur(a.r_min, a.r_max);
    for (int i = 0; i < a.random; ++i) seeds.push_back({utheta(rng), ur(rng)});
  } else {
    int nt = a.grid_theta > 0 ? a.grid_theta : 40;
    int nr = a.grid_r > 0 ? a.grid_r : 40;
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < nr; ++j)
        seeds.push_back({(i + 0.5) / nt, a.r_min + (a.r_max - a.r_min) * (j + 0.5) / nr});
  }

  auto points = phase_portrait_scan(spec, seeds, a.steps, a.chaos_threshold,
                                    resolve_threads(a.threads));
  CsvMeta meta{{"command", "scan"},
               {"table", a.table.describe()},
               {"seeds", std::to_string(seeds.size())},
               {"steps", std::to_string(a.steps)},
               {"chaos-threshold", fmt_num(a.chaos_threshold)},
               {"rng-seed", std::to_string(a.rng_seed)},
               {"mode", a.random > 0 ? "random" : "grid"}};
  write_scan_csv(a.out, meta, points);

  std::size_t chaotic = 0;
  for (const auto& c : points) chaotic += c.ok && c.chaotic;
  std::cout << "wrote " << a.out << " (" << points.size() << " seeds, " << chaotic
            << " chaotic)\n";

  if (!a.plot_script.empty()) {
    emit_plot_script(a.plot_script, a.out, std::nullopt);
    std::cout << "wrote " << a.plot_script << "\n";
  }
  return 0;
}

struct FindPeriodicArgs {
  TableChoice table;
  int period = 2;
  std::string seed;
  double tol = 1e-12;
  std::string out = "orbit.json";
};

int run_find_periodic(const FindPeriodicArgs& a) {
  TableSpec spec = a.table.resolve();
  std::vector<PhasePoint> given = parse_seed_list(a.seed);
  ShootVector u0 = complete_seed(spec, given, a.period);
  ShootVector u = newton_periodic(spec, u0, a.tol);

  OrbitArtifact art;
  art.table = spec;
  art.orbit = u;
  art.eig = multipliers_and_eigvecs(spec, u);
  art.residual = multishoot_residual(spec, u).norm();
  write_orbit_json(a.out, art);

  std::cout << "wrote " << a.out << " (period " << u.period() << ", residual "
            << fmt_num(art.residual) << ", alpha " << fmt_num(art.eig.alpha) << ", beta "
            << fmt_num(art.eig.beta) << ")\n";
  return 0;
}

struct ManifoldArgs {
  TableChoice table;
  std::string orbit_path;
  std::string kind = "unstable";
  double scale = 0.2;
  int order = 60;
  int conj_nodes = 128;
  double tol = 1e-11;
  std::string out = "chart.json";
};

int run_manifold(const ManifoldArgs& a) {
  OrbitArtifact oa = read_orbit_json(a.orbit_path);
  TableSpec spec = (!a.table.name.empty() || !a.table.file.empty()) ? a.table.resolve() : oa.table;

  ChartKind kind;
  if (a.kind == "stable")
    kind = ChartKind::stable;
  else if (a.kind == "unstable")
    kind = ChartKind::unstable;
  else
    throw CLI::ValidationError("--kind must be stable or unstable");

  NewtonParameterizationOptions opts;
  opts.tol = a.tol;
  SpectralChart chart =
      newton_parameterization(spec, oa.orbit, oa.eig, kind, a.scale, a.order, opts);
  double conj = conjugacy_error(spec, oa.orbit, chart, std::max(a.conj_nodes, a.order));

  write_chart_json(a.out, ChartArtifact{spec, oa.orbit, chart, conj});
  double tail = chart.coeffs.row(chart.trunc).cwiseAbs().maxCoeff();
  std::cout << "wrote " << a.out << " (rate " << fmt_num(chart.rate) << ", conjugacy error "
            << fmt_num(conj) << ", tail " << fmt_num(tail) << ")\n";
  return 0;
}

struct GlobalizeArgs {
  std::string chart_path;
  int samples = 500;
  int iterates = 4;
  int threads = 0;
  std::string out = "manifold.csv";
  std::string plot_script;
  std::string scan_csv;
};

int run_globalize(const GlobalizeArgs& a) {
  ChartArtifact ca = read_chart_json(a.chart_path);
  auto curves =
      grow_manifolds(ca.table, ca.chart, a.samples, a.iterates, resolve_threads(a.threads));

  CsvMeta meta{{"command", "globalize"},
               {"chart", a.chart_path},
               {"samples", std::to_string(a.samples)},
               {"iterates", std::to_string(a.iterates)},
               {"kind", ca.chart.kind == ChartKind::stable ? "stable" : "unstable"}};
  write_manifold_csv(a.out, meta, curves);

  std::size_t total = 0;
  for (const auto& c : curves) total += c.samples.size();
  std::cout << "wrote " << a.out << " (" << curves.size() << " strands, " << total
            << " samples)\n";

  if (!a.plot_script.empty()) {
    emit_plot_script(a.plot_script,
                     a.scan_csv.empty() ? std::nullopt : std::make_optional(a.scan_csv), a.out);
    std::cout << "wrote " << a.plot_script << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"billiard maps on perturbed elliptical tables"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  TableInfoArgs ti;
  auto* cmd_info = app.add_subcommand("table-info", "print table coefficients and geometry");
  add_table_options(cmd_info, ti.table);

  OrbitArgs ob;
  auto* cmd_orbit = app.add_subcommand("orbit", "iterate the billiard map");
  add_table_options(cmd_orbit, ob.table);
  cmd_orbit->add_option("--theta0", ob.theta0, "initial boundary parameter");
  cmd_orbit->add_option("--r0", ob.r0, "initial bounce cosine");
  cmd_orbit->add_option("--steps", ob.steps, "number of iterates");
  cmd_orbit->add_flag("--ellipse-only", ob.ellipse_only,
                      "iterate the associated ellipse instead of the table");
  cmd_orbit->add_option("--out", ob.out, "output CSV path");

  ScanArgs sc;
  auto* cmd_scan = app.add_subcommand("scan", "classify a grid of seeds by frequency and chaos");
  add_table_options(cmd_scan, sc.table);
  cmd_scan->add_option("--grid-theta", sc.grid_theta, "grid size along theta");
  cmd_scan->add_option("--grid-r", sc.grid_r, "grid size along r");
  cmd_scan->add_option("--random", sc.random, "use this many random seeds instead of a grid");
  cmd_scan->add_option("--rng-seed", sc.rng_seed, "seed for random scans");
  cmd_scan->add_option("--steps", sc.steps, "orbit length per seed");
  cmd_scan->add_option("--chaos-threshold", sc.chaos_threshold, "gap threshold for chaos");
  cmd_scan->add_option("--r-min", sc.r_min, "lower r bound");
  cmd_scan->add_option("--r-max", sc.r_max, "upper r bound");
  cmd_scan->add_option("--threads", sc.threads, "worker threads (default: all cores)");
  cmd_scan->add_option("--out", sc.out, "output CSV path");
  cmd_scan->add_option("--plot-script", sc.plot_script, "also emit a plotting script");

  FindPeriodicArgs fp;
  auto* cmd_fp = app.add_subcommand("find-periodic", "multiple-shooting periodic orbit search");
  add_table_options(cmd_fp, fp.table);
  cmd_fp->add_option("--period", fp.period, "orbit period K")->required();
  cmd_fp->add_option("--seed", fp.seed, "comma separated theta,r[,theta,r...]")->required();
  cmd_fp->add_option("--tol", fp.tol, "residual tolerance");
  cmd_fp->add_option("--out", fp.out, "output JSON path");

  ManifoldArgs mf;
  auto* cmd_mf = app.add_subcommand("manifold", "parameterize a stable/unstable manifold chart");
  add_table_options(cmd_mf, mf.table);
  cmd_mf->add_option("--orbit", mf.orbit_path, "orbit JSON from find-periodic")->required();
  cmd_mf->add_option("--kind", mf.kind, "stable or unstable");
  cmd_mf->add_option("--scale", mf.scale, "eigenvector scaling");
  cmd_mf->add_option("--order", mf.order, "polynomial truncation order N");
  cmd_mf->add_option("--conj-nodes", mf.conj_nodes, "validation nodes for the conjugacy error");
  cmd_mf->add_option("--tol", mf.tol, "Newton residual tolerance");
  cmd_mf->add_option("--out", mf.out, "output JSON path");

  GlobalizeArgs gl;
  auto* cmd_gl = app.add_subcommand("globalize", "grow a chart into a global manifold");
  cmd_gl->add_option("--chart", gl.chart_path, "chart JSON from manifold")->required();
  cmd_gl->add_option("--samples", gl.samples, "fundamental-domain samples J");
  cmd_gl->add_option("--iterates", gl.iterates, "iterate count M");
  cmd_gl->add_option("--threads", gl.threads, "worker threads (default: all cores)");
  cmd_gl->add_option("--out", gl.out, "output CSV path");
  cmd_gl->add_option("--plot-script", gl.plot_script, "also emit a plotting script");
  cmd_gl->add_option("--scan-csv", gl.scan_csv, "scan CSV to overlay in the plot script");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_info->parsed()) return run_table_info(ti);
    if (cmd_orbit->parsed()) return run_orbit(ob);
    if (cmd_scan->parsed()) return run_scan(sc);
    if (cmd_fp->parsed()) return run_find_periodic(fp);
    if (cmd_mf->parsed()) return run_manifold(mf);
    if (cmd_gl->parsed()) return run_globalize(gl);
  } catch (const std::exception& e) {
    std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
    return 1;
  }
  return 0;
}

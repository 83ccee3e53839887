#include "billiards/table.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numbers>
#include <sstream>

namespace billiards {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TableSpec TableSpec::circle() { return ellipse(1.0, 1.0); }

TableSpec TableSpec::ellipse(double a1, double b1) {
  TableSpec s;
  s.cos_x = {a1};
  s.sin_x = {0.0};
  s.sin_y = {b1};
  s.sin2_y = {0.0};
  return s;
}

TableSpec TableSpec::convexity_family(double eps) {
  TableSpec s;
  s.cos_x = {1.1, 0.03 * eps};
  s.sin_x = {0.0, 0.0};
  s.sin_y = {1.0, 0.025 * eps};
  s.sin2_y = {0.0, 0.0};
  return s;
}

TableSpec builtin_table(const std::string& name) {
  TableSpec s;
  s.sin_x = {0.0, 0.0, 0.0};
  s.sin2_y = {0.0, 0.0, 0.0};
  if (name == "A" || name == "a") {
    s.cos_x = {1.1, 0.03, 0.0};
    s.sin_y = {1.0, 0.03, 0.0};
  } else if (name == "B" || name == "b") {
    s.cos_x = {1.1, 0.05, 0.00015};
    s.sin_y = {1.0, 0.035, 0.0001};
  } else if (name == "C" || name == "c") {
    s.cos_x = {1.1, 0.08, 0.0002};
    s.sin_y = {1.0, 0.095, 0.0001};
  } else if (name == "D" || name == "d") {
    s.cos_x = {2.0, 0.04, 0.0};
    s.sin_y = {1.0, 0.035, 0.0};
  } else if (name == "E" || name == "e") {
    s.cos_x = {2.0, 0.05, 0.0};
    s.sin_y = {1.0, 0.065, 0.0};
  } else {
    throw std::invalid_argument("unknown table '" + name + "' (expected A..E)");
  }
  return s;
}

TableSpec parse_table_text(const std::string& text) {
  TableSpec s;
  auto set_mode = [](std::vector<double>& family, int k, double value) {
    if (k < 1) throw std::invalid_argument("table file: mode index must be >= 1");
    if (static_cast<int>(family.size()) < k) family.resize(k, 0.0);
    family[k - 1] = value;
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string compact;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
    if (compact.empty()) continue;

    auto eq = compact.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("table file line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = compact.substr(0, eq);
    double value = std::stod(compact.substr(eq + 1));

    auto dot = key.find('.');
    if (dot == std::string::npos)
      throw std::invalid_argument("table file line " + std::to_string(lineno) +
                                  ": key must look like ax.k");
    std::string family = key.substr(0, dot);
    int k = std::stoi(key.substr(dot + 1));
    if (family == "ax")
      set_mode(s.cos_x, k, value);
    else if (family == "bx")
      set_mode(s.sin_x, k, value);
    else if (family == "ay")
      set_mode(s.sin2_y, k, value);
    else if (family == "by")
      set_mode(s.sin_y, k, value);
    else
      throw std::invalid_argument("table file line " + std::to_string(lineno) +
                                  ": unknown family '" + family + "'");
  }

  int n = std::max({s.cos_x.size(), s.sin_x.size(), s.sin_y.size(), s.sin2_y.size()});
  if (n == 0) throw std::invalid_argument("table file: no coefficients");
  s.cos_x.resize(n, 0.0);
  s.sin_x.resize(n, 0.0);
  s.sin_y.resize(n, 0.0);
  s.sin2_y.resize(n, 0.0);
  return s;
}

TableSpec read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table_text(buf.str());
}

EllipseSpec associated_ellipse(const TableSpec& spec) {
  double a1 = spec.coeff_cos_x(1);
  double b1 = spec.coeff_sin_y(1);
  if (a1 == 0.0 || b1 == 0.0)
    throw std::invalid_argument("associated ellipse undefined: first-mode coefficient is zero");
  return EllipseSpec{a1, b1};
}

template <class Scalar>
Vec2<Scalar> eval_boundary(const TableSpec& spec, const Scalar& theta) {
  Vec2<Scalar> p = Vec2<Scalar>::Zero();
  const int n = spec.max_order();
  for (int k = 1; k <= n; ++k) {
    Scalar arg = Scalar(kTwoPi * k) * theta;
    Scalar c = std::cos(arg), s = std::sin(arg);
    p(0) += Scalar(spec.coeff_cos_x(k)) * c + Scalar(spec.coeff_sin_x(k)) * s;
    p(1) += Scalar(spec.coeff_sin_y(k) + spec.coeff_sin2_y(k)) * s;
  }
  return p;
}

template <class Scalar>
Vec2<Scalar> eval_tangent(const TableSpec& spec, const Scalar& theta, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("tangent order must be 1 or 2");
  Vec2<Scalar> p = Vec2<Scalar>::Zero();
  const int n = spec.max_order();
  for (int k = 1; k <= n; ++k) {
    double w = kTwoPi * k;
    Scalar arg = Scalar(w) * theta;
    Scalar c = std::cos(arg), s = std::sin(arg);
    if (order == 1) {
      p(0) += Scalar(w) * (-Scalar(spec.coeff_cos_x(k)) * s + Scalar(spec.coeff_sin_x(k)) * c);
      p(1) += Scalar(w) * Scalar(spec.coeff_sin_y(k) + spec.coeff_sin2_y(k)) * c;
    } else {
      p(0) += Scalar(w * w) * (-Scalar(spec.coeff_cos_x(k)) * c - Scalar(spec.coeff_sin_x(k)) * s);
      p(1) += Scalar(w * w) * Scalar(-(spec.coeff_sin_y(k) + spec.coeff_sin2_y(k))) * s;
    }
  }
  return p;
}

template <class Scalar>
Vec2<Scalar> eval_boundary(const EllipseSpec& ell, const Scalar& theta) {
  Scalar arg = Scalar(kTwoPi) * theta;
  return Vec2<Scalar>(Scalar(ell.a1) * std::cos(arg), Scalar(ell.b1) * std::sin(arg));
}

template <class Scalar>
Vec2<Scalar> eval_tangent(const EllipseSpec& ell, const Scalar& theta, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("tangent order must be 1 or 2");
  Scalar arg = Scalar(kTwoPi) * theta;
  if (order == 1)
    return Vec2<Scalar>(Scalar(-kTwoPi * ell.a1) * std::sin(arg),
                        Scalar(kTwoPi * ell.b1) * std::cos(arg));
  return Vec2<Scalar>(Scalar(-kTwoPi * kTwoPi * ell.a1) * std::cos(arg),
                      Scalar(-kTwoPi * kTwoPi * ell.b1) * std::sin(arg));
}

double min_signed_curvature(const TableSpec& spec, int samples) {
  if (samples < 256) throw std::invalid_argument("curvature scan needs at least 256 samples");
  double min_kappa = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double theta = static_cast<double>(i) / samples;
    Vec2d d1 = eval_tangent(spec, theta, 1);
    Vec2d d2 = eval_tangent(spec, theta, 2);
    double speed2 = d1.squaredNorm();
    if (std::sqrt(speed2) < 1e-12)
      throw std::runtime_error("degenerate tangent at theta = " + std::to_string(theta));
    double kappa = (d1(0) * d2(1) - d1(1) * d2(0)) / (speed2 * std::sqrt(speed2));
    min_kappa = std::min(min_kappa, kappa);
  }
  return min_kappa;
}

EccentricityReport eccentricity_report(const EllipseSpec& ell) {
  double hi = std::max(std::abs(ell.a1), std::abs(ell.b1));
  double lo = std::min(std::abs(ell.a1), std::abs(ell.b1));
  EccentricityReport r;
  r.classical = std::sqrt(1.0 - (lo * lo) / (hi * hi));
  r.axis_ratio = std::sqrt(std::abs(ell.a1 * ell.a1 - ell.b1 * ell.b1)) / ell.b1;
  return r;
}

template Vec2<double> eval_boundary(const TableSpec&, const double&);
template Vec2<Complex> eval_boundary(const TableSpec&, const Complex&);
template Vec2<double> eval_tangent(const TableSpec&, const double&, int);
template Vec2<Complex> eval_tangent(const TableSpec&, const Complex&, int);
template Vec2<double> eval_boundary(const EllipseSpec&, const double&);
template Vec2<Complex> eval_boundary(const EllipseSpec&, const Complex&);
template Vec2<double> eval_tangent(const EllipseSpec&, const double&, int);
template Vec2<Complex> eval_tangent(const EllipseSpec&, const Complex&, int);

}  // namespace billiards

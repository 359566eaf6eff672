#include "chl/report.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "chl/event_io.hpp"
#include "chl/random.hpp"

namespace chl {

namespace {

using nlohmann::json;

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

std::vector<double> random_abscissae(const CylinderParams& p, Rng& rng, std::size_t count) {
  std::vector<double> xs(count);
  for (double& x : xs) x = -p.half_width() + p.period() * rng.uniform();
  return xs;
}

std::vector<Complex> probe_grid(const CylinderParams& p, Rng& rng, std::size_t count,
                                double max_height) {
  std::vector<Complex> zs(count);
  for (Complex& z : zs)
    z = Complex(-p.half_width() + p.period() * rng.uniform(), 0.05 + max_height * rng.uniform());
  return zs;
}

CheckOutcome check_quad_mean_shift(const SuiteConfig& cfg) {
  const CylinderParams p = make_cylinder(cfg.radius_n, cfg.lambda);
  const Complex closed = mean_shift_closed_form(p);
  CheckOutcome out;
  out.check = "quad_mean_shift";
  out.params = {{"N", p.radius_n}, {"lambda", p.lambda}, {"tol", cfg.quad_tol}};
  out.target = complex_json(closed);
  out.tolerance = 1e-8;
  out.pass = true;
  double worst = 0.0;
  json rows = json::array();
  for (const Complex z : {Complex(0, 1), Complex(5, 0.1), Complex(0.3, 0)}) {
    const QuadratureResult q = quad_mean_shift(p, z, cfg.quad_tol);
    const double rel = std::abs(q.value - closed) / std::abs(closed);
    const double allowed = std::max(out.tolerance, 10.0 * q.abs_error_estimate / std::abs(closed));
    out.pass = out.pass && q.converged && rel <= allowed;
    worst = std::max(worst, rel);
    rows.push_back({{"z", complex_json(z)},
                    {"value", complex_json(q.value)},
                    {"abs_error_estimate", q.abs_error_estimate},
                    {"subdivisions", q.subdivisions},
                    {"converged", q.converged},
                    {"relative_error", rel}});
  }
  out.value = {{"max_relative_error", worst}, {"points", rows}};
  return out;
}

CheckOutcome check_drift_limit(const SuiteConfig& cfg) {
  const CylinderParams p = make_cylinder(1e3, cfg.lambda);
  const Complex value = drift(p, 1.0).value;
  const Complex limit(0, std::numbers::pi * cfg.lambda * cfg.lambda / 2);
  CheckOutcome out;
  out.check = "drift_limit";
  out.params = {{"N", p.radius_n}, {"lambda", p.lambda}, {"t", 1.0}};
  out.value = complex_json(value);
  out.target = complex_json(limit);
  out.tolerance = 1e-3;
  out.pass = std::abs(value - limit) <= out.tolerance;
  return out;
}

CheckOutcome check_slit_rate(const SuiteConfig& cfg) {
  const Complex z(2, 3);
  const std::vector<double> ns{10, 20, 40, 80, 160};
  RateFit fit = slit_convergence_rate(cfg.lambda, z, ns);
  CheckOutcome out;
  out.check = "slit_convergence_rate";
  out.params = {{"lambda", cfg.lambda}, {"z", complex_json(z)}, {"N", ns}};
  out.value = fit_json(fit);
  // Error bounded by C(z)/N: at least first-order decay.
  out.target = {{"slope_at_most", -0.6}, {"r_squared_at_least", 0.95}};
  out.pass = fit.slope <= -0.6 && fit.r_squared >= 0.95;
  out.fit = std::move(fit);
  return out;
}

CheckOutcome check_farfield(const SuiteConfig& cfg) {
  const CylinderParams p = make_cylinder(cfg.radius_n, cfg.lambda);
  std::vector<double> ys;
  for (int k = 0; k < 8; ++k) ys.push_back(p.radius_n * (5.0 + k));
  RateFit fit = farfield_expansion_check(p, ys);
  CheckOutcome out;
  out.check = "farfield_expansion_check";
  out.params = {{"N", p.radius_n}, {"lambda", p.lambda}, {"y", ys}};
  out.value = fit_json(fit);
  out.target = {{"slope_at_most", -0.9 / p.radius_n}};
  out.pass = fit.slope <= -0.9 / p.radius_n;
  out.fit = std::move(fit);
  return out;
}

CheckOutcome check_shift_commutation(const SuiteConfig& cfg) {
  const CylinderParams p = make_cylinder(cfg.radius_n, cfg.lambda);
  Rng rng(mix_seed(cfg.seed, 0x5817));
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto xs = random_abscissae(p, rng, 10);
    const double y = -p.half_width() + p.period() * rng.uniform();
    worst = std::max(worst, shift_commutation_check(p, xs, y, probe_grid(p, rng, 20, 3.0)));
  }
  CheckOutcome out;
  out.check = "shift_commutation_check";
  out.params = {{"N", p.radius_n}, {"lambda", p.lambda}, {"configurations", 20}, {"events", 10}};
  out.value = worst;
  out.target = 0.0;
  out.tolerance = 1e-9;
  out.pass = worst <= out.tolerance;
  return out;
}

CheckOutcome check_disk_equivalence(const SuiteConfig& cfg) {
  const CylinderParams p = make_cylinder(cfg.radius_n, cfg.lambda);
  Rng rng(mix_seed(cfg.seed, 0xd15c));
  // Horizon chosen for about 50 events per log.
  const double horizon = 50.0 / p.period();
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const EventLog log = sample_events(p, horizon, mix_seed(cfg.seed, 1000 + trial));
    worst = std::max(worst, disk_equivalence_error(log, probe_grid(p, rng, 20, 3.0)));
  }
  CheckOutcome out;
  out.check = "disk_equivalence";
  out.params = {{"N", p.radius_n}, {"lambda", p.lambda}, {"logs", 5}, {"horizon", horizon}};
  out.value = worst;
  out.target = 0.0;
  out.tolerance = 1e-9;
  out.pass = worst <= out.tolerance;
  return out;
}

CheckOutcome check_integral_bounds(const SuiteConfig& cfg) {
  const std::vector<double> ns{2, 4, 8, 16, 32};
  std::vector<double> shift, deriv;
  bool converged = true;
  for (double n : ns) {
    const CylinderParams p = make_cylinder(n, cfg.lambda);
    const QuadratureResult a = quad_squared_shift(p, Complex(0, 0), cfg.quad_tol);
    const QuadratureResult b = quad_squared_deriv(p, Complex(0, 1), cfg.quad_tol);
    converged = converged && a.converged && b.converged;
    shift.push_back(a.value.real());
    deriv.push_back(b.value.real());
  }
  auto ratio = [](const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  };
  CheckOutcome out;
  out.check = "integral_boundedness";
  out.params = {{"N", ns}, {"lambda", cfg.lambda}, {"z_shift", complex_json(Complex(0, 0))},
                {"z_deriv", complex_json(Complex(0, 1))}};
  out.value = {{"squared_shift", shift}, {"squared_deriv", deriv},
               {"shift_ratio", ratio(shift)}, {"deriv_ratio", ratio(deriv)}};
  out.target = {{"max_over_min_at_most", 3.0}};
  out.tolerance = 3.0;
  out.pass = converged && ratio(shift) <= 3.0 && ratio(deriv) <= 3.0;
  return out;
}

CheckOutcome check_tail_decay(const SuiteConfig& cfg) {
  const CylinderParams p = make_cylinder(32.0, cfg.lambda);
  std::vector<std::pair<double, double>> grid;
  bool converged = true;
  for (double xi : {2.0, 4.0, 8.0, 16.0}) {
    const QuadratureResult q = quad_squared_shift(p, Complex(0, 0), xi * cfg.lambda, p.half_width(), cfg.quad_tol);
    converged = converged && q.converged;
    grid.emplace_back(xi * cfg.lambda, q.value.real());
  }
  RateFit fit = fit_power_law(std::move(grid));
  CheckOutcome out;
  out.check = "tail_decay";
  out.params = {{"N", p.radius_n}, {"lambda", p.lambda}, {"z", complex_json(Complex(0, 0))}};
  out.value = fit_json(fit);
  out.target = {{"slope", -1.0}};
  out.tolerance = 0.3;
  out.pass = converged && std::abs(fit.slope + 1.0) <= 0.3;
  out.fit = std::move(fit);
  return out;
}

CheckOutcome check_second_deriv(const SuiteConfig& cfg) {
  const Complex z(0, 1);
  const std::vector<double> ns{8, 16, 32, 64};
  const RateFit raw = second_deriv_decay_check(cfg.lambda, z, ns);
  const double limit = halfplane_second_deriv_integral(cfg.lambda, z);
  std::vector<std::pair<double, double>> gap;
  for (const auto& [n, v] : raw.grid) gap.emplace_back(n, std::abs(v - limit));
  RateFit fit = fit_power_law(std::move(gap));
  CheckOutcome out;
  out.check = "second_deriv_limit";
  out.params = {{"lambda", cfg.lambda}, {"z", complex_json(z)}, {"N", ns}};
  out.value = {{"integrals", fit_json(raw)}, {"gap_to_halfplane", fit_json(fit)}};
  out.target = {{"halfplane_integral", limit}, {"gap_slope_below", 0.0}, {"r_squared_at_least", 0.9}};
  out.pass = fit.slope < 0.0 && fit.r_squared >= 0.9;
  out.fit = std::move(fit);
  return out;
}

CheckOutcome check_growth(const SuiteConfig& cfg) {
  const CylinderParams p = make_cylinder(cfg.radius_n, cfg.lambda);
  const Complex z(0, 1);
  const double t = 1.0;
  const McSummary s = mc_growth_check(p, z, t, cfg.replicas, cfg.seed, cfg.threads);
  const Complex d = drift(p, t).value;
  const double ci = s.ci99_halfwidth;
  bool pass = std::abs(s.mean.real()) <= ci && std::abs(s.mean.imag()) <= ci;
  const Complex limit(0, std::numbers::pi * p.lambda * p.lambda * t / 2);
  if (p.radius_n >= 64) pass = pass && std::abs(s.mean + d - limit) <= ci + std::abs(d - limit);
  CheckOutcome out;
  out.check = "mc_growth_check";
  out.params = {{"N", p.radius_n}, {"lambda", p.lambda}, {"z", complex_json(z)}, {"t", t},
                {"replicas", cfg.replicas}, {"seed", cfg.seed}};
  out.value = {{"mean_offset_minus_drift", complex_json(s.mean)},
               {"std", complex_json(s.std)},
               {"ci99_halfwidth", ci},
               {"drift", complex_json(d)}};
  out.target = complex_json(Complex(0, 0));
  out.tolerance = ci;
  out.pass = pass;
  return out;
}

using CheckFn = CheckOutcome (*)(const SuiteConfig&);

const std::vector<std::pair<std::string, CheckFn>>& registry() {
  static const std::vector<std::pair<std::string, CheckFn>> checks{
      {"quad_mean_shift", check_quad_mean_shift},
      {"drift_limit", check_drift_limit},
      {"slit_convergence_rate", check_slit_rate},
      {"farfield_expansion_check", check_farfield},
      {"shift_commutation_check", check_shift_commutation},
      {"disk_equivalence", check_disk_equivalence},
      {"integral_boundedness", check_integral_bounds},
      {"tail_decay", check_tail_decay},
      {"second_deriv_limit", check_second_deriv},
      {"mc_growth_check", check_growth},
  };
  return checks;
}

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<CheckOutcome> run_checks(const SuiteConfig& config) {
  for (const std::string& name : config.only)
    if (std::find(check_names().begin(), check_names().end(), name) == check_names().end())
      throw std::invalid_argument("unknown check: " + name);
  std::vector<CheckOutcome> out;
  for (const auto& [name, fn] : registry()) {
    if (!config.only.empty() &&
        std::find(config.only.begin(), config.only.end(), name) == config.only.end())
      continue;
    out.push_back(fn(config));
  }
  return out;
}

nlohmann::json fit_json(const RateFit& fit) {
  json grid = json::array();
  for (const auto& [scale, error] : fit.grid) grid.push_back({scale, error});
  return {{"grid", grid},
          {"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"floor_limited", fit.floor_limited}};
}

nlohmann::json report_json(const std::vector<CheckOutcome>& outcomes) {
  json checks = json::array();
  bool all = true;
  for (const CheckOutcome& o : outcomes) {
    checks.push_back({{"check", o.check},
                      {"params", o.params},
                      {"value", o.value},
                      {"target", o.target},
                      {"tolerance", o.tolerance},
                      {"pass", o.pass}});
    all = all && o.pass;
  }
  return {{"checks", checks}, {"pass", all}};
}

void write_rate_csv(std::ostream& out, const RateFit& fit) {
  out << "scale,error\n";
  for (const auto& [scale, error] : fit.grid)
    out << format_double(scale) << "," << format_double(error) << "\n";
}

}  // namespace chl

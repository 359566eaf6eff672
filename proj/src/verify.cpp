#include "chl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chl/parallel.hpp"
#include "chl/random.hpp"

namespace chl {

namespace {

constexpr double kResidualFloor = 1e-14;

RateFit fit_line(std::vector<std::pair<double, double>> grid, bool log_scale) {
  std::sort(grid.begin(), grid.end());
  RateFit fit;
  std::vector<double> xs, ys;
  for (const auto& [scale, error] : grid) {
    if (!(error > kResidualFloor)) {
      ++fit.floor_limited;
      continue;
    }
    xs.push_back(log_scale ? std::log(scale) : scale);
    ys.push_back(std::log(error));
  }
  fit.grid = std::move(grid);
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("rate fit: fewer than two usable points");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

// Kinks of x -> S_x(z) for z near the boundary: x = Re z and the two
// preimages of the slit base, Re z -+ 2 N asin(delta).
std::vector<double> kink_points(const CylinderParams& p, const Complex& z) {
  const double base = 2.0 * p.radius_n * std::asin(p.delta);
  std::vector<double> out;
  for (double offset : {-base, 0.0, base}) out.push_back(reduce_to_fundamental(p, z.real() + offset));
  return out;
}

Complex displacement_at(const CylinderParams& p, double x, const Complex& z) {
  return cyl_slit_displacement(p, cyl_eta(p, x, z));
}

}  // namespace

RateFit fit_power_law(std::vector<std::pair<double, double>> grid) {
  return fit_line(std::move(grid), true);
}

RateFit fit_exponential(std::vector<std::pair<double, double>> grid) {
  return fit_line(std::move(grid), false);
}

McSummary summarize(const std::vector<Complex>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("summarize: need at least two replicas");
  Complex mean{};
  for (const Complex& s : samples) mean += s;
  mean /= static_cast<double>(n);
  double vr = 0, vi = 0;
  for (const Complex& s : samples) {
    vr += (s.real() - mean.real()) * (s.real() - mean.real());
    vi += (s.imag() - mean.imag()) * (s.imag() - mean.imag());
  }
  const Complex sd(std::sqrt(vr / (n - 1)), std::sqrt(vi / (n - 1)));
  McSummary out;
  out.replicas = n;
  out.mean = mean;
  out.std = sd;
  out.ci99_halfwidth = kZ99 * std::max(sd.real(), sd.imag()) / std::sqrt(static_cast<double>(n));
  return out;
}

McSummary summarize(const std::vector<double>& samples) {
  return summarize(std::vector<Complex>(samples.begin(), samples.end()));
}

Complex mean_shift_closed_form(const CylinderParams& params) {
  return drift(params, 1.0).value;
}

QuadratureResult quad_mean_shift(const CylinderParams& params, const Complex& z, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("quad_mean_shift: tolerance must be positive");
  const double half = params.half_width();
  return integrate([&](double x) { return displacement_at(params, x, z); }, -half, half,
                   kink_points(params, z), {.abs_tol = tol});
}

QuadratureResult quad_squared_shift(const CylinderParams& params, const Complex& z, double a,
                                    double b, double tol) {
  const double half = params.half_width();
  if (!(a >= -half) || !(b <= half) || !(a < b))
    throw std::invalid_argument("quad_squared_shift: require -pi N <= a < b <= pi N");
  return integrate(
      [&](double x) { return Complex(std::norm(displacement_at(params, x, z))); }, a, b,
      kink_points(params, z), {.abs_tol = tol});
}

QuadratureResult quad_squared_shift(const CylinderParams& params, const Complex& z, double tol) {
  return quad_squared_shift(params, z, -params.half_width(), params.half_width(), tol);
}

QuadratureResult quad_squared_deriv(const CylinderParams& params, const Complex& z, double tol) {
  if (!(z.imag() > 0)) throw std::domain_error("quad_squared_deriv: require Im z > 0");
  const double half = params.half_width();
  return integrate(
      [&](double x) { return Complex(std::norm(cyl_slit_deriv(params, x, z) - 1.0)); }, -half,
      half, kink_points(params, z), {.abs_tol = tol});
}

RateFit slit_convergence_rate(double lambda, const Complex& z, const std::vector<double>& n_grid) {
  std::vector<std::pair<double, double>> grid;
  for (double n : n_grid) {
    const CylinderParams p = make_cylinder(n, lambda);
    const Complex cyl = cyl_slit(p, 0.0, z);
    const Complex flat = halfplane_slit(HalfPlaneSlitParams{lambda, 0.0}, z);
    grid.emplace_back(n, std::abs(cyl - flat));
  }
  return fit_power_law(std::move(grid));
}

RateFit farfield_expansion_check(const CylinderParams& params, const std::vector<double>& y_grid) {
  const double n = params.radius_n;
  const double d2 = params.delta * params.delta;
  const Complex i(0, 1);
  std::vector<std::pair<double, double>> grid;
  for (double y : y_grid) {
    const Complex z(0.0, y);
    const Complex shift = cyl_slit(params, 0.0, z) - z;
    const Complex expansion = -i * n * std::log1p(-d2) + i * n * d2 * std::exp(i * z / n);
    grid.emplace_back(y, std::abs(shift - expansion));
  }
  return fit_exponential(std::move(grid));
}

double shift_commutation_check(const CylinderParams& params, const std::vector<double>& xs,
                               double y, const std::vector<Complex>& z_grid) {
  double worst = 0.0;
  for (const Complex& z : z_grid) {
    Complex lhs = cylinder_shift(params, y, z);
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) lhs = cyl_slit_chain(params, *it, lhs);
    lhs = cylinder_shift_inv(params, y, lhs);
    Complex rhs = z;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) rhs = cyl_slit(params, *it + y, rhs);
    worst = std::max(worst, std::abs(cyl_difference(params, lhs, rhs)));
  }
  return worst;
}

double disk_equivalence_error(const EventLog& log, const std::vector<Complex>& z_grid) {
  const ProcessEvaluator cyl(log, ProcessKind::BackwardChl);
  const ProcessEvaluator disk(log, ProcessKind::DiskHl);
  double worst = 0.0;
  for (const Complex& z : z_grid) {
    const auto a = cyl.trajectory(z);
    const auto b = disk.trajectory(z);
    for (std::size_t k = 0; k < a.size(); ++k)
      worst = std::max(worst, std::abs(cyl_difference(log.params(), a[k].second, b[k].second)));
  }
  return worst;
}

McSummary mc_growth_check(const CylinderParams& params, const Complex& z, double t,
                          std::size_t replicas, std::uint64_t seed, unsigned threads) {
  std::vector<Complex> samples(replicas);
  if (t > 0) {
    const Complex expected = z + drift(params, t).value;
    parallel_for(replicas, threads, [&](std::size_t r) {
      const EventLog log = sample_events(params, t, mix_seed(seed, r));
      samples[r] = eval_backward_chl(ProcessEvaluator(log, ProcessKind::BackwardChl), z, t) - expected;
    });
  }
  return summarize(samples);
}

std::vector<CouplingRow> mc_coupling_convergence(double lambda, const Complex& z, double t,
                                                 const std::vector<double>& n_list,
                                                 std::size_t replicas, std::uint64_t seed,
                                                 unsigned threads, std::optional<double> window) {
  if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end()))
    throw std::invalid_argument("mc_coupling_convergence: radii must be ascending");
  const CylinderParams master = make_cylinder(n_list.back(), lambda);
  if (window && (!(*window > 0.0) || *window > master.half_width()))
    throw std::invalid_argument("mc_coupling_convergence: window must lie in (0, pi N_max]");
  std::vector<std::vector<double>> per_replica(replicas, std::vector<double>(n_list.size()));
  parallel_for(replicas, threads, [&](std::size_t r) {
    const EventLog log = sample_events(master, t, mix_seed(seed, r));
    for (std::size_t k = 0; k < n_list.size(); ++k) {
      const double width = std::numbers::pi * n_list[k];
      const EventLog sub = restrict_log(log, width);
      // Both processes jump only at the shared event times, so the sup over
      // [0, t] is the max over the trajectory samples.
      const auto cyl = ProcessEvaluator(sub, ProcessKind::BackwardChl).trajectory(z);
      const auto shl = window
                           ? ProcessEvaluator(log, ProcessKind::BackwardShl, window).trajectory(z)
                           : ProcessEvaluator(sub, ProcessKind::BackwardShl, width).trajectory(z);
      double sup = 0.0;
      for (std::size_t j = 0; j < cyl.size(); ++j)
        sup = std::max(sup, std::norm(cyl[j].second - shl[j].second));
      per_replica[r][k] = sup;
    }
  });
  std::vector<CouplingRow> rows;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    CouplingRow row;
    row.radius_n = n_list[k];
    row.samples.reserve(replicas);
    for (std::size_t r = 0; r < replicas; ++r) row.samples.push_back(per_replica[r][k]);
    row.summary = summarize(row.samples);
    rows.push_back(std::move(row));
  }
  return rows;
}

bool monotone_up_to_ci(const std::vector<CouplingRow>& rows) {
  int rises = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double prev = rows[k - 1].summary.mean.real();
    const double cur = rows[k].summary.mean.real();
    if (cur <= prev) continue;
    ++rises;
    if (cur - prev > rows[k - 1].summary.ci99_halfwidth + rows[k].summary.ci99_halfwidth) return false;
  }
  return rises <= 1;
}

bool strictly_decreasing_beyond_ci(const std::vector<CouplingRow>& rows) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const McSummary& a = rows[k - 1].summary;
    const McSummary& b = rows[k].summary;
    if (!(b.mean.real() + b.ci99_halfwidth < a.mean.real() - a.ci99_halfwidth)) return false;
  }
  return true;
}

double paired_decrease_fraction(const std::vector<CouplingRow>& rows, std::size_t from,
                                std::size_t to) {
  const auto& a = rows.at(from).samples;
  const auto& b = rows.at(to).samples;
  std::size_t wins = 0;
  for (std::size_t r = 0; r < a.size(); ++r)
    if (b[r] < a[r]) ++wins;
  return static_cast<double>(wins) / static_cast<double>(a.size());
}

RateFit second_deriv_decay_check(double lambda, const Complex& z, const std::vector<double>& n_list) {
  if (!(z.imag() > 0)) throw std::domain_error("second_deriv_decay_check: require Im z > 0");
  constexpr double h = 1e-3;
  std::vector<std::pair<double, double>> grid;
  for (double n : n_list) {
    const CylinderParams p = make_cylinder(n, lambda);
    // S = z + D, so the second derivative of S is that of the displacement.
    auto second = [&](double x) {
      const Complex fwd = displacement_at(p, x, z + h);
      const Complex mid = displacement_at(p, x, z);
      const Complex back = displacement_at(p, x, z - h);
      return Complex(std::norm((fwd - 2.0 * mid + back) / (h * h)));
    };
    const QuadratureResult q = integrate(second, 0.0, p.half_width(), {z.real()}, {.abs_tol = 1e-12});
    // Rounding in the stencil is about 1e-16/h^2 per sample.
    const double floor = 1e-20 * p.half_width();
    grid.emplace_back(n, q.value.real() > floor ? q.value.real() : 0.0);
  }
  return fit_power_law(std::move(grid));
}

double halfplane_second_deriv_integral(double lambda, const Complex& z) {
  auto integrand = [&](double x) {
    const Complex d = z - x;
    const Complex root = std::sqrt(d - lambda) * std::sqrt(d + lambda);
    return Complex(std::norm(lambda * lambda / (root * root * root)));
  };
  constexpr double upper = 1e4;
  const QuadratureResult q =
      integrate(integrand, 0.0, upper, {z.real(), 10.0, 100.0, 1000.0}, {.abs_tol = 1e-13});
  // |phi''|^2 ~ lambda^4 / x^6 beyond the cut-off.
  return q.value.real() + std::pow(lambda, 4) / (5.0 * std::pow(upper, 5));
}

std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double stat = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    stat = std::max(stat, std::abs(i / na - j / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double lam = (en + 0.12 + 0.11 / en) * stat;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * 2.0 * std::exp(-2.0 * k * k * lam * lam);
    p += term;
    if (std::abs(term) < 1e-12) return {stat, std::clamp(p, 0.0, 1.0)};
    sign = -sign;
  }
  return {stat, 1.0};  // series not converged: lam is tiny
}

}  // namespace chl

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chl/quadrature.hpp"
#include "chl/random.hpp"
#include "chl/report.hpp"
#include "chl/verify.hpp"

using namespace chl;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I(0, 1);

}  // namespace

TEST_CASE("Gauss-Kronrod integration") {
  const QuadratureResult poly = integrate([](double x) { return Complex(x * x * x, 1.0); }, 0, 2);
  CHECK(poly.converged);
  CHECK(std::abs(poly.value - Complex(4, 2)) < 1e-13);

  const QuadratureResult wave =
      integrate([](double x) { return std::exp(Complex(0, 3 * x)); }, 0, 2 * kPi);
  CHECK(std::abs(wave.value) < 1e-12);

  // Square-root endpoint singularity needs refinement but converges.
  const QuadratureResult root = integrate([](double x) { return Complex(std::sqrt(x), 0); }, 0, 1);
  CHECK(root.converged);
  CHECK(root.subdivisions > 1);
  CHECK(std::abs(root.value.real() - 2.0 / 3.0) < 1e-10);

  // A kink at a declared breakpoint costs no refinement.
  const QuadratureResult kink =
      integrate([](double x) { return Complex(std::abs(x - 0.3), 0); }, 0, 1, {0.3});
  CHECK(kink.subdivisions == 2);
  CHECK(std::abs(kink.value.real() - (0.09 + 0.49) / 2) < 1e-14);

  QuadratureOptions tight;
  tight.abs_tol = 1e-30;
  tight.max_panels = 50;
  const QuadratureResult capped = integrate([](double x) { return Complex(std::sqrt(x), 0); }, 0, 1, {}, tight);
  CHECK_FALSE(capped.converged);
  CHECK(capped.subdivisions == 50);
}

TEST_CASE("mean shift integral equals the drift") {
  const CylinderParams p = make_cylinder(2.0, 1.0);
  const double t2 = std::tanh(0.25) * std::tanh(0.25);
  const Complex closed(0, -8 * kPi * std::log(1 - t2));
  CHECK(std::abs(mean_shift_closed_form(p) - closed) < 1e-14);
  for (const Complex z : {I, Complex(5, 0.1), Complex(0.3, 0), Complex(-4, 7)}) {
    const QuadratureResult q = quad_mean_shift(p, z, 1e-11);
    CHECK(q.converged);
    CHECK(std::abs(q.value - closed) / std::abs(closed) < 1e-8);
  }
  const QuadratureResult tiny = quad_mean_shift(make_cylinder(1.0, 1e-4), I, 1e-14);
  CHECK(std::abs(tiny.value) <= 1e-7);
  CHECK_FALSE(quad_mean_shift(p, I, 1e-20).converged);
}

TEST_CASE("squared shift and derivative integrals stay bounded in N") {
  const double v4 = quad_squared_shift(make_cylinder(4.0, 1.0), Complex(0, 0)).value.real();
  const double v32 = quad_squared_shift(make_cylinder(32.0, 1.0), Complex(0, 0)).value.real();
  CHECK(v4 > 0);
  CHECK(v32 / v4 <= 3);
  CHECK(v32 / v4 >= 1.0 / 3);

  const double d4 = quad_squared_deriv(make_cylinder(4.0, 1.0), I).value.real();
  for (double n : {8.0, 16.0, 32.0}) {
    const double dn = quad_squared_deriv(make_cylinder(n, 1.0), I).value.real();
    CHECK(dn / d4 <= 3);
    CHECK(dn / d4 >= 1.0 / 3);
  }
  CHECK(quad_squared_deriv(make_cylinder(8.0, 1.0), Complex(0, 10)).value.real() <=
        quad_squared_deriv(make_cylinder(8.0, 1.0), Complex(0, 0.5)).value.real());
  CHECK(quad_squared_shift(make_cylinder(4.0, 1e-4), Complex(0, 0)).value.real() <= 1e-6);
  CHECK(quad_squared_deriv(make_cylinder(4.0, 1e-4), I).value.real() <= 1e-6);
}

TEST_CASE("tail of the squared shift decays like 1/xi") {
  const CylinderParams p = make_cylinder(32.0, 1.0);
  const double t8 = quad_squared_shift(p, Complex(0, 0), 8.0, p.half_width()).value.real();
  const double t16 = quad_squared_shift(p, Complex(0, 0), 16.0, p.half_width()).value.real();
  CHECK(t8 / t16 >= 1.3);
  CHECK(t8 / t16 <= 3.2);

  // Far from the cutoff at pi N the exponent is close to -1.
  const CylinderParams wide = make_cylinder(128.0, 1.0);
  std::vector<std::pair<double, double>> grid;
  for (double xi : {2.0, 4.0, 8.0})
    grid.emplace_back(xi, quad_squared_shift(wide, Complex(0, 0), xi, wide.half_width()).value.real());
  CHECK(fit_power_law(grid).slope == doctest::Approx(-1.0).epsilon(0.1));
}

TEST_CASE("rate fits") {
  std::vector<std::pair<double, double>> grid;
  for (double n : {1.0, 2.0, 4.0, 8.0}) grid.emplace_back(n, 3.0 / (n * n));
  const RateFit power = fit_power_law(grid);
  CHECK(power.slope == doctest::Approx(-2.0));
  CHECK(power.r_squared == doctest::Approx(1.0));

  std::vector<std::pair<double, double>> exp_grid{{1, std::exp(-0.5)}, {2, std::exp(-1.0)},
                                                  {3, std::exp(-1.5)}, {4, 1e-16}};
  const RateFit ex = fit_exponential(exp_grid);
  CHECK(ex.slope == doctest::Approx(-0.5));
  CHECK(ex.floor_limited == 1);
}

TEST_CASE("slit map converges to the half-plane slit") {
  const std::vector<double> ns{10, 20, 40, 80, 160};
  // The error is within C(z)/N; at fixed z the observed order is two.
  for (const Complex z : {Complex(2, 3), Complex(3, 0)}) {
    const RateFit fit = slit_convergence_rate(1.0, z, ns);
    CHECK(fit.slope <= -0.6);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(fit.r_squared >= 0.95);
  }
  // Far up the cylinder the constant drift term dominates and the order is one.
  const RateFit far = slit_convergence_rate(1.0, Complex(0, 1e6), ns);
  CHECK(far.slope == doctest::Approx(-1.0).epsilon(0.05));
  const CylinderParams p = make_cylinder(40.0, 1.0);
  CHECK(std::abs(cyl_slit(p, 0.0, Complex(0, 1e6)) - Complex(0, 1e6) -
                 Complex(0, -p.radius_n * std::log1p(-p.delta * p.delta))) < 1e-6);
}

TEST_CASE("far-field expansion") {
  for (double n : {1.0, 3.0}) {
    const CylinderParams p = make_cylinder(n, 1.0);
    std::vector<double> ys;
    for (int k = 5; k <= 12; ++k) ys.push_back(k * n);
    CHECK(farfield_expansion_check(p, ys).slope <= -0.9 / n);
  }
  for (double n : {1.0, 4.0, 16.0}) {
    const CylinderParams p = make_cylinder(n, 1.0);
    const Complex z(0, 20 * n);
    const Complex lead(0, -n * std::log1p(-p.delta * p.delta));
    CHECK(std::abs(cyl_slit(p, 0.0, z) - z - lead) < 1e-8);
  }
  SUBCASE("first-order coefficient of the displacement") {
    // (S(iy) - iy - lead) e^{y/N} tends to 2 i N delta^2.
    const CylinderParams p = make_cylinder(2.0, 1.0);
    const Complex z(0, 30.0);
    const Complex lead(0, -p.radius_n * std::log1p(-p.delta * p.delta));
    const Complex coeff = (cyl_slit(p, 0.0, z) - z - lead) * std::exp(z.imag() / p.radius_n);
    CHECK(std::abs(coeff - Complex(0, 2 * p.radius_n * p.delta * p.delta)) < 1e-5);
  }
}

TEST_CASE("shift commutation") {
  const CylinderParams p = make_cylinder(5.0, 1.0);
  Rng rng(99);
  std::vector<double> xs(3);
  for (double& x : xs) x = -p.half_width() + p.period() * rng.uniform();
  std::vector<Complex> grid;
  for (int k = 0; k < 20; ++k) grid.emplace_back(-p.half_width() + p.period() * rng.uniform(), 3 * rng.uniform());
  CHECK(shift_commutation_check(p, xs, 1.7, grid) <= 1e-9);
  CHECK(shift_commutation_check(p, xs, p.period(), grid) <= 1e-10);
  CHECK(shift_commutation_check(p, {}, 1.7, grid) <= 1e-12);
}

TEST_CASE("Monte Carlo growth") {
  SUBCASE("finite N: centred on the drift") {
    const CylinderParams p = make_cylinder(64.0, 1.0);
    const McSummary s = mc_growth_check(p, I, 1.0, 2000, 77, 0);
    CHECK(std::abs(s.mean) <= std::sqrt(2.0) * s.ci99_halfwidth);
    // The mean growth is close to the limit i pi lambda^2 t / 2.
    const Complex growth = s.mean + drift(p, 1.0).value;
    CHECK(std::abs(growth - Complex(0, kPi / 2)) <= std::sqrt(2.0) * s.ci99_halfwidth + 1e-3);
  }
  SUBCASE("t = 0") {
    const McSummary s = mc_growth_check(make_cylinder(4.0, 1.0), I, 0.0, 50, 1, 1);
    CHECK(s.mean == Complex(0, 0));
    CHECK(drift(make_cylinder(4.0, 1.0), 0.0).value == Complex(0, 0));
  }
  SUBCASE("small slits") {
    const CylinderParams p = make_cylinder(8.0, 1e-3);
    const McSummary s = mc_growth_check(p, I, 1.0, 500, 4, 0);
    CHECK(std::abs(s.mean) <= 1e-5 + std::sqrt(2.0) * s.ci99_halfwidth);
  }
  SUBCASE("independent of the thread count") {
    const CylinderParams p = make_cylinder(8.0, 1.0);
    const McSummary a = mc_growth_check(p, I, 0.5, 64, 5, 1);
    const McSummary b = mc_growth_check(p, I, 0.5, 64, 5, 4);
    CHECK(a.mean == b.mean);
    CHECK(a.std == b.std);
  }
}

TEST_CASE("coupled convergence of CHL to SHL") {
  const std::vector<double> ns{4, 8, 16, 32};
  const auto rows = mc_coupling_convergence(1.0, I, 0.5, ns, 500, 2718, 0);
  REQUIRE(rows.size() == 4);
  CHECK(monotone_up_to_ci(rows));
  CHECK(strictly_decreasing_beyond_ci(rows));
  CHECK(paired_decrease_fraction(rows, 0, 1) >= 0.6);

  const auto quiet = mc_coupling_convergence(1.0, I, 1e-6, ns, 100, 3, 0);
  for (const CouplingRow& r : quiet) CHECK(r.summary.mean.real() <= 1e-6);

  const auto fixed = mc_coupling_convergence(1.0, I, 0.5, {4, 8}, 50, 6, 0, 4 * kPi);
  CHECK(fixed.size() == 2);
  CHECK_THROWS(mc_coupling_convergence(1.0, I, 0.5, {8, 4}, 10, 1));
  CHECK_THROWS(mc_coupling_convergence(1.0, I, 0.5, {4, 8}, 10, 1, 0, 100.0));
}

TEST_CASE("second derivative integral") {
  const Complex z = I;
  const double limit = halfplane_second_deriv_integral(1.0, z);
  const RateFit raw = second_deriv_decay_check(1.0, z, {8, 16, 32, 64});
  REQUIRE(raw.grid.size() == 4);
  // The values approach the half-plane integral rather than zero.
  double prev_gap = 1e300;
  for (const auto& [n, v] : raw.grid) {
    CHECK(v == doctest::Approx(limit).epsilon(1e-3));
    const double gap = std::abs(v - limit);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  std::vector<std::pair<double, double>> gaps;
  for (const auto& [n, v] : raw.grid) gaps.emplace_back(n, std::abs(v - limit));
  const RateFit fit = fit_power_law(gaps);
  CHECK(fit.slope < 0);
  CHECK(fit.r_squared >= 0.9);

  const RateFit small = second_deriv_decay_check(1e-3, z, {8, 16});
  for (const auto& [n, v] : small.grid) CHECK(v <= 1e-8);
}

TEST_CASE("two-sample Kolmogorov-Smirnov") {
  Rng a(1), b(2);
  std::vector<double> x(800), y(800), shifted(800);
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = a.uniform();
    y[k] = b.uniform();
    shifted[k] = 0.15 + b.uniform();
  }
  CHECK(ks_two_sample(x, y).second > 0.01);
  CHECK(ks_two_sample(x, shifted).second < 1e-6);
  CHECK(ks_two_sample(x, x).first == 0.0);
}

TEST_CASE("verification suite") {
  SuiteConfig cfg;
  cfg.only = {"quad_mean_shift"};
  cfg.radius_n = 2;
  const auto one = run_checks(cfg);
  REQUIRE(one.size() == 1);
  CHECK(one.front().pass);
  const nlohmann::json report = report_json(one);
  CHECK(report.at("checks").size() == 1);
  for (const char* key : {"check", "params", "value", "target", "tolerance", "pass"})
    CHECK(report.at("checks")[0].contains(key));

  cfg.quad_tol = 1e-20;
  CHECK_FALSE(run_checks(cfg).front().pass);

  cfg.only = {"no_such_check"};
  CHECK_THROWS_AS(run_checks(cfg), std::invalid_argument);

  SuiteConfig all;
  all.replicas = 500;
  for (const CheckOutcome& o : run_checks(all)) {
    INFO(o.check);
    CHECK(o.pass);
  }
}

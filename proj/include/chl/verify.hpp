#pragma once

/// \file
/// Numerical checks of the slit-map identities (quadrature), asymptotic
/// claims (rate fits) and stochastic claims (seeded Monte Carlo).

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "chl/conformal.hpp"
#include "chl/process.hpp"
#include "chl/quadrature.hpp"

namespace chl {

/// Least-squares line through transformed (scale, error) samples.
struct RateFit {
  std::vector<std::pair<double, double>> grid;  // sorted by scale
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Points left out of the fit because the error sat at the rounding floor.
  std::size_t floor_limited = 0;
};

/// Fit of log(error) against log(scale).
RateFit fit_power_law(std::vector<std::pair<double, double>> grid);
/// Fit of log(error) against scale.
RateFit fit_exponential(std::vector<std::pair<double, double>> grid);

struct McSummary {
  std::size_t replicas = 0;
  Complex mean;
  Complex std;  // componentwise sample standard deviation
  double ci99_halfwidth = 0.0;
};

constexpr double kZ99 = 2.576;

McSummary summarize(const std::vector<Complex>& samples);
McSummary summarize(const std::vector<double>& samples);

/// -i 2 pi N^2 log(1 - delta^2), the average displacement integrated over x.
Complex mean_shift_closed_form(const CylinderParams& params);

/// Integral over x in [-pi N, pi N] of S_x(z) - z.
QuadratureResult quad_mean_shift(const CylinderParams& params, const Complex& z, double tol);

/// Integral over x in [a, b] of |S_x(z) - z|^2.
QuadratureResult quad_squared_shift(const CylinderParams& params, const Complex& z, double a,
                                    double b, double tol = 1e-10);
QuadratureResult quad_squared_shift(const CylinderParams& params, const Complex& z,
                                    double tol = 1e-10);

/// Integral over x in [-pi N, pi N] of |dS_x/dz (z) - 1|^2; Im z > 0.
QuadratureResult quad_squared_deriv(const CylinderParams& params, const Complex& z,
                                    double tol = 1e-10);

/// Errors |S^{N,delta(N,lambda)}_0(z) - sqrt(z^2 - lambda^2)| over the radii,
/// fitted on log-log axes.
RateFit slit_convergence_rate(double lambda, const Complex& z, const std::vector<double>& n_grid);

/// Residual of S_0(iy) against z - i N log(1 - delta^2) + i N delta^2 e^{iz/N}
/// over the heights; log(residual) fitted against y. Residuals below 1e-14
/// are counted as floor-limited and excluded.
RateFit farfield_expansion_check(const CylinderParams& params, const std::vector<double>& y_grid);

/// max over z of |eta_y^{-1} S_{x_1} ... S_{x_n} eta_y(z) - S_{x_1+y} ... S_{x_n+y}(z)|,
/// compared on the cylinder. The left side is evaluated through the literal
/// exponential/Cayley chain, the right side through the closed form.
double shift_commutation_check(const CylinderParams& params, const std::vector<double>& xs,
                               double y, const std::vector<Complex>& z_grid);

/// max over z and event prefixes of the cylinder distance between the
/// disk-coordinate and the cylinder-coordinate backward process.
double disk_equivalence_error(const EventLog& log, const std::vector<Complex>& z_grid);

/// Replicas of the backward cylinder process at (z, t): summary of
/// A_t(z) - z - drift(t).
McSummary mc_growth_check(const CylinderParams& params, const Complex& z, double t,
                          std::size_t replicas, std::uint64_t seed, unsigned threads = 0);

struct CouplingRow {
  double radius_n = 0.0;
  McSummary summary;  // sup over event times of |A^N - truncated SHL|^2
  std::vector<double> samples;
};

/// One master log at the largest radius drives every process in a replica;
/// for each N the log is restricted to |x| <= pi N and both the backward
/// cylinder process and the backward SHL truncated at pi N are evaluated.
/// A fixed `window` truncates the SHL side at that width for every N instead.
std::vector<CouplingRow> mc_coupling_convergence(double lambda, const Complex& z, double t,
                                                 const std::vector<double>& n_list,
                                                 std::size_t replicas, std::uint64_t seed,
                                                 unsigned threads = 0,
                                                 std::optional<double> window = std::nullopt);

/// Means non-increasing in N, except for at most one rise that stays within
/// the overlap of the two 99% intervals.
bool monotone_up_to_ci(const std::vector<CouplingRow>& rows);
/// Every successive mean is below the previous one by more than both
/// half-widths.
bool strictly_decreasing_beyond_ci(const std::vector<CouplingRow>& rows);
/// Fraction of replicas whose distance at rows[to] is below the one at rows[from].
double paired_decrease_fraction(const std::vector<CouplingRow>& rows, std::size_t from,
                                std::size_t to);

/// Integral over x in [0, pi N] of |d^2 S_x/dz^2 (z)|^2 with the second
/// derivative taken by central differences of cyl_slit; fitted on log-log axes.
RateFit second_deriv_decay_check(double lambda, const Complex& z, const std::vector<double>& n_list);

/// Integral over x in [0, infinity) of |d^2 phi_x/dz^2 (z)|^2 for the
/// half-plane slit, the value the cylinder integrals approach.
double halfplane_second_deriv_integral(double lambda, const Complex& z);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace chl

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "chl/conformal.hpp"

namespace chl {

struct QuadratureResult {
  Complex value;
  double abs_error_estimate = 0.0;
  std::size_t subdivisions = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_panels = 10000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of a complex
/// integrand over [a, b]. The interval is first split at every breakpoint
/// strictly inside (a, b); the panel with the largest error estimate is then
/// bisected until the summed estimate meets max(abs_tol, rel_tol |value|) or
/// the panel count reaches max_panels (converged = false).
QuadratureResult integrate(const std::function<Complex(double)>& f, double a, double b,
                           const std::vector<double>& breakpoints = {},
                           const QuadratureOptions& options = {});

}  // namespace chl

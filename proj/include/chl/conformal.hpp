#pragma once

/// \file
/// Slit maps on the upper half-plane and on the cylinder of radius N, the
/// exponential/Cayley chain that transports one to the other, and the
/// derivative of the cylinder slit map.
///
/// Everything here is a pure function templated on the real scalar type.
/// Cylinder points are represented by their lift to the upper half-plane;
/// `cyl_slit` is equivariant under z -> z + 2*pi*N.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace chl {

using Complex = std::complex<double>;

template <typename Real>
struct BasicCylinderParams {
  Real radius_n{};
  Real lambda{};
  Real delta{};

  /// Period of the cylinder, 2*pi*N.
  Real period() const { return 2 * std::numbers::pi_v<Real> * radius_n; }
  /// Half-width of the fundamental domain, pi*N.
  Real half_width() const { return std::numbers::pi_v<Real> * radius_n; }

  friend bool operator==(const BasicCylinderParams&, const BasicCylinderParams&) = default;
};

using CylinderParams = BasicCylinderParams<double>;

template <typename Real>
struct BasicHalfPlaneSlitParams {
  Real lambda{};
  Real x{};
};

using HalfPlaneSlitParams = BasicHalfPlaneSlitParams<double>;

namespace detail {

template <typename Real>
void require_finite(const std::complex<Real>& z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::domain_error(std::string(what) + ": non-finite argument");
}

// Clears a negative zero in the imaginary part so that boundary points take
// the branch reached from inside the half-plane.
template <typename Real>
std::complex<Real> upper(const std::complex<Real>& z) {
  return {z.real(), z.imag() + Real(0)};
}

// log(1 + q) accurate for small |q|; principal branch.
template <typename Real>
std::complex<Real> log1p(const std::complex<Real>& q) {
  const Real a = q.real();
  const Real b = q.imag();
  const Real modulus = std::log1p(a * (2 + a) + b * b) / 2;
  return {modulus, std::atan2(b, 1 + a)};
}

}  // namespace detail

/// delta(N, lambda) = 1 - 2/(1 + exp(lambda/N)) = tanh(lambda/(2N)).
template <typename Real>
Real delta_of(Real radius_n, Real lambda) {
  if (!(radius_n > 0) || !(lambda > 0))
    throw std::domain_error("delta_of: radius and slit length must be positive");
  return std::tanh(lambda / (2 * radius_n));
}

template <typename Real>
BasicCylinderParams<Real> make_cylinder(Real radius_n, Real lambda) {
  return {radius_n, lambda, delta_of(radius_n, lambda)};
}

/// Representative of x modulo 2*pi*N in [-pi*N, pi*N).
template <typename Real>
Real reduce_to_fundamental(const BasicCylinderParams<Real>& p, Real x) {
  const Real period = p.period();
  const Real half = p.half_width();
  Real r = x - period * std::floor((x + half) / period);
  if (r >= half) r -= period;
  if (r < -half) r += period;
  return r;
}

/// Cylinder-aware difference a - b: the real part is reduced to the
/// fundamental domain, so equal cylinder points give zero.
template <typename Real>
std::complex<Real> cyl_difference(const BasicCylinderParams<Real>& p,
                                  const std::complex<Real>& a,
                                  const std::complex<Real>& b) {
  const std::complex<Real> d = a - b;
  return {reduce_to_fundamental(p, d.real()), d.imag()};
}

/// f_N(z) = exp(-i z/N): cylinder to the exterior of the unit disk.
template <typename Real>
std::complex<Real> map_f(Real radius_n, const std::complex<Real>& z) {
  detail::require_finite(z, "map_f");
  const std::complex<Real> i(0, 1);
  return std::exp(-i * z / radius_n);
}

/// f_N^{-1}(w) = i N log w with the real part in [-pi*N, pi*N).
template <typename Real>
std::complex<Real> map_f_inv(Real radius_n, const std::complex<Real>& w) {
  detail::require_finite(w, "map_f_inv");
  if (w == std::complex<Real>(0))
    throw std::domain_error("map_f_inv: logarithm of zero");
  const Real modulus = std::log(std::abs(w));
  const Real half = std::numbers::pi_v<Real> * radius_n;
  Real re = -radius_n * std::arg(w);
  if (re >= half) re -= 2 * half;
  return {re, radius_n * modulus};
}

/// Cayley map g(w) = i (w - 1)/(w + 1): exterior of the disk to the half-plane.
template <typename Real>
std::complex<Real> map_g(const std::complex<Real>& w) {
  detail::require_finite(w, "map_g");
  if (w == std::complex<Real>(-1)) throw std::domain_error("map_g: pole at w = -1");
  const std::complex<Real> i(0, 1);
  return i * (w - Real(1)) / (w + Real(1));
}

/// g^{-1}(z) = (i + z)/(i - z). The point i is sent to infinity, which is
/// reported as a domain error.
template <typename Real>
std::complex<Real> map_g_inv(const std::complex<Real>& z) {
  detail::require_finite(z, "map_g_inv");
  const std::complex<Real> i(0, 1);
  if (z == i) throw std::domain_error("map_g_inv: pole at z = i");
  return (i + z) / (i - z);
}

/// Rotation r_x(w) = exp(i x/N) w.
template <typename Real>
std::complex<Real> rotate(Real radius_n, Real x, const std::complex<Real>& w) {
  return std::polar(Real(1), x / radius_n) * w;
}

/// Slit map at x: x + sqrt((z - x)^2 - lambda^2), branch mapping H onto H
/// minus the segment [x, x + i lambda].
template <typename Real>
std::complex<Real> halfplane_slit(const BasicHalfPlaneSlitParams<Real>& p,
                                  const std::complex<Real>& z) {
  detail::require_finite(z, "halfplane_slit");
  const std::complex<Real> d = detail::upper(z - p.x);
  // Each factor has argument in [0, pi/2], so the product stays in H and
  // behaves like d at infinity.
  return p.x + std::sqrt(d - p.lambda) * std::sqrt(d + p.lambda);
}

/// phi^delta(w) = sqrt(w^2 (1 - delta^2) - delta^2). Fixes i, sends 0 to i delta.
template <typename Real>
std::complex<Real> cyl_phi_delta(Real delta, const std::complex<Real>& w) {
  detail::require_finite(w, "cyl_phi_delta");
  const Real scale = std::sqrt((1 - delta) * (1 + delta));
  const Real base = delta / scale;
  const std::complex<Real> u = detail::upper(w);
  return scale * std::sqrt(u - base) * std::sqrt(u + base);
}

/// Displacement S_x(z) - z of the cylinder slit map written as a function of
/// eta = exp(i (z - x)/N), |eta| <= 1:
///   -i N log(1 - delta^2) + 2 i N log((1 + eta + R(eta))/2),
///   R(eta) = sqrt(1 - 2 (1 - 2 delta^2) eta + eta^2), R(0) = 1.
/// This is the chain f^{-1} r_x^{-1} g^{-1} phi^delta g r_x f after
/// rationalising g^{-1}, so it has no pole at the top of the cylinder.
template <typename Real>
std::complex<Real> cyl_slit_displacement(const BasicCylinderParams<Real>& p,
                                         const std::complex<Real>& eta) {
  const Real delta = p.delta;
  const Real c = 1 - 2 * delta * delta;
  const Real s = 2 * delta * std::sqrt((1 - delta) * (1 + delta));
  const std::complex<Real> root(c, s);
  // Both factors have non-negative real part on the closed unit disk.
  const std::complex<Real> r =
      std::sqrt(Real(1) - eta * root) * std::sqrt(Real(1) - eta * std::conj(root));
  // (1 + eta + R)/2 - 1 with R - 1 = (eta^2 - 2 c eta)/(R + 1).
  const std::complex<Real> q = (eta + eta * (eta - 2 * c) / (r + Real(1))) / Real(2);
  const std::complex<Real> i(0, 1);
  const Real n = p.radius_n;
  return -i * n * std::log1p(-delta * delta) + Real(2) * i * n * detail::log1p(q);
}

template <typename Real>
std::complex<Real> cyl_eta(const BasicCylinderParams<Real>& p, Real x,
                           const std::complex<Real>& z) {
  const Real s = reduce_to_fundamental(p, z.real() - x);
  return std::polar(std::exp(-z.imag() / p.radius_n), s / p.radius_n);
}

/// Cylinder slit map S^{N,delta}_x attaching a slit of length lambda at x,
/// evaluated on the lift to H: S_x(z + 2 pi N) = S_x(z) + 2 pi N.
template <typename Real>
std::complex<Real> cyl_slit(const BasicCylinderParams<Real>& p, Real x,
                            const std::complex<Real>& z) {
  detail::require_finite(z, "cyl_slit");
  std::complex<Real> w = z + cyl_slit_displacement(p, cyl_eta(p, x, z));
  // Boundary points land on the boundary up to rounding; larger negative
  // parts are left visible.
  const Real slack = 64 * std::numeric_limits<Real>::epsilon() * (std::abs(z) + p.radius_n + p.lambda);
  if (w.imag() < 0 && w.imag() > -slack) w.imag(0);
  return w;
}

/// Disk-coordinate slit psi_x = r_x^{-1} g^{-1} phi^delta g r_x, acting on
/// the exterior of the unit disk. Uses the Moebius chain literally; within
/// 1e-12 of the pole of g^{-1} it switches to the rationalised form
/// (w + 1 + Q)^2 / (4 (1 - delta^2) w).
template <typename Real>
std::complex<Real> disk_slit(const BasicCylinderParams<Real>& p, Real x,
                             const std::complex<Real>& w) {
  const std::complex<Real> i(0, 1);
  const std::complex<Real> rotated = rotate(p.radius_n, x, w);
  const std::complex<Real> v = cyl_phi_delta(p.delta, map_g(rotated));
  std::complex<Real> image;
  if (std::abs(i - v) > Real(1e-12)) {
    image = map_g_inv(v);
  } else {
    const Real delta = p.delta;
    const Real c = 1 - 2 * delta * delta;
    const std::complex<Real> root(c, 2 * delta * std::sqrt((1 - delta) * (1 + delta)));
    const std::complex<Real> eta = Real(1) / rotated;
    const std::complex<Real> r =
        std::sqrt(Real(1) - eta * root) * std::sqrt(Real(1) - eta * std::conj(root));
    const std::complex<Real> half = (Real(1) + eta + r) / Real(2);
    image = rotated * half * half / ((1 - delta) * (1 + delta));
  }
  return rotate(p.radius_n, -x, image);
}

/// S_x as the literal composition f^{-1} r_x^{-1} g^{-1} phi^delta g r_x f.
/// The result lies in the fundamental domain.
template <typename Real>
std::complex<Real> cyl_slit_chain(const BasicCylinderParams<Real>& p, Real x,
                                  const std::complex<Real>& z) {
  return map_f_inv(p.radius_n, disk_slit(p, x, map_f(p.radius_n, z)));
}

/// dS_x/dz = 1/sqrt((1 - delta^2) - delta^2 / tan^2((z - x)/(2N))).
/// Interior points only.
template <typename Real>
std::complex<Real> cyl_slit_deriv(const BasicCylinderParams<Real>& p, Real x,
                                  const std::complex<Real>& z) {
  detail::require_finite(z, "cyl_slit_deriv");
  if (!(z.imag() > 0))
    throw std::domain_error("cyl_slit_deriv: singular on the boundary");
  const std::complex<Real> eta = cyl_eta(p, x, z);
  // tan((z - x)/2N) = i (1 - eta)/(1 + eta)
  const std::complex<Real> ratio = (Real(1) + eta) / (Real(1) - eta);
  const Real d2 = p.delta * p.delta;
  return Real(1) / std::sqrt((1 - d2) + d2 * ratio * ratio);
}

/// Cylinder shift eta_y = f^{-1} r_y f (a translation by -y modulo 2 pi N).
template <typename Real>
std::complex<Real> cylinder_shift(const BasicCylinderParams<Real>& p, Real y,
                                  const std::complex<Real>& z) {
  return map_f_inv(p.radius_n, rotate(p.radius_n, y, map_f(p.radius_n, z)));
}

template <typename Real>
std::complex<Real> cylinder_shift_inv(const BasicCylinderParams<Real>& p, Real y,
                                      const std::complex<Real>& z) {
  return cylinder_shift(p, -y, z);
}

}  // namespace chl

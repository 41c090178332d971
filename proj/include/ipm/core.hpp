#pragma once

// Core state space of the stationary incompressible-porous-media (IPM)
// differential inclusion: states z = (rho, v, m), the constitutive set
// K = { |rho| = 1, m = rho v }, and the wave cone of the linear system
//
//   div m = 0,   div v = 0,   curl(v + (0, rho)) = 0.
//
// Everything here is a pure function over small value types; the tolerance
// policy defined here is shared by every other header.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ipm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Counterclockwise perpendicular, (x, y) -> (-y, x).
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double max_abs(Vec2 a) { return std::max(std::abs(a.x), std::abs(a.y)); }

/// A point z = (rho, v, m) of the five-dimensional state space:
/// rho is the fluid density, v the velocity, m the relaxed flux.
struct State {
  double rho = 0.0;
  Vec2 v{};
  Vec2 m{};

  friend State operator+(const State& a, const State& b) {
    return {a.rho + b.rho, a.v + b.v, a.m + b.m};
  }
  friend State operator-(const State& a, const State& b) {
    return {a.rho - b.rho, a.v - b.v, a.m - b.m};
  }
  friend State operator*(double s, const State& a) {
    return {s * a.rho, s * a.v, s * a.m};
  }
};

inline double max_abs(const State& z) {
  return std::max(std::abs(z.rho), std::max(max_abs(z.v), max_abs(z.m)));
}

inline bool is_finite(const State& z) {
  return std::isfinite(z.rho) && std::isfinite(z.v.x) && std::isfinite(z.v.y) &&
         std::isfinite(z.m.x) && std::isfinite(z.m.y);
}

enum class BoundaryPolicy { strict, closed };

/// Equality tolerance for scalar conditions; vector conditions are checked
/// componentwise. boundary_policy selects how non-strict inequalities treat
/// the tolerance band at a set boundary.
struct ToleranceConfig {
  double eq_tol = 1e-9;
  BoundaryPolicy boundary_policy = BoundaryPolicy::closed;
};

/// max(| |rho|-1 |, |m - rho v|_inf): zero exactly on K.
inline double k_residual(const State& z) {
  const double drho = std::abs(std::abs(z.rho) - 1.0);
  return std::max(drho, max_abs(z.m - z.rho * z.v));
}

/// Membership in the constitutive set K = { |rho| = 1, m = rho v }.
inline bool in_K(const State& z, const ToleranceConfig& tol = {}) {
  return k_residual(z) <= tol.eq_tol;
}

/// max residual of the three wave-cone conditions
///   |v|^2 + rho v2 = 0,   m . v_perp = 0,   m . (v + (0, rho)) = 0.
inline double wave_cone_residual(const State& z) {
  const double balance = norm2(z.v) + z.rho * z.v.y;
  const double twist = dot(z.m, perp(z.v));
  const double flux = dot(z.m, z.v + Vec2{0.0, z.rho});
  return std::max(std::abs(balance), std::max(std::abs(twist), std::abs(flux)));
}

/// Membership in the wave cone Lambda.
inline bool in_wave_cone(const State& z, const ToleranceConfig& tol = {}) {
  return wave_cone_residual(z) <= tol.eq_tol;
}

// ---------------------------------------------------------------------------
// Parametrized branches of the wave cone.
//
// Lambda consists exactly of the states
//   (rho, (rho/2)(e - (0,1)), ell (e - (0,1)))   rho != 0, |e| = 1, e != (0,1)
//   (rho, 0, (m1, 0))                            rho != 0
//   (0, 0, m)                                    m arbitrary.
// ---------------------------------------------------------------------------

enum class WaveForm { sheared, horizontal_flux, pure_flux };

struct WaveDirection {
  WaveForm form = WaveForm::pure_flux;
  double rho = 0.0;  // sheared, horizontal_flux; must be nonzero there
  Vec2 e{};          // sheared; unit vector != (0,1)
  double ell = 0.0;  // sheared
  double m1 = 0.0;   // horizontal_flux
  Vec2 m{};          // pure_flux

  static WaveDirection sheared(double rho, Vec2 e, double ell) {
    WaveDirection w;
    w.form = WaveForm::sheared;
    w.rho = rho;
    w.e = e;
    w.ell = ell;
    return w;
  }
  static WaveDirection horizontal_flux(double rho, double m1) {
    WaveDirection w;
    w.form = WaveForm::horizontal_flux;
    w.rho = rho;
    w.m1 = m1;
    return w;
  }
  static WaveDirection pure_flux(Vec2 m) {
    WaveDirection w;
    w.form = WaveForm::pure_flux;
    w.m = m;
    return w;
  }
};

/// Evaluates the branch formula of a WaveDirection. Throws
/// std::invalid_argument when the branch parameters are out of domain
/// (|e| != 1, e = (0,1), or rho = 0 where it must not vanish).
inline State realize_wave_direction(const WaveDirection& w, const ToleranceConfig& tol = {}) {
  switch (w.form) {
    case WaveForm::sheared: {
      if (w.rho == 0.0) throw std::invalid_argument("sheared wave direction requires rho != 0");
      if (std::abs(norm2(w.e) - 1.0) > tol.eq_tol)
        throw std::invalid_argument("sheared wave direction requires |e| = 1");
      const Vec2 d = w.e - Vec2{0.0, 1.0};
      if (max_abs(d) <= tol.eq_tol)
        throw std::invalid_argument("sheared wave direction requires e != (0,1)");
      return {w.rho, (w.rho / 2.0) * d, w.ell * d};
    }
    case WaveForm::horizontal_flux:
      if (w.rho == 0.0)
        throw std::invalid_argument("horizontal-flux wave direction requires rho != 0");
      return {w.rho, Vec2{0.0, 0.0}, Vec2{w.m1, 0.0}};
    case WaveForm::pure_flux:
      return {0.0, Vec2{0.0, 0.0}, w.m};
  }
  throw std::invalid_argument("unknown wave form");
}

/// Recovers a plane-wave covector xi for z in Lambda, following the case
/// split of the cone computation: xi = v + (0, rho) when that vector is
/// nonzero, else v_perp, else m_perp, else (1,1). Diagnostics only.
inline std::optional<Vec2> recover_xi(const State& z, const ToleranceConfig& tol = {}) {
  if (!in_wave_cone(z, tol)) return std::nullopt;
  const Vec2 shifted = z.v + Vec2{0.0, z.rho};
  if (std::abs(z.rho) > tol.eq_tol && max_abs(shifted) > tol.eq_tol) return shifted;
  if (std::abs(z.rho) > tol.eq_tol) return perp(z.v);
  if (max_abs(z.m) > tol.eq_tol) return perp(z.m);
  return Vec2{1.0, 1.0};
}

namespace detail {

// Draws one wave direction: branch uniform over the three forms,
// rho uniform on [-2,2] away from 0, e uniform on the circle away from
// (0,1), ell / m1 uniform on [-2,2], m uniform on [-2,2]^2.
inline WaveDirection sample_wave_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  auto nonzero_rho = [&]() {
    double r = box(rng);
    while (std::abs(r) < 1e-3) r = box(rng);
    return r;
  };
  const int branch = static_cast<int>(u01(rng) * 3.0) % 3;
  if (branch == 0) {
    const double rho = nonzero_rho();
    // angle excluding a band of half-width 1e-3 around (0,1) at pi/2
    constexpr double kPi = 3.14159265358979323846;
    double theta = kPi / 2.0 + 1e-3 + u01(rng) * (2.0 * kPi - 2e-3);
    const Vec2 e{std::cos(theta), std::sin(theta)};
    return WaveDirection::sheared(rho, e, box(rng));
  }
  if (branch == 1) return WaveDirection::horizontal_flux(nonzero_rho(), box(rng));
  return WaveDirection::pure_flux(Vec2{box(rng), box(rng)});
}

}  // namespace detail

/// Deterministic sampler over the wave cone: `count` states drawn from the
/// documented branch distributions. Same seed, same list.
inline std::vector<State> sample_wave_cone(std::uint64_t seed, int count) {
  if (count < 0) throw std::invalid_argument("sample_wave_cone: count must be >= 0");
  std::mt19937_64 rng(seed);
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(realize_wave_direction(detail::sample_wave_direction(rng)));
  return out;
}

}  // namespace ipm

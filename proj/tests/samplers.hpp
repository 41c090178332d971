#pragma once

// Deterministic samplers over K and the hull regions, plus constructive
// samplers for Lambda-compatible pairs. Test support only; everything is
// exact arithmetic so the sampled points satisfy their defining relations
// to rounding accuracy.

#include <random>
#include <stdexcept>

#include "ipm/core.hpp"
#include "ipm/hull.hpp"

namespace ipm::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec2 unit_vector(std::mt19937_64& rng) {
  const double theta = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
  return {std::cos(theta), std::sin(theta)};
}

inline Vec2 disc_point(std::mt19937_64& rng, Vec2 center, double radius) {
  const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
  return center + r * unit_vector(rng);
}

inline State sample_on_k(std::mt19937_64& rng) {
  const double sign = uniform(rng, -1.0, 1.0) > 0.0 ? 1.0 : -1.0;
  const Vec2 v{uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
  return {sign, v, sign * v};
}

inline State sample_x1(std::mt19937_64& rng, bool boundary = false) {
  const double rho = uniform(rng, -0.999, 0.999);
  const Vec2 e = boundary ? unit_vector(rng) : disc_point(rng, {0.0, 0.0}, 1.0);
  return {rho, {0.0, 0.0}, (1.0 - rho * rho) / 2.0 * (e - Vec2{0.0, 1.0})};
}

// X2 (sign = +1) or X4 (sign = -1); k uniform over the admissible interval.
inline State sample_flexible(std::mt19937_64& rng, double sign) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double rho = uniform(rng, -0.999, 0.999);
    const double radius = (1.0 + sign * rho) / 2.0;
    if (radius < 0.06) continue;
    const Vec2 v = disc_point(rng, {0.0, -sign * radius}, radius);
    if (norm(v) < 0.1) continue;
    const double b = k_bound_value(rho, v);
    if (sign * b < 1.0) continue;
    const double k = sign > 0 ? uniform(rng, 1.0, b) : uniform(rng, b, -1.0);
    return {rho, v, k * v};
  }
  throw std::runtime_error("sample_flexible: rejection budget exhausted");
}

inline State sample_x2(std::mt19937_64& rng) { return sample_flexible(rng, 1.0); }
inline State sample_x4(std::mt19937_64& rng) { return sample_flexible(rng, -1.0); }

// Rigid-region point: k pinned to b(rho, v), with a margin to the window
// edges so tolerance bands cannot reclassify it.
inline State sample_x3(std::mt19937_64& rng, double margin = 0.05) {
  for (int attempt = 0; attempt < 5000; ++attempt) {
    const double rho = uniform(rng, -0.95, 0.95);
    Vec2 v = unit_vector(rng);
    v = uniform(rng, 0.1, 2.0) * v;
    const double b = k_bound_value(rho, v);
    if (b <= -1.0 + margin || b >= 1.0 - margin) continue;
    return {rho, v, b * v};
  }
  throw std::runtime_error("sample_x3: rejection budget exhausted");
}

inline State sample_hull_point(std::mt19937_64& rng) {
  switch (static_cast<int>(uniform(rng, 0.0, 5.0)) % 5) {
    case 0: return sample_on_k(rng);
    case 1: return sample_x1(rng, uniform(rng, 0.0, 1.0) < 0.3);
    case 2: return sample_x2(rng);
    case 3: return sample_x3(rng);
    default: return sample_x4(rng);
  }
}

// A pair z1, z2 in X3 with z1 - z2 in the wave cone: the difference rides
// the shear direction w = c v with c = -t v2/|v|^2.
inline std::pair<State, State> sample_x3_lambda_pair(std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 20000; ++attempt) {
    const State z2 = sample_x3(rng, 0.1);
    if (std::abs(z2.v.y) < 0.02) continue;
    const double t = uniform(rng, -0.3, 0.3);
    if (std::abs(t) < 1e-3) continue;
    const double c = -t * z2.v.y / norm2(z2.v);
    const Vec2 v1 = (1.0 + c) * z2.v;
    const double rho1 = z2.rho + t;
    if (std::abs(rho1) > 0.98 || norm(v1) < 0.05) continue;
    const double b1 = k_bound_value(rho1, v1);
    if (b1 <= -0.95 || b1 >= 0.95) continue;
    const State z1{rho1, v1, b1 * v1};
    if (!in_wave_cone(z1 - z2)) continue;
    return {z1, z2};
  }
  throw std::runtime_error("sample_x3_lambda_pair: rejection budget exhausted");
}

// z1 in X1 and z2 in X2 u X3 u X4 with z2 - z1 in the wave cone; the shear
// direction must be collinear with m1, or free when m1 = 0.
inline std::pair<State, State> sample_x1_to_kv_pair(std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 20000; ++attempt) {
    const State z1 = sample_x1(rng);
    Vec2 delta;  // e_unit - (0,1)
    if (norm(z1.m) < 1e-9) {
      Vec2 e = unit_vector(rng);
      if (std::abs(e.x) < 1e-3 && e.y > 0.0) continue;
      delta = e - Vec2{0.0, 1.0};
    } else {
      const Vec2 dir = (1.0 / norm(z1.m)) * z1.m;
      const double tau = -2.0 * dir.y;
      if (std::abs(tau) < 1e-6) continue;
      delta = tau * dir;
    }
    const double t = uniform(rng, -1.0, 1.0);
    if (std::abs(t) < 0.05) continue;
    const double rho2 = z1.rho + t;
    if (std::abs(rho2) > 0.999) continue;
    const Vec2 v2 = (t / 2.0) * delta;
    if (norm(v2) < 1e-4) continue;
    KRange kr;
    try {
      kr = k_range(rho2, v2);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (kr.kind == KRange::Kind::empty) continue;
    const double k = uniform(rng, kr.lo, kr.hi);
    const double alpha = norm2(delta) > 0.0 ? dot(z1.m, delta) / norm2(delta) : 0.0;
    const double ell = k * t / 2.0 - alpha;
    const State z2{rho2, v2, z1.m + ell * delta};
    if (!in_wave_cone(z2 - z1)) continue;
    const Region r = classify(z2);
    if (r.tag != RegionTag::X2 && r.tag != RegionTag::X3 && r.tag != RegionTag::X4) continue;
    return {z1, z2};
  }
  throw std::runtime_error("sample_x1_to_kv_pair: rejection budget exhausted");
}

// z1 in X2 and z2 in X4 with z1 - z2 in the wave cone. Such pairs force all
// four states onto one velocity ray, with a1 - a2 = -(rho1 - rho2) u2.
inline std::pair<State, State> sample_x2_x4_lambda_pair(std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 50000; ++attempt) {
    Vec2 u = unit_vector(rng);
    if (std::abs(u.y) < 0.1) continue;
    const double rho1 = uniform(rng, -0.95, 0.95);
    const double rho2 = uniform(rng, -0.95, 0.95);
    // X4 amplitude: a2 u2 in (0, (1 - rho2) u2^2]
    const double a2_max = (1.0 - rho2) * u.y;  // same sign as u.y
    const double a2 = uniform(rng, 0.05, 0.95) * a2_max;
    const double a1 = a2 - (rho1 - rho2) * u.y;
    const Vec2 v1 = a1 * u;
    const Vec2 v2 = a2 * u;
    if (norm(v1) < 0.05 || norm(v2) < 0.05) continue;
    if (a1 * u.y >= 0.0) continue;  // X2 needs v2-component negative
    const double b1 = k_bound_value(rho1, v1);
    const double b2 = k_bound_value(rho2, v2);
    if (b1 < 1.0 || b2 > -1.0) continue;
    const State z1{rho1, v1, uniform(rng, 1.0, b1) * v1};
    const State z2{rho2, v2, uniform(rng, b2, -1.0) * v2};
    if (!in_wave_cone(z1 - z2)) continue;
    return {z1, z2};
  }
  throw std::runtime_error("sample_x2_x4_lambda_pair: rejection budget exhausted");
}

}  // namespace ipm::testing

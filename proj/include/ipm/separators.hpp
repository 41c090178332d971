#pragma once

// The four Lambda-convex separating functions of the hull computation.
// G1, G3, G4 are Lambda-convex; G2 is Lambda-affine. All four vanish on K,
// so a strictly positive value certifies a point outside the Lambda-convex
// hull (and hence outside the lamination convex hull).

#include <array>
#include <span>
#include <stdexcept>

#include "ipm/core.hpp"

namespace ipm {

enum class SeparatorId { G1, G2, G3, G4 };

inline const char* to_string(SeparatorId id) {
  switch (id) {
    case SeparatorId::G1: return "G1";
    case SeparatorId::G2: return "G2";
    case SeparatorId::G3: return "G3";
    case SeparatorId::G4: return "G4";
  }
  return "?";
}

constexpr std::array<SeparatorId, 4> kAllSeparators{SeparatorId::G1, SeparatorId::G2,
                                                    SeparatorId::G3, SeparatorId::G4};

/// G1 = |m - rho v + (0, (1-rho^2)/2)| - (1-rho^2)/2
/// G2 = m . v_perp
/// G3 = -[v - m] . [v + (0, 1+rho)] + |v - m|^2 / 2
/// G4 = -[v + m] . [v - (0, 1-rho)] + |v + m|^2 / 2
inline double eval_separator(SeparatorId id, const State& z) {
  const double w = (1.0 - z.rho * z.rho) / 2.0;
  switch (id) {
    case SeparatorId::G1:
      return norm(z.m - z.rho * z.v + Vec2{0.0, w}) - w;
    case SeparatorId::G2:
      return dot(z.m, perp(z.v));
    case SeparatorId::G3: {
      const Vec2 d = z.v - z.m;
      return -dot(d, z.v + Vec2{0.0, 1.0 + z.rho}) + norm2(d) / 2.0;
    }
    case SeparatorId::G4: {
      const Vec2 s = z.v + z.m;
      return -dot(s, z.v - Vec2{0.0, 1.0 - z.rho}) + norm2(s) / 2.0;
    }
  }
  throw std::invalid_argument("unknown separator");
}

struct ConvexityReport {
  double min_second_difference = 0.0;
  double max_abs_second_difference = 0.0;
  bool pass = false;
};

/// Centered second differences of t -> G(z0 + t dir) over the grid ts.
/// For G1, G3, G4 the test passes when the minimum raw second difference is
/// >= -eq_tol; for the affine G2 every second difference must vanish to
/// eq_tol. dir must lie in the wave cone.
inline ConvexityReport check_convex_along(SeparatorId id, const State& z0, const State& dir,
                                          std::span<const double> ts,
                                          const ToleranceConfig& tol = {}) {
  if (!in_wave_cone(dir, tol))
    throw std::invalid_argument("check_convex_along: direction not in the wave cone");
  if (ts.size() < 3)
    throw std::invalid_argument("check_convex_along: need at least three grid points");
  ConvexityReport rep;
  rep.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    const double fm = eval_separator(id, z0 + ts[i - 1] * dir);
    const double f0 = eval_separator(id, z0 + ts[i] * dir);
    const double fp = eval_separator(id, z0 + ts[i + 1] * dir);
    const double d2 = fp - 2.0 * f0 + fm;
    rep.min_second_difference = std::min(rep.min_second_difference, d2);
    rep.max_abs_second_difference = std::max(rep.max_abs_second_difference, std::abs(d2));
  }
  if (id == SeparatorId::G2)
    rep.pass = rep.max_abs_second_difference <= tol.eq_tol;
  else
    rep.pass = rep.min_second_difference >= -tol.eq_tol;
  return rep;
}

/// Default 11-point equispaced grid on [-1, 1].
inline std::vector<double> default_convexity_grid() {
  std::vector<double> ts(11);
  for (int i = 0; i < 11; ++i) ts[static_cast<std::size_t>(i)] = -1.0 + 0.2 * i;
  return ts;
}

struct SeparatorValue {
  SeparatorId id = SeparatorId::G1;
  double value = 0.0;
  bool separates = false;
};

struct SeparationReport {
  std::array<SeparatorValue, 4> entries{};

  bool any() const {
    for (const auto& e : entries)
      if (e.separates) return true;
    return false;
  }
};

/// Evaluates all four separators at z. G1, G3, G4 separate when positive;
/// G2 separates two-sidedly since both +-G2 are Lambda-convex and vanish
/// on K. Any firing entry certifies z outside the hull.
inline SeparationReport separation_bound(const State& z, const ToleranceConfig& tol = {}) {
  SeparationReport rep;
  for (std::size_t i = 0; i < kAllSeparators.size(); ++i) {
    const SeparatorId id = kAllSeparators[i];
    const double value = eval_separator(id, z);
    const bool fires = (id == SeparatorId::G2) ? std::abs(value) > tol.eq_tol : value > tol.eq_tol;
    rep.entries[i] = SeparatorValue{id, value, fires};
  }
  return rep;
}

}  // namespace ipm

#pragma once

// Closed-form membership test for the lamination convex hull of stationary
// IPM. The hull is the union of four sets:
//
//   X1 = { (rho, 0, (1-rho^2)/2 (e - (0,1))) : |rho| <= 1, |e| <= 1 }
//   X2 = { (rho, v, k v) : |rho| <= 1, v != 0, 1 <= k <= b(rho, v) }
//   X3 = { (rho, v, k v) : |rho| <  1, v != 0, -1 < k = b(rho, v) < 1 }
//   X4 = { (rho, v, k v) : |rho| <= 1, v != 0, b(rho, v) <= k <= -1 }
//
// with b(rho, v) = rho - (1 - rho^2) v2 / |v|^2. X2 and X4 project onto the
// two cones |v|^2 + (rho +- 1) v2 <= 0 where k ranges over an interval (the
// flexible region); outside them k is pinned to b (the rigid region X3).

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include "ipm/core.hpp"

namespace ipm {

enum class RegionTag { OnK, X1, X2, X3, X4, Outside };

inline const char* to_string(RegionTag t) {
  switch (t) {
    case RegionTag::OnK: return "OnK";
    case RegionTag::X1: return "X1";
    case RegionTag::X2: return "X2";
    case RegionTag::X3: return "X3";
    case RegionTag::X4: return "X4";
    case RegionTag::Outside: return "Outside";
  }
  return "?";
}

/// Classification result. k is the flux proportionality (present when v != 0
/// and m is parallel to v), e the X1 disc parameter, k_bound the quantity
/// b(rho, v) (present when v != 0).
struct Region {
  RegionTag tag = RegionTag::Outside;
  std::optional<double> k;
  std::optional<Vec2> e;
  std::optional<double> k_bound;
};

/// The power balance |v|^2 + rho v2: frictional dissipation against
/// gravitational work.
inline double power_balance(const State& z) { return norm2(z.v) + z.rho * z.v.y; }

/// b(rho, v) = rho - (1 - rho^2) v2 / |v|^2. Requires v != 0.
inline double k_bound_value(double rho, Vec2 v) {
  return rho - (1.0 - rho * rho) * v.y / norm2(v);
}

/// Scale-robust parallelism test |m . v_perp| <= tol (1 + |m||v|).
inline bool m_parallel_v(Vec2 m, Vec2 v, const ToleranceConfig& tol = {}) {
  return std::abs(dot(m, perp(v))) <= tol.eq_tol * (1.0 + norm(m) * norm(v));
}

enum class Cone { upper, lower };

/// Cone conditions |v|^2 + (rho+1) v2 <= 0 (upper, the X2 projection) and
/// |v|^2 + (rho-1) v2 <= 0 (lower, the X4 projection).
inline bool in_cone(const State& z, Cone which, const ToleranceConfig& tol = {}) {
  const double s = (which == Cone::upper) ? 1.0 : -1.0;
  const double value = norm2(z.v) + (z.rho + s) * z.v.y;
  const double band = (tol.boundary_policy == BoundaryPolicy::closed) ? tol.eq_tol : -tol.eq_tol;
  return value <= band;
}

/// Total classifier. Precedence at shared boundaries: OnK first; with v ~ 0
/// the X1 branch; otherwise X2 and X4 absorb their closed boundaries
/// (k = +-1 and k = b) and X3 keeps only the strict interior.
inline Region classify(const State& z, const ToleranceConfig& tol = {}) {
  Region r;
  if (in_K(z, tol)) {
    r.tag = RegionTag::OnK;
    const double vv = norm2(z.v);
    if (vv > tol.eq_tol * tol.eq_tol) {
      r.k = dot(z.m, z.v) / vv;
      r.k_bound = k_bound_value(z.rho, z.v);
    }
    return r;
  }
  if (std::abs(z.rho) > 1.0 + tol.eq_tol) return r;  // Outside

  if (norm(z.v) <= tol.eq_tol) {
    // X1 branch: m = (1-rho^2)/2 (e - (0,1)) for some |e| <= 1.
    const double w = 1.0 - z.rho * z.rho;
    if (std::abs(std::abs(z.rho) - 1.0) <= tol.eq_tol) {
      // Degenerate disc: the formula forces m = 0.
      if (max_abs(z.m) <= tol.eq_tol) {
        r.tag = RegionTag::X1;
        r.e = Vec2{0.0, 1.0};
      }
      return r;
    }
    const Vec2 e = (2.0 / w) * z.m + Vec2{0.0, 1.0};
    if (norm(e) <= 1.0 + tol.eq_tol) {
      r.tag = RegionTag::X1;
      r.e = e;
    }
    return r;
  }

  // v != 0: membership requires m = k v.
  if (!m_parallel_v(z.m, z.v, tol)) return r;
  const double k = dot(z.m, z.v) / norm2(z.v);
  const double b = k_bound_value(z.rho, z.v);
  r.k = k;
  r.k_bound = b;
  if (k >= 1.0 - tol.eq_tol && k <= b + tol.eq_tol) {
    r.tag = RegionTag::X2;
  } else if (k <= -1.0 + tol.eq_tol && k >= b - tol.eq_tol) {
    r.tag = RegionTag::X4;
  } else if (std::abs(k - b) <= tol.eq_tol && k > -1.0 + tol.eq_tol && k < 1.0 - tol.eq_tol) {
    r.tag = RegionTag::X3;
  }
  return r;
}

/// Admissible range of the proportionality constant k at (rho, v).
struct KRange {
  enum class Kind { flexible, rigid, empty };
  Kind kind = Kind::empty;
  double lo = 0.0;
  double hi = 0.0;
};

/// Flexible [1, b] when b >= 1, flexible [b, -1] when b <= -1, rigid {b}
/// in between. Throws on v = 0; |rho| > 1 yields an empty range.
inline KRange k_range(double rho, Vec2 v, const ToleranceConfig& tol = {}) {
  if (norm(v) <= tol.eq_tol) throw std::invalid_argument("k_range requires v != 0");
  KRange out;
  if (std::abs(rho) > 1.0 + tol.eq_tol) return out;  // empty
  const double b = k_bound_value(rho, v);
  if (b >= 1.0 - tol.eq_tol) {
    out.kind = KRange::Kind::flexible;
    out.lo = std::min(1.0, b);
    out.hi = std::max(1.0, b);
  } else if (b <= -1.0 + tol.eq_tol) {
    out.kind = KRange::Kind::flexible;
    out.lo = std::min(b, -1.0);
    out.hi = std::max(b, -1.0);
  } else if (std::abs(std::abs(rho) - 1.0) <= tol.eq_tol) {
    out.kind = KRange::Kind::rigid;
    out.lo = out.hi = rho;
  } else {
    out.kind = KRange::Kind::rigid;
    out.lo = out.hi = b;
  }
  return out;
}

}  // namespace ipm

#pragma once

// Constructive laminate decompositions: every hull point splits into a
// binary tree of Lambda-compatible convex combinations whose leaves lie
// in K. At most three levels are ever needed:
//
//   * k = b(rho, v) points (X3 and the closed X2/X4 edges) split in one
//     step into two K points, with the shear w = -(v2/|v|^2) v;
//   * X1 boundary points (|e| = 1) split the same way with v = 0 and
//     w = (e - (0,1))/2; interior points first ride a pure-flux chord
//     to two boundary points;
//   * the cone vertices k = 1 and k = -1 split into one K point and a
//     rest state (psi, 0, 0), which is an X1 point;
//   * interior k slides along the pure-flux direction (0, 0, dm), which
//     is always in the wave cone, between the k = 1 (or k = -1) point
//     and the k = b point over the same (rho, v).

#include <memory>
#include <stdexcept>
#include <vector>

#include "ipm/core.hpp"
#include "ipm/hull.hpp"
#include "ipm/separators.hpp"

namespace ipm {

struct LaminateNode;

struct LaminateSplit {
  double lambda = 0.5;  // weight of the left child, in (0,1)
  std::unique_ptr<LaminateNode> left;
  std::unique_ptr<LaminateNode> right;
};

struct LaminateNode {
  State point{};
  std::optional<LaminateSplit> split;  // absent iff leaf

  bool is_leaf() const { return !split.has_value(); }
  LaminateNode clone() const;
};

inline LaminateNode make_leaf(const State& z) { return LaminateNode{z, std::nullopt}; }

inline LaminateNode make_split(const State& z, double lambda, LaminateNode left,
                               LaminateNode right) {
  LaminateNode n;
  n.point = z;
  n.split.emplace();
  n.split->lambda = lambda;
  n.split->left = std::make_unique<LaminateNode>(std::move(left));
  n.split->right = std::make_unique<LaminateNode>(std::move(right));
  return n;
}

inline LaminateNode LaminateNode::clone() const {
  if (is_leaf()) return make_leaf(point);
  return make_split(point, split->lambda, split->left->clone(), split->right->clone());
}

/// Thrown by decompose for points outside the hull; carries the separator
/// evaluations so callers can report which certificate fired.
class OutsideHullError : public std::runtime_error {
 public:
  OutsideHullError(std::string msg, SeparationReport rep)
      : std::runtime_error(std::move(msg)), separation_(rep) {}
  const SeparationReport& separation() const { return separation_; }

 private:
  SeparationReport separation_;
};

/// Counts uses of the "membership certified, constructive tree unavailable"
/// fallback. The pure-flux interpolation makes the construction total, so
/// this stays at zero; the acceptance suite asserts it.
inline long& decompose_fallback_count() {
  static long count = 0;
  return count;
}

namespace detail {

// One split of (rho, v, rho v + (1-rho^2) w) into two K points, valid when
// (2, 2w, 2v - 2 rho w) lies in the wave cone.
inline LaminateNode first_laminate_split(const State& z, Vec2 v, Vec2 w) {
  const double rho = z.rho;
  const Vec2 a = v + (1.0 - rho) * w;
  const Vec2 c = v - (1.0 + rho) * w;
  LaminateNode left = make_leaf(State{1.0, a, a});
  LaminateNode right = make_leaf(State{-1.0, c, -c});
  return make_split(z, (1.0 + rho) / 2.0, std::move(left), std::move(right));
}

// X1 point with boundary parameter |e| = 1: single split with v = 0.
inline LaminateNode decompose_x1_boundary(const State& z, Vec2 e) {
  const double n = norm(e);
  if (n > 0.0) e = (1.0 / n) * e;  // snap to the unit circle
  const Vec2 w = 0.5 * (e - Vec2{0.0, 1.0});
  return first_laminate_split(z, Vec2{0.0, 0.0}, w);
}

inline LaminateNode decompose_x1(const State& z, Vec2 e, const ToleranceConfig& tol) {
  if (norm(e) >= 1.0 - 1e-12) return decompose_x1_boundary(z, e);
  // Interior of the disc: pure-flux chord through e in the direction (1,0),
  // then the boundary construction on both ends.
  const double s = std::sqrt(1.0 - e.y * e.y);
  const Vec2 ep{s, e.y};
  const Vec2 em{-s, e.y};
  const double lambda = (e.x + s) / (2.0 * s);
  const double w = (1.0 - z.rho * z.rho) / 2.0;
  const State zp{z.rho, {0.0, 0.0}, w * (ep - Vec2{0.0, 1.0})};
  const State zm{z.rho, {0.0, 0.0}, w * (em - Vec2{0.0, 1.0})};
  (void)tol;
  return make_split(z, lambda, decompose_x1_boundary(zp, ep), decompose_x1_boundary(zm, em));
}

// Cone vertex k = sign: splits into one K point and the rest state
// (psi, 0, 0) on the rho-axis, which is an X1 point with e = (0,1).
inline LaminateNode decompose_cone_vertex(const State& z, double sign,
                                          const ToleranceConfig& tol) {
  const double rho = z.rho;
  const Vec2 v = z.v;
  const double vv = norm2(v);
  const double denom = vv - sign * (1.0 - sign * rho) * v.y;
  const double lambda = vv / denom;
  // The weight degenerates only when the point already sits on K to
  // rounding accuracy.
  if (!(lambda > 0.0 && lambda < 1.0)) return make_leaf(z);
  const Vec2 u = (1.0 / lambda) * v;
  LaminateNode left = make_leaf(State{sign, u, sign * u});
  double psi = (rho - sign * lambda) / (1.0 - lambda);
  psi = std::clamp(psi, -1.0, 1.0);
  const State rest{psi, {0.0, 0.0}, {0.0, 0.0}};
  LaminateNode right = std::abs(std::abs(psi) - 1.0) <= tol.eq_tol
                           ? make_leaf(rest)
                           : decompose_x1_boundary(rest, Vec2{0.0, 1.0});
  return make_split(z, lambda, std::move(left), std::move(right));
}

}  // namespace detail

/// Decomposes a hull point into a laminate tree: leaves in K, every split
/// difference in the wave cone, recombination equal to the point. Throws
/// OutsideHullError when classify reports the point outside the hull.
inline LaminateNode decompose(const State& z, const ToleranceConfig& tol = {}) {
  const Region region = classify(z, tol);
  switch (region.tag) {
    case RegionTag::OnK:
      return make_leaf(z);
    case RegionTag::X1:
      return detail::decompose_x1(z, *region.e, tol);
    case RegionTag::X3:
      return detail::first_laminate_split(z, z.v, -(z.v.y / norm2(z.v)) * z.v);
    case RegionTag::X2:
    case RegionTag::X4: {
      const double sign = (region.tag == RegionTag::X2) ? 1.0 : -1.0;
      const double k = *region.k;
      const double b = *region.k_bound;
      if (std::abs(k - b) <= 1e-12)
        return detail::first_laminate_split(z, z.v, -(z.v.y / norm2(z.v)) * z.v);
      if (std::abs(k - sign) <= 1e-12) return detail::decompose_cone_vertex(z, sign, tol);
      // Interior k: pure-flux interpolation between the cone vertex and the
      // k = b point over the same (rho, v).
      const State vertex{z.rho, z.v, sign * z.v};
      const State edge{z.rho, z.v, b * z.v};
      const double lambda = (b - k) / (b - sign);
      return make_split(z, lambda, detail::decompose_cone_vertex(vertex, sign, tol),
                        detail::first_laminate_split(edge, z.v, -(z.v.y / norm2(z.v)) * z.v));
    }
    case RegionTag::Outside:
      break;
  }
  throw OutsideHullError("decompose: point is outside the lamination convex hull",
                         separation_bound(z, tol));
}

/// Bottom-up weighted recombination of a tree.
inline State recombine(const LaminateNode& node) {
  if (node.is_leaf()) return node.point;
  const State l = recombine(*node.split->left);
  const State r = recombine(*node.split->right);
  return node.split->lambda * l + (1.0 - node.split->lambda) * r;
}

struct VerifyReport {
  bool leaves_in_K = false;
  bool splits_in_lambda = false;
  double max_leaf_residual = 0.0;
  double max_split_residual = 0.0;
  double recombination_error = 0.0;
  int depth = 0;
  bool pass = false;
};

namespace detail {

inline void verify_walk(const LaminateNode& node, const ToleranceConfig& tol, VerifyReport& rep,
                        int depth) {
  rep.depth = std::max(rep.depth, depth);
  if (node.is_leaf()) {
    rep.max_leaf_residual = std::max(rep.max_leaf_residual, k_residual(node.point));
    return;
  }
  const LaminateSplit& s = *node.split;
  if (!(s.lambda > 0.0 && s.lambda < 1.0) || !s.left || !s.right)
    throw std::invalid_argument("verify_tree: malformed split");
  rep.max_split_residual = std::max(
      rep.max_split_residual, wave_cone_residual(s.left->point - s.right->point));
  const State combo = s.lambda * s.left->point + (1.0 - s.lambda) * s.right->point;
  rep.recombination_error = std::max(rep.recombination_error, max_abs(node.point - combo));
  verify_walk(*s.left, tol, rep, depth + 1);
  verify_walk(*s.right, tol, rep, depth + 1);
}

}  // namespace detail

/// Full audit of a tree: leaf membership in K, split differences in the
/// wave cone, recombination error at every node.
inline VerifyReport verify_tree(const LaminateNode& tree, const ToleranceConfig& tol = {}) {
  VerifyReport rep;
  detail::verify_walk(tree, tol, rep, 0);
  rep.leaves_in_K = rep.max_leaf_residual <= tol.eq_tol;
  rep.splits_in_lambda = rep.max_split_residual <= tol.eq_tol;
  rep.pass = rep.leaves_in_K && rep.splits_in_lambda && rep.recombination_error <= tol.eq_tol;
  return rep;
}

/// Equispaced convex combinations of the Lambda-segment [z2, z1], endpoints
/// included. Requires z1 - z2 in the wave cone.
inline std::vector<State> lambda_segment(const State& z1, const State& z2, int count = 33,
                                         const ToleranceConfig& tol = {}) {
  if (count < 2) throw std::invalid_argument("lambda_segment: count must be >= 2");
  if (!in_wave_cone(z1 - z2, tol))
    throw std::invalid_argument("lambda_segment: difference not in the wave cone");
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double lambda = static_cast<double>(i) / (count - 1);
    out.push_back(lambda * z1 + (1.0 - lambda) * z2);
  }
  return out;
}

}  // namespace ipm

#pragma once

// Discrete fields on a rectangle with exactly divergence-free velocity and
// stream-part flux, built from nodal stream functions. The stationary audit
// walks the energy chain
//
//   0 <= int |v|^2 = -int rho v2
//      <= int_{X2} (1-rho) v2 - int_{X4} (1+rho) v2 - int_{X3} (1-rho^2) v2^2/|v|^2
//      <= 0
//
// with every discrete remainder computed and added to an explicit certified
// bound, so that a clean subsolution forces v_energy ~ 0 and any violated
// hypothesis shows up as a named residual.
//
// The flux may carry an optional cell-centered potential phi_m whose face
// gradients add a divergence-carrying part with zero wall flux. Stationary
// audits reject it (they need m in L^2_sigma); the time-series operations
// use it, since a time-dependent density needs div m = -d_t rho != 0.

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ipm/core.hpp"
#include "ipm/hull.hpp"
#include "ipm/separators.hpp"

namespace ipm {

enum class BoundaryMode { impermeable_box, horizontal_periodic };

inline const char* to_string(BoundaryMode m) {
  return m == BoundaryMode::impermeable_box ? "impermeable_box" : "horizontal_periodic";
}

struct DiscreteField {
  int nx = 0;
  int ny = 0;
  double Lx = 1.0;
  double Ly = 1.0;
  BoundaryMode mode = BoundaryMode::impermeable_box;
  std::vector<double> psi_v;  // nodal, (nx+1) x (ny+1)
  std::vector<double> psi_m;  // nodal, (nx+1) x (ny+1)
  std::vector<double> rho;    // cell-centered, nx x ny
  std::vector<double> phi_m;  // optional cell-centered potential, nx x ny or empty

  double hx() const { return Lx / nx; }
  double hy() const { return Ly / ny; }
  double cell_area() const { return hx() * hy(); }
  double cell_x(int i) const { return (i + 0.5) * hx(); }
  double cell_y(int j) const { return (j + 0.5) * hy(); }

  double node(const std::vector<double>& g, int i, int j) const {
    return g[static_cast<std::size_t>(j) * (nx + 1) + i];
  }
  double cell(const std::vector<double>& g, int i, int j) const {
    return g[static_cast<std::size_t>(j) * nx + i];
  }

  bool has_potential() const {
    for (double p : phi_m)
      if (p != 0.0) return true;
    return false;
  }

  // Perpendicular gradient of a nodal stream function, averaged to the cell
  // center; exactly divergence-free in the staggered flux sense.
  Vec2 perp_gradient(const std::vector<double>& psi, int i, int j) const {
    const double top = node(psi, i, j + 1) + node(psi, i + 1, j + 1);
    const double bottom = node(psi, i, j) + node(psi, i + 1, j);
    const double right = node(psi, i + 1, j) + node(psi, i + 1, j + 1);
    const double left = node(psi, i, j) + node(psi, i, j + 1);
    return {(top - bottom) / (2.0 * hy()), -(right - left) / (2.0 * hx())};
  }

  // Face fluxes of the potential part; wall-normal faces carry zero flux.
  double phi_face_x(int i, int j) const {  // vertical face left of cell i
    if (phi_m.empty()) return 0.0;
    if (mode == BoundaryMode::horizontal_periodic) {
      const int il = (i == 0) ? nx - 1 : i - 1;
      const int ir = (i == nx) ? 0 : i;
      return (cell(phi_m, ir, j) - cell(phi_m, il, j)) / hx();
    }
    if (i == 0 || i == nx) return 0.0;
    return (cell(phi_m, i, j) - cell(phi_m, i - 1, j)) / hx();
  }
  double phi_face_y(int i, int j) const {  // horizontal face below cell j
    if (phi_m.empty() || j == 0 || j == ny) return 0.0;
    return (cell(phi_m, i, j) - cell(phi_m, i, j - 1)) / hy();
  }

  Vec2 velocity(int i, int j) const { return perp_gradient(psi_v, i, j); }

  Vec2 flux(int i, int j) const {
    Vec2 m = perp_gradient(psi_m, i, j);
    if (!phi_m.empty()) {
      m.x += 0.5 * (phi_face_x(i, j) + phi_face_x(i + 1, j));
      m.y += 0.5 * (phi_face_y(i, j) + phi_face_y(i, j + 1));
    }
    return m;
  }

  State cell_state(int i, int j) const { return {cell(rho, i, j), velocity(i, j), flux(i, j)}; }

  // Divergence of the potential part of the flux, cell-centered.
  double potential_divergence(int i, int j) const {
    if (phi_m.empty()) return 0.0;
    return (phi_face_x(i + 1, j) - phi_face_x(i, j)) / hx() +
           (phi_face_y(i, j + 1) - phi_face_y(i, j)) / hy();
  }

  // Max staggered-flux divergence of the stream-function parts over all
  // cells; zero up to rounding by construction.
  double max_divergence_residual() const {
    auto stream_div = [this](const std::vector<double>& psi, int i, int j) {
      const double v1l = (node(psi, i, j + 1) - node(psi, i, j)) / hy();
      const double v1r = (node(psi, i + 1, j + 1) - node(psi, i + 1, j)) / hy();
      const double v2b = -(node(psi, i + 1, j) - node(psi, i, j)) / hx();
      const double v2t = -(node(psi, i + 1, j + 1) - node(psi, i, j + 1)) / hx();
      return (v1r - v1l) / hx() + (v2t - v2b) / hy();
    };
    double worst = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        worst = std::max({worst, std::abs(stream_div(psi_v, i, j)),
                          std::abs(stream_div(psi_m, i, j))});
    return worst;
  }
};

/// Validates shapes and boundary conditions and assembles a field.
/// impermeable_box: stream functions vanish on the whole boundary.
/// horizontal_periodic: columns 0 and nx agree, the bottom row vanishes and
/// the top row is an arbitrary constant (net horizontal flux through the
/// channel lives in that constant).
inline DiscreteField build_field(int nx, int ny, double Lx, double Ly,
                                 std::vector<double> psi_v, std::vector<double> psi_m,
                                 std::vector<double> rho, BoundaryMode mode,
                                 std::vector<double> phi_m = {},
                                 const ToleranceConfig& tol = {}) {
  if (nx < 1 || ny < 1 || Lx <= 0.0 || Ly <= 0.0)
    throw std::invalid_argument("build_field: invalid grid");
  const std::size_t nodes = static_cast<std::size_t>(nx + 1) * (ny + 1);
  const std::size_t cells = static_cast<std::size_t>(nx) * ny;
  if (psi_v.size() != nodes || psi_m.size() != nodes)
    throw std::invalid_argument("build_field: stream function shape mismatch");
  if (rho.size() != cells) throw std::invalid_argument("build_field: rho shape mismatch");
  if (!phi_m.empty() && phi_m.size() != cells)
    throw std::invalid_argument("build_field: phi_m shape mismatch");

  DiscreteField f;
  f.nx = nx;
  f.ny = ny;
  f.Lx = Lx;
  f.Ly = Ly;
  f.mode = mode;
  f.psi_v = std::move(psi_v);
  f.psi_m = std::move(psi_m);
  f.rho = std::move(rho);
  f.phi_m = std::move(phi_m);

  constexpr double kBoundaryTol = 1e-12;
  auto check_boundary = [&](const std::vector<double>& psi, const char* name) {
    if (mode == BoundaryMode::impermeable_box) {
      for (int i = 0; i <= nx; ++i)
        if (std::abs(f.node(psi, i, 0)) > kBoundaryTol ||
            std::abs(f.node(psi, i, ny)) > kBoundaryTol)
          throw std::invalid_argument(std::string("build_field: ") + name +
                                      " must vanish on the boundary");
      for (int j = 0; j <= ny; ++j)
        if (std::abs(f.node(psi, 0, j)) > kBoundaryTol ||
            std::abs(f.node(psi, nx, j)) > kBoundaryTol)
          throw std::invalid_argument(std::string("build_field: ") + name +
                                      " must vanish on the boundary");
    } else {
      for (int j = 0; j <= ny; ++j)
        if (std::abs(f.node(psi, 0, j) - f.node(psi, nx, j)) > kBoundaryTol)
          throw std::invalid_argument(std::string("build_field: ") + name +
                                      " must be periodic in x");
      const double top = f.node(psi, 0, ny);
      for (int i = 0; i <= nx; ++i) {
        if (std::abs(f.node(psi, i, 0)) > kBoundaryTol)
          throw std::invalid_argument(std::string("build_field: ") + name +
                                      " must vanish on the bottom wall");
        if (std::abs(f.node(psi, i, ny) - top) > kBoundaryTol)
          throw std::invalid_argument(std::string("build_field: ") + name +
                                      " must be constant on the top wall");
      }
    }
  };
  check_boundary(f.psi_v, "psi_v");
  check_boundary(f.psi_m, "psi_m");

  for (double r : f.rho)
    if (std::abs(r) > 1.0 + tol.eq_tol)
      throw std::invalid_argument("build_field: |rho| must not exceed 1");
  return f;
}

/// Convenience builders sampling callables on nodes / cell centers.
inline std::vector<double> node_grid(int nx, int ny, double Lx, double Ly,
                                     const std::function<double(double, double)>& fn) {
  std::vector<double> g(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      g[static_cast<std::size_t>(j) * (nx + 1) + i] = fn(Lx * i / nx, Ly * j / ny);
  return g;
}

inline std::vector<double> cell_grid(int nx, int ny, double Lx, double Ly,
                                     const std::function<double(double, double)>& fn) {
  std::vector<double> g(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      g[static_cast<std::size_t>(j) * nx + i] = fn((i + 0.5) * Lx / nx, (j + 0.5) * Ly / ny);
  return g;
}

// ---------------------------------------------------------------------------
// Stationary audit
// ---------------------------------------------------------------------------

struct AuditReport {
  double hull_violation_measure = 0.0;  // fraction of cells classifying Outside
  double curl_residual = 0.0;           // discrete L2 norm of curl(v + (0, rho))
  // chain terms of the energy argument
  double t_x1 = 0.0;  // int_{v=0} (1-rho^2)/2 (e2 - 1)
  double t_x2 = 0.0;  // int_{X2} (1-rho) v2
  double t_x3 = 0.0;  // int_{X3} (1-rho^2) v2^2 / |v|^2
  double t_x4 = 0.0;  // int_{X4} (1+rho) v2
  double t_m2 = 0.0;  // int m2
  double v_energy = 0.0;
  // discrete remainders entering the certified bound
  double weak_residual = 0.0;         // int v . (v + (0, rho))
  double classification_slack = 0.0;  // per-cell positive parts vs chain integrands
  double sign_slack = 0.0;            // positive parts of the sign-definite terms
  double stability_constant = 0.0;    // C = |v|_inf |Omega| + 2 |Omega|
  double certified_bound = 0.0;
  bool pass = false;
};

/// Runs the energy chain on a divergence-free field (phi_m must vanish).
/// pass means v_energy <= certified_bound; for an exact subsolution every
/// remainder vanishes and the bound pins v_energy to ~0.
inline AuditReport audit_stationary(const DiscreteField& f, const ToleranceConfig& tol = {}) {
  if (f.has_potential())
    throw std::invalid_argument("audit_stationary: flux must be divergence-free (phi_m = 0)");
  AuditReport rep;
  const double area = f.cell_area();
  const double omega = f.Lx * f.Ly;
  std::size_t outside = 0;
  double v_inf = 0.0;
  auto pospart = [](double x) { return x > 0.0 ? x : 0.0; };

  for (int j = 0; j < f.ny; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      const State z = f.cell_state(i, j);
      const Region r = classify(z, tol);
      const double mv = z.m.y - z.rho * z.v.y;  // m2 - rho v2
      double chain = 0.0;
      switch (r.tag) {
        case RegionTag::X1:
          chain = (1.0 - z.rho * z.rho) / 2.0 * (r.e->y - 1.0);
          rep.t_x1 += chain * area;
          break;
        case RegionTag::X2:
          chain = (1.0 - z.rho) * z.v.y;
          rep.t_x2 += chain * area;
          break;
        case RegionTag::X3:
          chain = -(1.0 - z.rho * z.rho) * z.v.y * z.v.y / norm2(z.v);
          rep.t_x3 += -chain * area;
          break;
        case RegionTag::X4:
          chain = -(1.0 + z.rho) * z.v.y;
          rep.t_x4 += -chain * area;
          break;
        case RegionTag::OnK:
          chain = 0.0;
          break;
        case RegionTag::Outside:
          chain = 0.0;
          outside++;
          break;
      }
      rep.classification_slack += pospart(mv - chain) * area;
      rep.t_m2 += z.m.y * area;
      rep.v_energy += norm2(z.v) * area;
      rep.weak_residual += (norm2(z.v) + z.rho * z.v.y) * area;
      v_inf = std::max(v_inf, norm(z.v));
    }
  }
  rep.hull_violation_measure =
      static_cast<double>(outside) / (static_cast<double>(f.nx) * f.ny);

  // curl(v + (0, rho)) at nodes surrounded by four cells.
  double curl2 = 0.0;
  const int i_begin = (f.mode == BoundaryMode::horizontal_periodic) ? 0 : 1;
  for (int j = 1; j < f.ny; ++j) {
    for (int i = i_begin; i < f.nx; ++i) {
      const int il = (i == 0) ? f.nx - 1 : i - 1;
      auto fval = [&](int ci, int cj) {
        return f.velocity(ci, cj).y + f.cell(f.rho, ci, cj);
      };
      auto gval = [&](int ci, int cj) { return f.velocity(ci, cj).x; };
      const double dfx = (fval(i, j - 1) + fval(i, j) - fval(il, j - 1) - fval(il, j)) /
                         (2.0 * f.hx());
      const double dgy = (gval(il, j) + gval(i, j) - gval(il, j - 1) - gval(i, j - 1)) /
                         (2.0 * f.hy());
      const double r = dfx - dgy;
      curl2 += r * r * area;
    }
  }
  rep.curl_residual = std::sqrt(curl2);

  // Expected signs: t_x1 <= 0, t_x2 <= 0, t_x3 >= 0, t_x4 >= 0; the positive
  // parts collect whatever a dirty field leaks past them.
  rep.sign_slack = pospart(rep.t_x1) + pospart(rep.t_x2) + pospart(-rep.t_x3) +
                   pospart(-rep.t_x4);
  rep.stability_constant = v_inf * omega + 2.0 * omega;
  rep.certified_bound = std::abs(rep.weak_residual) + std::abs(rep.t_m2) +
                        rep.classification_slack + rep.sign_slack +
                        rep.stability_constant * (rep.hull_violation_measure + rep.curl_residual);
  rep.pass = rep.v_energy <= rep.certified_bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Time series: the infinite-time bound of non-stationary subsolutions
// ---------------------------------------------------------------------------

struct TimeSeries {
  std::vector<double> rho0;  // cell-centered initial density
  std::vector<std::pair<double, DiscreteField>> frames;
};

inline void validate_series(const TimeSeries& s) {
  if (s.frames.empty()) throw std::invalid_argument("time series: no frames");
  const DiscreteField& f0 = s.frames.front().second;
  if (s.rho0.size() != static_cast<std::size_t>(f0.nx) * f0.ny)
    throw std::invalid_argument("time series: rho0 shape mismatch");
  for (std::size_t k = 0; k < s.frames.size(); ++k) {
    const DiscreteField& f = s.frames[k].second;
    if (f.nx != f0.nx || f.ny != f0.ny || f.Lx != f0.Lx || f.Ly != f0.Ly)
      throw std::invalid_argument("time series: frame grid mismatch");
    if (k > 0 && !(s.frames[k].first > s.frames[k - 1].first))
      throw std::invalid_argument("time series: times must be strictly increasing");
  }
}

/// int_Omega m2 over one frame, midpoint rule (equals the face-flux sum).
inline double flux_m2_integral(const DiscreteField& f) {
  double acc = 0.0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) acc += f.flux(i, j).y;
  return acc * f.cell_area();
}

struct FReport {
  std::vector<double> times;
  std::vector<double> f_direct;         // int rho(t) x2
  std::vector<double> f_reconstructed;  // int rho0 x2 + int_0^t int m2
  std::vector<double> m2_integrals;
  double max_discrepancy = 0.0;
};

/// F(t) = int rho(.,t) x2 per frame, together with its reconstruction from
/// the initial density and the time integral of int m2 (trapezoid in t).
inline FReport F_of_t(const TimeSeries& s) {
  validate_series(s);
  FReport rep;
  const DiscreteField& f0 = s.frames.front().second;
  const double area = f0.cell_area();
  double f_rec0 = 0.0;
  for (int j = 0; j < f0.ny; ++j)
    for (int i = 0; i < f0.nx; ++i)
      f_rec0 += s.rho0[static_cast<std::size_t>(j) * f0.nx + i] * f0.cell_y(j) * area;

  for (const auto& [t, field] : s.frames) {
    double fd = 0.0;
    for (int j = 0; j < field.ny; ++j)
      for (int i = 0; i < field.nx; ++i)
        fd += field.cell(field.rho, i, j) * field.cell_y(j) * area;
    rep.times.push_back(t);
    rep.f_direct.push_back(fd);
    rep.m2_integrals.push_back(flux_m2_integral(field));
  }
  rep.f_reconstructed.resize(rep.times.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    if (k > 0)
      acc += 0.5 * (rep.m2_integrals[k] + rep.m2_integrals[k - 1]) *
             (rep.times[k] - rep.times[k - 1]);
    rep.f_reconstructed[k] = f_rec0 + acc;
    rep.max_discrepancy =
        std::max(rep.max_discrepancy, std::abs(rep.f_direct[k] - rep.f_reconstructed[k]));
  }
  return rep;
}

struct TimeBoundReport {
  double lhs = 0.0;      // int_0^T int |v|^2
  double rhs = 0.0;      // int rho0 x2 + |rho|_inf int |x2|
  double rho_sup = 0.0;
  bool pass = false;
};

/// Hypothesis check for the time-series operations: every cell of every
/// frame must lie in the non-stationary hull |m - rho v + (0,(1-rho^2)/2)|
/// <= (1-rho^2)/2 with |rho| <= 1. Returns indices of violating frames.
inline std::vector<std::size_t> hull_violating_frames(const TimeSeries& s,
                                                      const ToleranceConfig& tol = {}) {
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < s.frames.size(); ++k) {
    const DiscreteField& f = s.frames[k].second;
    bool ok = true;
    for (int j = 0; j < f.ny && ok; ++j)
      for (int i = 0; i < f.nx && ok; ++i) {
        const State z = f.cell_state(i, j);
        if (std::abs(z.rho) > 1.0 + tol.eq_tol ||
            eval_separator(SeparatorId::G1, z) > tol.eq_tol)
          ok = false;
      }
    if (!ok) bad.push_back(k);
  }
  return bad;
}

/// The infinite-time energy bound: int_0^T int |v|^2 (trapezoid in t)
/// against int rho0 x2 + |rho|_inf int |x2|. Frames must pass the
/// non-stationary hull membership check.
inline TimeBoundReport infinite_time_bound(const TimeSeries& s, const ToleranceConfig& tol = {}) {
  validate_series(s);
  const auto bad = hull_violating_frames(s, tol);
  if (!bad.empty()) {
    std::string msg = "infinite_time_bound: frames outside the non-stationary hull:";
    for (std::size_t k : bad) msg += " " + std::to_string(k);
    throw std::invalid_argument(msg);
  }
  TimeBoundReport rep;
  const DiscreteField& f0 = s.frames.front().second;
  const double area = f0.cell_area();

  std::vector<double> energies;
  for (const auto& [t, field] : s.frames) {
    double e = 0.0;
    for (int j = 0; j < field.ny; ++j)
      for (int i = 0; i < field.nx; ++i) e += norm2(field.velocity(i, j));
    energies.push_back(e * area);
    for (int j = 0; j < field.ny; ++j)
      for (int i = 0; i < field.nx; ++i)
        rep.rho_sup = std::max(rep.rho_sup, std::abs(field.cell(field.rho, i, j)));
  }
  for (std::size_t k = 1; k < s.frames.size(); ++k)
    rep.lhs += 0.5 * (energies[k] + energies[k - 1]) *
               (s.frames[k].first - s.frames[k - 1].first);

  double rho0_x2 = 0.0;
  double abs_x2 = 0.0;
  for (int j = 0; j < f0.ny; ++j)
    for (int i = 0; i < f0.nx; ++i) {
      rho0_x2 += s.rho0[static_cast<std::size_t>(j) * f0.nx + i] * f0.cell_y(j) * area;
      abs_x2 += std::abs(f0.cell_y(j)) * area;
    }
  rep.rhs = rho0_x2 + rep.rho_sup * abs_x2;
  rep.pass = rep.lhs <= rep.rhs + 1e-9 * (1.0 + std::abs(rep.rhs));
  return rep;
}

}  // namespace ipm

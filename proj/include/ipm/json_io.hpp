#pragma once

// JSON and file-format plumbing shared by the CLI and the tests.
//
//   State         {"rho": r, "v": [v1, v2], "m": [m1, m2]}
//   Region        {"tag": "...", "k": ..., "e": [...], "k_bound": ...}
//   LaminateTree  {"point": State, "lambda": l, "left": ..., "right": ...}
//   CloudConfig   {"resolution", "rounds", "pairs_per_round",
//                  "segment_samples", "seed"}
//   Field file    one-line JSON header {nx, ny, Lx, Ly, boundary_mode}
//                 followed by labelled CSV grid sections
//   Series file   {"rho0_field": path, "frames": [{"t": ..., "field": path}]}

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ipm/cloud.hpp"
#include "ipm/core.hpp"
#include "ipm/field.hpp"
#include "ipm/hull.hpp"
#include "ipm/laminates.hpp"

namespace ipm {

using nlohmann::json;

inline json to_json(const State& z) {
  return json{{"rho", z.rho}, {"v", {z.v.x, z.v.y}}, {"m", {z.m.x, z.m.y}}};
}

inline State state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rho") || !j.contains("v") || !j.contains("m"))
    throw std::invalid_argument("state JSON must have keys rho, v, m");
  const auto& v = j.at("v");
  const auto& m = j.at("m");
  if (!v.is_array() || v.size() != 2 || !m.is_array() || m.size() != 2)
    throw std::invalid_argument("state JSON: v and m must be 2-vectors");
  State z;
  z.rho = j.at("rho").get<double>();
  z.v = {v[0].get<double>(), v[1].get<double>()};
  z.m = {m[0].get<double>(), m[1].get<double>()};
  if (!is_finite(z)) throw std::invalid_argument("state JSON: components must be finite");
  return z;
}

inline json to_json(const Region& r) {
  json j{{"tag", to_string(r.tag)}};
  if (r.k) j["k"] = *r.k;
  if (r.k_bound) j["k_bound"] = *r.k_bound;
  if (r.e) j["e"] = {r.e->x, r.e->y};
  return j;
}

inline json to_json(const LaminateNode& node) {
  json j{{"point", to_json(node.point)}};
  if (!node.is_leaf()) {
    j["lambda"] = node.split->lambda;
    j["left"] = to_json(*node.split->left);
    j["right"] = to_json(*node.split->right);
  }
  return j;
}

inline LaminateNode tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("point"))
    throw std::invalid_argument("laminate JSON: node must have a point");
  const State z = state_from_json(j.at("point"));
  if (!j.contains("lambda")) return make_leaf(z);
  if (!j.contains("left") || !j.contains("right"))
    throw std::invalid_argument("laminate JSON: split must have left and right");
  return make_split(z, j.at("lambda").get<double>(), tree_from_json(j.at("left")),
                    tree_from_json(j.at("right")));
}

template <typename T>
inline T checked_get(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

inline CloudConfig cloud_config_from_json(const json& j) {
  static const std::array<const char*, 5> known{"resolution", "rounds", "pairs_per_round",
                                                "segment_samples", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument("cloud config: unknown key '" + it.key() + "'");
  }
  CloudConfig cfg;
  cfg.resolution = checked_get<int>(j, "resolution", cfg.resolution);
  cfg.rounds = checked_get<int>(j, "rounds", cfg.rounds);
  cfg.pairs_per_round = checked_get<int>(j, "pairs_per_round", cfg.pairs_per_round);
  cfg.segment_samples = checked_get<int>(j, "segment_samples", cfg.segment_samples);
  cfg.seed = checked_get<std::uint64_t>(j, "seed", cfg.seed);
  return cfg;
}

inline json to_json(const AuditReport& r) {
  return json{{"hull_violation_measure", r.hull_violation_measure},
              {"curl_residual", r.curl_residual},
              {"chain_terms",
               {{"x1_disc", r.t_x1},
                {"x2_cone", r.t_x2},
                {"x3_rigid", r.t_x3},
                {"x4_cone", r.t_x4},
                {"m2", r.t_m2}}},
              {"v_energy", r.v_energy},
              {"weak_residual", r.weak_residual},
              {"classification_slack", r.classification_slack},
              {"sign_slack", r.sign_slack},
              {"stability_constant", r.stability_constant},
              {"certified_bound", r.certified_bound},
              {"pass", r.pass}};
}

// ---------------------------------------------------------------------------
// Field files
// ---------------------------------------------------------------------------

namespace detail {

inline void write_grid_csv(std::ostream& os, const std::vector<double>& g, int cols, int rows) {
  char buf[64];
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int n = std::snprintf(buf, sizeof buf, "%.17g", g[static_cast<std::size_t>(r) * cols + c]);
      os.write(buf, n);
      os.put(c + 1 == cols ? '\n' : ',');
    }
  }
}

inline std::vector<double> read_grid_csv(std::istream& is, int cols, int rows,
                                         const char* label) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(cols) * rows);
  std::string line;
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(is, line))
      throw std::runtime_error(std::string("field file: truncated grid ") + label);
    std::stringstream ss(line);
    std::string tok;
    int c = 0;
    while (std::getline(ss, tok, ',')) {
      g.push_back(std::stod(tok));
      ++c;
    }
    if (c != cols) throw std::runtime_error(std::string("field file: bad row width in ") + label);
  }
  return g;
}

}  // namespace detail

inline void write_field(const DiscreteField& f, std::ostream& os) {
  json header{{"nx", f.nx}, {"ny", f.ny}, {"Lx", f.Lx}, {"Ly", f.Ly},
              {"boundary_mode", to_string(f.mode)}};
  os << header.dump() << '\n';
  os << "psi_v\n";
  detail::write_grid_csv(os, f.psi_v, f.nx + 1, f.ny + 1);
  os << "psi_m\n";
  detail::write_grid_csv(os, f.psi_m, f.nx + 1, f.ny + 1);
  os << "rho\n";
  detail::write_grid_csv(os, f.rho, f.nx, f.ny);
  if (!f.phi_m.empty()) {
    os << "phi_m\n";
    detail::write_grid_csv(os, f.phi_m, f.nx, f.ny);
  }
}

inline DiscreteField read_field(std::istream& is, const ToleranceConfig& tol = {}) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("field file: missing header");
  const json header = json::parse(line);
  const int nx = header.at("nx").get<int>();
  const int ny = header.at("ny").get<int>();
  const double Lx = header.at("Lx").get<double>();
  const double Ly = header.at("Ly").get<double>();
  const std::string mode_str = header.at("boundary_mode").get<std::string>();
  BoundaryMode mode;
  if (mode_str == "impermeable_box")
    mode = BoundaryMode::impermeable_box;
  else if (mode_str == "horizontal_periodic")
    mode = BoundaryMode::horizontal_periodic;
  else
    throw std::runtime_error("field file: unknown boundary_mode '" + mode_str + "'");

  std::vector<double> psi_v, psi_m, rho, phi_m;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line == "psi_v")
      psi_v = detail::read_grid_csv(is, nx + 1, ny + 1, "psi_v");
    else if (line == "psi_m")
      psi_m = detail::read_grid_csv(is, nx + 1, ny + 1, "psi_m");
    else if (line == "rho")
      rho = detail::read_grid_csv(is, nx, ny, "rho");
    else if (line == "phi_m")
      phi_m = detail::read_grid_csv(is, nx, ny, "phi_m");
    else
      throw std::runtime_error("field file: unknown section '" + line + "'");
  }
  return build_field(nx, ny, Lx, Ly, std::move(psi_v), std::move(psi_m), std::move(rho), mode,
                     std::move(phi_m), tol);
}

inline void write_field_file(const DiscreteField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(f, os);
}

inline DiscreteField read_field_file(const std::string& path, const ToleranceConfig& tol = {}) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field(is, tol);
}

/// Loads a series manifest; field paths are resolved relative to `base_dir`
/// when not absolute.
inline TimeSeries read_series_manifest(const std::string& path, const ToleranceConfig& tol = {}) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  const json j = json::parse(is);
  std::string base_dir = ".";
  if (auto slash = path.find_last_of('/'); slash != std::string::npos)
    base_dir = path.substr(0, slash);
  auto resolve = [&base_dir](const std::string& p) {
    return (!p.empty() && p.front() == '/') ? p : base_dir + "/" + p;
  };
  TimeSeries s;
  for (const auto& frame : j.at("frames"))
    s.frames.emplace_back(frame.at("t").get<double>(),
                          read_field_file(resolve(frame.at("field").get<std::string>()), tol));
  const DiscreteField rho0_field =
      read_field_file(resolve(j.at("rho0_field").get<std::string>()), tol);
  s.rho0 = rho0_field.rho;
  validate_series(s);
  return s;
}

}  // namespace ipm

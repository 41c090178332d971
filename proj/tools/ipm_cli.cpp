// Command-line front end: classification, laminate decomposition, separator
// evaluation, wave-cone checks and sampling, hull growth, and the discrete
// subsolution audits. Machine-readable JSON goes to stdout (or --out), human
// summaries to stderr. Exit codes: 0 pass, 1 verification failure, 2 usage
// or parse error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ipm/cloud.hpp"
#include "ipm/core.hpp"
#include "ipm/field.hpp"
#include "ipm/hull.hpp"
#include "ipm/json_io.hpp"
#include "ipm/laminates.hpp"
#include "ipm/separators.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

std::string read_input(const std::string& in_path) {
  if (in_path.empty() || in_path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream is(in_path);
  if (!is) throw std::runtime_error("cannot open " + in_path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open " + out_path + " for writing");
    os << text << '\n';
  }
}

ipm::State parse_state(const std::string& text) {
  return ipm::state_from_json(nlohmann::json::parse(text));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lamination convex hull toolkit for stationary IPM"};
  app.require_subcommand(1);

  std::string in_path;
  std::string out_path;
  std::string config_path;
  double tol_value = 1e-9;
  std::uint64_t seed = 42;
  bool verify = false;
  int sample_count = 0;

  auto add_common = [&](CLI::App* cmd, bool with_seed = false) {
    cmd->add_option("--in", in_path, "input file (default: stdin)");
    cmd->add_option("--out", out_path, "write the result here instead of stdout");
    cmd->add_option("--tol", tol_value, "equality tolerance")->capture_default_str();
    if (with_seed) cmd->add_option("--seed", seed, "random seed")->capture_default_str();
  };

  CLI::App* c_classify = app.add_subcommand("classify", "classify a state against the hull");
  add_common(c_classify);

  CLI::App* c_decompose = app.add_subcommand("decompose", "laminate decomposition of a state");
  add_common(c_decompose);
  c_decompose->add_flag("--verify", verify, "re-audit the tree and fail on any residual");

  CLI::App* c_separate = app.add_subcommand("separate", "evaluate the separating functions");
  add_common(c_separate);

  CLI::App* c_wave = app.add_subcommand("wave-cone", "wave-cone membership or sampling");
  add_common(c_wave, true);
  c_wave->add_option("--sample", sample_count, "emit this many sampled wave-cone states");

  CLI::App* c_hull = app.add_subcommand("hull-approx", "grow the hull point cloud");
  c_hull->add_option("--config", config_path, "cloud configuration JSON");
  c_hull->add_option("--out", out_path, "CSV output path");
  c_hull->add_option("--tol", tol_value, "equality tolerance (default 1e-9)");
  c_hull->add_option("--seed", seed, "override the configured seed");
  bool seed_given = false;

  CLI::App* c_audit = app.add_subcommand("audit", "stationary subsolution audit of a field");
  add_common(c_audit);

  CLI::App* c_time = app.add_subcommand("time-bound", "infinite-time energy bound of a series");
  c_time->add_option("--series", config_path, "series manifest JSON")->required();
  c_time->add_option("--out", out_path, "write the result here instead of stdout");
  c_time->add_option("--tol", tol_value, "equality tolerance (default 1e-9)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  seed_given = c_hull->count("--seed") > 0;

  ipm::ToleranceConfig tol;
  tol.eq_tol = tol_value;

  try {
    if (*c_classify) {
      const ipm::State z = parse_state(read_input(in_path));
      emit(ipm::to_json(ipm::classify(z, tol)).dump(), out_path);
      return kExitPass;
    }

    if (*c_decompose) {
      const ipm::State z = parse_state(read_input(in_path));
      ipm::LaminateNode tree;
      try {
        tree = ipm::decompose(z, tol);
      } catch (const ipm::OutsideHullError& e) {
        nlohmann::json err{{"error", e.what()}};
        nlohmann::json seps = nlohmann::json::array();
        for (const auto& s : e.separation().entries)
          seps.push_back({{"id", ipm::to_string(s.id)},
                          {"value", s.value},
                          {"separates", s.separates}});
        err["separation"] = seps;
        emit(err.dump(), out_path);
        std::cerr << "decompose: " << e.what() << '\n';
        return kExitVerificationFailure;
      }
      emit(ipm::to_json(tree).dump(), out_path);
      if (verify) {
        const ipm::VerifyReport rep = ipm::verify_tree(tree, tol);
        std::cerr << "verify: leaves_in_K=" << rep.leaves_in_K
                  << " splits_in_lambda=" << rep.splits_in_lambda
                  << " recombination_error=" << rep.recombination_error << '\n';
        if (!rep.pass) return kExitVerificationFailure;
      }
      return kExitPass;
    }

    if (*c_separate) {
      const ipm::State z = parse_state(read_input(in_path));
      const ipm::SeparationReport rep = ipm::separation_bound(z, tol);
      nlohmann::json j;
      nlohmann::json firing = nlohmann::json::array();
      for (const auto& e : rep.entries) {
        j[ipm::to_string(e.id)] = e.value;
        if (e.separates) firing.push_back(ipm::to_string(e.id));
      }
      j["separates"] = firing;
      emit(j.dump(), out_path);
      return kExitPass;
    }

    if (*c_wave) {
      if (sample_count > 0) {
        nlohmann::json arr = nlohmann::json::array();
        for (const ipm::State& z : ipm::sample_wave_cone(seed, sample_count))
          arr.push_back(ipm::to_json(z));
        emit(arr.dump(), out_path);
        return kExitPass;
      }
      const ipm::State z = parse_state(read_input(in_path));
      nlohmann::json j{{"in_wave_cone", ipm::in_wave_cone(z, tol)},
                       {"residual", ipm::wave_cone_residual(z)}};
      if (auto xi = ipm::recover_xi(z, tol)) j["xi"] = {xi->x, xi->y};
      emit(j.dump(), out_path);
      return kExitPass;
    }

    if (*c_hull) {
      ipm::CloudConfig cfg;
      if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is) throw std::runtime_error("cannot open " + config_path);
        cfg = ipm::cloud_config_from_json(nlohmann::json::parse(is));
      }
      if (seed_given) cfg.seed = seed;
      const ipm::PointCloud cloud = ipm::grow_cloud(cfg, tol);
      const ipm::ContainmentReport rep = ipm::containment_report(cloud, tol);
      if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw std::runtime_error("cannot open " + out_path + " for writing");
        ipm::write_cloud_csv(cloud, os);
      } else {
        ipm::write_cloud_csv(cloud, std::cout);
      }
      std::cerr << "cloud: " << rep.total << " points, violations " << rep.violations.size()
                << " (OnK " << rep.count(ipm::RegionTag::OnK) << ", X1 "
                << rep.count(ipm::RegionTag::X1) << ", X2 " << rep.count(ipm::RegionTag::X2)
                << ", X3 " << rep.count(ipm::RegionTag::X3) << ", X4 "
                << rep.count(ipm::RegionTag::X4) << ")\n";
      return rep.violations.empty() ? kExitPass : kExitVerificationFailure;
    }

    if (*c_audit) {
      const ipm::DiscreteField field =
          in_path.empty() ? ipm::read_field(std::cin, tol) : ipm::read_field_file(in_path, tol);
      const ipm::AuditReport rep = ipm::audit_stationary(field, tol);
      emit(ipm::to_json(rep).dump(), out_path);
      std::cerr << "audit: v_energy=" << rep.v_energy << " bound=" << rep.certified_bound
                << " violations=" << rep.hull_violation_measure
                << " curl=" << rep.curl_residual << '\n';
      return rep.pass ? kExitPass : kExitVerificationFailure;
    }

    if (*c_time) {
      ipm::TimeSeries series = ipm::read_series_manifest(config_path, tol);
      try {
        const ipm::TimeBoundReport rep = ipm::infinite_time_bound(series, tol);
        const ipm::FReport f = ipm::F_of_t(series);
        nlohmann::json j{{"lhs", rep.lhs},
                         {"rhs", rep.rhs},
                         {"rho_sup", rep.rho_sup},
                         {"pass", rep.pass},
                         {"F",
                          {{"times", f.times},
                           {"direct", f.f_direct},
                           {"reconstructed", f.f_reconstructed},
                           {"max_discrepancy", f.max_discrepancy}}}};
        emit(j.dump(), out_path);
        return rep.pass ? kExitPass : kExitVerificationFailure;
      } catch (const std::invalid_argument& e) {
        std::cerr << "time-bound: " << e.what() << '\n';
        return kExitVerificationFailure;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

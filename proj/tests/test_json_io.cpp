#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "field_helpers.hpp"
#include "ipm/json_io.hpp"

using namespace ipm;

TEST_CASE("state JSON schema and round trip") {
  const State z{0.5, {1.0, -2.0}, {0.25, 0.125}};
  const json j = to_json(z);
  CHECK(j.dump() == R"({"m":[0.25,0.125],"rho":0.5,"v":[1.0,-2.0]})");
  const State back = state_from_json(j);
  CHECK(max_abs(back - z) == 0.0);
}

TEST_CASE("state JSON rejects malformed input") {
  CHECK_THROWS(state_from_json(json::parse(R"({"rho": 1.0})")));
  CHECK_THROWS(state_from_json(json::parse(R"({"rho": 1.0, "v": [1], "m": [1, 2]})")));
  CHECK_THROWS(state_from_json(json::parse(R"([1, 2, 3])")));
}

TEST_CASE("region JSON carries only the defined payloads") {
  const json on_k = to_json(classify({1.0, {0.0, 0.0}, {0.0, 0.0}}));
  CHECK(on_k.at("tag") == "OnK");
  CHECK_FALSE(on_k.contains("e"));

  const json x3 = to_json(classify({0.0, {1.0, 0.0}, {0.0, 0.0}}));
  CHECK(x3.at("tag") == "X3");
  CHECK(x3.at("k").get<double>() == doctest::Approx(0.0));
  CHECK(x3.at("k_bound").get<double>() == doctest::Approx(0.0));

  const json x1 = to_json(classify({0.5, {0.0, 0.0}, {0.0, -0.75}}));
  CHECK(x1.at("tag") == "X1");
  REQUIRE(x1.contains("e"));
  CHECK(x1.at("e")[1].get<double>() == doctest::Approx(-1.0));
}

TEST_CASE("laminate tree JSON round trip") {
  const LaminateNode tree = decompose({0.0, {0.0, -0.5}, {0.0, -0.5}});
  const json j = to_json(tree);
  const LaminateNode back = tree_from_json(j);
  CHECK(verify_tree(back).pass);
  CHECK(max_abs(recombine(back) - recombine(tree)) == 0.0);
  CHECK(j.contains("lambda"));
  CHECK(j.at("left").contains("point"));
}

TEST_CASE("cloud config parsing") {
  const CloudConfig cfg = cloud_config_from_json(json::parse(
      R"({"resolution": 5, "rounds": 2, "pairs_per_round": 100, "segment_samples": 3, "seed": 7})"));
  CHECK(cfg.resolution == 5);
  CHECK(cfg.rounds == 2);
  CHECK(cfg.pairs_per_round == 100);
  CHECK(cfg.segment_samples == 3);
  CHECK(cfg.seed == 7);

  CHECK(cloud_config_from_json(json::parse("{}")).resolution == 9);  // defaults
  CHECK_THROWS_AS(cloud_config_from_json(json::parse(R"({"grid": 5})")), std::invalid_argument);
}

TEST_CASE("field file round trip") {
  const DiscreteField f = ipm::testing::make_flux_bump_field(12);
  const auto path = std::filesystem::temp_directory_path() / "ipm_field_test.field";
  write_field_file(f, path.string());
  const DiscreteField back = read_field_file(path.string());
  CHECK(back.nx == f.nx);
  CHECK(back.ny == f.ny);
  CHECK(back.mode == f.mode);
  for (std::size_t i = 0; i < f.psi_m.size(); ++i) CHECK(back.psi_m[i] == f.psi_m[i]);
  for (std::size_t i = 0; i < f.rho.size(); ++i) CHECK(back.rho[i] == f.rho[i]);
  std::filesystem::remove(path);
}

TEST_CASE("field file round trip keeps the potential part") {
  const TimeSeries s = ipm::testing::make_euler_series(8, 2, 0.004);
  const auto path = std::filesystem::temp_directory_path() / "ipm_field_phi.field";
  write_field_file(s.frames[1].second, path.string());
  const DiscreteField back = read_field_file(path.string());
  CHECK(back.has_potential());
  CHECK(flux_m2_integral(back) == flux_m2_integral(s.frames[1].second));
  std::filesystem::remove(path);
}

TEST_CASE("series manifest loading") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ipm_series_test";
  fs::create_directories(dir);
  const TimeSeries s = ipm::testing::make_trivial_series(8, 2);
  write_field_file(s.frames[0].second, (dir / "f0.field").string());
  write_field_file(s.frames[1].second, (dir / "f1.field").string());
  {
    std::ofstream manifest(dir / "series.json");
    manifest << R"({"rho0_field": "f0.field",
                    "frames": [{"t": 0.0, "field": "f0.field"},
                               {"t": 0.5, "field": "f1.field"}]})";
  }
  const TimeSeries back = read_series_manifest((dir / "series.json").string());
  CHECK(back.frames.size() == 2);
  CHECK(back.frames[1].first == 0.5);
  CHECK(back.rho0.size() == 64);
  fs::remove_all(dir);
}

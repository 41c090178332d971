#pragma once

// Iterative lamination-hull approximator. Starting from a grid of K states,
// each round appends convex combinations along segments whose difference
// lies exactly in the wave cone. Round 1 uses only K-to-K pairings, so its
// output is the genuine first laminate; later rounds mix constructive moves
// (pure-flux slides in k, cone-vertex segments, X1 disc chords) with generic
// directional growth gated by the closed-form classifier. The cloud serves
// as a brute-force membership oracle and as the statistical test bed for the
// containment and rigidity properties.

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "ipm/core.hpp"
#include "ipm/hull.hpp"

namespace ipm {

struct CloudConfig {
  int resolution = 9;  // K-seed grid per velocity axis on [-2,2]^2, rho in {-1,1}
  int rounds = 3;
  int pairs_per_round = 20000;
  int segment_samples = 5;
  std::uint64_t seed = 42;
};

struct Provenance {
  int round = 0;
  int parent_a = -1;
  int parent_b = -1;
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

struct PointCloud {
  std::vector<State> points;
  std::vector<Provenance> provenance;
  std::vector<RegionTag> tags;  // classification at append time
  std::vector<double> ks;       // flux proportionality, NaN when undefined

  std::size_t size() const { return points.size(); }
};

namespace detail {

struct QuantKey {
  std::array<std::int64_t, 5> q{};
  bool operator==(const QuantKey&) const = default;
};

struct QuantKeyHash {
  std::size_t operator()(const QuantKey& k) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (std::int64_t v : k.q) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

inline QuantKey quantize(const State& z, double cell) {
  auto q = [cell](double x) { return static_cast<std::int64_t>(std::llround(x / cell)); };
  return QuantKey{{q(z.rho), q(z.v.x), q(z.v.y), q(z.m.x), q(z.m.y)}};
}

// Grows the cloud; owns the dedup index and the per-tag pools.
class CloudBuilder {
 public:
  CloudBuilder(const CloudConfig& cfg, const ToleranceConfig& tol) : cfg_(cfg), tol_(tol) {}

  PointCloud run() {
    seed_grid();
    std::mt19937_64 rng(cfg_.seed);
    for (int round = 1; round <= cfg_.rounds; ++round) {
      for (int pair = 0; pair < cfg_.pairs_per_round; ++pair) {
        if (round == 1) {
          move_k_pair(rng, round);
          continue;
        }
        const double pick = u01_(rng);
        if (pick < 0.30)
          move_k_pair(rng, round);
        else if (pick < 0.45)
          move_flux(rng, round);
        else if (pick < 0.65)
          move_cone_vertex(rng, round);
        else if (pick < 0.80)
          move_disc(rng, round);
        else
          move_directional(rng, round);
      }
    }
    return std::move(cloud_);
  }

 private:
  static constexpr double kMergeCell = 1e-6;
  static constexpr std::size_t kMaxPoints = 2'000'000;

  void seed_grid() {
    const int n = cfg_.resolution;
    for (double rho : {-1.0, 1.0}) {
      for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
          const Vec2 v{-2.0 + 4.0 * ix / (n - 1), -2.0 + 4.0 * iy / (n - 1)};
          append(State{rho, v, rho * v}, 0, -1, -1,
                 std::numeric_limits<double>::quiet_NaN(), false);
        }
      }
    }
  }

  bool is_duplicate(const State& z) const {
    QuantKey base = quantize(z, kMergeCell);
    QuantKey probe = base;
    for (int d0 = -1; d0 <= 1; ++d0)
      for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2)
          for (int d3 = -1; d3 <= 1; ++d3)
            for (int d4 = -1; d4 <= 1; ++d4) {
              probe.q = {base.q[0] + d0, base.q[1] + d1, base.q[2] + d2, base.q[3] + d3,
                         base.q[4] + d4};
              auto it = index_.find(probe);
              if (it != index_.end() &&
                  max_abs(z - cloud_.points[static_cast<std::size_t>(it->second)]) < kMergeCell)
                return true;
            }
    return false;
  }

  int append(const State& z, int round, int pa, int pb, double lambda, bool sweep) {
    if (cloud_.size() >= kMaxPoints || !is_finite(z) || is_duplicate(z)) return -1;
    const int idx = static_cast<int>(cloud_.size());
    index_.emplace(quantize(z, kMergeCell), idx);
    cloud_.points.push_back(z);
    cloud_.provenance.push_back(Provenance{round, pa, pb, lambda});
    const Region r = classify(z, tol_);
    cloud_.tags.push_back(r.tag);
    cloud_.ks.push_back(r.k.value_or(std::numeric_limits<double>::quiet_NaN()));
    if (k_residual(z) <= 1e-12) k_pool_.push_back(idx);
    if (r.tag == RegionTag::X1) x1_pool_.push_back(idx);
    if (r.tag == RegionTag::X2 || r.tag == RegionTag::X3 || r.tag == RegionTag::X4)
      kv_pool_.push_back(idx);
    // Saturate the admissible k interval at this (rho, v): append both
    // endpoint partners, reachable along the pure-flux direction.
    if (sweep && (r.tag == RegionTag::X2 || r.tag == RegionTag::X4)) {
      const KRange kr = k_range(z.rho, z.v, tol_);
      if (kr.kind == KRange::Kind::flexible) {
        append(State{z.rho, z.v, kr.lo * z.v}, round, idx, -1,
               std::numeric_limits<double>::quiet_NaN(), false);
        append(State{z.rho, z.v, kr.hi * z.v}, round, idx, -1,
               std::numeric_limits<double>::quiet_NaN(), false);
      }
    }
    return idx;
  }

  void append_segment(int i1, int i2, int round, std::mt19937_64& rng) {
    if (i1 < 0 || i2 < 0) return;
    const State z1 = cloud_.points[static_cast<std::size_t>(i1)];
    const State z2 = cloud_.points[static_cast<std::size_t>(i2)];
    const int s = cfg_.segment_samples;
    for (int j = 0; j < s; ++j) {
      const double lambda = (j + u01_(rng)) / s;
      append(lambda * z1 + (1.0 - lambda) * z2, round, i1, i2, lambda, round >= 2);
    }
  }

  template <typename Pool>
  int draw(const Pool& pool, std::mt19937_64& rng) {
    if (pool.empty()) return -1;
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
  }

  // K-to-K pairing: for a K point (sign, a, sign a) the unique Lambda-compatible
  // K partner with the opposite density is (-sign, c, -sign c) with
  // c = (1 - tau) a, tau = -2 sign a2 / |a|^2.
  void move_k_pair(std::mt19937_64& rng, int round) {
    const int i1 = draw(k_pool_, rng);
    if (i1 < 0) return;
    const State z1 = cloud_.points[static_cast<std::size_t>(i1)];
    const double sign = z1.rho > 0.0 ? 1.0 : -1.0;
    const Vec2 a = z1.v;
    Vec2 c{};
    if (max_abs(a) <= 1e-12) {
      c = Vec2{0.0, 0.0};
    } else if (a.y == 0.0) {
      c = a;
    } else {
      const double tau = -2.0 * sign * a.y / norm2(a);
      c = (1.0 - tau) * a;
    }
    const State z2{-sign, c, -sign * c};
    if (!in_wave_cone(z1 - z2, tol_)) return;
    const int i2 = append(z2, round, i1, -1, std::numeric_limits<double>::quiet_NaN(), false);
    append_segment(i1, i2 >= 0 ? i2 : find_index(z2), round, rng);
  }

  // Pure-flux slide in k over a fixed (rho, v).
  void move_flux(std::mt19937_64& rng, int round) {
    const int i1 = draw(kv_pool_, rng);
    if (i1 < 0) return;
    const State z1 = cloud_.points[static_cast<std::size_t>(i1)];
    const KRange kr = k_range(z1.rho, z1.v, tol_);
    if (kr.kind == KRange::Kind::empty) return;
    const double k2 = kr.lo + u01_(rng) * (kr.hi - kr.lo);
    const State z2{z1.rho, z1.v, k2 * z1.v};
    const int i2 = append(z2, round, i1, -1, std::numeric_limits<double>::quiet_NaN(), false);
    append_segment(i1, i2 >= 0 ? i2 : find_index(z2), round, rng);
  }

  // Segment between a K point and the rest state (psi, 0, 0) on the rho axis.
  void move_cone_vertex(std::mt19937_64& rng, int round) {
    const int i1 = draw(k_pool_, rng);
    if (i1 < 0) return;
    const State z1 = cloud_.points[static_cast<std::size_t>(i1)];
    const double sign = z1.rho > 0.0 ? 1.0 : -1.0;
    const Vec2 u = z1.v;
    if (sign * u.y >= -1e-9) return;  // needs u2 < 0 for the upper cone and mirrored below
    const double psi = sign * (norm2(u) / (sign * u.y) + 1.0);
    if (std::abs(psi) > 1.0) return;  // outside the cone condition
    const State z2{psi, {0.0, 0.0}, {0.0, 0.0}};
    const int i2 = append(z2, round, i1, -1, std::numeric_limits<double>::quiet_NaN(), false);
    append_segment(i1, i2 >= 0 ? i2 : find_index(z2), round, rng);
  }

  // Pure-flux chord inside the X1 disc.
  void move_disc(std::mt19937_64& rng, int round) {
    const int i1 = draw(x1_pool_, rng);
    if (i1 < 0) return;
    const State z1 = cloud_.points[static_cast<std::size_t>(i1)];
    const double r = std::sqrt(u01_(rng));
    const double theta = u01_(rng) * 2.0 * 3.14159265358979323846;
    const Vec2 e{r * std::cos(theta), r * std::sin(theta)};
    const double w = (1.0 - z1.rho * z1.rho) / 2.0;
    const State z2{z1.rho, {0.0, 0.0}, w * (e - Vec2{0.0, 1.0})};
    const int i2 = append(z2, round, i1, -1, std::numeric_limits<double>::quiet_NaN(), false);
    append_segment(i1, i2 >= 0 ? i2 : find_index(z2), round, rng);
  }

  // Generic directional growth: step from a cloud point along a sampled
  // wave direction, keep the endpoint only when it classifies inside the
  // hull at a gate far stricter than the reporting tolerance, so boundary
  // slop cannot accumulate across rounds.
  void move_directional(std::mt19937_64& rng, int round) {
    if (cloud_.points.empty()) return;
    std::uniform_int_distribution<std::size_t> pick(0, cloud_.points.size() - 1);
    const int i1 = static_cast<int>(pick(rng));
    const State z1 = cloud_.points[static_cast<std::size_t>(i1)];
    const WaveDirection w = detail::sample_wave_direction(rng);
    const double step = 2.0 * u01_(rng) - 1.0;
    const State z2 = z1 + step * realize_wave_direction(w);
    ToleranceConfig gate = tol_;
    gate.eq_tol = 1e-12;
    if (classify(z2, gate).tag == RegionTag::Outside) return;
    const int i2 = append(z2, round, i1, -1, std::numeric_limits<double>::quiet_NaN(), false);
    append_segment(i1, i2 >= 0 ? i2 : find_index(z2), round, rng);
  }

  int find_index(const State& z) const {
    auto it = index_.find(quantize(z, kMergeCell));
    return it == index_.end() ? -1 : it->second;
  }

  CloudConfig cfg_;
  ToleranceConfig tol_;
  PointCloud cloud_;
  std::unordered_map<QuantKey, int, QuantKeyHash> index_;
  std::vector<int> k_pool_;
  std::vector<int> x1_pool_;
  std::vector<int> kv_pool_;
  std::uniform_real_distribution<double> u01_{0.0, 1.0};
};

}  // namespace detail

inline PointCloud grow_cloud(const CloudConfig& cfg, const ToleranceConfig& tol = {}) {
  if (cfg.resolution < 2 || cfg.rounds < 0 || cfg.pairs_per_round < 0 ||
      cfg.segment_samples < 1)
    throw std::invalid_argument("grow_cloud: invalid configuration");
  detail::CloudBuilder builder(cfg, tol);
  return builder.run();
}

struct ContainmentReport {
  std::size_t total = 0;
  std::array<std::size_t, 6> counts{};  // indexed by RegionTag order
  std::vector<std::size_t> violations;  // indices classifying Outside

  std::size_t count(RegionTag t) const { return counts[static_cast<std::size_t>(t)]; }
};

/// Classifies every cloud point; violations must stay empty for any grown
/// cloud (the statistical form of the hull upper bound).
inline ContainmentReport containment_report(const PointCloud& cloud,
                                            const ToleranceConfig& tol = {}) {
  ContainmentReport rep;
  rep.total = cloud.size();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const RegionTag t = classify(cloud.points[i], tol).tag;
    rep.counts[static_cast<std::size_t>(t)]++;
    if (t == RegionTag::Outside) rep.violations.push_back(i);
  }
  return rep;
}

struct KCoverage {
  bool found = false;
  double k_min = 0.0;
  double k_max = 0.0;
  std::size_t count = 0;
};

/// Empirical range of the flux proportionality k over cloud points whose
/// (rho, v) lies within `radius` of the query and whose m is parallel to v.
inline KCoverage k_coverage(const PointCloud& cloud, double rho, Vec2 v, double radius,
                            const ToleranceConfig& tol = {}) {
  if (norm(v) <= tol.eq_tol) throw std::invalid_argument("k_coverage requires v != 0");
  KCoverage cov;
  for (const State& z : cloud.points) {
    const double d2 = (z.rho - rho) * (z.rho - rho) + norm2(z.v - v);
    if (d2 > radius * radius) continue;
    if (norm(z.v) <= tol.eq_tol || !m_parallel_v(z.m, z.v, tol)) continue;
    const double k = dot(z.m, z.v) / norm2(z.v);
    if (!cov.found) {
      cov.found = true;
      cov.k_min = cov.k_max = k;
    } else {
      cov.k_min = std::min(cov.k_min, k);
      cov.k_max = std::max(cov.k_max, k);
    }
    cov.count++;
  }
  return cov;
}

/// CSV dump, one row per point: rho,v1,v2,m1,m2,round,tag,k.
inline void write_cloud_csv(const PointCloud& cloud, std::ostream& os) {
  os << "rho,v1,v2,m1,m2,round,tag,k\n";
  char buf[512];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const State& z = cloud.points[i];
    const double k = cloud.ks[i];
    int n = std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d,%s,",
                          z.rho, z.v.x, z.v.y, z.m.x, z.m.y, cloud.provenance[i].round,
                          to_string(cloud.tags[i]));
    os.write(buf, n);
    if (std::isnan(k)) {
      os.put('\n');
    } else {
      n = std::snprintf(buf, sizeof buf, "%.17g\n", k);
      os.write(buf, n);
    }
  }
}

}  // namespace ipm

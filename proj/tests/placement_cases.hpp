#pragma once

#include <map>
#include <random>

#include "oracles.hpp"
#include "shelter/placement.hpp"

namespace placement_cases {

using namespace shelter;
using placement::Candidate;
using placement::DemandZone;
using placement::PlacementParams;

inline const geo::GeoPoint kOrigin{-118.4, 34.1};

// A 2 km square zone and a frame centred on it, so candidate positions can be
// laid out in metres from the zone boundary.
struct Layout {
  std::vector<geo::GeoPolygon> zones;
  geo::LocalFrame frame;

  explicit Layout(std::vector<geo::GeoPolygon> z) : zones(std::move(z)), frame(geo::LocalFrame::around(zones)) {}

  // The point `d` metres east of the first zone's east edge, at its mid height.
  geo::GeoPoint east_of(double d) const {
    const auto& b = zones.front().bbox();
    const auto edge = frame.project({b.max_lon, (b.min_lat + b.max_lat) / 2});
    return frame.unproject({edge.x + d, edge.y});
  }
};

inline Layout square_layout() { return Layout({geo::GeoPolygon(oracle::box(kOrigin, 0, 0, 2000, 2000), {}, "evac_order", "Z")}); }

// Planar distance from p to the projected polygon, 0 inside.
inline double oracle_distance(const geo::GeoPoint& p, const std::vector<geo::GeoPolygon>& polys, const geo::LocalFrame& f) {
  double best = oracle::kInf;
  const auto q = f.project(p);
  for (const auto& poly : polys) {
    if (oracle::ray_cast(p, poly)) return 0.0;
    auto ring_dist = [&](const geo::Ring& r) {
      for (std::size_t i = 0; i + 1 < r.size(); ++i) {
        const auto a = f.project(r[i]);
        const auto b = f.project(r[i + 1]);
        best = std::min(best, oracle::seg_distance(q.x, q.y, a.x, a.y, b.x, b.y));
      }
    };
    ring_dist(poly.exterior());
    for (const auto& h : poly.holes()) ring_dist(h);
  }
  return best;
}

inline long ring_of(double d, double step) { return std::max(1L, static_cast<long>(std::ceil(d / step))); }

inline std::map<std::string, const Candidate*> by_id(const std::vector<Candidate>& c) {
  std::map<std::string, const Candidate*> out;
  for (const auto& x : c) out[x.id] = &x;
  return out;
}

// Random zones and candidates with no candidate within 2 m of a ring boundary.
struct RandomCase {
  std::vector<geo::GeoPolygon> zone_polys;
  std::vector<DemandZone> zones;
  std::vector<Candidate> candidates;
  PlacementParams params;
};

inline RandomCase random_case(std::mt19937_64& rng, int n_zones) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    RandomCase rc;
    rc.params.ring_step_m = 500.0 + 2000.0 * u(rng);
    rc.params.k = 1.0 + 2.0 * u(rng);
    for (int z = 0; z < n_zones; ++z) {
      const double x = 30000.0 * z + 3000.0 * u(rng), y = 3000.0 * u(rng);
      const double w = 1000.0 + 4000.0 * u(rng), h = 1000.0 + 4000.0 * u(rng);
      geo::GeoPolygon poly(oracle::box(kOrigin, x, y, x + w, y + h), {}, "evac_order", "Z" + std::to_string(z));
      rc.zone_polys.push_back(poly);
      rc.zones.push_back({poly.name(), {poly}, 200.0 + 3000.0 * u(rng)});
    }
    const auto frame = geo::LocalFrame::around(rc.zone_polys);
    const int n = std::uniform_int_distribution<int>(5, 40)(rng);
    bool clean = true;
    for (int i = 0; i < n && clean; ++i) {
      const double x = -15000.0 + (30000.0 * n_zones + 15000.0) * u(rng), y = -15000.0 + 35000.0 * u(rng);
      const geo::GeoPoint p{kOrigin.lon + oracle::lon_deg(x, kOrigin.lat), kOrigin.lat + oracle::lat_deg(y)};
      const bool pre = u(rng) < 0.1;
      rc.candidates.push_back({"c" + std::to_string(100 + i), p, std::floor(50.0 + 1500.0 * u(rng)), pre});
      for (const auto& z : rc.zones) {
        const double d = oracle_distance(p, z.polygons, frame) / rc.params.ring_step_m;
        if (d > 0.0 && std::abs(d - std::round(d)) * rc.params.ring_step_m < 2.0) clean = false;
      }
    }
    if (clean) return rc;
  }
}

}  // namespace placement_cases

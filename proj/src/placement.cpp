#include "shelter/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shelter::placement {

namespace {

struct Ranked {
  const Candidate* c = nullptr;
  double distance_m = 0.0;
  long ring = 0;
};

long ring_of(double distance_m, double step_m) {
  // A candidate exactly on a ring boundary belongs to that ring.
  return std::max(1L, static_cast<long>(std::ceil(distance_m / step_m - 1e-6)));
}

bool nearer(const Ranked& a, const Ranked& b) {
  if (a.ring != b.ring) return a.ring < b.ring;
  if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
  return a.c->id < b.c->id;
}

void check_candidates(std::span<const Candidate> candidates) {
  for (const auto& c : candidates) {
    if (!(c.capacity >= 0.0)) throw InvalidInput("candidate " + c.id + " has negative capacity");
  }
}

}  // namespace

void PlacementParams::validate() const {
  if (!(k >= 1.0) || !std::isfinite(k)) throw InvalidInput("k must be >= 1");
  if (!(ring_step_m > 0.0) || !std::isfinite(ring_step_m)) throw InvalidInput("ring step must be > 0");
}

double distance_to_zones_m(const geo::GeoPoint& p, std::span<const geo::GeoPolygon> zones,
                           const geo::LocalFrame& frame) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : zones) best = std::min(best, geo::distance_to_polygon_m(p, z, frame));
  return best;
}

PlacementResult place_capacity_based(std::span<const Candidate> candidates, std::span<const geo::GeoPolygon> zones,
                                     double demand_total, const PlacementParams& params) {
  params.validate();
  check_candidates(candidates);
  if (!(demand_total > 0.0)) throw InvalidInput("demand must be > 0");
  if (zones.empty()) throw InvalidInput("capacity-based placement needs at least one zone");
  const auto frame = geo::LocalFrame::around(zones);
  const double threshold = params.k * demand_total;

  PlacementResult out;
  out.method = "capacity";
  double admitted = 0.0;
  std::vector<Ranked> pool;
  for (const auto& c : candidates) {
    if (c.preseeded) {
      out.selected.push_back(c.id);
      out.total_capacity += c.capacity;
      admitted += c.capacity;
      continue;
    }
    const double d = distance_to_zones_m(c.location, zones, frame);
    pool.push_back({&c, d, ring_of(d, params.ring_step_m)});
  }
  std::sort(pool.begin(), pool.end(), nearer);

  // Filtering: whole rings at a time.
  std::vector<Ranked> filtered;
  std::size_t next = 0;
  while (admitted < threshold && next < pool.size()) {
    const long ring = pool[next].ring;
    for (; next < pool.size() && pool[next].ring == ring; ++next) {
      filtered.push_back(pool[next]);
      admitted += pool[next].c->capacity;
    }
    out.final_radius_m = static_cast<double>(ring) * params.ring_step_m;
  }
  if (admitted < threshold) throw Infeasible("", threshold - admitted);
  for (const auto& f : filtered) out.filtered.push_back(f.c->id);

  // Refinement: largest first.
  std::sort(filtered.begin(), filtered.end(), [](const Ranked& a, const Ranked& b) {
    if (a.c->capacity != b.c->capacity) return a.c->capacity > b.c->capacity;
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    return a.c->id < b.c->id;
  });
  for (const auto& f : filtered) {
    if (out.total_capacity >= demand_total) break;
    out.selected.push_back(f.c->id);
    out.total_capacity += f.c->capacity;
  }
  out.per_zone.push_back({"all", demand_total, out.selected, out.total_capacity, out.final_radius_m});
  return out;
}

PlacementResult place_distance_based(std::span<const Candidate> candidates, std::span<const DemandZone> zones,
                                     const PlacementParams& params) {
  params.validate();
  check_candidates(candidates);
  if (zones.empty()) throw InvalidInput("distance-based placement needs at least one zone");
  std::vector<geo::GeoPolygon> all_polys;
  for (const auto& z : zones) {
    if (!(z.demand > 0.0)) throw InvalidInput("zone '" + z.name + "' must have positive demand");
    if (z.polygons.empty()) throw InvalidInput("zone '" + z.name + "' has no polygons");
    all_polys.insert(all_polys.end(), z.polygons.begin(), z.polygons.end());
  }
  const auto frame = geo::LocalFrame::around(all_polys);

  PlacementResult out;
  out.method = "distance";
  out.per_zone.resize(zones.size());
  for (std::size_t z = 0; z < zones.size(); ++z) {
    out.per_zone[z].zone = zones[z].name;
    out.per_zone[z].demand = zones[z].demand;
  }

  // Credit pre-seeded shelters to their nearest zone (earlier zone on ties).
  for (const auto& c : candidates) {
    if (!c.preseeded) continue;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < zones.size(); ++z) {
      const double d = distance_to_zones_m(c.location, zones[z].polygons, frame);
      if (d < best_d) {
        best_d = d;
        best = z;
      }
    }
    out.selected.push_back(c.id);
    out.per_zone[best].selected.push_back(c.id);
    out.per_zone[best].capacity += c.capacity;
  }

  std::vector<bool> claimed(candidates.size(), false);
  for (std::size_t z = 0; z < zones.size(); ++z) {
    auto& slot = out.per_zone[z];
    if (slot.capacity >= slot.demand) continue;
    std::vector<Ranked> pool;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto& c = candidates[i];
      if (c.preseeded || claimed[i]) continue;
      const double d = distance_to_zones_m(c.location, zones[z].polygons, frame);
      pool.push_back({&c, d, ring_of(d, params.ring_step_m)});
    }
    std::sort(pool.begin(), pool.end(), nearer);
    std::size_t next = 0;
    while (slot.capacity < slot.demand && next < pool.size()) {
      const long ring = pool[next].ring;
      for (; next < pool.size() && pool[next].ring == ring; ++next) {
        const Candidate* c = pool[next].c;
        claimed[static_cast<std::size_t>(c - candidates.data())] = true;
        slot.selected.push_back(c->id);
        out.selected.push_back(c->id);
        slot.capacity += c->capacity;
      }
      slot.radius_m = static_cast<double>(ring) * params.ring_step_m;
    }
    if (slot.capacity < slot.demand) throw Infeasible(slot.zone, slot.demand - slot.capacity);
  }

  for (const auto& slot : out.per_zone) {
    out.total_capacity += slot.capacity;
    out.final_radius_m = std::max(out.final_radius_m, slot.radius_m);
  }
  return out;
}

}  // namespace shelter::placement

#pragma once

#include <span>
#include <string>
#include <vector>

#include "shelter/geo.hpp"

namespace shelter::placement {

inline constexpr double kMileM = 1609.34;

struct PlacementParams {
  double k = 2.0;
  double ring_step_m = kMileM;

  void validate() const;
};

struct Candidate {
  std::string id;
  geo::GeoPoint location;
  double capacity = 0.0;
  bool preseeded = false;  // an already-open shelter: always selected
};

// A demand area searched as one unit (e.g. every order/warning polygon of a
// named fire), with the population it must shelter.
struct DemandZone {
  std::string name;
  std::vector<geo::GeoPolygon> polygons;
  double demand = 0.0;
};

struct ZoneAssignment {
  std::string zone;
  double demand = 0.0;
  std::vector<std::string> selected;
  double capacity = 0.0;
  double radius_m = 0.0;
};

struct PlacementResult {
  std::string method;
  std::vector<std::string> selected;  // pre-seeded first, then in selection order
  double total_capacity = 0.0;
  double final_radius_m = 0.0;
  std::vector<ZoneAssignment> per_zone;
  // Capacity-based only: the candidates admitted by the filtering rings.
  std::vector<std::string> filtered;
};

// Filtering: rings of ring_step around the zones admit candidates (nearest ring
// first) until admitted capacity, pre-seeded included, reaches k * demand.
// Refinement: pre-seeded shelters, then admitted candidates by descending
// capacity (ties: nearer, then smaller id) until demand is covered.
// Throws Infeasible with the shortfall against k * demand.
PlacementResult place_capacity_based(std::span<const Candidate> candidates, std::span<const geo::GeoPolygon> zones,
                                     double demand_total, const PlacementParams& params);

// Zones in input order. Each pre-seeded shelter is credited to its nearest
// zone; then each zone claims every unclaimed candidate ring by ring until its
// demand is covered. Throws Infeasible naming the first zone that cannot be
// covered.
PlacementResult place_distance_based(std::span<const Candidate> candidates, std::span<const DemandZone> zones,
                                     const PlacementParams& params);

// Straight-line metres from p to the nearest polygon (0 inside).
double distance_to_zones_m(const geo::GeoPoint& p, std::span<const geo::GeoPolygon> zones,
                           const geo::LocalFrame& frame);

}  // namespace shelter::placement

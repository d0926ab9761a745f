#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "shelter/geo.hpp"

namespace shelter::demand {

inline constexpr double kSqftPerSqm = 10.76391;
inline constexpr double kUsableShare = 0.70;
inline constexpr double kSqftPerPerson = 100.0;

enum class ZoneTag { order, warning, none };

std::string to_string(ZoneTag t);
ZoneTag zone_tag_from_layer(const std::string& layer);

struct DemandCell {
  std::string id;
  geo::GeoPoint centroid;
  double population = 0.0;
  ZoneTag zone_tag = ZoneTag::none;
  std::string zone_name;  // name of the containing zone polygon, if any
  bool in_fire = false;
};

enum class AreaUnit { sqft, sqm };

struct FloorArea {
  double value = 0.0;
  AreaUnit unit = AreaUnit::sqft;
};

enum class ShelterStatus { open, candidate };

struct Shelter {
  std::string id;
  std::string name;
  geo::GeoPoint location;
  std::optional<double> capacity;
  std::optional<FloorArea> floor_area;
  ShelterStatus status = ShelterStatus::open;
  double occupied = 0.0;

  // Throws InvalidInput when neither capacity nor floor area is present, or
  // occupancy is negative.
  void validate() const;
};

struct DemandSummary {
  double total_order = 0.0;
  double total_warning = 0.0;
  double total = 0.0;
  double total_supply = 0.0;
  double gap = 0.0;
};

// floor(area_sqft * 0.70 / 100). Throws InvalidInput for non-positive area.
double estimate_capacity(const FloorArea& area);

// Published capacity when present, else the floor-area estimate, minus current
// occupants; never negative.
double effective_capacity(const Shelter& s);

// Tags each cell by centroid containment (order wins over warning) and marks
// cells whose centroid lies in a fire perimeter.
std::vector<DemandCell> tag_cells(std::vector<DemandCell> cells, std::span<const geo::GeoPolygon> zones,
                                  std::span<const geo::GeoPolygon> perimeters);

// Tags the cells, then keeps those whose tag is in `include`; with
// exclude_fire, drops cells inside a fire perimeter.
std::vector<DemandCell> filter_demand(std::vector<DemandCell> cells, std::span<const geo::GeoPolygon> zones,
                                      std::span<const geo::GeoPolygon> perimeters, const std::set<ZoneTag>& include,
                                      bool exclude_fire);

// Supply is the sum of effective capacity over open shelters unless
// supply_override is given.
DemandSummary demand_summary(std::span<const DemandCell> cells, std::span<const Shelter> shelters,
                             std::optional<double> supply_override = std::nullopt);

// Population CSV: cell_id,lon,lat,population.
std::vector<DemandCell> read_population_csv(const std::string& text, const std::string& source = "<memory>");
std::vector<DemandCell> load_population_csv(const std::string& path);

// Shelter CSV: id,name,lon,lat,capacity,floor_area,area_unit,status,occupied.
std::vector<Shelter> read_shelters_csv(const std::string& text, const std::string& source = "<memory>");
std::vector<Shelter> load_shelters_csv(const std::string& path);

}  // namespace shelter::demand

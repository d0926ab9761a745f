#include "shelter/demand_supply.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "shelter/csv.hpp"

namespace shelter::demand {

std::string to_string(ZoneTag t) {
  switch (t) {
    case ZoneTag::order:
      return "order";
    case ZoneTag::warning:
      return "warning";
    case ZoneTag::none:
      break;
  }
  return "none";
}

ZoneTag zone_tag_from_layer(const std::string& layer) {
  if (layer == "evac_order" || layer == "order") return ZoneTag::order;
  if (layer == "evac_warning" || layer == "warning") return ZoneTag::warning;
  return ZoneTag::none;
}

void Shelter::validate() const {
  if (!capacity && !floor_area) throw InvalidInput("shelter " + id + " has neither capacity nor floor area");
  if (capacity && !(*capacity >= 0.0)) throw InvalidInput("shelter " + id + " has negative capacity");
  if (!(occupied >= 0.0)) throw InvalidInput("shelter " + id + " has negative occupancy");
  if (!geo::is_valid(location)) throw InvalidInput("shelter " + id + " has invalid coordinates");
}

double estimate_capacity(const FloorArea& area) {
  if (!(area.value > 0.0) || !std::isfinite(area.value)) throw InvalidInput("floor area must be > 0");
  const double sqft = area.unit == AreaUnit::sqm ? area.value * kSqftPerSqm : area.value;
  // 1e-9 guards against 0.7 not being exact in binary: 130000 * 0.7 / 100 must be 910.
  return std::floor(sqft * kUsableShare / kSqftPerPerson + 1e-9);
}

double effective_capacity(const Shelter& s) {
  const double base = s.capacity ? *s.capacity : estimate_capacity(*s.floor_area);
  return std::max(0.0, base - s.occupied);
}

std::vector<DemandCell> tag_cells(std::vector<DemandCell> cells, std::span<const geo::GeoPolygon> zones,
                                  std::span<const geo::GeoPolygon> perimeters) {
  auto first_containing = [&](const geo::GeoPoint& p, ZoneTag tag) -> const geo::GeoPolygon* {
    for (const auto& z : zones) {
      if (zone_tag_from_layer(z.tag()) == tag && geo::point_in_polygon(p, z)) return &z;
    }
    return nullptr;
  };
  for (auto& c : cells) {
    c.zone_tag = ZoneTag::none;
    c.zone_name.clear();
    for (const ZoneTag tag : {ZoneTag::order, ZoneTag::warning}) {
      if (const auto* z = first_containing(c.centroid, tag)) {
        c.zone_tag = tag;
        c.zone_name = z->name();
        break;
      }
    }
    c.in_fire = geo::point_in_any(c.centroid, perimeters);
  }
  return cells;
}

std::vector<DemandCell> filter_demand(std::vector<DemandCell> cells, std::span<const geo::GeoPolygon> zones,
                                      std::span<const geo::GeoPolygon> perimeters, const std::set<ZoneTag>& include,
                                      bool exclude_fire) {
  if (include.empty()) return {};
  cells = tag_cells(std::move(cells), zones, perimeters);
  std::erase_if(cells, [&](const DemandCell& c) {
    return !include.contains(c.zone_tag) || (exclude_fire && c.in_fire);
  });
  return cells;
}

DemandSummary demand_summary(std::span<const DemandCell> cells, std::span<const Shelter> shelters,
                             std::optional<double> supply_override) {
  DemandSummary s;
  for (const auto& c : cells) {
    if (c.zone_tag == ZoneTag::order) s.total_order += c.population;
    if (c.zone_tag == ZoneTag::warning) s.total_warning += c.population;
  }
  s.total = s.total_order + s.total_warning;
  if (supply_override) {
    s.total_supply = *supply_override;
  } else {
    for (const auto& sh : shelters) {
      if (sh.status == ShelterStatus::open) s.total_supply += effective_capacity(sh);
    }
  }
  s.gap = std::max(0.0, s.total - s.total_supply);
  return s;
}

std::vector<DemandCell> read_population_csv(const std::string& text, const std::string& source) {
  const auto t = csv::Table::parse(text, source);
  t.require({"cell_id", "lon", "lat", "population"});
  std::vector<DemandCell> out;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    DemandCell c;
    c.id = t.at(r, "cell_id");
    c.centroid = {t.required_number(r, "lon"), t.required_number(r, "lat")};
    c.population = t.required_number(r, "population");
    if (!ids.insert(c.id).second) throw InvalidInput(source + ": duplicate cell id " + c.id);
    if (!(c.population >= 0.0)) throw InvalidInput(source + ": cell " + c.id + " has negative population");
    if (!geo::is_valid(c.centroid)) throw InvalidInput(source + ": cell " + c.id + " has invalid coordinates");
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<DemandCell> load_population_csv(const std::string& path) {
  return read_population_csv(csv::read_file(path), path);
}

std::vector<Shelter> read_shelters_csv(const std::string& text, const std::string& source) {
  const auto t = csv::Table::parse(text, source);
  t.require({"id", "name", "lon", "lat", "capacity", "floor_area", "area_unit", "status", "occupied"});
  std::vector<Shelter> out;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Shelter s;
    s.id = t.at(r, "id");
    s.name = t.at(r, "name");
    s.location = {t.required_number(r, "lon"), t.required_number(r, "lat")};
    s.capacity = t.number(r, "capacity");
    if (const auto area = t.number(r, "floor_area")) {
      const std::string unit = t.get(r, "area_unit");
      if (unit.empty() || unit == "sqft") {
        s.floor_area = FloorArea{*area, AreaUnit::sqft};
      } else if (unit == "sqm") {
        s.floor_area = FloorArea{*area, AreaUnit::sqm};
      } else {
        throw InvalidInput(source + ": shelter " + s.id + " has unknown area unit '" + unit + "'");
      }
    }
    const std::string status = t.get(r, "status");
    if (status.empty() || status == "open") {
      s.status = ShelterStatus::open;
    } else if (status == "candidate") {
      s.status = ShelterStatus::candidate;
    } else {
      throw InvalidInput(source + ": shelter " + s.id + " has unknown status '" + status + "'");
    }
    s.occupied = t.number(r, "occupied").value_or(0.0);
    s.validate();
    if (!ids.insert(s.id).second) throw InvalidInput(source + ": duplicate shelter id " + s.id);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Shelter> load_shelters_csv(const std::string& path) { return read_shelters_csv(csv::read_file(path), path); }

}  // namespace shelter::demand

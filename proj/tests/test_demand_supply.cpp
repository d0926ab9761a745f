#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "shelter/demand_supply.hpp"
#include "shelter/scenario.hpp"

using namespace shelter;
using demand::AreaUnit;
using demand::DemandCell;
using demand::FloorArea;
using demand::Shelter;
using demand::ShelterStatus;
using demand::ZoneTag;

namespace {

Shelter shelter_with(std::optional<double> capacity, std::optional<FloorArea> area, double occupied = 0.0,
                     ShelterStatus status = ShelterStatus::open) {
  Shelter s;
  s.id = "s";
  s.capacity = capacity;
  s.floor_area = area;
  s.occupied = occupied;
  s.status = status;
  return s;
}

double population(const std::vector<DemandCell>& cells) {
  return std::accumulate(cells.begin(), cells.end(), 0.0, [](double a, const DemandCell& c) { return a + c.population; });
}

}  // namespace

TEST_CASE("estimate_capacity") {
  CHECK(demand::estimate_capacity({15000, AreaUnit::sqft}) == 105);
  CHECK(demand::estimate_capacity({130000, AreaUnit::sqft}) == 910);
  CHECK(demand::estimate_capacity({28985, AreaUnit::sqft}) == 202);
  // published figures 797 and 1056 differ from the floor rule by at most 2
  CHECK(demand::estimate_capacity({10573.27, AreaUnit::sqm}) == 796);
  CHECK(demand::estimate_capacity({150686, AreaUnit::sqft}) == 1054);
  CHECK(demand::estimate_capacity({100.0 / 0.7 - 1e-6, AreaUnit::sqft}) == 0);
  CHECK_THROWS_AS(demand::estimate_capacity({0.0, AreaUnit::sqft}), InvalidInput);
  CHECK_THROWS_AS(demand::estimate_capacity({-5.0, AreaUnit::sqm}), InvalidInput);

  double last = 0.0;
  for (double a = 1.0; a < 500000.0; a *= 1.37) {
    const double c = demand::estimate_capacity({a, AreaUnit::sqft});
    CHECK(c >= last);
    CHECK(c >= 0.0);
    last = c;
  }
}

TEST_CASE("effective_capacity") {
  CHECK(demand::effective_capacity(shelter_with(356, std::nullopt)) == 356);
  CHECK(demand::effective_capacity(shelter_with(356, std::nullopt, 356)) == 0);
  CHECK(demand::effective_capacity(shelter_with(std::nullopt, FloorArea{15000, AreaUnit::sqft}, 5)) == 100);
  // published capacity wins over floor area
  CHECK(demand::effective_capacity(shelter_with(100, FloorArea{15000, AreaUnit::sqft})) == 100);
  CHECK(demand::effective_capacity(shelter_with(10, std::nullopt, 25)) == 0);
  CHECK_THROWS_AS(shelter_with(std::nullopt, std::nullopt).validate(), InvalidInput);
  CHECK_THROWS_AS(shelter_with(10, std::nullopt, -1).validate(), InvalidInput);
}

TEST_CASE("tag_cells and filter_demand") {
  const geo::GeoPolygon order(geo::closed({{0, 0}, {2, 0}, {2, 2}, {0, 2}}), {}, "evac_order", "A");
  const geo::GeoPolygon warning(geo::closed({{-1, -1}, {3, -1}, {3, 3}, {-1, 3}}), {}, "evac_warning", "A");
  const geo::GeoPolygon fire(geo::closed({{0.5, 0.5}, {1, 0.5}, {1, 1}, {0.5, 1}}), {}, "fire_perimeter", "F");
  const std::vector<geo::GeoPolygon> zones = {warning, order};
  const std::vector<geo::GeoPolygon> perims = {fire};
  const std::vector<DemandCell> cells = {
      {"in_order", {1.5, 1.5}, 10}, {"in_fire", {0.75, 0.75}, 20}, {"in_warning", {2.5, 2.5}, 30},
      {"outside", {5, 5}, 40},      {"edge", {2, 1}, 50},
  };
  const auto tagged = demand::tag_cells(cells, zones, perims);
  CHECK(tagged[0].zone_tag == ZoneTag::order);
  CHECK(tagged[0].zone_name == "A");
  CHECK(tagged[1].in_fire);
  CHECK(tagged[2].zone_tag == ZoneTag::warning);
  CHECK(tagged[3].zone_tag == ZoneTag::none);
  CHECK(tagged[4].zone_tag == ZoneTag::order);  // boundary of the order zone

  const auto both = demand::filter_demand(cells, zones, perims, {ZoneTag::order, ZoneTag::warning}, false);
  CHECK(both.size() == 4);
  CHECK(population(both) <= population(cells));
  const auto no_fire = demand::filter_demand(cells, zones, perims, {ZoneTag::order, ZoneTag::warning}, true);
  CHECK(no_fire.size() == 3);
  for (const auto& c : no_fire) CHECK(c.id != "in_fire");
  CHECK(demand::filter_demand(cells, zones, perims, {}, false).empty());
  CHECK(demand::filter_demand(cells, zones, perims, {ZoneTag::warning}, false).size() == 1);
}

TEST_CASE("demand_summary") {
  std::vector<DemandCell> cells = {{"a", {}, 100, ZoneTag::order}, {"b", {}, 50, ZoneTag::warning}};
  const auto none = demand::demand_summary(cells, {});
  CHECK(none.total == 150);
  CHECK(none.gap == 150);
  CHECK(none.total_supply == 0);

  const std::vector<Shelter> shelters = {shelter_with(200, std::nullopt),
                                         shelter_with(1000, std::nullopt, 0, ShelterStatus::candidate)};
  const auto covered = demand::demand_summary(cells, shelters);
  CHECK(covered.total_supply == 200);
  CHECK(covered.gap == 0);
  CHECK(demand::demand_summary(cells, shelters, 120.0).gap == 30);
}

TEST_CASE("published totals fixture") {
  scenario::ScenarioConfig published = scenario::ScenarioConfig::load(oracle::kPublishedTotals + "/published_supply.json");
  const auto data = scenario::load_inputs(published.inputs);
  const auto cells = scenario::demand_cells(data, false);
  std::vector<Shelter> open;
  for (const auto& s : data.shelters) {
    if (s.status == ShelterStatus::open) open.push_back(s);
  }
  CHECK(open.size() == 8);

  const auto s = demand::demand_summary(cells, open, published.supply_total_override);
  CHECK(s.total_order == 44348);
  CHECK(s.total_warning == 42263);
  CHECK(s.total == 86611);
  CHECK(s.total_supply == 5224);
  CHECK(s.gap == 81387);

  // the eight table capacities sum to 5,022
  const auto table = scenario::ScenarioConfig::load(oracle::kPublishedTotals + "/table_supply.json");
  const auto t = demand::demand_summary(cells, open, table.supply_total_override);
  CHECK(t.total_supply == 5022);
  CHECK(t.gap == 86611 - 5022);
}

TEST_CASE("CSV readers") {
  const auto cells = demand::read_population_csv("cell_id,lon,lat,population\nc1,-118,34,12.5\n\"c,2\",-118.1,34.1,0\n");
  REQUIRE(cells.size() == 2);
  CHECK(cells[1].id == "c,2");
  CHECK(cells[0].population == 12.5);
  CHECK_THROWS_AS(demand::read_population_csv("cell_id,lon,lat,population\nc1,-118,34,-1\n"), InvalidInput);
  CHECK_THROWS_AS(demand::read_population_csv("cell_id,lon,lat,population\nc1,-218,34,1\n"), InvalidInput);
  CHECK_THROWS_AS(demand::read_population_csv("cell_id,lon,population\nc1,-118,1\n"), InvalidInput);
  CHECK_THROWS_AS(demand::read_population_csv("cell_id,lon,lat,population\nc1,-118,34,1\nc1,-118,34,1\n"),
                  InvalidInput);

  const auto shelters = demand::read_shelters_csv(
      "id,name,lon,lat,capacity,floor_area,area_unit,status,occupied\n"
      "s1,Hall,-118,34,356,,,open,0\n"
      "s2,\"Gym, North\",-118,34,,10573.27,sqm,candidate,\n");
  REQUIRE(shelters.size() == 2);
  CHECK(shelters[1].name == "Gym, North");
  CHECK(shelters[1].status == ShelterStatus::candidate);
  CHECK(shelters[1].floor_area->unit == AreaUnit::sqm);
  CHECK(demand::effective_capacity(shelters[1]) == 796);
  CHECK_THROWS_AS(demand::read_shelters_csv("id,name,lon,lat,capacity,floor_area,area_unit,status,occupied\n"
                                            "s1,Hall,-118,34,,,,open,0\n"),
                  InvalidInput);
  CHECK_THROWS_AS(demand::read_shelters_csv("id,name,lon,lat,capacity,floor_area,area_unit,status,occupied\n"
                                            "s1,Hall,-118,34,10,,,closed,0\n"),
                  InvalidInput);
  CHECK_THROWS_AS(demand::read_shelters_csv("id,name,lon,lat,capacity,floor_area,area_unit,status,occupied\n"
                                            "s1,Hall,-118,34,,500,acres,open,0\n"),
                  InvalidInput);
  CHECK_THROWS_AS(demand::load_shelters_csv("/nonexistent.csv"), IoError);
}

TEST_CASE("mini fixture shelters") {
  const auto shelters = demand::load_shelters_csv(oracle::kMiniFire + "/shelters.csv");
  REQUIRE(shelters.size() == 8);
  double total = 0.0;
  for (const auto& s : shelters) total += demand::effective_capacity(s);
  // 356 + 100 + 796 + (598 - 40) + 855 + 350 + 910 + 1054
  CHECK(total == 4979);
}

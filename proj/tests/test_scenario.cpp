#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <map>

#include <json.hpp>

#include "oracles.hpp"
#include "shelter/csv.hpp"
#include "shelter/equity.hpp"
#include "shelter/scenario.hpp"

using namespace shelter;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(oracle::kMiniFire) / "scenarios";

scenario::ScenarioConfig load(const std::string& name) { return scenario::ScenarioConfig::load(kScenarios / (name + ".json")); }

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("shelter_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json minimal_config() {
  const std::string d = oracle::kMiniFire;
  return {{"case", "case2"},
          {"inputs",
           {{"roads", d + "/roads.csv"},
            {"grid", d + "/grid.csv"},
            {"shelters", d + "/shelters.csv"},
            {"zones", d + "/zones.geojson"},
            {"perimeters", d + "/perimeters.geojson"}}}};
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = load("case4_capacity");
  CHECK(c.id == "case4_capacity");
  CHECK(c.kind == scenario::Case::case4_capacity);
  CHECK(c.placement->k == 2.0);
  CHECK(c.placement->ring_step_m == 1609.34);
  CHECK(c.decay.sigma_min == 30.0);
  CHECK(c.congestion->buffer_m == 5000.0);
  CHECK(c.inputs.candidates->filename() == "candidates.csv");
  CHECK(fs::exists(c.inputs.roads));

  auto doc = minimal_config();
  CHECK_NOTHROW(scenario::ScenarioConfig::from_json(doc, "."));

  SUBCASE("defaults") {
    const auto d = scenario::ScenarioConfig::from_json(doc, ".");
    CHECK(d.decay.t0_min == 120.0);
    CHECK(d.snap_radius_m == 5000.0);
    CHECK_FALSE(d.congestion.has_value());
  }
  SUBCASE("unknown keys") {
    doc["sigma"] = 3;
    CHECK_THROWS_AS(scenario::ScenarioConfig::from_json(doc, "."), ConfigError);
  }
  SUBCASE("unknown case") {
    doc["case"] = "case9";
    CHECK_THROWS_AS(scenario::ScenarioConfig::from_json(doc, "."), ConfigError);
  }
  SUBCASE("case 2 needs perimeters") {
    doc["inputs"].erase("perimeters");
    CHECK_THROWS_AS(scenario::ScenarioConfig::from_json(doc, "."), ConfigError);
  }
  SUBCASE("case 3 needs congestion") {
    doc["case"] = "case3";
    CHECK_THROWS_AS(scenario::ScenarioConfig::from_json(doc, "."), ConfigError);
  }
  SUBCASE("case 4 needs placement") {
    doc["case"] = "case4_distance";
    doc["congestion"] = json::object();
    CHECK_THROWS_AS(scenario::ScenarioConfig::from_json(doc, "."), ConfigError);
  }
  SUBCASE("bad numbers") {
    doc["decay"] = {{"sigma_min", -3}};
    CHECK_THROWS_AS(scenario::ScenarioConfig::from_json(doc, "."), ConfigError);
    doc["decay"] = {{"sigma_min", "thirty"}};
    CHECK_THROWS_AS(scenario::ScenarioConfig::from_json(doc, "."), ConfigError);
  }
  SUBCASE("relative paths resolve against the config directory") {
    doc["inputs"]["roads"] = "roads.csv";
    const auto r = scenario::ScenarioConfig::from_json(doc, oracle::kMiniFire);
    CHECK(r.inputs.roads == fs::path(oracle::kMiniFire) / "roads.csv");
  }
  CHECK_THROWS_AS(scenario::ScenarioConfig::load("/nonexistent/case.json"), ConfigError);
}

TEST_CASE("errors name the pipeline stage") {
  auto doc = minimal_config();
  doc["inputs"]["roads"] = "/nonexistent/roads.csv";
  const auto c = scenario::ScenarioConfig::from_json(doc, ".");
  try {
    scenario::run(c);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == "load_roads");
    CHECK_THROWS_AS(std::rethrow_if_nested(e), IoError);
  }
}

TEST_CASE("case 1 equals nearest_shelter_times") {
  const auto c = load("case1");
  const auto r = scenario::run(c);
  const auto data = scenario::load_inputs(c.inputs);
  std::vector<road::Site> sites;
  for (const auto& cell : scenario::demand_cells(data, false)) sites.push_back({cell.id, cell.centroid});
  const auto direct = access::nearest_shelter_times(sites, data.shelters, data.network);
  CHECK(r.nearest_min == direct);
  CHECK(r.access.empty());
  CHECK_FALSE(r.equity.gini.has_value());
  CHECK(r.nearest_min.size() == r.cells.size());
}

TEST_CASE("case 2 excludes fire cells and closes roads") {
  const auto r = scenario::run(load("case2"));
  for (const auto& c : r.cells) CHECK_FALSE(c.in_fire);
  const auto all = scenario::run(load("case1"));
  CHECK(r.cells.size() < all.cells.size());
  REQUIRE(r.equity.gini.has_value());
  CHECK(r.access.size() == r.cells.size());

  // the report's gini is the equity module's value on the same scores
  std::vector<equity::CellScore> scores;
  for (std::size_t i = 0; i < r.cells.size(); ++i) scores.push_back({r.cells[i].population, r.access[i].score});
  const auto report = json::parse(scenario::report_json(r));
  CHECK(report["gini"].get<double>() == equity::gini(scores));
}

TEST_CASE("congestion redistributes accessibility when no catchment empties") {
  // Sum of P_i A_i equals the supply of shelters with non-empty catchments in
  // both runs, so a cell can only lose accessibility if another gains it or a
  // shelter drops out entirely.
  const auto free = scenario::run(load("case2"));
  const auto jam = scenario::run(load("case3"));
  REQUIRE(free.cells.size() == jam.cells.size());
  std::map<std::string, double> capacity;
  for (const auto& s : free.shelters) capacity[s.id] = demand::effective_capacity(s);
  for (const auto* r : {&free, &jam}) {
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < r->cells.size(); ++i) lhs += r->cells[i].population * r->access[i].score;
    for (const auto& ratio : r->ratios) rhs += capacity.at(ratio.shelter_id);
    CHECK(oracle::rel_err(lhs, rhs) < 1e-9);
  }
  CHECK(*jam.equity.gini >= *free.equity.gini);
}

TEST_CASE("case 3 uses the case 2 class breaks") {
  const auto free = scenario::run(load("case2"));
  const auto jam = scenario::run(load("case3"));
  double max2 = 0.0;
  for (const auto& a : free.access) max2 = std::max(max2, a.score);
  REQUIRE(jam.scheme.has_value());
  CHECK(jam.scheme->reference_max == max2);
}

TEST_CASE("case 4 runs placement first") {
  const auto c = load("case4_capacity");
  const auto r = scenario::run(c);
  const auto data = scenario::load_inputs(c.inputs);
  const auto direct = scenario::run_placement(data, scenario::PlacementMethod::capacity, *c.placement);
  REQUIRE(r.placement.has_value());
  CHECK(r.placement->selected == direct.selected);
  CHECK(r.placement->total_capacity == direct.total_capacity);
  CHECK(r.active_shelters == std::set<std::string>(direct.selected.begin(), direct.selected.end()));
  // all order and warning population, fire cells included
  double total = 0.0;
  for (const auto& cell : scenario::demand_cells(data, false)) total += cell.population;
  CHECK(r.summary.total == total);
  CHECK(r.cells.size() == scenario::demand_cells(data, false).size());

  const auto d = scenario::run(load("case4_distance"));
  REQUIRE(d.placement.has_value());
  CHECK(d.placement->per_zone.size() == 2);
}

TEST_CASE("reports are deterministic") {
  for (const char* name : {"case1", "case2", "case3", "case4_capacity", "case4_distance"}) {
    CAPTURE(name);
    const auto a = scenario::report_json(scenario::run(load(name)));
    const auto b = scenario::report_json(scenario::run(load(name)));
    CHECK(a == b);
  }
}

TEST_CASE("export") {
  const auto dir = temp_dir("export");
  const auto r = scenario::run(load("case3"));
  scenario::export_result(r, dir);
  for (const char* f : {"cells.geojson", "shelters.geojson", "scores.csv", "report.json"}) CHECK(fs::exists(dir / f));

  const auto table = scenario::read_scores_csv(csv::read_file((dir / "scores.csv").string()));
  REQUIRE(table.results.size() == r.access.size());
  for (std::size_t i = 0; i < r.access.size(); ++i) {
    CHECK(table.results[i].cell_id == r.access[i].cell_id);
    CHECK(table.results[i].score == r.access[i].score);
    CHECK(table.results[i].class_label == r.access[i].class_label);
    CHECK(table.population[i] == r.cells[i].population);
  }

  const auto cells = json::parse(csv::read_file((dir / "cells.geojson").string()));
  CHECK(cells["type"] == "FeatureCollection");
  CHECK(cells["features"].size() == r.cells.size());
  CHECK(cells["features"][0]["properties"].contains("class"));
  const auto shelters = json::parse(csv::read_file((dir / "shelters.geojson").string()));
  CHECK(shelters["features"].size() == r.shelters.size());

  scenario::ScenarioResult empty;
  empty.kind = scenario::Case::case2;
  const auto e = scenario::cells_geojson(empty);
  CHECK(e["type"] == "FeatureCollection");
  CHECK(e["features"].empty());

  const auto one = temp_dir("export_case1");
  scenario::export_result(scenario::run(load("case1")), one);
  CHECK(fs::exists(one / "nearest_times.csv"));
  CHECK_THROWS_AS(scenario::export_result(r, "/proc/forbidden/out"), IoError);
  fs::remove_all(dir);
  fs::remove_all(one);
}

TEST_CASE("all-zero scores give a null gini with a reason") {
  auto doc = minimal_config();
  doc["decay"] = {{"sigma_min", 30}, {"t0_min", 0.001}};
  const auto r = scenario::run(scenario::ScenarioConfig::from_json(doc, "."));
  CHECK_FALSE(r.equity.gini.has_value());
  CHECK_FALSE(r.equity.reason.empty());
  for (const auto& a : r.access) CHECK(a.class_label == "No Access");
  const auto report = json::parse(scenario::report_json(r));
  CHECK(report["gini"].is_null());
  CHECK(report["gini_reason"].is_string());
}

TEST_CASE("sha256") {
  CHECK(scenario::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(scenario::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

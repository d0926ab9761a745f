#include "shelter/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "shelter/csv.hpp"

namespace shelter::scenario {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Case c) {
  switch (c) {
    case Case::case1:
      return "case1";
    case Case::case2:
      return "case2";
    case Case::case3:
      return "case3";
    case Case::case4_capacity:
      return "case4_capacity";
    case Case::case4_distance:
      return "case4_distance";
  }
  return "case1";
}

Case case_from_string(const std::string& s) {
  for (Case c : {Case::case1, Case::case2, Case::case3, Case::case4_capacity, Case::case4_distance}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown case '" + s + "'");
}

bool uses_closures(Case c) { return c == Case::case2 || c == Case::case3; }
bool uses_congestion(Case c) { return c == Case::case3 || runs_placement(c); }
bool excludes_fire(Case c) { return c == Case::case2 || c == Case::case3; }
bool runs_placement(Case c) { return c == Case::case4_capacity || c == Case::case4_distance; }

PlacementMethod method_from_string(const std::string& s) {
  if (s == "capacity") return PlacementMethod::capacity;
  if (s == "distance") return PlacementMethod::distance;
  throw ConfigError("unknown placement method '" + s + "' (expected capacity or distance)");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

// ---------------------------------------------------------------- config

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double number_at(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

void ScenarioConfig::validate() const {
  try {
    decay.validate();
    if (placement) placement->validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (!(snap_radius_m > 0.0)) throw ConfigError("snap_radius_m must be > 0");
  if (uses_closures(kind) && !inputs.perimeters) {
    throw ConfigError(std::string(to_string(kind)) + " requires inputs.perimeters");
  }
  if (uses_congestion(kind) && !congestion) {
    throw ConfigError(std::string(to_string(kind)) + " requires a congestion block");
  }
  if (congestion && (!(congestion->buffer_m >= 0.0) || !(congestion->speed_cap_kph > 0.0))) {
    throw ConfigError("congestion needs buffer_m >= 0 and speed_cap_kph > 0");
  }
  if (runs_placement(kind) && !placement) throw ConfigError(std::string(to_string(kind)) + " requires a placement block");
  if (reference_max && !(*reference_max > 0.0)) throw ConfigError("classification.reference_max must be > 0");
}

ScenarioConfig ScenarioConfig::from_json(const json& doc, const fs::path& base_dir, const std::string& default_id) {
  if (!doc.is_object()) throw ConfigError("scenario config must be an object");
  reject_unknown(doc,
                 {"id", "case", "inputs", "decay", "congestion", "placement", "snap_radius_m", "classification",
                  "supply_total_override", "description"},
                 "config");
  ScenarioConfig c;
  c.raw = doc;
  try {
    c.id = doc.value("id", default_id);
    if (!doc.contains("case")) throw ConfigError("config is missing 'case'");
    c.kind = case_from_string(doc.at("case").get<std::string>());

    if (!doc.contains("inputs") || !doc["inputs"].is_object()) throw ConfigError("config is missing 'inputs'");
    const auto& in = doc["inputs"];
    reject_unknown(in, {"roads", "grid", "shelters", "candidates", "zones", "perimeters"}, "inputs");
    for (const char* key : {"roads", "grid", "shelters", "zones"}) {
      if (!in.contains(key)) throw ConfigError(std::string("inputs.") + key + " is required");
    }
    c.inputs.roads = resolve(base_dir, in["roads"].get<std::string>());
    c.inputs.grid = resolve(base_dir, in["grid"].get<std::string>());
    c.inputs.shelters = resolve(base_dir, in["shelters"].get<std::string>());
    c.inputs.zones = resolve(base_dir, in["zones"].get<std::string>());
    if (in.contains("candidates")) c.inputs.candidates = resolve(base_dir, in["candidates"].get<std::string>());
    if (in.contains("perimeters")) c.inputs.perimeters = resolve(base_dir, in["perimeters"].get<std::string>());

    if (doc.contains("decay")) {
      const auto& d = doc["decay"];
      reject_unknown(d, {"sigma_min", "t0_min"}, "decay");
      c.decay.sigma_min = number_at(d, "sigma_min", c.decay.sigma_min, "decay");
      c.decay.t0_min = number_at(d, "t0_min", c.decay.t0_min, "decay");
    }
    if (doc.contains("congestion") && !doc["congestion"].is_null()) {
      const auto& g = doc["congestion"];
      reject_unknown(g, {"buffer_m", "speed_cap_kph"}, "congestion");
      CongestionSettings s;
      s.buffer_m = number_at(g, "buffer_m", s.buffer_m, "congestion");
      s.speed_cap_kph = number_at(g, "speed_cap_kph", s.speed_cap_kph, "congestion");
      c.congestion = s;
    }
    if (doc.contains("placement") && !doc["placement"].is_null()) {
      const auto& p = doc["placement"];
      reject_unknown(p, {"k", "ring_step_m"}, "placement");
      placement::PlacementParams pp;
      pp.k = number_at(p, "k", pp.k, "placement");
      pp.ring_step_m = number_at(p, "ring_step_m", pp.ring_step_m, "placement");
      c.placement = pp;
    }
    c.snap_radius_m = number_at(doc, "snap_radius_m", c.snap_radius_m, "config");
    if (doc.contains("classification")) {
      const auto& k = doc["classification"];
      reject_unknown(k, {"reference_max", "reference_scenario"}, "classification");
      if (k.contains("reference_max")) c.reference_max = number_at(k, "reference_max", 0.0, "classification");
      if (k.contains("reference_scenario")) {
        c.reference_scenario = resolve(base_dir, k["reference_scenario"].get<std::string>());
      }
    }
    if (doc.contains("supply_total_override")) {
      c.supply_total_override = number_at(doc, "supply_total_override", 0.0, "config");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const fs::path& path) {
  std::string text;
  try {
    text = csv::read_file(path.string());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(doc, path.parent_path(), path.stem().string());
}

// ---------------------------------------------------------------- stages

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    std::throw_with_nested(StageError(name, e.what()));
  }
}

}  // namespace

ScenarioData load_inputs(const InputPaths& inputs) {
  ScenarioData d;
  auto hash_file = [&](const fs::path& p) {
    d.input_hashes[p.filename().string()] = sha256_hex(csv::read_file(p.string()));
  };
  stage("load_roads", [&] {
    d.network = road::derive_times(road::impute_speeds(road::load_roads(inputs.roads.string())));
    hash_file(inputs.roads);
  });
  stage("load_zones", [&] {
    for (auto& p : geo::load_polygon_layer(inputs.zones.string())) {
      if (p.tag() == "fire_perimeter") {
        d.perimeters.push_back(std::move(p));
      } else {
        d.zones.push_back(std::move(p));
      }
    }
    hash_file(inputs.zones);
    if (inputs.perimeters) {
      for (auto& p : geo::load_polygon_layer(inputs.perimeters->string())) {
        if (p.tag() != "fire_perimeter") throw InvalidInput("perimeter file holds a non-perimeter feature");
        d.perimeters.push_back(std::move(p));
      }
      hash_file(*inputs.perimeters);
    }
    if (d.zones.empty()) throw InvalidInput("no evacuation zones found");
  });
  stage("load_grid", [&] {
    d.cells = demand::tag_cells(demand::load_population_csv(inputs.grid.string()), d.zones, d.perimeters);
    hash_file(inputs.grid);
  });
  stage("load_shelters", [&] {
    d.shelters = demand::load_shelters_csv(inputs.shelters.string());
    hash_file(inputs.shelters);
    if (inputs.candidates) {
      auto extra = demand::load_shelters_csv(inputs.candidates->string());
      for (auto& s : extra) {
        const bool dup = std::any_of(d.shelters.begin(), d.shelters.end(),
                                     [&](const demand::Shelter& o) { return o.id == s.id; });
        if (dup) throw InvalidInput("shelter id " + s.id + " appears in both shelter files");
        d.shelters.push_back(std::move(s));
      }
      hash_file(*inputs.candidates);
    }
  });
  return d;
}

road::RoadGraph build_network(const ScenarioData& data, bool closures,
                              const std::optional<CongestionSettings>& congestion) {
  road::RoadGraph g = closures ? road::apply_closures(data.network, data.perimeters) : data.network;
  if (congestion) {
    road::CongestionOverlay overlay{data.zones, congestion->buffer_m, congestion->speed_cap_kph};
    g = road::apply_congestion(g, overlay);
  }
  return g;
}

std::vector<demand::DemandCell> demand_cells(const ScenarioData& data, bool exclude_fire) {
  std::vector<demand::DemandCell> out;
  for (const auto& c : data.cells) {
    if (c.zone_tag == demand::ZoneTag::none) continue;
    if (exclude_fire && c.in_fire) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<placement::Candidate> placement_pool(const ScenarioData& data) {
  std::vector<placement::Candidate> pool;
  for (const auto& s : data.shelters) {
    pool.push_back({s.id, s.location, demand::effective_capacity(s), s.status == demand::ShelterStatus::open});
  }
  return pool;
}

std::vector<placement::DemandZone> demand_zones(const ScenarioData& data,
                                                const std::vector<demand::DemandCell>& cells) {
  std::vector<placement::DemandZone> zones;
  for (const auto& poly : data.zones) {
    auto it = std::find_if(zones.begin(), zones.end(), [&](const auto& z) { return z.name == poly.name(); });
    if (it == zones.end()) {
      zones.push_back({poly.name(), {}, 0.0});
      it = zones.end() - 1;
    }
    it->polygons.push_back(poly);
  }
  for (const auto& c : cells) {
    for (auto& z : zones) {
      if (z.name == c.zone_name) z.demand += c.population;
    }
  }
  std::erase_if(zones, [](const placement::DemandZone& z) { return !(z.demand > 0.0); });
  return zones;
}

placement::PlacementResult run_placement(const ScenarioData& data, PlacementMethod method,
                                         const placement::PlacementParams& params) {
  const auto cells = demand_cells(data, false);
  const auto pool = placement_pool(data);
  if (method == PlacementMethod::capacity) {
    double total = 0.0;
    for (const auto& c : cells) total += c.population;
    return placement::place_capacity_based(pool, data.zones, total, params);
  }
  return placement::place_distance_based(pool, demand_zones(data, cells), params);
}

AccessRun compute_access(const road::RoadGraph& graph, const std::vector<demand::DemandCell>& cells,
                         const std::vector<demand::Shelter>& active, const access::DecayParams& decay,
                         double snap_radius_m) {
  std::vector<road::Site> origins;
  std::vector<access::DemandPoint> demand;
  for (const auto& c : cells) {
    origins.push_back({c.id, c.centroid});
    demand.push_back({c.id, c.population});
  }
  std::vector<road::Site> dests;
  std::vector<access::SupplyPoint> supply;
  for (const auto& s : active) {
    dests.push_back({s.id, s.location});
    supply.push_back({s.id, demand::effective_capacity(s)});
  }
  AccessRun run;
  run.matrix = road::travel_matrix(graph, origins, dests, decay.t0_min, snap_radius_m);
  run.e2sfca = access::e2sfca(supply, demand, run.matrix, decay);
  return run;
}

GiniOutcome gini_for(const std::vector<demand::DemandCell>& cells, const std::vector<access::AccessResult>& results) {
  std::vector<equity::CellScore> scores;
  scores.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) scores.push_back({cells[i].population, results.at(i).score});
  GiniOutcome out;
  try {
    out.lorenz = equity::lorenz(scores);
    out.gini = equity::gini_from_lorenz(out.lorenz);
  } catch (const DegenerateDistribution& e) {
    out.reason = std::string("degenerate distribution: ") + e.what();
  }
  return out;
}

namespace {

std::optional<access::ClassScheme> reference_scheme(const ScenarioConfig& config) {
  if (config.reference_max) return access::ClassScheme{*config.reference_max};
  if (config.reference_scenario) {
    const auto ref = ScenarioConfig::load(*config.reference_scenario);
    if (ref.reference_scenario && fs::weakly_canonical(*ref.reference_scenario) ==
                                      fs::weakly_canonical(*config.reference_scenario)) {
      throw ConfigError("classification reference refers to itself");
    }
    const auto result = run(ref);
    if (result.access.empty()) throw ConfigError("reference scenario " + ref.id + " yields no access scores");
    double max_score = 0.0;
    for (const auto& r : result.access) max_score = std::max(max_score, r.score);
    if (!(max_score > 0.0)) throw ClassificationError("reference scenario has all-zero scores");
    return access::ClassScheme{max_score};
  }
  return std::nullopt;
}

}  // namespace

ScenarioResult run(const ScenarioConfig& config) {
  config.validate();
  const ScenarioData data = load_inputs(config.inputs);

  ScenarioResult r;
  r.scenario_id = config.id;
  r.kind = config.kind;
  r.shelters = data.shelters;
  r.provenance.config_hash = sha256_hex(config.raw.dump());
  r.provenance.input_hashes = data.input_hashes;
  r.cells = demand_cells(data, excludes_fire(config.kind));

  std::vector<demand::Shelter> active;
  if (runs_placement(config.kind)) {
    const auto method =
        config.kind == Case::case4_capacity ? PlacementMethod::capacity : PlacementMethod::distance;
    r.placement = stage("placement", [&] { return run_placement(data, method, *config.placement); });
    for (const auto& id : r.placement->selected) r.active_shelters.insert(id);
  } else {
    for (const auto& s : data.shelters) {
      if (s.status == demand::ShelterStatus::open) r.active_shelters.insert(s.id);
    }
  }
  for (auto s : data.shelters) {
    if (!r.active_shelters.contains(s.id)) continue;
    s.status = demand::ShelterStatus::open;
    active.push_back(std::move(s));
  }
  r.summary = demand::demand_summary(r.cells, active, config.supply_total_override);

  const std::optional<CongestionSettings> congestion =
      uses_congestion(config.kind) ? config.congestion : std::nullopt;
  const road::RoadGraph graph =
      stage("network", [&] { return build_network(data, uses_closures(config.kind), congestion); });

  if (config.kind == Case::case1) {
    std::vector<road::Site> sites;
    for (const auto& c : r.cells) sites.push_back({c.id, c.centroid});
    r.nearest_min = stage("nearest_shelter", [&] {
      return access::nearest_shelter_times(sites, active, graph, config.snap_radius_m);
    });
    return r;
  }

  auto run_access = stage("accessibility", [&] {
    return compute_access(graph, r.cells, active, config.decay, config.snap_radius_m);
  });
  r.ratios = std::move(run_access.e2sfca.ratios);
  r.access = std::move(run_access.e2sfca.results);
  r.scheme = stage("classification", [&] { return reference_scheme(config); });
  if (!r.scheme) {
    const bool any_positive =
        std::any_of(r.access.begin(), r.access.end(), [](const access::AccessResult& a) { return a.score > 0.0; });
    if (any_positive) r.scheme = access::scheme_from_scores(r.access);
  }
  if (r.scheme) {
    r.access = access::classify(std::move(r.access), r.scheme);
  } else {
    for (auto& a : r.access) a.class_label = std::string(access::kClassLabels[0]);
  }
  r.equity = stage("equity", [&] { return gini_for(r.cells, r.access); });
  return r;
}

// ---------------------------------------------------------------- export

json summary_json(const demand::DemandSummary& s) {
  return {{"total_order", s.total_order}, {"total_warning", s.total_warning}, {"total", s.total},
          {"total_supply", s.total_supply}, {"gap", s.gap}};
}

json placement_json(const placement::PlacementResult& p) {
  json zones = json::array();
  for (const auto& z : p.per_zone) {
    zones.push_back({{"zone", z.zone},
                     {"demand", z.demand},
                     {"selected", z.selected},
                     {"capacity", z.capacity},
                     {"radius_m", z.radius_m}});
  }
  json out = {{"method", p.method},
              {"selected", p.selected},
              {"total_capacity", p.total_capacity},
              {"final_radius_m", p.final_radius_m},
              {"per_zone", zones}};
  if (p.method == "capacity") out["filtered"] = p.filtered;
  return out;
}

json cells_geojson(const ScenarioResult& result) {
  json features = json::array();
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    const auto& c = result.cells[i];
    json props = {{"id", c.id},
                  {"population", c.population},
                  {"zone", demand::to_string(c.zone_tag)},
                  {"zone_name", c.zone_name}};
    if (!result.access.empty()) {
      props["score"] = result.access[i].score;
      props["class"] = result.access[i].class_label;
    }
    if (const auto it = result.nearest_min.find(c.id); it != result.nearest_min.end()) {
      props["nearest_min"] = it->second;
    } else if (result.kind == Case::case1) {
      props["nearest_min"] = nullptr;
    }
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {c.centroid.lon, c.centroid.lat}}}},
                        {"properties", props}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

json shelters_geojson(const std::vector<demand::Shelter>& shelters, const std::set<std::string>& selected) {
  json features = json::array();
  for (const auto& s : shelters) {
    json props = {{"id", s.id},
                  {"name", s.name},
                  {"status", s.status == demand::ShelterStatus::open ? "open" : "candidate"},
                  {"capacity", s.capacity ? json(*s.capacity) : json(nullptr)},
                  {"effective_capacity", demand::effective_capacity(s)},
                  {"occupied", s.occupied},
                  {"selected", selected.contains(s.id)}};
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {s.location.lon, s.location.lat}}}},
                        {"properties", props}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::string scores_csv(const std::vector<access::AccessResult>& results, std::span<const double> population) {
  if (!population.empty() && population.size() != results.size()) {
    throw InvalidInput("population column does not match the score rows");
  }
  std::ostringstream out;
  out << std::setprecision(17) << "cell_id,score,class" << (population.empty() ? "\n" : ",population\n");
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << csv::escape(r.cell_id) << ',' << r.score << ',' << csv::escape(r.class_label);
    if (!population.empty()) out << ',' << population[i];
    out << '\n';
  }
  return out.str();
}

ScoreTable read_scores_csv(const std::string& text) {
  const auto t = csv::Table::parse(text, "scores");
  t.require({"cell_id", "score"});
  ScoreTable out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    out.results.push_back({t.at(r, "cell_id"), t.required_number(r, "score"), t.get(r, "class")});
    out.population.push_back(t.number(r, "population").value_or(1.0));
  }
  return out;
}

std::string report_json(const ScenarioResult& r) {
  json doc;
  doc["scenario"] = r.scenario_id;
  doc["case"] = std::string(to_string(r.kind));
  doc["demand_summary"] = summary_json(r.summary);
  doc["cell_count"] = r.cells.size();
  doc["active_shelters"] = r.active_shelters;
  if (r.kind == Case::case1) {
    json nearest = {{"reachable_cells", r.nearest_min.size()},
                    {"unreachable_cells", r.cells.size() - r.nearest_min.size()}};
    if (!r.nearest_min.empty()) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      double weighted = 0.0;
      double pop = 0.0;
      for (const auto& c : r.cells) {
        const auto it = r.nearest_min.find(c.id);
        if (it == r.nearest_min.end()) continue;
        lo = std::min(lo, it->second);
        hi = std::max(hi, it->second);
        weighted += it->second * c.population;
        pop += c.population;
      }
      nearest["min"] = lo;
      nearest["max"] = hi;
      nearest["population_weighted_mean"] = pop > 0.0 ? json(weighted / pop) : json(nullptr);
    }
    doc["nearest_shelter_minutes"] = nearest;
    doc["gini"] = nullptr;
    doc["gini_reason"] = "case1 yields travel times, not accessibility scores";
  } else {
    doc["gini"] = r.equity.gini ? json(*r.equity.gini) : json(nullptr);
    doc["gini_reason"] = r.equity.gini ? json(nullptr) : json(r.equity.reason);
    json lorenz = json::array();
    for (const auto& p : r.equity.lorenz) lorenz.push_back({p.x, p.y});
    doc["lorenz"] = lorenz;
    double max_score = 0.0;
    for (const auto& a : r.access) max_score = std::max(max_score, a.score);
    doc["score_max"] = max_score;
    json counts = json::object();
    for (auto label : access::kClassLabels) counts[std::string(label)] = 0;
    for (const auto& a : r.access) counts[a.class_label] = counts[a.class_label].get<int>() + 1;
    doc["class_counts"] = counts;
    doc["class_breaks"] = r.scheme ? json(r.scheme->upper_bounds()) : json(nullptr);
    json ratios = json::object();
    for (const auto& s : r.ratios) ratios[s.shelter_id] = s.ratio;
    doc["supply_ratios"] = ratios;
  }
  doc["placement"] = r.placement ? placement_json(*r.placement) : json(nullptr);
  doc["provenance"] = {{"config_hash", r.provenance.config_hash}, {"input_hashes", r.provenance.input_hashes}};
  return doc.dump(2) + "\n";
}

void export_result(const ScenarioResult& result, const fs::path& out_dir, const std::set<ExportFormat>& formats) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  if (formats.contains(ExportFormat::geojson)) {
    csv::write_file((out_dir / "cells.geojson").string(), cells_geojson(result).dump() + "\n");
    csv::write_file((out_dir / "shelters.geojson").string(),
                    shelters_geojson(result.shelters, result.active_shelters).dump() + "\n");
  }
  if (formats.contains(ExportFormat::csv)) {
    if (result.kind == Case::case1) {
      std::ostringstream out;
      out << std::setprecision(17) << "cell_id,minutes\n";
      for (const auto& c : result.cells) {
        const auto it = result.nearest_min.find(c.id);
        out << csv::escape(c.id) << ',';
        if (it != result.nearest_min.end()) out << it->second;
        out << '\n';
      }
      csv::write_file((out_dir / "nearest_times.csv").string(), out.str());
    } else {
      std::vector<double> population;
      for (const auto& c : result.cells) population.push_back(c.population);
      csv::write_file((out_dir / "scores.csv").string(), scores_csv(result.access, population));
    }
  }
  if (formats.contains(ExportFormat::json_report)) {
    csv::write_file((out_dir / "report.json").string(), report_json(result));
  }
}

}  // namespace shelter::scenario

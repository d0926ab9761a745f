#include "shelter/service.hpp"

#include <algorithm>
#include <chrono>
#include <exception>

#include <httplib.h>

#include "shelter/csv.hpp"

namespace shelter::service {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- workspace

Workspace Workspace::load(const fs::path& dir) {
  Workspace ws;
  ws.root = dir;
  std::map<std::string, fs::path> configs;
  std::string manifest_bytes;
  const fs::path manifest = dir / "workspace.json";
  if (fs::exists(manifest)) {
    manifest_bytes = csv::read_file(manifest.string());
    json doc;
    try {
      doc = json::parse(manifest_bytes);
      for (const auto& [id, rel] : doc.at("scenarios").items()) configs[id] = dir / rel.get<std::string>();
      ws.default_scenario = doc.value("default_scenario", configs.empty() ? "" : configs.begin()->first);
    } catch (const json::exception& e) {
      throw ConfigError(manifest.string() + ": " + e.what());
    }
  } else if (fs::is_directory(dir / "scenarios")) {
    for (const auto& f : fs::directory_iterator(dir / "scenarios")) {
      if (f.path().extension() == ".json") configs[f.path().stem().string()] = f.path();
    }
    if (!configs.empty()) ws.default_scenario = configs.begin()->first;
  } else {
    throw ConfigError("workspace " + dir.string() + " has neither workspace.json nor scenarios/");
  }
  if (configs.empty()) throw ConfigError("workspace " + dir.string() + " lists no scenarios");
  if (!configs.contains(ws.default_scenario)) throw ConfigError("default scenario '" + ws.default_scenario + "' not listed");

  std::string digest_input = manifest_bytes;
  for (const auto& [id, path] : configs) {
    auto config = scenario::ScenarioConfig::load(path);
    config.id = id;
    auto data = std::make_shared<const scenario::ScenarioData>(scenario::load_inputs(config.inputs));
    digest_input += "\n" + id + "\n" + config.raw.dump();
    for (const auto& [name, h] : data->input_hashes) digest_input += "\n" + name + ":" + h;
    ws.scenarios.emplace(id, Entry{std::move(config), std::move(data)});
  }
  ws.hash = scenario::sha256_hex(digest_input);
  return ws;
}

const Workspace::Entry& Workspace::entry(const std::string& id) const {
  const auto it = scenarios.find(id);
  if (it == scenarios.end()) throw InvalidInput("unknown scenario '" + id + "'");
  return it->second;
}

// ---------------------------------------------------------------- helpers

namespace {

Reply error_reply(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return {status, std::move(extra)};
}

json ring_json(const geo::Ring& r) {
  json out = json::array();
  for (const auto& p : r) out.push_back({p.lon, p.lat});
  return out;
}

json polygon_features(const std::vector<geo::GeoPolygon>& polys) {
  json features = json::array();
  for (const auto& p : polys) {
    json rings = json::array({ring_json(p.exterior())});
    for (const auto& h : p.holes()) rings.push_back(ring_json(h));
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}},
                        {"properties", {{"layer", p.tag()}, {"name", p.name()}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

std::set<std::string> string_set(const json& request, const char* key) {
  std::set<std::string> out;
  if (!request.contains(key) || request[key].is_null()) return out;
  if (!request[key].is_array()) throw InvalidInput(std::string(key) + " must be an array of shelter ids");
  for (const auto& v : request[key]) {
    if (!v.is_string()) throw InvalidInput(std::string(key) + " must contain strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidInput("unknown request field '" + key + "'");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- service

Service::Service(fs::path workspace_dir) : dir_(std::move(workspace_dir)) { reload(); }

std::shared_ptr<const Service::Snapshot> Service::snapshot() const {
  std::shared_lock lock(snapshot_mutex_);
  return snapshot_;
}

std::string Service::workspace_hash() const { return snapshot()->workspace.hash; }
fs::path Service::workspace_root() const { return snapshot()->workspace.root; }

Reply Service::reload() {
  auto fresh = std::make_shared<Snapshot>();
  fresh->workspace = Workspace::load(dir_);
  {
    std::unique_lock lock(snapshot_mutex_);
    snapshot_ = std::move(fresh);
  }
  // Keys embed the workspace hash, so stale entries can never be served; drop
  // them to bound memory.
  {
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
  }
  return {200, {{"workspace_hash", workspace_hash()}}};
}

Reply Service::layer(const std::string& name) const {
  const auto snap = snapshot();
  const auto& data = *snap->workspace.entry(snap->workspace.default_scenario).data;
  if (name == "zones") return {200, polygon_features(data.zones)};
  if (name == "perimeters") return {200, polygon_features(data.perimeters)};
  if (name == "shelters") {
    std::set<std::string> open;
    for (const auto& s : data.shelters) {
      if (s.status == demand::ShelterStatus::open) open.insert(s.id);
    }
    return {200, scenario::shelters_geojson(data.shelters, open)};
  }
  if (name == "grid") {
    json features = json::array();
    for (const auto& c : data.cells) {
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Point"}, {"coordinates", {c.centroid.lon, c.centroid.lat}}}},
                          {"properties",
                           {{"id", c.id},
                            {"population", c.population},
                            {"zone", demand::to_string(c.zone_tag)},
                            {"zone_name", c.zone_name},
                            {"in_fire", c.in_fire}}}});
    }
    return {200, {{"type", "FeatureCollection"}, {"features", features}}};
  }
  return error_reply(404, "unknown layer '" + name + "'", {{"layers", {"zones", "grid", "shelters", "perimeters"}}});
}

std::shared_ptr<const road::RoadGraph> Service::graph_for(const Snapshot& s, const std::string& scenario,
                                                          bool closures, bool congestion) const {
  const std::string key = scenario + (closures ? "|closed" : "|open") + (congestion ? "|jam" : "|free");
  std::lock_guard lock(s.graph_mutex);
  if (const auto it = s.graphs.find(key); it != s.graphs.end()) return it->second;
  const auto& entry = s.workspace.entry(scenario);
  std::optional<scenario::CongestionSettings> settings;
  if (congestion) settings = entry.config.congestion.value_or(scenario::CongestionSettings{});
  auto g = std::make_shared<const road::RoadGraph>(scenario::build_network(*entry.data, closures, settings));
  s.graphs.emplace(key, g);
  return g;
}

json Service::compute(const Snapshot& s, const AccessSpec& spec, const std::optional<access::ClassScheme>& scheme) const {
  const auto start = std::chrono::steady_clock::now();
  const auto& entry = s.workspace.entry(spec.scenario);
  const auto& data = *entry.data;
  const auto graph = graph_for(s, spec.scenario, spec.closures, spec.congestion);
  const auto cells = scenario::demand_cells(data, spec.exclude_fire);
  std::vector<demand::Shelter> active;
  for (auto sh : data.shelters) {
    if (!spec.active.contains(sh.id)) continue;
    sh.status = demand::ShelterStatus::open;
    active.push_back(std::move(sh));
  }
  auto run = scenario::compute_access(*graph, cells, active, spec.decay, entry.config.snap_radius_m);
  auto results = std::move(run.e2sfca.results);

  std::optional<access::ClassScheme> used = scheme;
  if (!used) {
    const bool any = std::any_of(results.begin(), results.end(), [](const auto& r) { return r.score > 0.0; });
    if (any) used = access::scheme_from_scores(results);
  }
  if (used) {
    results = access::classify(std::move(results), used);
  } else {
    for (auto& r : results) r.class_label = std::string(access::kClassLabels[0]);
  }
  const auto equity = scenario::gini_for(cells, results);

  json cell_rows = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cell_rows.push_back({{"id", cells[i].id},
                         {"population", cells[i].population},
                         {"score", results[i].score},
                         {"class", results[i].class_label}});
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return {{"scenario", spec.scenario},
          {"active_shelters", spec.active},
          {"congestion", spec.congestion},
          {"cells", cell_rows},
          {"class_labels", access::kClassLabels},
          {"class_breaks", used ? json(used->upper_bounds()) : json(nullptr)},
          {"gini", equity.gini ? json(*equity.gini) : json(nullptr)},
          {"gini_reason", equity.gini ? json(nullptr) : json(equity.reason)},
          {"demand_summary", scenario::summary_json(demand::demand_summary(cells, active))},
          {"compute_ms", elapsed}};
}

std::optional<access::ClassScheme> Service::scheme_for(const Snapshot& s, const std::string& scenario) const {
  {
    std::lock_guard lock(s.scheme_mutex);
    if (const auto it = s.schemes.find(scenario); it != s.schemes.end()) return it->second;
  }
  const auto& entry = s.workspace.entry(scenario);
  std::optional<access::ClassScheme> scheme;
  if (entry.config.reference_max) {
    scheme = access::ClassScheme{*entry.config.reference_max};
  } else if (entry.config.reference_scenario) {
    const auto ref = scenario::run(scenario::ScenarioConfig::load(*entry.config.reference_scenario));
    double max_score = 0.0;
    for (const auto& r : ref.access) max_score = std::max(max_score, r.score);
    if (max_score > 0.0) scheme = access::ClassScheme{max_score};
  } else {
    AccessSpec base;
    base.scenario = scenario;
    for (const auto& sh : entry.data->shelters) {
      if (sh.status == demand::ShelterStatus::open) base.active.insert(sh.id);
    }
    base.closures = scenario::uses_closures(entry.config.kind);
    base.congestion = scenario::uses_congestion(entry.config.kind);
    base.exclude_fire = scenario::excludes_fire(entry.config.kind);
    base.decay = entry.config.decay;
    const json body = compute(s, base, std::nullopt);
    if (!body["class_breaks"].is_null()) scheme = access::ClassScheme{body["class_breaks"].back().get<double>()};
  }
  std::lock_guard lock(s.scheme_mutex);
  s.schemes.emplace(scenario, scheme);
  return scheme;
}

json Service::cached(const std::string& key, const std::function<json()>& produce) {
  std::promise<json> promise;
  std::shared_future<json> future;
  bool owner = false;
  {
    std::lock_guard lock(cache_mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      cache_.emplace(key, future);
      owner = true;
    }
  }
  if (!owner) {
    json body = future.get();
    body["cached"] = true;
    return body;
  }
  try {
    json body = produce();
    promise.set_value(body);
    body["cached"] = false;
    return body;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(cache_mutex_);
    cache_.erase(key);
    throw;
  }
}

Reply Service::accessibility(const json& request) {
  const auto snap = snapshot();
  AccessSpec spec;
  json canonical;
  try {
    if (!request.is_object()) throw InvalidInput("request body must be a JSON object");
    reject_unknown(request, {"scenario", "enable", "disable", "congestion", "decay"});
    spec.scenario = request.value("scenario", snap->workspace.default_scenario);
    const auto& entry = snap->workspace.entry(spec.scenario);
    const auto enable = string_set(request, "enable");
    const auto disable = string_set(request, "disable");

    std::set<std::string> known;
    for (const auto& sh : entry.data->shelters) known.insert(sh.id);
    json unknown = json::array();
    for (const auto* group : {&enable, &disable}) {
      for (const auto& id : *group) {
        if (!known.contains(id)) unknown.push_back(id);
      }
    }
    if (!unknown.empty()) return error_reply(422, "unknown shelter ids", {{"unknown_ids", unknown}});

    for (const auto& sh : entry.data->shelters) {
      if (sh.status == demand::ShelterStatus::open) spec.active.insert(sh.id);
    }
    for (const auto& id : enable) spec.active.insert(id);
    for (const auto& id : disable) spec.active.erase(id);

    spec.closures = scenario::uses_closures(entry.config.kind);
    spec.exclude_fire = scenario::excludes_fire(entry.config.kind);
    spec.congestion = scenario::uses_congestion(entry.config.kind);
    if (request.contains("congestion") && !request["congestion"].is_null()) {
      if (!request["congestion"].is_boolean()) throw InvalidInput("congestion must be a boolean");
      spec.congestion = request["congestion"].get<bool>();
    }
    spec.decay = entry.config.decay;
    if (request.contains("decay") && !request["decay"].is_null()) {
      const auto& d = request["decay"];
      reject_unknown(d, {"sigma_min", "t0_min"});
      spec.decay.sigma_min = d.value("sigma_min", spec.decay.sigma_min);
      spec.decay.t0_min = d.value("t0_min", spec.decay.t0_min);
      spec.decay.validate();
    }
    canonical = {{"kind", "accessibility"},
                 {"scenario", spec.scenario},
                 {"active", spec.active},
                 {"congestion", spec.congestion},
                 {"sigma_min", spec.decay.sigma_min},
                 {"t0_min", spec.decay.t0_min}};
  } catch (const json::exception& e) {
    return error_reply(400, e.what());
  } catch (const InvalidInput& e) {
    return error_reply(400, e.what());
  }

  const std::string key = scenario::sha256_hex(snap->workspace.hash + "\n" + canonical.dump());
  try {
    json body = cached(key, [&] { return compute(*snap, spec, scheme_for(*snap, spec.scenario)); });
    return {200, std::move(body)};
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
}

Reply Service::placement(const json& request) {
  const auto snap = snapshot();
  std::string scenario_id;
  scenario::PlacementMethod method{};
  placement::PlacementParams params;
  try {
    if (!request.is_object()) throw InvalidInput("request body must be a JSON object");
    reject_unknown(request, {"scenario", "method", "k", "ring_step_m"});
    scenario_id = request.value("scenario", snap->workspace.default_scenario);
    const auto& entry = snap->workspace.entry(scenario_id);
    if (entry.config.placement) params = *entry.config.placement;
    method = scenario::method_from_string(request.value("method", std::string("capacity")));
    params.k = request.value("k", params.k);
    params.ring_step_m = request.value("ring_step_m", params.ring_step_m);
    params.validate();
  } catch (const json::exception& e) {
    return error_reply(400, e.what());
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }

  const json canonical = {{"kind", "placement"},
                          {"scenario", scenario_id},
                          {"method", method == scenario::PlacementMethod::capacity ? "capacity" : "distance"},
                          {"k", params.k},
                          {"ring_step_m", params.ring_step_m}};
  const std::string key = scenario::sha256_hex(snap->workspace.hash + "\n" + canonical.dump());
  try {
    json body = cached(key, [&] {
      const auto& entry = snap->workspace.entry(scenario_id);
      const auto result = scenario::run_placement(*entry.data, method, params);
      AccessSpec spec;
      spec.scenario = scenario_id;
      spec.active = {result.selected.begin(), result.selected.end()};
      spec.closures = false;
      spec.congestion = true;
      spec.exclude_fire = false;
      spec.decay = entry.config.decay;
      return json{{"placement", scenario::placement_json(result)},
                  {"accessibility", compute(*snap, spec, scheme_for(*snap, scenario_id))}};
    });
    return {200, std::move(body)};
  } catch (const Infeasible& e) {
    return error_reply(409, e.what(), {{"zone", e.zone()}, {"shortfall", e.shortfall()}});
  } catch (const Error& e) {
    return error_reply(500, e.what());
  }
}

json Service::api_spec() {
  return {
      {"openapi", "3.0.0"},
      {"info", {{"title", "Shelter accessibility service"}, {"version", "1.0.0"}}},
      {"paths",
       {{"/api/layers/{layer}",
         {{"get",
           {{"summary", "GeoJSON layer: zones, grid, shelters or perimeters"},
            {"responses", {{"200", {{"description", "FeatureCollection"}}}, {"404", {{"description", "unknown layer"}}}}}}}}},
        {"/api/accessibility",
         {{"post",
           {{"summary", "Recompute E2SFCA accessibility and Gini for a toggled shelter set"},
            {"requestBody",
             {{"content",
               {{"application/json",
                 {{"schema",
                   {{"type", "object"},
                    {"properties",
                     {{"scenario", {{"type", "string"}}},
                      {"enable", {{"type", "array"}, {"items", {{"type", "string"}}}}},
                      {"disable", {{"type", "array"}, {"items", {{"type", "string"}}}}},
                      {"congestion", {{"type", "boolean"}}},
                      {"decay",
                       {{"type", "object"},
                        {"properties", {{"sigma_min", {{"type", "number"}}}, {"t0_min", {{"type", "number"}}}}}}}}}}}}}}}}},
            {"responses",
             {{"200", {{"description", "ComputeResponse"}}},
              {"400", {{"description", "malformed request"}}},
              {"422", {{"description", "unknown shelter ids"}}}}}}}}},
        {"/api/placement",
         {{"post",
           {{"summary", "Run capacity- or distance-based placement, then accessibility on the selection"},
            {"requestBody",
             {{"content",
               {{"application/json",
                 {{"schema",
                   {{"type", "object"},
                    {"properties",
                     {{"scenario", {{"type", "string"}}},
                      {"method", {{"type", "string"}, {"enum", {"capacity", "distance"}}}},
                      {"k", {{"type", "number"}, {"minimum", 1}}},
                      {"ring_step_m", {{"type", "number"}, {"exclusiveMinimum", 0}}}}}}}}}}}}},
            {"responses",
             {{"200", {{"description", "PlacementResult and ComputeResponse"}}},
              {"409", {{"description", "infeasible placement with shortfall"}}}}}}}}},
        {"/api/reload", {{"post", {{"summary", "Reload the workspace from disk"}}}}},
        {"/api/spec", {{"get", {{"summary", "This document"}}}}}}}};
}

// ---------------------------------------------------------------- http

struct HttpServer::Impl {
  Service* service = nullptr;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service, std::optional<fs::path> static_dir) : impl_(std::make_unique<Impl>()) {
  impl_->service = &service;
  auto& srv = impl_->server;
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  auto parse = [](const httplib::Request& req) -> std::optional<json> {
    try {
      return req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::exception&) {
      return std::nullopt;
    }
  };

  srv.Get(R"(/api/layers/([A-Za-z_]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, impl_->service->layer(req.matches[1]));
  });
  srv.Get("/api/spec", [send](const httplib::Request&, httplib::Response& res) {
    send(res, {200, Service::api_spec()});
  });
  srv.Post("/api/accessibility", [this, send, parse](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse(req);
    send(res, body ? impl_->service->accessibility(*body) : Reply{400, {{"error", "body is not JSON"}}});
  });
  srv.Post("/api/placement", [this, send, parse](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse(req);
    send(res, body ? impl_->service->placement(*body) : Reply{400, {{"error", "body is not JSON"}}});
  });
  srv.Post("/api/reload", [this, send](const httplib::Request&, httplib::Response& res) {
    try {
      send(res, impl_->service->reload());
    } catch (const Error& e) {
      send(res, {500, {{"error", e.what()}}});
    }
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(json{{"error", what}}.dump(), "application/json");
  });
  if (static_dir && fs::is_directory(*static_dir)) srv.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace shelter::service

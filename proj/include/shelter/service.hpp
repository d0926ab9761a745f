#pragma once

#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "shelter/scenario.hpp"

namespace shelter::service {

// A directory of scenario configs sharing one set of layers.
//
// workspace.json: {"default_scenario": "case3", "scenarios": {"case3": "scenarios/case3.json", ...}}
// Without workspace.json every scenarios/*.json is loaded and the first (by
// name) is the default.
struct Workspace {
  struct Entry {
    scenario::ScenarioConfig config;
    std::shared_ptr<const scenario::ScenarioData> data;
  };

  std::filesystem::path root;
  std::string default_scenario;
  std::map<std::string, Entry> scenarios;
  std::string hash;  // covers workspace.json, every config and every input file

  static Workspace load(const std::filesystem::path& dir);
  const Entry& entry(const std::string& id) const;
};

struct Reply {
  int status = 200;
  nlohmann::json body;
};

// Request handling independent of the HTTP transport. Thread-safe.
class Service {
 public:
  explicit Service(std::filesystem::path workspace_dir);

  Reply layer(const std::string& name) const;
  Reply accessibility(const nlohmann::json& request);
  Reply placement(const nlohmann::json& request);
  Reply reload();
  static nlohmann::json api_spec();

  std::string workspace_hash() const;
  std::filesystem::path workspace_root() const;

 private:
  struct Snapshot {
    Workspace workspace;
    // Graph variants per scenario: closures x congestion.
    mutable std::mutex graph_mutex;
    mutable std::map<std::string, std::shared_ptr<const road::RoadGraph>> graphs;
    // Per-scenario class scheme derived from the base request.
    mutable std::mutex scheme_mutex;
    mutable std::map<std::string, std::optional<access::ClassScheme>> schemes;
  };

  struct AccessSpec {
    std::string scenario;
    std::set<std::string> active;
    bool closures = false;
    bool congestion = false;
    access::DecayParams decay;
    bool exclude_fire = false;
  };

  std::shared_ptr<const Snapshot> snapshot() const;
  std::shared_ptr<const road::RoadGraph> graph_for(const Snapshot& s, const std::string& scenario, bool closures,
                                                   bool congestion) const;
  std::optional<access::ClassScheme> scheme_for(const Snapshot& s, const std::string& scenario) const;
  nlohmann::json compute(const Snapshot& s, const AccessSpec& spec, const std::optional<access::ClassScheme>& scheme) const;
  nlohmann::json cached(const std::string& key, const std::function<nlohmann::json()>& produce);

  std::filesystem::path dir_;
  mutable std::shared_mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;

  std::mutex cache_mutex_;
  std::map<std::string, std::shared_future<nlohmann::json>> cache_;
};

// HTTP/1.1 front end over a Service.
class HttpServer {
 public:
  HttpServer(Service& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port (an ephemeral one when port == 0), or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace shelter::service

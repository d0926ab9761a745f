// shelterctl: scenario runner, placement, equity and HTTP service.
//
//   shelterctl ingest --config case3.json
//   shelterctl run --config case3.json --out results/case3
//   shelterctl place --config case4.json --method distance --k 2
//   shelterctl gini --scores results/case3/scores.csv
//   shelterctl serve --workspace data/mini_fire --port 8080

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <exception>
#include <atomic>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "shelter/csv.hpp"
#include "shelter/equity.hpp"
#include "shelter/scenario.hpp"
#include "shelter/service.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shelter;

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kInfeasible = 3 };

void print_chain(const std::exception& e, int depth = 0) {
  std::cerr << (depth == 0 ? "error: " : "  caused by: ") << e.what() << "\n";
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    print_chain(inner, depth + 1);
  }
}

// Exit code of the innermost engine error.
int classify(const std::exception& e) {
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    const int nested = classify(inner);
    if (nested != kFailure) return nested;
  }
  if (dynamic_cast<const ConfigError*>(&e)) return kConfig;
  if (dynamic_cast<const Infeasible*>(&e)) return kInfeasible;
  return kFailure;
}

int cmd_ingest(const fs::path& config_path) {
  const auto config = scenario::ScenarioConfig::load(config_path);
  config.validate();
  const auto data = scenario::load_inputs(config.inputs);
  const auto cells = scenario::demand_cells(data, false);
  std::vector<demand::Shelter> open;
  std::size_t candidates = 0;
  for (const auto& s : data.shelters) {
    if (s.status == demand::ShelterStatus::open) {
      open.push_back(s);
    } else {
      ++candidates;
    }
  }
  std::size_t in_fire = 0;
  for (const auto& c : data.cells) in_fire += c.in_fire ? 1 : 0;
  const json out = {{"scenario", config.id},
                    {"case", scenario::to_string(config.kind)},
                    {"nodes", data.network.node_count()},
                    {"edges", data.network.edges().size()},
                    {"cells", data.cells.size()},
                    {"demand_cells", cells.size()},
                    {"cells_in_fire", in_fire},
                    {"open_shelters", open.size()},
                    {"candidate_shelters", candidates},
                    {"zones", data.zones.size()},
                    {"perimeters", data.perimeters.size()},
                    {"demand_summary", scenario::summary_json(demand::demand_summary(cells, open, config.supply_total_override))},
                    {"input_hashes", data.input_hashes}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir) {
  const auto config = scenario::ScenarioConfig::load(config_path);
  const auto result = scenario::run(config);
  scenario::export_result(result, out_dir);
  std::cerr << "wrote " << out_dir.string() << "\n";
  std::cout << scenario::report_json(result);
  return kOk;
}

int cmd_place(const fs::path& config_path, const std::string& method, std::optional<double> k,
              std::optional<double> ring_step) {
  const auto config = scenario::ScenarioConfig::load(config_path);
  if (!config.inputs.candidates) throw ConfigError("placement needs a candidate catalog in inputs.candidates");
  placement::PlacementParams params = config.placement.value_or(placement::PlacementParams{});
  if (k) params.k = *k;
  if (ring_step) params.ring_step_m = *ring_step;
  try {
    params.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  const auto data = scenario::load_inputs(config.inputs);
  const auto result = scenario::run_placement(data, scenario::method_from_string(method), params);
  std::cout << scenario::placement_json(result).dump(2) << "\n";
  return kOk;
}

int cmd_gini(const fs::path& scores_path) {
  const auto table = scenario::read_scores_csv(csv::read_file(scores_path.string()));
  std::vector<equity::CellScore> cells;
  for (std::size_t i = 0; i < table.results.size(); ++i) {
    cells.push_back({table.population[i], table.results[i].score});
  }
  std::cout << equity::report_json(cells) << "\n";
  return kOk;
}

int cmd_serve(std::string workspace, const std::string& bind, int port, std::optional<fs::path> static_dir) {
  if (workspace.empty()) {
    const char* env = std::getenv("SHELTER_WORKSPACE");
    if (!env || !*env) throw ConfigError("no workspace: pass --workspace or set SHELTER_WORKSPACE");
    workspace = env;
  }
  // Handle SIGINT/SIGTERM on a dedicated thread; every thread started later
  // inherits the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::Service svc(workspace);
  if (!static_dir && fs::is_directory(fs::path(workspace) / "www")) static_dir = fs::path(workspace) / "www";
  service::HttpServer server(svc, static_dir);
  const int bound = server.bind(bind, port);
  if (bound < 0) throw IoError("cannot bind " + bind + ":" + std::to_string(port));
  std::atomic<bool> signalled = false;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    server.stop();
  });
  std::cerr << "serving " << workspace << " on http://" << bind << ":" << bound << " (workspace "
            << svc.workspace_hash().substr(0, 12) << ")\n";
  server.listen();
  // listen() can also end on its own; wake the waiter so it can be joined.
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wildfire evacuation shelter accessibility and placement"};
  app.require_subcommand(1);

  fs::path config;
  fs::path out_dir;
  std::string method = "capacity";
  std::optional<double> k;
  std::optional<double> ring_step;
  fs::path scores;
  std::string workspace;
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::optional<fs::path> static_dir;

  auto* ingest = app.add_subcommand("ingest", "Load and validate a scenario's inputs, print a summary");
  ingest->add_option("--config", config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Run a scenario and export layers and report");
  run->add_option("--config", config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* place = app.add_subcommand("place", "Run shelter placement only");
  place->add_option("--config", config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
  place->add_option("--method", method, "capacity or distance")->check(CLI::IsMember({"capacity", "distance"}));
  place->add_option("--k", k, "Capacity multiplier for filtering");
  place->add_option("--ring-step", ring_step, "Ring step in meters");

  auto* gini = app.add_subcommand("gini", "Gini and Lorenz curve of a score table");
  gini->add_option("--scores", scores, "CSV with cell_id,score[,class][,population]")
      ->required()
      ->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--workspace", workspace, "Workspace directory (default: $SHELTER_WORKSPACE)");
  serve->add_option("--bind", bind, "Bind address");
  serve->add_option("--port", port, "Port, 0 for any");
  serve->add_option("--static", static_dir, "Directory served under /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*ingest) return cmd_ingest(config);
    if (*run) return cmd_run(config, out_dir);
    if (*place) return cmd_place(config, method, k, ring_step);
    if (*gini) return cmd_gini(scores);
    if (*serve) return cmd_serve(workspace, bind, port, static_dir);
  } catch (const std::exception& e) {
    print_chain(e);
    return classify(e);
  }
  return kFailure;
}

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shelter/accessibility.hpp"
#include "shelter/demand_supply.hpp"
#include "shelter/equity.hpp"
#include "shelter/placement.hpp"
#include "shelter/road_network.hpp"

namespace shelter::scenario {

// Case 1: nearest-shelter minutes, full network, all zone demand.
// Case 2: accessibility with fire closures, fire cells excluded.
// Case 3: case 2 plus the congestion overlay.
// Case 4: placement first, then accessibility on the full network with
// congestion using the selected shelters.
enum class Case { case1, case2, case3, case4_capacity, case4_distance };

std::string_view to_string(Case c);
Case case_from_string(const std::string& s);

bool uses_closures(Case c);
bool uses_congestion(Case c);
bool excludes_fire(Case c);
bool runs_placement(Case c);

enum class PlacementMethod { capacity, distance };
PlacementMethod method_from_string(const std::string& s);

struct InputPaths {
  std::filesystem::path roads;
  std::filesystem::path grid;
  std::filesystem::path shelters;
  std::optional<std::filesystem::path> candidates;
  std::filesystem::path zones;
  std::optional<std::filesystem::path> perimeters;
};

struct CongestionSettings {
  double buffer_m = 5000.0;
  double speed_cap_kph = 10.0;
};

struct ScenarioConfig {
  std::string id;
  Case kind = Case::case1;
  InputPaths inputs;
  access::DecayParams decay;
  std::optional<CongestionSettings> congestion;
  std::optional<placement::PlacementParams> placement;
  double snap_radius_m = road::kDefaultSnapRadiusM;
  std::optional<double> reference_max;
  std::optional<std::filesystem::path> reference_scenario;
  std::optional<double> supply_total_override;
  nlohmann::json raw;  // as written, for provenance

  // Throws ConfigError on missing requirements for the case.
  void validate() const;

  // Relative input paths resolve against base_dir. Throws ConfigError.
  static ScenarioConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                                  const std::string& default_id = "scenario");
  static ScenarioConfig load(const std::filesystem::path& path);
};

// Everything read from disk for one scenario, validated and with speeds
// imputed and travel times derived on the base network.
struct ScenarioData {
  road::RoadGraph network;
  std::vector<demand::DemandCell> cells;  // tagged, unfiltered
  std::vector<demand::Shelter> shelters;  // open and candidate, shelters file then candidates file
  std::vector<geo::GeoPolygon> zones;
  std::vector<geo::GeoPolygon> perimeters;
  std::map<std::string, std::string> input_hashes;  // file name -> sha256
};

ScenarioData load_inputs(const InputPaths& inputs);

// Base network with optional closures and congestion over the zones.
road::RoadGraph build_network(const ScenarioData& data, bool closures, const std::optional<CongestionSettings>& congestion);

// Order + warning cells, optionally without fire-affected cells.
std::vector<demand::DemandCell> demand_cells(const ScenarioData& data, bool exclude_fire);

// Open shelters become pre-seeded placement entries; candidates follow.
std::vector<placement::Candidate> placement_pool(const ScenarioData& data);

// Demand grouped by zone name, in first-appearance order of the zone layer.
// Zones without population are left out.
std::vector<placement::DemandZone> demand_zones(const ScenarioData& data,
                                                const std::vector<demand::DemandCell>& cells);

placement::PlacementResult run_placement(const ScenarioData& data, PlacementMethod method,
                                         const placement::PlacementParams& params);

struct AccessRun {
  road::TravelMatrix matrix;
  access::E2sfcaResult e2sfca;
};

// E2SFCA over the active shelters (effective capacities) on `graph`.
AccessRun compute_access(const road::RoadGraph& graph, const std::vector<demand::DemandCell>& cells,
                         const std::vector<demand::Shelter>& active, const access::DecayParams& decay,
                         double snap_radius_m);

struct GiniOutcome {
  std::optional<double> gini;
  std::string reason;  // why gini is absent
  std::vector<equity::LorenzPoint> lorenz;
};

GiniOutcome gini_for(const std::vector<demand::DemandCell>& cells, const std::vector<access::AccessResult>& results);

struct Provenance {
  std::string config_hash;
  std::map<std::string, std::string> input_hashes;
};

struct ScenarioResult {
  std::string scenario_id;
  Case kind = Case::case1;
  std::vector<demand::DemandCell> cells;         // demand cells of the case
  std::vector<access::AccessResult> access;      // empty for case 1
  std::vector<access::SupplyRatio> ratios;
  std::map<std::string, double> nearest_min;     // case 1
  std::optional<access::ClassScheme> scheme;
  GiniOutcome equity;
  demand::DemandSummary summary;
  std::optional<placement::PlacementResult> placement;
  std::vector<demand::Shelter> shelters;         // the scenario's shelter catalog
  std::set<std::string> active_shelters;
  Provenance provenance;
};

ScenarioResult run(const ScenarioConfig& config);

enum class ExportFormat { geojson, csv, json_report };

// Writes cells.geojson + shelters.geojson, scores.csv (+ nearest_times.csv for
// case 1) and report.json under out_dir. Throws IoError.
void export_result(const ScenarioResult& result, const std::filesystem::path& out_dir,
                   const std::set<ExportFormat>& formats = {ExportFormat::geojson, ExportFormat::csv,
                                                            ExportFormat::json_report});

std::string report_json(const ScenarioResult& result);
nlohmann::json cells_geojson(const ScenarioResult& result);
nlohmann::json shelters_geojson(const std::vector<demand::Shelter>& shelters, const std::set<std::string>& selected);
// `cell_id,score,class[,population]`
std::string scores_csv(const std::vector<access::AccessResult>& results, std::span<const double> population = {});
nlohmann::json placement_json(const placement::PlacementResult& p);
nlohmann::json summary_json(const demand::DemandSummary& s);

// Reads `cell_id,score[,class][,population]` back into results and weights.
struct ScoreTable {
  std::vector<access::AccessResult> results;
  std::vector<double> population;  // 1.0 each when the column is absent
};
ScoreTable read_scores_csv(const std::string& text);

std::string sha256_hex(std::string_view bytes);

}  // namespace shelter::scenario

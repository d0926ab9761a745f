#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shelter/demand_supply.hpp"
#include "shelter/road_network.hpp"

namespace shelter::access {

struct DecayParams {
  double sigma_min = 30.0;
  double t0_min = 120.0;

  void validate() const;
};

// exp(-t^2 / (2 sigma^2)) inside the catchment, 0 beyond t0.
double gaussian_weight(double t_min, const DecayParams& params);

struct SupplyPoint {
  std::string id;
  double capacity = 0.0;
};

struct DemandPoint {
  std::string id;
  double population = 0.0;
};

struct SupplyRatio {
  std::string shelter_id;
  double ratio = 0.0;
};

struct AccessResult {
  std::string cell_id;
  double score = 0.0;
  std::string class_label;
};

struct E2sfcaResult {
  std::vector<SupplyRatio> ratios;  // shelters with non-empty catchments only
  std::vector<AccessResult> results;
};

// Enhanced two-step floating catchment area with Gaussian decay, the same
// weights and threshold in both steps.
//
// `matrix` rows are the cells and columns the shelters, in the given order;
// missing entries mean "not reachable within the cutoff". Shelters whose
// weighted catchment population is zero get no ratio.
E2sfcaResult e2sfca(std::span<const SupplyPoint> shelters, std::span<const DemandPoint> cells,
                    const road::TravelMatrix& matrix, const DecayParams& params);

// Minutes from each cell to its nearest open shelter, via one multi-source
// search over the reversed graph. Cells with no reachable shelter are absent.
std::map<std::string, double> nearest_shelter_times(std::span<const road::Site> cells,
                                                    std::span<const demand::Shelter> shelters,
                                                    const road::RoadGraph& graph,
                                                    double snap_radius_m = road::kDefaultSnapRadiusM);

inline constexpr std::array<std::string_view, 7> kClassLabels = {
    "No Access", "Very Poor", "Poor", "Moderate", "Good", "Very Good", "Excellent"};

// Six equal-width positive bins over (0, reference_max]; zero is "No Access".
struct ClassScheme {
  double reference_max = 0.0;

  std::array<double, 6> upper_bounds() const;
  std::string_view label(double score) const;
};

// Throws ClassificationError when every score is zero.
ClassScheme scheme_from_scores(std::span<const AccessResult> results);

// Labels every result. Without a scheme, one is derived from the results.
std::vector<AccessResult> classify(std::vector<AccessResult> results, std::optional<ClassScheme> scheme = std::nullopt);

}  // namespace shelter::access

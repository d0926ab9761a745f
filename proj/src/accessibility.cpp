#include "shelter/accessibility.hpp"

#include <algorithm>
#include <cmath>

namespace shelter::access {

void DecayParams::validate() const {
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_min)) throw InvalidInput("sigma must be > 0");
  if (!(t0_min > 0.0)) throw InvalidInput("t0 must be > 0");
}

double gaussian_weight(double t_min, const DecayParams& params) {
  if (t_min > params.t0_min) return 0.0;
  return std::exp(-(t_min * t_min) / (2.0 * params.sigma_min * params.sigma_min));
}

E2sfcaResult e2sfca(std::span<const SupplyPoint> shelters, std::span<const DemandPoint> cells,
                    const road::TravelMatrix& matrix, const DecayParams& params) {
  params.validate();
  if (matrix.rows.size() != cells.size() || matrix.dest_ids.size() != shelters.size()) {
    throw InvalidInput("travel matrix shape does not match cells x shelters");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!(cells[i].population >= 0.0)) throw InvalidInput("cell " + cells[i].id + " has negative population");
    if (matrix.origin_ids[i] != cells[i].id) throw InvalidInput("travel matrix row order differs from cells");
  }
  for (std::size_t j = 0; j < shelters.size(); ++j) {
    if (!(shelters[j].capacity >= 0.0)) throw InvalidInput("shelter " + shelters[j].id + " has negative capacity");
    if (matrix.dest_ids[j] != shelters[j].id) throw InvalidInput("travel matrix column order differs from shelters");
  }

  // Step 1: weighted catchment population per shelter.
  std::vector<double> weighted_demand(shelters.size(), 0.0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const auto& e : matrix.rows[i]) {
      if (e.minutes <= params.t0_min) weighted_demand[e.dest] += cells[i].population * gaussian_weight(e.minutes, params);
    }
  }
  std::vector<std::optional<double>> ratio(shelters.size());
  E2sfcaResult out;
  for (std::size_t j = 0; j < shelters.size(); ++j) {
    if (weighted_demand[j] > 0.0) {
      ratio[j] = shelters[j].capacity / weighted_demand[j];
      out.ratios.push_back({shelters[j].id, *ratio[j]});
    }
  }

  // Step 2: decay-weighted sum of reachable ratios per cell.
  out.results.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double score = 0.0;
    for (const auto& e : matrix.rows[i]) {
      if (e.minutes <= params.t0_min && ratio[e.dest]) score += *ratio[e.dest] * gaussian_weight(e.minutes, params);
    }
    out.results.push_back({cells[i].id, score, {}});
  }
  return out;
}

std::map<std::string, double> nearest_shelter_times(std::span<const road::Site> cells,
                                                    std::span<const demand::Shelter> shelters,
                                                    const road::RoadGraph& graph, double snap_radius_m) {
  std::vector<std::size_t> sources;
  for (const auto& s : shelters) {
    if (s.status != demand::ShelterStatus::open) continue;
    sources.push_back(graph.require_index(road::snap(s.location, graph, snap_radius_m, s.id)));
  }
  std::map<std::string, double> out;
  if (sources.empty()) return out;
  const road::RoadGraph reverse = graph.reversed();
  road::ShortestPaths sp(reverse);
  const auto& dist = sp.run(sources, road::kUnreached);
  for (const auto& c : cells) {
    const auto node = graph.require_index(road::snap(c.location, graph, snap_radius_m, c.id));
    if (dist[node] != road::kUnreached) out.emplace(c.id, dist[node]);
  }
  return out;
}

std::array<double, 6> ClassScheme::upper_bounds() const {
  std::array<double, 6> b{};
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = reference_max * static_cast<double>(k + 1) / 6.0;
  b.back() = reference_max;
  return b;
}

std::string_view ClassScheme::label(double score) const {
  if (!(score > 0.0)) return kClassLabels[0];
  const auto bounds = upper_bounds();
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (score <= bounds[k]) return kClassLabels[k + 1];
  }
  return kClassLabels.back();
}

ClassScheme scheme_from_scores(std::span<const AccessResult> results) {
  double max_score = 0.0;
  for (const auto& r : results) max_score = std::max(max_score, r.score);
  if (!(max_score > 0.0)) throw ClassificationError("all scores are zero and no reference maximum was given");
  return {max_score};
}

std::vector<AccessResult> classify(std::vector<AccessResult> results, std::optional<ClassScheme> scheme) {
  for (const auto& r : results) {
    if (!(r.score >= 0.0)) throw InvalidInput("cell " + r.cell_id + " has a negative score");
  }
  const ClassScheme s = scheme ? *scheme : scheme_from_scores(results);
  if (!(s.reference_max > 0.0)) throw ClassificationError("reference maximum must be > 0");
  for (auto& r : results) r.class_label = std::string(s.label(r.score));
  return results;
}

}  // namespace shelter::access

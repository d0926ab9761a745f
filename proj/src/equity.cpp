#include "shelter/equity.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "shelter/error.hpp"

namespace shelter::equity {

std::vector<LorenzPoint> lorenz(std::span<const CellScore> cells) {
  std::vector<CellScore> kept;
  kept.reserve(cells.size());
  for (const auto& c : cells) {
    if (!(c.population >= 0.0) || !(c.score >= 0.0)) throw InvalidInput("population and score must be >= 0");
    if (c.population > 0.0) kept.push_back(c);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const CellScore& a, const CellScore& b) { return a.score < b.score; });

  double total_pop = 0.0;
  double total_mass = 0.0;
  for (const auto& c : kept) {
    total_pop += c.population;
    total_mass += c.population * c.score;
  }
  if (!(total_pop > 0.0)) throw DegenerateDistribution("no cell has positive population");
  if (!(total_mass > 0.0)) throw DegenerateDistribution("all accessibility scores are zero");

  std::vector<LorenzPoint> curve;
  curve.reserve(kept.size() + 1);
  curve.push_back({0.0, 0.0});
  double pop = 0.0;
  double mass = 0.0;
  for (const auto& c : kept) {
    pop += c.population;
    mass += c.population * c.score;
    curve.push_back({pop / total_pop, mass / total_mass});
  }
  curve.back() = {1.0, 1.0};
  return curve;
}

double gini_from_lorenz(std::span<const LorenzPoint> curve) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    s += (curve[i + 1].x - curve[i].x) * (curve[i + 1].y + curve[i].y);
  }
  return std::clamp(1.0 - s, 0.0, std::nextafter(1.0, 0.0));
}

double gini(std::span<const CellScore> cells) {
  const auto curve = lorenz(cells);
  return gini_from_lorenz(curve);
}

std::string report_json(std::span<const CellScore> cells) {
  const auto curve = lorenz(cells);
  nlohmann::json doc;
  doc["gini"] = gini_from_lorenz(curve);
  auto& pts = doc["lorenz"] = nlohmann::json::array();
  for (const auto& p : curve) pts.push_back({p.x, p.y});
  return doc.dump();
}

}  // namespace shelter::equity

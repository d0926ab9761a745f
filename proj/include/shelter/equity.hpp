#pragma once

#include <span>
#include <string>
#include <vector>

namespace shelter::equity {

struct CellScore {
  double population = 0.0;
  double score = 0.0;
};

struct LorenzPoint {
  double x = 0.0;  // cumulative population share
  double y = 0.0;  // cumulative share of population-weighted accessibility
};

// Population-weighted Lorenz curve, cells ascending by score (stable, so ties
// keep input order). Zero-population cells are dropped. Throws
// DegenerateDistribution when no population or every score is zero.
std::vector<LorenzPoint> lorenz(std::span<const CellScore> cells);

// 1 - sum (X[i+1] - X[i]) (Y[i+1] + Y[i]) over the Lorenz points, clamped to [0, 1).
double gini(std::span<const CellScore> cells);
double gini_from_lorenz(std::span<const LorenzPoint> curve);

// `{"gini": g, "lorenz": [[x,y],...]}`
std::string report_json(std::span<const CellScore> cells);

}  // namespace shelter::equity

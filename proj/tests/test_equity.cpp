#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <json.hpp>

#include "shelter/equity.hpp"
#include "shelter/error.hpp"

using namespace shelter;
using equity::CellScore;

namespace {

std::vector<CellScore> random_cells(std::mt19937_64& rng) {
  std::vector<CellScore> cells(std::uniform_int_distribution<int>(1, 60)(rng));
  std::uniform_real_distribution<double> pop(0.0, 1000.0), score(0.0, 3.0);
  std::bernoulli_distribution zero(0.15);
  for (auto& c : cells) c = {pop(rng), zero(rng) ? 0.0 : score(rng)};
  cells[0].score = 1.0 + score(rng);  // keep the distribution non-degenerate
  cells[0].population = 1.0 + pop(rng);
  return cells;
}

}  // namespace

TEST_CASE("lorenz curve") {
  const std::vector<CellScore> one = {{10, 2}};
  const auto l1 = equity::lorenz(one);
  REQUIRE(l1.size() == 2);
  CHECK(l1[0].x == 0.0);
  CHECK(l1[1].x == 1.0);
  CHECK(l1[1].y == 1.0);

  const std::vector<CellScore> two = {{1, 3}, {1, 1}};
  const auto l2 = equity::lorenz(two);
  REQUIRE(l2.size() == 3);
  CHECK(l2[1].x == 0.5);
  CHECK(l2[1].y == 0.25);
  CHECK(l2[2].y == 1.0);

  const std::vector<CellScore> flat = {{3, 2}, {5, 2}, {2, 2}};
  for (const auto& p : equity::lorenz(flat)) CHECK(p.y == doctest::Approx(p.x).epsilon(1e-15));
}

TEST_CASE("gini examples") {
  const std::vector<CellScore> uniform = {{1, 0.7}, {1, 0.7}, {1, 0.7}, {1, 0.7}, {1, 0.7}};
  CHECK(std::abs(equity::gini(uniform)) <= 1e-12);
  const std::vector<CellScore> two = {{1, 1}, {1, 3}};
  CHECK(equity::gini(two) == doctest::Approx(0.25).epsilon(1e-15));
  const std::vector<CellScore> single = {{1, 0}, {1, 0}, {1, 0}, {1, 5}};
  CHECK(equity::gini(single) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("degenerate distributions") {
  const std::vector<CellScore> zeros = {{1, 0}, {4, 0}};
  CHECK_THROWS_AS(equity::gini(zeros), DegenerateDistribution);
  const std::vector<CellScore> empty_pop = {{0, 1}, {0, 2}};
  CHECK_THROWS_AS(equity::gini(empty_pop), DegenerateDistribution);
  CHECK_THROWS_AS(equity::gini({}), DegenerateDistribution);
  const std::vector<CellScore> negative = {{1, -1}, {1, 2}};
  CHECK_THROWS_AS(equity::gini(negative), InvalidInput);
}

TEST_CASE("zero-population cells carry no weight") {
  const std::vector<CellScore> base = {{1, 1}, {1, 3}};
  const std::vector<CellScore> padded = {{0, 100}, {1, 1}, {0, 0}, {1, 3}};
  CHECK(equity::gini(padded) == equity::gini(base));
}

TEST_CASE("invariances on random instances") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    auto cells = random_cells(rng);
    const double g = equity::gini(cells);
    CHECK(g >= 0.0);
    CHECK(g < 1.0);

    auto scaled = cells;
    const double factor = std::uniform_real_distribution<double>(1e-3, 1e3)(rng);
    for (auto& c : scaled) c.score *= factor;
    CHECK(std::abs(equity::gini(scaled) - g) <= 1e-12);

    auto shuffled = cells;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(std::abs(equity::gini(shuffled) - g) <= 1e-12);

    auto split = cells;
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, split.size() - 1)(rng);
    split[k].population /= 2.0;
    split.insert(split.begin() + static_cast<long>(k), split[k]);
    CHECK(std::abs(equity::gini(split) - g) <= 1e-12);

    const auto curve = equity::lorenz(cells);
    CHECK(curve.front().x == 0.0);
    CHECK(curve.front().y == 0.0);
    CHECK(curve.back().x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(curve.back().y == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i].x >= curve[i - 1].x);
      CHECK(curve[i].y >= curve[i - 1].y);
      CHECK(curve[i].y <= curve[i].x + 1e-12);
    }
    CHECK(equity::gini_from_lorenz(curve) == g);
  }
}

TEST_CASE("report json") {
  const std::vector<CellScore> two = {{1, 1}, {1, 3}};
  const auto doc = nlohmann::json::parse(equity::report_json(two));
  CHECK(doc["gini"].get<double>() == equity::gini(two));
  REQUIRE(doc["lorenz"].size() == 3);
  CHECK(doc["lorenz"][1][0].get<double>() == 0.5);
  CHECK(doc["lorenz"][1][1].get<double>() == 0.25);
}

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run everything
//   acceptance <name>...  run the named criteria only
//
// Exit status is 0 only if every selected criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "placement_cases.hpp"
#include "shelter/accessibility.hpp"
#include "shelter/demand_supply.hpp"
#include "shelter/equity.hpp"
#include "shelter/road_network.hpp"
#include "shelter/scenario.hpp"

using namespace shelter;
using namespace placement_cases;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

struct Criterion {
  std::string name;
  double limit_s;
  std::function<void(Outcome&)> check;
};

scenario::ScenarioConfig mini(const std::string& name) {
  return scenario::ScenarioConfig::load(oracle::kMiniFire + "/scenarios/" + name + ".json");
}

void capacity(Outcome& o) {
  using demand::AreaUnit;
  const auto est = [](double a, AreaUnit u) { return demand::estimate_capacity({a, u}); };
  o.expect(est(15000, AreaUnit::sqft) == 105, "15,000 sqft");
  o.expect(est(130000, AreaUnit::sqft) == 910, "130,000 sqft");
  o.expect(est(28985, AreaUnit::sqft) == 202, "28,985 sqft");
  const double sqm = est(10573.27, AreaUnit::sqm), big = est(150686, AreaUnit::sqft);
  o.expect(std::abs(sqm - 797) <= 2, "10,573.27 sqm");
  o.expect(std::abs(big - 1056) <= 2, "150,686 sqft");
  o.detail << "10573.27 sqm -> " << sqm << ", 150686 sqft -> " << big;
}

void demand_totals(Outcome& o) {
  const auto cfg = scenario::ScenarioConfig::load(oracle::kPublishedTotals + "/published_supply.json");
  const auto data = scenario::load_inputs(cfg.inputs);
  std::vector<demand::Shelter> open;
  for (const auto& s : data.shelters) {
    if (s.status == demand::ShelterStatus::open) open.push_back(s);
  }
  const auto s = demand::demand_summary(scenario::demand_cells(data, false), open, cfg.supply_total_override);
  o.expect(s.total_order == 44348 && s.total_warning == 42263, "zone totals");
  o.expect(s.total == 86611, "total");
  o.expect(s.total_supply == 5224 && s.gap == 81387, "gap");
  o.detail << "total " << s.total << ", supply " << s.total_supply << ", gap " << s.gap;
}

void conservation(Outcome& o) {
  std::mt19937_64 rng(1017);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = oracle::random_instance(rng, 100, 10);
    const auto e = oracle::engine_input(in);
    const auto r = access::e2sfca(e.shelters, e.cells, e.matrix, {});
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < in.population.size(); ++i) lhs += in.population[i] * r.results[i].score;
    std::set<std::string> served;
    for (const auto& s : r.ratios) served.insert(s.shelter_id);
    for (std::size_t j = 0; j < in.supply.size(); ++j) {
      if (served.contains("s" + std::to_string(j))) rhs += in.supply[j];
    }
    const double err = rhs == 0.0 ? std::abs(lhs) : oracle::rel_err(lhs, rhs);
    worst = std::max(worst, err);
    o.expect(err <= 1e-9, "instance " + std::to_string(trial));
  }
  o.detail << "max relative error " << worst;
}

void brute_force(Outcome& o) {
  double worst = 0.0;
  auto compare = [&](const oracle::Instance& in, const std::string& tag) {
    const auto e = oracle::engine_input(in);
    const auto r = access::e2sfca(e.shelters, e.cells, e.matrix, {});
    const auto b = oracle::e2sfca_brute(in);
    std::map<std::string, double> ratios;
    for (const auto& s : r.ratios) ratios[s.shelter_id] = s.ratio;
    for (std::size_t j = 0; j < in.supply.size(); ++j) {
      const auto it = ratios.find("s" + std::to_string(j));
      o.expect((it != ratios.end()) == b.ratio[j].has_value(), tag + " catchment");
      if (it != ratios.end() && b.ratio[j]) worst = std::max(worst, oracle::rel_err(it->second, *b.ratio[j]));
    }
    for (std::size_t i = 0; i < in.population.size(); ++i) {
      if (b.score[i] == 0.0) {
        o.expect(r.results[i].score == 0.0, tag + " zero score");
      } else {
        worst = std::max(worst, oracle::rel_err(r.results[i].score, b.score[i]));
      }
    }
    return r;
  };
  const auto worked = compare(oracle::worked_fixture(), "worked");
  // R1 is quoted to six places; A2 is checked against the 40-digit value, which
  // also satisfies 100 A1 + 100 A2 = 150 (the six-place 0.890662 does not).
  o.expect(std::abs(worked.ratios[0].ratio - 0.644127) <= 1e-6, "R1");
  o.expect(oracle::rel_err(worked.results[1].score, 0.8906824581564393) <= 1e-15, "A2");
  o.expect(oracle::rel_err(100 * worked.results[0].score + 100 * worked.results[1].score, 150.0) <= 1e-12, "sum");
  std::mt19937_64 rng(1023);
  for (int trial = 0; trial < 100; ++trial) compare(oracle::random_instance(rng, 20, 5), "random " + std::to_string(trial));
  o.expect(worst <= 1e-12, "relative error");
  o.detail.precision(10);
  o.detail << "R1 " << worked.ratios[0].ratio << ", A2 " << worked.results[1].score << " (0.890662 differs by "
           << std::abs(worked.results[1].score - 0.890662) << "), max relative error " << worst;
}

void dijkstra(Outcome& o) {
  std::mt19937_64 rng(1031);
  long pairs = 0, mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rg = oracle::random_graph(rng, 50);
    const auto fw = oracle::floyd_warshall(rg);
    const auto g = oracle::to_road_graph(rg);
    for (int s = 0; s < rg.n; ++s) {
      const auto d = road::sssp_minutes(g, 100 + s);
      for (int v = 0; v < rg.n; ++v) {
        ++pairs;
        const auto it = d.find(100 + v);
        if (fw[s][v] == oracle::kInf) {
          mismatches += it != d.end();
        } else {
          mismatches += it == d.end() || it->second != fw[s][v];
        }
      }
    }
  }
  o.expect(mismatches == 0, "distance mismatch");
  o.detail << pairs << " pairs, " << mismatches << " mismatches";
}

void gini(Outcome& o) {
  using equity::CellScore;
  const std::vector<CellScore> uniform = {{1, 0.7}, {1, 0.7}, {1, 0.7}, {1, 0.7}, {1, 0.7}};
  const std::vector<CellScore> two = {{1, 1}, {1, 3}};
  const std::vector<CellScore> single = {{1, 0}, {1, 0}, {1, 0}, {1, 5}};
  o.expect(std::abs(equity::gini(uniform)) <= 1e-12, "uniform");
  o.expect(std::abs(equity::gini(two) - 0.25) <= 1e-12, "{1,3}");
  o.expect(std::abs(equity::gini(single) - 0.75) <= 1e-12, "single holder");

  std::mt19937_64 rng(1039);
  std::uniform_real_distribution<double> pop(0.0, 1000.0), score(0.0, 3.0), factor(1e-3, 1e3);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<CellScore> cells(std::uniform_int_distribution<int>(1, 60)(rng));
    for (auto& c : cells) c = {pop(rng), score(rng)};
    cells[0] = {1.0 + pop(rng), 1.0 + score(rng)};
    const double g = equity::gini(cells);
    auto scaled = cells;
    const double f = factor(rng);
    for (auto& c : scaled) c.score *= f;
    auto shuffled = cells;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    worst = std::max({worst, std::abs(equity::gini(scaled) - g), std::abs(equity::gini(shuffled) - g)});
  }
  o.expect(worst <= 1e-12, "invariance");
  o.detail << "max invariance deviation " << worst;
}

void congestion(Outcome& o) {
  const auto g = road::derive_times(road::impute_speeds(road::load_roads(oracle::kMiniFire + "/roads.csv")));
  const auto zones = geo::load_polygon_layer(oracle::kMiniFire + "/zones.geojson");
  const auto jam = road::apply_congestion(g, {zones, 5000.0, 10.0});
  int slower = 0, faster = 0;
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    slower += *jam.edges()[i].travel_min > *g.edges()[i].travel_min;
    faster += *jam.edges()[i].travel_min < *g.edges()[i].travel_min;
  }
  o.expect(faster == 0, "edge times non-decreasing");

  const auto free = scenario::run(mini("case2"));
  const auto slow = scenario::run(mini("case3"));
  int raised = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < free.access.size(); ++i) {
    const double d = slow.access[i].score - free.access[i].score;
    if (d > 0.0) ++raised, worst = std::max(worst, d);
  }
  o.expect(raised == 0, "cell scores non-increasing");
  o.expect(*slow.equity.gini >= *free.equity.gini, "gini non-decreasing");
  o.detail << slower << "/" << g.edges().size() << " edges slowed, " << faster << " faster; " << raised << "/"
           << free.access.size() << " cells gained (max +" << worst << "); gini " << *free.equity.gini << " -> "
           << *slow.equity.gini;
}

void placement_traces(Outcome& o) {
  const auto L = square_layout();
  const std::vector<Candidate> cands = {{"30", L.east_of(900), 30}, {"50", L.east_of(1900), 50},
                                        {"120", L.east_of(2900), 120}, {"80", L.east_of(3900), 80}};
  const auto cap = placement::place_capacity_based(cands, L.zones, 100.0, {2.0, 1000.0});
  o.expect(cap.selected == std::vector<std::string>{"120"}, "capacity trace");
  const std::vector<DemandZone> zone = {{"Z", L.zones, 100.0}};
  const auto dist = placement::place_distance_based(cands, zone, {2.0, 1000.0});
  o.expect(dist.selected == std::vector<std::string>{"30", "50", "120"}, "distance trace");
  o.expect(dist.final_radius_m == 3000.0, "distance radius");

  std::mt19937_64 rng(1049);
  int checked_cap = 0, checked_dist = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto rc = random_case(rng, 1 + trial % 3);
    const auto ids = by_id(rc.candidates);
    const auto frame = geo::LocalFrame::around(rc.zone_polys);
    double demand = 0.0;
    for (const auto& z : rc.zones) demand += z.demand;
    try {
      const auto r = placement::place_capacity_based(rc.candidates, rc.zone_polys, demand, rc.params);
      double total = 0.0, smallest = oracle::kInf;
      for (const auto& id : r.selected) {
        total += ids.at(id)->capacity;
        if (!ids.at(id)->preseeded) smallest = std::min(smallest, ids.at(id)->capacity);
      }
      o.expect(total >= demand, "capacity feasible");
      if (smallest != oracle::kInf) o.expect(total - smallest < demand, "capacity minimal");
      ++checked_cap;
    } catch (const Infeasible&) {
    }
    try {
      const auto r = placement::place_distance_based(rc.candidates, rc.zones, rc.params);
      for (std::size_t z = 0; z < r.per_zone.size(); ++z) {
        const auto& slot = r.per_zone[z];
        auto ring = [&](const Candidate* c) {
          return ring_of(oracle_distance(c->location, rc.zones[z].polygons, frame), rc.params.ring_step_m);
        };
        long last = 0;
        for (const auto& id : slot.selected) {
          if (!ids.at(id)->preseeded) last = std::max(last, ring(ids.at(id)));
        }
        o.expect(slot.capacity >= slot.demand, "distance feasible");
        if (last == 0) continue;
        double without = 0.0;
        for (const auto& id : slot.selected) {
          if (ids.at(id)->preseeded || ring(ids.at(id)) < last) without += ids.at(id)->capacity;
        }
        o.expect(without < slot.demand, "distance minimal");
      }
      ++checked_dist;
    } catch (const Infeasible&) {
    }
  }
  o.expect(checked_cap > 100 && checked_dist > 50, "enough feasible instances");
  o.detail << "feasible random instances: " << checked_cap << " capacity, " << checked_dist << " distance";
}

void determinism(Outcome& o) {
  for (const char* name : {"case1", "case2", "case3", "case4_capacity", "case4_distance"}) {
    const auto a = scenario::report_json(scenario::run(mini(name)));
    const auto b = scenario::report_json(scenario::run(mini(name)));
    o.expect(a == b, name);
    o.detail << name << " " << a.size() << " bytes; ";
  }
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"capacity_estimation", 1.0, capacity},
      {"demand_arithmetic", 1.0, demand_totals},
      {"e2sfca_conservation", 10.0, conservation},
      {"e2sfca_brute_force", 5.0, brute_force},
      {"dijkstra_floyd_warshall", 30.0, dijkstra},
      {"gini", 5.0, gini},
      {"congestion_properties", 10.0, congestion},
      {"placement", 10.0, placement_traces},
      {"scenario_determinism", 60.0, determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    if (std::none_of(criteria().begin(), criteria().end(), [&](const Criterion& c) { return c.name == w; })) {
      std::fprintf(stderr, "unknown criterion '%s'\n", w.c_str());
      return 2;
    }
  }
  int failed = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && !wanted.contains(c.name)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.check(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.expect(secs < c.limit_s, "runtime");
    failed += !o.pass;
    std::printf("%s %-24s %8.3f s (limit %g s)  %s\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), secs, c.limit_s,
                o.detail.str().c_str());
  }
  return failed == 0 ? 0 : 1;
}

#include "shelter/road_network.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <sstream>
#include <thread>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <json.hpp>

#include "shelter/csv.hpp"

namespace shelter::road {

RoadGraph::RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw InvalidInput("duplicate node id " + std::to_string(nodes_[i].id));
    }
  }
  offsets_.assign(nodes_.size() + 1, 0);
  edge_target_.resize(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    const auto from = index_.find(edge.from);
    const auto to = index_.find(edge.to);
    if (from == index_.end() || to == index_.end()) {
      throw InvalidInput("edge " + edge.edge_id + " references an unknown node");
    }
    if (!(edge.length_m > 0.0) || !std::isfinite(edge.length_m)) {
      throw InvalidInput("edge " + edge.edge_id + " has non-positive length");
    }
    ++offsets_[from->second + 1];
    edge_target_[e] = static_cast<std::uint32_t>(to->second);
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.resize(edges_.size());
  std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    adjacency_[cursor[index_.at(edges_[e].from)]++] = static_cast<std::uint32_t>(e);
  }
}

std::optional<std::size_t> RoadGraph::index_of(NodeId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t RoadGraph::require_index(NodeId id) const {
  const auto idx = index_of(id);
  if (!idx) throw InvalidInput("unknown node id " + std::to_string(id));
  return *idx;
}

std::span<const std::uint32_t> RoadGraph::out_edges(std::size_t node_index) const {
  return {adjacency_.data() + offsets_[node_index], adjacency_.data() + offsets_[node_index + 1]};
}

bool RoadGraph::times_derived() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const RoadEdge& e) { return e.travel_min.has_value(); });
}

RoadGraph RoadGraph::reversed() const {
  std::vector<RoadEdge> flipped = edges_;
  for (auto& e : flipped) {
    std::swap(e.from, e.to);
    std::reverse(e.geometry.begin(), e.geometry.end());
  }
  return RoadGraph(nodes_, std::move(flipped));
}

std::vector<geo::GeoPoint> RoadGraph::edge_polyline(const RoadEdge& e) const {
  if (e.geometry.size() >= 2) return e.geometry;
  return {nodes_[require_index(e.from)].location, nodes_[require_index(e.to)].location};
}

void CongestionOverlay::validate() const {
  if (!(buffer_m >= 0.0)) throw InvalidInput("congestion buffer must be >= 0");
  if (!(speed_cap_kph > 0.0)) throw InvalidInput("congestion speed cap must be > 0");
}

std::optional<double> parse_speed_kph(const std::string& raw) {
  std::string s;
  for (char c : raw) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return std::nullopt;
  s = s.substr(b);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc()) throw InvalidInput("unparseable speed '" + raw + "'");
  std::string unit(ptr, static_cast<const char*>(s.data() + s.size()));
  unit.erase(std::remove(unit.begin(), unit.end(), ' '), unit.end());
  if (unit.empty() || unit == "kph" || unit == "km/h" || unit == "kmh") return v;
  if (unit == "mph") return v * kKphPerMph;
  throw InvalidInput("unknown speed unit in '" + raw + "'");
}

RoadGraph impute_speeds(const RoadGraph& graph) {
  std::map<std::string, std::pair<double, std::size_t>> by_class;
  double total = 0.0;
  std::size_t known = 0;
  for (const auto& e : graph.edges()) {
    if (!e.maxspeed_kph) continue;
    auto& acc = by_class[e.highway];
    acc.first += *e.maxspeed_kph;
    ++acc.second;
    total += *e.maxspeed_kph;
    ++known;
  }
  if (known == 0 && !graph.edges().empty()) throw UnimputableSpeeds("no edge carries a known maxspeed");

  std::vector<RoadEdge> edges = graph.edges();
  for (auto& e : edges) {
    if (e.maxspeed_kph) continue;
    const auto it = by_class.find(e.highway);
    e.maxspeed_kph = it != by_class.end() ? it->second.first / static_cast<double>(it->second.second)
                                          : total / static_cast<double>(known);
    e.travel_min.reset();
  }
  return RoadGraph(graph.nodes(), std::move(edges));
}

namespace {

double minutes_for(double length_m, double kph) { return (length_m / 1000.0) / kph * 60.0; }

}  // namespace

RoadGraph derive_times(const RoadGraph& graph) {
  std::vector<RoadEdge> edges = graph.edges();
  for (auto& e : edges) {
    if (!e.maxspeed_kph || !(*e.maxspeed_kph > 0.0)) {
      throw InvalidInput("edge " + e.edge_id + " has no positive speed; impute speeds first");
    }
    e.travel_min = minutes_for(e.length_m, *e.maxspeed_kph);
  }
  return RoadGraph(graph.nodes(), std::move(edges));
}

RoadGraph apply_closures(const RoadGraph& graph, std::span<const geo::GeoPolygon> perimeters) {
  if (perimeters.empty()) return graph;
  std::vector<RoadEdge> kept;
  kept.reserve(graph.edges().size());
  for (const auto& e : graph.edges()) {
    const auto line = graph.edge_polyline(e);
    const bool closed = std::any_of(perimeters.begin(), perimeters.end(),
                                    [&](const geo::GeoPolygon& p) { return geo::polyline_intersects(line, p); });
    if (!closed) kept.push_back(e);
  }
  return RoadGraph(graph.nodes(), std::move(kept));
}

RoadGraph apply_congestion(const RoadGraph& graph, const CongestionOverlay& overlay) {
  overlay.validate();
  if (overlay.zones.empty()) return graph;
  const auto frame = geo::LocalFrame::around(overlay.zones);
  std::vector<geo::GeoPolygon> buffered;
  buffered.reserve(overlay.zones.size());
  for (const auto& z : overlay.zones) buffered.push_back(geo::buffer(z, overlay.buffer_m, frame));

  std::vector<RoadEdge> edges = graph.edges();
  for (auto& e : edges) {
    if (!e.maxspeed_kph) throw InvalidInput("edge " + e.edge_id + " has no speed; impute speeds first");
    if (*e.maxspeed_kph <= overlay.speed_cap_kph) continue;
    const auto line = graph.edge_polyline(e);
    const bool inside = std::any_of(buffered.begin(), buffered.end(),
                                    [&](const geo::GeoPolygon& p) { return geo::polyline_intersects(line, p); });
    if (!inside) continue;
    e.maxspeed_kph = overlay.speed_cap_kph;
    e.travel_min = minutes_for(e.length_m, overlay.speed_cap_kph);
  }
  return RoadGraph(graph.nodes(), std::move(edges));
}

NodeId snap(const geo::GeoPoint& p, const RoadGraph& graph, double max_radius_m, const std::string& point_id) {
  if (graph.empty()) throw InvalidInput("cannot snap to an empty graph");
  double best = kUnreached;
  NodeId best_id = 0;
  for (const auto& n : graph.nodes()) {
    const double d = geo::distance_m(p, n.location);
    if (d < best || (d == best && n.id < best_id)) {
      best = d;
      best_id = n.id;
    }
  }
  if (best > max_radius_m) throw Unsnappable(point_id, best);
  return best_id;
}

ShortestPaths::ShortestPaths(const RoadGraph& graph)
    : graph_(&graph), dist_(graph.node_count(), kUnreached) {
  if (!graph.times_derived()) throw InvalidInput("travel times must be derived before routing");
}

const std::vector<double>& ShortestPaths::run(std::size_t source_index, double cutoff_min) {
  const std::size_t src[] = {source_index};
  return run(src, cutoff_min);
}

const std::vector<double>& ShortestPaths::run(std::span<const std::size_t> source_indices, double cutoff_min) {
  if (!(cutoff_min > 0.0)) throw InvalidInput("cutoff must be > 0");
  for (auto i : touched_) dist_[i] = kUnreached;
  touched_.clear();

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (auto s : source_indices) {
    if (s >= dist_.size()) throw InvalidInput("source index out of range");
    if (dist_[s] != 0.0) {
      if (dist_[s] == kUnreached) touched_.push_back(s);
      dist_[s] = 0.0;
      heap.emplace(0.0, s);
    }
  }
  const auto& edges = graph_->edges();
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist_[u]) continue;
    for (const auto e : graph_->out_edges(u)) {
      const double nd = d + *edges[e].travel_min;
      if (nd > cutoff_min) continue;
      const std::size_t v = graph_->target_index(e);
      if (nd < dist_[v]) {
        if (dist_[v] == kUnreached) touched_.push_back(v);
        dist_[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist_;
}

std::unordered_map<NodeId, double> sssp_minutes(const RoadGraph& graph, NodeId source, double cutoff_min) {
  const auto src = graph.index_of(source);
  if (!src) throw InvalidInput("unknown source node " + std::to_string(source));
  ShortestPaths sp(graph);
  const auto& dist = sp.run(*src, cutoff_min);
  std::unordered_map<NodeId, double> out;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] != kUnreached) out.emplace(graph.nodes()[i].id, dist[i]);
  }
  return out;
}

std::optional<double> TravelMatrix::at(std::size_t origin, std::size_t dest) const {
  const auto& row = rows.at(origin);
  const auto it = std::lower_bound(row.begin(), row.end(), dest,
                                   [](const Entry& e, std::size_t d) { return e.dest < d; });
  if (it == row.end() || it->dest != dest) return std::nullopt;
  return it->minutes;
}

std::size_t TravelMatrix::entry_count() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

TravelMatrix travel_matrix(const RoadGraph& graph, std::span<const Site> origins, std::span<const Site> destinations,
                           double cutoff_min, double snap_radius_m) {
  if (!(cutoff_min > 0.0)) throw InvalidInput("cutoff must be > 0");
  TravelMatrix m;
  std::vector<std::size_t> origin_nodes;
  std::vector<std::size_t> dest_nodes;
  for (const auto& o : origins) {
    m.origin_ids.push_back(o.id);
    origin_nodes.push_back(graph.require_index(snap(o.location, graph, snap_radius_m, o.id)));
  }
  for (const auto& d : destinations) {
    m.dest_ids.push_back(d.id);
    dest_nodes.push_back(graph.require_index(snap(d.location, graph, snap_radius_m, d.id)));
  }
  m.rows.resize(origins.size());
  if (origins.empty()) return m;

  auto fill = [&](std::size_t begin, std::size_t end) {
    ShortestPaths sp(graph);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& dist = sp.run(origin_nodes[i], cutoff_min);
      auto& row = m.rows[i];
      for (std::size_t j = 0; j < dest_nodes.size(); ++j) {
        const double t = dist[dest_nodes[j]];
        if (t <= cutoff_min) row.push_back({j, t});
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), (origins.size() + 31) / 32);
  if (workers <= 1) {
    fill(0, origins.size());
    return m;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (origins.size() + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(origins.size(), b + chunk);
    pool.emplace_back([&, w, b, e] {
      try {
        fill(b, e);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return m;
}

std::string matrix_to_csv(const TravelMatrix& m) {
  std::ostringstream out;
  out.precision(17);
  out << "origin_id,dest_id,minutes\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    for (const auto& e : m.rows[i]) {
      out << csv::escape(m.origin_ids[i]) << ',' << csv::escape(m.dest_ids[e.dest]) << ',' << e.minutes << '\n';
    }
  }
  return out.str();
}

namespace {

struct SegmentRecord {
  std::string edge_id;
  NodeId u = 0;
  NodeId v = 0;
  double length_m = 0.0;
  std::string highway;
  std::optional<double> maxspeed_kph;
  std::string oneway;
  std::vector<geo::GeoPoint> geometry;
};

std::vector<geo::GeoPoint> parse_linestring_wkt(const std::string& wkt, const std::string& edge_id) {
  namespace bg = boost::geometry;
  bg::model::linestring<bg::model::d2::point_xy<double>> ls;
  try {
    bg::read_wkt(wkt, ls);
  } catch (const std::exception& e) {
    throw InvalidInput("edge " + edge_id + ": bad WKT geometry: " + e.what());
  }
  std::vector<geo::GeoPoint> out;
  for (const auto& p : ls) out.push_back({p.x(), p.y()});
  if (out.size() < 2) throw InvalidInput("edge " + edge_id + ": geometry needs at least two vertices");
  return out;
}

NodeId parse_node_id(const std::string& s, const std::string& edge_id) {
  NodeId v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidInput("edge " + edge_id + ": node id '" + s + "' is not an integer");
  }
  return v;
}

RoadGraph build_graph(const std::vector<SegmentRecord>& segments) {
  std::vector<RoadNode> nodes;
  std::unordered_map<NodeId, std::size_t> seen;
  auto add_node = [&](NodeId id, const geo::GeoPoint& at) {
    if (seen.emplace(id, nodes.size()).second) {
      if (!geo::is_valid(at)) throw InvalidInput("node " + std::to_string(id) + " has invalid coordinates");
      nodes.push_back({id, at});
    }
  };
  std::vector<RoadEdge> edges;
  edges.reserve(segments.size() * 2);
  for (const auto& s : segments) {
    add_node(s.u, s.geometry.front());
    add_node(s.v, s.geometry.back());
    const bool forward = s.oneway != "-1";
    const bool backward = !(s.oneway == "yes" || s.oneway == "true" || s.oneway == "1" || s.oneway == "-1");
    const bool only_backward = s.oneway == "-1";
    RoadEdge e{s.edge_id, false, s.u, s.v, s.length_m, s.highway, s.maxspeed_kph, std::nullopt, s.geometry};
    if (forward) edges.push_back(e);
    if (backward || only_backward) {
      RoadEdge r = e;
      r.reversed = true;
      std::swap(r.from, r.to);
      std::reverse(r.geometry.begin(), r.geometry.end());
      edges.push_back(std::move(r));
    }
  }
  return RoadGraph(std::move(nodes), std::move(edges));
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

RoadGraph read_edges_csv(const std::string& text, const std::string& source) {
  const auto table = csv::Table::parse(text, source);
  table.require({"edge_id", "u", "v", "length_m", "highway", "wkt_geometry"});
  std::vector<SegmentRecord> segs;
  segs.reserve(table.rows());
  for (std::size_t r = 0; r < table.rows(); ++r) {
    SegmentRecord s;
    s.edge_id = table.at(r, "edge_id");
    s.u = parse_node_id(table.at(r, "u"), s.edge_id);
    s.v = parse_node_id(table.at(r, "v"), s.edge_id);
    s.length_m = table.required_number(r, "length_m");
    s.highway = table.at(r, "highway");
    s.maxspeed_kph = parse_speed_kph(table.get(r, "maxspeed_kph"));
    s.oneway = lower(table.get(r, "oneway"));
    s.geometry = parse_linestring_wkt(table.at(r, "wkt_geometry"), s.edge_id);
    segs.push_back(std::move(s));
  }
  return build_graph(segs);
}

RoadGraph load_edges_csv(const std::string& path) { return read_edges_csv(csv::read_file(path), path); }

RoadGraph read_edges_geojson(const std::string& text) {
  using nlohmann::json;
  std::vector<SegmentRecord> segs;
  try {
    const json doc = json::parse(text);
    for (const auto& f : doc.at("features")) {
      const auto& p = f.at("properties");
      SegmentRecord s;
      s.edge_id = p.at("edge_id").is_string() ? p.at("edge_id").get<std::string>() : p.at("edge_id").dump();
      s.u = p.at("u").get<NodeId>();
      s.v = p.at("v").get<NodeId>();
      s.length_m = p.at("length_m").get<double>();
      s.highway = p.at("highway").get<std::string>();
      if (p.contains("maxspeed_kph") && !p["maxspeed_kph"].is_null()) {
        s.maxspeed_kph = p["maxspeed_kph"].is_string() ? parse_speed_kph(p["maxspeed_kph"].get<std::string>())
                                                       : std::optional<double>(p["maxspeed_kph"].get<double>());
      }
      if (p.contains("oneway") && !p["oneway"].is_null()) {
        const auto& o = p["oneway"];
        s.oneway = o.is_boolean() ? (o.get<bool>() ? "yes" : "no")
                   : o.is_string() ? lower(o.get<std::string>())
                                   : o.dump();
      }
      const auto& g = f.at("geometry");
      if (g.at("type") != "LineString") throw InvalidInput("edge " + s.edge_id + ": geometry is not a LineString");
      for (const auto& c : g.at("coordinates")) s.geometry.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
      if (s.geometry.size() < 2) throw InvalidInput("edge " + s.edge_id + ": geometry needs two vertices");
      segs.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed road GeoJSON: ") + e.what());
  }
  return build_graph(segs);
}

RoadGraph load_roads(const std::string& path) {
  if (path.ends_with(".geojson") || path.ends_with(".json")) return read_edges_geojson(csv::read_file(path));
  return load_edges_csv(path);
}

}  // namespace shelter::road

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "shelter/geo.hpp"

namespace shelter::road {

using NodeId = std::int64_t;

inline constexpr double kKphPerMph = 1.609344;
inline constexpr double kUnreached = std::numeric_limits<double>::infinity();

struct RoadNode {
  NodeId id = 0;
  geo::GeoPoint location;
};

struct RoadEdge {
  std::string edge_id;
  bool reversed = false;  // the opposite direction of a two-way segment
  NodeId from = 0;
  NodeId to = 0;
  double length_m = 0.0;
  std::string highway;
  std::optional<double> maxspeed_kph;
  std::optional<double> travel_min;
  std::vector<geo::GeoPoint> geometry;  // ordered from -> to; may be empty
};

// Directed road graph with a CSR adjacency index. Immutable: every
// transformation below returns a new graph.
class RoadGraph {
 public:
  RoadGraph() = default;
  // Throws InvalidInput on duplicate node ids, dangling edge endpoints or
  // non-positive lengths.
  RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges);

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::optional<std::size_t> index_of(NodeId id) const;
  std::size_t require_index(NodeId id) const;

  // Out-edges of a node index as indices into edges().
  std::span<const std::uint32_t> out_edges(std::size_t node_index) const;
  std::size_t target_index(std::uint32_t edge) const { return edge_target_[edge]; }

  // True when every edge has a travel time.
  bool times_derived() const;

  // Same nodes, every edge flipped. Used for many-to-one searches.
  RoadGraph reversed() const;

  // Edge polyline, falling back to the straight from/to segment.
  std::vector<geo::GeoPoint> edge_polyline(const RoadEdge& e) const;

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> adjacency_;
  std::vector<std::uint32_t> edge_target_;
};

// Speed cap applied within a buffer around evacuation zones.
struct CongestionOverlay {
  std::vector<geo::GeoPolygon> zones;
  double buffer_m = 5000.0;
  double speed_cap_kph = 10.0;

  void validate() const;
};

// Parses "65 mph", "104.6", "50 kph" into kph. nullopt for blank values.
std::optional<double> parse_speed_kph(const std::string& raw);

// Missing maxspeed := mean known speed of the edge's highway class, else the
// global mean. Throws UnimputableSpeeds when no edge has a known speed.
RoadGraph impute_speeds(const RoadGraph& graph);

// travel_min = (length_m / 1000) / maxspeed_kph * 60. Throws InvalidInput for an
// edge with a missing or non-positive speed.
RoadGraph derive_times(const RoadGraph& graph);

// Removes every edge whose geometry touches a perimeter. Nodes are kept.
RoadGraph apply_closures(const RoadGraph& graph, std::span<const geo::GeoPolygon> perimeters);

// Caps speeds (min rule) on edges touching the buffered zones and re-derives
// their travel time. Buffers are computed in a frame centred on the zones.
RoadGraph apply_congestion(const RoadGraph& graph, const CongestionOverlay& overlay);

inline constexpr double kDefaultSnapRadiusM = 5000.0;

// Nearest node by great-circle distance. Ties go to the smaller node id.
// Throws Unsnappable when the nearest node is beyond max_radius_m.
NodeId snap(const geo::GeoPoint& p, const RoadGraph& graph, double max_radius_m = kDefaultSnapRadiusM,
            const std::string& point_id = "");

// Single-source Dijkstra (binary heap) with a dense, reusable workspace.
class ShortestPaths {
 public:
  explicit ShortestPaths(const RoadGraph& graph);

  // Minutes from the source set to every node index; kUnreached past cutoff.
  // The returned reference is valid until the next call.
  const std::vector<double>& run(std::span<const std::size_t> source_indices, double cutoff_min);
  const std::vector<double>& run(std::size_t source_index, double cutoff_min);

 private:
  const RoadGraph* graph_;
  std::vector<double> dist_;
  std::vector<std::size_t> touched_;
};

// Exact shortest minutes from source to every node within cutoff. Nodes past
// the cutoff are absent; source maps to 0.
std::unordered_map<NodeId, double> sssp_minutes(const RoadGraph& graph, NodeId source,
                                                double cutoff_min = kUnreached);

struct Site {
  std::string id;
  geo::GeoPoint location;
};

// Sparse origin x destination matrix of minutes.
struct TravelMatrix {
  struct Entry {
    std::size_t dest = 0;
    double minutes = 0.0;
  };
  std::vector<std::string> origin_ids;
  std::vector<std::string> dest_ids;
  std::vector<std::vector<Entry>> rows;  // per origin, ascending dest index

  std::optional<double> at(std::size_t origin, std::size_t dest) const;
  std::size_t entry_count() const;
};

// Snaps every site, then runs one Dijkstra per origin (in parallel). Entries
// are present only when within cutoff.
TravelMatrix travel_matrix(const RoadGraph& graph, std::span<const Site> origins, std::span<const Site> destinations,
                           double cutoff_min, double snap_radius_m = kDefaultSnapRadiusM);

// CSV `origin_id,dest_id,minutes`.
std::string matrix_to_csv(const TravelMatrix& m);

// Edge list CSV: edge_id,u,v,length_m,highway,maxspeed_kph,oneway,wkt_geometry.
// Node coordinates come from the first/last WKT vertex. Two-way segments are
// stored as two directed edges; oneway=-1 keeps only v->u.
RoadGraph read_edges_csv(const std::string& text, const std::string& source = "<memory>");
RoadGraph load_edges_csv(const std::string& path);

// GeoJSON FeatureCollection of LineStrings carrying the same properties.
RoadGraph read_edges_geojson(const std::string& text);

// Dispatches on extension (.csv, .geojson/.json).
RoadGraph load_roads(const std::string& path);

}  // namespace shelter::road

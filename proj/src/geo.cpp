#include "shelter/geo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <json.hpp>

namespace shelter::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// Distance (in degrees) below which a point is considered on a ring edge.
constexpr double kOnEdgeTol = 1e-12;

double cross(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  return (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
}

bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  const double len = std::hypot(dx, dy);
  if (len == 0.0) return std::hypot(p.lon - a.lon, p.lat - a.lat) <= kOnEdgeTol;
  if (std::abs(cross(a, b, p)) > kOnEdgeTol * len) return false;
  return p.lon >= std::min(a.lon, b.lon) - kOnEdgeTol && p.lon <= std::max(a.lon, b.lon) + kOnEdgeTol &&
         p.lat >= std::min(a.lat, b.lat) - kOnEdgeTol && p.lat <= std::max(a.lat, b.lat) + kOnEdgeTol;
}

int orientation(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
  const double v = cross(a, b, c);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool within_box(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

bool segments_intersect(const GeoPoint& p1, const GeoPoint& p2, const GeoPoint& q1, const GeoPoint& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && within_box(p1, p2, q1)) return true;
  if (o2 == 0 && within_box(p1, p2, q2)) return true;
  if (o3 == 0 && within_box(q1, q2, p1)) return true;
  if (o4 == 0 && within_box(q1, q2, p2)) return true;
  return false;
}

double signed_area_deg(const Ring& r) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) s += r[i].lon * r[i + 1].lat - r[i + 1].lon * r[i].lat;
  return 0.5 * s;
}

void validate_ring(const Ring& r, const char* which) {
  if (r.size() < 4) throw InvalidInput(std::string(which) + " ring needs at least 4 vertices");
  if (!(r.front() == r.back())) throw InvalidInput(std::string(which) + " ring is not closed");
  for (const auto& p : r) {
    if (!is_valid(p)) throw InvalidInput(std::string(which) + " ring has an out-of-range coordinate");
  }
  if (signed_area_deg(r) == 0.0) throw InvalidInput(std::string(which) + " ring has zero area");
}

void check_simple(const Ring& r) {
  const std::size_t n = r.size() - 1;  // number of edges
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(r[i], r[i + 1], r[j], r[j + 1])) {
        throw InvalidInput("exterior ring self-intersects at edges " + std::to_string(i) + " and " +
                           std::to_string(j));
      }
    }
  }
}

// Winding number of a closed ring around p; non-zero means inside.
int winding_number(const Ring& r, const GeoPoint& p) {
  int wn = 0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const GeoPoint& a = r[i];
    const GeoPoint& b = r[i + 1];
    if (a.lat <= p.lat) {
      if (b.lat > p.lat && cross(a, b, p) > 0) ++wn;
    } else {
      if (b.lat <= p.lat && cross(a, b, p) < 0) --wn;
    }
  }
  return wn;
}

bool on_ring(const Ring& r, const GeoPoint& p) {
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (on_segment(r[i], r[i + 1], p)) return true;
  }
  return false;
}

bool in_box(const GeoPolygon::Box& b, const GeoPoint& p) {
  return p.lon >= b.min_lon - kOnEdgeTol && p.lon <= b.max_lon + kOnEdgeTol && p.lat >= b.min_lat - kOnEdgeTol &&
         p.lat <= b.max_lat + kOnEdgeTol;
}

double point_segment_dist(const PlanarPoint& p, const PlanarPoint& a, const PlanarPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint>;
using BMultiPolygon = bg::model::multi_polygon<BPolygon>;

Ring unproject_ring(const std::vector<BPoint>& pts, const LocalFrame& frame) {
  Ring out;
  out.reserve(pts.size());
  for (const auto& q : pts) out.push_back(frame.unproject({q.x(), q.y()}));
  if (!out.empty()) out.back() = out.front();
  return out;
}

GeoPolygon::Box box_of(const Ring& r) {
  GeoPolygon::Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : r) {
    b.min_lon = std::min(b.min_lon, p.lon);
    b.min_lat = std::min(b.min_lat, p.lat);
    b.max_lon = std::max(b.max_lon, p.lon);
    b.max_lat = std::max(b.max_lat, p.lat);
  }
  return b;
}

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 && p.lon <= 180.0 && p.lat >= -90.0 &&
         p.lat <= 90.0;
}

Ring closed(Ring ring) {
  if (!ring.empty() && !(ring.front() == ring.back())) ring.push_back(ring.front());
  return ring;
}

GeoPolygon::GeoPolygon(Ring exterior, std::vector<Ring> holes, std::string tag, std::string name)
    : exterior_(std::move(exterior)), holes_(std::move(holes)), tag_(std::move(tag)), name_(std::move(name)) {
  validate_ring(exterior_, "exterior");
  check_simple(exterior_);
  for (const auto& h : holes_) validate_ring(h, "hole");
  bbox_ = box_of(exterior_);
}

LocalFrame::LocalFrame(GeoPoint origin)
    : origin_(origin), sin_lat0_(std::sin(origin.lat * kDegToRad)), cos_lat0_(std::cos(origin.lat * kDegToRad)) {
  if (!is_valid(origin)) throw InvalidInput("frame origin out of range");
}

LocalFrame LocalFrame::around(std::span<const GeoPolygon> polys) {
  if (polys.empty()) throw InvalidInput("cannot centre a frame on zero polygons");
  GeoPolygon::Box b = polys.front().bbox();
  for (const auto& p : polys) {
    b.min_lon = std::min(b.min_lon, p.bbox().min_lon);
    b.min_lat = std::min(b.min_lat, p.bbox().min_lat);
    b.max_lon = std::max(b.max_lon, p.bbox().max_lon);
    b.max_lat = std::max(b.max_lat, p.bbox().max_lat);
  }
  return LocalFrame({0.5 * (b.min_lon + b.max_lon), 0.5 * (b.min_lat + b.max_lat)});
}

LocalFrame LocalFrame::around_points(std::span<const GeoPoint> pts) {
  if (pts.empty()) throw InvalidInput("cannot centre a frame on zero points");
  const auto b = box_of(Ring(pts.begin(), pts.end()));
  return LocalFrame({0.5 * (b.min_lon + b.max_lon), 0.5 * (b.min_lat + b.max_lat)});
}

PlanarPoint LocalFrame::project(const GeoPoint& p) const {
  const double lat = p.lat * kDegToRad;
  const double dlon = (p.lon - origin_.lon) * kDegToRad;
  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  const double cos_c = std::clamp(sin_lat0_ * sin_lat + cos_lat0_ * cos_lat * std::cos(dlon), -1.0, 1.0);
  const double c = std::acos(cos_c);
  const double k = c < 1e-12 ? 1.0 : c / std::sin(c);
  return {kEarthRadiusM * k * cos_lat * std::sin(dlon),
          kEarthRadiusM * k * (cos_lat0_ * sin_lat - sin_lat0_ * cos_lat * std::cos(dlon))};
}

GeoPoint LocalFrame::unproject(const PlanarPoint& q) const {
  const double rho = std::hypot(q.x, q.y);
  if (rho < 1e-9) return origin_;
  const double c = rho / kEarthRadiusM;
  const double sin_c = std::sin(c);
  const double cos_c = std::cos(c);
  const double lat = std::asin(std::clamp(cos_c * sin_lat0_ + q.y * sin_c * cos_lat0_ / rho, -1.0, 1.0));
  const double lon = origin_.lon * kDegToRad +
                     std::atan2(q.x * sin_c, rho * cos_lat0_ * cos_c - q.y * sin_lat0_ * sin_c);
  return {lon * kRadToDeg, lat * kRadToDeg};
}

double distance_m(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) return 0.0;
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

bool point_in_polygon(const GeoPoint& p, const GeoPolygon& poly) {
  if (!in_box(poly.bbox(), p)) return false;
  if (on_ring(poly.exterior(), p)) return true;
  if (winding_number(poly.exterior(), p) == 0) return false;
  for (const auto& h : poly.holes()) {
    if (on_ring(h, p)) return true;
    if (winding_number(h, p) != 0) return false;
  }
  return true;
}

bool point_in_any(const GeoPoint& p, std::span<const GeoPolygon> polys) {
  return std::any_of(polys.begin(), polys.end(), [&](const GeoPolygon& g) { return point_in_polygon(p, g); });
}

bool polyline_intersects(std::span<const GeoPoint> line, const GeoPolygon& poly) {
  if (line.empty()) return false;
  const auto lb = box_of(Ring(line.begin(), line.end()));
  const auto& pb = poly.bbox();
  if (lb.max_lon < pb.min_lon || lb.min_lon > pb.max_lon || lb.max_lat < pb.min_lat || lb.min_lat > pb.max_lat) {
    return false;
  }
  for (const auto& v : line) {
    if (point_in_polygon(v, poly)) return true;
  }
  auto crosses_ring = [&](const Ring& r) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      for (std::size_t j = 0; j + 1 < r.size(); ++j) {
        if (segments_intersect(line[i], line[i + 1], r[j], r[j + 1])) return true;
      }
    }
    return false;
  };
  if (crosses_ring(poly.exterior())) return true;
  return std::any_of(poly.holes().begin(), poly.holes().end(), crosses_ring);
}

double distance_to_polygon_m(const GeoPoint& p, const GeoPolygon& poly, const LocalFrame& frame) {
  if (point_in_polygon(p, poly)) return 0.0;
  const PlanarPoint q = frame.project(p);
  double best = std::numeric_limits<double>::infinity();
  auto scan = [&](const Ring& r) {
    PlanarPoint prev = frame.project(r.front());
    for (std::size_t i = 1; i < r.size(); ++i) {
      const PlanarPoint cur = frame.project(r[i]);
      best = std::min(best, point_segment_dist(q, prev, cur));
      prev = cur;
    }
  };
  scan(poly.exterior());
  for (const auto& h : poly.holes()) scan(h);
  return best;
}

double ring_area_m2(const Ring& ring, const LocalFrame& frame) {
  double s = 0.0;
  PlanarPoint prev = frame.project(ring.front());
  for (std::size_t i = 1; i < ring.size(); ++i) {
    const PlanarPoint cur = frame.project(ring[i]);
    s += prev.x * cur.y - cur.x * prev.y;
    prev = cur;
  }
  return 0.5 * s;
}

double polygon_area_m2(const GeoPolygon& poly, const LocalFrame& frame) {
  double a = std::abs(ring_area_m2(poly.exterior(), frame));
  for (const auto& h : poly.holes()) a -= std::abs(ring_area_m2(h, frame));
  return a;
}

GeoPolygon buffer(const GeoPolygon& poly, double dist_m, const LocalFrame& frame) {
  if (!(dist_m >= 0.0) || !std::isfinite(dist_m)) throw InvalidInput("buffer distance must be >= 0");
  if (dist_m == 0.0) return poly;

  BPolygon in;
  for (const auto& p : poly.exterior()) {
    const auto q = frame.project(p);
    bg::append(in.outer(), BPoint(q.x, q.y));
  }
  in.inners().resize(poly.holes().size());
  for (std::size_t h = 0; h < poly.holes().size(); ++h) {
    for (const auto& p : poly.holes()[h]) {
      const auto q = frame.project(p);
      bg::append(in.inners()[h], BPoint(q.x, q.y));
    }
  }
  bg::correct(in);

  // Segments per full circle such that the chord sagitta stays below 0.25 m.
  const double half_angle = std::acos(std::max(-1.0, 1.0 - 0.25 / dist_m));
  const int points = std::clamp(static_cast<int>(std::ceil(std::numbers::pi / half_angle)), 36, 4096);

  BMultiPolygon out;
  bg::buffer(in, out, bg::strategy::buffer::distance_symmetric<double>(dist_m),
             bg::strategy::buffer::side_straight(), bg::strategy::buffer::join_round(points),
             bg::strategy::buffer::end_round(points), bg::strategy::buffer::point_circle(points));
  if (out.empty()) throw InvalidInput("buffer produced an empty geometry");

  const auto largest = std::max_element(out.begin(), out.end(), [](const BPolygon& a, const BPolygon& b) {
    return bg::area(a) < bg::area(b);
  });
  Ring exterior = unproject_ring(largest->outer(), frame);
  std::vector<Ring> holes;
  for (const auto& inner : largest->inners()) holes.push_back(unproject_ring(inner, frame));
  return GeoPolygon(std::move(exterior), std::move(holes), poly.tag(), poly.name());
}

std::vector<GeoPolygon> read_polygon_layer(const std::string& geojson_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(geojson_text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("invalid GeoJSON: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection") throw InvalidInput("expected a GeoJSON FeatureCollection");

  auto read_ring = [](const json& coords) {
    Ring r;
    for (const auto& c : coords) {
      if (!c.is_array() || c.size() < 2) throw InvalidInput("malformed GeoJSON position");
      r.push_back({c[0].get<double>(), c[1].get<double>()});
    }
    return r;
  };
  auto read_polygon = [&](const json& rings, const std::string& layer, const std::string& name) {
    if (!rings.is_array() || rings.empty()) throw InvalidInput("polygon without rings");
    std::vector<Ring> holes;
    for (std::size_t i = 1; i < rings.size(); ++i) holes.push_back(read_ring(rings[i]));
    return GeoPolygon(read_ring(rings[0]), std::move(holes), layer, name);
  };

  std::vector<GeoPolygon> out;
  try {
  for (const auto& f : doc.at("features")) {
    const auto& props = f.contains("properties") && f["properties"].is_object() ? f["properties"] : json::object();
    const std::string layer = props.value("layer", "");
    const std::string name = props.value("name", "");
    if (layer != "evac_order" && layer != "evac_warning" && layer != "fire_perimeter") {
      throw InvalidInput("feature '" + name + "' has unknown layer '" + layer + "'");
    }
    const auto& g = f.at("geometry");
    const std::string type = g.at("type").get<std::string>();
    if (type == "Polygon") {
      out.push_back(read_polygon(g.at("coordinates"), layer, name));
    } else if (type == "MultiPolygon") {
      for (const auto& part : g.at("coordinates")) out.push_back(read_polygon(part, layer, name));
    } else {
      throw InvalidInput("feature '" + name + "' has non-polygon geometry " + type);
    }
  }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed GeoJSON feature: ") + e.what());
  }
  return out;
}

std::vector<GeoPolygon> load_polygon_layer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return read_polygon_layer(ss.str());
}

}  // namespace shelter::geo

#pragma once

#include <span>
#include <string>
#include <vector>

#include "shelter/error.hpp"

namespace shelter::geo {

inline constexpr double kEarthRadiusM = 6371000.0;

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

using Ring = std::vector<GeoPoint>;

// A closed polygon with optional holes, validated on construction. Coordinates
// are treated as planar lon/lat for containment (GeoJSON convention).
class GeoPolygon {
 public:
  // Throws InvalidInput when a ring is open, has fewer than four vertices,
  // zero area, or the exterior self-intersects.
  GeoPolygon(Ring exterior, std::vector<Ring> holes = {}, std::string tag = {},
             std::string name = {});

  const Ring& exterior() const { return exterior_; }
  const std::vector<Ring>& holes() const { return holes_; }
  const std::string& tag() const { return tag_; }
  const std::string& name() const { return name_; }

  struct Box {
    double min_lon, min_lat, max_lon, max_lat;
  };
  const Box& bbox() const { return bbox_; }

 private:
  Ring exterior_;
  std::vector<Ring> holes_;
  std::string tag_;
  std::string name_;
  Box bbox_{};
};

// Closes the ring if the caller left it open. Convenience for fixtures.
Ring closed(Ring ring);

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

// Spherical azimuthal-equidistant projection around an origin. Distances and
// azimuths from the origin are exact on the sphere; elsewhere distortion stays
// well under a metre per kilometre inside ~200 km.
class LocalFrame {
 public:
  explicit LocalFrame(GeoPoint origin);

  // Frame centred on the bounding box of the given polygons.
  static LocalFrame around(std::span<const GeoPolygon> polys);
  static LocalFrame around_points(std::span<const GeoPoint> pts);

  PlanarPoint project(const GeoPoint& p) const;
  GeoPoint unproject(const PlanarPoint& q) const;
  const GeoPoint& origin() const { return origin_; }

 private:
  GeoPoint origin_;
  double sin_lat0_;
  double cos_lat0_;
};

// Great-circle (haversine) distance on a sphere of radius kEarthRadiusM.
double distance_m(const GeoPoint& a, const GeoPoint& b);

// Boundary points count as inside; points in holes are outside.
bool point_in_polygon(const GeoPoint& p, const GeoPolygon& poly);

// True if any polygon in the list contains p.
bool point_in_any(const GeoPoint& p, std::span<const GeoPolygon> polys);

// True when the polyline touches the polygon anywhere: a vertex inside, or any
// segment crossing or touching a ring.
bool polyline_intersects(std::span<const GeoPoint> line, const GeoPolygon& poly);

// Straight-line metres from p to the polygon (0 when inside), measured in frame.
double distance_to_polygon_m(const GeoPoint& p, const GeoPolygon& poly, const LocalFrame& frame);

// Outward buffer of dist metres with round joins, computed in `frame`. The
// result keeps the input's tag and name. Throws InvalidInput for dist < 0.
GeoPolygon buffer(const GeoPolygon& poly, double dist_m, const LocalFrame& frame);

// Signed planar area of a ring in the frame (square metres, CCW positive).
double ring_area_m2(const Ring& ring, const LocalFrame& frame);

// Exterior area minus holes, in the frame.
double polygon_area_m2(const GeoPolygon& poly, const LocalFrame& frame);

// Polygon layers from a GeoJSON FeatureCollection. Each feature carries
// `layer` (evac_order | evac_warning | fire_perimeter) and `name`. MultiPolygon
// features expand into one GeoPolygon per part.
std::vector<GeoPolygon> read_polygon_layer(const std::string& geojson_text);
std::vector<GeoPolygon> load_polygon_layer(const std::string& path);

}  // namespace shelter::geo

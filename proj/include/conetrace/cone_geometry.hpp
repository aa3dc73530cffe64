#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace conetrace {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Link of a cone point in a flat surface: a circle whose circumference is
/// the cone angle. Coordinates on the link are arc length, reduced to
/// [0, circumference).
class LinkCircle {
 public:
  explicit LinkCircle(double circumference);

  double circumference() const { return alpha_; }
  double reduce(double theta) const;

  friend bool operator==(const LinkCircle&, const LinkCircle&) = default;

 private:
  double alpha_;
};

struct ConePoint {
  std::size_t id = 0;
  std::string label;
  LinkCircle link{1.0};
  std::optional<Point2> position;
};

/// Which copy of a doubled planar domain a segment lives on. Edges of the
/// underlying polygons are shared by both copies.
enum class Sheet { Shared, First, Second };

struct SegmentEnd {
  std::size_t cone = 0;
  double theta = 0.0;
};

/// Undirected geodesic segment between two cone points. The traversal
/// direction is chosen when chains are built.
struct GeodesicSegment {
  std::size_t id = 0;
  SegmentEnd a;
  SegmentEnd b;
  double length = 0.0;
  Sheet sheet = Sheet::Shared;
};

class ConeGraph {
 public:
  ConeGraph() = default;

  /// Validates ids (must equal the index), endpoint references, link
  /// coordinates and lengths. Link coordinates are reduced mod alpha.
  ConeGraph(std::vector<ConePoint> cones, std::vector<GeodesicSegment> segments, int dimension = 2);

  const std::vector<ConePoint>& cone_points() const { return cones_; }
  const std::vector<GeodesicSegment>& segments() const { return segments_; }
  const ConePoint& cone(std::size_t id) const { return cones_.at(id); }
  const GeodesicSegment& segment(std::size_t id) const { return segments_.at(id); }
  int dimension() const { return dimension_; }
  bool has_positions() const;

 private:
  std::vector<ConePoint> cones_;
  std::vector<GeodesicSegment> segments_;
  int dimension_ = 2;
};

enum class Transition { StrictlyDiffractive, Geometric };

inline constexpr double kGeometricTolerance = 1e-9;

/// Arc distance on the link, in [0, alpha/2].
double link_distance(const LinkCircle& link, double theta1, double theta2);

/// Distance from theta_out to the nearest endpoint of a link geodesic of
/// length pi starting at theta_in. Link geodesics wrap when alpha < 2 pi,
/// so the endpoints are theta_in +- pi reduced mod alpha.
double distance_to_geometric(const LinkCircle& link, double theta_in, double theta_out);

Transition classify_transition(const LinkCircle& link, double theta_in, double theta_out,
                               double tol = kGeometricTolerance);

/// Doubles a simple counterclockwise polygon along its edges.
///
/// Cone angle at each vertex is twice the interior angle. Link coordinates
/// at vertex i are measured from the lower-indexed incident edge (edge j
/// joins vertex j to vertex j+1, so vertex 0 uses edge 0 and vertex i > 0
/// uses edge i-1), sweeping through the interior: the first copy fills
/// [0, interior angle] and the second copy is its mirror alpha - theta.
/// Edges are single shared segments; every chord whose open interior lies
/// strictly inside the polygon gives one segment per copy.
ConeGraph build_doubled_polygon(std::span<const Point2> vertices);

/// Doubles the exterior of disjoint simple counterclockwise polygons. Cone
/// angle is twice the exterior angle; link coordinates follow the same
/// lower-indexed-edge convention as build_doubled_polygon, sweeping through
/// the exterior. Mutually visible vertex pairs give two segments (one per
/// copy), obstacle edges give one.
ConeGraph build_planar_exterior(std::span<const std::vector<Point2>> obstacles);

}  // namespace conetrace

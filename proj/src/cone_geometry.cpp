#include "conetrace/cone_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "conetrace/errors.hpp"

namespace conetrace {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative tolerance for orientation tests, scaled by the squared extent
// of the input.
constexpr double kOrientEps = 1e-12;
// Angular slack when deciding whether a direction enters a vertex sector.
constexpr double kSectorEps = 1e-12;

Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double norm(Point2 a) { return std::hypot(a.x, a.y); }

double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

// Counterclockwise angle from u to v, in [0, 2 pi).
double ccw_angle(Point2 u, Point2 v) {
  double a = std::atan2(cross(u, v), dot(u, v));
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

int sign_with_tol(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

bool on_segment(Point2 p, Point2 a, Point2 b, double tol) {
  if (sign_with_tol(orient(a, b, p), tol) != 0) return false;
  return std::min(a.x, b.x) - 1e-15 <= p.x && p.x <= std::max(a.x, b.x) + 1e-15 &&
         std::min(a.y, b.y) - 1e-15 <= p.y && p.y <= std::max(a.y, b.y) + 1e-15;
}

// Closed segments [p1,p2] and [q1,q2] share at least one point.
bool segments_touch(Point2 p1, Point2 p2, Point2 q1, Point2 q2, double tol) {
  int d1 = sign_with_tol(orient(q1, q2, p1), tol);
  int d2 = sign_with_tol(orient(q1, q2, p2), tol);
  int d3 = sign_with_tol(orient(p1, p2, q1), tol);
  int d4 = sign_with_tol(orient(p1, p2, q2), tol);
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  return (d1 == 0 && on_segment(p1, q1, q2, tol)) || (d2 == 0 && on_segment(p2, q1, q2, tol)) ||
         (d3 == 0 && on_segment(q1, p1, p2, tol)) || (d4 == 0 && on_segment(q2, p1, p2, tol));
}

double signed_area(std::span<const Point2> poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * s;
}

// Strict winding-number containment (points on the boundary are outside).
bool strictly_inside(Point2 p, std::span<const Point2> poly, double tol) {
  int wn = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
    if (on_segment(p, a, b, tol)) return false;
    if (a.y <= p.y) {
      if (b.y > p.y && orient(a, b, p) > 0) ++wn;
    } else if (b.y <= p.y && orient(a, b, p) < 0) {
      --wn;
    }
  }
  return wn != 0;
}

double extent_squared(std::span<const Point2> pts) {
  double lo_x = pts[0].x, hi_x = pts[0].x, lo_y = pts[0].y, hi_y = pts[0].y;
  for (auto p : pts) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  double e = std::max(hi_x - lo_x, hi_y - lo_y);
  return e > 0 ? e * e : 1.0;
}

std::string where(std::size_t polygon, std::size_t vertex) {
  std::ostringstream os;
  if (polygon != std::size_t(-1)) os << "polygon " << polygon << ", ";
  os << "vertex " << vertex;
  return os.str();
}

// Checks simplicity and counterclockwise orientation; returns interior
// angles.
std::vector<double> validate_polygon(std::span<const Point2> poly, double tol, std::size_t tag) {
  const std::size_t n = poly.size();
  if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
  for (auto p : poly)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ValidationError("non-finite vertex coordinate");

  std::vector<double> angles(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point2 prev = poly[(i + n - 1) % n], cur = poly[i], next = poly[(i + 1) % n];
    Point2 dn = next - cur, dp = prev - cur;
    if (norm(dn) == 0.0 || norm(dp) == 0.0) throw ValidationError("repeated vertex at " + where(tag, i));
    if (std::abs(cross(dn, dp)) <= kOrientEps * norm(dn) * norm(dp)) {
      if (dot(dn, dp) < 0)
        throw ValidationError("collinear consecutive vertices (straight angle) at " + where(tag, i));
      throw ValidationError("degenerate spike at " + where(tag, i));
    }
    angles[i] = ccw_angle(dn, dp);
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_touch(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n], tol))
        throw ValidationError("polygon is not simple: edges " + std::to_string(i) + " and " +
                              std::to_string(j) + " intersect");
    }
  }
  if (signed_area(poly) <= 0.0) throw ValidationError("polygon must be counterclockwise");
  return angles;
}

// A vertex seen as a cone point: the free sector of directions (where the
// doubled surface lives) and the link coordinate convention.
struct VertexFrame {
  Point2 pos;
  Point2 sector_start;  // direction opening the sector (ccw sweep)
  double sweep = 0.0;   // sector angle, alpha / 2
  bool ref_is_start = true;
  Point2 ref;

  // Link coordinate on the first copy of a direction inside the sector.
  double coordinate(Point2 dir) const {
    if (ref_is_start) return ccw_angle(ref, dir);
    return ccw_angle(dir, ref);
  }

  bool strictly_inside_sector(Point2 dir) const {
    double a = ccw_angle(sector_start, dir);
    return a > kSectorEps && a < sweep - kSectorEps;
  }
};

struct EdgeRef {
  Point2 a;
  Point2 b;
  std::size_t va;  // global vertex indices
  std::size_t vb;
};

// Straight segment between vertices p and q is a geodesic of the doubled
// surface: it leaves both vertices into their sectors, meets no third
// vertex and crosses or grazes no edge.
bool visible(std::size_t p, std::size_t q, const std::vector<VertexFrame>& frames,
             const std::vector<EdgeRef>& edges, double tol) {
  Point2 a = frames[p].pos, b = frames[q].pos;
  if (!frames[p].strictly_inside_sector(b - a)) return false;
  if (!frames[q].strictly_inside_sector(a - b)) return false;
  for (std::size_t r = 0; r < frames.size(); ++r) {
    if (r == p || r == q) continue;
    if (on_segment(frames[r].pos, a, b, tol)) return false;
  }
  for (const auto& e : edges) {
    bool incident = e.va == p || e.vb == p || e.va == q || e.vb == q;
    if (incident) continue;
    if (segments_touch(a, b, e.a, e.b, tol)) return false;
  }
  return true;
}

// Builds frames for one polygon. interior == true frames the polygon
// interior (doubled polygon), otherwise its exterior.
std::vector<VertexFrame> frame_polygon(std::span<const Point2> poly, std::span<const double> angles,
                                       bool interior) {
  const std::size_t n = poly.size();
  std::vector<VertexFrame> frames(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point2 cur = poly[i];
    Point2 dn = poly[(i + 1) % n] - cur, dp = poly[(i + n - 1) % n] - cur;
    VertexFrame f;
    f.pos = cur;
    // Lower-indexed incident edge: edge 0 (towards next) at vertex 0, edge
    // i-1 (towards prev) elsewhere.
    bool ref_next = (i == 0);
    if (interior) {
      f.sector_start = dn;
      f.sweep = angles[i];
      f.ref_is_start = ref_next;
    } else {
      f.sector_start = dp;
      f.sweep = 2.0 * std::numbers::pi - angles[i];
      f.ref_is_start = !ref_next;
    }
    f.ref = ref_next ? dn : dp;
    frames[i] = f;
  }
  return frames;
}

GeodesicSegment make_segment(std::size_t id, std::size_t p, std::size_t q,
                             const std::vector<VertexFrame>& frames,
                             const std::vector<ConePoint>& cones, Sheet sheet) {
  Point2 a = frames[p].pos, b = frames[q].pos;
  double ta = frames[p].coordinate(b - a);
  double tb = frames[q].coordinate(a - b);
  if (sheet == Sheet::Second) {
    ta = cones[p].link.reduce(cones[p].link.circumference() - ta);
    tb = cones[q].link.reduce(cones[q].link.circumference() - tb);
  }
  GeodesicSegment s;
  s.id = id;
  s.a = {p, cones[p].link.reduce(ta)};
  s.b = {q, cones[q].link.reduce(tb)};
  s.length = norm(b - a);
  s.sheet = sheet;
  return s;
}

}  // namespace

LinkCircle::LinkCircle(double circumference) : alpha_(circumference) {
  if (!(circumference > 0.0) || !std::isfinite(circumference))
    throw ValidationError("link circumference must be positive and finite");
}

double LinkCircle::reduce(double theta) const {
  double r = std::fmod(theta, alpha_);
  if (r < 0.0) r += alpha_;
  if (r >= alpha_) r = 0.0;
  return r;
}

ConeGraph::ConeGraph(std::vector<ConePoint> cones, std::vector<GeodesicSegment> segments, int dimension)
    : cones_(std::move(cones)), segments_(std::move(segments)), dimension_(dimension) {
  if (dimension_ < 2) throw ValidationError("dimension must be at least 2");
  for (std::size_t i = 0; i < cones_.size(); ++i) {
    if (cones_[i].id != i) throw ValidationError("cone point ids must be 0..N-1 in order");
    if (cones_[i].label.empty()) cones_[i].label = std::to_string(i);
  }
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto& s = segments_[i];
    if (s.id != i) throw ValidationError("segment ids must be 0..M-1 in order");
    if (s.a.cone >= cones_.size() || s.b.cone >= cones_.size())
      throw ValidationError("segment " + std::to_string(i) + " references a missing cone point");
    if (!(s.length > 0.0) || !std::isfinite(s.length))
      throw ValidationError("segment " + std::to_string(i) + " must have positive finite length");
    if (!std::isfinite(s.a.theta) || !std::isfinite(s.b.theta))
      throw ValidationError("segment " + std::to_string(i) + " has a non-finite link coordinate");
    s.a.theta = cones_[s.a.cone].link.reduce(s.a.theta);
    s.b.theta = cones_[s.b.cone].link.reduce(s.b.theta);
  }
}

bool ConeGraph::has_positions() const {
  return !cones_.empty() &&
         std::all_of(cones_.begin(), cones_.end(), [](const ConePoint& c) { return c.position.has_value(); });
}

double link_distance(const LinkCircle& link, double theta1, double theta2) {
  double d = link.reduce(theta1 - theta2);
  return std::min(d, link.circumference() - d);
}

double distance_to_geometric(const LinkCircle& link, double theta_in, double theta_out) {
  const double pi = std::numbers::pi;
  return std::min(link_distance(link, theta_in + pi, theta_out), link_distance(link, theta_in - pi, theta_out));
}

Transition classify_transition(const LinkCircle& link, double theta_in, double theta_out, double tol) {
  return distance_to_geometric(link, theta_in, theta_out) <= tol ? Transition::Geometric
                                                                 : Transition::StrictlyDiffractive;
}

ConeGraph build_doubled_polygon(std::span<const Point2> vertices) {
  if (vertices.size() < 3) throw ValidationError("polygon needs at least 3 vertices");
  const double tol = kOrientEps * extent_squared(vertices);
  auto angles = validate_polygon(vertices, tol, std::size_t(-1));
  const std::size_t n = vertices.size();
  auto frames = frame_polygon(vertices, angles, true);

  std::vector<ConePoint> cones;
  for (std::size_t i = 0; i < n; ++i)
    cones.push_back({i, "v" + std::to_string(i), LinkCircle(2.0 * angles[i]), vertices[i]});

  std::vector<EdgeRef> edges;
  for (std::size_t j = 0; j < n; ++j) edges.push_back({vertices[j], vertices[(j + 1) % n], j, (j + 1) % n});

  std::vector<GeodesicSegment> segs;
  for (std::size_t j = 0; j < n; ++j) segs.push_back(make_segment(segs.size(), j, (j + 1) % n, frames, cones, Sheet::Shared));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (!visible(i, j, frames, edges, tol)) continue;
      Point2 mid{0.5 * (vertices[i].x + vertices[j].x), 0.5 * (vertices[i].y + vertices[j].y)};
      if (!strictly_inside(mid, vertices, tol)) continue;
      segs.push_back(make_segment(segs.size(), i, j, frames, cones, Sheet::First));
      segs.push_back(make_segment(segs.size(), i, j, frames, cones, Sheet::Second));
    }
  }
  return ConeGraph(std::move(cones), std::move(segs), 2);
}

ConeGraph build_planar_exterior(std::span<const std::vector<Point2>> obstacles) {
  if (obstacles.empty()) throw ValidationError("at least one obstacle polygon is required");
  std::vector<Point2> all;
  for (const auto& poly : obstacles) all.insert(all.end(), poly.begin(), poly.end());
  if (all.empty()) throw ValidationError("obstacle polygons are empty");
  const double tol = kOrientEps * extent_squared(all);

  std::vector<VertexFrame> frames;
  std::vector<ConePoint> cones;
  std::vector<EdgeRef> edges;
  std::vector<std::size_t> owner;
  std::vector<std::size_t> offset;
  for (std::size_t k = 0; k < obstacles.size(); ++k) {
    const auto& poly = obstacles[k];
    auto angles = validate_polygon(poly, tol, k);
    auto f = frame_polygon(poly, angles, false);
    offset.push_back(frames.size());
    for (std::size_t i = 0; i < poly.size(); ++i) {
      std::size_t id = frames.size();
      frames.push_back(f[i]);
      owner.push_back(k);
      cones.push_back({id, "p" + std::to_string(k) + "v" + std::to_string(i),
                       LinkCircle(2.0 * (2.0 * std::numbers::pi - angles[i])), poly[i]});
    }
    for (std::size_t i = 0; i < poly.size(); ++i)
      edges.push_back({poly[i], poly[(i + 1) % poly.size()], offset[k] + i, offset[k] + (i + 1) % poly.size()});
  }

  // Disjointness: no edges from different obstacles meet, no obstacle
  // contains a vertex of another.
  for (const auto& e : edges) {
    for (const auto& g : edges) {
      if (owner[e.va] >= owner[g.va]) continue;
      if (segments_touch(e.a, e.b, g.a, g.b, tol))
        throw ValidationError("obstacles " + std::to_string(owner[e.va]) + " and " + std::to_string(owner[g.va]) +
                              " intersect");
    }
  }
  for (std::size_t k = 0; k < obstacles.size(); ++k)
    for (std::size_t v = 0; v < all.size(); ++v)
      if (owner[v] != k && strictly_inside(all[v], obstacles[k], tol))
        throw ValidationError("obstacle " + std::to_string(owner[v]) + " lies inside obstacle " + std::to_string(k));

  auto is_edge = [&](std::size_t p, std::size_t q) {
    if (owner[p] != owner[q]) return false;
    std::size_t n = obstacles[owner[p]].size();
    std::size_t i = p - offset[owner[p]], j = q - offset[owner[q]];
    return (i + 1) % n == j || (j + 1) % n == i;
  };

  std::vector<GeodesicSegment> segs;
  for (std::size_t p = 0; p < frames.size(); ++p) {
    for (std::size_t q = p + 1; q < frames.size(); ++q) {
      if (is_edge(p, q)) {
        segs.push_back(make_segment(segs.size(), p, q, frames, cones, Sheet::Shared));
        continue;
      }
      if (!visible(p, q, frames, edges, tol)) continue;
      segs.push_back(make_segment(segs.size(), p, q, frames, cones, Sheet::First));
      segs.push_back(make_segment(segs.size(), p, q, frames, cones, Sheet::Second));
    }
  }
  return ConeGraph(std::move(cones), std::move(segs), 2);
}

}  // namespace conetrace

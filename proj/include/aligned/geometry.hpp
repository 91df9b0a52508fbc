#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aligned/rational.hpp"

namespace aligned {

struct DegenerateSegment : Error {
  using Error::Error;
};
struct IdenticalLines : Error {
  using Error::Error;
};
struct NonSimplePolygon : Error {
  using Error::Error;
};

struct Point {
  Rat x, y;

  Point() = default;
  Point(Rat px, Rat py) : x(std::move(px)), y(std::move(py)) {}

  bool operator==(const Point& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Point& o) const { return !(*this == o); }
  Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
  Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
  Point operator*(const Rat& s) const { return {x * s, y * s}; }
};

// Locus a*x + b*y + c = 0, normalized so that all coefficients are coprime
// integers and the first nonzero of (a, b) is positive. Canonical equality.
struct Line {
  Rat a, b, c;

  Line(Rat la, Rat lb, Rat lc);
  static Line through(const Point& p, const Point& q);

  bool operator==(const Line& o) const { return a == o.a && b == o.b && c == o.c; }
  bool operator!=(const Line& o) const { return !(*this == o); }

  // Reference direction (b, -a); the positive side a*x+b*y+c > 0 lies to its left.
  Point direction() const { return Point(b, -a); }
  // An exact point on the line.
  Point origin() const;
  // Scalar position of p along direction(); p must lie on the line.
  Rat param_of(const Point& p) const;
  Point point_at(const Rat& t) const;
  Rat eval(const Point& p) const { return a * p.x + b * p.y + c; }
};

// Sign of det(q - p, r - p): +1 when r lies left of the directed line p->q.
int orient(const Point& p, const Point& q, const Point& r);

int side_of_line(const Line& l, const Point& p);

// True when q lies on the closed segment [p, r] (all three collinear required).
bool on_segment(const Point& p, const Point& q, const Point& r);

enum class SegXKind { None, At, Overlap };
struct SegX {
  SegXKind kind = SegXKind::None;
  Point at;  // set when kind == At
};

SegX segment_intersection(const Point& a, const Point& b, const Point& c, const Point& d);

std::optional<Point> line_intersection(const Line& l1, const Line& l2);

// Intersection points of a line with the boundary of a convex polygon.
// Returns 0, 1 or 2 points; an edge lying on the line reports its endpoints.
std::vector<Point> line_convex_clip(const Line& l, const std::vector<Point>& poly);

enum class Location { Inside, Boundary, Outside };

Location point_in_convex(const std::vector<Point>& poly, const Point& p);

// Twice the signed area of a polygon (positive for counterclockwise).
Rat polygon_area2(const std::vector<Point>& poly);

Point polygon_centroid(const std::vector<Point>& poly);

bool is_simple_polygon(const std::vector<Point>& poly);

// Clips a convex polygon to the closed half-plane eval >= 0 (keep_positive)
// or eval <= 0. Result is convex; may be empty or degenerate.
std::vector<Point> clip_convex_halfplane(const std::vector<Point>& poly, const Line& l,
                                         bool keep_positive);

// Kernel of a simple ccw polygon: the intersection of the half-planes left of
// each directed boundary edge. Empty list when the polygon is not star-shaped.
// Output is a canonical ccw convex polygon (possibly degenerate).
std::vector<Point> kernel_of_star_polygon(const std::vector<Point>& poly);

// Removes consecutive duplicates and collinear midpoints; canonical start vertex.
std::vector<Point> canonical_convex(std::vector<Point> poly);

struct BBox {
  Rat xmin, ymin, xmax, ymax;
  std::vector<Point> corners() const;  // ccw rectangle
  bool contains_strict(const Point& p) const;
};

BBox bbox_of(const std::vector<Point>& pts);
BBox expand(const BBox& box, const Rat& factor);  // grow around center by factor

}  // namespace aligned

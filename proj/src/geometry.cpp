#include "aligned/geometry.hpp"

#include <algorithm>

namespace aligned {

namespace {

// Scales (a, b, c) to coprime integers with the first nonzero of (a, b) positive.
void normalize_line(Rat& a, Rat& b, Rat& c) {
  Int lcm = boost::multiprecision::lcm(denominator(a), denominator(b));
  lcm = boost::multiprecision::lcm(lcm, denominator(c));
  Int ia = numerator(Rat(a * lcm)), ib = numerator(Rat(b * lcm)), ic = numerator(Rat(c * lcm));
  Int g = boost::multiprecision::gcd(boost::multiprecision::gcd(abs(ia), abs(ib)), abs(ic));
  if (g != 0) {
    ia /= g;
    ib /= g;
    ic /= g;
  }
  int lead = ia != 0 ? ia.sign() : ib.sign();
  if (lead < 0) {
    ia = -ia;
    ib = -ib;
    ic = -ic;
  }
  a = Rat(ia);
  b = Rat(ib);
  c = Rat(ic);
}

}  // namespace

Line::Line(Rat la, Rat lb, Rat lc) : a(std::move(la)), b(std::move(lb)), c(std::move(lc)) {
  if (a == 0 && b == 0) throw Error("line requires (a, b) != (0, 0)");
  normalize_line(a, b, c);
}

Line Line::through(const Point& p, const Point& q) {
  if (p == q) throw DegenerateSegment("Line::through with equal points");
  // (y1 - y2) x + (x2 - x1) y + (x1 y2 - x2 y1) = 0
  return Line(p.y - q.y, q.x - p.x, p.x * q.y - q.x * p.y);
}

Point Line::origin() const {
  if (b != 0) return Point(Rat(0), -c / b);
  return Point(-c / a, Rat(0));
}

Rat Line::param_of(const Point& p) const {
  // Project p - origin() onto direction (b, -a); direction has norm^2 a^2+b^2.
  Point d = direction();
  Point w = p - origin();
  return (w.x * d.x + w.y * d.y) / (d.x * d.x + d.y * d.y);
}

Point Line::point_at(const Rat& t) const {
  Point o = origin();
  Point d = direction();
  return o + d * t;
}

int orient(const Point& p, const Point& q, const Point& r) {
  Rat det = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
  return det.sign();
}

int side_of_line(const Line& l, const Point& p) { return l.eval(p).sign(); }

bool on_segment(const Point& p, const Point& q, const Point& r) {
  if (orient(p, q, r) != 0) return false;
  if (p.x != r.x) {
    auto [lo, hi] = std::minmax(p.x, r.x);
    return lo <= q.x && q.x <= hi;
  }
  auto [lo, hi] = std::minmax(p.y, r.y);
  return lo <= q.y && q.y <= hi;
}

SegX segment_intersection(const Point& a, const Point& b, const Point& c, const Point& d) {
  if (a == b || c == d) throw DegenerateSegment("segment_intersection: zero-length segment");
  int o1 = orient(a, b, c);
  int o2 = orient(a, b, d);
  int o3 = orient(c, d, a);
  int o4 = orient(c, d, b);

  if (o1 == 0 && o2 == 0) {
    // Collinear: classify the 1-d overlap.
    auto key = [&](const Point& p) { return a.x != b.x ? p.x : p.y; };
    Rat a1 = key(a), b1 = key(b), c1 = key(c), d1 = key(d);
    if (a1 > b1) std::swap(a1, b1);
    Rat lo = std::max(a1, std::min(c1, d1));
    Rat hi = std::min(b1, std::max(c1, d1));
    if (lo > hi) return {SegXKind::None, {}};
    if (lo < hi) return {SegXKind::Overlap, {}};
    // Single shared point.
    Point p = (key(a) == lo) ? a : (key(b) == lo ? b : (key(c) == lo ? c : d));
    return {SegXKind::At, p};
  }
  if (o1 * o2 <= 0 && o3 * o4 <= 0) {
    if (o1 == 0) return {SegXKind::At, c};
    if (o2 == 0) return {SegXKind::At, d};
    if (o3 == 0) return {SegXKind::At, a};
    if (o4 == 0) return {SegXKind::At, b};
    Line l1 = Line::through(a, b);
    Line l2 = Line::through(c, d);
    auto p = line_intersection(l1, l2);
    return {SegXKind::At, *p};
  }
  return {SegXKind::None, {}};
}

std::optional<Point> line_intersection(const Line& l1, const Line& l2) {
  if (l1 == l2) throw IdenticalLines("line_intersection: identical lines");
  Rat det = l1.a * l2.b - l2.a * l1.b;
  if (det == 0) return std::nullopt;
  Rat x = (l1.b * l2.c - l2.b * l1.c) / det;
  Rat y = (l2.a * l1.c - l1.a * l2.c) / det;
  return Point(x, y);
}

std::vector<Point> line_convex_clip(const Line& l, const std::vector<Point>& poly) {
  std::vector<Point> hits;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    int sp = side_of_line(l, p);
    int sq = side_of_line(l, q);
    if (sp == 0) hits.push_back(p);
    if (sp == 0 && sq == 0) hits.push_back(q);
    if (sp * sq < 0) {
      auto x = line_intersection(l, Line::through(p, q));
      hits.push_back(*x);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Point& u, const Point& v) {
    return u.x != v.x ? u.x < v.x : u.y < v.y;
  });
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits;
}

Location point_in_convex(const std::vector<Point>& poly, const Point& p) {
  bool boundary = false;
  size_t n = poly.size();
  if (n == 0) return Location::Outside;
  if (n == 1) return poly[0] == p ? Location::Boundary : Location::Outside;
  for (size_t i = 0; i < n; ++i) {
    const Point& u = poly[i];
    const Point& v = poly[(i + 1) % n];
    if (u == v) continue;
    int o = orient(u, v, p);
    if (o < 0) return Location::Outside;
    if (o == 0) {
      if (on_segment(u, p, v)) boundary = true;
      else return Location::Outside;
    }
  }
  return boundary ? Location::Boundary : Location::Inside;
}

Rat polygon_area2(const std::vector<Point>& poly) {
  Rat s = 0;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    s += p.x * q.y - q.x * p.y;
  }
  return s;
}

Point polygon_centroid(const std::vector<Point>& poly) {
  if (poly.empty()) throw Error("centroid of empty polygon");
  Rat a2 = polygon_area2(poly);
  if (a2 == 0) {
    // Degenerate: average the vertices.
    Rat sx = 0, sy = 0;
    for (const auto& p : poly) {
      sx += p.x;
      sy += p.y;
    }
    return Point(sx / int(poly.size()), sy / int(poly.size()));
  }
  Rat cx = 0, cy = 0;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    Rat cross = p.x * q.y - q.x * p.y;
    cx += (p.x + q.x) * cross;
    cy += (p.y + q.y) * cross;
  }
  return Point(cx / (a2 * 3), cy / (a2 * 3));
}

bool is_simple_polygon(const std::vector<Point>& poly) {
  size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i)
    if (poly[i] == poly[(i + 1) % n]) return false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const Point &a = poly[i], &b = poly[(i + 1) % n];
      const Point &c = poly[j], &d = poly[(j + 1) % n];
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      SegX x = segment_intersection(a, b, c, d);
      if (adjacent) {
        if (x.kind == SegXKind::Overlap) return false;
        // Adjacent edges meet in exactly the shared endpoint.
        if (x.kind == SegXKind::At) {
          Point shared = (j == i + 1) ? b : a;
          if (x.at != shared) return false;
        }
      } else if (x.kind != SegXKind::None) {
        return false;
      }
    }
  }
  return true;
}

std::vector<Point> clip_convex_halfplane(const std::vector<Point>& poly, const Line& l,
                                         bool keep_positive) {
  std::vector<Point> out;
  size_t n = poly.size();
  auto keep = [&](const Point& p) {
    int s = side_of_line(l, p);
    return keep_positive ? s >= 0 : s <= 0;
  };
  for (size_t i = 0; i < n; ++i) {
    const Point& cur = poly[i];
    const Point& nxt = poly[(i + 1) % n];
    bool kc = keep(cur), kn = keep(nxt);
    if (kc) out.push_back(cur);
    if (kc != kn && side_of_line(l, cur) != 0 && side_of_line(l, nxt) != 0) {
      auto x = line_intersection(l, Line::through(cur, nxt));
      out.push_back(*x);
    }
  }
  return canonical_convex(std::move(out));
}

std::vector<Point> canonical_convex(std::vector<Point> poly) {
  // Drop consecutive duplicates.
  std::vector<Point> tmp;
  for (const auto& p : poly)
    if (tmp.empty() || tmp.back() != p) tmp.push_back(p);
  while (tmp.size() > 1 && tmp.front() == tmp.back()) tmp.pop_back();
  // Drop collinear midpoints.
  std::vector<Point> out;
  size_t n = tmp.size();
  if (n <= 2) {
    out = tmp;
  } else {
    for (size_t i = 0; i < n; ++i) {
      const Point& prev = tmp[(i + n - 1) % n];
      const Point& cur = tmp[i];
      const Point& nxt = tmp[(i + 1) % n];
      if (orient(prev, cur, nxt) != 0) out.push_back(cur);
    }
    if (out.empty()) {
      // All collinear: keep the two extreme points.
      auto cmp = [](const Point& u, const Point& v) {
        return u.x != v.x ? u.x < v.x : u.y < v.y;
      };
      auto [lo, hi] = std::minmax_element(tmp.begin(), tmp.end(), cmp);
      out = {*lo};
      if (*hi != *lo) out.push_back(*hi);
    }
  }
  // Canonical start: lexicographically smallest vertex first.
  if (out.size() > 1) {
    auto it = std::min_element(out.begin(), out.end(), [](const Point& u, const Point& v) {
      return u.x != v.x ? u.x < v.x : u.y < v.y;
    });
    std::rotate(out.begin(), it, out.end());
  }
  return out;
}

std::vector<Point> kernel_of_star_polygon(const std::vector<Point>& poly) {
  if (!is_simple_polygon(poly)) throw NonSimplePolygon("kernel_of_star_polygon: non-simple input");
  if (polygon_area2(poly) <= 0)
    throw NonSimplePolygon("kernel_of_star_polygon: polygon must be counterclockwise");
  BBox box = expand(bbox_of(poly), Rat(2));
  std::vector<Point> ker = box.corners();
  size_t n = poly.size();
  for (size_t i = 0; i < n && !ker.empty(); ++i) {
    Line edge = Line::through(poly[i], poly[(i + 1) % n]);
    // Keep the side on which the edge's left half-plane lies.
    Point probe = poly[i] + Point(poly[(i + 1) % n].y - poly[i].y, poly[i].x - poly[(i + 1) % n].x);
    // probe is to the right of the directed edge; keep the opposite sign.
    int right_sign = side_of_line(edge, probe);
    ker = clip_convex_halfplane(ker, edge, right_sign < 0);
  }
  if (!ker.empty() && polygon_area2(ker) < 0) std::reverse(ker.begin(), ker.end());
  return canonical_convex(std::move(ker));
}

std::vector<Point> BBox::corners() const {
  return {Point(xmin, ymin), Point(xmax, ymin), Point(xmax, ymax), Point(xmin, ymax)};
}

bool BBox::contains_strict(const Point& p) const {
  return xmin < p.x && p.x < xmax && ymin < p.y && p.y < ymax;
}

BBox bbox_of(const std::vector<Point>& pts) {
  if (pts.empty()) return BBox{Rat(-1), Rat(-1), Rat(1), Rat(1)};
  BBox b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& p : pts) {
    b.xmin = std::min(b.xmin, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.xmax = std::max(b.xmax, p.x);
    b.ymax = std::max(b.ymax, p.y);
  }
  return b;
}

BBox expand(const BBox& box, const Rat& factor) {
  Rat cx = (box.xmin + box.xmax) / 2;
  Rat cy = (box.ymin + box.ymax) / 2;
  Rat hx = (box.xmax - box.xmin) / 2;
  Rat hy = (box.ymax - box.ymin) / 2;
  if (hx == 0) hx = 1;
  if (hy == 0) hy = 1;
  hx *= factor;
  hy *= factor;
  return BBox{cx - hx, cy - hy, cx + hx, cy + hy};
}

}  // namespace aligned

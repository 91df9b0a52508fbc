#include "doctest.h"

#include <random>

#include "aligned/geometry.hpp"
#include "oracles.hpp"

using namespace aligned;
namespace at = aligned::testing;

namespace {
Point P(int x, int y) { return Point(Rat(x), Rat(y)); }
}

TEST_CASE("rational text round-trip") {
  CHECK(rat_to_string(Rat(3)) == "3");
  CHECK(rat_to_string(Rat(-7, 2)) == "-7/2");
  CHECK(rat_from_string("5/10") == Rat(1, 2));
  CHECK(rat_from_string("-1.25") == Rat(-5, 4));
  CHECK_THROWS_AS(rat_from_string("1/0"), ParseError);
  CHECK_THROWS_AS(rat_from_string("x"), ParseError);
}

TEST_CASE("orient basic") {
  CHECK(orient(P(0, 0), P(1, 0), P(0, 1)) == 1);
  CHECK(orient(P(0, 0), P(1, 1), P(2, 2)) == 0);
  CHECK(orient(P(0, 0), P(0, 1), P(1, 0)) == -1);
}

TEST_CASE("orient antisymmetry under argument swaps") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Point a(at::random_rat(rng, -5, 5), at::random_rat(rng, -5, 5));
    Point b(at::random_rat(rng, -5, 5), at::random_rat(rng, -5, 5));
    Point c(at::random_rat(rng, -5, 5), at::random_rat(rng, -5, 5));
    int o = orient(a, b, c);
    CHECK(orient(b, a, c) == -o);
    CHECK(orient(a, c, b) == -o);
    CHECK(orient(c, b, a) == -o);
  }
}

TEST_CASE("side_of_line") {
  Line x0(Rat(1), Rat(0), Rat(0));
  CHECK(side_of_line(x0, P(2, 5)) == 1);
  CHECK(side_of_line(x0, P(0, 7)) == 0);
  CHECK(side_of_line(x0, P(-1, 0)) == -1);

  // y = x, normalized; reflecting across the line flips the sign.
  Line diag = Line::through(P(0, 0), P(1, 1));
  Point p(Rat(1), Rat(0));
  Point refl(Rat(0), Rat(1));
  CHECK(side_of_line(diag, p) == -side_of_line(diag, refl));
  CHECK(side_of_line(diag, p) == Rat(diag.a * 1 + diag.b * 0 + diag.c).sign());
}

TEST_CASE("line normalization is canonical") {
  Line a(Rat(2), Rat(-4), Rat(6));
  Line b(Rat(-1), Rat(2), Rat(-3));
  CHECK(a == b);
  CHECK(a.a == 1);
  Line c(Rat(0), Rat(-3), Rat(9));
  CHECK(c.b == 1);
  CHECK(c.c == -3);
}

TEST_CASE("segment_intersection") {
  auto r = segment_intersection(P(0, 0), P(2, 2), P(0, 2), P(2, 0));
  REQUIRE(r.kind == SegXKind::At);
  CHECK(r.at == P(1, 1));

  CHECK(segment_intersection(P(0, 0), P(1, 0), P(0, 1), P(1, 1)).kind == SegXKind::None);
  CHECK(segment_intersection(P(0, 0), P(2, 0), P(1, 0), P(3, 0)).kind == SegXKind::Overlap);

  // Collinear, touching in one point.
  auto touch = segment_intersection(P(0, 0), P(1, 0), P(1, 0), P(2, 0));
  REQUIRE(touch.kind == SegXKind::At);
  CHECK(touch.at == P(1, 0));

  // T-junction.
  auto tj = segment_intersection(P(0, 0), P(2, 0), P(1, -1), P(1, 0));
  REQUIRE(tj.kind == SegXKind::At);
  CHECK(tj.at == P(1, 0));

  CHECK_THROWS_AS(segment_intersection(P(0, 0), P(0, 0), P(1, 0), P(2, 0)), DegenerateSegment);
}

TEST_CASE("line_intersection") {
  Line x0(Rat(1), Rat(0), Rat(0));
  Line y0(Rat(0), Rat(1), Rat(0));
  auto o = line_intersection(x0, y0);
  REQUIRE(o.has_value());
  CHECK(*o == P(0, 0));

  Line x1(Rat(1), Rat(0), Rat(-1));
  CHECK(!line_intersection(x0, x1).has_value());

  // x + y = 2 with x - y = 0 meet at (1, 1).
  auto q = line_intersection(Line(Rat(1), Rat(1), Rat(-2)), Line(Rat(1), Rat(-1), Rat(0)));
  REQUIRE(q.has_value());
  CHECK(*q == P(1, 1));

  CHECK_THROWS_AS(line_intersection(x0, Line(Rat(2), Rat(0), Rat(0))), IdenticalLines);
}

TEST_CASE("segment crossing a line meets it exactly once") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Line l(at::random_rat(rng, -3, 3), at::random_rat(rng, 1, 3), at::random_rat(rng, -3, 3));
    Point p(at::random_rat(rng, -8, 8), at::random_rat(rng, -8, 8));
    Point q(at::random_rat(rng, -8, 8), at::random_rat(rng, -8, 8));
    if (side_of_line(l, p) != 1 || side_of_line(l, q) != -1) continue;
    auto x = line_intersection(l, Line::through(p, q));
    REQUIRE(x.has_value());
    CHECK(side_of_line(l, *x) == 0);
    CHECK(on_segment(p, *x, q));
  }
}

TEST_CASE("kernel of convex polygon is the polygon") {
  std::vector<Point> sq = {P(0, 0), P(1, 0), P(1, 1), P(0, 1)};
  CHECK(kernel_of_star_polygon(sq) == canonical_convex(sq));
}

TEST_CASE("kernel of L-shaped hexagon") {
  std::vector<Point> ell = {P(0, 0), P(2, 0), P(2, 1), P(1, 1), P(1, 2), P(0, 2)};
  auto ker = kernel_of_star_polygon(ell);
  auto expect = canonical_convex({P(0, 0), P(1, 0), P(1, 1), P(0, 1)});
  CHECK(ker == expect);
  CHECK(ker == at::kernel_oracle(ell));
}

TEST_CASE("kernel of non-star comb polygon is empty") {
  // Two deep teeth; no point sees into both.
  std::vector<Point> comb = {P(0, 0), P(8, 0), P(8, 4),  P(7, 4), P(7, 1),
                             P(5, 1), P(5, 4), P(3, 4), P(3, 1), P(1, 1), P(1, 4), P(0, 4)};
  REQUIRE(is_simple_polygon(comb));
  auto ker = kernel_of_star_polygon(comb);
  CHECK(ker.empty());
  CHECK(at::kernel_oracle(comb).empty());
}

TEST_CASE("kernel rejects bad input") {
  std::vector<Point> bowtie = {P(0, 0), P(2, 2), P(2, 0), P(0, 2)};
  CHECK_THROWS_AS(kernel_of_star_polygon(bowtie), NonSimplePolygon);
  std::vector<Point> cw = {P(0, 0), P(0, 1), P(1, 1), P(1, 0)};
  CHECK_THROWS_AS(kernel_of_star_polygon(cw), NonSimplePolygon);
}

TEST_CASE("kernel matches oracle on random simple polygons") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 60; ++i) {
    auto poly = at::random_simple_polygon(rng, 4 + int(i % 7));
    auto ker = kernel_of_star_polygon(poly);
    auto ref = at::kernel_oracle(poly);
    CHECK(ker == ref);
    if (ker.size() >= 3) {
      // A kernel interior point sees every vertex: the segment to each vertex
      // may touch the boundary but never crosses to the outside.
      Point c = polygon_centroid(ker);
      size_t n = poly.size();
      for (size_t e = 0; e < n; ++e) {
        CHECK(orient(c, poly[e], poly[(e + 1) % n]) >= 0);
      }
    }
  }
}

TEST_CASE("point_in_convex") {
  std::vector<Point> sq = {P(0, 0), P(1, 0), P(1, 1), P(0, 1)};
  CHECK(point_in_convex(sq, Point(Rat(1, 2), Rat(1, 2))) == Location::Inside);
  CHECK(point_in_convex(sq, Point(Rat(0), Rat(1, 2))) == Location::Boundary);
  CHECK(point_in_convex(sq, P(2, 0)) == Location::Outside);
  CHECK(point_in_convex(sq, P(0, 0)) == Location::Boundary);
}

TEST_CASE("clip and bbox helpers") {
  std::vector<Point> sq = {P(-10, -10), P(10, -10), P(10, 10), P(-10, 10)};
  // Quadrant clip: x >= 0 then y >= 0.
  auto half = clip_convex_halfplane(sq, Line(Rat(1), Rat(0), Rat(0)), true);
  auto quad = clip_convex_halfplane(half, Line(Rat(0), Rat(1), Rat(0)), true);
  CHECK(quad == canonical_convex({P(0, 0), P(10, 0), P(10, 10), P(0, 10)}));
  CHECK(polygon_area2(quad) == Rat(200));

  // Keep x <= -20: misses the quad entirely.
  auto empty = clip_convex_halfplane(quad, Line(Rat(1), Rat(0), Rat(20)), false);
  CHECK(polygon_area2(empty) == 0);

  BBox b = bbox_of({P(1, 2), P(-3, 4)});
  CHECK(b.xmin == -3);
  CHECK(b.xmax == 1);
  CHECK(b.contains_strict(P(0, 3)));
  CHECK(!b.contains_strict(P(1, 3)));
}

TEST_CASE("polygon centroid of a triangle") {
  std::vector<Point> tri = {P(0, 0), P(3, 0), P(0, 3)};
  CHECK(polygon_centroid(tri) == P(1, 1));
}

#include "doctest.h"

#include <algorithm>

#include "aligned/overlay.hpp"
#include "aligned/validate.hpp"
#include "oracles.hpp"

using namespace aligned;
using namespace aligned::testing;

namespace {

Point P(long long x, long long y) { return Point(Rat(x), Rat(y)); }

struct Fixture {
  AlignedGraph ag;
  AlignedDrawing d;
};

// Builds the combinatorial aligned graph by reading a reference drawing, so
// the drawing is correct for it by construction.
Fixture make_fixture(const std::vector<Point>& pts,
                     const std::vector<std::pair<VertexId, VertexId>>& edges,
                     const std::vector<VertexId>& outer, const LineArrangement& arr) {
  auto g = embed_from_points(pts, edges, outer);
  Overlay ov = Overlay::from_geometry(g, pts, arr);
  auto ex = ov.export_aligned();
  Fixture f;
  f.ag = ex.ag;
  f.d.arr = arr;
  f.d.pos.resize(ex.vertex_of.size());
  for (size_t nv = 0; nv < ex.vertex_of.size(); ++nv) f.d.pos[nv] = pts[ex.vertex_of[nv]];
  return f;
}

Fixture straddling_triangle() {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};  // y = 0
  return make_fixture({P(-2, 1), P(2, 1), P(0, -2)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 1, 2}, arr);
}

bool has_property(const ValidationReport& rep, int prop) {
  for (const auto& v : rep.violations)
    if (v.property == prop) return true;
  return false;
}

Point affine(const Point& p) {
  // (x, y) -> (2x + y + 1, x + 3y - 2), determinant 5 > 0.
  return Point(Rat(2) * p.x + p.y + Rat(1), p.x + Rat(3) * p.y - Rat(2));
}

Line affine(const Line& l) {
  Point p = l.origin();
  Point q = p + l.direction();
  return Line::through(affine(p), affine(q));
}

}  // namespace

TEST_CASE("a reference drawing validates") {
  Fixture f = straddling_triangle();
  auto rep = check_aligned_drawing(f.ag, f.d);
  CHECK(rep.pass());
  CHECK(rep.str() == "pass\n");
}

TEST_CASE("an aligned vertex nudged off its line fails") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};
  Fixture f = make_fixture({P(0, 0), P(-2, 2), P(2, 2)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 1, 2}, arr);
  VertexId a = -1;
  for (VertexId v : f.ag.graph.vertex_ids())
    if (!f.ag.cls.vertex_lines[v].empty()) a = v;
  REQUIRE(a != -1);

  f.d.pos[a].y += Rat(1, 1000000);
  auto rep = check_aligned_drawing(f.ag, f.d);
  CHECK(!rep.pass());
  CHECK(has_property(rep, 3));
  CHECK(rep.str().find("fail(") != std::string::npos);
}

TEST_CASE("crossings out of order along a line fail property v") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};
  // Zigzag path crossed three times, left to right.
  Fixture f = make_fixture({P(-3, 2), P(-1, -2), P(1, 2), P(3, -2)},
                           {{0, 1}, {1, 2}, {2, 3}}, {0, 1, 2, 3, 2, 1}, arr);
  // Claim a different crossing order combinatorially: swap the first two
  // edge-crossing events of the trace.
  auto traces = f.ag.traces;
  std::vector<int> xpos;
  for (int i = 0; i < int(traces[0].events.size()); ++i)
    if (traces[0].events[i].kind == TraceEvent::Kind::CrossEdge) xpos.push_back(i);
  REQUIRE(xpos.size() == 3);
  std::swap(traces[0].events[xpos[0]].id, traces[0].events[xpos[1]].id);
  AlignedGraph swapped = AlignedGraph::make(f.ag.graph, f.ag.system, traces);

  auto rep = check_aligned_drawing(swapped, f.d);
  CHECK(!rep.pass());
  CHECK(has_property(rep, 5));
  CHECK(!has_property(rep, 2));
}

TEST_CASE("check_planar_straightline on K4") {
  std::vector<Point> pts = {P(0, 0), P(4, 0), P(2, 4), P(2, 1)};
  auto g = embed_from_points(
      pts, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}}, {0, 2, 1});
  AlignedDrawing d;
  d.pos = pts;
  CHECK(check_planar_straightline(g, d).empty());

  // Pull the center below the base: spokes now cross the base edge.
  d.pos[3] = P(2, -2);
  auto wit = check_planar_straightline(g, d);
  CHECK(!wit.empty());
  bool crossing = false;
  for (const auto& w : wit)
    if (w.detail == "edges cross" && w.at) crossing = true;
  CHECK(crossing);
}

TEST_CASE("one-bend drawings validate through bend folding") {
  LineArrangement arr;
  arr.lines = {Line(Rat(1), Rat(0), Rat(0)), Line(Rat(0), Rat(1), Rat(0))};
  // One edge anchored to both axes.
  Fixture f = make_fixture({P(0, 2), P(2, 0)}, {{0, 1}}, {0, 1}, arr);

  SUBCASE("straight version passes") {
    CHECK(check_aligned_drawing(f.ag, f.d).pass());
  }
  SUBCASE("a bend off both lines passes") {
    f.d.bend[0] = P(2, 2);
    auto rep = check_aligned_drawing(f.ag, f.d);
    CHECK(rep.pass());
  }
  SUBCASE("a bend on a line makes a piece aligned and fails") {
    f.d.bend[0] = P(0, 1);
    auto rep = check_aligned_drawing(f.ag, f.d);
    CHECK(!rep.pass());
    CHECK(has_property(rep, 3));
  }
}

TEST_CASE("a bend on a crossed edge keeps the crossing on the right piece") {
  LineArrangement arr;
  arr.lines = {Line(Rat(1), Rat(0), Rat(0))};  // x = 0
  Fixture f = make_fixture({P(-2, 1), P(2, 1)}, {{0, 1}}, {0, 1}, arr);
  f.d.bend[0] = P(1, 3);
  auto rep = check_aligned_drawing(f.ag, f.d);
  CHECK(rep.pass());
}

TEST_CASE("a mirrored drawing fails the embedding check") {
  Fixture f = straddling_triangle();
  for (Point& p : f.d.pos) p.x = -p.x;
  auto rep = check_aligned_drawing(f.ag, f.d);
  CHECK(!rep.pass());
  CHECK(has_property(rep, 2));
}

TEST_CASE("verdicts are invariant under orientation-preserving affine maps") {
  Fixture f = straddling_triangle();
  for (Point& p : f.d.pos) p = affine(p);
  for (Line& l : f.d.arr.lines) l = affine(l);
  CHECK(check_aligned_drawing(f.ag, f.d).pass());

  // The failing perturbation stays a failure of the same property.
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};
  Fixture g = make_fixture({P(0, 0), P(-2, 2), P(2, 2)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 1, 2}, arr);
  VertexId a = -1;
  for (VertexId v : g.ag.graph.vertex_ids())
    if (!g.ag.cls.vertex_lines[v].empty()) a = v;
  g.d.pos[a].y += Rat(1, 1000000);
  for (Point& p : g.d.pos) p = affine(p);
  for (Line& l : g.d.arr.lines) l = affine(l);
  auto rep = check_aligned_drawing(g.ag, g.d);
  CHECK(!rep.pass());
  CHECK(has_property(rep, 3));
}

TEST_CASE("a corrupted recorded bijection fails property i") {
  Fixture f = straddling_triangle();
  CellBijection cb = match_cells(f.ag.system, f.d.arr);
  cb.side_flip[0] = -cb.side_flip[0];
  f.d.phi = cb;
  auto rep = check_aligned_drawing(f.ag, f.d);
  CHECK(!rep.pass());
  CHECK(has_property(rep, 1));
}

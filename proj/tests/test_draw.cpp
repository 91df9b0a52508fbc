#include "doctest.h"

#include <algorithm>
#include <random>

#include "aligned/draw.hpp"
#include "aligned/overlay.hpp"
#include "aligned/validate.hpp"
#include "oracles.hpp"

using namespace aligned;
using namespace aligned::testing;

namespace {

Point P(long long x, long long y) { return Point(Rat(x), Rat(y)); }

// Builds an aligned instance by reading the combinatorics off a straight-line
// reference drawing.
Overlay::Export instance(const std::vector<Point>& pts,
                         const std::vector<std::pair<int, int>>& edges,
                         const std::vector<VertexId>& outer, const LineArrangement& arr) {
  auto g = embed_from_points(pts, edges, outer);
  return Overlay::from_geometry(g, pts, arr).export_aligned();
}

// Exact straight-line drawing of a triangulation with a fixed outer triangle;
// the barycentric solution of a triangulation with a convex outer face is
// planar, so this yields certified reference positions.
std::vector<Point> reference_positions(const EmbeddedGraph& g) {
  std::vector<VertexId> W;
  for (HalfEdge h : g.outer_walk()) W.push_back(g.origin(h));
  REQUIRE(W.size() == 3);
  // outer walks run clockwise, so list the triangle accordingly
  std::map<VertexId, Point> fixed = {
      {W[0], P(-8, -5)}, {W[1], P(0, 9)}, {W[2], P(8, -5)}};
  auto sol = tutte_solve(g, fixed);
  std::vector<Point> pts(g.vertex_ids().size(), P(0, 0));
  for (auto& [v, pt] : sol) pts[v] = pt;
  return pts;
}

void check_residual_zero(const EmbeddedGraph& g, const std::map<VertexId, Point>& fixed,
                         const std::map<VertexId, Point>& sol) {
  for (VertexId v : g.vertex_ids()) {
    if (fixed.count(v)) continue;
    Rat sx(0), sy(0), deg(0);
    for (VertexId w : g.neighbors_ccw(v)) {
      sx += sol.at(w).x;
      sy += sol.at(w).y;
      deg += 1;
    }
    CHECK(sol.at(v).x * deg == sx);
    CHECK(sol.at(v).y * deg == sy);
  }
}

}  // namespace

TEST_CASE("barycentric solve: one vertex in the unit square") {
  // square cycle with a center vertex adjacent to all four corners
  std::vector<Point> pts = {P(0, 0), P(1, 0), P(1, 1), P(0, 1), P(0, 0)};
  pts[4] = Point(Rat(1, 2), Rat(1, 3));  // anywhere inside
  auto g = embed_from_points(pts, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 0}, {4, 1}, {4, 2}, {4, 3}},
                             {0, 3, 2, 1});
  std::map<VertexId, Point> fixed = {{0, P(0, 0)}, {1, P(1, 0)}, {2, P(1, 1)}, {3, P(0, 1)}};
  auto sol = tutte_solve(g, fixed);
  CHECK(sol.at(4) == Point(Rat(1, 2), Rat(1, 2)));
  check_residual_zero(g, fixed, sol);
}

TEST_CASE("barycentric solve: a two-vertex path lands on the thirds") {
  // path 0-1-2-3 with the ends fixed
  std::vector<std::vector<VertexId>> rot = {{1}, {0, 2}, {1, 3}, {2}};
  auto g = EmbeddedGraph::from_rotations(rot, {0, 1, 2, 3, 2, 1});
  std::map<VertexId, Point> fixed = {{0, P(0, 0)}, {3, P(9, 3)}};
  auto sol = tutte_solve(g, fixed);
  CHECK(sol.at(1) == P(3, 1));
  CHECK(sol.at(2) == P(6, 2));
}

TEST_CASE("barycentric solve: no fixed vertex is singular") {
  std::vector<std::vector<VertexId>> rot = {{1}, {0}};
  auto g = EmbeddedGraph::from_rotations(rot, {0, 1});
  CHECK_THROWS_AS(tutte_solve(g, {}), SingularSystem);
}

TEST_CASE("fixed outer face: random triangulations across one line") {
  std::mt19937_64 rng(20240817);
  int drawn = 0;
  for (int it = 0; it < 10; ++it) {
    auto g = random_triangulation(rng, 5 + int(rng() % 5));
    auto pts = reference_positions(g);
    LineArrangement arr;
    arr.lines = {Line(Rat(0), Rat(7), Rat(-1))};  // y = 1/7
    Overlay::Export ex;
    try {
      ex = Overlay::from_geometry(g, pts, arr).export_aligned();
    } catch (const Error&) {
      continue;  // a vertex or edge degenerate against the line
    }
    if (!is_proper(ex.ag).yes) continue;

    ConvexOuterFace outer;
    for (HalfEdge h : ex.ag.graph.outer_walk()) {
      VertexId v = ex.ag.graph.origin(h);
      outer.cycle.push_back(v);
      outer.pos.push_back(pts[ex.vertex_of[v]]);
    }
    AlignedDrawing d = draw_one_line(ex.ag, outer, arr.lines[0]);
    for (size_t i = 0; i < outer.cycle.size(); ++i)
      CHECK(d.pos[outer.cycle[i]] == outer.pos[i]);  // preserved bit-exactly
    CHECK(check_aligned_drawing(ex.ag, d).pass());
    ++drawn;
  }
  CHECK(drawn >= 5);
}

TEST_CASE("fixed outer face: wheel with the hub on the line") {
  std::vector<Point> pts = {P(-4, -3), P(4, -3), P(5, 2), P(0, 5), P(-5, 2),
                            Point(Rat(1, 2), Rat(0))};
  std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0},
                                            {5, 0}, {5, 1}, {5, 2}, {5, 3}, {5, 4}};
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};  // y = 0 through the hub
  auto ex = instance(pts, edges, {0, 4, 3, 2, 1}, arr);
  REQUIRE(is_proper(ex.ag).yes);

  ConvexOuterFace outer;
  for (HalfEdge h : ex.ag.graph.outer_walk()) {
    VertexId v = ex.ag.graph.origin(h);
    outer.cycle.push_back(v);
    outer.pos.push_back(pts[ex.vertex_of[v]]);
  }
  AlignedDrawing d = draw_one_line(ex.ag, outer, arr.lines[0]);
  // the hub is the unique aligned vertex; it must sit on the line
  for (VertexId v : ex.ag.graph.vertex_ids())
    if (!ex.ag.cls.vertex_lines[v].empty()) CHECK(d.pos[v].y == 0);
}

TEST_CASE("fixed outer face: wrong inputs are rejected") {
  auto g = embed_from_points({P(-2, 1), P(2, 1), P(0, -2)}, {{0, 1}, {0, 2}, {1, 2}},
                             {0, 1, 2});
  LineArrangement one;
  one.lines = {Line(Rat(0), Rat(1), Rat(0))};
  auto ex = Overlay::from_geometry(g, {P(-2, 1), P(2, 1), P(0, -2)}, one).export_aligned();
  ConvexOuterFace outer;
  for (HalfEdge h : ex.ag.graph.outer_walk()) {
    VertexId v = ex.ag.graph.origin(h);
    outer.cycle.push_back(v);
    outer.pos.push_back(Point(Rat(0), Rat(0)));
  }
  // two lines: not a single-line instance
  LineArrangement two;
  two.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  auto ex2 = instance({P(-2, 1), P(2, 1), P(1, 4)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1}, two);
  ConvexOuterFace any;
  CHECK_THROWS_AS(draw_one_line(ex2.ag, any, two.lines[0]), NotOneAligned);
  // mangled outer cycle
  ConvexOuterFace bad = outer;
  bad.cycle.pop_back();
  bad.pos.pop_back();
  CHECK_THROWS_AS(draw_one_line(ex.ag, bad, one.lines[0]), DrawError);
}

TEST_CASE("straight-line drawing across one line, several instances") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};
  // triangle straddling the line
  auto ex = instance({P(-2, 1), P(2, 1), P(0, -2)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 1, 2}, arr);
  AlignedDrawing d = draw_k_aligned(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  // zigzag path crossed three times (not biconnected, not triangulated)
  auto ex2 = instance({P(-3, 2), P(-1, -2), P(1, 2), P(3, -2)}, {{0, 1}, {1, 2}, {2, 3}},
                      {0, 1, 2, 3, 2, 1}, arr);
  AlignedDrawing d2 = draw_k_aligned(ex2.ag, arr);
  CHECK(check_aligned_drawing(ex2.ag, d2).pass());
  CHECK(d2.bends() == 0);
}

TEST_CASE("straight-line drawing with two lines") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  // hub on both lines, triangle around it
  auto ex = instance({P(0, 0), P(3, 1), P(-3, 2), P(1, -3)},
                     {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}, {3, 1}}, {1, 2, 3}, arr);
  AlignedDrawing d = draw_k_aligned(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  // aligned edge crossed at the lines' own intersection
  auto ex2 = instance({P(-2, 0), P(2, 0), P(1, 3)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1}, arr);
  AlignedDrawing d2 = draw_k_aligned(ex2.ag, arr);
  CHECK(check_aligned_drawing(ex2.ag, d2).pass());
}

TEST_CASE("straight-line drawing: random instances, two and three lines") {
  std::mt19937_64 rng(987654);
  int drawn = 0;
  for (int it = 0; it < 12; ++it) {
    auto g = random_triangulation(rng, 5 + int(rng() % 4));
    auto pts = reference_positions(g);
    LineArrangement arr;
    arr.lines = {Line(Rat(0), Rat(7), Rat(-1)), Line(Rat(9), Rat(1), Rat(-2))};
    if (it % 3 == 0) arr.lines.push_back(Line(Rat(1), Rat(-8), Rat(3)));
    Overlay::Export ex;
    try {
      ex = Overlay::from_geometry(g, pts, arr).export_aligned();
    } catch (const Error&) {
      continue;
    }
    if (!alignment_complexity(ex.ag).leq({1, 0, kNoEdges})) continue;
    AlignedDrawing d = draw_k_aligned(ex.ag, arr);
    CHECK(check_aligned_drawing(ex.ag, d).pass());
    ++drawn;
  }
  CHECK(drawn >= 4);
}

TEST_CASE("drawing is deterministic") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  auto ex = instance({P(0, 0), P(3, 1), P(-3, 2), P(1, -3)},
                     {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}, {3, 1}}, {1, 2, 3}, arr);
  AlignedDrawing d1 = draw_k_aligned(ex.ag, arr);
  AlignedDrawing d2 = draw_k_aligned(ex.ag, arr);
  REQUIRE(d1.pos.size() == d2.pos.size());
  for (size_t i = 0; i < d1.pos.size(); ++i) CHECK(d1.pos[i] == d2.pos[i]);
}

TEST_CASE("complexity gate on the straight-line drawer") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  // edge crossing both lines: complexity (2,-,-)
  auto ex = instance({P(-3, -1), P(2, 3), P(-1, 4)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1}, arr);
  CHECK_THROWS_AS(draw_k_aligned(ex.ag, arr), ComplexityViolation);
}

TEST_CASE("crossing-free drawing: blob in one cell") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  // K4 strictly inside the first quadrant
  auto ex = instance({P(2, 2), P(8, 2), P(5, 8), P(5, 4)},
                     {{0, 1}, {1, 2}, {2, 0}, {3, 0}, {3, 1}, {3, 2}}, {0, 2, 1}, arr);
  AlignedDrawing d = draw_complexity_000(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  for (VertexId v : ex.ag.graph.vertex_ids()) {
    CHECK(d.pos[v].x > 0);
    CHECK(d.pos[v].y > 0);
  }
}

TEST_CASE("crossing-free drawing: aligned edge keeps its order") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};
  auto ex = instance({P(-2, 0), P(2, 0)}, {{0, 1}}, {0, 1}, arr);
  AlignedDrawing d = draw_complexity_000(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  CHECK(d.pos[0].y == 0);
  CHECK(d.pos[1].y == 0);
  CHECK(d.pos[0] != d.pos[1]);
}

TEST_CASE("crossing-free drawing: hub on an intersection") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  // hub at the origin, triangle inside the first quadrant
  auto ex = instance({P(0, 0), P(3, 1), P(1, 3), P(4, 4)},
                     {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}, {0, 2, 3, 1}, arr);
  AlignedDrawing d = draw_complexity_000(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  CHECK(d.pos[ex.vertex_to.at(0)] == P(0, 0));  // intersection vertex pinned exactly
}

TEST_CASE("crossing-free drawing: edge anchored on both lines") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  // chord of the first quadrant from the y-axis to the x-axis
  auto ex = instance({P(0, 2), P(3, 0)}, {{0, 1}}, {0, 1}, arr);
  AlignedDrawing d = draw_complexity_000(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  CHECK(d.pos[ex.vertex_to.at(0)].x == 0);
  CHECK(d.pos[ex.vertex_to.at(1)].y == 0);
}

TEST_CASE("crossing-free drawing rejects crossed instances") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};
  auto ex = instance({P(-2, 1), P(2, 1), P(0, -2)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 1, 2}, arr);
  CHECK_THROWS_AS(draw_complexity_000(ex.ag, arr), ComplexityViolation);
}

TEST_CASE("one bend: an edge anchored on both lines gets exactly one bend") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  auto ex = instance({P(0, 2), P(3, 0)}, {{0, 1}}, {0, 1}, arr);
  AlignedDrawing d = draw_two_aligned_one_bend(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  CHECK(d.bends() == 1);
}

TEST_CASE("one bend: straight-line instances come out without bends") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  auto ex = instance({P(0, 0), P(3, 1), P(-3, 2), P(1, -3)},
                     {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}, {3, 1}}, {1, 2, 3}, arr);
  AlignedDrawing d = draw_two_aligned_one_bend(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  CHECK(d.bends() == 0);
}

TEST_CASE("one bend: an edge crossing both lines") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  // triangle with one edge through two cells
  auto ex = instance({P(-3, -1), P(2, 3), P(-1, 4)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1}, arr);
  AlignedDrawing d = draw_two_aligned_one_bend(ex.ag, arr);
  CHECK(check_aligned_drawing(ex.ag, d).pass());
  CHECK(d.bends() >= 1);
}

TEST_CASE("reduction handle on hand-built instances") {
  LineArrangement far;
  far.lines = {Line(Rat(0), Rat(1), Rat(50))};  // y = -50, away from everything
  // K4: the hub-corner edges are interior and free
  auto ex = instance({P(-4, -4), P(4, -4), P(0, 6), P(0, 0)},
                     {{0, 1}, {1, 2}, {2, 0}, {3, 0}, {3, 1}, {3, 2}}, {0, 2, 1}, far);
  auto r = find_reducible_edge(ex.ag);
  CHECK(r.kind == ReducibleEdge::Kind::FreeEdge);
  // wheel with an aligned hub: spokes are anchored, nothing contracts
  LineArrangement through;
  through.lines = {Line(Rat(0), Rat(1), Rat(0))};
  auto ex2 = instance({P(-4, -4), P(4, -4), P(5, 3), P(-5, 3), P(0, 0)},
                      {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 0}, {4, 1}, {4, 2}, {4, 3}},
                      {0, 3, 2, 1}, through);
  auto r2 = find_reducible_edge(ex2.ag);
  CHECK(r2.kind == ReducibleEdge::Kind::BaseCase);
}

TEST_CASE("reduction handle prefers separating triangles") {
  std::mt19937_64 rng(4242);
  LineArrangement far;
  far.lines = {Line(Rat(0), Rat(1), Rat(50))};
  for (int it = 0; it < 6; ++it) {
    auto g = random_triangulation(rng, 8);
    auto pts = reference_positions(g);
    auto ex = Overlay::from_geometry(g, pts, far).export_aligned();
    auto r = find_reducible_edge(ex.ag);
    auto tris = ex.ag.graph.separating_triangles();
    if (!tris.empty())
      CHECK(r.kind == ReducibleEdge::Kind::SepTriangle);
    else
      CHECK(r.kind != ReducibleEdge::Kind::SepTriangle);
  }
}

TEST_CASE("re-inserting a contracted vertex") {
  LineArrangement far;
  far.lines = {Line(Rat(0), Rat(1), Rat(50))};
  auto ex = instance({P(-4, -4), P(4, -4), P(0, 6), P(0, 0)},
                     {{0, 1}, {1, 2}, {2, 0}, {3, 0}, {3, 1}, {3, 2}}, {0, 2, 1}, far);
  auto r = find_reducible_edge(ex.ag);
  REQUIRE(r.kind == ReducibleEdge::Kind::FreeEdge);
  auto [u, v] = ex.ag.graph.edge_ends(r.edge);

  // drawing of the contracted instance: only the surviving endpoint matters
  AlignedDrawing contracted;
  contracted.arr = far;
  contracted.pos.assign(4, P(0, 0));
  std::map<VertexId, Point> corner_pos = {{ex.vertex_to.at(0), P(-4, -4)},
                                          {ex.vertex_to.at(1), P(4, -4)},
                                          {ex.vertex_to.at(2), P(0, 6)},
                                          {ex.vertex_to.at(3), P(0, 0)}};
  for (auto& [vid, pt] : corner_pos) contracted.pos[vid] = pt;
  contracted.pos[v] = P(0, 0);  // forget the removed endpoint

  AlignedDrawing d = uncontract(ex.ag, r.edge, contracted);
  CHECK(d.pos[u] == corner_pos.at(u));
  CHECK(check_planar_straightline(ex.ag.graph, d).empty());
}

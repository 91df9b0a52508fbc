#include "doctest.h"

#include <set>

#include "aligned/alignedgraph.hpp"
#include "aligned/overlay.hpp"
#include "oracles.hpp"

using namespace aligned;
using namespace aligned::testing;

namespace {

Point P(long long x, long long y) { return Point(Rat(x), Rat(y)); }

// Independent classification straight from coordinates: aligned if both
// endpoints lie on the line, anchored per endpoint line memberships, crossed
// if the line meets the open interior.
EdgeClass classify_geometric(const Point& pu, const Point& pv, const std::vector<Line>& lines) {
  EdgeClass c;
  std::set<LineIdx> au, av;
  for (int i = 0; i < int(lines.size()); ++i) {
    int su = side_of_line(lines[i], pu), sv = side_of_line(lines[i], pv);
    if (su == 0 && sv == 0) c.aligned_line = i;
    if (su == 0) au.insert(i);
    if (sv == 0) av.insert(i);
  }
  for (int i = 0; i < int(lines.size()); ++i) {
    if (i == c.aligned_line) continue;
    int su = side_of_line(lines[i], pu), sv = side_of_line(lines[i], pv);
    if (su * sv < 0) c.crossings.push_back(i);
  }
  if (c.aligned_line >= 0) {
    au.erase(c.aligned_line);
    av.erase(c.aligned_line);
  }
  if (au.empty() && av.empty())
    c.anchors = 0;
  else if (au.empty() || av.empty())
    c.anchors = 1;
  else if (au == av && au.size() == 1)
    c.anchors = 1;
  else
    c.anchors = 2;
  return c;
}

void check_against_geometry(const Overlay::Export& ex, const std::vector<Point>& pts,
                            const std::vector<Line>& lines) {
  const AlignedGraph& ag = ex.ag;
  for (VertexId v : ag.graph.vertex_ids()) {
    std::vector<LineIdx> want;
    for (int i = 0; i < int(lines.size()); ++i)
      if (side_of_line(lines[i], pts[v]) == 0) want.push_back(i);
    CHECK(ag.cls.vertex_lines[v] == want);
  }
  for (EdgeId e : ag.graph.edge_ids()) {
    auto [u, v] = ag.graph.edge_ends(e);
    EdgeClass want = classify_geometric(pts[u], pts[v], lines);
    CAPTURE(e);
    CHECK(ag.cls.edge_class[e] == want);
  }
}

}  // namespace

TEST_CASE("trace grammar and validation on a triangle") {
  // Triangle a(0,0) b(2,0) c(1,1); faces: 0 = inner, 1 = outer.
  auto g = embed_from_points({P(0, 0), P(2, 0), P(1, 1)}, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1});
  REQUIRE(g.faces().size() == 2);
  REQUIRE(g.outer_face() == 1);

  PseudolineTrace t;
  t.line = 0;
  t.events = {ev_face(1), ev_cross_edge(0), ev_face(0), ev_through(2), ev_face(1)};
  CHECK(!validate_pseudoline_wrt_graph(g, t).has_value());

  SUBCASE("valid instance assembles") {
    PseudolineSystem s;
    s.k = 1;
    s.crossing_order.resize(1);
    auto ag = AlignedGraph::make(g, s, {t});
    CHECK(ag.cls.edge_class[0] == EdgeClass{-1, 0, {0}});  // ab crossed
    CHECK(ag.cls.vertex_lines[2] == std::vector<LineIdx>{0});
    CHECK(ag.cls.edge_class[1].anchors == 1);  // ac anchored at c
    CHECK(ag.cls.edge_class[2].anchors == 1);  // bc anchored at c
    CHECK(alignment_complexity(ag) == AlignmentComplexity{1, 0, kNoEdges});
    CHECK(alignment_complexity(ag).str() == "(1,0,_)");
  }
  SUBCASE("must start in the outer face") {
    PseudolineTrace bad = t;
    bad.events.front() = ev_face(0);
    CHECK(validate_pseudoline_wrt_graph(g, bad).has_value());
  }
  SUBCASE("elements need face corridors between them") {
    PseudolineTrace bad = t;
    bad.events.erase(bad.events.begin() + 2);
    CHECK(validate_pseudoline_wrt_graph(g, bad).has_value());
  }
  SUBCASE("an edge may be crossed at most once") {
    PseudolineTrace bad;
    bad.line = 0;
    bad.events = {ev_face(1), ev_cross_edge(0), ev_face(0),
                  ev_cross_edge(2), ev_face(1), ev_cross_edge(0), ev_face(0)};
    auto v = validate_pseudoline_wrt_graph(g, bad);
    REQUIRE(v.has_value());
  }
  SUBCASE("crossing must separate the incident faces") {
    PseudolineTrace bad = t;
    bad.events[2] = ev_face(1);  // claims to stay outside after crossing ab
    CHECK(validate_pseudoline_wrt_graph(g, bad).has_value());
  }
  SUBCASE("at most one touch per edge") {
    // Passing through both endpoints of an edge is not line-like.
    PseudolineTrace bad;
    bad.line = 0;
    bad.events = {ev_face(1), ev_through(0), ev_face(0), ev_through(1), ev_face(1)};
    CHECK(validate_pseudoline_wrt_graph(g, bad).has_value());
  }
  SUBCASE("trace count and order are enforced") {
    PseudolineSystem s;
    s.k = 1;
    s.crossing_order.resize(1);
    CHECK_THROWS_AS(AlignedGraph::make(g, s, {}), AlignedGraphError);
    PseudolineTrace wrong = t;
    wrong.line = 3;
    CHECK_THROWS_AS(AlignedGraph::make(g, s, {wrong}), AlignedGraphError);
  }
}

TEST_CASE("intersection vertex fixture has complexity (1,0,_)") {
  // Lines y=0 and x=0 meet at vertex a. Edge ab lies on y=0 and is anchored
  // through a's membership of x=0; edge ef is free and crossed once.
  std::vector<Point> pts = {P(0, 0), P(2, 0), P(1, 1), P(1, -1), P(3, 1), P(3, -1)};
  std::vector<std::pair<int, int>> edges = {{0, 1}, {0, 2}, {0, 3}, {1, 2},
                                            {1, 3}, {1, 4}, {1, 5}, {4, 5}};
  auto g = embed_from_points(pts, edges, {0, 2, 1, 4, 5, 1, 3});
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};

  Overlay ov = Overlay::from_geometry(g, pts, arr);
  ov.check_structure();
  auto ex = ov.export_aligned();
  check_against_geometry(ex, pts, arr.lines);
  CHECK(alignment_complexity(ex.ag) == AlignmentComplexity{1, 0, kNoEdges});
  CHECK(alignment_complexity(ex.ag).str() == "(1,0,_)");

  // The pseudoline system read off the overlay: the lines meet once, at a.
  CHECK(ex.ag.system.k == 2);
  CHECK(ex.ag.system.crossing_order[0] == std::vector<Group>{{1}});
  CHECK(ex.ag.system.crossing_order[1] == std::vector<Group>{{0}});

  // a is an intersection vertex.
  auto ea = ex.ag.graph.half_edge(0, 1);
  REQUIRE(ea.has_value());
  EdgeId ab = EmbeddedGraph::edge_of(*ea);
  CHECK(ex.ag.cls.edge_class[ab].aligned_line == 0);
  CHECK(ex.ag.cls.edge_class[ab].anchors == 1);
  CHECK(ex.ag.cls.vertex_lines[0] == std::vector<LineIdx>({0, 1}));

  // Cells: two generic lines make four cells, all unbounded.
  CHECK(ov.n_cells() == 4);
  std::set<std::vector<int>> signs(ov.cell_signs().begin(), ov.cell_signs().end());
  CHECK(signs == std::set<std::vector<int>>(
                     {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}));
}

TEST_CASE("tree fixture has complexity (2,1,0)") {
  // u(1,0) w(2,0) on y=0; v(0,1) on x=0; z, p, q free. uw is aligned, uv is
  // 2-anchored and uncrossed, wz crosses x=0 once, pq crosses both lines.
  std::vector<Point> pts = {P(1, 0), P(2, 0), P(0, 1), P(-1, 2),
                            Point(Rat(3), Rat(-2)), P(-1, 1)};
  // u=0 w=1 v=2 z=3 p=4 q=5
  std::vector<std::pair<int, int>> edges = {{0, 2}, {0, 1}, {1, 3}, {4, 5}, {5, 3}};
  auto rot = rotations_from_points(pts, edges);
  // A tree: the outer walk traverses every edge twice.
  auto g = EmbeddedGraph::from_rotations(rot, {2, 0, 1, 3, 5, 4, 5, 3, 1, 0});
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};

  Overlay ov = Overlay::from_geometry(g, pts, arr);
  ov.check_structure();
  auto ex = ov.export_aligned();
  check_against_geometry(ex, pts, arr.lines);
  CHECK(alignment_complexity(ex.ag) == AlignmentComplexity{2, 1, 0});
  CHECK(alignment_complexity(ex.ag).str() == "(2,1,0)");
  CHECK(ex.ag.graph.faces().size() == 1);
}

TEST_CASE("component floating inside a cell") {
  // A free triangle above the single line: no contact at all.
  std::vector<Point> pts = {P(0, 1), P(2, 1), P(1, 2)};
  auto g = embed_from_points(pts, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1});
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};  // y = 0

  Overlay ov = Overlay::from_geometry(g, pts, arr);
  ov.check_structure();
  CHECK(ov.n_cells() == 2);
  CHECK(ov.n_graph_faces() == 2);
  CHECK(ov.regions().size() == 4);  // outside, upper minus triangle, inside, lower
  for (const auto& r : ov.regions())
    if (r.cell >= 0) CHECK(r.cell_unbounded);

  auto ex = ov.export_aligned();
  CHECK(alignment_complexity(ex.ag) == AlignmentComplexity{0, kNoEdges, kNoEdges});
  CHECK(alignment_complexity(ex.ag).str() == "(0,_,_)");
  // The line's trace reports a single outer-face corridor.
  CHECK(ex.ag.traces[0].events ==
        std::vector<TraceEvent>{ev_face(ex.ag.graph.outer_face())});
  for (EdgeId e : ex.ag.graph.edge_ids()) CHECK(ex.ag.cls.edge_class[e].is_free());
}

TEST_CASE("proper check") {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};  // y = 0
  std::vector<Point> pts = {P(-2, 1), P(2, 1), P(0, -2)};
  auto g = embed_from_points(pts, {{0, 1}, {0, 2}, {1, 2}}, {0, 1, 2});

  SUBCASE("triangle straddling the line is proper") {
    auto ex = Overlay::from_geometry(g, pts, arr).export_aligned();
    auto pc = is_proper(ex.ag);
    CAPTURE(pc.reasons);
    CHECK(pc.yes);
  }
  SUBCASE("line missing the graph is not proper") {
    LineArrangement miss;
    miss.lines = {Line(Rat(0), Rat(1), Rat(-5))};  // y = 5, above everything
    auto ex = Overlay::from_geometry(g, pts, miss).export_aligned();
    auto pc = is_proper(ex.ag);
    CHECK(!pc.yes);
    CHECK(!pc.reasons.empty());
  }
  SUBCASE("crossed aligned edge is not proper") {
    std::vector<Point> qts = {P(-2, 0), P(2, 0), P(0, 2)};
    auto q = embed_from_points(qts, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1});
    LineArrangement two;
    two.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
    auto ex = Overlay::from_geometry(q, qts, two).export_aligned();
    auto pc = is_proper(ex.ag);
    CHECK(!pc.yes);
  }
}

TEST_CASE("rigid subdivision pins crossings of aligned edges") {
  // Edge uw on y=0, crossed by x=0 in its interior.
  std::vector<Point> pts = {P(-1, 0), P(1, 0)};
  auto g = embed_from_points(pts, {{0, 1}}, {0, 1});
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};

  auto ex = Overlay::from_geometry(g, pts, arr).export_aligned();
  EdgeId uw = 0;
  CHECK(ex.ag.cls.edge_class[uw].aligned_line == 0);
  CHECK(ex.ag.cls.edge_class[uw].crossings == std::vector<LineIdx>{1});
  CHECK(ex.ag.aligned_edge_cross_order.at(uw) == std::vector<Group>{{1}});

  auto rs = rigid_subdivision(ex.ag);
  CHECK(rs.new_vertices.size() == 1);
  REQUIRE(rs.edge_pieces.at(uw).size() == 2);
  VertexId mid = rs.new_vertices[0];
  auto ml = rs.ag.cls.vertex_lines[mid];
  CHECK(ml == std::vector<LineIdx>({0, 1}));
  for (EdgeId p : rs.edge_pieces.at(uw)) {
    CHECK(rs.ag.cls.edge_class[p].aligned_line == 0);
    CHECK(rs.ag.cls.edge_class[p].crossings.empty());
    CHECK(rs.ag.cls.edge_class[p].anchors == 1);
  }
}

TEST_CASE("complexity order treats the empty class as minimal") {
  AlignmentComplexity a{1, 0, kNoEdges}, b{1, 0, 0}, c{2, 0, kNoEdges};
  CHECK(a.leq(b));
  CHECK(!b.leq(a));
  CHECK(a.leq(c));
  CHECK(!c.leq(a));
  CHECK(a.leq(a));
}

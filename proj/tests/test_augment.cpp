#include "doctest.h"

#include <map>
#include <set>

#include "aligned/augment.hpp"
#include "aligned/overlay.hpp"
#include "oracles.hpp"

using namespace aligned;
using namespace aligned::testing;

namespace {

Point P(long long x, long long y) { return Point(Rat(x), Rat(y)); }

LineArrangement one_line() {
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0))};  // y = 0
  return arr;
}

LineArrangement axes() {
  LineArrangement arr;
  arr.lines = {Line(Rat(1), Rat(0), Rat(0)), Line(Rat(0), Rat(1), Rat(0))};  // x = 0, y = 0
  return arr;
}

Overlay straddling_triangle() {
  std::vector<Point> pts = {P(-2, 1), P(2, 1), P(0, -2)};
  auto g = embed_from_points(pts, {{0, 1}, {0, 2}, {1, 2}}, {0, 1, 2});
  return Overlay::from_geometry(g, pts, one_line());
}

// --- oracles, independent of the augment implementation -------------------

std::map<VertexId, std::set<VertexId>> graph_adjacency(const Overlay& ov) {
  std::map<VertexId, std::set<VertexId>> adj;
  for (VertexId v : ov.graph_vertex_ids()) adj[v];
  for (EdgeId e : ov.graph_edge_ids()) {
    auto [u, v] = ov.edge_ends(e);
    adj[u].insert(v);
    adj[v].insert(u);
  }
  return adj;
}

bool connected_without(const std::map<VertexId, std::set<VertexId>>& adj, VertexId skip) {
  VertexId start = -1;
  int total = 0;
  for (auto& [v, nb] : adj) {
    if (v == skip) continue;
    ++total;
    if (start == -1) start = v;
  }
  if (total <= 1) return true;
  std::set<VertexId> seen{start};
  std::vector<VertexId> stack{start};
  while (!stack.empty()) {
    VertexId x = stack.back();
    stack.pop_back();
    for (VertexId y : adj.at(x))
      if (y != skip && seen.insert(y).second) stack.push_back(y);
  }
  return int(seen.size()) == total;
}

// Brute-force biconnectivity: connected, and still connected after removing
// any single vertex.
bool oracle_biconnected(const Overlay& ov) {
  auto adj = graph_adjacency(ov);
  if (!connected_without(adj, -1)) return false;
  if (adj.size() <= 2) return true;
  for (auto& [v, nb] : adj)
    if (!connected_without(adj, v)) return false;
  return true;
}

bool all_inner_faces_triangles(const AlignedGraph& ag) {
  FaceId of = ag.graph.outer_face();
  for (const auto& f : ag.graph.faces())
    if (f.id != of && f.boundary.size() != 3) return false;
  return true;
}

// Every added edge: never aligned, at most 1-anchored, at most 1-crossed, and
// never both anchored and crossed.
void check_added_edges_budget(const Overlay& ov, const AugmentationReport& rep) {
  auto ex = ov.export_aligned();
  for (const auto& a : rep.additions) {
    if (a.is_vertex) continue;
    REQUIRE(ex.edge_to.count(a.id));
    const EdgeClass& ec = ex.ag.cls.edge_class[ex.edge_to.at(a.id)];
    CHECK(ec.aligned_line == -1);
    CHECK(ec.anchors <= 1);
    CHECK(int(ec.crossings.size()) <= 1);
    if (ec.anchors == 1) CHECK(ec.crossings.empty());
  }
}

// The input survives: all original vertices, and all original edges as chains
// of subdivision pieces.
void check_containment(const Overlay& ov, const std::vector<VertexId>& orig_vs,
                       const std::vector<EdgeId>& orig_es, const AugmentationReport& rep) {
  auto vs = ov.graph_vertex_ids();
  for (VertexId v : orig_vs) CHECK(std::find(vs.begin(), vs.end(), v) != vs.end());
  std::map<EdgeId, std::vector<EdgeId>> chains;
  for (EdgeId e : orig_es) chains[e] = {e};
  for (const auto& s : rep.subdivisions) {
    bool found = false;
    for (auto& [e0, ch] : chains) {
      auto it = std::find(ch.begin(), ch.end(), s.old_edge);
      if (it == ch.end()) continue;
      it = ch.erase(it);
      ch.insert(it, {s.piece_a, s.piece_b});
      found = true;
      break;
    }
    CHECK(found);
  }
  auto es = ov.graph_edge_ids();
  for (auto& [e0, ch] : chains)
    for (EdgeId p : ch) CHECK(std::find(es.begin(), es.end(), p) != es.end());
}

// Crossing events in an edge's interior, counted on the overlay.
int crossing_events(const Overlay& ov, EdgeId e) {
  int c = 0;
  LineIdx own = ov.edge_on_line(e);
  for (Overlay::Dart d : ov.edge_chain(e)) {
    if (ov.node(ov.target(d)).kind != Overlay::NodeKind::EdgeCross) continue;
    for (LineIdx i : ov.node(ov.target(d)).lines)
      if (i != own) ++c;
  }
  return c;
}

}  // namespace

TEST_CASE("biconnect leaves a biconnected graph alone") {
  Overlay ov = straddling_triangle();
  auto rep = biconnect(ov);
  ov.check_structure();
  CHECK(rep.additions.empty());
  CHECK(rep.subdivisions.empty());
  CHECK(oracle_biconnected(ov));
}

TEST_CASE("biconnect attaches an isolated vertex and removes the cut") {
  Overlay ov = straddling_triangle();
  // Drop a vertex into the upper part of the inner face.
  FaceId outer_class = ov.graph_face_of_region(ov.outside_region());
  Overlay::RegionId up = -1;
  for (const auto& r : ov.regions())
    if (r.graph_face != outer_class && r.cell >= 0 && ov.cell_signs()[r.cell][0] > 0) up = r.id;
  REQUIRE(up != -1);
  VertexId w = ov.add_isolated_vertex(ov.regions()[up].boundary.front());

  auto rep = biconnect(ov);
  ov.check_structure();
  CHECK(oracle_biconnected(ov));
  CHECK(rep.added_edges() >= 2);  // attach w, then ring the resulting cut
  check_added_edges_budget(ov, rep);
  CHECK(ov.graph_degree(w) >= 2);
  ov.export_aligned();
}

TEST_CASE("biconnect seeds vertex-free cells and connects across the line") {
  std::vector<Point> pts = {P(-2, 1), P(2, 1), P(0, 3)};  // entirely above y = 0
  auto g = embed_from_points(pts, {{0, 1}, {0, 2}, {1, 2}}, {0, 2, 1});
  Overlay ov = Overlay::from_geometry(g, pts, one_line());

  auto rep = biconnect(ov);
  ov.check_structure();
  CHECK(oracle_biconnected(ov));
  // Every cell now has a vertex on its closure.
  std::vector<char> has(ov.n_cells(), 0);
  for (VertexId v : ov.graph_vertex_ids()) {
    auto n = ov.node_of_vertex(v);
    auto ds = ov.out_darts(n);
    if (ds.empty()) {
      int cell = ov.cell_of_region(ov.region_of(ov.isolated_anchor(v)));
      if (cell >= 0) has[cell] = 1;
    } else {
      for (auto d : ds) {
        int cell = ov.cell_of_region(ov.corner_region(d));
        if (cell >= 0) has[cell] = 1;
      }
    }
  }
  for (char h : has) CHECK(h == 1);
  bool seeded = false;
  for (const auto& a : rep.additions) seeded |= a.is_vertex && a.stage == "connect";
  CHECK(seeded);
  check_added_edges_budget(ov, rep);
  ov.export_aligned();
}

TEST_CASE("biconnect rings an aligned cut vertex") {
  // Bowtie: two triangles sharing the vertex at the origin, on the line y = 0.
  std::vector<Point> pts = {P(0, 0), P(-3, 1), P(-3, -1), P(3, 1), P(3, -1)};
  auto g = embed_from_points(pts, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {0, 4}, {3, 4}},
                             {1, 2, 0, 4, 3, 0});
  Overlay ov = Overlay::from_geometry(g, pts, one_line());
  REQUIRE(ov.vertex_lines(0) == std::vector<LineIdx>{0});

  auto rep = biconnect(ov);
  ov.check_structure();
  CHECK(oracle_biconnected(ov));
  check_added_edges_budget(ov, rep);
  check_containment(ov, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4, 5}, rep);
  ov.export_aligned();
}

TEST_CASE("biconnect rejects a 2-anchored edge") {
  std::vector<Point> pts = {P(0, 2), P(2, 0)};  // one endpoint per axis
  auto g = embed_from_points(pts, {{0, 1}}, {0, 1});
  Overlay ov = Overlay::from_geometry(g, pts, axes());
  CHECK_THROWS_AS(biconnect(ov), ComplexityTooHigh);
  CHECK_THROWS_AS(properize(ov), ComplexityTooHigh);
}

TEST_CASE("isolate_crossed_edges reduces doubly crossed edges") {
  // Quad with top and bottom edges crossed by both lines.
  std::vector<Point> pts = {P(-1, 1), P(6, 1), P(6, 5), P(-1, 5)};
  auto g = embed_from_points(pts, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {0, 3, 2, 1});
  LineArrangement arr;
  arr.lines = {Line(Rat(1), Rat(0), Rat(0)),     // x = 0
               Line(Rat(10), Rat(-1), Rat(-30))}; // 10x - y = 30
  Overlay ov = Overlay::from_geometry(g, pts, arr);
  int doubly = 0;
  for (EdgeId e : ov.graph_edge_ids())
    if (crossing_events(ov, e) >= 2) ++doubly;
  REQUIRE(doubly == 2);

  auto rep = isolate_crossed_edges(ov);
  ov.check_structure();
  CHECK(!rep.additions.empty());
  check_added_edges_budget(ov, rep);
  check_containment(ov, {0, 1, 2, 3}, {0, 1, 2, 3}, rep);

  // Multiply crossed edges now only bound triangles.
  auto ex = ov.export_aligned();
  FaceId of = ex.ag.graph.outer_face();
  for (const auto& f : ex.ag.graph.faces()) {
    if (f.id == of || f.boundary.size() == 3) continue;
    for (HalfEdge h : f.boundary) {
      EdgeId ge = EmbeddedGraph::edge_of(h);
      CHECK(int(ex.ag.cls.edge_class[ge].crossings.size()) <= 1);
    }
  }

  SUBCASE("the result triangulates") {
    auto rep2 = triangulate(ov);
    ov.check_structure();
    auto ex2 = ov.export_aligned();
    CHECK(all_inner_faces_triangles(ex2.ag));
    CHECK(oracle_biconnected(ov));
    check_added_edges_budget(ov, rep2);
  }
}

TEST_CASE("isolate_crossed_edges requires biconnectivity") {
  Overlay ov = straddling_triangle();
  ov.add_isolated_vertex(ov.regions()[ov.outside_region()].boundary.front());
  CHECK_THROWS_AS(isolate_crossed_edges(ov), PreconditionViolated);
  CHECK_THROWS_AS(triangulate(ov), PreconditionViolated);
}

TEST_CASE("triangulate is a no-op on a triangulated graph") {
  Overlay ov = straddling_triangle();
  auto rep = triangulate(ov);
  CHECK(rep.additions.empty());
  CHECK(rep.subdivisions.empty());
}

TEST_CASE("triangulate captures an enclosed pseudoline intersection") {
  // Square around the origin; the axes cross in the inner face.
  std::vector<Point> pts = {P(-2, -2), P(2, -2), P(2, 2), P(-2, 2)};
  auto g = embed_from_points(pts, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {0, 3, 2, 1});
  Overlay ov = Overlay::from_geometry(g, pts, axes());

  auto rep = triangulate(ov);
  ov.check_structure();
  auto ex = ov.export_aligned();
  CHECK(all_inner_faces_triangles(ex.ag));
  CHECK(oracle_biconnected(ov));
  check_added_edges_budget(ov, rep);
  check_containment(ov, {0, 1, 2, 3}, {0, 1, 2, 3}, rep);

  // The intersection became a vertex on both pseudolines.
  bool promoted = false;
  for (const auto& a : rep.additions)
    if (a.is_vertex && a.stage == "isolate-intersection") {
      promoted = true;
      CHECK(ov.vertex_lines(a.id) == std::vector<LineIdx>({0, 1}));
    }
  CHECK(promoted);
}

TEST_CASE("properize yields a proper aligned triangulation") {
  std::vector<Point> pts = {P(-2, -2), P(2, -2), P(2, 2), P(-2, 2)};
  auto g = embed_from_points(pts, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {0, 3, 2, 1});
  Overlay ov = Overlay::from_geometry(g, pts, axes());

  auto rep = properize(ov);
  ov.check_structure();
  auto ex = ov.export_aligned();
  CHECK(is_proper(ex.ag).yes);
  CHECK(ex.ag.graph.is_triangulation());
  CHECK(oracle_biconnected(ov));
  check_added_edges_budget(ov, rep);
  check_containment(ov, {0, 1, 2, 3}, {0, 1, 2, 3}, rep);

  // Size regression: additions stay within a constant factor of n*k^2 + k^4.
  int n = 4, k = 2;
  CHECK(rep.added_vertices() + rep.added_edges() <= 10 * (n * k * k + k * k * k * k));

  SUBCASE("properize is idempotent") {
    auto rep2 = properize(ov);
    CHECK(rep2.additions.empty());
    CHECK(rep2.subdivisions.empty());
  }
}

TEST_CASE("properize subdivides aligned edges at crossing ties") {
  // A single aligned edge on y = 0 crossing x = 0 at the origin.
  std::vector<Point> pts = {P(-1, 0), P(1, 0)};
  auto g = embed_from_points(pts, {{0, 1}}, {0, 1});
  LineArrangement arr;
  arr.lines = {Line(Rat(0), Rat(1), Rat(0)), Line(Rat(1), Rat(0), Rat(0))};
  Overlay ov = Overlay::from_geometry(g, pts, arr);

  auto rep = properize(ov);
  ov.check_structure();
  auto ex = ov.export_aligned();
  CHECK(is_proper(ex.ag).yes);
  CHECK(ex.ag.graph.is_triangulation());
  CHECK(oracle_biconnected(ov));
  check_added_edges_budget(ov, rep);
  check_containment(ov, {0, 1}, {0}, rep);

  REQUIRE(!rep.subdivisions.empty());
  const auto& s = rep.subdivisions.front();
  CHECK(s.stage == "rigid-subdivision");
  CHECK(s.old_edge == 0);
  CHECK(ov.vertex_lines(s.mid) == std::vector<LineIdx>({0, 1}));
  // All aligned edges ended up 0-crossed.
  for (EdgeId e : ov.graph_edge_ids())
    if (ov.edge_on_line(e) >= 0) CHECK(crossing_events(ov, e) == 0);
}

TEST_CASE("properize requires at least two pseudolines") {
  Overlay ov = straddling_triangle();
  CHECK_THROWS_AS(properize(ov), KTooSmall);
}

#include "aligned/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "aligned/overlay.hpp"

namespace aligned {

namespace {

struct Seg {
  EdgeId e;
  int part;  // 0 or 1 within a bent edge
  Point a, b;
};

std::vector<Seg> edge_segments(const EmbeddedGraph& g, const AlignedDrawing& d) {
  std::vector<Seg> segs;
  for (EdgeId e : g.edge_ids()) {
    auto [u, v] = g.edge_ends(e);
    auto it = d.bend.find(e);
    if (it == d.bend.end()) {
      segs.push_back({e, 0, d.pos[u], d.pos[v]});
    } else {
      segs.push_back({e, 0, d.pos[u], it->second});
      segs.push_back({e, 1, it->second, d.pos[v]});
    }
  }
  return segs;
}

// --- trace element sequences ----------------------------------------------

// Kind: 0 vertex passage, 1 edge crossing, 2 along-edge, 3 concurrent
// pseudoline crossing (payload sorted ascending).
using Elem = std::pair<int, std::vector<int>>;

std::vector<Elem> trace_elements(const PseudolineTrace& t) {
  std::vector<Elem> out;
  bool last_pl = false;
  for (const TraceEvent& ev : t.events) {
    switch (ev.kind) {
      case TraceEvent::Kind::Face:
        last_pl = false;
        break;
      case TraceEvent::Kind::ThroughVertex:
        out.push_back({0, {ev.id}});
        last_pl = false;
        break;
      case TraceEvent::Kind::CrossEdge:
        out.push_back({1, {ev.id}});
        last_pl = false;
        break;
      case TraceEvent::Kind::AlongEdge:
        out.push_back({2, {ev.id}});
        last_pl = false;
        break;
      case TraceEvent::Kind::CrossPseudoline:
        if (last_pl)
          out.back().second.push_back(ev.id);
        else
          out.push_back({3, {ev.id}});
        last_pl = true;
        break;
    }
  }
  for (Elem& el : out)
    if (el.first == 3) std::sort(el.second.begin(), el.second.end());
  return out;
}

std::vector<Elem> map_elements(std::vector<Elem> els, const Overlay::Export& ex) {
  for (Elem& el : els) {
    if (el.first == 0) el.second[0] = ex.vertex_of[el.second[0]];
    if (el.first == 1 || el.first == 2) el.second[0] = ex.edge_of[el.second[0]];
  }
  return els;
}

std::string elems_str(const std::vector<Elem>& els) {
  static const char* kind = "vxap";
  std::ostringstream os;
  for (const Elem& el : els) {
    os << ' ' << kind[el.first];
    for (size_t i = 0; i < el.second.size(); ++i) os << (i ? "," : "") << el.second[i];
  }
  return os.str();
}

}  // namespace

std::vector<CrossingWitness> check_planar_straightline(const EmbeddedGraph& g,
                                                       const AlignedDrawing& d) {
  std::vector<CrossingWitness> out;
  auto vids = g.vertex_ids();
  for (VertexId v : vids)
    if (v >= int(d.pos.size())) {
      out.push_back({-1, -1, "missing position for vertex " + std::to_string(v), {}});
      return out;
    }
  for (size_t i = 0; i < vids.size(); ++i)
    for (size_t j = i + 1; j < vids.size(); ++j)
      if (d.pos[vids[i]] == d.pos[vids[j]])
        out.push_back({-1, -1,
                       "vertices " + std::to_string(vids[i]) + " and " +
                           std::to_string(vids[j]) + " coincide",
                       d.pos[vids[i]]});

  auto segs = edge_segments(g, d);
  for (const Seg& s : segs)
    if (s.a == s.b) out.push_back({s.e, -1, "degenerate segment", s.a});

  // Vertices in the interior of non-incident edges.
  for (VertexId v : vids) {
    const Point& p = d.pos[v];
    for (const Seg& s : segs) {
      auto [x, y] = g.edge_ends(s.e);
      if (x == v || y == v) continue;
      if (s.a == s.b) continue;
      if (orient(s.a, s.b, p) == 0 && on_segment(s.a, p, s.b))
        out.push_back({s.e, -1, "vertex " + std::to_string(v) + " lies on edge", p});
    }
  }

  for (size_t i = 0; i < segs.size(); ++i) {
    for (size_t j = i + 1; j < segs.size(); ++j) {
      const Seg& s = segs[i];
      const Seg& t = segs[j];
      if (s.a == s.b || t.a == t.b) continue;
      SegX x = segment_intersection(s.a, s.b, t.a, t.b);
      if (x.kind == SegXKind::None) continue;
      if (s.e == t.e) {
        // The two halves of one bent edge must meet exactly at the bend.
        const Point& bendpt = d.bend.at(s.e);
        if (x.kind != SegXKind::At || x.at != bendpt)
          out.push_back({s.e, t.e, "bent edge self-intersects",
                         x.kind == SegXKind::At ? std::optional<Point>(x.at) : std::nullopt});
        continue;
      }
      if (x.kind == SegXKind::Overlap) {
        out.push_back({s.e, t.e, "edges overlap", {}});
        continue;
      }
      auto [su, sv] = g.edge_ends(s.e);
      auto [tu, tv] = g.edge_ends(t.e);
      bool shared_endpoint = false;
      for (VertexId w : {su, sv})
        if ((w == tu || w == tv) && x.at == d.pos[w]) shared_endpoint = true;
      if (!shared_endpoint) out.push_back({s.e, t.e, "edges cross", x.at});
    }
  }
  return out;
}

namespace {

void fail(ValidationReport& rep, int prop, std::string detail, std::vector<int> elems = {},
          std::optional<Point> witness = std::nullopt) {
  rep.violations.push_back({prop, std::move(detail), std::move(elems), std::move(witness)});
}

// Replaces each bent edge by two straight edges through a new free vertex at
// the bend, rewriting edge-crossing trace events onto the half the line
// geometrically crosses. Returns false (with a report entry) when the rewrite
// cannot produce a valid aligned graph.
bool debend(const AlignedGraph& ag0, const AlignedDrawing& d0, AlignedGraph& ag,
            std::vector<Point>& pos, ValidationReport& rep) {
  if (d0.bend.empty()) {
    ag = ag0;
    pos = d0.pos;
    return true;
  }
  EmbeddedGraph g = ag0.graph;
  std::vector<PseudolineTrace> traces = ag0.traces;
  pos = d0.pos;
  for (const auto& [e, b] : d0.bend) {
    if (!g.edge_alive(e)) {
      fail(rep, 0, "bend on unknown edge", {e});
      return false;
    }
    if (ag0.cls.edge_class[e].aligned() ) {
      fail(rep, 3, "bend on an aligned edge", {e}, b);
      return false;
    }
    auto [u, v] = g.edge_ends(e);
    auto [g2, w] = g.subdivide(e);
    g = std::move(g2);
    auto he = g.half_edge(w, v);
    if (!he) {
      fail(rep, 0, "subdivision bookkeeping failed", {e});
      return false;
    }
    EdgeId tail = EmbeddedGraph::edge_of(*he);  // w-v; e itself is now u-w
    pos.resize(std::max<size_t>(pos.size(), w + 1));
    pos[w] = b;
    for (PseudolineTrace& t : traces) {
      const Line& l = d0.arr.lines[t.line];
      // Which halves does the line cross strictly?
      int su = side_of_line(l, d0.pos[u]);
      int sb = side_of_line(l, b);
      int sv = side_of_line(l, d0.pos[v]);
      std::vector<EdgeId> halves;
      if (su * sb < 0) halves.push_back(e);
      if (sb * sv < 0) halves.push_back(tail);
      size_t next = 0;
      for (TraceEvent& ev : t.events)
        if (ev.kind == TraceEvent::Kind::CrossEdge && ev.id == e && next < halves.size())
          ev.id = halves[next++];
    }
  }
  try {
    ag = AlignedGraph::make(std::move(g), ag0.system, std::move(traces));
  } catch (const Error& err) {
    fail(rep, 5, std::string("bent drawing is not line-compatible: ") + err.what());
    return false;
  }
  return true;
}

}  // namespace

ValidationReport check_aligned_drawing(const AlignedGraph& ag0, const AlignedDrawing& d) {
  ValidationReport rep;
  for (VertexId v : ag0.graph.vertex_ids())
    if (v >= int(d.pos.size())) {
      fail(rep, 0, "missing position for vertex " + std::to_string(v), {v});
      return rep;
    }
  int k = ag0.system.k;
  if (int(d.arr.lines.size()) != k) {
    fail(rep, 1, "arrangement has " + std::to_string(d.arr.lines.size()) + " lines, system has " +
                     std::to_string(k));
    return rep;
  }

  // (2a) exact planarity of the polyline drawing.
  for (const CrossingWitness& c : check_planar_straightline(ag0.graph, d))
    fail(rep, 2, c.detail, {c.e1, c.e2}, c.at);
  if (!rep.pass()) return rep;

  // (1) the arrangement realizes the pseudoline system.
  CellBijection cb;
  if (k > 0) {
    try {
      d.arr.validate();
      cb = match_cells(ag0.system, d.arr);
    } catch (const Error& err) {
      fail(rep, 1, err.what());
      return rep;
    }
    if (d.phi) {
      if (d.phi->phi != cb.phi || d.phi->line_flip != cb.line_flip ||
          d.phi->side_flip != cb.side_flip)
        fail(rep, 1, "recorded cell bijection differs from the canonical one");
    }
  }

  // Fold bends away; all remaining checks run on the straight-line graph.
  AlignedGraph ag;
  std::vector<Point> pos;
  if (!debend(ag0, d, ag, pos, rep)) return rep;

  // (2b) the drawing realizes the embedding: rotation system and outer face.
  Overlay ov;
  try {
    ov = Overlay::from_geometry(ag.graph, pos, d.arr);
  } catch (const Error& err) {
    fail(rep, 2, err.what());
    return rep;
  }
  Overlay::Export ex = ov.export_aligned();

  // (3) vertex-line and edge-line incidences match the classification.
  for (VertexId v : ag.graph.vertex_ids()) {
    auto geo = ex.ag.cls.vertex_lines[ex.vertex_to.at(v)];
    if (geo != ag.cls.vertex_lines[v])
      fail(rep, 3, "vertex lies on the wrong lines", {v}, pos[v]);
  }
  for (EdgeId e : ag.graph.edge_ids()) {
    const EdgeClass& geo = ex.ag.cls.edge_class[ex.edge_to.at(e)];
    const EdgeClass& comb = ag.cls.edge_class[e];
    if (geo.aligned_line != comb.aligned_line || geo.anchors != comb.anchors)
      fail(rep, 3, "edge alignment or anchoring differs", {e});
    // (4) crossing multiset per edge.
    if (geo.crossings != comb.crossings) fail(rep, 4, "edge crossing sequence differs", {e});
  }

  // Independent parity audit of (3)/(4) straight from signs.
  for (LineIdx i = 0; i < k; ++i) {
    const Line& l = d.arr.lines[i];
    for (VertexId v : ag.graph.vertex_ids()) {
      bool on_comb = std::count(ag.cls.vertex_lines[v].begin(), ag.cls.vertex_lines[v].end(), i);
      if ((side_of_line(l, pos[v]) == 0) != on_comb)
        fail(rep, 3, "vertex side of line " + std::to_string(i) + " disagrees", {v}, pos[v]);
    }
    for (EdgeId e : ag.graph.edge_ids()) {
      const EdgeClass& comb = ag.cls.edge_class[e];
      if (comb.aligned_line == i) continue;
      auto [u, v] = ag.graph.edge_ends(e);
      int su = side_of_line(l, pos[u]), sv = side_of_line(l, pos[v]);
      if (su == 0 || sv == 0) continue;  // covered by the vertex checks
      int cnt = int(std::count(comb.crossings.begin(), comb.crossings.end(), i));
      if ((su == sv) != (cnt % 2 == 0))
        fail(rep, 4, "edge crossing parity with line " + std::to_string(i) + " disagrees", {e});
    }
  }

  // (5) per-line element order, up to reversing the whole line.
  for (LineIdx i = 0; i < k; ++i) {
    auto geo = map_elements(trace_elements(ex.ag.traces[i]), ex);
    auto comb = trace_elements(ag.traces[i]);
    auto rev = comb;
    std::reverse(rev.begin(), rev.end());
    if (geo != comb && geo != rev)
      fail(rep, 5,
           "line " + std::to_string(i) + " meets elements in the wrong order: drawn" +
               elems_str(geo) + " vs expected" + elems_str(comb),
           {i});
  }

  return rep;
}

std::string ValidationReport::str() const {
  if (pass()) return "pass\n";
  static const char* roman[] = {"structure", "i", "ii", "iii", "iv", "v"};
  std::ostringstream os;
  for (const Violation& v : violations) {
    os << "fail(" << roman[v.property] << "): " << v.detail;
    if (!v.elements.empty()) {
      os << " [";
      for (size_t i = 0; i < v.elements.size(); ++i) os << (i ? " " : "") << v.elements[i];
      os << "]";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace aligned

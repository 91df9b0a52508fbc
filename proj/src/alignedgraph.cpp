#include "aligned/alignedgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace aligned {
namespace {

using Kind = TraceEvent::Kind;

// Parsed element of a trace: a crossing, a concurrent pseudoline crossing
// run, or a passage through aligned vertices and edges.
struct Item {
  enum class Type { Cross, LineRun, Passage };
  Type type;
  EdgeId edge = -1;                  // Cross
  std::vector<LineIdx> run;          // LineRun
  std::vector<VertexId> pass_verts;  // Passage
  std::vector<EdgeId> pass_edges;    // Passage (between consecutive vertices)
  FaceId before = -1, after = -1;
  int first_event = -1;
};

struct ParsedTrace {
  std::vector<Item> items;
  std::optional<TraceViolation> violation;
};

ParsedTrace parse_trace(const PseudolineTrace& t) {
  ParsedTrace out;
  auto fail = [&](const std::string& d, int idx) {
    out.violation = TraceViolation{d, idx};
    return out;
  };
  const auto& ev = t.events;
  int n = int(ev.size());
  if (n == 0) return fail("empty trace", -1);
  if (ev[0].kind != Kind::Face) return fail("trace must start with a face corridor", 0);
  int i = 1;
  FaceId cur_face = ev[0].id;
  while (i < n) {
    Item item;
    item.before = cur_face;
    item.first_event = i;
    switch (ev[i].kind) {
      case Kind::Face:
        return fail("consecutive face corridors", i);
      case Kind::CrossEdge:
        item.type = Item::Type::Cross;
        item.edge = ev[i].id;
        ++i;
        break;
      case Kind::CrossPseudoline:
        item.type = Item::Type::LineRun;
        while (i < n && ev[i].kind == Kind::CrossPseudoline) item.run.push_back(ev[i++].id);
        break;
      case Kind::ThroughVertex: {
        item.type = Item::Type::Passage;
        item.pass_verts.push_back(ev[i].id);
        ++i;
        while (i < n && ev[i].kind == Kind::AlongEdge) {
          item.pass_edges.push_back(ev[i].id);
          ++i;
          if (i >= n || ev[i].kind != Kind::ThroughVertex)
            return fail("edge containment must end at a vertex", i - 1);
          item.pass_verts.push_back(ev[i].id);
          ++i;
        }
        break;
      }
      case Kind::AlongEdge:
        return fail("edge containment outside a vertex passage", i);
    }
    if (i >= n || ev[i].kind != Kind::Face)
      return fail("element events must be separated by face corridors", i - 1);
    item.after = ev[i].id;
    cur_face = ev[i].id;
    ++i;
    out.items.push_back(std::move(item));
  }
  return out;
}

std::vector<std::set<VertexId>> face_vertex_sets(const std::vector<Face>& faces,
                                                 const EmbeddedGraph& g) {
  std::vector<std::set<VertexId>> out(faces.size());
  for (const auto& f : faces)
    for (HalfEdge h : f.boundary) out[f.id].insert(g.origin(h));
  return out;
}

}  // namespace

std::optional<TraceViolation> validate_pseudoline_wrt_graph(const EmbeddedGraph& g,
                                                            const PseudolineTrace& t) {
  ParsedTrace pt = parse_trace(t);
  if (pt.violation) return pt.violation;
  auto faces = g.faces();
  int nf = int(faces.size());
  FaceId outer = g.outer_face();
  std::vector<std::vector<FaceId>> edge_faces;  // per edge: faces of its two sides
  {
    std::vector<FaceId> face_of(2 * g.n_edges() >= 0 ? 0 : 0);
    face_of.assign(size_t(std::max(0, 2 * int(g.edge_ids().empty() ? 0 : g.edge_ids().back() + 1))), -1);
    for (const auto& f : faces)
      for (HalfEdge h : f.boundary) {
        if (h >= int(face_of.size())) face_of.resize(h + 1, -1);
        face_of[h] = f.id;
      }
    edge_faces.assign(face_of.size() / 2 + 1, {});
    for (EdgeId e : g.edge_ids()) edge_faces[e] = {face_of[2 * e], face_of[2 * e + 1]};
  }
  auto fvs = face_vertex_sets(faces, g);

  const auto& ev = t.events;
  if (ev.front().id != outer)
    return TraceViolation{"trace must start in the outer face", 0};
  if (ev.back().kind != Kind::Face)
    return TraceViolation{"trace must end with a face corridor", int(ev.size()) - 1};
  if (ev.back().id != outer)
    return TraceViolation{"trace must end in the outer face", int(ev.size()) - 1};
  for (int i = 0; i < int(ev.size()); ++i)
    if (ev[i].kind == Kind::Face && (ev[i].id < 0 || ev[i].id >= nf))
      return TraceViolation{"unknown face id", i};

  std::map<VertexId, int> vertex_visits;
  std::map<EdgeId, int> interior_crossings;
  std::set<EdgeId> contained;

  for (const Item& it : pt.items) {
    int idx = it.first_event;
    switch (it.type) {
      case Item::Type::Cross: {
        EdgeId e = it.edge;
        if (!g.edge_alive(e)) return TraceViolation{"crossing of unknown edge", idx};
        std::vector<FaceId> got = {it.before, it.after};
        std::vector<FaceId> want = edge_faces[e];
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        if (got != want)
          return TraceViolation{"edge crossing does not separate the edge's two faces", idx};
        interior_crossings[e]++;
        break;
      }
      case Item::Type::LineRun: {
        if (it.before != it.after)
          return TraceViolation{"pseudoline crossing must stay within one face", idx};
        std::set<LineIdx> seen;
        for (LineIdx j : it.run) {
          if (j < 0 || j == t.line)
            return TraceViolation{"bad pseudoline index in crossing", idx};
          if (!seen.insert(j).second)
            return TraceViolation{"repeated pseudoline in one crossing", idx};
        }
        break;
      }
      case Item::Type::Passage: {
        for (VertexId v : it.pass_verts) {
          if (!g.vertex_alive(v)) return TraceViolation{"passage through unknown vertex", idx};
          vertex_visits[v]++;
        }
        for (int j = 0; j < int(it.pass_edges.size()); ++j) {
          EdgeId e = it.pass_edges[j];
          if (!g.edge_alive(e)) return TraceViolation{"containment of unknown edge", idx};
          auto [a, b] = g.edge_ends(e);
          VertexId u = it.pass_verts[j], v = it.pass_verts[j + 1];
          if (!((a == u && b == v) || (a == v && b == u)))
            return TraceViolation{"contained edge does not join its passage vertices", idx};
          if (!contained.insert(e).second)
            return TraceViolation{"edge contained twice", idx};
        }
        if (!fvs[it.before].count(it.pass_verts.front()))
          return TraceViolation{"entry face not incident to passage start", idx};
        if (!fvs[it.after].count(it.pass_verts.back()))
          return TraceViolation{"exit face not incident to passage end", idx};
        break;
      }
    }
  }

  for (auto& [v, c] : vertex_visits)
    if (c > 1) return TraceViolation{"vertex visited twice", -1};
  for (auto& [e, c] : interior_crossings) {
    if (c > 1) return TraceViolation{"edge crossed twice", -1};
    if (contained.count(e)) return TraceViolation{"edge both contained and crossed", -1};
  }
  // At most one intersection point per non-contained edge: interior crossing
  // and endpoint visits are mutually exclusive, and so are two endpoint visits.
  for (EdgeId e : g.edge_ids()) {
    if (contained.count(e)) continue;
    auto [u, v] = g.edge_ends(e);
    int pts = (vertex_visits.count(u) ? 1 : 0) + (vertex_visits.count(v) ? 1 : 0) +
              (interior_crossings.count(e) ? 1 : 0);
    if (pts > 1) return TraceViolation{"edge met in more than one point", -1};
  }
  return std::nullopt;
}

Classification classify(const EmbeddedGraph& g, int k,
                        const std::vector<PseudolineTrace>& traces) {
  Classification c;
  int nv = 0, ne = 0;
  for (VertexId v : g.vertex_ids()) nv = std::max(nv, v + 1);
  for (EdgeId e : g.edge_ids()) ne = std::max(ne, e + 1);
  c.vertex_lines.assign(nv, {});
  c.edge_class.assign(ne, {});
  (void)k;
  for (const auto& t : traces) {
    for (const auto& ev : t.events) {
      switch (ev.kind) {
        case Kind::ThroughVertex:
          c.vertex_lines[ev.id].push_back(t.line);
          break;
        case Kind::AlongEdge: {
          EdgeClass& ec = c.edge_class[ev.id];
          if (ec.aligned_line >= 0 && ec.aligned_line != t.line)
            throw AlignedGraphError("edge contained in two distinct pseudolines");
          ec.aligned_line = t.line;
          break;
        }
        case Kind::CrossEdge:
          c.edge_class[ev.id].crossings.push_back(t.line);
          break;
        default:
          break;
      }
    }
  }
  for (auto& vl : c.vertex_lines) {
    std::sort(vl.begin(), vl.end());
    vl.erase(std::unique(vl.begin(), vl.end()), vl.end());
  }
  for (EdgeId e : g.edge_ids()) {
    EdgeClass& ec = c.edge_class[e];
    std::sort(ec.crossings.begin(), ec.crossings.end());
    auto [u, v] = g.edge_ends(e);
    std::vector<LineIdx> su = c.vertex_lines[u], sv = c.vertex_lines[v];
    if (ec.aligned_line >= 0) {
      std::erase(su, ec.aligned_line);
      std::erase(sv, ec.aligned_line);
    }
    if (su.empty() && sv.empty())
      ec.anchors = 0;
    else if (su.empty() || sv.empty())
      ec.anchors = 1;
    else if (su.size() == 1 && su == sv)
      ec.anchors = 1;  // both endpoints only on the same single pseudoline
    else
      ec.anchors = 2;
  }
  return c;
}

bool AlignmentComplexity::leq(const AlignmentComplexity& o) const {
  auto le = [](int a, int b) { return a == kNoEdges || (b != kNoEdges && a <= b); };
  return le(l0, o.l0) && le(l1, o.l1) && le(l2, o.l2);
}

std::string AlignmentComplexity::str() const {
  auto s = [](int x) { return x == kNoEdges ? std::string("_") : std::to_string(x); };
  return "(" + s(l0) + "," + s(l1) + "," + s(l2) + ")";
}

AlignmentComplexity alignment_complexity(const AlignedGraph& ag) {
  AlignmentComplexity r;
  auto bump = [](int& l, int crossings) { l = std::max(l == kNoEdges ? 0 : l, crossings); };
  for (EdgeId e : ag.graph.edge_ids()) {
    const EdgeClass& ec = ag.cls.edge_class[e];
    int cr = int(ec.crossings.size());
    if (ec.anchors == 0) bump(r.l0, cr);
    else if (ec.anchors == 1) bump(r.l1, cr);
    else bump(r.l2, cr);
  }
  return r;
}

AlignedGraph AlignedGraph::make(EmbeddedGraph g, PseudolineSystem s,
                                std::vector<PseudolineTrace> tr) {
  s.validate();
  if (int(tr.size()) != s.k)
    throw AlignedGraphError("trace count does not match pseudoline count");
  for (int i = 0; i < s.k; ++i)
    if (tr[i].line != i) throw AlignedGraphError("traces must be listed by pseudoline index");
  for (int i = 0; i < s.k; ++i) {
    auto viol = validate_pseudoline_wrt_graph(g, tr[i]);
    if (viol) {
      std::ostringstream os;
      os << "invalid trace for pseudoline " << i << ": " << viol->detail;
      throw AlignedGraphError(os.str());
    }
  }
  AlignedGraph ag;
  ag.cls = classify(g, s.k, tr);

  // Check each trace's meetings with the other pseudolines against the
  // system's crossing order, and recover the order of crossings along each
  // contained (aligned) edge.
  for (int i = 0; i < s.k; ++i) {
    ParsedTrace pt = parse_trace(tr[i]);
    const auto& order = s.crossing_order[i];
    size_t p = 0;
    auto take_group = [&](const std::vector<LineIdx>& want, const char* what) {
      if (p >= order.size() || order[p] != want) {
        std::ostringstream os;
        os << "pseudoline " << i << ": " << what
           << " does not match the declared crossing order";
        throw AlignedGraphError(os.str());
      }
      ++p;
    };
    auto meet_vertex = [&](VertexId v) {
      std::vector<LineIdx> tie = ag.cls.vertex_lines[v];
      std::erase(tie, i);
      if (!tie.empty()) take_group(tie, "crossing at a vertex");
    };
    auto meet_edge = [&](EdgeId e, VertexId from) {
      std::set<LineIdx> rest(ag.cls.edge_class[e].crossings.begin(),
                             ag.cls.edge_class[e].crossings.end());
      std::vector<Group> groups;
      while (!rest.empty()) {
        if (p >= order.size())
          throw AlignedGraphError("crossings on a contained edge exceed the crossing order");
        for (LineIdx j : order[p])
          if (!rest.erase(j))
            throw AlignedGraphError(
                "crossing order interleaves a contained edge's crossings with others");
        groups.push_back(order[p]);
        ++p;
      }
      auto [u, v] = g.edge_ends(e);
      (void)v;
      if (from != u) std::reverse(groups.begin(), groups.end());
      ag.aligned_edge_cross_order[e] = std::move(groups);
    };
    auto meet_aligned_cross = [&](EdgeId e) {
      // Crossing the interior of an edge contained in another pseudoline is a
      // meeting with that pseudoline (plus any lines tied at the same point).
      const EdgeClass& ec = ag.cls.edge_class[e];
      if (!ec.aligned()) return;
      if (p >= order.size())
        throw AlignedGraphError("crossing of an aligned edge beyond the crossing order");
      const Group& grp = order[p];
      bool has_line = std::find(grp.begin(), grp.end(), ec.aligned_line) != grp.end();
      bool rest_ok = true;
      for (LineIdx j : grp)
        if (j != ec.aligned_line &&
            std::find(ec.crossings.begin(), ec.crossings.end(), j) == ec.crossings.end())
          rest_ok = false;
      if (!has_line || !rest_ok)
        throw AlignedGraphError(
            "crossing of an aligned edge does not match the declared crossing order");
      ++p;
    };
    for (const Item& it : pt.items) {
      if (it.type == Item::Type::Cross) {
        meet_aligned_cross(it.edge);
      } else if (it.type == Item::Type::LineRun) {
        std::vector<LineIdx> run = it.run;
        std::sort(run.begin(), run.end());
        take_group(run, "crossing in a face");
      } else if (it.type == Item::Type::Passage) {
        for (size_t j = 0; j < it.pass_verts.size(); ++j) {
          meet_vertex(it.pass_verts[j]);
          if (j < it.pass_edges.size()) meet_edge(it.pass_edges[j], it.pass_verts[j]);
        }
      }
    }
    if (p != order.size())
      throw AlignedGraphError("trace meets fewer pseudolines than the crossing order declares");
  }

  ag.graph = std::move(g);
  ag.system = std::move(s);
  ag.traces = std::move(tr);
  return ag;
}

ProperCheck is_proper(const AlignedGraph& ag) {
  ProperCheck r;
  const EmbeddedGraph& g = ag.graph;
  std::set<EdgeId> outer_edges;
  std::set<VertexId> outer_verts;
  for (HalfEdge h : g.outer_walk()) {
    outer_edges.insert(EmbeddedGraph::edge_of(h));
    outer_verts.insert(g.origin(h));
  }
  for (EdgeId e : g.edge_ids()) {
    const EdgeClass& ec = ag.cls.edge_class[e];
    if (ec.aligned() && !ec.crossings.empty()) {
      r.reasons.push_back("aligned edge " + std::to_string(e) + " is crossed");
    }
    if (ag.system.k >= 2 && outer_edges.count(e)) {
      if (ec.aligned())
        r.reasons.push_back("outer edge " + std::to_string(e) + " is aligned");
      else if (ec.crossings.size() != 1)
        r.reasons.push_back("outer edge " + std::to_string(e) + " is not 1-crossed");
    }
  }
  FaceId outer = g.outer_face();
  for (const auto& t : ag.traces) {
    int hits = 0;
    bool overlap = false;
    for (const auto& ev : t.events) {
      if (ev.kind == Kind::ThroughVertex && outer_verts.count(ev.id)) ++hits;
      if (ev.kind == Kind::CrossEdge && outer_edges.count(ev.id)) ++hits;
      if (ev.kind == Kind::AlongEdge && outer_edges.count(ev.id)) overlap = true;
    }
    if (overlap)
      r.reasons.push_back("pseudoline " + std::to_string(t.line) +
                          " overlaps the outer boundary");
    else if (hits != 2)
      r.reasons.push_back("pseudoline " + std::to_string(t.line) +
                          " meets the outer boundary " + std::to_string(hits) +
                          " times (expected 2)");
    ParsedTrace pt = parse_trace(t);
    for (const Item& it : pt.items)
      if (it.type == Item::Type::LineRun && it.before == outer)
        r.reasons.push_back("pseudoline crossing inside the outer face (pseudoline " +
                            std::to_string(t.line) + ")");
  }
  r.yes = r.reasons.empty();
  return r;
}

RigidSubdivisionResult rigid_subdivision(const AlignedGraph& ag) {
  RigidSubdivisionResult out;
  EmbeddedGraph g = ag.graph;
  // Old half-edge -> corresponding half-edge in the subdivided graph (first
  // piece, same direction); used to remap face ids.
  std::map<HalfEdge, HalfEdge> hmap;
  for (EdgeId e : ag.graph.edge_ids()) {
    hmap[2 * e] = 2 * e;
    hmap[2 * e + 1] = 2 * e + 1;
  }
  std::map<EdgeId, std::vector<EdgeId>> pieces;        // u -> v order
  std::map<EdgeId, std::vector<VertexId>> piece_verts;  // u -> v order
  for (EdgeId e : ag.graph.edge_ids()) pieces[e] = {e};
  for (const auto& [e, groups] : ag.aligned_edge_cross_order) {
    if (groups.empty()) continue;
    EdgeId tail = e;
    for (size_t i = 0; i < groups.size(); ++i) {
      EdgeId next_id = 0;  // subdivide assigns the next unused edge id
      for (EdgeId id : g.edge_ids()) next_id = std::max(next_id, id + 1);
      auto [g2, w] = g.subdivide(tail);
      g = std::move(g2);
      piece_verts[e].push_back(w);
      out.new_vertices.push_back(w);
      pieces[e].push_back(next_id);
      tail = next_id;
    }
    // The last piece now carries the v endpoint; hmap for direction u->v
    // stays at the first piece, v->u moves to the last piece.
    hmap[2 * e + 1] = 2 * pieces[e].back() + 1;
  }
  out.edge_pieces = pieces;

  // Face id remap between the old and new graph.
  auto new_faces = g.faces();
  std::vector<FaceId> face_of_half;
  for (const auto& f : new_faces)
    for (HalfEdge h : f.boundary) {
      if (h >= int(face_of_half.size())) face_of_half.resize(h + 1, -1);
      face_of_half[h] = f.id;
    }
  auto old_faces = ag.graph.faces();
  std::vector<FaceId> fmap(old_faces.size(), -1);
  for (const auto& f : old_faces) fmap[f.id] = face_of_half[hmap.at(f.boundary.front())];

  // Rewrite traces.
  std::vector<PseudolineTrace> traces;
  for (const auto& t : ag.traces) {
    PseudolineTrace nt;
    nt.line = t.line;
    ParsedTrace pt = parse_trace(t);
    auto emit = [&](TraceEvent e) { nt.events.push_back(e); };
    emit(ev_face(fmap[t.events.front().id]));
    for (const Item& it : pt.items) {
      switch (it.type) {
        case Item::Type::Cross: {
          EdgeId e = it.edge;
          const EdgeClass& ec = ag.cls.edge_class[e];
          if (ec.aligned() && ag.aligned_edge_cross_order.count(e)) {
            // This crossing became a pass through a subdivision vertex.
            const auto& groups = ag.aligned_edge_cross_order.at(e);
            int at = -1;
            for (size_t gi = 0; gi < groups.size(); ++gi)
              if (std::find(groups[gi].begin(), groups[gi].end(), t.line) != groups[gi].end())
                at = int(gi);
            emit(ev_through(piece_verts.at(e)[at]));
          } else {
            emit(ev_cross_edge(e));
          }
          break;
        }
        case Item::Type::LineRun:
          for (LineIdx j : it.run) emit(ev_cross_line(j));
          break;
        case Item::Type::Passage:
          for (size_t j = 0; j < it.pass_verts.size(); ++j) {
            emit(ev_through(it.pass_verts[j]));
            if (j < it.pass_edges.size()) {
              EdgeId e = it.pass_edges[j];
              std::vector<EdgeId> chain = pieces.at(e);
              std::vector<VertexId> mids =
                  piece_verts.count(e) ? piece_verts.at(e) : std::vector<VertexId>{};
              auto [u, v] = ag.graph.edge_ends(e);
              (void)v;
              if (it.pass_verts[j] != u) {
                std::reverse(chain.begin(), chain.end());
                std::reverse(mids.begin(), mids.end());
              }
              for (size_t c = 0; c < chain.size(); ++c) {
                emit(ev_along(chain[c]));
                if (c + 1 < chain.size()) emit(ev_through(mids[c]));
              }
            }
          }
          break;
      }
      emit(ev_face(fmap[it.after]));
    }
    traces.push_back(std::move(nt));
  }
  out.ag = AlignedGraph::make(std::move(g), ag.system, std::move(traces));
  return out;
}

}  // namespace aligned

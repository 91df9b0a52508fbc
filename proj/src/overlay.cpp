#include "aligned/overlay.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace aligned {

namespace {

struct PointLess {
  bool operator()(const Point& a, const Point& b) const {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  }
};

// ccw angular order of direction vectors, starting just above the +x axis.
bool angle_less(const Point& a, const Point& b) {
  auto half = [](const Point& p) {
    return (p.y < 0 || (p.y == 0 && p.x < 0)) ? 1 : 0;
  };
  int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  Rat cr = a.x * b.y - a.y * b.x;
  return cr > 0;
}

struct DSU {
  std::vector<int> p;
  explicit DSU(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) p[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

// --------------------------------------------------------------------------
// low-level structure editing

Overlay::NodeId Overlay::new_node(Node n) {
  n.alive = true;
  nodes_.push_back(std::move(n));
  nrep_.push_back(-1);
  isolated_anchor_.push_back(-1);
  return NodeId(nodes_.size()) - 1;
}

Overlay::ArcId Overlay::new_arc(Arc a, NodeId u, NodeId v) {
  a.alive = true;
  arcs_.push_back(std::move(a));
  org_.push_back(u);
  org_.push_back(v);
  nxt_.push_back(-1);
  nxt_.push_back(-1);
  prv_.push_back(-1);
  prv_.push_back(-1);
  return ArcId(arcs_.size()) - 1;
}

void Overlay::attach_at_corner(Dart d, Dart corner) {
  org_[d] = org_[corner];
  prv_[d] = prv_[corner];
  nxt_[d] = corner;
  nxt_[prv_[corner]] = d;
  prv_[corner] = d;
  isolated_anchor_[org_[d]] = -1;
}

void Overlay::attach_isolated(Dart d, NodeId n) {
  org_[d] = n;
  nxt_[d] = prv_[d] = d;
  nrep_[n] = d;
  isolated_anchor_[n] = -1;
}

void Overlay::detach(Dart d) {
  NodeId n = org_[d];
  if (nxt_[d] == d) {
    nrep_[n] = -1;
  } else {
    nxt_[prv_[d]] = nxt_[d];
    prv_[nxt_[d]] = prv_[d];
    if (nrep_[n] == d) nrep_[n] = nxt_[d];
  }
  nxt_[d] = prv_[d] = -1;
}

void Overlay::remove_arc(ArcId a) {
  // Re-anchor nesting pairs and isolated anchors that reference the dying
  // darts to another dart bounding the same region.
  for (Dart d : {2 * a, 2 * a + 1}) {
    auto replacement = [&]() -> Dart {
      Dart e = face_next(d);
      while (e != d) {
        if (arc_of(e) != a) return e;
        e = face_next(e);
      }
      for (auto& pr : nest_pairs_) {
        if (arc_of(pr.second) == a && arc_of(pr.first) != a) return pr.first;
        if (arc_of(pr.first) == a && arc_of(pr.second) != a) return pr.second;
      }
      return -1;
    };
    Dart rep = -1;
    bool need = false;
    for (auto& pr : nest_pairs_)
      if (pr.first == d || pr.second == d) need = true;
    for (Dart an : isolated_anchor_)
      if (an == d) need = true;
    if (need) {
      rep = replacement();
      if (rep == -1) throw OverlayError("cannot re-anchor region reference");
      for (auto& pr : nest_pairs_) {
        if (pr.first == d) pr.first = rep;
        if (pr.second == d) pr.second = rep;
      }
      for (auto& an : isolated_anchor_)
        if (an == d) an = rep;
    }
  }
  detach(2 * a);
  detach(2 * a + 1);
  arcs_[a].alive = false;
  std::erase_if(nest_pairs_, [&](const std::pair<Dart, Dart>& pr) {
    return arc_of(pr.first) == a || arc_of(pr.second) == a;
  });
  touch();
}

Overlay::ArcId Overlay::split_arc(ArcId a, NodeId m) {
  Dart f = 2 * a, b = 2 * a + 1;
  NodeId q = org_[b];
  ArcId a2 = new_arc(arcs_[a], m, q);
  Dart f2 = 2 * a2, b2 = 2 * a2 + 1;
  // b2 takes over b's slot in q's rotation.
  if (nxt_[b] == b) {
    nxt_[b2] = prv_[b2] = b2;
  } else {
    nxt_[b2] = nxt_[b];
    prv_[b2] = prv_[b];
    nxt_[prv_[b]] = b2;
    prv_[nxt_[b]] = b2;
  }
  if (nrep_[q] == b) nrep_[q] = b2;
  for (auto& pr : nest_pairs_) {
    if (pr.first == b) pr.first = b2;
    if (pr.second == b) pr.second = b2;
  }
  for (auto& an : isolated_anchor_)
    if (an == b) an = b2;
  // b moves to m; rotation at m is (b, f2).
  org_[b] = m;
  nxt_[b] = f2;
  prv_[b] = f2;
  nxt_[f2] = b;
  prv_[f2] = b;
  nrep_[m] = b;
  isolated_anchor_[m] = -1;
  touch();
  return a2;
}

void Overlay::dissolve_node(NodeId n) {
  Dart o1 = nrep_[n];
  if (o1 == -1 || nxt_[o1] == o1) throw OverlayError("dissolve: node degree is not 2");
  Dart o2 = nxt_[o1];
  if (nxt_[o2] != o1) throw OverlayError("dissolve: node degree is not 2");
  ArcId a1 = arc_of(o1), a2 = arc_of(o2);
  if (arcs_[a1].kind != arcs_[a2].kind || arcs_[a1].line != arcs_[a2].line ||
      arcs_[a1].edge != arcs_[a2].edge)
    throw OverlayError("dissolve: mismatched arcs");
  Dart t2 = twin(o2);
  NodeId x2 = org_[t2];
  // o1 takes over t2's slot at x2; arc a2 dies.
  for (auto& pr : nest_pairs_) {
    if (pr.first == t2) pr.first = o1;
    if (pr.second == t2) pr.second = o1;
    if (pr.first == o2) pr.first = twin(o1);
    if (pr.second == o2) pr.second = twin(o1);
  }
  for (auto& an : isolated_anchor_) {
    if (an == t2) an = o1;
    if (an == o2) an = twin(o1);
  }
  org_[o1] = x2;
  if (nxt_[t2] == t2) {
    nxt_[o1] = prv_[o1] = o1;
  } else {
    nxt_[o1] = nxt_[t2];
    prv_[o1] = prv_[t2];
    nxt_[prv_[t2]] = o1;
    prv_[nxt_[t2]] = o1;
  }
  if (nrep_[x2] == t2) nrep_[x2] = o1;
  nxt_[t2] = prv_[t2] = nxt_[o2] = prv_[o2] = -1;
  arcs_[a2].alive = false;
  nodes_[n].alive = false;
  nrep_[n] = -1;
  touch();
}

VertexId Overlay::fresh_vertex_id() {
  VertexId m = -1;
  for (const Node& n : nodes_)
    if (n.kind == NodeKind::Vertex) m = std::max(m, n.vertex);
  return m + 1;
}

EdgeId Overlay::fresh_edge_id() {
  EdgeId m = -1;
  for (const Arc& a : arcs_) m = std::max(m, a.edge);
  for (const Node& n : nodes_) m = std::max(m, n.edge);
  return m + 1;
}

// --------------------------------------------------------------------------
// accessors

std::vector<Overlay::NodeId> Overlay::node_ids() const {
  std::vector<NodeId> out;
  for (int i = 0; i < int(nodes_.size()); ++i)
    if (nodes_[i].alive) out.push_back(i);
  return out;
}

std::vector<Overlay::ArcId> Overlay::arc_ids() const {
  std::vector<ArcId> out;
  for (int i = 0; i < int(arcs_.size()); ++i)
    if (arcs_[i].alive) out.push_back(i);
  return out;
}

std::vector<Overlay::Dart> Overlay::out_darts(NodeId n) const {
  std::vector<Dart> out;
  Dart d = nrep_[n];
  if (d == -1) return out;
  Dart c = d;
  do {
    out.push_back(c);
    c = nxt_[c];
  } while (c != d);
  return out;
}

std::vector<VertexId> Overlay::graph_vertex_ids() const {
  std::vector<VertexId> out;
  for (const Node& n : nodes_)
    if (n.alive && n.kind == NodeKind::Vertex) out.push_back(n.vertex);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EdgeId> Overlay::graph_edge_ids() const {
  std::set<EdgeId> s;
  for (const Arc& a : arcs_)
    if (a.alive && a.kind == ArcKind::EdgePiece) s.insert(a.edge);
  return std::vector<EdgeId>(s.begin(), s.end());
}

Overlay::NodeId Overlay::node_of_vertex(VertexId v) const {
  for (int i = 0; i < int(nodes_.size()); ++i)
    if (nodes_[i].alive && nodes_[i].kind == NodeKind::Vertex && nodes_[i].vertex == v)
      return i;
  throw OverlayError("unknown vertex");
}

std::vector<Overlay::Dart> Overlay::edge_chain(EdgeId e) const {
  // Chain starts: the edge pieces of e leaving a Vertex node (one per end).
  std::vector<Dart> ends;
  for (ArcId a : arc_ids()) {
    if (arcs_[a].kind != ArcKind::EdgePiece || arcs_[a].edge != e) continue;
    for (Dart d : {2 * a, 2 * a + 1})
      if (nodes_[org_[d]].kind == NodeKind::Vertex) ends.push_back(d);
  }
  if (ends.empty()) throw OverlayError("unknown edge");
  // Normally two ends; four while a freshly inserted vertex interrupts the
  // chain (the walk below then covers the start side only).
  if (ends.size() != 2 && ends.size() != 4) throw OverlayError("broken edge chain");
  // Start from the endpoint with the smallest vertex id for determinism.
  Dart start = ends[0];
  for (Dart d : ends)
    if (nodes_[org_[d]].vertex < nodes_[org_[start]].vertex) start = d;
  std::vector<Dart> chain;
  Dart d = start;
  while (true) {
    chain.push_back(d);
    NodeId t = org_[twin(d)];
    if (nodes_[t].kind == NodeKind::Vertex) break;
    Dart nd = -1;
    for (Dart d2 : out_darts(t))
      if (d2 != twin(d) && arcs_[arc_of(d2)].kind == ArcKind::EdgePiece &&
          arcs_[arc_of(d2)].edge == e)
        nd = d2;
    if (nd == -1) throw OverlayError("broken edge chain");
    d = nd;
  }
  return chain;
}

std::pair<VertexId, VertexId> Overlay::edge_ends(EdgeId e) const {
  auto chain = edge_chain(e);
  return {nodes_[org_[chain.front()]].vertex, nodes_[org_[twin(chain.back())]].vertex};
}

LineIdx Overlay::edge_on_line(EdgeId e) const {
  for (ArcId a : arc_ids())
    if (arcs_[a].kind == ArcKind::EdgePiece && arcs_[a].edge == e) return arcs_[a].line;
  throw OverlayError("unknown edge");
}

std::vector<LineIdx> Overlay::edge_crossings(EdgeId e) const {
  std::set<LineIdx> s;
  LineIdx own = edge_on_line(e);
  for (Dart d : edge_chain(e)) {
    NodeId t = org_[twin(d)];
    if (nodes_[t].kind == NodeKind::EdgeCross)
      for (LineIdx i : nodes_[t].lines)
        if (i != own) s.insert(i);
  }
  return std::vector<LineIdx>(s.begin(), s.end());
}

std::vector<LineIdx> Overlay::vertex_lines(VertexId v) const {
  return nodes_[node_of_vertex(v)].lines;
}

int Overlay::graph_degree(VertexId v) const {
  int c = 0;
  for (Dart d : out_darts(node_of_vertex(v)))
    if (arcs_[arc_of(d)].kind == ArcKind::EdgePiece) ++c;
  return c;
}

std::vector<Overlay::Dart> Overlay::line_chain(LineIdx i) const {
  auto on_line = [&](ArcId a) {
    return arcs_[a].alive &&
           ((arcs_[a].kind == ArcKind::LinePiece && arcs_[a].line == i) ||
            (arcs_[a].kind == ArcKind::EdgePiece && arcs_[a].line == i));
  };
  Dart start = -1;
  for (ArcId a : arc_ids())
    if (on_line(a) && nodes_[org_[2 * a]].kind == NodeKind::Frame) start = 2 * a;
  if (start == -1) throw OverlayError("line has no frame start");
  std::vector<Dart> chain;
  Dart d = start;
  while (true) {
    chain.push_back(d);
    NodeId t = org_[twin(d)];
    if (nodes_[t].kind == NodeKind::Frame) break;
    Dart nd = -1;
    for (Dart d2 : out_darts(t))
      if (d2 != twin(d) && on_line(arc_of(d2))) nd = d2;
    if (nd == -1) throw OverlayError("broken line chain");
    d = nd;
  }
  return chain;
}

Overlay::Dart Overlay::isolated_anchor(VertexId v) const {
  NodeId n = node_of_vertex(v);
  if (nrep_[n] != -1 || isolated_anchor_[n] == -1)
    throw OverlayError("vertex is not isolated");
  return isolated_anchor_[n];
}

// --------------------------------------------------------------------------
// derived decomposition

void Overlay::ensure_derived() const {
  if (derived_valid_) return;
  int nd = int(org_.size());
  std::vector<int> walk_of(nd, -1);
  std::vector<std::vector<Dart>> walks;
  for (Dart d = 0; d < nd; ++d) {
    if (!arcs_[arc_of(d)].alive || walk_of[d] != -1) continue;
    std::vector<Dart> w;
    Dart c = d;
    do {
      walk_of[c] = int(walks.size());
      w.push_back(c);
      c = face_next(c);
    } while (c != d);
    walks.push_back(std::move(w));
  }
  DSU uf(int(walks.size()));
  for (const auto& pr : nest_pairs_) {
    if (!arcs_[arc_of(pr.first)].alive || !arcs_[arc_of(pr.second)].alive)
      throw OverlayError("stale nesting reference");
    uf.unite(walk_of[pr.first], walk_of[pr.second]);
  }
  // Region ids: ascending order of the smallest dart in the class.
  std::map<int, std::vector<int>> classes;  // root -> walk ids
  for (int w = 0; w < int(walks.size()); ++w) classes[uf.find(w)].push_back(w);
  std::vector<std::pair<Dart, int>> order;  // (min dart, root)
  for (auto& [root, ws] : classes) {
    Dart mn = walks[ws.front()].front();
    for (int w : ws) mn = std::min(mn, walks[w].front());
    order.push_back({mn, root});
  }
  std::sort(order.begin(), order.end());
  regions_.clear();
  region_of_dart_.assign(nd, -1);
  std::map<int, RegionId> region_of_root;
  for (auto& [mn, root] : order) {
    Region r;
    r.id = RegionId(regions_.size());
    for (int w : classes[root])
      for (Dart d : walks[w]) {
        r.boundary.push_back(d);
        region_of_dart_[d] = r.id;
      }
    region_of_root[root] = r.id;
    regions_.push_back(std::move(r));
  }
  // Outside region: right of a counterclockwise frame dart.
  outside_ = -1;
  for (ArcId a : arc_ids())
    if (arcs_[a].kind == ArcKind::FramePiece) {
      outside_ = region_of_dart_[2 * a + 1];
      break;
    }
  if (outside_ == -1) throw OverlayError("overlay has no frame");

  int nr = int(regions_.size());
  DSU gf(nr), cl(nr);
  for (ArcId a : arc_ids()) {
    RegionId l = region_of_dart_[2 * a], r = region_of_dart_[2 * a + 1];
    if (arcs_[a].kind != ArcKind::EdgePiece) gf.unite(l, r);
    if (arcs_[a].kind == ArcKind::EdgePiece && arcs_[a].line < 0) cl.unite(l, r);
  }
  std::map<int, int> gfid, clid;
  for (int r = 0; r < nr; ++r) {
    int g = gf.find(r);
    if (!gfid.count(g)) gfid[g] = int(gfid.size());
    regions_[r].graph_face = gfid[g];
  }
  n_graph_faces_ = int(gfid.size());
  for (int r = 0; r < nr; ++r) {
    if (cl.find(r) == cl.find(outside_)) {
      regions_[r].cell = -1;
      continue;
    }
    int c = cl.find(r);
    if (!clid.count(c)) clid[c] = int(clid.size());
    regions_[r].cell = clid[c];
  }
  n_cells_ = int(clid.size());
  for (ArcId a : arc_ids())
    if (arcs_[a].kind == ArcKind::FramePiece) {
      RegionId inside = region_of_dart_[2 * a];
      if (regions_[inside].cell >= 0)
        for (Region& rg : regions_)
          if (rg.cell == regions_[inside].cell) rg.cell_unbounded = true;
    }

  // Per-cell side of each line: +1 left of the traversal direction.
  // Propagate relative signs across regions, then fix each line's offset.
  std::vector<std::vector<int>> rel(nr);
  std::vector<char> seen(nr, 0);
  std::vector<int> stack;
  auto arc_flips = [&](ArcId a) -> LineIdx {
    if (arcs_[a].kind == ArcKind::LinePiece) return arcs_[a].line;
    if (arcs_[a].kind == ArcKind::EdgePiece) return arcs_[a].line;  // -1 if free
    return -2;                                                      // frame: no traversal
  };
  std::vector<std::vector<std::pair<int, ArcId>>> adj(nr);
  for (ArcId a : arc_ids()) {
    if (arcs_[a].kind == ArcKind::FramePiece) continue;
    RegionId l = region_of_dart_[2 * a], r = region_of_dart_[2 * a + 1];
    if (l == outside_ || r == outside_) continue;
    adj[l].push_back({r, a});
    adj[r].push_back({l, a});
  }
  int root = (outside_ == 0) ? 1 : 0;
  rel[root].assign(k_, 1);
  seen[root] = 1;
  stack.push_back(root);
  while (!stack.empty()) {
    int r = stack.back();
    stack.pop_back();
    for (auto [s, a] : adj[r]) {
      if (s == outside_ || seen[s]) continue;
      rel[s] = rel[r];
      seen[s] = 1;
      LineIdx fl = arc_flips(a);
      if (fl >= 0) rel[s][fl] = -rel[s][fl];
      stack.push_back(s);
    }
  }
  std::vector<int> offset(k_, 0);
  for (ArcId a : arc_ids()) {
    LineIdx i = arc_flips(a);
    if (i < 0) continue;
    RegionId l = region_of_dart_[2 * a];
    if (l == outside_ || !seen[l]) continue;
    if (offset[i] == 0) offset[i] = rel[l][i];  // make the left side +1
  }
  // Consistency: every arc must agree with the propagated signs.
  for (ArcId a : arc_ids()) {
    if (arcs_[a].kind == ArcKind::FramePiece) continue;
    RegionId l = region_of_dart_[2 * a], r = region_of_dart_[2 * a + 1];
    if (l == outside_ || r == outside_) continue;
    if (!seen[l] || !seen[r]) throw OverlayError("disconnected interior");
    LineIdx fl = arc_flips(a);
    for (LineIdx i = 0; i < k_; ++i) {
      bool should_flip = (fl == i);
      if ((rel[l][i] == rel[r][i]) == should_flip)
        throw OverlayError("inconsistent region sides");
    }
    if (fl >= 0 && offset[fl] != 0 && rel[l][fl] * offset[fl] != 1)
      throw OverlayError("inconsistent line orientation");
  }
  cell_signs_.assign(n_cells_, std::vector<int>(k_, 0));
  for (int r = 0; r < nr; ++r) {
    if (regions_[r].cell < 0 || !seen[r]) continue;
    for (LineIdx i = 0; i < k_; ++i)
      cell_signs_[regions_[r].cell][i] = rel[r][i] * (offset[i] == 0 ? 1 : offset[i]);
  }
  derived_valid_ = true;
}

const std::vector<Overlay::Region>& Overlay::regions() const {
  ensure_derived();
  return regions_;
}

Overlay::RegionId Overlay::region_of(Dart d) const {
  ensure_derived();
  return region_of_dart_[d];
}

Overlay::RegionId Overlay::outside_region() const {
  ensure_derived();
  return outside_;
}

int Overlay::n_graph_faces() const {
  ensure_derived();
  return n_graph_faces_;
}

int Overlay::n_cells() const {
  ensure_derived();
  return n_cells_;
}

const std::vector<std::vector<int>>& Overlay::cell_signs() const {
  ensure_derived();
  return cell_signs_;
}

// --------------------------------------------------------------------------
// geometric construction

Overlay Overlay::from_geometry(const EmbeddedGraph& g, const std::vector<Point>& pos,
                               const LineArrangement& a) {
  std::vector<Point> pts;
  for (VertexId v : g.vertex_ids()) pts.push_back(pos.at(v));
  for (const Point& p : a.intersections()) pts.push_back(p);
  for (const Line& l : a.lines) pts.push_back(l.origin());
  if (pts.empty()) pts.push_back(Point{Rat(0), Rat(0)});
  BBox bb = bbox_of(pts);
  Rat margin = (bb.xmax - bb.xmin) + (bb.ymax - bb.ymin) + 1;
  bb.xmin = bb.xmin - margin;
  bb.ymin = bb.ymin - margin;
  bb.xmax = bb.xmax + margin;
  bb.ymax = bb.ymax + margin;
  // Nudge the frame until no line passes through a corner.
  for (int tries = 0; tries < 1000; ++tries) {
    bool bad = false;
    Point corners[4] = {{bb.xmin, bb.ymin}, {bb.xmax, bb.ymin},
                        {bb.xmax, bb.ymax}, {bb.xmin, bb.ymax}};
    for (const Line& l : a.lines)
      for (const Point& c : corners)
        if (side_of_line(l, c) == 0) bad = true;
    if (!bad) return from_geometry(g, pos, a, bb);
    switch (tries % 4) {
      case 0: bb.xmax = bb.xmax + 1; break;
      case 1: bb.ymax = bb.ymax + 1; break;
      case 2: bb.xmin = bb.xmin - 1; break;
      case 3: bb.ymin = bb.ymin - 1; break;
    }
  }
  throw OverlayError("could not choose a frame");
}

Overlay Overlay::from_geometry(const EmbeddedGraph& g, const std::vector<Point>& pos,
                               const LineArrangement& a, const BBox& frame) {
  if (a.lines.size() >= 2) a.validate();
  Overlay o;
  o.k_ = int(a.lines.size());

  auto inside = [&](const Point& p) {
    return p.x > frame.xmin && p.x < frame.xmax && p.y > frame.ymin && p.y < frame.ymax;
  };
  std::vector<VertexId> vids = g.vertex_ids();
  std::map<Point, NodeId, PointLess> node_at;
  std::vector<Point> npos;  // per node
  auto add_node = [&](const Point& p, Node n) {
    NodeId id = o.new_node(std::move(n));
    node_at[p] = id;
    npos.push_back(p);
    return id;
  };

  for (VertexId v : vids) {
    const Point& p = pos.at(v);
    if (!inside(p)) throw OverlayError("vertex outside the frame");
    if (node_at.count(p)) throw OverlayError("coincident vertices");
    Node n;
    n.kind = NodeKind::Vertex;
    n.vertex = v;
    for (int i = 0; i < o.k_; ++i)
      if (side_of_line(a.lines[i], p) == 0) n.lines.push_back(i);
    add_node(p, std::move(n));
  }

  // Planarity of the witness drawing.
  std::vector<EdgeId> eids = g.edge_ids();
  for (size_t i = 0; i < eids.size(); ++i) {
    auto [u1, v1] = g.edge_ends(eids[i]);
    for (size_t j = i + 1; j < eids.size(); ++j) {
      auto [u2, v2] = g.edge_ends(eids[j]);
      SegX sx = segment_intersection(pos.at(u1), pos.at(v1), pos.at(u2), pos.at(v2));
      if (sx.kind == SegXKind::None) continue;
      if (sx.kind == SegXKind::Overlap) throw OverlayError("overlapping edges in witness");
      bool shared = (sx.at == pos.at(u1) || sx.at == pos.at(v1)) &&
                    (sx.at == pos.at(u2) || sx.at == pos.at(v2));
      if (!shared) throw OverlayError("crossing edges in witness");
    }
    for (VertexId w : vids) {
      if (w == u1 || w == v1) continue;
      if (on_segment(pos.at(u1), pos.at(w), pos.at(v1)))
        throw OverlayError("vertex in the interior of an edge");
    }
  }

  // Aligned edges and edge-line crossings.
  std::map<EdgeId, LineIdx> on_line;
  for (EdgeId e : eids) {
    auto [u, v] = g.edge_ends(e);
    for (int i = 0; i < o.k_; ++i)
      if (side_of_line(a.lines[i], pos.at(u)) == 0 && side_of_line(a.lines[i], pos.at(v)) == 0) {
        if (on_line.count(e)) throw OverlayError("edge on two lines");
        on_line[e] = i;
      }
  }
  std::map<EdgeId, std::map<Point, std::vector<LineIdx>, PointLess>> edge_hits;
  for (EdgeId e : eids) {
    auto [u, v] = g.edge_ends(e);
    for (int i = 0; i < o.k_; ++i) {
      if (on_line.count(e) && on_line[e] == i) continue;
      int su = side_of_line(a.lines[i], pos.at(u));
      int sv = side_of_line(a.lines[i], pos.at(v));
      if (su * sv < 0) {
        auto p = line_intersection(a.lines[i], Line::through(pos.at(u), pos.at(v)));
        edge_hits[e][*p].push_back(i);
      }
    }
  }
  for (auto& [e, hits] : edge_hits) {
    bool aligned = on_line.count(e) > 0;
    for (auto& [p, ls] : hits) {
      if (!aligned && ls.size() > 1)
        throw OverlayError("pseudoline crossing in the interior of an edge");
      Node n;
      n.kind = NodeKind::EdgeCross;
      n.edge = e;
      n.lines = ls;
      if (aligned) n.lines.push_back(on_line[e]);
      std::sort(n.lines.begin(), n.lines.end());
      if (node_at.count(p)) throw OverlayError("coincident crossing points");
      add_node(p, std::move(n));
    }
  }

  // Line-line crossings not on a vertex or an aligned edge.
  for (int i = 0; i < o.k_; ++i)
    for (int j = i + 1; j < o.k_; ++j) {
      auto p = line_intersection(a.lines[i], a.lines[j]);
      if (!p) throw OverlayError("parallel lines");
      if (!inside(*p)) throw OverlayError("line crossing outside the frame");
      auto it = node_at.find(*p);
      if (it != node_at.end()) {
        Node& n = o.nodes_[it->second];
        if (n.kind == NodeKind::EdgeCross && !on_line.count(n.edge))
          throw OverlayError("pseudoline crossing in the interior of an edge");
        for (LineIdx l : {i, j})
          if (std::find(n.lines.begin(), n.lines.end(), l) == n.lines.end())
            n.lines.push_back(l);
        std::sort(n.lines.begin(), n.lines.end());
      } else {
        // Not on a vertex; check it is not interior to a plain edge (it would
        // have been recorded above as a multi-line edge hit).
        Node n;
        n.kind = NodeKind::LineCross;
        n.lines = {i, j};
        add_node(*p, std::move(n));
      }
    }

  // Frame nodes: corners plus line exits, ordered counterclockwise.
  Point c0{frame.xmin, frame.ymin}, c1{frame.xmax, frame.ymin}, c2{frame.xmax, frame.ymax},
      c3{frame.xmin, frame.ymax};
  struct BNode {
    int side;
    Rat t;  // position along the side
    NodeId id;
  };
  std::vector<BNode> bnodes;
  auto add_frame_node = [&](const Point& p, std::vector<LineIdx> ls, int side, Rat t) {
    if (node_at.count(p)) throw OverlayError("degenerate frame contact");
    Node n;
    n.kind = NodeKind::Frame;
    n.lines = std::move(ls);
    NodeId id = add_node(p, std::move(n));
    bnodes.push_back({side, t, id});
    return id;
  };
  add_frame_node(c0, {}, 0, Rat(0));
  add_frame_node(c1, {}, 1, Rat(0));
  add_frame_node(c2, {}, 2, Rat(0));
  add_frame_node(c3, {}, 3, Rat(0));
  Line sides[4] = {Line::through(c0, c1), Line::through(c1, c2), Line::through(c2, c3),
                   Line::through(c3, c0)};
  Point side_start[4] = {c0, c1, c2, c3};
  Point side_end[4] = {c1, c2, c3, c0};
  for (int i = 0; i < o.k_; ++i) {
    int found = 0;
    for (int s = 0; s < 4; ++s) {
      auto p = line_intersection(a.lines[i], sides[s]);
      if (!p) continue;
      if (!on_segment(side_start[s], *p, side_end[s])) continue;
      if (*p == side_start[s] || *p == side_end[s])
        throw OverlayError("line through a frame corner");
      Rat t = (s % 2 == 0) ? (p->x - side_start[s].x) * (s == 0 ? 1 : -1)
                           : (p->y - side_start[s].y) * (s == 1 ? 1 : -1);
      add_frame_node(*p, {i}, s, t);
      ++found;
    }
    if (found != 2) throw OverlayError("line does not cross the frame twice");
  }
  std::sort(bnodes.begin(), bnodes.end(), [](const BNode& x, const BNode& y) {
    if (x.side != y.side) return x.side < y.side;
    return x.t < y.t;
  });

  // Edge piece arcs.
  for (EdgeId e : eids) {
    auto [u, v] = g.edge_ends(e);
    Point pu = pos.at(u), pv = pos.at(v);
    std::vector<std::pair<Rat, NodeId>> stops;
    stops.push_back({Rat(0), node_at.at(pu)});
    if (edge_hits.count(e))
      for (auto& [p, ls] : edge_hits[e]) {
        Rat t = (p.x - pu.x) * (pv.x - pu.x) + (p.y - pu.y) * (pv.y - pu.y);
        stops.push_back({t, node_at.at(p)});
      }
    Rat tend = (pv.x - pu.x) * (pv.x - pu.x) + (pv.y - pu.y) * (pv.y - pu.y);
    stops.push_back({tend, node_at.at(pv)});
    std::sort(stops.begin(), stops.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (size_t s = 0; s + 1 < stops.size(); ++s) {
      Arc arc;
      arc.kind = ArcKind::EdgePiece;
      arc.edge = e;
      arc.line = on_line.count(e) ? on_line[e] : -1;
      o.new_arc(std::move(arc), stops[s].second, stops[s + 1].second);
    }
  }

  // Line piece arcs.
  for (int i = 0; i < o.k_; ++i) {
    std::vector<std::pair<Rat, NodeId>> stops;
    for (auto& [p, id] : node_at) {
      const Node& n = o.nodes_[id];
      if (std::find(n.lines.begin(), n.lines.end(), i) != n.lines.end())
        stops.push_back({a.lines[i].param_of(p), id});
    }
    std::sort(stops.begin(), stops.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (size_t s = 0; s + 1 < stops.size(); ++s) {
      Point m{(npos[stops[s].second].x + npos[stops[s + 1].second].x) / 2,
              (npos[stops[s].second].y + npos[stops[s + 1].second].y) / 2};
      bool covered = false;
      for (auto& [e, li] : on_line) {
        if (li != i) continue;
        auto [u, v] = g.edge_ends(e);
        if (on_segment(pos.at(u), m, pos.at(v))) covered = true;
      }
      if (covered) continue;
      Arc arc;
      arc.kind = ArcKind::LinePiece;
      arc.line = i;
      o.new_arc(std::move(arc), stops[s].second, stops[s + 1].second);
    }
  }

  // Frame piece arcs (counterclockwise).
  for (size_t s = 0; s < bnodes.size(); ++s) {
    Arc arc;
    arc.kind = ArcKind::FramePiece;
    o.new_arc(std::move(arc), bnodes[s].id, bnodes[(s + 1) % bnodes.size()].id);
  }

  // Rotations: sort out-darts counterclockwise by direction.
  {
    std::vector<std::vector<Dart>> at(o.nodes_.size());
    for (ArcId arc = 0; arc < int(o.arcs_.size()); ++arc) {
      at[o.org_[2 * arc]].push_back(2 * arc);
      at[o.org_[2 * arc + 1]].push_back(2 * arc + 1);
    }
    for (NodeId n = 0; n < int(o.nodes_.size()); ++n) {
      auto& ds = at[n];
      if (ds.empty()) continue;
      Point pn = npos[n];
      std::sort(ds.begin(), ds.end(), [&](Dart x, Dart y) {
        Point dx{npos[o.org_[x ^ 1]].x - pn.x, npos[o.org_[x ^ 1]].y - pn.y};
        Point dy{npos[o.org_[y ^ 1]].x - pn.x, npos[o.org_[y ^ 1]].y - pn.y};
        return angle_less(dx, dy);
      });
      for (size_t q = 0; q < ds.size(); ++q) {
        Dart cur = ds[q], nxt = ds[(q + 1) % ds.size()];
        o.nxt_[cur] = nxt;
        o.prv_[nxt] = cur;
      }
      o.nrep_[n] = ds.front();
    }
  }

  // Nesting: find the enclosing boundary walk for every component that does
  // not reach the frame, and the anchor region for isolated vertices.
  {
    int nn = int(o.nodes_.size());
    DSU comp(nn);
    for (ArcId arc = 0; arc < int(o.arcs_.size()); ++arc)
      comp.unite(o.org_[2 * arc], o.org_[2 * arc + 1]);
    int frame_comp = comp.find(node_at.at(c0));
    // Boundary walks with signed areas.
    int ndarts = int(o.org_.size());
    std::vector<int> walk_of(ndarts, -1);
    std::vector<std::vector<Dart>> walks;
    std::vector<Rat> area2;
    for (Dart d = 0; d < ndarts; ++d) {
      if (walk_of[d] != -1) continue;
      std::vector<Dart> w;
      Rat ar = 0;
      Dart c = d;
      do {
        walk_of[c] = int(walks.size());
        w.push_back(c);
        Dart e = o.face_next(c);
        const Point& p1 = npos[o.org_[c]];
        const Point& p2 = npos[o.org_[e]];
        ar += p1.x * p2.y - p2.x * p1.y;
        c = e;
      } while (c != d);
      walks.push_back(std::move(w));
      area2.push_back(ar);
    }
    auto winding = [&](const std::vector<Dart>& w, const Point& p) {
      long long wn = 0;
      for (Dart d : w) {
        const Point& pa = npos[o.org_[d]];
        const Point& pb = npos[o.org_[o.face_next(d)]];
        if (pa.y <= p.y) {
          if (pb.y > p.y && orient(pa, pb, p) > 0) ++wn;
        } else {
          if (pb.y <= p.y && orient(pa, pb, p) < 0) --wn;
        }
      }
      return wn;
    };
    std::map<int, std::vector<NodeId>> comps;
    for (NodeId n = 0; n < nn; ++n)
      if (o.nodes_[n].alive) comps[comp.find(n)].push_back(n);
    for (auto& [root, members] : comps) {
      if (root == frame_comp) continue;
      // Reference point: the position of any member node.
      Point p = npos[members.front()];
      int best = -1;
      for (int w = 0; w < int(walks.size()); ++w) {
        if (comp.find(o.org_[walks[w].front()]) == root) continue;
        if (area2[w] <= 0) continue;
        if (winding(walks[w], p) == 0) continue;
        if (best == -1 || area2[w] < area2[best]) best = w;
      }
      if (best == -1) throw OverlayError("component enclosure not found");
      // The component's own outer walk: non-positive area.
      int own = -1;
      for (int w = 0; w < int(walks.size()); ++w)
        if (comp.find(o.org_[walks[w].front()]) == root && area2[w] <= 0) own = w;
      if (own == -1) {
        // Isolated node component.
        if (members.size() != 1 || o.nrep_[members.front()] != -1)
          throw OverlayError("component without boundary walk");
        o.isolated_anchor_[members.front()] = walks[best].front();
      } else {
        o.nest_pairs_.push_back({walks[best].front(), walks[own].front()});
      }
    }
  }

  // The witness must realize g's embedding: rotation check per vertex.
  for (VertexId v : vids) {
    NodeId n = node_at.at(pos.at(v));
    std::vector<VertexId> got;
    for (Dart d : o.out_darts(n)) {
      if (o.arcs_[arc_of(d)].kind != ArcKind::EdgePiece) continue;
      EdgeId e = o.arcs_[arc_of(d)].edge;
      auto [x, y] = g.edge_ends(e);
      got.push_back(x == v ? y : x);
    }
    std::vector<VertexId> want = g.neighbors_ccw(v);
    if (got.size() != want.size()) throw OverlayError("witness degree mismatch");
    bool ok = got.empty();
    for (size_t r = 0; r < got.size() && !ok; ++r) {
      bool match = true;
      for (size_t q = 0; q < want.size(); ++q)
        if (got[(r + q) % got.size()] != want[q]) match = false;
      ok = match;
    }
    if (!ok) throw OverlayError("witness does not realize the embedding");
  }

  // Outer face check: the edges seen from the outside must be g's outer walk.
  if (!eids.empty()) {
    o.ensure_derived();
    int outer_class = o.regions_[o.outside_].graph_face;
    std::set<HalfEdge> got;
    for (const Region& r : o.regions_) {
      if (r.graph_face != outer_class) continue;
      for (Dart d : r.boundary) {
        const Arc& arc = o.arcs_[arc_of(d)];
        if (arc.kind != ArcKind::EdgePiece) continue;
        // Orient: does d run with the chain (u -> v)?
        auto chain = o.edge_chain(arc.edge);
        bool fwd = std::find(chain.begin(), chain.end(), d) != chain.end();
        auto [u, v] = o.edge_ends(arc.edge);
        auto h = fwd ? g.half_edge(u, v) : g.half_edge(v, u);
        if (!h) throw OverlayError("edge mismatch with witness");
        got.insert(*h);
      }
    }
    std::set<HalfEdge> want;
    for (HalfEdge h : g.outer_walk()) want.insert(h);
    if (got != want) throw OverlayError("witness outer face does not match the embedding");
  }
  return o;
}

// --------------------------------------------------------------------------
// exports

PseudolineSystem Overlay::derive_system() const {
  PseudolineSystem s;
  s.k = k_;
  s.crossing_order.resize(k_);
  for (LineIdx i = 0; i < k_; ++i) {
    for (Dart d : line_chain(i)) {
      NodeId t = org_[twin(d)];
      const Node& n = nodes_[t];
      if (n.kind == NodeKind::Frame) break;
      Group grp;
      for (LineIdx j : n.lines)
        if (j != i) grp.push_back(j);
      if (!grp.empty()) s.crossing_order[i].push_back(grp);
    }
  }
  return s;
}

Overlay::Export Overlay::export_aligned() const {
  ensure_derived();
  Export ex;
  ex.vertex_of = graph_vertex_ids();
  ex.edge_of = graph_edge_ids();
  for (int i = 0; i < int(ex.vertex_of.size()); ++i) ex.vertex_to[ex.vertex_of[i]] = i;
  for (int i = 0; i < int(ex.edge_of.size()); ++i) ex.edge_to[ex.edge_of[i]] = i;

  auto far_end = [&](Dart d) -> VertexId {
    EdgeId e = arcs_[arc_of(d)].edge;
    while (true) {
      NodeId t = org_[twin(d)];
      if (nodes_[t].kind == NodeKind::Vertex) return nodes_[t].vertex;
      Dart nd = -1;
      for (Dart d2 : out_darts(t))
        if (d2 != twin(d) && arcs_[arc_of(d2)].kind == ArcKind::EdgePiece &&
            arcs_[arc_of(d2)].edge == e)
          nd = d2;
      if (nd == -1) throw OverlayError("broken edge chain");
      d = nd;
    }
  };

  std::vector<std::vector<VertexId>> rot(ex.vertex_of.size());
  for (size_t i = 0; i < ex.vertex_of.size(); ++i) {
    NodeId n = node_of_vertex(ex.vertex_of[i]);
    for (Dart d : out_darts(n))
      if (arcs_[arc_of(d)].kind == ArcKind::EdgePiece)
        rot[i].push_back(ex.vertex_to.at(far_end(d)));
  }

  // Outer walk: walk the graph face containing the outside region.
  int outer_class = regions_[outside_].graph_face;
  auto next_in_class = [&](Dart d) {
    Dart e = face_next(d);
    while (arcs_[arc_of(e)].kind != ArcKind::EdgePiece) e = face_next(twin(e));
    return e;
  };
  std::vector<VertexId> outer_walk;
  if (!ex.edge_of.empty()) {
    Dart start = -1;
    for (ArcId a : arc_ids()) {
      if (arcs_[a].kind != ArcKind::EdgePiece) continue;
      for (Dart d : {2 * a, 2 * a + 1})
        if (regions_[region_of_dart_[d]].graph_face == outer_class && start == -1) start = d;
      if (start != -1) break;
    }
    if (start == -1) throw OverlayError("no outer boundary edge");
    Dart d = start;
    do {
      if (nodes_[org_[d]].kind == NodeKind::Vertex)
        outer_walk.push_back(ex.vertex_to.at(nodes_[org_[d]].vertex));
      d = next_in_class(d);
    } while (d != start);
  }

  EmbeddedGraph eg = EmbeddedGraph::from_rotations(rot, outer_walk);
  if (!ex.vertex_of.empty() && !eg.is_connected())
    throw OverlayError("export requires a connected graph");

  // Exported edge ids may differ from our dense numbering: recover the
  // correspondence through endpoint pairs (the graph is simple).
  std::vector<EdgeId> export_edge(ex.edge_of.size(), -1);
  for (size_t i = 0; i < ex.edge_of.size(); ++i) {
    auto [u, v] = edge_ends(ex.edge_of[i]);
    auto h = eg.half_edge(ex.vertex_to.at(u), ex.vertex_to.at(v));
    if (!h) throw OverlayError("exported edge missing");
    export_edge[i] = EmbeddedGraph::edge_of(*h);
  }
  std::map<EdgeId, EdgeId> eg_edge;  // overlay edge -> exported edge
  for (size_t i = 0; i < ex.edge_of.size(); ++i) eg_edge[ex.edge_of[i]] = export_edge[i];
  {
    std::vector<EdgeId> by_export(ex.edge_of.size(), -1);
    for (size_t i = 0; i < ex.edge_of.size(); ++i) by_export[export_edge[i]] = ex.edge_of[i];
    ex.edge_of = by_export;
    ex.edge_to.clear();
    for (int i = 0; i < int(ex.edge_of.size()); ++i) ex.edge_to[ex.edge_of[i]] = i;
  }

  // Region -> exported face.
  auto faces = eg.faces();
  std::vector<FaceId> face_of_half;
  for (const auto& f : faces)
    for (HalfEdge h : f.boundary) {
      if (h >= int(face_of_half.size())) face_of_half.resize(h + 1, -1);
      face_of_half[h] = f.id;
    }
  // For each graph-face class, locate one edge dart and read its face.
  std::vector<FaceId> class_face(n_graph_faces_, -1);
  if (ex.edge_of.empty()) class_face.assign(n_graph_faces_, 0);
  for (const Region& r : regions_) {
    if (class_face[r.graph_face] != -1) continue;
    for (Dart d : r.boundary) {
      const Arc& arc = arcs_[arc_of(d)];
      if (arc.kind != ArcKind::EdgePiece) continue;
      auto chain = edge_chain(arc.edge);
      bool fwd = std::find(chain.begin(), chain.end(), d) != chain.end();
      auto [u, v] = edge_ends(arc.edge);
      auto h = fwd ? eg.half_edge(ex.vertex_to.at(u), ex.vertex_to.at(v))
                   : eg.half_edge(ex.vertex_to.at(v), ex.vertex_to.at(u));
      class_face[r.graph_face] = face_of_half[*h];
      break;
    }
  }
  for (FaceId f : class_face)
    if (f == -1) throw OverlayError("graph face without boundary edge");
  ex.face_of_region.clear();
  for (const Region& r : regions_) ex.face_of_region.push_back(class_face[r.graph_face]);

  // Traces.
  std::vector<PseudolineTrace> traces;
  for (LineIdx i = 0; i < k_; ++i) {
    PseudolineTrace t;
    t.line = i;
    auto emit = [&](TraceEvent e) { t.events.push_back(e); };
    auto chain = line_chain(i);
    for (Dart d : chain) {
      const Arc& arc = arcs_[arc_of(d)];
      if (arc.kind == ArcKind::LinePiece) {
        emit(ev_face(class_face[regions_[region_of_dart_[d]].graph_face]));
      } else {  // piece of an edge contained in this line
        EdgeId e = eg_edge.at(arc.edge);
        if (t.events.empty() || t.events.back() != ev_along(e)) emit(ev_along(e));
      }
      NodeId nt = org_[twin(d)];
      const Node& n = nodes_[nt];
      switch (n.kind) {
        case NodeKind::Frame:
          break;
        case NodeKind::Vertex:
          emit(ev_through(ex.vertex_to.at(n.vertex)));
          break;
        case NodeKind::EdgeCross: {
          LineIdx own = edge_on_line(n.edge);
          if (own == i) break;  // tie on this line's own edge
          emit(ev_cross_edge(eg_edge.at(n.edge)));
          break;
        }
        case NodeKind::LineCross:
          for (LineIdx j : n.lines)
            if (j != i) emit(ev_cross_line(j));
          break;
      }
    }
    traces.push_back(std::move(t));
  }

  ex.ag = AlignedGraph::make(std::move(eg), derive_system(), std::move(traces));
  return ex;
}

// --------------------------------------------------------------------------
// surgery

VertexId Overlay::add_isolated_vertex(Dart anchor) {
  if (!arcs_[arc_of(anchor)].alive) throw OverlayError("dead anchor");
  Node n;
  n.kind = NodeKind::Vertex;
  n.vertex = fresh_vertex_id();
  NodeId id = new_node(std::move(n));
  isolated_anchor_[id] = anchor;
  touch();
  return nodes_[id].vertex;
}

EdgeId Overlay::add_edge(VertexId u, Dart corner_u, const std::vector<PathStep>& steps,
                         VertexId v, Dart corner_v) {
  ensure_derived();
  NodeId nu = node_of_vertex(u), nv = node_of_vertex(v);
  RegionId r;
  if (corner_u == -1) {
    if (nrep_[nu] != -1) throw OverlayError("start corner required");
    r = region_of_dart_[isolated_anchor_[nu]];
  } else {
    if (org_[corner_u] != nu) throw OverlayError("start corner not at start vertex");
    r = region_of_dart_[twin(corner_u)];
  }
  struct Plan {
    ArcId arc;
    bool from_left;
  };
  std::vector<Plan> plan;
  for (const PathStep& st : steps) {
    const Arc& a = arcs_[st.cross];
    if (!a.alive || a.kind != ArcKind::LinePiece)
      throw OverlayError("edges may only cross pseudoline pieces");
    RegionId rl = region_of_dart_[2 * st.cross], rr = region_of_dart_[2 * st.cross + 1];
    if (r == rl) {
      plan.push_back({st.cross, true});
      r = rr;
    } else if (r == rr) {
      plan.push_back({st.cross, false});
      r = rl;
    } else {
      throw OverlayError("path step not on the current region");
    }
  }
  RegionId r_end;
  if (corner_v == -1) {
    if (nrep_[nv] != -1) throw OverlayError("end corner required");
    r_end = region_of_dart_[isolated_anchor_[nv]];
  } else {
    if (org_[corner_v] != nv) throw OverlayError("end corner not at end vertex");
    r_end = region_of_dart_[twin(corner_v)];
  }
  if (r_end != r) throw OverlayError("path does not reach the end corner");

  EdgeId E = fresh_edge_id();
  // Joining two isolated vertices creates a floating component: remember the
  // enclosing region through the start vertex's anchor.
  Dart float_anchor = -1;
  if (corner_u == -1 && corner_v == -1 && steps.empty())
    float_anchor = isolated_anchor_[nu];
  NodeId prev = nu;
  Dart prev_corner = corner_u;  // -1 means attach isolated / at exit corner
  bool prev_isolated = (corner_u == -1);
  Dart prev_exit = -1;  // corner dart at an intermediate crossing node
  auto attach_start = [&](Dart d) {
    if (prev_exit != -1)
      attach_at_corner(d, prev_exit);
    else if (prev_isolated)
      attach_isolated(d, prev);
    else
      attach_at_corner(d, prev_corner);
  };
  for (const Plan& pl : plan) {
    Node mn;
    mn.kind = NodeKind::EdgeCross;
    mn.edge = E;
    mn.lines = {arcs_[pl.arc].line};
    NodeId m = new_node(std::move(mn));
    split_arc(pl.arc, m);
    Dart back = 2 * pl.arc + 1;        // at m, pointing backward along the line
    Dart fwd = nxt_[back];             // at m, pointing forward (second half)
    Dart in_corner = pl.from_left ? back : fwd;
    Dart out_corner = pl.from_left ? fwd : back;
    Arc pa;
    pa.kind = ArcKind::EdgePiece;
    pa.edge = E;
    ArcId ap = new_arc(std::move(pa), prev, m);
    attach_start(2 * ap);
    attach_at_corner(2 * ap + 1, in_corner);
    prev = m;
    prev_exit = out_corner;
    prev_isolated = false;
  }
  Arc pa;
  pa.kind = ArcKind::EdgePiece;
  pa.edge = E;
  ArcId ap = new_arc(std::move(pa), prev, nv);
  attach_start(2 * ap);
  if (corner_v == -1)
    attach_isolated(2 * ap + 1, nv);
  else
    attach_at_corner(2 * ap + 1, corner_v);
  if (float_anchor != -1) nest_pairs_.push_back({float_anchor, 2 * ap});
  touch();
  return E;
}

VertexId Overlay::split_edge(EdgeId e, int piece, EdgeId* left_id, EdgeId* right_id) {
  auto chain = edge_chain(e);
  if (piece < 0 || piece >= int(chain.size())) throw OverlayError("bad edge piece");
  auto [uid, vid] = edge_ends(e);
  ArcId a = arc_of(chain[piece]);
  Node wn;
  wn.kind = NodeKind::Vertex;
  wn.vertex = fresh_vertex_id();
  if (arcs_[a].line >= 0) wn.lines = {arcs_[a].line};
  VertexId w = wn.vertex;
  NodeId m = new_node(std::move(wn));
  split_arc(a, m);
  relabel_edge_sides(e, uid, vid, left_id, right_id);
  touch();
  return w;
}

// After a new Vertex node interrupts edge e's chain, give the two halves
// fresh edge ids: the half at endpoint `u` first.
void Overlay::relabel_edge_sides(EdgeId e, VertexId u, VertexId v, EdgeId* left_id,
                                 EdgeId* right_id) {
  EdgeId el = fresh_edge_id();
  EdgeId er = el + 1;
  // edge_chain stops at the interrupting vertex, so each call covers one side.
  auto relabel = [&](EdgeId fresh) {
    for (Dart d : edge_chain(e)) {
      arcs_[arc_of(d)].edge = fresh;
      NodeId t = org_[twin(d)];
      if (nodes_[t].kind == NodeKind::EdgeCross && nodes_[t].edge == e) nodes_[t].edge = fresh;
    }
  };
  // First pass starts from the smaller-id endpoint; assign sides afterwards.
  auto chain1 = edge_chain(e);
  VertexId start1 = nodes_[org_[chain1.front()]].vertex;
  relabel(el);
  relabel(er);
  if (start1 != u) std::swap(el, er);
  if (left_id) *left_id = el;
  if (right_id) *right_id = er;
  (void)v;
}

VertexId Overlay::promote_crossing(NodeId n, EdgeId* left_id, EdgeId* right_id) {
  if (!node_alive(n) || nodes_[n].kind != NodeKind::EdgeCross)
    throw OverlayError("not an edge crossing");
  EdgeId e = nodes_[n].edge;
  auto [uid, vid] = edge_ends(e);
  VertexId w = fresh_vertex_id();
  nodes_[n].kind = NodeKind::Vertex;
  nodes_[n].vertex = w;
  nodes_[n].edge = -1;
  relabel_edge_sides(e, uid, vid, left_id, right_id);
  touch();
  return w;
}

void Overlay::delete_edge(EdgeId e) {
  LineIdx own = edge_on_line(e);
  auto chain = edge_chain(e);
  if (own >= 0) {
    // The pieces carry the pseudoline: turn them into plain line pieces.
    for (Dart d : chain) {
      Arc& a = arcs_[arc_of(d)];
      a.kind = ArcKind::LinePiece;
      a.edge = -1;
      NodeId t = org_[twin(d)];
      if (nodes_[t].kind == NodeKind::EdgeCross) {
        nodes_[t].kind = NodeKind::LineCross;
        nodes_[t].edge = -1;
      }
    }
    touch();
    return;
  }
  std::vector<NodeId> mids;
  for (Dart d : chain) {
    NodeId t = org_[twin(d)];
    if (nodes_[t].kind == NodeKind::EdgeCross) mids.push_back(t);
  }
  NodeId nu = org_[chain.front()], nv = org_[twin(chain.back())];
  // Anchor candidates in case an endpoint becomes isolated: darts around the
  // incident regions that are not part of e (some may die when crossing nodes
  // dissolve, so keep several).
  std::vector<Dart> cands;
  auto not_mine = [&](Dart c) {
    return arcs_[arc_of(c)].kind != ArcKind::EdgePiece || arcs_[arc_of(c)].edge != e;
  };
  for (Dart d : {chain.front(), twin(chain.front())})
    for (Dart c = face_next(d); c != d; c = face_next(c))
      if (not_mine(c)) cands.push_back(c);
  if (cands.empty()) {
    // The edge is a whole component: fall back to its enclosing region.
    for (const auto& pr : nest_pairs_) {
      for (Dart dd : chain)
        if (arc_of(pr.second) == arc_of(dd) || arc_of(pr.second) == arc_of(twin(dd)))
          cands.push_back(pr.first);
      for (Dart dd : chain)
        if (arc_of(pr.first) == arc_of(dd) || arc_of(pr.first) == arc_of(twin(dd)))
          cands.push_back(pr.second);
    }
  }
  for (Dart d : chain) remove_arc(arc_of(d));
  for (NodeId m : mids) dissolve_node(m);
  for (NodeId n : {nu, nv}) {
    if (nrep_[n] == -1 && isolated_anchor_[n] == -1) {
      Dart cand = -1;
      for (Dart c : cands)
        if (arcs_[arc_of(c)].alive) cand = cand == -1 ? c : cand;
      if (cand == -1) throw OverlayError("cannot anchor isolated endpoint");
      isolated_anchor_[n] = cand;
    }
  }
  touch();
}

VertexId Overlay::add_vertex_on_line(ArcId piece) {
  if (!arc_alive(piece) || arcs_[piece].kind != ArcKind::LinePiece)
    throw OverlayError("not a pseudoline piece");
  Node n;
  n.kind = NodeKind::Vertex;
  n.vertex = fresh_vertex_id();
  n.lines = {arcs_[piece].line};
  VertexId v = n.vertex;
  NodeId m = new_node(std::move(n));
  split_arc(piece, m);
  touch();
  return v;
}

VertexId Overlay::promote_line_cross(NodeId n) {
  if (!node_alive(n) || nodes_[n].kind != NodeKind::LineCross)
    throw OverlayError("not a pseudoline intersection");
  VertexId v = fresh_vertex_id();
  nodes_[n].kind = NodeKind::Vertex;
  nodes_[n].vertex = v;
  touch();
  return v;
}

void Overlay::contract_edge(EdgeId e) {
  auto chain = edge_chain(e);
  if (chain.size() != 1) throw OverlayError("contract: edge is crossed");
  Dart d = chain.front();
  NodeId nu = org_[d], nv = org_[twin(d)];
  const Node& un = nodes_[nu];
  const Node& vn = nodes_[nv];
  LineIdx own = arcs_[arc_of(d)].line;
  auto ok_end = [&](const Node& n) {
    if (own < 0) return n.lines.empty();
    return n.lines == std::vector<LineIdx>{own};
  };
  if (!ok_end(un) || !ok_end(vn))
    throw OverlayError("contract: endpoints are anchored or intersection vertices");

  // The chains collapsing into parallel pairs: edges from u and v to a
  // common neighbor on either side of e.
  VertexId u = un.vertex, v = vn.vertex;
  auto edges_at = [&](NodeId n) {
    std::map<VertexId, EdgeId> m;
    for (Dart dd : out_darts(n)) {
      if (arcs_[arc_of(dd)].kind != ArcKind::EdgePiece) continue;
      EdgeId ee = arcs_[arc_of(dd)].edge;
      auto [a, b] = edge_ends(ee);
      m[a == nodes_[n].vertex ? b : a] = ee;
    }
    return m;
  };
  auto mu = edges_at(nu), mv = edges_at(nv);
  std::vector<std::pair<EdgeId, EdgeId>> merges;  // (keep from u, drop from v)
  for (auto& [x, eu] : mu) {
    if (x == v) continue;
    auto it = mv.find(x);
    if (it != mv.end()) merges.push_back({eu, it->second});
  }
  if (merges.size() > 2)
    throw OverlayError("contract: edge lies in a separating triangle");
  for (auto& [eu, ev] : merges) {
    auto cu = edge_crossings(eu), cv = edge_crossings(ev);
    if (cu != cv) throw OverlayError("contract: incident edges cross different lines");
    if (edge_on_line(ev) >= 0) throw OverlayError("contract: cannot merge aligned edges");
  }

  // Splice v's remaining darts into u's rotation at d's position.
  Dart dv = twin(d);
  std::vector<Dart> vdarts;
  for (Dart c = nxt_[dv]; c != dv; c = nxt_[c]) vdarts.push_back(c);
  if (nxt_[d] == d || nxt_[dv] == dv) throw OverlayError("contract: degree-1 endpoint");
  Dart after = nxt_[d];  // position in u's rotation following d
  detach(d);
  for (Dart c : vdarts) detach(c);
  for (Dart c : vdarts) attach_at_corner(c, after);
  detach(dv);
  arcs_[arc_of(d)].alive = false;
  std::erase_if(nest_pairs_, [&](const std::pair<Dart, Dart>& pr) {
    return arc_of(pr.first) == arc_of(d) || arc_of(pr.second) == arc_of(d);
  });
  nodes_[nv].alive = false;
  nrep_[nv] = -1;
  touch();
  // Merge the collapsed parallel chains.
  for (auto& [eu, ev] : merges) delete_edge(ev);
}

// --------------------------------------------------------------------------

void Overlay::check_structure() const {
  for (ArcId a : arc_ids()) {
    for (Dart d : {2 * a, 2 * a + 1}) {
      if (!node_alive(org_[d])) throw OverlayError("dart at dead node");
      if (nxt_[d] < 0 || prv_[d] < 0) throw OverlayError("detached live dart");
      if (prv_[nxt_[d]] != d || nxt_[prv_[d]] != d) throw OverlayError("broken rotation");
      if (org_[nxt_[d]] != org_[d]) throw OverlayError("rotation mixes nodes");
    }
  }
  for (NodeId n : node_ids()) {
    if (nrep_[n] == -1) {
      if (nodes_[n].kind != NodeKind::Vertex || isolated_anchor_[n] == -1)
        throw OverlayError("unanchored isolated node");
      continue;
    }
    if (!arcs_[arc_of(nrep_[n])].alive) throw OverlayError("dead representative");
    if (org_[nrep_[n]] != n) throw OverlayError("misplaced representative");
  }
  ensure_derived();
}

}  // namespace aligned

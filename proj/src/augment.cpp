#include "aligned/augment.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace aligned {

namespace {

using Dart = Overlay::Dart;
using ArcId = Overlay::ArcId;
using NodeId = Overlay::NodeId;
using RegionId = Overlay::RegionId;
using ArcKind = Overlay::ArcKind;
using NodeKind = Overlay::NodeKind;
using PathStep = Overlay::PathStep;

// --- per-edge profile and overall complexity -----------------------------

struct EdgeProfile {
  int anchors = 0;
  int events = 0;  // pseudoline crossing events in the interior
  bool aligned = false;
};

EdgeProfile edge_profile(const Overlay& ov, EdgeId e) {
  EdgeProfile p;
  LineIdx own = ov.edge_on_line(e);
  p.aligned = own >= 0;
  for (Dart d : ov.edge_chain(e)) {
    NodeId t = ov.target(d);
    if (ov.node(t).kind != NodeKind::EdgeCross) continue;
    for (LineIdx i : ov.node(t).lines)
      if (i != own) ++p.events;
  }
  auto [u, v] = ov.edge_ends(e);
  std::vector<LineIdx> su = ov.vertex_lines(u), sv = ov.vertex_lines(v);
  if (own >= 0) {
    std::erase(su, own);
    std::erase(sv, own);
  }
  if (su.empty() && sv.empty())
    p.anchors = 0;
  else if (su.empty() || sv.empty())
    p.anchors = 1;
  else if (su.size() == 1 && su == sv)
    p.anchors = 1;  // both endpoints only on the same single pseudoline
  else
    p.anchors = 2;
  return p;
}

AlignmentComplexity overlay_complexity(const Overlay& ov) {
  AlignmentComplexity r;
  auto bump = [](int& l, int c) { l = std::max(l == kNoEdges ? 0 : l, c); };
  for (EdgeId e : ov.graph_edge_ids()) {
    EdgeProfile p = edge_profile(ov, e);
    bump(p.anchors == 0 ? r.l0 : p.anchors == 1 ? r.l1 : r.l2, p.events);
  }
  return r;
}

void require_budget(const Overlay& ov, const char* stage) {
  AlignmentComplexity budget{1, 0, kNoEdges};
  AlignmentComplexity have = overlay_complexity(ov);
  if (!have.leq(budget))
    throw ComplexityTooHigh(std::string(stage) + " requires alignment complexity at most (1,0,_), got " +
                            have.str());
}

// --- vertex / region lookups ---------------------------------------------

bool vertex_aligned(const Overlay& ov, VertexId v) { return !ov.vertex_lines(v).empty(); }

bool vertex_isolated(const Overlay& ov, VertexId v) {
  return ov.out_darts(ov.node_of_vertex(v)).empty();
}

std::vector<RegionId> regions_of_vertex(const Overlay& ov, VertexId v) {
  if (vertex_isolated(ov, v)) return {ov.region_of(ov.isolated_anchor(v))};
  std::set<RegionId> rs;
  for (Dart d : ov.out_darts(ov.node_of_vertex(v))) rs.insert(ov.corner_region(d));
  return std::vector<RegionId>(rs.begin(), rs.end());
}

Dart corner_on(const Overlay& ov, VertexId v, RegionId r) {
  for (Dart d : ov.out_darts(ov.node_of_vertex(v)))
    if (ov.corner_region(d) == r) return d;
  return -1;
}

// Corner dart of v on region r; -1 for an isolated vertex anchored there.
Dart corner_for(const Overlay& ov, VertexId v, RegionId r) {
  if (vertex_isolated(ov, v)) {
    if (ov.region_of(ov.isolated_anchor(v)) != r)
      throw AugmentError("isolated vertex lies in a different region");
    return -1;
  }
  Dart d = corner_on(ov, v, r);
  if (d == -1) throw AugmentError("vertex has no corner on the target region");
  return d;
}

std::map<RegionId, std::vector<VertexId>> vertices_by_region(const Overlay& ov) {
  std::map<RegionId, std::vector<VertexId>> m;
  for (VertexId v : ov.graph_vertex_ids())
    for (RegionId r : regions_of_vertex(ov, v)) m[r].push_back(v);
  for (auto& [r, vs] : m) std::sort(vs.begin(), vs.end());
  return m;
}

// --- graph connectivity --------------------------------------------------

std::map<VertexId, std::vector<VertexId>> adjacency(const Overlay& ov) {
  std::map<VertexId, std::vector<VertexId>> adj;
  for (VertexId v : ov.graph_vertex_ids()) adj[v];
  for (EdgeId e : ov.graph_edge_ids()) {
    auto [u, v] = ov.edge_ends(e);
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

bool adjacent_vertices(const Overlay& ov, VertexId u, VertexId v) {
  for (EdgeId e : ov.graph_edge_ids()) {
    auto [a, b] = ov.edge_ends(e);
    if ((a == u && b == v) || (a == v && b == u)) return true;
  }
  return false;
}

std::map<VertexId, int> components(const Overlay& ov) {
  auto adj = adjacency(ov);
  std::map<VertexId, int> comp;
  int c = 0;
  for (auto& [v, nb] : adj) {
    if (comp.count(v)) continue;
    std::vector<VertexId> stack{v};
    comp[v] = c;
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      for (VertexId y : adj[x])
        if (!comp.count(y)) {
          comp[y] = c;
          stack.push_back(y);
        }
    }
    ++c;
  }
  return comp;
}

int component_count(const Overlay& ov) {
  auto comp = components(ov);
  int c = 0;
  for (auto& [v, i] : comp) c = std::max(c, i + 1);
  return c;
}

std::vector<VertexId> cut_vertices(const Overlay& ov) {
  auto adj = adjacency(ov);
  std::map<VertexId, int> num, low;
  std::set<VertexId> cuts;
  int counter = 0;
  // Iterative dfs with articulation detection via low links.
  struct Frame {
    VertexId v, parent;
    size_t next = 0;
    int child_count = 0;
  };
  for (auto& [root, nb0] : adj) {
    if (num.count(root)) continue;
    std::vector<Frame> stack{{root, -1}};
    num[root] = low[root] = counter++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto& nb = adj[f.v];
      if (f.next < nb.size()) {
        VertexId w = nb[f.next++];
        if (w == f.parent) continue;
        if (num.count(w)) {
          low[f.v] = std::min(low[f.v], num[w]);
        } else {
          ++f.child_count;
          num[w] = low[w] = counter++;
          stack.push_back({w, f.v});
        }
      } else {
        Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame& p = stack.back();
          low[p.v] = std::min(low[p.v], low[done.v]);
          if (p.parent != -1 && low[done.v] >= num[p.v]) cuts.insert(p.v);
        }
        if (done.parent == -1 && done.child_count > 1) cuts.insert(done.v);
      }
    }
  }
  return std::vector<VertexId>(cuts.begin(), cuts.end());
}

bool is_biconnected(const Overlay& ov) {
  return component_count(ov) <= 1 && cut_vertices(ov).empty();
}

// --- recording context ---------------------------------------------------

struct Ctx {
  Overlay& ov;
  AugmentationReport& rep;
};

VertexId add_vertex_rec(Ctx& c, const std::string& stage, Dart anchor) {
  VertexId v = c.ov.add_isolated_vertex(anchor);
  c.rep.additions.push_back({stage, true, v});
  return v;
}

EdgeId add_edge_rec(Ctx& c, const std::string& stage, VertexId u, Dart cu,
                    const std::vector<PathStep>& steps, VertexId v, Dart cv) {
  EdgeId e = c.ov.add_edge(u, cu, steps, v, cv);
  c.rep.additions.push_back({stage, false, e});
  return e;
}

Dart single_corner(const Overlay& ov, VertexId v) {
  auto ds = ov.out_darts(ov.node_of_vertex(v));
  if (ds.empty()) return -1;
  return ds.front();
}

// Connects u and v along the given crossing steps while keeping every added
// edge at most 1-anchored or 1-crossed and never parallel to an existing
// edge: aligned endpoints of crossing edges are peeled off through a free
// stub vertex, and duplicate or aligned-aligned connections go through a free
// midpoint in the final region.
void connect(Ctx& c, const std::string& stage, VertexId u, Dart cu, std::vector<PathStep> steps,
             VertexId v, Dart cv) {
  Overlay& ov = c.ov;
  if (vertex_aligned(ov, u) && !steps.empty()) {
    if (cu == -1) throw AugmentError("aligned endpoint needs a corner");
    VertexId m = add_vertex_rec(c, stage, Overlay::twin(cu));
    add_edge_rec(c, stage, u, cu, {}, m, -1);
    u = m;
    cu = single_corner(ov, m);
  }
  if (vertex_aligned(ov, v) && !steps.empty()) {
    if (cv == -1) throw AugmentError("aligned endpoint needs a corner");
    VertexId m = add_vertex_rec(c, stage, Overlay::twin(cv));
    add_edge_rec(c, stage, v, cv, {}, m, -1);
    v = m;
    cv = single_corner(ov, m);
  }
  if ((vertex_aligned(ov, u) && vertex_aligned(ov, v)) || adjacent_vertices(ov, u, v)) {
    Dart anchor = cv != -1 ? Overlay::twin(cv) : ov.isolated_anchor(v);
    VertexId m = add_vertex_rec(c, stage, anchor);
    add_edge_rec(c, stage, u, cu, steps, m, -1);
    add_edge_rec(c, stage, m, single_corner(ov, m), {}, v, cv);
  } else {
    add_edge_rec(c, stage, u, cu, steps, v, cv);
  }
}

// --- edge chains and side walks ------------------------------------------

// Chain of d's edge oriented so that d is its first dart.
std::vector<Dart> chain_starting_at(const Overlay& ov, Dart d) {
  auto chain = ov.edge_chain(ov.arc(Overlay::arc_of(d)).edge);
  if (std::find(chain.begin(), chain.end(), d) == chain.end()) {
    std::vector<Dart> rc;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) rc.push_back(Overlay::twin(*it));
    chain = rc;
  }
  if (chain.front() != d) throw AugmentError("dart is not an edge endpoint piece");
  return chain;
}

// Chain of d's edge oriented so that d is its last dart.
std::vector<Dart> chain_ending_at(const Overlay& ov, Dart d) {
  auto chain = chain_starting_at(ov, Overlay::twin(d));
  std::vector<Dart> rc;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) rc.push_back(Overlay::twin(*it));
  return rc;
}

// Pseudoline pieces a companion path running beside the chain (on its left or
// right) crosses, in chain order.
std::vector<PathStep> walk_steps(const Overlay& ov, const std::vector<Dart>& chain, bool left) {
  std::vector<PathStep> steps;
  for (size_t i = 0; i + 1 < chain.size(); ++i) {
    Dart t = Overlay::twin(chain[i]);  // at the intermediate node, pointing back
    Dart o = chain[i + 1];
    for (Dart p = left ? ov.rot_prev(t) : ov.rot_next(t); p != o;
         p = left ? ov.rot_prev(p) : ov.rot_next(p)) {
      if (ov.arc(Overlay::arc_of(p)).kind != ArcKind::LinePiece)
        throw AugmentError("side walk blocked by a non-line arc");
      steps.push_back({Overlay::arc_of(p)});
    }
  }
  return steps;
}

// Far endpoint vertex reached by walking d's edge away from d's origin.
VertexId far_vertex(const Overlay& ov, Dart d) {
  EdgeId e = ov.arc(Overlay::arc_of(d)).edge;
  int guard = 10000;
  while (ov.node(ov.target(d)).kind != NodeKind::Vertex) {
    if (--guard < 0) throw AugmentError("broken edge chain");
    NodeId t = ov.target(d);
    Dart nd = -1;
    for (Dart d2 : ov.out_darts(t))
      if (d2 != Overlay::twin(d) && ov.arc(Overlay::arc_of(d2)).kind == ArcKind::EdgePiece &&
          ov.arc(Overlay::arc_of(d2)).edge == e)
        nd = d2;
    if (nd == -1) throw AugmentError("broken edge chain");
    d = nd;
  }
  return ov.node(ov.target(d)).vertex;
}

// --- face contours -------------------------------------------------------

// Next edge-piece dart along the graph-face contour left of d.
Dart next_on_contour(const Overlay& ov, Dart d) {
  Dart e = ov.face_next(d);
  int guard = 100000;
  while (ov.arc(Overlay::arc_of(e)).kind != ArcKind::EdgePiece) {
    if (--guard < 0) throw AugmentError("broken face contour");
    e = ov.face_next(Overlay::twin(e));
  }
  return e;
}

std::vector<Dart> contour(const Overlay& ov, Dart start) {
  std::vector<Dart> out;
  Dart d = start;
  int guard = 100000;
  do {
    if (--guard < 0) throw AugmentError("broken face contour");
    out.push_back(d);
    d = next_on_contour(ov, d);
  } while (d != start);
  return out;
}

// Inner graph-face classes, each with its smallest boundary edge dart.
std::map<FaceId, Dart> inner_face_starts(const Overlay& ov) {
  std::map<FaceId, Dart> starts;
  FaceId outer = ov.graph_face_of_region(ov.outside_region());
  for (ArcId a : ov.arc_ids()) {
    if (ov.arc(a).kind != ArcKind::EdgePiece) continue;
    for (Dart d : {2 * a, 2 * a + 1}) {
      FaceId f = ov.graph_face_of_region(ov.region_of(d));
      if (f != outer && !starts.count(f)) starts[f] = d;
    }
  }
  return starts;
}

int contour_vertex_count(const Overlay& ov, const std::vector<Dart>& ct) {
  int n = 0;
  for (Dart d : ct)
    if (ov.node(ov.origin(d)).kind == NodeKind::Vertex) ++n;
  return n;
}

// Non-triangular inner faces, ascending by face class id.
std::vector<std::pair<FaceId, Dart>> nontriangular_inner_faces(const Overlay& ov) {
  std::vector<std::pair<FaceId, Dart>> out;
  for (auto& [f, d] : inner_face_starts(ov))
    if (contour_vertex_count(ov, contour(ov, d)) != 3) out.push_back({f, d});
  return out;
}

void check_face_budget(const Overlay& ov, const std::vector<Dart>& ct) {
  std::set<EdgeId> edges;
  for (Dart d : ct) edges.insert(ov.arc(Overlay::arc_of(d)).edge);
  for (EdgeId e : edges) {
    EdgeProfile p = edge_profile(ov, e);
    bool ok = (p.anchors == 0 && p.events <= 1) || (p.anchors == 1 && p.events == 0);
    if (!ok)
      throw PreconditionViolated(
          "non-triangular face bounded by an edge exceeding the (1,0,_) budget");
  }
}

// --- biconnect -----------------------------------------------------------

// Seeds a vertex in every cell that has no vertex on its closure.
void seed_empty_cells(Ctx& c) {
  Overlay& ov = c.ov;
  if (ov.n_cells() == 0) return;
  std::vector<char> has(ov.n_cells(), 0);
  for (auto& [r, vs] : vertices_by_region(ov)) {
    int cell = ov.cell_of_region(r);
    if (cell >= 0 && !vs.empty()) has[cell] = 1;
  }
  for (int cell = 0; cell < int(has.size()); ++cell) {
    if (has[cell]) continue;
    for (const auto& r : ov.regions()) {
      if (r.cell != cell || r.boundary.empty()) continue;
      add_vertex_rec(c, "connect", r.boundary.front());
      break;
    }
  }
}

// One connecting edge between two components; returns false when none found.
bool connect_step(Ctx& c) {
  Overlay& ov = c.ov;
  auto comp = components(ov);
  auto vbr = vertices_by_region(ov);

  // Two vertices of distinct components on a common region.
  VertexId bu = -1, bv = -1;
  RegionId br = -1;
  for (auto& [r, vs] : vbr)
    for (size_t i = 0; i < vs.size(); ++i)
      for (size_t j = i + 1; j < vs.size(); ++j) {
        if (comp.at(vs[i]) == comp.at(vs[j])) continue;
        if (bu == -1 || std::pair(vs[i], vs[j]) < std::pair(bu, bv)) {
          bu = vs[i];
          bv = vs[j];
          br = r;
        }
      }
  if (bu != -1) {
    connect(c, "connect", bu, corner_for(ov, bu, br), {}, bv, corner_for(ov, bv, br));
    return true;
  }

  // Two vertices of distinct components on the two sides of a line piece.
  ArcId ba = -1;
  for (ArcId a : ov.arc_ids()) {
    if (ov.arc(a).kind != ArcKind::LinePiece) continue;
    RegionId r1 = ov.region_of(2 * a), r2 = ov.region_of(2 * a + 1);
    auto i1 = vbr.find(r1), i2 = vbr.find(r2);
    if (i1 == vbr.end() || i2 == vbr.end()) continue;
    for (VertexId u : i1->second)
      for (VertexId v : i2->second) {
        if (u == v || comp.at(u) == comp.at(v)) continue;
        if (bu == -1 || std::tuple(u, v, a) < std::tuple(bu, bv, ba)) {
          bu = u;
          bv = v;
          ba = a;
        }
      }
  }
  if (bu != -1) {
    Dart cu = corner_for(ov, bu, ov.region_of(2 * ba));
    Dart cv = corner_for(ov, bv, ov.region_of(2 * ba + 1));
    connect(c, "connect", bu, cu, {{ba}}, bv, cv);
    return true;
  }

  // Fallback: seed the smallest vertex-free region so a later round can hop
  // into it across a line piece.
  for (const auto& r : ov.regions()) {
    if (r.id == ov.outside_region() || r.cell < 0 || r.boundary.empty()) continue;
    if (vbr.count(r.id)) continue;
    bool gated = false;
    for (Dart d : r.boundary)
      if (ov.arc(Overlay::arc_of(d)).kind == ArcKind::LinePiece) gated = true;
    if (!gated) continue;
    add_vertex_rec(c, "connect", r.boundary.front());
    return true;
  }
  return false;
}

// Removes one cut vertex by ringing it with face vertices connected across
// all corners around it.
void ring_around(Ctx& c, VertexId v) {
  Overlay& ov = c.ov;
  NodeId nv = ov.node_of_vertex(v);
  std::vector<Dart> elems = ov.out_darts(nv);  // ccw
  int m = int(elems.size());
  if (m < 2) throw AugmentError("cut vertex of degree below two");
  std::vector<RegionId> fr(m);  // snapshot corner region ids, used as map keys
  for (int j = 0; j < m; ++j) fr[j] = ov.region_of(elems[j]);

  // One ring vertex per distinct incident region.
  std::map<RegionId, VertexId> ring;
  for (int j = 0; j < m; ++j)
    if (!ring.count(fr[j])) ring[fr[j]] = add_vertex_rec(c, "biconnect", elems[j]);

  std::set<std::pair<VertexId, VertexId>> linked;
  for (int j = 0; j < m; ++j) {
    Dart ej = elems[j];
    RegionId f_ccw = fr[j], f_cw = fr[(j - 1 + m) % m];
    const auto& arc = ov.arc(Overlay::arc_of(ej));
    if (arc.kind == ArcKind::EdgePiece) {
      // Link the edge's far endpoint to the ring vertices on both sides.
      for (int side = 0; side < 2; ++side) {
        bool left = side == 1;
        VertexId w = ring.at(left ? f_ccw : f_cw);
        auto chain = chain_starting_at(ov, ej);
        VertexId far = far_vertex(ov, ej);
        auto key = std::minmax(w, far);
        if (linked.count(key)) continue;
        linked.insert(key);
        auto steps = walk_steps(ov, chain, left);
        RegionId r_near = left ? ov.region_of(ej) : ov.region_of(Overlay::twin(ej));
        RegionId r_far =
            left ? ov.region_of(chain.back()) : ov.region_of(Overlay::twin(chain.back()));
        Dart cw_ = corner_for(ov, w, r_near);
        Dart cf = corner_for(ov, far, r_far);
        add_edge_rec(c, "biconnect", w, cw_, steps, far, cf);
      }
    } else if (arc.kind == ArcKind::LinePiece) {
      // Ring edge between the two flanking ring vertices, across the piece.
      VertexId wa = ring.at(f_cw), wb = ring.at(f_ccw);
      Dart ca = corner_for(ov, wa, ov.region_of(Overlay::twin(ej)));
      Dart cb = corner_for(ov, wb, ov.region_of(ej));
      connect(c, "biconnect", wa, ca, {{Overlay::arc_of(ej)}}, wb, cb);
    } else {
      throw AugmentError("frame piece at a graph vertex");
    }
  }
}

// --- triangulate: aligned vertex / edge isolation ------------------------

struct AlignedOcc {
  bool edge_case = false;
  Dart arr = -1;  // dart at u pointing back along the arrival edge
  Dart de = -1;   // the aligned edge piece u -> v (edge case only)
  Dart dep = -1;  // departure contour dart at v (or at the vertex itself)
  VertexId u = -1, v = -1;
};

// First aligned edge or aligned vertex occurrence along the contour.
std::optional<AlignedOcc> find_aligned_occurrence(const Overlay& ov, const std::vector<Dart>& ct) {
  int n = int(ct.size());
  for (int t = 0; t < n; ++t) {
    NodeId o = ov.origin(ct[t]);
    if (ov.node(o).kind != NodeKind::Vertex) continue;
    Dart prev = ct[(t - 1 + n) % n];
    bool cur_aligned = ov.arc(Overlay::arc_of(ct[t])).kind == ArcKind::EdgePiece &&
                       ov.arc(Overlay::arc_of(ct[t])).line >= 0;
    bool prev_aligned = ov.arc(Overlay::arc_of(prev)).line >= 0;
    if (cur_aligned) {
      AlignedOcc occ;
      occ.edge_case = true;
      occ.arr = Overlay::twin(prev);
      occ.de = ct[t];
      occ.dep = ct[(t + 1) % n];
      occ.u = ov.node(o).vertex;
      occ.v = ov.node(ov.target(occ.de)).vertex;
      return occ;
    }
    if (!prev_aligned && !ov.node(o).lines.empty()) {
      AlignedOcc occ;
      occ.edge_case = false;
      occ.arr = Overlay::twin(prev);
      occ.dep = ct[t];
      occ.u = occ.v = ov.node(o).vertex;
      return occ;
    }
  }
  return std::nullopt;
}

// Isolates the aligned occurrence behind a fan of free vertices, one per cell
// corner at the occurrence, per the non-crossing chord structure of the face.
void isolate_aligned(Ctx& c, const AlignedOcc& occ) {
  Overlay& ov = c.ov;
  const std::string stage = "isolate-aligned";

  struct Corner {
    Dart anchor;  // region left of it is the corner region
    std::vector<VertexId> owners;
    bool junction = false;
  };
  std::vector<Corner> cs;
  cs.push_back({Overlay::twin(occ.arr), {occ.u}});
  Dart stop_u = occ.edge_case ? occ.de : occ.dep;
  for (Dart p = ov.rot_prev(occ.arr); p != stop_u; p = ov.rot_prev(p)) {
    if (ov.arc(Overlay::arc_of(p)).kind != ArcKind::LinePiece)
      throw AugmentError("unexpected arc in an aligned corner");
    cs.push_back({Overlay::twin(p), {occ.u}});
  }
  if (occ.edge_case) {
    // The corner flanking the aligned edge belongs to both endpoints.
    cs.back().owners.push_back(occ.v);
    cs.back().junction = true;
    for (Dart p = ov.rot_prev(Overlay::twin(occ.de)); p != occ.dep; p = ov.rot_prev(p)) {
      if (ov.arc(Overlay::arc_of(p)).kind != ArcKind::LinePiece)
        throw AugmentError("unexpected arc in an aligned corner");
      cs.push_back({Overlay::twin(p), {occ.v}});
    }
  }
  int l = int(cs.size());

  // Fan vertices first: their anchors survive later arc splits.
  std::vector<VertexId> q(l);
  for (int i = 0; i < l; ++i) q[i] = add_vertex_rec(c, stage, cs[i].anchor);

  VertexId x = far_vertex(ov, occ.arr);
  VertexId y = far_vertex(ov, occ.dep);

  // Path start: x to q[0] beside the arrival edge, on the face side. The
  // face lies left of the contour, i.e. left of the chain ending in twin(arr).
  {
    auto chain = chain_ending_at(ov, Overlay::twin(occ.arr));
    auto steps = walk_steps(ov, chain, true);
    Dart cx = corner_for(ov, x, ov.region_of(chain.front()));
    add_edge_rec(c, stage, x, cx, steps, q[0], -1);
  }
  // Path middle: consecutive fan vertices across their separating piece.
  for (int i = 1; i < l; ++i) {
    RegionId r_prev = regions_of_vertex(ov, q[i - 1]).front();
    RegionId r_next = ov.region_of(ov.isolated_anchor(q[i]));
    ArcId gate = -1;
    for (ArcId a : ov.arc_ids()) {
      if (ov.arc(a).kind != ArcKind::LinePiece) continue;
      RegionId s1 = ov.region_of(2 * a), s2 = ov.region_of(2 * a + 1);
      if ((s1 == r_prev && s2 == r_next) || (s1 == r_next && s2 == r_prev)) {
        gate = a;
        break;
      }
    }
    if (gate == -1) throw AugmentError("no piece between consecutive fan cells");
    add_edge_rec(c, stage, q[i - 1], corner_for(ov, q[i - 1], r_prev), {{gate}}, q[i], -1);
  }
  // Path end: q[l-1] to y beside the departure edge.
  {
    auto chain = chain_starting_at(ov, occ.dep);
    auto steps = walk_steps(ov, chain, true);
    Dart cq = corner_for(ov, q[l - 1], ov.region_of(chain.front()));
    Dart cy = corner_for(ov, y, ov.region_of(chain.back()));
    add_edge_rec(c, stage, q[l - 1], cq, steps, y, cy);
  }
  // Spokes from the occurrence into each fan vertex.
  for (int i = 0; i < l; ++i)
    for (VertexId o : cs[i].owners) {
      std::vector<RegionId> ro = regions_of_vertex(ov, o), rq = regions_of_vertex(ov, q[i]);
      std::vector<RegionId> shared;
      std::set_intersection(ro.begin(), ro.end(), rq.begin(), rq.end(),
                            std::back_inserter(shared));
      if (shared.size() != 1) throw AugmentError("ambiguous spoke region");
      RegionId r = shared.front();
      add_edge_rec(c, stage, o, corner_for(ov, o, r), {}, q[i], corner_for(ov, q[i], r));
    }
}

// --- triangulate: pseudosegment gadget -----------------------------------

// Encloses the pseudoline chord `a` (both sides inside one face) in
// triangles: a vertex u on the chord, edges to the four endpoints of the two
// crossed boundary edges, and two closing free edges.
void isolate_segment(Ctx& c, ArcId a) {
  Overlay& ov = c.ov;
  const std::string stage = "isolate-segment";
  NodeId n1 = ov.origin(2 * a), n2 = ov.target(2 * a);
  if (ov.node(n1).kind != NodeKind::EdgeCross || ov.node(n2).kind != NodeKind::EdgeCross)
    throw AugmentError("chord does not end on crossed edges");
  VertexId v = far_vertex(ov, ov.rot_next(2 * a));
  VertexId w = far_vertex(ov, ov.rot_prev(2 * a));
  VertexId y = far_vertex(ov, ov.rot_next(Overlay::twin(2 * a)));
  VertexId x = far_vertex(ov, ov.rot_prev(Overlay::twin(2 * a)));

  VertexId u = ov.add_vertex_on_line(a);
  c.rep.additions.push_back({stage, true, u});
  // After the split, arc a runs n1 -> u; its twin dart at u faces n1 and the
  // continuation towards n2 is the other line dart at u.
  Dart back = Overlay::twin(2 * a);  // at u towards n1
  Dart fwd = -1;
  for (Dart d : ov.out_darts(ov.node_of_vertex(u)))
    if (d != back) fwd = d;
  if (fwd == -1) throw AugmentError("chord split failed");

  auto spoke = [&](VertexId t, RegionId r) {
    if (adjacent_vertices(ov, u, t)) return;
    add_edge_rec(c, stage, u, corner_for(ov, u, r), {}, t, corner_for(ov, t, r));
  };
  spoke(v, ov.region_of(2 * a));
  spoke(w, ov.region_of(Overlay::twin(2 * a)));
  spoke(x, ov.region_of(fwd));
  spoke(y, ov.region_of(Overlay::twin(fwd)));

  auto close = [&](VertexId s, VertexId t, RegionId avoid) {
    if (s == t || adjacent_vertices(ov, s, t)) return;
    // Target region: the side of the edge us away from the chord.
    Dart d_us = -1;
    for (Dart d : ov.out_darts(ov.node_of_vertex(s)))
      if (ov.arc(Overlay::arc_of(d)).kind == ArcKind::EdgePiece && far_vertex(ov, d) == u)
        d_us = d;
    if (d_us == -1) return;  // the spoke was skipped; nothing to close
    RegionId r = ov.region_of(d_us) == avoid ? ov.corner_region(d_us) : ov.region_of(d_us);
    if (r == avoid) return;
    if (corner_on(ov, s, r) == -1 || corner_on(ov, t, r) == -1) return;
    add_edge_rec(c, stage, s, corner_for(ov, s, r), {}, t, corner_for(ov, t, r));
  };
  close(v, x, ov.region_of(2 * a));
  close(w, y, ov.region_of(Overlay::twin(2 * a)));
}

// --- triangulate: free faces ---------------------------------------------

// Adds one free chord, or a full center fan when all boundary vertices are
// pairwise adjacent. Returns true when something was inserted.
bool triangulate_free(Ctx& c, const std::vector<Dart>& ct) {
  Overlay& ov = c.ov;
  const std::string stage = "triangulate-free";
  std::vector<Dart> vdarts;  // contour darts leaving a graph vertex
  for (Dart d : ct)
    if (ov.node(ov.origin(d)).kind == NodeKind::Vertex) vdarts.push_back(d);
  int m = int(vdarts.size());
  std::vector<VertexId> vs(m);
  for (int i = 0; i < m; ++i) vs[i] = ov.node(ov.origin(vdarts[i])).vertex;

  for (int i = 0; i < m; ++i)
    for (int j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;
      if (vs[i] == vs[j] || adjacent_vertices(ov, vs[i], vs[j])) continue;
      RegionId r = ov.region_of(vdarts[i]);
      add_edge_rec(c, stage, vs[i], corner_for(ov, vs[i], r), {}, vs[j],
                   corner_for(ov, vs[j], r));
      return true;
    }

  // Everything adjacent: center vertex with a full fan.
  VertexId center = add_vertex_rec(c, stage, vdarts.front());
  for (int i = 0; i < m; ++i) {
    RegionId r = ov.region_of(vdarts[i]);
    Dart cc = vertex_isolated(ov, center) ? -1 : corner_for(ov, center, r);
    add_edge_rec(c, stage, center, cc, {}, vs[i], corner_for(ov, vs[i], r));
  }
  return true;
}

// --- triangulate: interior intersections ---------------------------------

// Promotes pseudoline intersections interior to non-triangular inner faces
// into aligned vertices. Returns true when any promotion happened.
bool promote_interior_intersections(Ctx& c) {
  Overlay& ov = c.ov;
  std::set<FaceId> nontri;
  for (auto& [f, d] : nontriangular_inner_faces(ov)) nontri.insert(f);
  if (nontri.empty()) return false;
  std::vector<NodeId> todo;
  for (NodeId n : ov.node_ids()) {
    if (ov.node(n).kind != NodeKind::LineCross) continue;
    Dart d0 = ov.out_darts(n).front();
    if (nontri.count(ov.graph_face_of_region(ov.region_of(d0)))) todo.push_back(n);
  }
  for (NodeId n : todo) {
    VertexId v = ov.promote_line_cross(n);
    c.rep.additions.push_back({"isolate-intersection", true, v});
  }
  return !todo.empty();
}

// Promotes crossing ties on the aligned edges bounding the given contour into
// aligned subdivision vertices. Returns true when any tie was promoted.
bool promote_aligned_ties(Ctx& c, const std::vector<Dart>& ct, const std::string& stage) {
  Overlay& ov = c.ov;
  std::set<EdgeId> aligned_edges;
  for (Dart d : ct) {
    const auto& arc = ov.arc(Overlay::arc_of(d));
    if (arc.kind == ArcKind::EdgePiece && arc.line >= 0) aligned_edges.insert(arc.edge);
  }
  for (EdgeId e : aligned_edges) {
    for (Dart d : ov.edge_chain(e)) {
      NodeId t = ov.target(d);
      if (ov.node(t).kind != NodeKind::EdgeCross) continue;
      EdgeId left = -1, right = -1;
      VertexId mid = ov.promote_crossing(t, &left, &right);
      c.rep.subdivisions.push_back({stage, e, mid, left, right});
      return true;
    }
  }
  return false;
}

}  // namespace

// --- report ---------------------------------------------------------------

int AugmentationReport::added_vertices() const {
  int n = 0;
  for (const auto& a : additions)
    if (a.is_vertex) ++n;
  n += int(subdivisions.size());
  return n;
}

int AugmentationReport::added_edges() const {
  int n = 0;
  for (const auto& a : additions)
    if (!a.is_vertex) ++n;
  return n;
}

void AugmentationReport::merge(AugmentationReport other) {
  additions.insert(additions.end(), other.additions.begin(), other.additions.end());
  subdivisions.insert(subdivisions.end(), other.subdivisions.begin(), other.subdivisions.end());
}

// --- stages ---------------------------------------------------------------

AugmentationReport biconnect(Overlay& ov) {
  require_budget(ov, "biconnect");
  AugmentationReport rep;
  Ctx c{ov, rep};

  seed_empty_cells(c);

  int guard = int(ov.node_ids().size()) + int(ov.arc_ids().size()) + 64;
  while (component_count(ov) > 1) {
    if (--guard < 0) throw AugmentError("connecting components did not converge");
    if (!connect_step(c)) throw AugmentError("components cannot be connected");
  }
  guard = 4 * int(ov.graph_vertex_ids().size()) + 64;
  while (true) {
    auto cuts = cut_vertices(ov);
    if (cuts.empty()) break;
    if (--guard < 0) throw AugmentError("cut vertex elimination did not converge");
    ring_around(c, cuts.front());
  }
  return rep;
}

AugmentationReport isolate_crossed_edges(Overlay& ov) {
  if (!is_biconnected(ov)) throw PreconditionViolated("isolate_crossed_edges needs a biconnected graph");
  AugmentationReport rep;
  Ctx c{ov, rep};
  const std::string stage = "isolate-crossed";

  int guard = 16 * (int(ov.arc_ids().size()) + 16);
  while (true) {
    if (--guard < 0) throw AugmentError("edge isolation did not converge");
    // First multiply-crossed plain edge on a non-triangular inner face.
    Dart dep0 = -1;
    for (auto& [f, d0] : nontriangular_inner_faces(ov)) {
      for (Dart d : contour(ov, d0)) {
        const auto& arc = ov.arc(Overlay::arc_of(d));
        if (arc.line >= 0) continue;  // aligned edges are handled by ties
        if (edge_profile(ov, arc.edge).events >= 2) {
          dep0 = d;
          break;
        }
      }
      if (dep0 != -1) break;
    }
    if (dep0 == -1) break;

    EdgeId e = ov.arc(Overlay::arc_of(dep0)).edge;
    auto [ea, eb] = ov.edge_ends(e);
    bool a_free = !vertex_aligned(ov, ea), b_free = !vertex_aligned(ov, eb);
    // Orient the chain u -> v with v a free endpoint when one exists.
    VertexId v = b_free ? eb : ea;
    if (a_free && b_free) v = std::min(ea, eb);
    auto chain = ov.edge_chain(e);
    if (ov.node(ov.target(chain.back())).vertex != v) {
      std::vector<Dart> rc;
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) rc.push_back(Overlay::twin(*it));
      chain = rc;
    }
    VertexId u = ov.node(ov.origin(chain.front())).vertex;
    // The face lies on the side of the contour dart.
    bool left = std::find(chain.begin(), chain.end(), dep0) != chain.end();
    auto steps = walk_steps(ov, chain, left);
    int l = int(steps.size());
    if (l < 2) throw AugmentError("crossed edge walk lost its steps");

    // Region between the last two crossed pieces, on the face side.
    auto sides = [&](ArcId a) {
      return std::set<RegionId>{ov.region_of(2 * a), ov.region_of(2 * a + 1)};
    };
    auto s1 = sides(steps[l - 2].cross), s2 = sides(steps[l - 1].cross);
    RegionId rmid = -1;
    for (RegionId r : s1)
      if (s2.count(r)) rmid = r;
    if (rmid == -1) throw AugmentError("crossed pieces do not share a region");

    std::vector<PathStep> head(steps.begin(), steps.end() - 1);
    if (a_free || b_free) {
      ArcId pa = steps[l - 2].cross;
      Dart anchor = ov.region_of(2 * pa) == rmid ? 2 * pa : 2 * pa + 1;
      VertexId x = add_vertex_rec(c, stage, anchor);
      Dart cu = corner_for(ov, u, left ? ov.region_of(chain.front())
                                       : ov.region_of(Overlay::twin(chain.front())));
      add_edge_rec(c, stage, u, cu, head, x, -1);
      RegionId rend = left ? ov.region_of(chain.back()) : ov.region_of(Overlay::twin(chain.back()));
      add_edge_rec(c, stage, x, corner_for(ov, x, regions_of_vertex(ov, x).front()),
                   {steps[l - 1]}, v, corner_for(ov, v, rend));
    } else {
      // Both endpoints aligned: the splitting vertex sits on the last crossed
      // pseudoline itself.
      VertexId x = ov.add_vertex_on_line(steps[l - 1].cross);
      c.rep.additions.push_back({stage, true, x});
      Dart cu = corner_for(ov, u, left ? ov.region_of(chain.front())
                                       : ov.region_of(Overlay::twin(chain.front())));
      add_edge_rec(c, stage, u, cu, head, x, corner_for(ov, x, rmid));
      RegionId rend = left ? ov.region_of(chain.back()) : ov.region_of(Overlay::twin(chain.back()));
      add_edge_rec(c, stage, x, corner_for(ov, x, rend), {}, v, corner_for(ov, v, rend));
    }
  }
  return rep;
}

AugmentationReport triangulate(Overlay& ov) {
  if (!is_biconnected(ov)) throw PreconditionViolated("triangulate needs a biconnected graph");
  AugmentationReport rep;
  Ctx c{ov, rep};

  int guard = 64 * (int(ov.node_ids().size()) + int(ov.arc_ids().size()) + 16);
  while (true) {
    if (--guard < 0) throw AugmentError("triangulation did not converge");
    auto faces = nontriangular_inner_faces(ov);
    if (faces.empty()) break;
    for (auto& [f, d] : faces) check_face_budget(ov, contour(ov, d));

    // Interior pseudoline intersections become vertices, then the graph is
    // re-biconnected around them.
    if (promote_interior_intersections(c)) {
      rep.merge(biconnect(ov));
      continue;
    }

    auto [f, d0] = faces.front();
    auto ct = contour(ov, d0);

    // Aligned edges with crossing ties first get rigid subdivision vertices.
    if (promote_aligned_ties(c, ct, "isolate-aligned")) continue;
    if (auto occ = find_aligned_occurrence(ov, ct)) {
      isolate_aligned(c, *occ);
      continue;
    }
    // Pseudoline chord with both sides inside the face.
    ArcId chord = -1;
    for (ArcId a : ov.arc_ids()) {
      if (ov.arc(a).kind != ArcKind::LinePiece) continue;
      if (ov.graph_face_of_region(ov.region_of(2 * a)) == f &&
          ov.graph_face_of_region(ov.region_of(2 * a + 1)) == f) {
        chord = a;
        break;
      }
    }
    if (chord != -1) {
      isolate_segment(c, chord);
      continue;
    }
    triangulate_free(c, ct);
  }
  return rep;
}

AugmentationReport properize(Overlay& ov) {
  if (ov.n_lines() < 2) throw KTooSmall("properize needs at least two pseudolines");
  require_budget(ov, "properize");
  AugmentationReport rep;
  Ctx c{ov, rep};

  // Idempotence: a proper triangulation passes through untouched.
  if (is_biconnected(ov) && nontriangular_inner_faces(ov).empty()) {
    try {
      if (is_proper(ov.export_aligned().ag).yes) return rep;
    } catch (const Error&) {
      // fall through and augment
    }
  }

  // Rigid subdivision: aligned edges get vertices on their crossing ties.
  for (bool again = true; again;) {
    again = false;
    for (EdgeId e : ov.graph_edge_ids()) {
      if (ov.edge_on_line(e) < 0) continue;
      for (Dart d : ov.edge_chain(e)) {
        NodeId t = ov.target(d);
        if (ov.node(t).kind != NodeKind::EdgeCross) continue;
        EdgeId left = -1, right = -1;
        VertexId mid = ov.promote_crossing(t, &left, &right);
        rep.subdivisions.push_back({"rigid-subdivision", e, mid, left, right});
        again = true;
        break;
      }
      if (again) break;
    }
  }

  // Outer cycle: one vertex per frame stretch between two pseudoline ends,
  // connected in a ring crossing each pseudoline end piece once.
  {
    // Walk the frame with the inside on the left.
    Dart start = -1;
    for (ArcId a : ov.arc_ids()) {
      if (ov.arc(a).kind != ArcKind::FramePiece) continue;
      for (Dart d : {2 * a, 2 * a + 1})
        if (ov.region_of(d) != ov.outside_region()) {
          start = d;
          break;
        }
      if (start != -1) break;
    }
    if (start == -1) throw AugmentError("overlay has no frame");
    std::vector<Dart> frame_darts;
    std::vector<ArcId> sep_after;  // line end piece at the node after each dart, -1 if none
    Dart d = start;
    int guard = 100000;
    do {
      if (--guard < 0) throw AugmentError("broken frame walk");
      frame_darts.push_back(d);
      NodeId t = ov.target(d);
      Dart nd = -1;
      ArcId sep = -1;
      for (Dart d2 : ov.out_darts(t)) {
        if (d2 == Overlay::twin(d)) continue;
        ArcKind k = ov.arc(Overlay::arc_of(d2)).kind;
        if (k == ArcKind::FramePiece) {
          nd = d2;
        } else {
          if (sep != -1) throw AugmentError("coincident pseudoline endpoints on the frame");
          sep = Overlay::arc_of(d2);
        }
      }
      if (nd == -1) throw AugmentError("broken frame walk");
      sep_after.push_back(sep);
      d = nd;
    } while (d != start);

    int nf = int(frame_darts.size());
    int nsep = 0;
    for (ArcId s : sep_after)
      if (s != -1) ++nsep;
    if (nsep != 2 * ov.n_lines()) throw AugmentError("unexpected pseudoline end count on the frame");

    // Rotate so the walk starts right after a separator.
    int first = -1;
    for (int i = 0; i < nf; ++i)
      if (sep_after[i] != -1) first = i;
    std::rotate(frame_darts.begin(), frame_darts.begin() + (first + 1) % nf, frame_darts.end());
    std::rotate(sep_after.begin(), sep_after.begin() + (first + 1) % nf, sep_after.end());

    // Stretches between separators, each with one cycle vertex.
    std::vector<VertexId> ws;
    std::vector<ArcId> seps;  // separator following each stretch
    size_t i = 0;
    while (i < size_t(nf)) {
      VertexId w = add_vertex_rec(c, "outer-cycle", frame_darts[i]);
      ws.push_back(w);
      while (sep_after[i] == -1) ++i;
      seps.push_back(sep_after[i]);
      ++i;
    }
    int ns = int(ws.size());
    for (int j = 0; j < ns; ++j) {
      VertexId a = ws[j], b = ws[(j + 1) % ns];
      ArcId s = seps[j];
      RegionId ra = ov.region_of(2 * s), rb = ov.region_of(2 * s + 1);
      // Match each cycle vertex to its side of the separator.
      auto on = [&](VertexId vv, RegionId r) {
        auto rs = regions_of_vertex(ov, vv);
        return std::find(rs.begin(), rs.end(), r) != rs.end();
      };
      if (!on(a, ra)) std::swap(ra, rb);
      if (!on(a, ra) || !on(b, rb)) throw AugmentError("cycle vertex off its separator");
      add_edge_rec(c, "outer-cycle", a, corner_for(ov, a, ra), {{s}}, b, corner_for(ov, b, rb));
    }
  }

  rep.merge(biconnect(ov));
  rep.merge(triangulate(ov));

  auto check = is_proper(ov.export_aligned().ag);
  if (!check.yes) {
    std::ostringstream os;
    os << "properize produced a non-proper result:";
    for (const auto& r : check.reasons) os << " " << r << ";";
    throw AugmentError(os.str());
  }
  return rep;
}

}  // namespace aligned

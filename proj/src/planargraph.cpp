#include "aligned/planargraph.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace aligned {

EmbeddedGraph EmbeddedGraph::from_rotations(const std::vector<std::vector<VertexId>>& rot,
                                            const std::vector<VertexId>& outer_walk) {
  EmbeddedGraph g;
  int n = int(rot.size());
  g.vrep_.assign(n, -1);
  g.valive_.assign(n, 1);

  std::map<std::pair<VertexId, VertexId>, HalfEdge> dir;  // (u,v) -> half-edge u->v
  for (VertexId u = 0; u < n; ++u) {
    std::set<VertexId> seen;
    for (VertexId v : rot[u]) {
      if (v < 0 || v >= n) throw GraphError("rotation references unknown vertex");
      if (v == u) throw GraphError("self-loop in rotation");
      if (!seen.insert(v).second) throw GraphError("parallel edge in rotation");
      if (u < v) {
        HalfEdge h = HalfEdge(g.org_.size());
        g.org_.push_back(u);
        g.org_.push_back(v);
        g.ealive_.push_back(1);
        dir[{u, v}] = h;
        dir[{v, u}] = h ^ 1;
      }
    }
  }
  g.nxt_.assign(g.org_.size(), -1);
  g.prv_.assign(g.org_.size(), -1);
  for (VertexId u = 0; u < n; ++u) {
    int d = int(rot[u].size());
    for (int i = 0; i < d; ++i) {
      auto it = dir.find({u, rot[u][i]});
      if (it == dir.end()) throw GraphError("asymmetric rotation lists");
      HalfEdge h = it->second;
      HalfEdge hn = dir.at({u, rot[u][(i + 1) % d]});
      g.nxt_[h] = hn;
      g.prv_[hn] = h;
      if (i == 0) g.vrep_[u] = h;
    }
  }
  for (HalfEdge h = 0; h < HalfEdge(g.org_.size()); ++h)
    if (g.nxt_[h] < 0) throw GraphError("asymmetric rotation lists");

  // Locate the outer face from the walk, trying both orientations.
  if (outer_walk.size() < 2) throw GraphError("outer walk too short");
  auto try_walk = [&](const std::vector<VertexId>& w) -> HalfEdge {
    auto it = dir.find({w[0], w[1]});
    if (it == dir.end()) return -1;
    HalfEdge h0 = it->second, h = h0;
    for (size_t i = 0; i < w.size(); ++i) {
      if (g.origin(h) != w[i] || g.target(h) != w[(i + 1) % w.size()]) return -1;
      h = g.face_next(h);
    }
    return h == h0 ? h0 : -1;
  };
  HalfEdge h0 = try_walk(outer_walk);
  if (h0 < 0) {
    std::vector<VertexId> rev(outer_walk.rbegin(), outer_walk.rend());
    h0 = try_walk(rev);
  }
  if (h0 < 0) throw GraphError("outer walk does not bound a face");
  g.outer_rep_ = h0;
  g.check_structure();
  return g;
}

int EmbeddedGraph::n_vertices() const {
  return int(std::count(valive_.begin(), valive_.end(), 1));
}

int EmbeddedGraph::n_edges() const {
  return int(std::count(ealive_.begin(), ealive_.end(), 1));
}

std::vector<VertexId> EmbeddedGraph::vertex_ids() const {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < VertexId(valive_.size()); ++v)
    if (valive_[v]) out.push_back(v);
  return out;
}

std::vector<EdgeId> EmbeddedGraph::edge_ids() const {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < EdgeId(ealive_.size()); ++e)
    if (ealive_[e]) out.push_back(e);
  return out;
}

int EmbeddedGraph::degree(VertexId v) const {
  return int(out_half_edges(v).size());
}

std::vector<HalfEdge> EmbeddedGraph::out_half_edges(VertexId v) const {
  std::vector<HalfEdge> out;
  if (!valive_[v] || vrep_[v] < 0) return out;
  HalfEdge h = vrep_[v];
  do {
    out.push_back(h);
    h = nxt_[h];
  } while (h != vrep_[v]);
  return out;
}

std::vector<VertexId> EmbeddedGraph::neighbors_ccw(VertexId v) const {
  std::vector<VertexId> out;
  for (HalfEdge h : out_half_edges(v)) out.push_back(target(h));
  return out;
}

std::optional<HalfEdge> EmbeddedGraph::half_edge(VertexId u, VertexId v) const {
  for (HalfEdge h : out_half_edges(u))
    if (target(h) == v) return h;
  return std::nullopt;
}

std::vector<Face> EmbeddedGraph::faces() const {
  std::vector<Face> out;
  std::vector<char> seen(org_.size(), 0);
  for (HalfEdge h0 = 0; h0 < HalfEdge(org_.size()); ++h0) {
    if (!ealive_[edge_of(h0)] || seen[h0]) continue;
    Face f;
    f.id = FaceId(out.size());
    HalfEdge h = h0;
    do {
      seen[h] = 1;
      f.boundary.push_back(h);
      h = face_next(h);
    } while (h != h0);
    out.push_back(std::move(f));
  }
  return out;
}

FaceId EmbeddedGraph::outer_face() const {
  auto fs = faces();
  for (const auto& f : fs)
    for (HalfEdge h : f.boundary)
      if (h == outer_rep_) return f.id;
  throw GraphError("outer face representative is stale");
}

std::vector<HalfEdge> EmbeddedGraph::outer_walk() const {
  std::vector<HalfEdge> out;
  HalfEdge h = outer_rep_;
  do {
    out.push_back(h);
    h = face_next(h);
  } while (h != outer_rep_);
  return out;
}

std::vector<VertexId> EmbeddedGraph::outer_vertices() const {
  std::vector<VertexId> out;
  std::set<VertexId> seen;
  for (HalfEdge h : outer_walk())
    if (seen.insert(origin(h)).second) out.push_back(origin(h));
  return out;
}

bool EmbeddedGraph::on_outer_face(VertexId v) const {
  for (HalfEdge h : outer_walk())
    if (origin(h) == v) return true;
  return false;
}

bool EmbeddedGraph::is_connected() const {
  auto vs = vertex_ids();
  if (vs.empty()) return true;
  std::set<VertexId> vis{vs[0]};
  std::vector<VertexId> stack{vs[0]};
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (VertexId w : neighbors_ccw(v))
      if (vis.insert(w).second) stack.push_back(w);
  }
  return int(vis.size()) == int(vs.size());
}

bool EmbeddedGraph::is_biconnected() const {
  auto vs = vertex_ids();
  if (vs.size() < 3) return vs.size() == 2 && n_edges() == 1;
  if (!is_connected()) return false;
  // Remove each vertex in turn and test connectivity of the rest.
  for (VertexId cut : vs) {
    std::set<VertexId> vis;
    VertexId start = -1;
    for (VertexId v : vs)
      if (v != cut) {
        start = v;
        break;
      }
    vis.insert(start);
    std::vector<VertexId> stack{start};
    while (!stack.empty()) {
      VertexId v = stack.back();
      stack.pop_back();
      for (VertexId w : neighbors_ccw(v))
        if (w != cut && vis.insert(w).second) stack.push_back(w);
    }
    if (int(vis.size()) != int(vs.size()) - 1) return false;
  }
  return true;
}

bool EmbeddedGraph::is_triangulation() const {
  if (!is_connected()) return false;
  auto fs = faces();
  FaceId outer = outer_face();
  for (const auto& f : fs) {
    if (f.id == outer) continue;
    if (f.boundary.size() != 3) return false;
  }
  return true;
}

void EmbeddedGraph::check_structure() const {
  int n = n_vertices(), m = n_edges();
  for (HalfEdge h = 0; h < HalfEdge(org_.size()); ++h) {
    if (!ealive_[edge_of(h)]) continue;
    if (nxt_[prv_[h]] != h || prv_[nxt_[h]] != h) throw GraphError("broken rotation links");
    if (org_[nxt_[h]] != org_[h]) throw GraphError("rotation mixes vertices");
    if (!valive_[org_[h]]) throw GraphError("half-edge at dead vertex");
  }
  for (VertexId v = 0; v < VertexId(valive_.size()); ++v)
    if (valive_[v] && vrep_[v] >= 0) {
      if (!ealive_[edge_of(vrep_[v])] || org_[vrep_[v]] != v)
        throw GraphError("stale vertex representative");
    }
  if (m > 0) {
    if (outer_rep_ < 0 || !ealive_[edge_of(outer_rep_)])
      throw GraphError("stale outer face representative");
    // Euler: v - e + f = 1 + #components.
    int f = int(faces().size());
    int comps = 0;
    std::set<VertexId> vis;
    for (VertexId v : vertex_ids())
      if (!vis.count(v)) {
        ++comps;
        std::vector<VertexId> stack{v};
        vis.insert(v);
        while (!stack.empty()) {
          VertexId u = stack.back();
          stack.pop_back();
          for (VertexId w : neighbors_ccw(u))
            if (vis.insert(w).second) stack.push_back(w);
        }
      }
    // Face walks are enumerated per edge-component (the shared unbounded
    // region yields one walk per component), so Euler over the non-isolated
    // part reads v - e + f = 2c.
    int iso = 0;
    for (VertexId v : vertex_ids())
      if (vrep_[v] < 0) ++iso;
    int nn = n - iso;
    int nc = comps - iso;
    if (nn - m + f != 2 * nc) throw GraphError("Euler's formula violated");
  }
}

std::vector<EdgeId> EmbeddedGraph::chords() const {
  std::set<EdgeId> boundary;
  std::set<VertexId> outer;
  for (HalfEdge h : outer_walk()) {
    boundary.insert(edge_of(h));
    outer.insert(origin(h));
  }
  std::vector<EdgeId> out;
  for (EdgeId e : edge_ids()) {
    if (boundary.count(e)) continue;
    auto [u, v] = edge_ends(e);
    if (outer.count(u) && outer.count(v)) out.push_back(e);
  }
  return out;
}

EmbeddedGraph::WheelResult EmbeddedGraph::is_k_wheel() const {
  auto vs = vertex_ids();
  auto ow = outer_walk();
  std::set<VertexId> outer;
  for (HalfEdge h : ow) outer.insert(origin(h));
  if (ow.size() != outer.size()) return {};  // outer walk not a simple cycle
  int k = int(outer.size());
  if (k < 3 || int(vs.size()) != k + 1) return {};
  VertexId center = -1;
  for (VertexId v : vs)
    if (!outer.count(v)) center = v;
  if (center < 0 || degree(center) != k) return {};
  for (VertexId v : neighbors_ccw(center))
    if (!outer.count(v)) return {};
  if (n_edges() != 2 * k) return {};
  return {true, center};
}

std::vector<Triangle> EmbeddedGraph::separating_triangles() const {
  if (!is_triangulation()) throw NotATriangulation("separating_triangles: not a triangulation");
  std::set<Triangle> face_tris;
  auto fs = faces();
  for (const auto& f : fs)
    if (f.boundary.size() == 3) {
      VertexId a = origin(f.boundary[0]), b = origin(f.boundary[1]), c = origin(f.boundary[2]);
      Triangle t{a, b, c};
      if (t.a > t.b) std::swap(t.a, t.b);
      if (t.b > t.c) std::swap(t.b, t.c);
      if (t.a > t.b) std::swap(t.a, t.b);
      face_tris.insert(t);
    }
  std::vector<Triangle> out;
  for (EdgeId e : edge_ids()) {
    auto [u, v] = edge_ends(e);
    std::set<VertexId> nu;
    for (VertexId w : neighbors_ccw(u)) nu.insert(w);
    for (VertexId w : neighbors_ccw(v)) {
      if (!nu.count(w)) continue;
      Triangle t{u, v, w};
      if (t.a > t.b) std::swap(t.a, t.b);
      if (t.b > t.c) std::swap(t.b, t.c);
      if (t.a > t.b) std::swap(t.a, t.b);
      if (!face_tris.count(t)) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void EmbeddedGraph::unlink_at_origin(HalfEdge h) {
  VertexId v = org_[h];
  if (nxt_[h] == h) {
    vrep_[v] = -1;
  } else {
    nxt_[prv_[h]] = nxt_[h];
    prv_[nxt_[h]] = prv_[h];
    if (vrep_[v] == h) vrep_[v] = nxt_[h];
  }
}

void EmbeddedGraph::delete_edge(EdgeId e) {
  unlink_at_origin(2 * e);
  unlink_at_origin(2 * e + 1);
  ealive_[e] = 0;
}

std::pair<EmbeddedGraph, VertexId> EmbeddedGraph::subdivide(EdgeId e) const {
  if (!edge_alive(e)) throw GraphError("subdivide: dead edge");
  EmbeddedGraph g = *this;
  HalfEdge h = 2 * e, t = 2 * e + 1;
  VertexId v = g.org_[t];
  VertexId w = VertexId(g.vrep_.size());
  g.vrep_.push_back(-1);
  g.valive_.push_back(1);
  // New edge w-v takes over the v end of e; e becomes u-w.
  HalfEdge gw = HalfEdge(g.org_.size());  // w->v
  HalfEdge gv = gw + 1;                   // v->w
  g.org_.push_back(w);
  g.org_.push_back(v);
  g.ealive_.push_back(1);
  g.nxt_.resize(g.org_.size());
  g.prv_.resize(g.org_.size());
  // Replace t by gv in v's rotation.
  if (g.nxt_[t] == t) {
    g.nxt_[gv] = g.prv_[gv] = gv;
  } else {
    g.nxt_[gv] = g.nxt_[t];
    g.prv_[gv] = g.prv_[t];
    g.nxt_[g.prv_[t]] = gv;
    g.prv_[g.nxt_[t]] = gv;
  }
  if (g.vrep_[v] == t) g.vrep_[v] = gv;
  // t moves to w; rotation at w is (t, gw).
  g.org_[t] = w;
  g.nxt_[t] = gw;
  g.prv_[t] = gw;
  g.nxt_[gw] = t;
  g.prv_[gw] = t;
  g.vrep_[w] = t;
  if (g.outer_rep_ == t) g.outer_rep_ = gv;  // same face, surviving walk member
  g.check_structure();
  return {std::move(g), w};
}

EmbeddedGraph EmbeddedGraph::contract(EdgeId e) const {
  if (!edge_alive(e)) throw GraphError("contract: dead edge");
  EmbeddedGraph g = *this;
  HalfEdge h = 2 * e, t = 2 * e + 1;
  VertexId u = g.org_[h], v = g.org_[t];

  // Shared neighbors must be apexes of the (at most two) faces at e.
  std::set<VertexId> apexes;
  for (HalfEdge s : {h, t}) {
    HalfEdge n1 = g.face_next(s);
    if (g.face_next(g.face_next(n1)) == s) apexes.insert(g.target(n1));
  }
  std::set<VertexId> nu;
  for (VertexId w : g.neighbors_ccw(u)) nu.insert(w);
  std::vector<EdgeId> merge_away;
  for (HalfEdge s : g.out_half_edges(v)) {
    VertexId w = g.target(s);
    if (w == u) continue;
    if (nu.count(w)) {
      if (!apexes.count(w))
        throw WouldCreateMultiEdge("contract: shared neighbor outside incident triangles");
      merge_away.push_back(edge_of(s));
    }
  }

  for (EdgeId me : merge_away) g.delete_edge(me);

  // Splice v's remaining rotation (minus t) into u's rotation at h's slot.
  std::vector<HalfEdge> vrest;
  {
    HalfEdge s = g.nxt_[t];
    while (s != t) {
      vrest.push_back(s);
      s = g.nxt_[s];
    }
  }
  HalfEdge before = g.prv_[h], after = g.nxt_[h];
  bool u_alone = (after == h);  // u had only edge e
  for (HalfEdge s : vrest) g.org_[s] = u;
  if (vrest.empty()) {
    g.unlink_at_origin(h);
  } else if (u_alone) {
    for (size_t i = 0; i < vrest.size(); ++i) {
      g.nxt_[vrest[i]] = vrest[(i + 1) % vrest.size()];
      g.prv_[vrest[(i + 1) % vrest.size()]] = vrest[i];
    }
    g.vrep_[u] = vrest[0];
  } else {
    g.nxt_[before] = vrest.front();
    g.prv_[vrest.front()] = before;
    for (size_t i = 0; i + 1 < vrest.size(); ++i) {
      g.nxt_[vrest[i]] = vrest[i + 1];
      g.prv_[vrest[i + 1]] = vrest[i];
    }
    g.nxt_[vrest.back()] = after;
    g.prv_[after] = vrest.back();
    if (g.vrep_[u] == h) g.vrep_[u] = after;
  }
  g.ealive_[e] = 0;
  g.valive_[v] = 0;
  g.vrep_[v] = -1;

  if (!g.ealive_[edge_of(g.outer_rep_)]) {
    // Pick a surviving half-edge of the old outer walk.
    HalfEdge repl = -1;
    for (HalfEdge s : outer_walk())
      if (g.ealive_[edge_of(s)]) {
        repl = s;
        break;
      }
    if (repl < 0) {
      for (EdgeId ee : g.edge_ids()) {
        repl = 2 * ee;
        break;
      }
    }
    g.outer_rep_ = repl;
  }
  g.check_structure();
  return g;
}

std::pair<EmbeddedGraph, EmbeddedGraph> EmbeddedGraph::split_at_triangle(const Triangle& t) const {
  auto seps = separating_triangles();
  if (std::find(seps.begin(), seps.end(), t) == seps.end())
    throw NotSeparating("split_at_triangle: not a separating triangle");

  // Classify faces: cut the dual at the three triangle edges, flood from the
  // outer face; unreached faces are inside.
  auto fs = faces();
  FaceId outer = outer_face();
  std::set<EdgeId> tri_edges;
  for (auto [a, b] : {std::pair{t.a, t.b}, {t.a, t.c}, {t.b, t.c}})
    tri_edges.insert(edge_of(*half_edge(a, b)));
  std::vector<FaceId> face_of_half(org_.size(), -1);
  for (const auto& f : fs)
    for (HalfEdge h : f.boundary) face_of_half[h] = f.id;
  std::vector<char> outside(fs.size(), 0);
  std::vector<FaceId> stack{outer};
  outside[outer] = 1;
  while (!stack.empty()) {
    FaceId f = stack.back();
    stack.pop_back();
    for (HalfEdge h : fs[f].boundary) {
      if (tri_edges.count(edge_of(h))) continue;
      FaceId g2 = face_of_half[h ^ 1];
      if (!outside[g2]) {
        outside[g2] = 1;
        stack.push_back(g2);
      }
    }
  }

  std::set<VertexId> tset{t.a, t.b, t.c};
  std::set<VertexId> inside_v, outside_v;
  for (VertexId v : vertex_ids()) {
    if (tset.count(v)) continue;
    bool any_in = false, any_out = false;
    for (HalfEdge h : out_half_edges(v)) (outside[face_of_half[h]] ? any_out : any_in) = true;
    if (any_in && any_out) throw GraphError("split_at_triangle: inconsistent face classes");
    (any_out ? outside_v : inside_v).insert(v);
  }

  auto build_part = [&](const std::set<VertexId>& keep_extra,
                        const std::vector<VertexId>& outer_cycle) {
    std::set<VertexId> keep = tset;
    keep.insert(keep_extra.begin(), keep_extra.end());
    std::map<VertexId, VertexId> remap;
    std::vector<VertexId> back;
    for (VertexId v : keep) {
      remap[v] = VertexId(back.size());
      back.push_back(v);
    }
    std::vector<std::vector<VertexId>> rot(back.size());
    for (VertexId v : keep)
      for (VertexId w : neighbors_ccw(v))
        if (keep.count(w)) rot[remap[v]].push_back(remap[w]);
    std::vector<VertexId> ow;
    for (VertexId v : outer_cycle) ow.push_back(remap.at(v));
    return std::make_pair(from_rotations(rot, ow), back);
  };

  auto [gin, gin_back] = build_part(inside_v, {t.a, t.b, t.c});
  std::vector<VertexId> orig_outer;
  for (HalfEdge h : outer_walk()) orig_outer.push_back(origin(h));
  auto [gout, gout_back] = build_part(outside_v, orig_outer);
  (void)gin_back;
  (void)gout_back;
  return {std::move(gin), std::move(gout)};
}

std::pair<std::vector<std::vector<VertexId>>, std::vector<VertexId>>
EmbeddedGraph::compact_rotations() const {
  std::vector<VertexId> back = vertex_ids();
  std::map<VertexId, VertexId> remap;
  for (VertexId i = 0; i < VertexId(back.size()); ++i) remap[back[i]] = i;
  std::vector<std::vector<VertexId>> rot(back.size());
  for (VertexId v : back)
    for (VertexId w : neighbors_ccw(v)) rot[remap[v]].push_back(remap[w]);
  return {std::move(rot), std::move(back)};
}

}  // namespace aligned

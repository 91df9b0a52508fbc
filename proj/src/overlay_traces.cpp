// Combinatorial overlay construction: insert the pseudolines one at a time,
// guided by their traces. Line i's curve is routed region by region; elements
// whose position is already pinned down by earlier lines (crossing nodes,
// aligned-edge crossing groups) are located exactly, and remaining freedom —
// which side of an edge to cross, which corner of a vertex to pass through —
// is resolved by backtracking over the candidates. A final export-and-compare
// pass certifies the result.
#include <algorithm>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "aligned/overlay.hpp"

namespace aligned {

struct TraceBuilder {
  using NodeId = Overlay::NodeId;
  using ArcId = Overlay::ArcId;
  using Dart = Overlay::Dart;
  using NK = Overlay::NodeKind;
  using AK = Overlay::ArcKind;
  using EvK = TraceEvent::Kind;

  struct Item {
    enum class T { Cross, Run, Pass };
    T t = T::Cross;
    EdgeId edge = -1;             // Cross
    std::vector<LineIdx> run;     // Run: the other concurrent lines
    std::vector<VertexId> verts;  // Pass
    std::vector<EdgeId> edges;    // Pass: contained edges, |verts|-1 of them
    FaceId before = -1, after = -1;
  };

  const AlignedGraph& ag;
  Overlay o;
  std::vector<std::vector<Item>> items;  // per line
  std::vector<NodeId> vnode;             // vertex id -> node id
  std::vector<FaceId> face_of_half;      // input half-edge -> input face id
  bool has_faces = false;
  LineIdx cur = -1;      // line being inserted
  Dart cur_corner = -1;  // corner at the line's current node

  explicit TraceBuilder(const AlignedGraph& a) : ag(a) {}

  static std::vector<Item> parse_items(const PseudolineTrace& t) {
    const auto& ev = t.events;
    std::vector<Item> out;
    size_t i = 0;
    if (ev.empty() || ev[0].kind != EvK::Face) throw OverlayError("malformed trace");
    FaceId face = ev[0].id;
    ++i;
    while (i < ev.size()) {
      Item it;
      it.before = face;
      switch (ev[i].kind) {
        case EvK::CrossEdge:
          it.t = Item::T::Cross;
          it.edge = ev[i].id;
          ++i;
          break;
        case EvK::CrossPseudoline:
          it.t = Item::T::Run;
          while (i < ev.size() && ev[i].kind == EvK::CrossPseudoline) it.run.push_back(ev[i++].id);
          break;
        case EvK::ThroughVertex:
          it.t = Item::T::Pass;
          it.verts.push_back(ev[i++].id);
          while (i + 1 < ev.size() && ev[i].kind == EvK::AlongEdge &&
                 ev[i + 1].kind == EvK::ThroughVertex) {
            it.edges.push_back(ev[i].id);
            it.verts.push_back(ev[i + 1].id);
            i += 2;
          }
          break;
        default:
          throw OverlayError("malformed trace");
      }
      if (i >= ev.size() || ev[i].kind != EvK::Face) throw OverlayError("malformed trace");
      face = ev[i].id;
      it.after = face;
      ++i;
      out.push_back(std::move(it));
    }
    return out;
  }

  // --- region machinery ---------------------------------------------------

  // All darts bounding the region left of anchor, including boundary
  // components joined through nesting pairs.
  std::vector<Dart> walkset(Dart anchor) const {
    std::vector<Dart> w;
    std::set<Dart> in;
    auto add_orbit = [&](Dart d0) {
      Dart d = d0;
      do {
        if (in.insert(d).second) w.push_back(d);
        d = o.face_next(d);
      } while (d != d0);
    };
    add_orbit(anchor);
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& pr : o.nest_pairs_) {
        bool a = in.count(pr.first) > 0, b = in.count(pr.second) > 0;
        if (a == b) continue;
        add_orbit(a ? pr.second : pr.first);
        grew = true;
      }
    }
    return w;
  }

  // A nesting pair whose darts ended up on the same boundary walk carries no
  // information anymore; stale pairs must not rejoin regions split later.
  void drop_stale_pairs() {
    std::erase_if(o.nest_pairs_, [&](const std::pair<Dart, Dart>& pr) {
      Dart d = pr.first;
      do {
        if (d == pr.second) return true;
        d = o.face_next(d);
      } while (d != pr.first);
      return false;
    });
  }

  // Graph face of the region left of anchor: flood across non-edge arcs until
  // some edge piece tells us its face. -1 when no edge is reachable.
  FaceId region_graph_face(Dart anchor) const {
    std::set<Dart> seen;
    std::vector<Dart> stack{anchor};
    while (!stack.empty()) {
      Dart d = stack.back();
      stack.pop_back();
      if (!seen.insert(d).second) continue;
      const auto& arc = o.arcs_[Overlay::arc_of(d)];
      if (arc.kind == AK::EdgePiece) return face_of_half[2 * arc.edge + (d & 1)];
      stack.push_back(o.face_next(d));
      stack.push_back(Overlay::twin(d));
      for (const auto& pr : o.nest_pairs_) {
        if (pr.first == d) stack.push_back(pr.second);
        if (pr.second == d) stack.push_back(pr.first);
      }
    }
    return -1;
  }

  // --- linking ------------------------------------------------------------

  // New piece of the current line from the current position to a corner.
  void make_piece_to_corner(Dart to_corner) {
    Overlay::Arc a;
    a.kind = AK::LinePiece;
    a.line = cur;
    ArcId ap = o.new_arc(std::move(a), o.org_[cur_corner], o.org_[to_corner]);
    o.attach_at_corner(2 * ap, cur_corner);
    o.attach_at_corner(2 * ap + 1, to_corner);
    o.touch();
    drop_stale_pairs();
  }

  ArcId make_piece_to_isolated(NodeId target) {
    Overlay::Arc a;
    a.kind = AK::LinePiece;
    a.line = cur;
    ArcId ap = o.new_arc(std::move(a), o.org_[cur_corner], target);
    o.attach_at_corner(2 * ap, cur_corner);
    o.attach_isolated(2 * ap + 1, target);
    o.touch();
    drop_stale_pairs();
    return ap;
  }

  // Split the arc under walk dart td at a new node and run the line through
  // it: link into the near side, continue from the far side.
  void cross_at(Dart td, Overlay::Node mnode) {
    ArcId a = Overlay::arc_of(td);
    bool fwd = (td == 2 * a);
    NodeId m = o.new_node(std::move(mnode));
    ArcId a2 = o.split_arc(a, m);
    // split_arc moves dart 2a+1 to the new node; its slot at the old target
    // is taken over by 2a2+1
    if (cur_corner == 2 * a + 1) cur_corner = 2 * a2 + 1;
    Dart in = fwd ? 2 * a + 1 : 2 * a2;
    Dart out = fwd ? 2 * a2 : 2 * a + 1;
    make_piece_to_corner(in);
    cur_corner = out;
  }

  int pos_in(const std::vector<Dart>& ds, Dart d) const {
    auto p = std::find(ds.begin(), ds.end(), d);
    if (p == ds.end()) throw OverlayError("dart not found at node");
    return int(p - ds.begin());
  }

  // Run the line through an existing crossing node entered via walk dart din.
  // A proper crossing node is perfectly alternating, so the line leaves
  // through the diametrically opposite corner.
  void pass_node(Dart din) {
    NodeId n = o.org_[Overlay::twin(din)];
    auto ds = o.out_darts(n);
    int q = int(ds.size());
    if (q % 2) throw OverlayError("crossing node with odd degree");
    auto key = [&](Dart d) -> std::pair<int, int> {
      const auto& arc = o.arcs_[Overlay::arc_of(d)];
      if (arc.kind == AK::EdgePiece) return {0, arc.edge};
      return {1, arc.line};
    };
    for (int t = 0; t < q / 2; ++t)
      if (key(ds[t]) != key(ds[t + q / 2])) throw OverlayError("crossing node not alternating");
    Dart cin = Overlay::twin(din);
    int p = pos_in(ds, cin);
    Dart cout = ds[(p + q / 2) % q];
    make_piece_to_corner(cin);
    cur_corner = cout;
  }

  // --- vertex passages ----------------------------------------------------

  // Cuts on the doubled rotation circle at a node with q darts: the gap
  // clockwise of ds[t] sits at 2t, the dart ds[p] itself at 2p+1. A curve
  // through cuts c1, c2 separates two darts iff exactly one lies strictly
  // between them.
  static bool separated(int q, int cut1, int cut2, int ia, int ib) {
    int n = 2 * q;
    int relb = ((cut2 - cut1) % n + n) % n;
    auto between = [&](int x) {
      int rel = ((x - cut1) % n + n) % n;
      return rel > 0 && rel < relb;
    };
    return between(2 * ia + 1) != between(2 * ib + 1);
  }

  // The current line, passing through node n via cut1/cut2, must cross every
  // earlier line incident to n.
  bool alternation_ok(NodeId n, int cut1, int cut2) const {
    auto ds = o.out_darts(n);
    int q = int(ds.size());
    for (LineIdx l : o.nodes_[n].lines) {
      if (l >= cur) continue;  // not inserted yet (or ourselves)
      std::vector<int> at;
      for (int t = 0; t < q; ++t) {
        const auto& arc = o.arcs_[Overlay::arc_of(ds[t])];
        if (arc.kind != AK::FramePiece && arc.line == l) at.push_back(t);
      }
      if (at.size() != 2) throw OverlayError("pseudoline incidence mismatch at a vertex");
      if (!separated(q, cut1, cut2, at[0], at[1])) return false;
    }
    return true;
  }

  Dart edge_dart_at(NodeId n, EdgeId e) const {
    for (Dart d : o.out_darts(n)) {
      const auto& arc = o.arcs_[Overlay::arc_of(d)];
      if (arc.kind == AK::EdgePiece && arc.edge == e) return d;
    }
    throw OverlayError("passage edge not incident to its vertex");
  }

  // --- element location ---------------------------------------------------

  // Crossing nodes already materialized along line j before its item `stop`,
  // as seen while inserting line cur > j.
  int nodes_before(LineIdx j, int stop) const {
    int cnt = 0;
    for (int t = 0; t < stop; ++t) {
      const Item& it = items[j][t];
      switch (it.t) {
        case Item::T::Cross:
          cnt += 1;
          break;
        case Item::T::Run: {
          std::vector<LineIdx> G = it.run;
          G.push_back(j);
          std::sort(G.begin(), G.end());
          // the node exists once the group's second-smallest member arrived
          if (G[1] < cur) cnt += 1;
          break;
        }
        case Item::T::Pass: {
          cnt += int(it.verts.size());
          for (EdgeId e : it.edges) {
            auto gi = ag.aligned_edge_cross_order.find(e);
            if (gi == ag.aligned_edge_cross_order.end()) continue;
            for (const Group& gr : gi->second)
              if (gr.front() < cur) cnt += 1;
          }
          break;
        }
      }
    }
    return cnt;
  }

  // One way of realizing a Cross or Run element from the current region.
  struct Hit {
    bool create = false;
    Dart td = -1;        // walk dart: arc to split (create) or entry (pass)
    Overlay::Node make;  // node to create
  };

  void aligned_cross_candidates(const std::vector<Dart>& walk, EdgeId e,
                                std::vector<Hit>& out) const {
    auto gi = ag.aligned_edge_cross_order.find(e);
    if (gi == ag.aligned_edge_cross_order.end())
      throw OverlayError("crossing missing from the edge's crossing order");
    const auto& groups = gi->second;
    int g = -1;
    for (int t = 0; t < int(groups.size()); ++t)
      if (std::find(groups[t].begin(), groups[t].end(), cur) != groups[t].end()) g = t;
    if (g == -1) throw OverlayError("crossing missing from the edge's crossing order");
    auto mat = [&](const Group& gr) { return gr.front() < cur; };
    int before_uv = 0;
    for (int t = 0; t < g; ++t)
      if (mat(groups[t])) ++before_uv;
    auto chain = o.edge_chain(e);
    bool same_dir = o.nodes_[o.org_[chain.front()]].vertex == ag.graph.edge_ends(e).first;
    std::vector<NodeId> xnodes;  // crossing nodes in chain order
    for (size_t t = 0; t + 1 < chain.size(); ++t)
      xnodes.push_back(o.org_[Overlay::twin(chain[t])]);
    int X = int(xnodes.size());
    if (mat(groups[g])) {
      // the node already exists; groups are counted from the chain's far end
      // when the chain runs v -> u
      int idx = same_dir ? before_uv : X - 1 - before_uv;
      if (idx < 0 || idx >= X) throw OverlayError("edge crossing index out of range");
      NodeId n = xnodes[idx];
      for (Dart d : walk)
        if (o.org_[Overlay::twin(d)] == n) out.push_back(Hit{false, d, {}});
      return;
    }
    int p = same_dir ? before_uv : X - before_uv;
    if (p < 0 || p >= int(chain.size())) throw OverlayError("edge crossing piece out of range");
    Dart piece = chain[p];
    for (Dart d : walk)
      if (d == piece || d == Overlay::twin(piece)) {
        Hit h;
        h.create = true;
        h.td = d;
        h.make.kind = NK::EdgeCross;
        h.make.edge = e;
        h.make.lines = groups[g];
        h.make.lines.push_back(ag.cls.edge_class[e].aligned_line);
        std::sort(h.make.lines.begin(), h.make.lines.end());
        out.push_back(std::move(h));
      }
  }

  std::vector<Hit> hit_candidates(const std::vector<Dart>& walk, const Item& it) const {
    std::vector<Hit> out;
    if (it.t == Item::T::Cross) {
      EdgeId e = it.edge;
      if (ag.cls.edge_class[e].aligned()) {
        aligned_cross_candidates(walk, e, out);
        return out;
      }
      for (Dart d : walk) {
        const auto& arc = o.arcs_[Overlay::arc_of(d)];
        if (arc.kind == AK::EdgePiece && arc.edge == e) {
          Hit h;
          h.create = true;
          h.td = d;
          h.make.kind = NK::EdgeCross;
          h.make.edge = e;
          h.make.lines = {cur};
          out.push_back(std::move(h));
        }
      }
      return out;
    }
    // concurrent crossing
    std::vector<LineIdx> G = it.run;
    G.push_back(cur);
    std::sort(G.begin(), G.end());
    int pos = int(std::find(G.begin(), G.end(), cur) - G.begin());
    if (pos == 1) {
      // second arrival creates the node, pinned on the first line's chain
      LineIdx j = G[0];
      int stop = -1;
      for (int t = 0; t < int(items[j].size()); ++t) {
        const Item& jt = items[j][t];
        if (jt.t == Item::T::Run &&
            std::find(jt.run.begin(), jt.run.end(), cur) != jt.run.end()) {
          stop = t;
          break;
        }
      }
      if (stop == -1) throw OverlayError("concurrent crossing missing from the earlier trace");
      int nb = nodes_before(j, stop);
      auto chain = o.line_chain(j);
      if (nb >= int(chain.size())) throw OverlayError("crossing position off the pseudoline");
      Dart piece = chain[nb];
      if (o.arcs_[Overlay::arc_of(piece)].kind != AK::LinePiece)
        throw OverlayError("concurrent crossing inside an aligned edge");
      for (Dart d : walk)
        if (d == piece || d == Overlay::twin(piece)) {
          Hit h;
          h.create = true;
          h.td = d;
          h.make.kind = NK::LineCross;
          h.make.lines = G;
          out.push_back(std::move(h));
        }
      return out;
    }
    // third or later arrival: the node exists, identified by its line set
    NodeId n = -1;
    for (NodeId mm : o.node_ids())
      if (o.nodes_[mm].kind == NK::LineCross && o.nodes_[mm].lines == G) n = mm;
    if (n == -1) throw OverlayError("missing concurrent crossing node");
    for (Dart d : walk)
      if (o.org_[Overlay::twin(d)] == n) out.push_back(Hit{false, d, {}});
    return out;
  }

  // One way of passing through the vertices of a Pass element: the corner to
  // link the incoming piece at, and the corner to continue from.
  struct PassPlan {
    Dart entry = -1;  // corner at the first vertex; -1 when it is isolated
    Dart exit = -1;   // corner at the last vertex; -1 when entry is isolated
  };

  std::vector<PassPlan> pass_candidates(const std::vector<Dart>& walk, const Item& it) const {
    std::vector<PassPlan> out;
    NodeId n0 = vnode[it.verts.front()];
    int m = int(it.verts.size()) - 1;
    if (o.nrep_[n0] == -1) {
      if (m != 0) throw OverlayError("isolated vertex with incident passage edges");
      Dart anc = o.isolated_anchor_[n0];
      if (std::find(walk.begin(), walk.end(), anc) != walk.end()) out.push_back(PassPlan{});
      return out;
    }
    std::vector<Dart> entries;  // corner darts at n0 bounding the region
    for (Dart d : walk)
      if (o.org_[Overlay::twin(d)] == n0) entries.push_back(Overlay::twin(d));

    if (m >= 1) {
      // the contained edges fix the route; check alternation inside
      for (int j = 1; j < m; ++j) {
        NodeId nj = vnode[it.verts[j]];
        auto ds = o.out_darts(nj);
        int p1 = pos_in(ds, edge_dart_at(nj, it.edges[j - 1]));
        int p2 = pos_in(ds, edge_dart_at(nj, it.edges[j]));
        if (!alternation_ok(nj, 2 * p1 + 1, 2 * p2 + 1)) return out;
      }
      auto ds0 = o.out_darts(n0);
      int pe = pos_in(ds0, edge_dart_at(n0, it.edges[0]));
      NodeId nm = vnode[it.verts.back()];
      auto dsm = o.out_darts(nm);
      int qm = int(dsm.size());
      int pa = pos_in(dsm, edge_dart_at(nm, it.edges.back()));
      for (Dart c : entries) {
        if (!alternation_ok(n0, 2 * pos_in(ds0, c), 2 * pe + 1)) continue;
        for (int off = 0; off < qm; ++off) {
          int s = (pa + off) % qm;
          if (!alternation_ok(nm, 2 * pa + 1, 2 * s)) continue;
          if (has_faces) {
            FaceId f = region_graph_face(Overlay::twin(dsm[s]));
            if (f != -1 && f != it.after) continue;
          }
          out.push_back(PassPlan{c, dsm[s]});
        }
      }
      return out;
    }
    // single vertex: entry corner and exit gap chosen jointly
    auto ds = o.out_darts(n0);
    int q = int(ds.size());
    for (Dart c : entries) {
      int t = pos_in(ds, c);
      for (int off = 1; off < q; ++off) {
        int s = (t + off) % q;
        if (!alternation_ok(n0, 2 * t, 2 * s)) continue;
        if (has_faces) {
          FaceId f = region_graph_face(Overlay::twin(ds[s]));
          if (f != -1 && f != it.after) continue;
        }
        out.push_back(PassPlan{c, ds[s]});
      }
    }
    return out;
  }

  void apply_pass(const Item& it, const PassPlan& plan) {
    if (plan.entry == -1) {
      ArcId ap = make_piece_to_isolated(vnode[it.verts.front()]);
      cur_corner = 2 * ap + 1;
      return;
    }
    make_piece_to_corner(plan.entry);
    cur_corner = plan.exit;
  }

  // --- per-line routing ---------------------------------------------------

  struct Snapshot {
    Overlay o;
    Dart cur_corner;
  };
  Snapshot save() const { return {o, cur_corner}; }
  void restore(Snapshot& s) {
    o = std::move(s.o);
    cur_corner = s.cur_corner;
  }

  // Splits the first frame piece on the current region at the line's closing
  // frame node and links the final piece. False when the frame is out of
  // reach from here.
  bool finish_exit() {
    std::vector<Dart> w = walkset(Overlay::twin(cur_corner));
    Dart td = -1;
    for (Dart d : w)
      if (o.arcs_[Overlay::arc_of(d)].kind == AK::FramePiece) {
        td = d;
        break;
      }
    if (td == -1) return false;
    ArcId a = Overlay::arc_of(td);
    bool fwd = (td == 2 * a);
    Overlay::Node fn;
    fn.kind = NK::Frame;
    fn.lines = {cur};
    ArcId a2 = o.split_arc(a, o.new_node(std::move(fn)));
    if (cur_corner == 2 * a + 1) cur_corner = 2 * a2 + 1;
    make_piece_to_corner(fwd ? 2 * a + 1 : 2 * a2);
    return true;
  }

  // Realizes work[t..] from the current position, backtracking over the
  // candidate realizations of each element.
  bool route(const std::vector<const Item*>& work, size_t t) {
    if (t == work.size()) {
      Snapshot snap = save();
      try {
        if (finish_exit()) return true;
      } catch (const OverlayError&) {
      }
      restore(snap);
      return false;
    }
    const Item& it = *work[t];
    std::vector<Dart> w = walkset(Overlay::twin(cur_corner));
    if (has_faces) {
      FaceId bf = region_graph_face(Overlay::twin(cur_corner));
      if (bf != -1 && bf != it.before) return false;
    }
    if (it.t == Item::T::Pass) {
      for (const PassPlan& plan : pass_candidates(w, it)) {
        Snapshot snap = save();
        try {
          apply_pass(it, plan);
          if (route(work, t + 1)) return true;
        } catch (const OverlayError&) {
        }
        restore(snap);
      }
      return false;
    }
    for (const Hit& h : hit_candidates(w, it)) {
      Snapshot snap = save();
      try {
        if (h.create)
          cross_at(h.td, h.make);
        else
          pass_node(h.td);
        if (route(work, t + 1)) return true;
      } catch (const OverlayError&) {
      }
      restore(snap);
    }
    return false;
  }

  void insert_line(LineIdx i) {
    cur = i;
    std::vector<const Item*> work;
    for (const Item& it : items[i]) {
      if (it.t == Item::T::Run) {
        // the group's first line records nothing; the node appears when the
        // second member is inserted
        bool first = true;
        for (LineIdx l : it.run)
          if (l < i) first = false;
        if (first) continue;
      }
      work.push_back(&it);
    }
    for (ArcId entry : o.arc_ids()) {
      if (o.arcs_[entry].kind != AK::FramePiece) continue;
      Snapshot snap = save();
      try {
        Overlay::Node fn;
        fn.kind = NK::Frame;
        fn.lines = {i};
        o.split_arc(entry, o.new_node(std::move(fn)));
        cur_corner = 2 * entry + 1;  // inner-side corner at the new frame node
        if (route(work, 0)) return;
      } catch (const OverlayError&) {
      }
      restore(snap);
    }
    throw OverlayError("no planar routing realizes the trace");
  }

  // --- base structure -----------------------------------------------------

  void build_base() {
    const EmbeddedGraph& g = ag.graph;
    int maxv = 0;
    for (VertexId v : g.vertex_ids()) maxv = std::max(maxv, v + 1);
    vnode.assign(maxv, -1);
    for (VertexId v : g.vertex_ids()) {
      Overlay::Node n;
      n.kind = NK::Vertex;
      n.vertex = v;
      n.lines = ag.cls.vertex_lines[v];
      vnode[v] = o.new_node(std::move(n));
    }
    int maxe = 0;
    for (EdgeId e : g.edge_ids()) maxe = std::max(maxe, e + 1);
    std::vector<ArcId> earc(maxe, -1);
    for (EdgeId e : g.edge_ids()) {
      Overlay::Arc a;
      a.kind = AK::EdgePiece;
      a.edge = e;
      a.line = ag.cls.edge_class[e].aligned_line;
      auto [u, v] = g.edge_ends(e);
      earc[e] = o.new_arc(std::move(a), vnode[u], vnode[v]);
    }
    auto dart_of = [&](HalfEdge h) { return 2 * earc[h >> 1] + (h & 1); };
    for (VertexId v : g.vertex_ids()) {
      auto hs = g.out_half_edges(v);
      if (hs.empty()) continue;
      std::vector<Dart> ds;
      for (HalfEdge h : hs) ds.push_back(dart_of(h));
      int q = int(ds.size());
      for (int t = 0; t < q; ++t) {
        o.nxt_[ds[t]] = ds[(t + 1) % q];
        o.prv_[ds[(t + 1) % q]] = ds[t];
      }
      o.nrep_[vnode[v]] = ds[0];
    }
    // frame: four corners joined counterclockwise, graph nested inside
    NodeId fnode[4];
    ArcId farc[4];
    for (int s = 0; s < 4; ++s) {
      Overlay::Node n;
      n.kind = NK::Frame;
      fnode[s] = o.new_node(std::move(n));
    }
    for (int s = 0; s < 4; ++s) {
      Overlay::Arc a;
      a.kind = AK::FramePiece;
      farc[s] = o.new_arc(std::move(a), fnode[s], fnode[(s + 1) % 4]);
    }
    for (int s = 0; s < 4; ++s) {
      Dart f = 2 * farc[s], b = 2 * farc[(s + 3) % 4] + 1;
      o.nxt_[f] = b;
      o.prv_[f] = b;
      o.nxt_[b] = f;
      o.prv_[b] = f;
      o.nrep_[fnode[s]] = f;
    }
    if (g.n_edges() > 0) {
      o.nest_pairs_.push_back({2 * farc[0], dart_of(g.outer_walk().front())});
      face_of_half.assign(2 * maxe, -1);
      for (const Face& f : g.faces())
        for (HalfEdge h : f.boundary) face_of_half[h] = f.id;
      has_faces = true;
    } else {
      for (VertexId v : g.vertex_ids()) o.isolated_anchor_[vnode[v]] = 2 * farc[0];
    }
    o.touch();
  }

  // --- certification ------------------------------------------------------

  void verify() const {
    Overlay::Export ex = o.export_aligned();
    if (ex.ag.system.crossing_order != ag.system.crossing_order)
      throw OverlayError("constructed overlay disagrees with the crossing orders");
    const EmbeddedGraph& g = ag.graph;
    const EmbeddedGraph& eg = ex.ag.graph;
    std::vector<FaceId> fmap;
    if (g.n_edges() > 0) {
      auto efaces = eg.faces();
      int maxh = 0;
      for (const Face& f : efaces)
        for (HalfEdge h : f.boundary) maxh = std::max(maxh, h + 1);
      std::vector<FaceId> efh(maxh, -1);
      for (const Face& f : efaces)
        for (HalfEdge h : f.boundary) efh[h] = f.id;
      auto map_half = [&](HalfEdge h) {
        EdgeId E = ex.edge_to.at(h >> 1);
        VertexId u = ex.vertex_to.at(g.origin(h));
        return eg.origin(2 * E) == u ? 2 * E : 2 * E + 1;
      };
      auto gfaces = g.faces();
      fmap.assign(gfaces.size(), -1);
      for (const Face& f : gfaces) fmap[f.id] = efh[map_half(f.boundary.front())];
    }
    auto canon = [&](const PseudolineTrace& t, bool mapped) {
      std::vector<TraceEvent> evs;
      for (TraceEvent e : t.events) {
        if (mapped) {
          switch (e.kind) {
            case EvK::Face:
              if (e.id >= 0 && e.id < int(fmap.size())) e.id = fmap[e.id];
              break;
            case EvK::CrossEdge:
            case EvK::AlongEdge:
              e.id = ex.edge_to.at(e.id);
              break;
            case EvK::ThroughVertex:
              e.id = ex.vertex_to.at(e.id);
              break;
            default:
              break;
          }
        }
        evs.push_back(e);
      }
      // concurrent crossings are unordered within a run
      for (size_t a = 0; a < evs.size();) {
        if (evs[a].kind != EvK::CrossPseudoline) {
          ++a;
          continue;
        }
        size_t b = a;
        while (b < evs.size() && evs[b].kind == EvK::CrossPseudoline) ++b;
        std::sort(evs.begin() + int(a), evs.begin() + int(b),
                  [](const TraceEvent& x, const TraceEvent& y) { return x.id < y.id; });
        a = b;
      }
      return evs;
    };
    for (LineIdx i = 0; i < ag.system.k; ++i)
      if (canon(ag.traces[i], true) != canon(ex.ag.traces[i], false))
        throw OverlayError("constructed overlay does not realize the traces");
  }

  Overlay run() {
    const EmbeddedGraph& g = ag.graph;
    if (g.n_edges() > 0 && !g.is_connected())
      throw OverlayError("trace construction requires a connected graph");
    for (int i = 0; i < ag.system.k; ++i) items.push_back(parse_items(ag.traces[i]));
    o.k_ = ag.system.k;
    build_base();
    for (LineIdx i = 0; i < ag.system.k; ++i) insert_line(i);
    drop_stale_pairs();
    o.touch();
    o.check_structure();
    verify();
    return std::move(o);
  }
};

Overlay Overlay::from_traces(const AlignedGraph& ag) {
  TraceBuilder b(ag);
  return b.run();
}

}  // namespace aligned

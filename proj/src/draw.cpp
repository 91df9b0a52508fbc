#include "aligned/draw.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "aligned/augment.hpp"
#include "aligned/overlay.hpp"
#include "aligned/validate.hpp"

namespace aligned {

namespace {

using Dart = Overlay::Dart;
using NodeId = Overlay::NodeId;
using ArcId = Overlay::ArcId;
using RegionId = Overlay::RegionId;

Rat rabs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

std::vector<VertexId> walk_vertices(const EmbeddedGraph& g) {
  std::vector<VertexId> w;
  for (HalfEdge h : g.outer_walk()) w.push_back(g.origin(h));
  return w;
}

std::set<EdgeId> outer_edge_set(const EmbeddedGraph& g) {
  std::set<EdgeId> s;
  for (HalfEdge h : g.outer_walk()) s.insert(EmbeddedGraph::edge_of(h));
  return s;
}

// ---------------------------------------------------------------------------
// Recursion state. Vertex data lives in a stable "context" id space (the ids
// of the graph the recursion started from); pieces carry a map from their own
// vertex ids into it. Edge roles are re-derived from the endpoint data, which
// survives contraction and piece extraction unchanged.
// ---------------------------------------------------------------------------

struct Piece {
  EmbeddedGraph g;
  std::vector<VertexId> orig;  // piece vertex id -> context vertex id
};

struct Ctx {
  const LineArrangement* arr = nullptr;
  CellComplex geo;  // geometric cells clipped at box (k-line recursion only)
  BBox box{Rat(-1), Rat(-1), Rat(1), Rat(1)};
  std::vector<std::vector<LineIdx>> vlines;  // per context vertex id
  std::vector<std::vector<int>> vsign;       // per context id, per line; 0 = on it
  std::map<VertexId, Point> pos;             // per context vertex id
};

bool v_placed(const Ctx& c, const Piece& p, VertexId v) {
  return c.pos.count(p.orig[v]) != 0;
}

bool any_unplaced(const Ctx& c, const Piece& p) {
  for (VertexId v : p.g.vertex_ids())
    if (!v_placed(c, p, v)) return true;
  return false;
}

// An edge is contractible when it is free (both endpoints off all lines, same
// cell) or aligned with both endpoints only on its own line and equal sides
// elsewhere. Both conditions reduce to equal per-vertex data.
bool contractible(const Ctx& c, const Piece& p, VertexId u, VertexId v) {
  VertexId cu = p.orig[u], cv = p.orig[v];
  if (c.vlines[cu] != c.vlines[cv]) return false;
  if (c.vlines[cu].size() > 1) return false;
  return c.vsign[cu] == c.vsign[cv];
}

// ---------------------------------------------------------------------------
// Side calibration: maps the overlay's combinatorial "left of pseudoline i"
// cell signs onto geometric eval signs of line i. Measured pairwise: the cell
// left of line i's start lies, with respect to any other line j, on the side
// opposite to line i's traversal direction.
// ---------------------------------------------------------------------------

std::vector<int> calibrate_sigma(const Overlay& ov, const LineArrangement& a,
                                 const CellBijection& cb) {
  int k = int(a.lines.size());
  std::vector<int> sigma(k, 1);
  if (k < 2) return sigma;
  const auto& signs = ov.cell_signs();
  for (LineIdx j = 0; j < k; ++j) {
    int got = 0;
    for (LineIdx i = 0; i < k; ++i) {
      if (i == j) continue;
      Point oi = a.lines[i].direction() * Rat(cb.line_flip[i]);
      int cell = ov.cell_of_region(ov.region_of(ov.line_chain(i).front()));
      if (cell < 0) throw DrawError("line start region lies outside the frame");
      int raw = signs[cell][j];
      int geo = -sign_of(a.lines[j].a * oi.x + a.lines[j].b * oi.y);
      if (raw == 0 || geo == 0) throw DrawError("degenerate side calibration");
      int s = geo * raw;
      if (got == 0)
        got = s;
      else if (got != s)
        throw DrawError("inconsistent side calibration across lines");
    }
    sigma[j] = got;
  }
  return sigma;
}

void build_vertex_data(Ctx& c, const Overlay& ov, const Overlay::Export& ex,
                       const std::vector<int>& sigma) {
  int k = ov.n_lines();
  int n = int(ex.vertex_of.size());
  c.vlines = ex.ag.cls.vertex_lines;
  c.vlines.resize(n);
  c.vsign.assign(n, std::vector<int>(k, 0));
  const auto& signs = ov.cell_signs();
  for (VertexId nv : ex.ag.graph.vertex_ids()) {
    VertexId ovv = ex.vertex_of[nv];
    NodeId nd = ov.node_of_vertex(ovv);
    auto ds = ov.out_darts(nd);
    RegionId r =
        ds.empty() ? ov.region_of(ov.isolated_anchor(ovv)) : ov.corner_region(ds.front());
    int cell = ov.cell_of_region(r);
    if (cell < 0) throw DrawError("vertex region lies outside the frame");
    for (LineIdx j = 0; j < k; ++j) {
      bool on = std::find(c.vlines[nv].begin(), c.vlines[nv].end(), j) != c.vlines[nv].end();
      c.vsign[nv][j] = on ? 0 : signs[cell][j] * sigma[j];
    }
  }
}

// ---------------------------------------------------------------------------
// Piece extraction: induced subgraph on a kept edge set, vertices renumbered,
// with the composed map back into the context id space.
// ---------------------------------------------------------------------------

Piece induce(const Piece& p, const std::set<EdgeId>& keep, const std::vector<VertexId>& outer) {
  std::map<VertexId, VertexId> to_new;
  std::vector<VertexId> order;
  for (VertexId v : p.g.vertex_ids()) {
    for (HalfEdge h : p.g.out_half_edges(v))
      if (keep.count(EmbeddedGraph::edge_of(h))) {
        to_new[v] = int(order.size());
        order.push_back(v);
        break;
      }
  }
  std::vector<std::vector<VertexId>> rot(order.size());
  for (int i = 0; i < int(order.size()); ++i)
    for (HalfEdge h : p.g.out_half_edges(order[i]))
      if (keep.count(EmbeddedGraph::edge_of(h))) rot[i].push_back(to_new.at(p.g.target(h)));
  std::vector<VertexId> ow;
  for (VertexId v : outer) ow.push_back(to_new.at(v));
  Piece q;
  q.g = EmbeddedGraph::from_rotations(rot, ow);
  q.orig.resize(order.size());
  for (int i = 0; i < int(order.size()); ++i) q.orig[i] = p.orig[order[i]];
  return q;
}

struct TriSplit {
  Piece out, in;
};

// Splits a piece at a separating triangle: the outer part keeps the original
// outer walk and sees the triangle as an inner face; the inner part has the
// triangle as its outer face. The triangle edges belong to both parts.
TriSplit split_triangle(const Piece& p, const Triangle& t) {
  auto he = [&](VertexId x, VertexId y) {
    auto h = p.g.half_edge(x, y);
    if (!h) throw DrawError("separating triangle is missing an edge");
    return EmbeddedGraph::edge_of(*h);
  };
  std::set<EdgeId> tedges = {he(t.a, t.b), he(t.b, t.c), he(t.c, t.a)};

  auto faces = p.g.faces();
  int hmax = 0;
  for (EdgeId e : p.g.edge_ids()) hmax = std::max(hmax, 2 * e + 2);
  std::vector<FaceId> face_of(hmax, -1);
  for (const Face& f : faces)
    for (HalfEdge h : f.boundary) face_of[h] = f.id;

  std::vector<char> outside(faces.size(), 0);
  std::vector<FaceId> stack = {p.g.outer_face()};
  outside[p.g.outer_face()] = 1;
  while (!stack.empty()) {
    FaceId f = stack.back();
    stack.pop_back();
    for (HalfEdge h : faces[f].boundary) {
      if (tedges.count(EmbeddedGraph::edge_of(h))) continue;
      FaceId g2 = face_of[EmbeddedGraph::twin(h)];
      if (g2 >= 0 && !outside[g2]) {
        outside[g2] = 1;
        stack.push_back(g2);
      }
    }
  }

  std::set<EdgeId> eout, ein;
  for (EdgeId e : p.g.edge_ids()) {
    if (tedges.count(e)) {
      eout.insert(e);
      ein.insert(e);
      continue;
    }
    bool o = outside[face_of[2 * e]] || outside[face_of[2 * e + 1]];
    (o ? eout : ein).insert(e);
  }

  TriSplit s;
  s.out = induce(p, eout, walk_vertices(p.g));
  s.in = induce(p, ein, {t.a, t.b, t.c});
  return s;
}

// ---------------------------------------------------------------------------
// Geometric vertex re-insertion after a contraction: the removed endpoint w
// goes inside the kernel of its neighbor polygon, stepping toward the kept
// endpoint until all exact planarity and side checks pass.
// ---------------------------------------------------------------------------

bool spokes_ok(const std::vector<Point>& poly, const Point& q) {
  int m = int(poly.size());
  for (int r = 0; r < m; ++r) {
    if (q == poly[r]) return false;
    for (int s = 0; s < m; ++s) {
      if (s == r) continue;
      if (poly[s] == poly[r]) return false;
      if (on_segment(q, poly[s], poly[r])) return false;
    }
    for (int s = 0; s < m; ++s) {
      int s2 = (s + 1) % m;
      if (s == r || s2 == r) continue;
      if (segment_intersection(q, poly[r], poly[s], poly[s2]).kind != SegXKind::None)
        return false;
    }
  }
  return true;
}

// want[j]: required side of line j (-1/0/+1); on_line binds q to that line.
Point insert_in_link(std::vector<Point> poly, const Point& zp, const std::vector<Line>& lines,
                     const std::vector<int>& want, std::optional<Line> on_line) {
  if (poly.size() < 3) throw EmptyKernel("link polygon has fewer than three corners");
  if (polygon_area2(poly) < 0) std::reverse(poly.begin(), poly.end());
  std::vector<Point> kern;
  try {
    kern = kernel_of_star_polygon(poly);
  } catch (const NonSimplePolygon&) {
    throw EmptyKernel("link polygon is not simple");
  }
  if (kern.empty()) throw EmptyKernel("link polygon has an empty kernel");

  Point start;
  if (on_line) {
    auto clip = line_convex_clip(*on_line, kern);
    if (clip.size() != 2 || clip[0] == clip[1])
      throw NoLineSegmentInKernel("kernel contains no segment of the vertex's line");
    Rat t0 = on_line->param_of(clip[0]);
    Rat t1 = on_line->param_of(clip[1]);
    Rat tz = on_line->param_of(zp);
    start = on_line->point_at(rabs(t0 - tz) >= rabs(t1 - tz) ? t0 : t1);
  } else {
    if (polygon_area2(kern) == 0) throw EmptyKernel("link kernel is degenerate");
    start = polygon_centroid(kern);
  }

  Point delta = start - zp;
  for (int it = 0; it < 220; ++it) {
    Point q = zp + delta;
    delta = delta * Rat(1, 2);
    if (q == zp) break;
    bool ok = true;
    for (int j = 0; j < int(lines.size()) && ok; ++j) {
      int got = side_of_line(lines[j], q);
      ok = (want[j] == 0) ? (got == 0) : (got == want[j]);
    }
    if (!ok || !spokes_ok(poly, q)) continue;
    return q;
  }
  throw DrawError("no valid position found while re-inserting a vertex");
}

void place_in_link(Ctx& c, const Piece& p, VertexId w, VertexId z) {
  VertexId cw = p.orig[w];
  std::vector<Point> poly;
  for (VertexId x : p.g.neighbors_ccw(w)) poly.push_back(c.pos.at(p.orig[x]));
  std::optional<Line> on;
  if (!c.vlines[cw].empty()) on = c.arr->lines[c.vlines[cw].front()];
  c.pos[cw] = insert_in_link(std::move(poly), c.pos.at(p.orig[z]), c.arr->lines, c.vsign[cw], on);
}

// Contract edge e of p, solve the smaller piece via `recurse`, then re-insert
// the removed endpoint. When the dying endpoint already has a position (a
// fixed outer vertex), the kept endpoint inherits it for the recursion and is
// itself re-inserted afterwards.
template <class Recurse>
void reduce_edge(Ctx& c, const Piece& p, EdgeId e, Recurse recurse) {
  auto [u, v] = p.g.edge_ends(e);
  VertexId cu = p.orig[u], cv = p.orig[v];
  VertexId w;
  if (c.pos.count(cv) && !c.pos.count(cu)) {
    c.pos[cu] = c.pos.at(cv);
    w = u;
  } else {
    w = v;
  }
  Piece q{p.g.contract(e), p.orig};
  recurse(q);
  place_in_link(c, p, w, w == u ? v : u);
}

// ---------------------------------------------------------------------------
// One-line recursion (fixed convex outer polygon, single relevant line).
// ---------------------------------------------------------------------------

void solve_one(Ctx& c, const Piece& p, LineIdx li);
void solve_k(Ctx& c, const Piece& p);

// Fills the inside of a separating triangle whose corners are placed: plain
// barycentric when no line crosses the open triangle, one-line recursion when
// exactly one does.
void fill_inner(Ctx& c, const Piece& in) {
  if (!any_unplaced(c, in)) return;
  auto corners = walk_vertices(in.g);
  std::vector<LineIdx> crossing;
  for (LineIdx j = 0; j < int(c.arr->lines.size()); ++j) {
    int pos = 0, neg = 0;
    for (VertexId v : corners) {
      int s = side_of_line(c.arr->lines[j], c.pos.at(in.orig[v]));
      (s > 0 ? pos : s < 0 ? neg : pos) += (s == 0 ? 0 : 1);
    }
    if (pos > 0 && neg > 0) crossing.push_back(j);
  }
  if (crossing.size() >= 2)
    throw DrawError("separating triangle crossed by more than one line");
  if (crossing.empty()) {
    std::map<VertexId, Point> fixed;
    for (VertexId v : corners) fixed[v] = c.pos.at(in.orig[v]);
    auto sol = tutte_solve(in.g, fixed);
    for (auto& [v, pt] : sol) c.pos[in.orig[v]] = pt;
  } else {
    solve_one(c, in, crossing.front());
  }
}

// True when the line still constrains an unplaced part of the piece.
bool line_touches(const Ctx& c, const Piece& p, LineIdx li) {
  for (VertexId v : p.g.vertex_ids())
    if (!v_placed(c, p, v) && c.vsign[p.orig[v]][li] == 0) return true;
  for (EdgeId e : p.g.edge_ids()) {
    auto [u, v] = p.g.edge_ends(e);
    if (c.vsign[p.orig[u]][li] * c.vsign[p.orig[v]][li] == -1 &&
        (!v_placed(c, p, u) || !v_placed(c, p, v)))
      return true;
  }
  return false;
}

void solve_one(Ctx& c, const Piece& p, LineIdx li) {
  if (!any_unplaced(c, p)) return;

  if (!line_touches(c, p, li)) {
    std::map<VertexId, Point> fixed;
    for (VertexId v : p.g.vertex_ids())
      if (v_placed(c, p, v)) fixed[v] = c.pos.at(p.orig[v]);
    auto sol = tutte_solve(p.g, fixed);
    for (auto& [v, pt] : sol) c.pos[p.orig[v]] = pt;
    return;
  }

  auto tris = p.g.separating_triangles();
  if (!tris.empty()) {
    TriSplit s = split_triangle(p, tris.front());
    solve_one(c, s.out, li);
    fill_inner(c, s.in);
    return;
  }

  auto chords = p.g.chords();
  if (!chords.empty()) {
    EdgeId e = *std::min_element(chords.begin(), chords.end());
    auto [x, y] = p.g.edge_ends(e);
    std::vector<VertexId> W = walk_vertices(p.g);
    int n0 = int(W.size());
    int ix = int(std::find(W.begin(), W.end(), x) - W.begin());
    int iy = int(std::find(W.begin(), W.end(), y) - W.begin());
    std::vector<VertexId> arc1, arc2;
    for (int t = ix;; t = (t + 1) % n0) {
      arc1.push_back(W[t]);
      if (t == iy) break;
    }
    for (int t = iy;; t = (t + 1) % n0) {
      arc2.push_back(W[t]);
      if (t == ix) break;
    }

    auto faces = p.g.faces();
    int hmax = 0;
    for (EdgeId ee : p.g.edge_ids()) hmax = std::max(hmax, 2 * ee + 2);
    std::vector<FaceId> face_of(hmax, -1);
    for (const Face& f : faces)
      for (HalfEdge h : f.boundary) face_of[h] = f.id;
    FaceId fo = p.g.outer_face();
    HalfEdge hxy = *p.g.half_edge(x, y);
    std::vector<char> side1(faces.size(), 0);
    std::vector<FaceId> stack = {face_of[hxy]};
    side1[face_of[hxy]] = 1;
    while (!stack.empty()) {
      FaceId f = stack.back();
      stack.pop_back();
      for (HalfEdge h : faces[f].boundary) {
        if (EmbeddedGraph::edge_of(h) == e) continue;
        FaceId g2 = face_of[EmbeddedGraph::twin(h)];
        if (g2 >= 0 && g2 != fo && !side1[g2]) {
          side1[g2] = 1;
          stack.push_back(g2);
        }
      }
    }
    std::set<EdgeId> e1 = {e}, e2 = {e};
    for (EdgeId ee : p.g.edge_ids()) {
      if (ee == e) continue;
      FaceId fa = face_of[2 * ee], fb = face_of[2 * ee + 1];
      bool in1 = (fa != fo && side1[fa]) || (fb != fo && side1[fb]);
      (in1 ? e1 : e2).insert(ee);
    }
    // match each boundary arc to the side that contains its interior vertices
    auto side_has = [&](const std::set<EdgeId>& es, VertexId v) {
      for (HalfEdge h : p.g.out_half_edges(v))
        if (es.count(EmbeddedGraph::edge_of(h))) return true;
      return false;
    };
    VertexId probe = arc1[1];
    HalfEdge hp = *p.g.half_edge(arc1[0], probe);
    bool arc1_in_1 = (face_of[hp] != fo && side1[face_of[hp]]) ||
                     (face_of[EmbeddedGraph::twin(hp)] != fo &&
                      side1[face_of[EmbeddedGraph::twin(hp)]]);
    (void)side_has;
    Piece pa = induce(p, arc1_in_1 ? e1 : e2, arc1);
    Piece pb = induce(p, arc1_in_1 ? e2 : e1, arc2);
    solve_one(c, pa, li);
    solve_one(c, pb, li);
    return;
  }

  auto wheel = p.g.is_k_wheel();
  if (wheel.yes && !v_placed(c, p, wheel.center) &&
      c.vlines[p.orig[wheel.center]] == std::vector<LineIdx>{li}) {
    std::vector<Point> poly;
    for (VertexId v : walk_vertices(p.g)) poly.push_back(c.pos.at(p.orig[v]));
    auto clip = line_convex_clip(c.arr->lines[li], poly);
    if (clip.size() != 2 || clip[0] == clip[1])
      throw DrawError("line does not cross the wheel's interior");
    Point mid = (clip[0] + clip[1]) * Rat(1, 2);
    if (point_in_convex(poly, mid) != Location::Inside)
      throw DrawError("line segment midpoint not interior to the wheel");
    c.pos[p.orig[wheel.center]] = mid;
    return;
  }

  std::set<VertexId> outer(walk_vertices(p.g).begin(), walk_vertices(p.g).end());
  for (EdgeId e : p.g.edge_ids()) {
    auto [u, v] = p.g.edge_ends(e);
    if (outer.count(u) && outer.count(v)) continue;
    if (!contractible(c, p, u, v)) continue;
    reduce_edge(c, p, e, [&](const Piece& q) { solve_one(c, q, li); });
    return;
  }
  throw DrawError("one-line recursion found no reduction");
}

// ---------------------------------------------------------------------------
// k-line recursion and its base case.
// ---------------------------------------------------------------------------

void base_place(Ctx& c, const Piece& p) {
  const auto& lines = c.arr->lines;
  int k = int(lines.size());
  std::map<std::tuple<LineIdx, Rat, Rat>, std::vector<VertexId>> slots;
  std::map<CellId, std::vector<VertexId>> by_cell;

  for (VertexId v : p.g.vertex_ids()) {
    VertexId cv = p.orig[v];
    if (c.pos.count(cv)) continue;
    const auto& vl = c.vlines[cv];
    if (vl.size() >= 2) {
      auto ip = line_intersection(lines[vl[0]], lines[vl[1]]);
      if (!ip) throw DrawError("parallel lines through an intersection vertex");
      for (LineIdx j : vl)
        if (lines[j].eval(*ip) != 0) throw DrawError("vertex lines are not concurrent");
      c.pos[cv] = *ip;
    } else if (vl.size() == 1) {
      LineIdx i = vl[0];
      auto bclip = line_convex_clip(lines[i], c.box.corners());
      if (bclip.size() != 2) throw DrawError("line misses the drawing box");
      Rat lo = lines[i].param_of(bclip[0]);
      Rat hi = lines[i].param_of(bclip[1]);
      if (lo > hi) std::swap(lo, hi);
      Point dir = lines[i].direction();
      for (LineIdx j = 0; j < k; ++j) {
        if (j == i) continue;
        int s = c.vsign[cv][j];
        if (s == 0) throw DrawError("inconsistent per-vertex line data");
        auto ip = line_intersection(lines[i], lines[j]);
        if (!ip) throw DrawError("parallel lines in the arrangement");
        Rat tij = lines[i].param_of(*ip);
        Rat rate = lines[j].a * dir.x + lines[j].b * dir.y;
        if (sign_of(rate) == s)
          lo = std::max(lo, tij);
        else
          hi = std::min(hi, tij);
      }
      if (!(lo < hi)) throw DrawError("empty line segment for an aligned vertex");
      slots[{i, lo, hi}].push_back(cv);
    } else {
      CellId cell = c.geo.cell_by_sign(c.vsign[cv]);
      if (cell < 0) throw DrawError("no arrangement cell matches a free vertex");
      by_cell[cell].push_back(cv);
    }
  }

  for (auto& [key, vs] : slots) {
    auto& [i, lo, hi] = key;
    std::sort(vs.begin(), vs.end());
    int m = int(vs.size());
    for (int r = 0; r < m; ++r)
      c.pos[vs[r]] = lines[i].point_at(lo + (hi - lo) * Rat(r + 1, m + 1));
  }
  for (auto& [cell, vs] : by_cell) {
    std::sort(vs.begin(), vs.end());
    const auto& poly = c.geo.cells[cell].polygon;
    if (poly.size() < 3) throw DrawError("degenerate cell polygon");
    Point ctr = polygon_centroid(poly);
    int m = int(poly.size());
    for (int r = 0; r < int(vs.size()); ++r) {
      if (r == 0) {
        c.pos[vs[r]] = ctr;
      } else {
        c.pos[vs[r]] = ctr + (poly[(r - 1) % m] - ctr) * Rat(1, 2 + (r - 1) / m);
      }
    }
  }
}

void solve_k(Ctx& c, const Piece& p) {
  if (!any_unplaced(c, p)) return;

  auto tris = p.g.separating_triangles();
  if (!tris.empty()) {
    TriSplit s = split_triangle(p, tris.front());
    solve_k(c, s.out);
    fill_inner(c, s.in);
    return;
  }

  std::set<EdgeId> oedges = outer_edge_set(p.g);
  for (EdgeId e : p.g.edge_ids()) {
    if (oedges.count(e)) continue;
    auto [u, v] = p.g.edge_ends(e);
    if (!contractible(c, p, u, v)) continue;
    reduce_edge(c, p, e, [&](const Piece& q) { solve_k(c, q); });
    return;
  }

  base_place(c, p);
}

// ---------------------------------------------------------------------------
// Shared plumbing for the entry points.
// ---------------------------------------------------------------------------

Piece identity_root(const Overlay::Export& ex) {
  Piece root;
  root.g = ex.ag.graph;
  root.orig.resize(ex.vertex_of.size());
  for (int i = 0; i < int(root.orig.size()); ++i) root.orig[i] = i;
  return root;
}

AlignedDrawing extract_drawing(const AlignedGraph& ag, const Overlay::Export& ex, const Ctx& c,
                               const LineArrangement& a, const CellBijection& cb) {
  AlignedDrawing d;
  d.arr = a;
  d.phi = cb;
  int mx = -1;
  for (VertexId v : ag.graph.vertex_ids()) mx = std::max(mx, v);
  d.pos.assign(mx + 1, Point(Rat(0), Rat(0)));
  for (VertexId v : ag.graph.vertex_ids()) d.pos[v] = c.pos.at(ex.vertex_to.at(v));
  return d;
}

void require_valid(const AlignedGraph& ag, const AlignedDrawing& d, const char* what) {
  auto rep = check_aligned_drawing(ag, d);
  if (!rep.pass()) throw DrawError(std::string(what) + " failed validation:\n" + rep.str());
}

BBox k1_box(const Line& l) {
  Point o = l.origin();
  return BBox{o.x - 32, o.y - 32, o.x + 32, o.y + 32};
}

// Wraps a single-line overlay in a rectangle cycle crossing the line once on
// each side of all graph content.
struct K1Ring {
  VertexId xa, xb, yb, ya;  // xa/xb left of the traversal, ya/yb right
};

K1Ring add_k1_ring(Overlay& ov) {
  K1Ring r;
  r.xa = ov.add_isolated_vertex(ov.line_chain(0).front());
  r.xb = ov.add_isolated_vertex(ov.line_chain(0).back());
  r.ya = ov.add_isolated_vertex(Overlay::twin(ov.line_chain(0).front()));
  r.yb = ov.add_isolated_vertex(Overlay::twin(ov.line_chain(0).back()));
  auto corner = [&](VertexId v) { return ov.out_darts(ov.node_of_vertex(v)).front(); };
  ov.add_edge(r.xa, -1, {}, r.xb, -1);
  ov.add_edge(r.xb, corner(r.xb), {{Overlay::arc_of(ov.line_chain(0).back())}}, r.yb, -1);
  ov.add_edge(r.yb, corner(r.yb), {}, r.ya, -1);
  ov.add_edge(r.ya, corner(r.ya), {{Overlay::arc_of(ov.line_chain(0).front())}}, r.xa,
              corner(r.xa));
  return r;
}

// Rectangle corner positions for the ring; s maps the overlay's left side of
// the line onto the geometric sign s.
void fix_k1_ring(Ctx& c, const Overlay::Export& ex, const K1Ring& r, const Line& l, int s) {
  auto clip = line_convex_clip(l, c.box.corners());
  if (clip.size() != 2) throw DrawError("line misses the drawing box");
  Rat b1 = l.param_of(clip[0]), b2 = l.param_of(clip[1]);
  if (b1 > b2) std::swap(b1, b2);
  Point nrm(l.a * Rat(s), l.b * Rat(s));
  c.pos[ex.vertex_to.at(r.xa)] = l.point_at(b1) + nrm;
  c.pos[ex.vertex_to.at(r.xb)] = l.point_at(b2) + nrm;
  c.pos[ex.vertex_to.at(r.yb)] = l.point_at(b2) - nrm;
  c.pos[ex.vertex_to.at(r.ya)] = l.point_at(b1) - nrm;
}

AlignedDrawing draw_k1_attempt(const AlignedGraph& ag, const LineArrangement& a,
                               const CellBijection& cb, int s) {
  Overlay ov = Overlay::from_traces(ag);
  K1Ring ring = add_k1_ring(ov);
  biconnect(ov);
  triangulate(ov);
  auto ex = ov.export_aligned();

  Ctx c;
  c.arr = &a;
  c.box = k1_box(a.lines[0]);
  build_vertex_data(c, ov, ex, {s});
  fix_k1_ring(c, ex, ring, a.lines[0], s);
  Piece root = identity_root(ex);
  solve_one(c, root, 0);

  AlignedDrawing d = extract_drawing(ag, ex, c, a, cb);
  require_valid(ag, d, "single-line drawing");
  return d;
}

// The overlay's combinatorial orientation of a single line cannot be read off
// locally, so try both and keep whichever validates.
AlignedDrawing draw_k1(const AlignedGraph& ag, const LineArrangement& a,
                       const CellBijection& cb) {
  std::string first;
  for (int s : {1, -1}) {
    try {
      return draw_k1_attempt(ag, a, cb, s);
    } catch (const DrawError& e) {
      if (first.empty()) first = e.what();
    }
  }
  throw DrawError("single-line drawing failed for both orientations; first attempt said:\n" +
                  first);
}

AlignedDrawing draw_k_main(const AlignedGraph& ag, const LineArrangement& a,
                           const CellBijection& cb) {
  Overlay ov = Overlay::from_traces(ag);
  properize(ov);
  auto ex = ov.export_aligned();

  Ctx c;
  c.arr = &a;
  c.box = expand(a.default_bbox(), Rat(2));
  c.geo = build_cells_geometric(a, c.box);
  build_vertex_data(c, ov, ex, calibrate_sigma(ov, a, cb));
  Piece root = identity_root(ex);
  solve_k(c, root);

  AlignedDrawing d = extract_drawing(ag, ex, c, a, cb);
  require_valid(ag, d, "k-line drawing");
  return d;
}

void require_same_bijection(const PseudolineSystem& p, const LineArrangement& a,
                            const CellBijection& phi) {
  CellBijection canon = match_cells(p, a);
  if (phi.phi != canon.phi || phi.line_flip != canon.line_flip ||
      phi.side_flip != canon.side_flip)
    throw NotHomeomorphic("provided cell bijection differs from the canonical match");
}

// ---------------------------------------------------------------------------
// Crossing-free instances: scaffold (intersection vertices, boundary cycle),
// fixed trace-ordered placement along every line, one exact barycentric solve.
// ---------------------------------------------------------------------------

// Frame-order ring through all unbounded cells via one vertex per line end.
void add_unbounded_ring(Overlay& ov) {
  int k = ov.n_lines();
  std::map<NodeId, VertexId> end_of;  // frame exit node -> end vertex
  for (LineIdx i = 0; i < k; ++i) {
    auto ch = ov.line_chain(i);
    NodeId f_start = ov.origin(ch.front());
    NodeId f_end = ov.target(ch.back());
    end_of[f_start] = ov.add_vertex_on_line(Overlay::arc_of(ov.line_chain(i).front()));
    (void)f_end;
    ch = ov.line_chain(i);
    end_of[ov.target(ch.back())] = ov.add_vertex_on_line(Overlay::arc_of(ch.back()));
  }
  // walk the frame to get the cyclic order of line exits
  ArcId a0 = -1;
  for (ArcId x : ov.arc_ids())
    if (ov.arc(x).kind == Overlay::ArcKind::FramePiece) {
      a0 = x;
      break;
    }
  if (a0 < 0) throw DrawError("overlay has no frame");
  std::vector<VertexId> order;
  Dart d = 2 * a0;
  Dart start = d;
  int guard = 8 * int(ov.arc_ids().size()) + 16;
  do {
    if (--guard < 0) throw DrawError("frame walk did not close");
    NodeId t = ov.target(d);
    if (!ov.node(t).lines.empty()) order.push_back(end_of.at(t));
    Dart nd = -1;
    for (Dart x : ov.out_darts(t))
      if (x != Overlay::twin(d) && ov.arc(Overlay::arc_of(x)).kind == Overlay::ArcKind::FramePiece)
        nd = x;
    if (nd < 0) throw DrawError("frame walk is broken");
    d = nd;
  } while (d != start);
  if (int(order.size()) != 2 * k) throw DrawError("unexpected number of line ends on the frame");

  for (int j = 0; j < int(order.size()); ++j) {
    VertexId u = order[j], v = order[(j + 1) % order.size()];
    Dart du = -1, dv = -1;
    for (Dart x : ov.out_darts(ov.node_of_vertex(u))) {
      for (Dart y : ov.out_darts(ov.node_of_vertex(v)))
        if (ov.corner_region(x) == ov.corner_region(y)) {
          du = x;
          dv = y;
          break;
        }
      if (du >= 0) break;
    }
    if (du < 0) throw DrawError("consecutive line ends share no region");
    ov.add_edge(u, du, {}, v, dv);
  }
}

// Places every on-line vertex: intersections exactly, the rest spread in
// trace order between them. Writes into `fixed`, keyed by exported ids.
void fix_on_line_vertices(const Overlay& ov, const Overlay::Export& ex, const LineArrangement& a,
                          const CellBijection& cb, const BBox& box,
                          std::map<VertexId, Point>& fixed) {
  int k = ov.n_lines();
  for (LineIdx i = 0; i < k; ++i) {
    auto chain = ov.line_chain(i);
    std::vector<NodeId> nds = {ov.origin(chain.front())};
    for (Dart d : chain) nds.push_back(ov.target(d));
    std::vector<VertexId> seq;
    for (NodeId nd : nds)
      if (ov.node(nd).kind == Overlay::NodeKind::Vertex) seq.push_back(ov.node(nd).vertex);
    if (cb.line_flip[i] == -1) std::reverse(seq.begin(), seq.end());

    auto bclip = line_convex_clip(a.lines[i], box.corners());
    if (bclip.size() != 2) throw DrawError("line misses the drawing box");
    Rat b1 = a.lines[i].param_of(bclip[0]), b2 = a.lines[i].param_of(bclip[1]);
    if (b1 > b2) std::swap(b1, b2);

    int m = int(seq.size());
    std::vector<std::optional<Rat>> t(m);
    for (int r = 0; r < m; ++r) {
      auto vl = ov.vertex_lines(seq[r]);
      if (vl.size() < 2) continue;
      auto ip = line_intersection(a.lines[vl[0]], a.lines[vl[1]]);
      if (!ip || a.lines[i].eval(*ip) != 0)
        throw DrawError("vertex lines are not concurrent");
      t[r] = a.lines[i].param_of(*ip);
    }
    // interpolate flexible runs between consecutive anchors
    Rat prev = b1;
    int r = 0;
    while (r < m) {
      if (t[r]) {
        if (!(*t[r] > prev)) throw DrawError("on-line vertices out of order");
        prev = *t[r];
        ++r;
        continue;
      }
      int r2 = r;
      while (r2 < m && !t[r2]) ++r2;
      Rat next = (r2 < m) ? *t[r2] : b2;
      if (!(next > prev)) throw DrawError("on-line vertices out of order");
      int run = r2 - r;
      for (int q = 0; q < run; ++q)
        t[r + q] = prev + (next - prev) * Rat(q + 1, run + 1);
      prev = t[r2 - 1].value();
      r = r2;
    }
    for (int q = 0; q < m; ++q) {
      Point pt = a.lines[i].point_at(*t[q]);
      VertexId evd = ex.vertex_to.at(seq[q]);
      auto it = fixed.find(evd);
      if (it != fixed.end()) {
        if (it->second != pt) throw DrawError("conflicting positions for an on-line vertex");
      } else {
        fixed[evd] = pt;
      }
    }
  }
}

AlignedDrawing draw_000_attempt(const AlignedGraph& ag, const LineArrangement& a,
                                const CellBijection& cb, int s1) {
  Overlay ov = Overlay::from_traces(ag);
  int k = ov.n_lines();

  for (NodeId n : ov.node_ids())
    if (ov.node(n).kind == Overlay::NodeKind::LineCross) ov.promote_line_cross(n);

  // split edges anchored at both ends on different lines; their midpoints are
  // later fixed on the straight chord, so the original edge stays straight
  std::map<VertexId, std::pair<VertexId, VertexId>> chord_mid;
  for (EdgeId e : ov.graph_edge_ids()) {
    LineIdx own = ov.edge_on_line(e);
    auto [u, v] = ov.edge_ends(e);
    auto su = ov.vertex_lines(u), sv = ov.vertex_lines(v);
    if (own >= 0) {
      std::erase(su, own);
      std::erase(sv, own);
    }
    if (su.empty() || sv.empty()) continue;
    if (su.size() == 1 && su == sv) continue;
    VertexId m = ov.split_edge(e, 0);
    if (own < 0) chord_mid[m] = {u, v};
  }

  std::optional<K1Ring> ring;
  if (k == 1)
    ring = add_k1_ring(ov);
  else
    add_unbounded_ring(ov);
  biconnect(ov);
  triangulate(ov);
  auto ex = ov.export_aligned();

  Ctx c;
  c.arr = &a;
  c.box = (k >= 2) ? expand(a.default_bbox(), Rat(2)) : k1_box(a.lines[0]);
  c.geo = build_cells_geometric(a, c.box);
  std::vector<int> sigma = (k >= 2) ? calibrate_sigma(ov, a, cb) : std::vector<int>{s1};
  build_vertex_data(c, ov, ex, sigma);

  std::map<VertexId, Point> fixed;
  fix_on_line_vertices(ov, ex, a, cb, c.box, fixed);
  if (ring) {
    fix_k1_ring(c, ex, *ring, a.lines[0], s1);
    for (VertexId rv : {ring->xa, ring->xb, ring->yb, ring->ya})
      fixed[ex.vertex_to.at(rv)] = c.pos.at(ex.vertex_to.at(rv));
  }
  for (auto& [m, uv] : chord_mid)
    fixed[ex.vertex_to.at(m)] =
        (fixed.at(ex.vertex_to.at(uv.first)) + fixed.at(ex.vertex_to.at(uv.second))) *
        Rat(1, 2);

  std::map<CellId, int> spread;  // per-cell pin counter for the repair rounds
  for (int round = 0;; ++round) {
    auto sol = tutte_solve(ex.ag.graph, fixed);
    c.pos.clear();
    for (auto& [v, pt] : sol) c.pos[v] = pt;
    AlignedDrawing d = extract_drawing(ag, ex, c, a, cb);
    auto rep = check_aligned_drawing(ag, d);
    if (rep.pass()) return d;
    if (round >= 3) throw DrawError("crossing-free drawing failed validation:\n" + rep.str());
    // pin free vertices that drifted out of their cell and solve again
    bool pinned = false;
    for (VertexId v : ag.graph.vertex_ids()) {
      VertexId evd = ex.vertex_to.at(v);
      if (!c.vlines[evd].empty() || fixed.count(evd)) continue;
      bool bad = false;
      for (LineIdx j = 0; j < k && !bad; ++j)
        bad = side_of_line(a.lines[j], c.pos.at(evd)) != c.vsign[evd][j];
      if (!bad) continue;
      CellId cell = c.geo.cell_by_sign(c.vsign[evd]);
      if (cell < 0) throw DrawError("no arrangement cell matches a free vertex");
      const auto& poly = c.geo.cells[cell].polygon;
      Point ctr = polygon_centroid(poly);
      int r = spread[cell]++;
      fixed[evd] =
          r == 0 ? ctr
                 : ctr + (poly[(r - 1) % int(poly.size())] - ctr) *
                             Rat(1, 2 + (r - 1) / int(poly.size()));
      pinned = true;
    }
    if (!pinned) throw DrawError("crossing-free drawing failed validation:\n" + rep.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations.
// ---------------------------------------------------------------------------

std::map<VertexId, Point> tutte_solve(const EmbeddedGraph& g,
                                      const std::map<VertexId, Point>& fixed) {
  std::map<VertexId, Point> out;
  std::vector<VertexId> un;
  for (VertexId v : g.vertex_ids()) {
    auto it = fixed.find(v);
    if (it != fixed.end())
      out[v] = it->second;
    else
      un.push_back(v);
  }
  if (un.empty()) return out;

  // split the unknowns into connected blocks; each solves independently
  std::map<VertexId, int> idx;
  for (int i = 0; i < int(un.size()); ++i) idx[un[i]] = i;
  std::vector<int> comp(un.size(), -1);
  int ncomp = 0;
  for (int i = 0; i < int(un.size()); ++i) {
    if (comp[i] >= 0) continue;
    comp[i] = ncomp;
    std::vector<int> stack = {i};
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (VertexId w : g.neighbors_ccw(un[x])) {
        auto it = idx.find(w);
        if (it != idx.end() && comp[it->second] < 0) {
          comp[it->second] = ncomp;
          stack.push_back(it->second);
        }
      }
    }
    ++ncomp;
  }

  for (int cc = 0; cc < ncomp; ++cc) {
    std::vector<VertexId> vs;
    for (int i = 0; i < int(un.size()); ++i)
      if (comp[i] == cc) vs.push_back(un[i]);
    int n = int(vs.size());
    std::map<VertexId, int> col;
    for (int i = 0; i < n; ++i) col[vs[i]] = i;

    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n + 2, Rat(0)));
    for (int i = 0; i < n; ++i) {
      for (VertexId w : g.neighbors_ccw(vs[i])) {
        m[i][i] += 1;
        auto fx = out.find(w);
        if (fx != out.end()) {
          m[i][n] += fx->second.x;
          m[i][n + 1] += fx->second.y;
        } else {
          m[i][col.at(w)] -= 1;
        }
      }
      if (m[i][i] == 0) throw SingularSystem("barycentric system has an isolated vertex");
    }
    for (int piv = 0; piv < n; ++piv) {
      int r = piv;
      while (r < n && m[r][piv] == 0) ++r;
      if (r == n) throw SingularSystem("barycentric system is singular");
      std::swap(m[piv], m[r]);
      for (int r2 = 0; r2 < n; ++r2) {
        if (r2 == piv || m[r2][piv] == 0) continue;
        Rat f = m[r2][piv] / m[piv][piv];
        for (int j2 = piv; j2 < n + 2; ++j2) m[r2][j2] -= f * m[piv][j2];
      }
    }
    for (int i = 0; i < n; ++i)
      out[vs[i]] = Point(m[i][n] / m[i][i], m[i][n + 1] / m[i][i]);
  }
  return out;
}

ReducibleEdge find_reducible_edge(const AlignedGraph& ag) {
  ReducibleEdge r;
  auto tris = ag.graph.separating_triangles();
  if (!tris.empty()) {
    r.kind = ReducibleEdge::Kind::SepTriangle;
    r.tri = tris.front();
    return r;
  }
  if (ag.system.k == 1) {
    auto ch = ag.graph.chords();
    if (!ch.empty()) {
      r.kind = ReducibleEdge::Kind::Chord;
      r.edge = *std::min_element(ch.begin(), ch.end());
      return r;
    }
  }
  std::set<VertexId> outer;
  for (VertexId v : walk_vertices(ag.graph)) outer.insert(v);
  std::set<EdgeId> oedges = outer_edge_set(ag.graph);
  for (EdgeId e : ag.graph.edge_ids()) {
    if (oedges.count(e)) continue;
    auto [u, v] = ag.graph.edge_ends(e);
    if (outer.count(u) && outer.count(v)) continue;
    const EdgeClass& ec = ag.cls.edge_class[e];
    if (ec.is_free()) {
      r.kind = ReducibleEdge::Kind::FreeEdge;
      r.edge = e;
      return r;
    }
    if (ec.aligned() && ec.anchors == 0 && ec.crossings.empty()) {
      r.kind = ReducibleEdge::Kind::AlignedEdge;
      r.edge = e;
      return r;
    }
  }
  return r;
}

AlignedDrawing uncontract(const AlignedGraph& ag, EdgeId e, const AlignedDrawing& contracted) {
  auto [u, v] = ag.graph.edge_ends(e);
  AlignedDrawing d = contracted;
  if (int(d.pos.size()) <= std::max(u, v)) d.pos.resize(std::max(u, v) + 1, Point(Rat(0), Rat(0)));

  std::vector<Point> poly;
  for (VertexId x : ag.graph.neighbors_ccw(v)) poly.push_back(d.pos.at(x == v ? u : x));
  const auto& lines = contracted.arr.lines;
  // the removed endpoint must keep the surviving endpoint's sides
  std::vector<int> want(lines.size(), 0);
  for (int j = 0; j < int(lines.size()); ++j) want[j] = side_of_line(lines[j], d.pos.at(u));
  const EdgeClass& ec = ag.cls.edge_class[e];
  std::optional<Line> on;
  if (ec.aligned()) on = lines[ec.aligned_line];
  d.pos[v] = insert_in_link(std::move(poly), d.pos.at(u), lines, want, on);
  return d;
}

AlignedDrawing draw_one_line(const AlignedGraph& ag, const ConvexOuterFace& outer,
                             const Line& r) {
  if (ag.system.k != 1) throw NotOneAligned("instance does not have exactly one pseudoline");
  auto pc = is_proper(ag);
  if (!pc.yes) {
    std::string msg = "instance is not a proper aligned triangulation";
    for (const auto& s : pc.reasons) msg += "\n  " + s;
    throw NotProper(msg);
  }
  if (outer.cycle.size() != outer.pos.size())
    throw DrawError("outer cycle and positions differ in length");

  std::vector<VertexId> W = walk_vertices(ag.graph);
  int n0 = int(W.size());
  if (int(outer.cycle.size()) != n0) throw DrawError("outer cycle has the wrong length");
  std::map<VertexId, Point> opos;
  bool matched = false;
  for (int rev = 0; rev < 2 && !matched; ++rev) {
    std::vector<VertexId> cyc = outer.cycle;
    std::vector<Point> cpos = outer.pos;
    if (rev) {
      std::reverse(cyc.begin(), cyc.end());
      std::reverse(cpos.begin(), cpos.end());
    }
    for (int off = 0; off < n0 && !matched; ++off) {
      bool ok = true;
      for (int i = 0; i < n0 && ok; ++i) ok = cyc[(off + i) % n0] == W[i];
      if (!ok) continue;
      matched = true;
      for (int i = 0; i < n0; ++i) opos[W[i]] = cpos[(off + i) % n0];
    }
  }
  if (!matched) throw DrawError("outer cycle does not match the graph's outer face");

  std::vector<Point> pw;
  for (VertexId v : W) pw.push_back(opos.at(v));
  if (!(polygon_area2(pw) < 0))
    throw DrawError("outer polygon orientation contradicts the embedding");
  for (int i = 0; i < n0; ++i)
    if (orient(pw[(i + n0 - 1) % n0], pw[i], pw[(i + 1) % n0]) != -1)
      throw DrawError("outer polygon is not strictly convex");

  LineArrangement a;
  a.lines = {r};
  CellBijection cb = match_cells(ag.system, a);

  Overlay ov = Overlay::from_traces(ag);
  auto ex = ov.export_aligned();
  Ctx c;
  c.arr = &a;
  c.box = k1_box(r);
  build_vertex_data(c, ov, ex, {1});

  // orient the line's sides from the free outer vertices
  int s = 0;
  for (VertexId v : W) {
    VertexId evd = ex.vertex_to.at(v);
    int geo = side_of_line(r, opos.at(v));
    if (c.vlines[evd].empty()) {
      if (geo == 0) throw DrawError("free outer vertex placed on the line");
      int cand = geo * c.vsign[evd][0];
      if (s == 0)
        s = cand;
      else if (s != cand)
        throw DrawError("outer polygon sides disagree with the instance");
    } else if (geo != 0) {
      throw DrawError("aligned outer vertex is not on the line");
    }
  }
  if (s == 0) throw DrawError("no free outer vertex to orient the line");
  if (s == -1)
    for (auto& row : c.vsign)
      for (int& x : row) x = -x;

  for (VertexId v : W) c.pos[ex.vertex_to.at(v)] = opos.at(v);
  Piece root = identity_root(ex);
  solve_one(c, root, 0);

  AlignedDrawing d = extract_drawing(ag, ex, c, a, cb);
  require_valid(ag, d, "fixed-outer-face drawing");
  return d;
}

AlignedDrawing draw_k_aligned(const AlignedGraph& ag, const LineArrangement& a) {
  if (a.lines.empty()) throw DrawError("empty arrangement");
  a.validate();
  auto cx = alignment_complexity(ag);
  if (!cx.leq({1, 0, kNoEdges}))
    throw ComplexityViolation("alignment complexity " + cx.str() + " exceeds (1,0,-)");
  CellBijection cb = match_cells(ag.system, a);
  if (int(a.lines.size()) == 1) return draw_k1(ag, a, cb);
  return draw_k_main(ag, a, cb);
}

AlignedDrawing draw_k_aligned(const AlignedGraph& ag, const LineArrangement& a,
                              const CellBijection& phi) {
  require_same_bijection(ag.system, a, phi);
  return draw_k_aligned(ag, a);
}

AlignedDrawing draw_complexity_000(const AlignedGraph& ag, const LineArrangement& a) {
  if (a.lines.empty()) throw DrawError("empty arrangement");
  a.validate();
  auto cx = alignment_complexity(ag);
  if (!cx.leq({0, 0, 0}))
    throw ComplexityViolation("alignment complexity " + cx.str() + " exceeds (0,0,0)");
  // a straight edge between two vertices of one line lies on that line
  for (EdgeId e : ag.graph.edge_ids()) {
    const EdgeClass& ec = ag.cls.edge_class[e];
    if (ec.aligned()) continue;
    auto [u, v] = ag.graph.edge_ends(e);
    for (LineIdx j : ag.cls.vertex_lines[u])
      for (LineIdx l : ag.cls.vertex_lines[v])
        if (j == l)
          throw DrawError("edge would be forced onto a line it does not lie on");
  }
  CellBijection cb = match_cells(ag.system, a);
  if (int(a.lines.size()) >= 2) return draw_000_attempt(ag, a, cb, 1);
  std::string first;
  for (int s : {1, -1}) {
    try {
      return draw_000_attempt(ag, a, cb, s);
    } catch (const DrawError& e) {
      if (first.empty()) first = e.what();
    }
  }
  throw DrawError("crossing-free drawing failed for both orientations; first attempt said:\n" +
                  first);
}

AlignedDrawing draw_complexity_000(const AlignedGraph& ag, const LineArrangement& a,
                                   const CellBijection& phi) {
  require_same_bijection(ag.system, a, phi);
  return draw_complexity_000(ag, a);
}

AlignedDrawing draw_two_aligned_one_bend(const AlignedGraph& ag, const LineArrangement& a) {
  if (ag.system.k != 2) throw KNotTwo("one-bend construction needs exactly two lines");
  a.validate();
  CellBijection cb = match_cells(ag.system, a);

  Overlay ov = Overlay::from_traces(ag);
  std::map<EdgeId, VertexId> bend_mid;  // input edge -> overlay mid vertex
  for (EdgeId e : ov.graph_edge_ids()) {
    if (ov.edge_on_line(e) >= 0) continue;  // aligned edges subdivide rigidly later
    auto [u, v] = ov.edge_ends(e);
    bool ua = !ov.vertex_lines(u).empty(), va = !ov.vertex_lines(v).empty();
    int anchors = int(ua) + int(va);
    int crossings = int(ov.edge_crossings(e).size());
    if (anchors + crossings <= 1) continue;
    if (anchors + crossings > 2)
      throw DrawError("edge needs more than one bend (ends plus crossings exceed two)");
    int piece;
    if (crossings == 2)
      piece = 1;  // between the two crossings
    else if (anchors == 2)
      piece = 0;
    else
      piece = ua ? 0 : int(ov.edge_chain(e).size()) - 1;  // beside the anchored end
    bend_mid[e] = ov.split_edge(e, piece);
  }

  auto ex = ov.export_aligned();
  auto cx2 = alignment_complexity(ex.ag);
  if (!cx2.leq({1, 0, kNoEdges}))
    throw ComplexityViolation("subdivided complexity " + cx2.str() + " still exceeds (1,0,-)");
  AlignedDrawing sub = draw_k_aligned(ex.ag, a);

  AlignedDrawing d;
  d.arr = a;
  d.phi = cb;
  int mx = -1;
  for (VertexId v : ag.graph.vertex_ids()) mx = std::max(mx, v);
  d.pos.assign(mx + 1, Point(Rat(0), Rat(0)));
  for (VertexId v : ag.graph.vertex_ids()) d.pos[v] = sub.pos[ex.vertex_to.at(v)];
  for (auto& [e, m] : bend_mid) d.bend[e] = sub.pos[ex.vertex_to.at(m)];
  require_valid(ag, d, "one-bend drawing");
  return d;
}

}  // namespace aligned

#include "aligned/arrangement.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace aligned {

void PseudolineSystem::validate() const {
  if (int(crossing_order.size()) != k)
    throw InconsistentCrossingOrders("crossing_order size != k");
  for (LineIdx i = 0; i < k; ++i) {
    std::set<LineIdx> seen;
    for (const Group& g : crossing_order[i]) {
      if (g.empty()) throw InconsistentCrossingOrders("empty crossing group");
      if (!std::is_sorted(g.begin(), g.end()))
        throw InconsistentCrossingOrders("crossing group not sorted");
      for (LineIdx j : g) {
        if (j < 0 || j >= k || j == i)
          throw InconsistentCrossingOrders("crossing group references bad line");
        if (!seen.insert(j).second)
          throw InconsistentCrossingOrders("pseudoline pair crosses twice");
      }
    }
    if (int(seen.size()) != k - 1)
      throw InconsistentCrossingOrders("pseudoline pair never crosses");
  }
  // Tie symmetry: if i meets {j, m} at one point, j meets {i, m} at one point.
  for (LineIdx i = 0; i < k; ++i)
    for (const Group& g : crossing_order[i]) {
      std::set<LineIdx> point(g.begin(), g.end());
      point.insert(i);
      for (LineIdx j : g) {
        bool found = false;
        for (const Group& h : crossing_order[j]) {
          std::set<LineIdx> other(h.begin(), h.end());
          other.insert(j);
          if (other == point) found = true;
        }
        if (!found) throw InconsistentCrossingOrders("asymmetric crossing ties");
      }
    }
}

namespace {

// Greedy simulation of the wiring for a fixed initial permutation. Enabled
// events never share a wire, hence commute, so greedy choice is complete.
bool simulate(const PseudolineSystem& p, const std::vector<LineIdx>& init, WiringDiagram* out) {
  int k = p.k;
  std::vector<int> row_of(k);
  std::vector<LineIdx> wire_at = init;
  for (int r = 0; r < k; ++r) row_of[wire_at[r]] = r;
  std::vector<size_t> progress(k, 0);
  std::vector<WiringDiagram::Event> events;

  int total = 0;
  for (LineIdx i = 0; i < k; ++i) total += int(p.crossing_order[i].size());

  int done = 0;
  while (done < total) {
    bool fired = false;
    for (LineIdx i = 0; i < k && !fired; ++i) {
      if (progress[i] >= p.crossing_order[i].size()) continue;
      std::vector<LineIdx> s = p.crossing_order[i][progress[i]];
      s.push_back(i);
      std::sort(s.begin(), s.end());
      if (s.front() != i) continue;  // handled when iterating the minimum
      bool ok = true;
      int lo = k, hi = -1;
      for (LineIdx j : s) {
        if (progress[j] >= p.crossing_order[j].size()) {
          ok = false;
          break;
        }
        std::vector<LineIdx> sj = p.crossing_order[j][progress[j]];
        sj.push_back(j);
        std::sort(sj.begin(), sj.end());
        if (sj != s) {
          ok = false;
          break;
        }
        lo = std::min(lo, row_of[j]);
        hi = std::max(hi, row_of[j]);
      }
      if (!ok || hi - lo + 1 != int(s.size())) continue;
      std::reverse(wire_at.begin() + lo, wire_at.begin() + hi + 1);
      for (int r = lo; r <= hi; ++r) row_of[wire_at[r]] = r;
      for (LineIdx j : s) {
        ++progress[j];
        ++done;
      }
      events.push_back({s, lo});
      fired = true;
    }
    if (!fired) return false;
  }
  if (out) {
    out->initial_perm = init;
    out->events = std::move(events);
    out->final_perm = wire_at;
  }
  return true;
}

}  // namespace

WiringDiagram reconstruct_wiring(const PseudolineSystem& p) {
  p.validate();
  std::vector<LineIdx> perm(p.k);
  std::iota(perm.begin(), perm.end(), 0);
  WiringDiagram w;
  do {
    // The top-bottom mirror of a valid wiring is valid for the same crossing
    // orders, so only half the permutations need trying.
    if (p.k >= 2 && perm.front() > perm.back()) continue;
    if (simulate(p, perm, &w)) return w;
  } while (std::next_permutation(perm.begin(), perm.end()));
  throw InconsistentCrossingOrders("crossing orders admit no wiring diagram");
}

CellId CellComplex::cell_by_sign(const std::vector<int>& sign) const {
  for (const Cell& c : cells)
    if (c.sign == sign) return c.id;
  return -1;
}

SegId CellComplex::segment_id(LineIdx line, int index) const {
  for (SegId s = 0; s < SegId(segments.size()); ++s)
    if (segments[s].line == line && segments[s].index == index) return s;
  return -1;
}

std::vector<std::pair<CellId, CellId>> CellComplex::adjacency() const {
  std::set<std::pair<CellId, CellId>> seen;
  for (const Segment& s : segments) {
    CellId a = std::min(s.pos_cell, s.neg_cell), b = std::max(s.pos_cell, s.neg_cell);
    seen.insert({a, b});
  }
  return {seen.begin(), seen.end()};
}

int CellComplex::n_unbounded() const {
  int n = 0;
  for (const Cell& c : cells) n += c.unbounded;
  return n;
}

CellComplex build_cells(const PseudolineSystem& p) {
  WiringDiagram w = reconstruct_wiring(p);
  int k = p.k;
  CellComplex cx;
  std::vector<LineIdx> wire_at = w.initial_perm;
  std::vector<int> row_of(k);
  for (int r = 0; r < k; ++r) row_of[wire_at[r]] = r;

  auto new_cell = [&](int gap) {
    // sign[l] = +1 iff the region at this gap lies above wire l now.
    CellComplex::Cell c;
    c.id = CellId(cx.cells.size());
    c.sign.assign(k, 0);
    for (LineIdx l = 0; l < k; ++l) c.sign[l] = row_of[l] >= gap ? 1 : -1;
    cx.cells.push_back(c);
    return c.id;
  };

  std::vector<CellId> region(k + 1);
  for (int gap = 0; gap <= k; ++gap) {
    region[gap] = new_cell(gap);
    cx.cells[region[gap]].unbounded = true;
  }
  std::vector<int> seg_index(k, 0);
  auto open_segment = [&](LineIdx l) {
    CellComplex::Segment s;
    s.line = l;
    s.index = seg_index[l];
    s.pos_cell = region[row_of[l]];
    s.neg_cell = region[row_of[l] + 1];
    cx.segments.push_back(s);
  };
  for (LineIdx l = 0; l < k; ++l) open_segment(l);

  for (const auto& ev : w.events) {
    int g = int(ev.lines.size());
    int lo = ev.top_row, hi = lo + g - 1;
    std::reverse(wire_at.begin() + lo, wire_at.begin() + hi + 1);
    for (int r = lo; r <= hi; ++r) row_of[wire_at[r]] = r;
    for (int gap = lo + 1; gap <= hi; ++gap) region[gap] = new_cell(gap);
    for (LineIdx l : ev.lines) {
      ++seg_index[l];
      open_segment(l);
    }
  }
  for (int gap = 0; gap <= k; ++gap) cx.cells[region[gap]].unbounded = true;
  for (SegId s = 0; s < SegId(cx.segments.size()); ++s) {
    cx.cells[cx.segments[s].pos_cell].boundary.push_back(s);
    cx.cells[cx.segments[s].neg_cell].boundary.push_back(s);
  }
  return cx;
}

void LineArrangement::validate() const {
  for (size_t i = 0; i < lines.size(); ++i)
    for (size_t j = i + 1; j < lines.size(); ++j) {
      if (lines[i] == lines[j]) throw BadLineArrangement("duplicate lines");
      auto x = line_intersection(lines[i], lines[j]);
      if (!x) throw BadLineArrangement("parallel lines do not cross");
    }
}

std::vector<Point> LineArrangement::intersections() const {
  std::vector<Point> pts;
  for (size_t i = 0; i < lines.size(); ++i)
    for (size_t j = i + 1; j < lines.size(); ++j) {
      auto x = line_intersection(lines[i], lines[j]);
      if (x) pts.push_back(*x);
    }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<std::vector<Group>> LineArrangement::crossing_orders() const {
  int k = int(lines.size());
  std::vector<std::vector<Group>> out(k);
  for (LineIdx i = 0; i < k; ++i) {
    std::vector<std::pair<Rat, LineIdx>> hits;
    for (LineIdx j = 0; j < k; ++j) {
      if (j == i) continue;
      auto x = line_intersection(lines[i], lines[j]);
      if (!x) throw BadLineArrangement("parallel lines do not cross");
      hits.push_back({lines[i].param_of(*x), j});
    }
    std::sort(hits.begin(), hits.end());
    for (size_t a = 0; a < hits.size();) {
      size_t b = a;
      Group g;
      while (b < hits.size() && hits[b].first == hits[a].first) g.push_back(hits[b++].second);
      std::sort(g.begin(), g.end());
      out[i].push_back(std::move(g));
      a = b;
    }
  }
  return out;
}

BBox LineArrangement::default_bbox() const {
  auto pts = intersections();
  if (pts.empty()) {
    Point o = lines.empty() ? Point(Rat(0), Rat(0)) : lines[0].origin();
    return BBox{o.x - 2, o.y - 2, o.x + 2, o.y + 2};
  }
  BBox b = bbox_of(pts);
  Rat cx = (b.xmin + b.xmax) / 2, cy = (b.ymin + b.ymax) / 2;
  Rat hx = b.xmax - b.xmin, hy = b.ymax - b.ymin;
  if (hx == 0) hx = 1;
  if (hy == 0) hy = 1;
  return BBox{cx - hx, cy - hy, cx + hx, cy + hy};
}

CellComplex build_cells_geometric(const LineArrangement& a) {
  return build_cells_geometric(a, a.default_bbox());
}

CellComplex build_cells_geometric(const LineArrangement& a, const BBox& bbox) {
  a.validate();
  int k = int(a.lines.size());
  for (const Point& p : a.intersections())
    if (!bbox.contains_strict(p)) throw BBoxTooSmall("bbox must strictly contain intersections");
  CellComplex cx;
  auto on_bbox = [&](const Point& p) {
    return p.x == bbox.xmin || p.x == bbox.xmax || p.y == bbox.ymin || p.y == bbox.ymax;
  };
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<Point> poly = bbox.corners();
    std::vector<int> sign(k);
    for (LineIdx i = 0; i < k && !poly.empty(); ++i) {
      sign[i] = (mask >> i) & 1 ? 1 : -1;
      poly = clip_convex_halfplane(poly, a.lines[i], sign[i] > 0);
    }
    if (poly.size() < 3 || polygon_area2(poly) == 0) continue;
    CellComplex::Cell c;
    c.id = CellId(cx.cells.size());
    c.sign = sign;
    c.polygon = poly;
    for (const Point& p : poly)
      if (on_bbox(p)) c.unbounded = true;
    cx.cells.push_back(std::move(c));
  }
  // Segments: pieces of each line between consecutive crossing points.
  for (LineIdx i = 0; i < k; ++i) {
    std::vector<Rat> params;
    for (LineIdx j = 0; j < k; ++j) {
      if (j == i) continue;
      params.push_back(a.lines[i].param_of(*line_intersection(a.lines[i], a.lines[j])));
    }
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end()), params.end());
    int npieces = int(params.size()) + 1;
    for (int t = 0; t < npieces; ++t) {
      Rat rep_param;
      if (params.empty())
        rep_param = 0;
      else if (t == 0)
        rep_param = params.front() - 1;
      else if (t == npieces - 1)
        rep_param = params.back() + 1;
      else
        rep_param = (params[t - 1] + params[t]) / 2;
      Point rep = a.lines[i].point_at(rep_param);
      CellComplex::Segment s;
      s.line = i;
      s.index = t;
      std::vector<int> sg(k);
      for (LineIdx j = 0; j < k; ++j) {
        if (j == i) continue;
        sg[j] = side_of_line(a.lines[j], rep);
        if (sg[j] == 0) throw ArrangementError("segment midpoint on another line");
      }
      sg[i] = 1;
      s.pos_cell = cx.cell_by_sign(sg);
      sg[i] = -1;
      s.neg_cell = cx.cell_by_sign(sg);
      if (s.pos_cell < 0 || s.neg_cell < 0)
        throw ArrangementError("segment-adjacent cell missing");
      cx.segments.push_back(s);
    }
  }
  for (SegId s = 0; s < SegId(cx.segments.size()); ++s) {
    cx.cells[cx.segments[s].pos_cell].boundary.push_back(s);
    cx.cells[cx.segments[s].neg_cell].boundary.push_back(s);
  }
  return cx;
}

std::vector<Point> clip_cell(const LineArrangement& a, CellId c, const BBox& bbox) {
  for (const Point& p : a.intersections())
    if (!bbox.contains_strict(p)) throw BBoxTooSmall("bbox must strictly contain intersections");
  CellComplex cx = build_cells_geometric(a, bbox);
  if (c < 0 || c >= CellId(cx.cells.size())) throw ArrangementError("clip_cell: bad cell id");
  return cx.cells[c].polygon;
}

CellBijection match_cells(const PseudolineSystem& p, const LineArrangement& a) {
  p.validate();
  a.validate();
  int k = p.k;
  if (int(a.lines.size()) != k) throw NotHomeomorphic("pseudoline and line counts differ");

  auto geo_orders = a.crossing_orders();
  // Per line: may the geometric order run forward / reversed w.r.t. the
  // pseudoline's?
  std::vector<std::vector<int>> dir_options(k);
  for (LineIdx i = 0; i < k; ++i) {
    const auto& po = p.crossing_order[i];
    auto rev = geo_orders[i];
    std::reverse(rev.begin(), rev.end());
    if (geo_orders[i] == po) dir_options[i].push_back(1);
    if (rev == po) dir_options[i].push_back(-1);
    if (dir_options[i].empty())
      throw NotHomeomorphic("crossing order of a line does not match its pseudoline");
  }

  CellComplex cp = build_cells(p);
  CellComplex ca = build_cells_geometric(a);
  if (cp.cells.size() != ca.cells.size()) throw NotHomeomorphic("cell counts differ");

  int ncell = int(cp.cells.size());
  std::vector<int> groups_per_line(k);
  for (LineIdx i = 0; i < k; ++i) groups_per_line[i] = int(p.crossing_order[i].size());

  auto try_side_flips = [&](const std::vector<int>& dir) -> std::optional<CellBijection> {
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      std::vector<int> eps(k);
      for (LineIdx i = 0; i < k; ++i) eps[i] = (mask >> i) & 1 ? 1 : -1;
      std::vector<CellId> phi(ncell, -1);
      bool ok = true;
      for (CellId c = 0; c < ncell && ok; ++c) {
        std::vector<int> tau(k);
        for (LineIdx i = 0; i < k; ++i) tau[i] = eps[i] * cp.cells[c].sign[i];
        CellId t = ca.cell_by_sign(tau);
        if (t < 0 || ca.cells[t].unbounded != cp.cells[c].unbounded) ok = false;
        phi[c] = t;
      }
      if (!ok) continue;
      std::set<CellId> image(phi.begin(), phi.end());
      if (int(image.size()) != ncell) continue;
      // Segment correspondence: piece t of pseudoline i maps to piece t (or
      // the mirrored index) of line i, with matching flanking cells.
      for (const auto& s : cp.segments) {
        int t2 = dir[s.line] > 0 ? s.index : groups_per_line[s.line] - s.index;
        SegId gs = ca.segment_id(s.line, t2);
        if (gs < 0) {
          ok = false;
          break;
        }
        CellId want_pos = eps[s.line] > 0 ? phi[s.pos_cell] : phi[s.neg_cell];
        CellId want_neg = eps[s.line] > 0 ? phi[s.neg_cell] : phi[s.pos_cell];
        if (ca.segments[gs].pos_cell != want_pos || ca.segments[gs].neg_cell != want_neg) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      return CellBijection{std::move(phi), dir, eps};
    }
    return std::nullopt;
  };

  // Iterate direction combinations (rarely more than one per line).
  std::vector<size_t> idx(k, 0);
  while (true) {
    std::vector<int> dir(k);
    for (LineIdx i = 0; i < k; ++i) dir[i] = dir_options[i][idx[i]];
    if (auto r = try_side_flips(dir)) return *r;
    int pos = k - 1;
    while (pos >= 0) {
      if (++idx[pos] < dir_options[pos].size()) break;
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  throw NotHomeomorphic("no cell bijection preserves the incidence structure");
}

}  // namespace aligned

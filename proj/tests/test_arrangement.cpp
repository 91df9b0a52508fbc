#include "doctest.h"

#include <random>
#include <set>

#include "aligned/arrangement.hpp"
#include "oracles.hpp"

using namespace aligned;

namespace {

PseudolineSystem system_from(const LineArrangement& a) {
  PseudolineSystem p;
  p.k = int(a.lines.size());
  p.crossing_order = a.crossing_orders();
  return p;
}

LineArrangement xy_cross() {
  return {{Line(Rat(1), Rat(0), Rat(0)), Line(Rat(0), Rat(1), Rat(0))}};
}

LineArrangement generic3() {
  return {{Line(Rat(1), Rat(0), Rat(0)), Line(Rat(0), Rat(1), Rat(0)),
           Line(Rat(1), Rat(1), Rat(-1))}};
}

LineArrangement concurrent3() {
  return {{Line(Rat(1), Rat(0), Rat(0)), Line(Rat(0), Rat(1), Rat(0)),
           Line(Rat(1), Rat(-1), Rat(0))}};
}

}  // namespace

TEST_CASE("combinatorial cell counts") {
  PseudolineSystem p1{1, {{}}};
  auto c1 = build_cells(p1);
  CHECK(c1.cells.size() == 2);
  CHECK(c1.n_unbounded() == 2);
  CHECK(c1.segments.size() == 1);

  auto c2 = build_cells(system_from(xy_cross()));
  CHECK(c2.cells.size() == 4);
  CHECK(c2.n_unbounded() == 4);

  auto c3 = build_cells(system_from(generic3()));
  CHECK(c3.cells.size() == 7);
  CHECK(c3.n_unbounded() == 6);

  auto cc = build_cells(system_from(concurrent3()));
  CHECK(cc.cells.size() == 6);
  CHECK(cc.n_unbounded() == 6);
}

TEST_CASE("geometric cell counts and structure") {
  auto g1 = build_cells_geometric(LineArrangement{{Line(Rat(1), Rat(0), Rat(0))}});
  CHECK(g1.cells.size() == 2);

  auto g2 = build_cells_geometric(xy_cross());
  CHECK(g2.cells.size() == 4);
  CHECK(g2.segments.size() == 4);

  auto g3 = build_cells_geometric(generic3());
  CHECK(g3.cells.size() == 7);
  CHECK(g3.n_unbounded() == 6);
  int bounded = 0;
  for (const auto& c : g3.cells)
    if (!c.unbounded) {
      ++bounded;
      CHECK(polygon_area2(c.polygon) == Rat(1));  // triangle (0,0),(1,0),(0,1), doubled area
    }
  CHECK(bounded == 1);

  auto gc = build_cells_geometric(concurrent3());
  CHECK(gc.cells.size() == 6);

  LineArrangement par{{Line(Rat(0), Rat(1), Rat(0)), Line(Rat(0), Rat(1), Rat(-1))}};
  CHECK_THROWS_AS(build_cells_geometric(par), BadLineArrangement);
}

TEST_CASE("crossing order validation") {
  PseudolineSystem bad{2, {{{1}}, {}}};
  CHECK_THROWS_AS(bad.validate(), InconsistentCrossingOrders);
  PseudolineSystem twice{2, {{{1}, {1}}, {{0}}}};
  CHECK_THROWS_AS(twice.validate(), InconsistentCrossingOrders);
  // Asymmetric ties: 0 meets {1,2} at once, but 1 meets them separately.
  PseudolineSystem asym{3, {{{1, 2}}, {{0}, {2}}, {{0}, {1}}}};
  CHECK_THROWS_AS(asym.validate(), InconsistentCrossingOrders);
}

TEST_CASE("clip_cell") {
  auto a = xy_cross();
  BBox box{Rat(-10), Rat(-10), Rat(10), Rat(10)};
  auto cx = build_cells_geometric(a, box);
  CellId quad = cx.cell_by_sign({1, 1});
  auto poly = clip_cell(a, quad, box);
  CHECK(polygon_area2(poly) == Rat(200));  // 10 x 10 square, doubled

  CellId half = build_cells_geometric(LineArrangement{{Line(Rat(1), Rat(0), Rat(0))}}, box)
                    .cell_by_sign({1});
  auto hp = clip_cell(LineArrangement{{Line(Rat(1), Rat(0), Rat(0))}}, half, box);
  CHECK(polygon_area2(hp) == Rat(400));

  auto g3 = generic3();
  BBox tiny{Rat(0), Rat(0), Rat(1) / 2, Rat(1) / 2};
  CHECK_THROWS_AS(clip_cell(g3, 0, tiny), BBoxTooSmall);
}

TEST_CASE("match_cells on realizations") {
  for (const auto& a : {xy_cross(), generic3(), concurrent3()}) {
    auto p = system_from(a);
    auto m = match_cells(p, a);
    auto cp = build_cells(p);
    auto ca = build_cells_geometric(a);
    REQUIRE(cp.cells.size() == ca.cells.size());
    std::set<CellId> image(m.phi.begin(), m.phi.end());
    CHECK(image.size() == m.phi.size());
    for (const auto& c : cp.cells) {
      CHECK(ca.cells[m.phi[c.id]].unbounded == c.unbounded);
      CHECK(ca.cells[m.phi[c.id]].boundary.size() == c.boundary.size());
    }
    // Adjacency transported through phi.
    auto pa = cp.adjacency();
    std::set<std::pair<CellId, CellId>> ga;
    for (auto [x, y] : ca.adjacency()) ga.insert({x, y});
    for (auto [x, y] : pa) {
      CellId u = m.phi[x], v = m.phi[y];
      CHECK(ga.count({std::min(u, v), std::max(u, v)}));
    }
  }
}

TEST_CASE("match_cells across an affine shear") {
  auto a = generic3();
  // (x, y) -> (x + y, y) maps line ax+by+c=0 to ax + (b-a)y + c = 0.
  LineArrangement sheared;
  for (const auto& l : a.lines) sheared.lines.push_back(Line(l.a, l.b - l.a, l.c));
  auto m = match_cells(system_from(a), sheared);
  CHECK(m.phi.size() == 7);
}

TEST_CASE("match_cells refuses concurrent realization of generic system") {
  CHECK_THROWS_AS(match_cells(system_from(generic3()), concurrent3()), NotHomeomorphic);
}

TEST_CASE("match_cells is deterministic") {
  auto a = generic3();
  auto p = system_from(a);
  auto m1 = match_cells(p, a);
  auto m2 = match_cells(p, a);
  CHECK(m1.phi == m2.phi);
  CHECK(m1.side_flip == m2.side_flip);
}

TEST_CASE("random line arrangements match their own crossing orders") {
  std::mt19937_64 rng(31);
  int made = 0;
  while (made < 12) {
    int k = 2 + int(made % 4);
    LineArrangement a;
    for (int i = 0; i < k; ++i)
      a.lines.push_back(Line(aligned::testing::random_rat(rng, -5, 5),
                             aligned::testing::random_rat(rng, 1, 5),
                             aligned::testing::random_rat(rng, -5, 5)));
    try {
      a.validate();
    } catch (const BadLineArrangement&) {
      continue;
    }
    ++made;
    auto p = system_from(a);
    auto m = match_cells(p, a);
    CHECK(m.phi.size() == build_cells(p).cells.size());
  }
}

// ---------------------------------------------------------------------------
// Pappus configuration: two triples of collinear points and their six cross
// joins force the three cross points X, Y, Z onto a common line. A ninth
// pseudoline through X and Y that dodges Z therefore has no line realization.

namespace {

struct PappusFixture {
  LineArrangement eight;        // lines 0..7
  Line ninth_line = Line(Rat(1), Rat(0), Rat(0));  // becomes the line X-Y-Z
  Point X, Y, Z;
  PseudolineSystem sys;         // nine pseudolines, ninth dodges Z
};

PappusFixture make_pappus() {
  PappusFixture f;
  Point A(Rat(0), Rat(0)), B(Rat(1), Rat(0)), C(Rat(3), Rat(0));
  Point A2(Rat(-1), Rat(1)), B2(Rat(1), Rat(2)), C2(Rat(5), Rat(4));
  std::vector<Line>& L = f.eight.lines;
  L.push_back(Line::through(A, C));     // 0: base through A,B,C
  L.push_back(Line::through(A2, C2));   // 1: base through A',B',C'
  L.push_back(Line::through(A, B2));    // 2
  L.push_back(Line::through(A2, B));    // 3
  L.push_back(Line::through(A, C2));    // 4
  L.push_back(Line::through(A2, C));    // 5
  L.push_back(Line::through(B, C2));    // 6
  L.push_back(Line::through(B2, C));    // 7
  f.eight.validate();
  f.X = *line_intersection(L[2], L[3]);
  f.Y = *line_intersection(L[4], L[5]);
  f.Z = *line_intersection(L[6], L[7]);
  f.ninth_line = Line::through(f.X, f.Y);

  // The ninth pseudoline: straight along ninth_line except for a small bump
  // around Z, realized as P1 -> P2 -> P3 with P2 off the line.
  const Line& N = f.ninth_line;
  Rat tZ = N.param_of(f.Z);
  std::vector<Rat> others;
  for (int i = 0; i < 8; ++i) {
    Rat t = N.param_of(*line_intersection(N, L[i]));
    if (t != tZ) others.push_back(t);
  }
  std::sort(others.begin(), others.end());
  Rat tprev = tZ - 1, tnext = tZ + 1;
  for (Rat t : others) {
    if (t < tZ) tprev = t;
    if (t > tZ) {
      tnext = t;
      break;
    }
  }
  Point P1 = N.point_at((tprev + tZ) / 2);
  Point P3 = N.point_at((tZ + tnext) / 2);

  struct Hit {
    int piece;  // 0: ray up to P1, 1: P1P2, 2: P2P3, 3: ray from P3
    Rat param;
    int line;
  };
  std::vector<Hit> hits;
  Point P2;
  for (Rat delta(1, 64);; delta /= 64) {
    P2 = f.Z + Point(N.a * delta, N.b * delta);
    hits.clear();
    bool good = true;
    for (int i = 0; i < 8 && good; ++i) {
      int count = 0;
      Rat t = N.param_of(*line_intersection(N, L[i]));
      if (t < N.param_of(P1)) {
        hits.push_back({0, t, i});
        ++count;
      }
      if (t > N.param_of(P3)) {
        hits.push_back({3, t, i});
        ++count;
      }
      for (int piece = 1; piece <= 2; ++piece) {
        Point s = piece == 1 ? P1 : P2;
        Point e = piece == 1 ? P2 : P3;
        int ss = side_of_line(L[i], s), se = side_of_line(L[i], e);
        if (ss == 0 || se == 0) {
          good = false;
          break;
        }
        if (ss != se) {
          Point x = *line_intersection(L[i], Line::through(s, e));
          // Order along the piece: dot product with its direction s -> e.
          Rat t2 = (x.x - s.x) * (e.x - s.x) + (x.y - s.y) * (e.y - s.y);
          hits.push_back({piece, t2, i});
          ++count;
        }
      }
      if (count != 1) good = false;
    }
    if (good) break;
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.piece != b.piece) return a.piece < b.piece;
    return a.param != b.param ? a.param < b.param : a.line < b.line;
  });

  f.sys.k = 9;
  f.sys.crossing_order.resize(9);
  // Ninth pseudoline's order: hits grouped by identical location.
  std::map<int, Point> where;  // line -> crossing point with the pseudoline
  for (size_t i = 0; i < hits.size();) {
    size_t j = i;
    Group g;
    while (j < hits.size() && hits[j].piece == hits[i].piece && hits[j].param == hits[i].param)
      g.push_back(hits[j++].line);
    for (int l : g) {
      if (hits[i].piece == 0 || hits[i].piece == 3)
        where[l] = N.point_at(hits[i].param);
      else if (hits[i].piece == 1)
        where[l] = *line_intersection(L[l], Line::through(P1, P2));
      else
        where[l] = *line_intersection(L[l], Line::through(P2, P3));
    }
    f.sys.crossing_order[8].push_back(g);
    i = j;
  }
  // Orders along the eight lines: seven line-line crossings plus the
  // pseudoline crossing at its computed location.
  for (int i = 0; i < 8; ++i) {
    std::vector<std::pair<Rat, int>> ev;
    for (int j = 0; j < 8; ++j)
      if (j != i) ev.push_back({L[i].param_of(*line_intersection(L[i], L[j])), j});
    ev.push_back({L[i].param_of(where.at(i)), 8});
    std::sort(ev.begin(), ev.end());
    for (size_t a = 0; a < ev.size();) {
      size_t b = a;
      Group g;
      while (b < ev.size() && ev[b].first == ev[a].first) g.push_back(ev[b++].second);
      f.sys.crossing_order[i].push_back(g);
      a = b;
    }
  }
  f.sys.validate();
  return f;
}

}  // namespace

TEST_CASE("pappus: cross points are collinear in exact arithmetic") {
  auto f = make_pappus();
  CHECK(orient(f.X, f.Y, f.Z) == 0);
}

TEST_CASE("pappus: the dodging pseudoline system is a consistent arrangement") {
  auto f = make_pappus();
  auto w = reconstruct_wiring(f.sys);
  CHECK(w.initial_perm.size() == 9);
  auto cx = build_cells(f.sys);
  CHECK(cx.cells.size() > 9);
}

TEST_CASE("pappus: no candidate line set realizes the system") {
  auto f = make_pappus();
  // The true Pappus line passes through Z, so line 6's crossing order ties
  // {7,8} where the pseudoline system keeps them apart.
  LineArrangement cand1 = f.eight;
  cand1.lines.push_back(f.ninth_line);
  CHECK_THROWS_AS(match_cells(f.sys, cand1), NotHomeomorphic);

  // A shifted copy misses X and Y.
  LineArrangement cand2 = f.eight;
  cand2.lines.push_back(Line(f.ninth_line.a, f.ninth_line.b, f.ninth_line.c + 1));
  CHECK_THROWS_AS(match_cells(f.sys, cand2), NotHomeomorphic);

  // An unrelated ninth line.
  LineArrangement cand3 = f.eight;
  cand3.lines.push_back(Line(Rat(5), Rat(18), Rat(-7)));
  CHECK_THROWS_AS(match_cells(f.sys, cand3), NotHomeomorphic);

  // Scaled realization of the eight-line subsystem still matches.
  PseudolineSystem p8;
  p8.k = 8;
  p8.crossing_order = f.eight.crossing_orders();
  LineArrangement scaled;
  for (const auto& l : f.eight.lines) scaled.lines.push_back(Line(l.a, l.b, l.c * 3));
  auto m = match_cells(p8, scaled);
  CHECK(m.phi.size() == build_cells(p8).cells.size());
}

// Pseudoline arrangements as wiring diagrams, concrete line arrangements,
// their cell complexes, and the cell bijection between the two.
#pragma once

#include <vector>

#include "aligned/geometry.hpp"

namespace aligned {

struct ArrangementError : Error {
  using Error::Error;
};
struct InconsistentCrossingOrders : ArrangementError {
  using ArrangementError::ArrangementError;
};
struct NotHomeomorphic : ArrangementError {
  using ArrangementError::ArrangementError;
};
struct BBoxTooSmall : ArrangementError {
  using ArrangementError::ArrangementError;
};
struct BadLineArrangement : ArrangementError {
  using ArrangementError::ArrangementError;
};

using LineIdx = int;
using CellId = int;
using SegId = int;
// Lines crossed at a common point, ascending. Singleton in simple position.
using Group = std::vector<LineIdx>;

struct PseudolineSystem {
  int k = 0;
  // crossing_order[i]: groups of other pseudolines in the order pseudoline i
  // meets them along a fixed traversal direction.
  std::vector<std::vector<Group>> crossing_order;

  // Partition + tie-symmetry checks; throws InconsistentCrossingOrders.
  void validate() const;
};

// x-monotone wire model: wires stacked top (row 0) to bottom, crossings as
// reversals of blocks of adjacent rows.
struct WiringDiagram {
  std::vector<LineIdx> initial_perm;  // wire at each row, top to bottom, at x = -inf
  struct Event {
    std::vector<LineIdx> lines;  // ascending; the set reversing at this column
    int top_row = 0;             // rows top_row .. top_row+|lines|-1 reverse
  };
  std::vector<Event> events;
  std::vector<LineIdx> final_perm;
};

// Canonical reconstruction (first viable initial permutation in lexicographic
// order, first enabled event at each column).
WiringDiagram reconstruct_wiring(const PseudolineSystem& p);

struct CellComplex {
  struct Cell {
    CellId id = -1;
    std::vector<int> sign;  // per line; combinatorial: +1 above the wire,
                            // geometric: +1 on the positive side (ax+by+c>0)
    bool unbounded = false;
    std::vector<SegId> boundary;
    std::vector<Point> polygon;  // geometric complexes only; clipped at bbox
  };
  struct Segment {
    LineIdx line = -1;
    int index = 0;  // position along the line, 0 .. #groups
    CellId pos_cell = -1, neg_cell = -1;
  };
  std::vector<Cell> cells;
  std::vector<Segment> segments;

  CellId cell_by_sign(const std::vector<int>& sign) const;  // -1 if absent
  SegId segment_id(LineIdx line, int index) const;          // -1 if absent
  std::vector<std::pair<CellId, CellId>> adjacency() const;
  int n_unbounded() const;
};

struct LineArrangement {
  std::vector<Line> lines;

  void validate() const;  // pairwise crossing, pairwise distinct
  std::vector<Point> intersections() const;
  // Groups along each line ordered by the parameter in direction (b, -a).
  std::vector<std::vector<Group>> crossing_orders() const;
  BBox default_bbox() const;  // twice the spread of the intersection points
};

CellComplex build_cells(const PseudolineSystem& p);
CellComplex build_cells_geometric(const LineArrangement& a);
CellComplex build_cells_geometric(const LineArrangement& a, const BBox& bbox);

// Bounded polygon cell ∩ bbox; bbox must strictly contain all intersections.
std::vector<Point> clip_cell(const LineArrangement& a, CellId c, const BBox& bbox);

struct CellBijection {
  std::vector<CellId> phi;       // combinatorial cell id -> geometric cell id
  std::vector<int> line_flip;    // per line: -1 if the geometric crossing
                                 // order runs opposite to the pseudoline's
  std::vector<int> side_flip;    // per line: -1 if "above the wire" maps to
                                 // the negative geometric side
};

// Verifies that the provided line arrangement realizes the pseudoline system
// (pseudoline i onto line i): adjacency, per-segment correspondence and
// unboundedness are all checked. Throws NotHomeomorphic.
CellBijection match_cells(const PseudolineSystem& p, const LineArrangement& a);

}  // namespace aligned

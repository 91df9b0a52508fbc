// A drawing of an aligned graph: exact rational vertex positions, an optional
// bend point per edge, and the concrete line arrangement realizing the
// pseudoline system (with the cell bijection that witnesses it).
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "aligned/arrangement.hpp"
#include "aligned/geometry.hpp"
#include "aligned/planargraph.hpp"

namespace aligned {

struct AlignedDrawing {
  std::vector<Point> pos;        // indexed by vertex id
  std::map<EdgeId, Point> bend;  // at most one bend per edge
  LineArrangement arr;
  // Witness bijection from the system's cells to the arrangement's cells;
  // recomputed by the validator when absent.
  std::optional<CellBijection> phi;

  int bends() const { return int(bend.size()); }
};

}  // namespace aligned

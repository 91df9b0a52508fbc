// Exact validation of drawings. check_planar_straightline is a pure geometric
// planarity test; check_aligned_drawing decides whether a drawing realizes an
// aligned graph, reporting failures against the five defining properties:
//   (1) the arrangement realizes the pseudoline system, matching the recorded
//       cell bijection when one is present;
//   (2) the drawing is planar and realizes the graph's embedding (rotation
//       system and outer face);
//   (3) vertex/edge incidences with the lines match the classification;
//   (4) per-edge crossing counts and parities match;
//   (5) each line meets the same vertices and edges as its pseudoline, in the
//       same order (up to reversing the line).
// All verdicts are exact; there are no tolerances.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aligned/alignedgraph.hpp"
#include "aligned/drawing.hpp"

namespace aligned {

struct CrossingWitness {
  EdgeId e1 = -1, e2 = -1;  // -1 for vertex-related findings
  std::string detail;
  std::optional<Point> at;
};

// Exact pairwise intersection check of all edge polylines (one bend allowed
// per edge): edges may meet only at shared endpoint vertices, no vertex may
// lie on a non-incident edge, no two vertices may coincide, and no segment
// may be degenerate. Empty result means planar.
std::vector<CrossingWitness> check_planar_straightline(const EmbeddedGraph& g,
                                                       const AlignedDrawing& d);

struct Violation {
  int property = 0;  // 1..5 as above; 0 for structural problems
  std::string detail;
  std::vector<int> elements;
  std::optional<Point> witness;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
  std::string str() const;
};

ValidationReport check_aligned_drawing(const AlignedGraph& ag, const AlignedDrawing& d);

}  // namespace aligned

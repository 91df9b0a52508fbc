// Construction of exact aligned drawings: barycentric (Tutte) solves over the
// rationals, the recursive one-line and k-line drawing algorithms
// (separating-triangle splits, chord splits, edge contraction with geometric
// re-insertion, direct base-case placement), the per-cell barycentric drawing
// for crossing-free instances, and the one-bend construction for two lines.
// Every public entry point validates its output with check_aligned_drawing
// and throws DrawError when the result does not withstand the exact checks.
#pragma once

#include <map>
#include <vector>

#include "aligned/alignedgraph.hpp"
#include "aligned/drawing.hpp"

namespace aligned {

struct DrawError : Error {
  using Error::Error;
};
// Input alignment complexity outside what the requested construction handles.
struct ComplexityViolation : DrawError {
  using DrawError::DrawError;
};
struct NotProper : DrawError {
  using DrawError::DrawError;
};
struct NotOneAligned : DrawError {
  using DrawError::DrawError;
};
// Zero pivot in an exact barycentric solve; cannot happen for connected
// interiors with a fixed boundary and indicates an internal error.
struct SingularSystem : DrawError {
  using DrawError::DrawError;
};
// Star polygon around a re-inserted vertex has an empty kernel.
struct EmptyKernel : DrawError {
  using DrawError::DrawError;
};
// The kernel contains no usable segment of the required line.
struct NoLineSegmentInKernel : DrawError {
  using DrawError::DrawError;
};
struct KNotTwo : DrawError {
  using DrawError::DrawError;
};

// A fixed convex drawing of an outer cycle. cycle and pos run in parallel;
// the polygon must be strictly convex, with vertices on the line placed
// exactly on it.
struct ConvexOuterFace {
  std::vector<VertexId> cycle;
  std::vector<Point> pos;
};

// Exact barycentric positions: every vertex of g absent from `fixed` is
// placed at the average of its neighbors; the linear system is solved exactly
// over the rationals. Returns positions for all vertices. Throws
// SingularSystem when the system has no unique solution (e.g. a component
// with no fixed vertex).
std::map<VertexId, Point> tutte_solve(const EmbeddedGraph& g,
                                      const std::map<VertexId, Point>& fixed);

// Reduction handle for a proper aligned triangulation: a separating triangle
// to split at, a chord (single-line instances), a contractible interior free
// or 0-anchored aligned edge, or the irreducible base case. Deterministic:
// smallest triangle / smallest edge id.
struct ReducibleEdge {
  enum class Kind { AlignedEdge, FreeEdge, Chord, SepTriangle, BaseCase };
  Kind kind = Kind::BaseCase;
  EdgeId edge = -1;
  Triangle tri{-1, -1, -1};
};
ReducibleEdge find_reducible_edge(const AlignedGraph& ag);

// Drawing for crossing-free instances (alignment complexity (0,0,0)): the
// arrangement is wrapped in a cycle through the unbounded cells, aligned
// vertices are spread along their segments, and all free vertices are solved
// barycentrically per cell.
AlignedDrawing draw_complexity_000(const AlignedGraph& ag, const LineArrangement& a);
AlignedDrawing draw_complexity_000(const AlignedGraph& ag, const LineArrangement& a,
                                   const CellBijection& phi);

// Drawing of a proper 1-aligned graph with the outer face fixed to the given
// convex polygon; outer positions are preserved exactly.
AlignedDrawing draw_one_line(const AlignedGraph& ag, const ConvexOuterFace& outer,
                             const Line& r);

// Re-inserts the contracted edge e = uv into a drawing of ag.graph.contract(e):
// the surviving endpoint keeps its position and the removed endpoint is placed
// inside the kernel of its neighbor polygon, on the edge's line when e is
// aligned. Only the removed endpoint's position is new.
AlignedDrawing uncontract(const AlignedGraph& ag, EdgeId e, const AlignedDrawing& contracted);

// Straight-line aligned drawing for alignment complexity (1,0,-): the
// instance is completed to a proper aligned triangulation, drawn recursively,
// and the completion is stripped again. The overload taking phi additionally
// requires it to equal the canonical cell bijection.
AlignedDrawing draw_k_aligned(const AlignedGraph& ag, const LineArrangement& a);
AlignedDrawing draw_k_aligned(const AlignedGraph& ag, const LineArrangement& a,
                              const CellBijection& phi);

// One-bend drawing for two lines: edges whose ends and crossings exceed the
// straight-line budget are subdivided once, the subdivision is drawn
// straight-line, and the subdivision vertices become bends.
AlignedDrawing draw_two_aligned_one_bend(const AlignedGraph& ag, const LineArrangement& a);

}  // namespace aligned

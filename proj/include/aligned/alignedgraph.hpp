// Aligned graphs: an embedded graph together with pseudolines described by
// traces (ordered event lists), plus the derived per-edge/per-vertex
// classification and validity checks.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aligned/arrangement.hpp"
#include "aligned/planargraph.hpp"

namespace aligned {

struct AlignedGraphError : Error {
  using Error::Error;
};

struct TraceEvent {
  enum class Kind { Face, CrossEdge, ThroughVertex, AlongEdge, CrossPseudoline };
  Kind kind;
  int id;  // FaceId / EdgeId / VertexId / EdgeId / LineIdx respectively
  bool operator==(const TraceEvent&) const = default;
};

inline TraceEvent ev_face(FaceId f) { return {TraceEvent::Kind::Face, f}; }
inline TraceEvent ev_cross_edge(EdgeId e) { return {TraceEvent::Kind::CrossEdge, e}; }
inline TraceEvent ev_through(VertexId v) { return {TraceEvent::Kind::ThroughVertex, v}; }
inline TraceEvent ev_along(EdgeId e) { return {TraceEvent::Kind::AlongEdge, e}; }
inline TraceEvent ev_cross_line(LineIdx j) { return {TraceEvent::Kind::CrossPseudoline, j}; }

// One pseudoline's itinerary through the graph, from infinity to infinity.
// Grammar: Face (Element Face)* where an Element is CrossEdge, a maximal run
// of CrossPseudoline events (a concurrent crossing), or a vertex passage
// ThroughVertex (AlongEdge ThroughVertex)*. First and last Face events name
// the outer face.
struct PseudolineTrace {
  LineIdx line = -1;
  std::vector<TraceEvent> events;
  bool operator==(const PseudolineTrace&) const = default;
};

struct TraceViolation {
  std::string detail;
  int event_index = -1;  // -1 when not tied to a single event
};
// nullopt means the trace is valid with respect to g.
std::optional<TraceViolation> validate_pseudoline_wrt_graph(const EmbeddedGraph& g,
                                                            const PseudolineTrace& t);

struct EdgeClass {
  LineIdx aligned_line = -1;       // -1 when the edge lies on no pseudoline
  int anchors = 0;                 // endpoints aligned to distinct pseudolines
  std::vector<LineIdx> crossings;  // lines crossing the interior, ascending
  bool aligned() const { return aligned_line >= 0; }
  bool is_free() const { return aligned_line < 0 && anchors == 0 && crossings.empty(); }
  bool operator==(const EdgeClass&) const = default;
};

struct Classification {
  // Indexed by vertex/edge id; dead ids hold empty entries.
  std::vector<std::vector<LineIdx>> vertex_lines;
  std::vector<EdgeClass> edge_class;
};

Classification classify(const EmbeddedGraph& g, int k,
                        const std::vector<PseudolineTrace>& traces);

inline constexpr int kNoEdges = -1;  // "class empty" sentinel in a complexity triple

struct AlignmentComplexity {
  int l0 = kNoEdges, l1 = kNoEdges, l2 = kNoEdges;
  bool operator==(const AlignmentComplexity&) const = default;
  // Componentwise order with the empty sentinel as the minimum.
  bool leq(const AlignmentComplexity& o) const;
  std::string str() const;
};

struct AlignedGraph {
  EmbeddedGraph graph;
  PseudolineSystem system;
  std::vector<PseudolineTrace> traces;  // traces[i].line == i
  Classification cls;
  // Per aligned edge: the crossing groups along it, ordered in the direction
  // its line's trace traverses it. Derived while checking trace/system
  // consistency; used by rigid_subdivision.
  std::map<EdgeId, std::vector<Group>> aligned_edge_cross_order;

  // Validates each trace, checks consistency with the system's crossing
  // orders, and computes the classification. Throws AlignedGraphError.
  static AlignedGraph make(EmbeddedGraph g, PseudolineSystem s,
                           std::vector<PseudolineTrace> tr);
};

AlignmentComplexity alignment_complexity(const AlignedGraph& ag);

struct ProperCheck {
  bool yes = false;
  std::vector<std::string> reasons;
};
// The four conditions for a proper aligned triangulation: aligned edges
// 0-crossed; (k >= 2) outer edges exactly 1-crossed; the outer boundary meets
// every pseudoline exactly twice; no pseudoline crossing inside the outer face.
ProperCheck is_proper(const AlignedGraph& ag);

struct RigidSubdivisionResult {
  AlignedGraph ag;
  // Old edge id -> chain of (new) edge ids from the old edge's u endpoint to
  // its v endpoint; identity chains for untouched edges.
  std::map<EdgeId, std::vector<EdgeId>> edge_pieces;
  std::vector<VertexId> new_vertices;
};
// Subdivides every aligned edge at its interior crossings so that every
// subdivision vertex is an intersection vertex.
RigidSubdivisionResult rigid_subdivision(const AlignedGraph& ag);

}  // namespace aligned

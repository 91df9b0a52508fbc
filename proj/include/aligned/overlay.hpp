// Planar overlay of an embedded graph, a pseudoline family, and a bounding
// frame, as a half-edge structure over crossing-free pieces. All structural
// surgery (augmentation, subdivision, contraction) happens here; embedded
// graphs and traces are exported views.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "aligned/alignedgraph.hpp"
#include "aligned/geometry.hpp"

namespace aligned {

struct OverlayError : Error {
  using Error::Error;
};

class Overlay {
 public:
  using NodeId = int;
  using ArcId = int;
  using Dart = int;  // arc a owns darts 2a and 2a+1
  using RegionId = int;

  enum class NodeKind { Vertex, EdgeCross, LineCross, Frame };
  enum class ArcKind { EdgePiece, LinePiece, FramePiece };

  struct Node {
    NodeKind kind = NodeKind::Vertex;
    VertexId vertex = -1;        // Vertex nodes
    EdgeId edge = -1;            // EdgeCross nodes: the crossed edge
    std::vector<LineIdx> lines;  // pseudolines through this node, ascending
    bool alive = false;
  };
  struct Arc {
    ArcKind kind = ArcKind::EdgePiece;
    EdgeId edge = -1;   // EdgePiece
    LineIdx line = -1;  // LinePiece, FramePiece never; EdgePiece when the
                        // edge lies on that pseudoline
    bool alive = false;
  };

  // Builds the overlay of a straight-line witness drawing: positions realize
  // g's embedding exactly (checked), lines realize the pseudolines. Throws
  // OverlayError on invalid input, including degenerate line-line crossings
  // in the interior of non-aligned edges.
  static Overlay from_geometry(const EmbeddedGraph& g, const std::vector<Point>& pos,
                               const LineArrangement& a);
  static Overlay from_geometry(const EmbeddedGraph& g, const std::vector<Point>& pos,
                               const LineArrangement& a, const BBox& frame);

  // Builds the overlay combinatorially from validated traces, choosing an
  // arbitrary consistent realization where the traces leave freedom. Throws
  // OverlayError when no planar realization exists.
  static Overlay from_traces(const AlignedGraph& ag);

  // --- structure access -------------------------------------------------
  int n_lines() const { return k_; }
  static Dart twin(Dart d) { return d ^ 1; }
  static ArcId arc_of(Dart d) { return d >> 1; }
  const Node& node(NodeId n) const { return nodes_[n]; }
  const Arc& arc(ArcId a) const { return arcs_[a]; }
  NodeId origin(Dart d) const { return org_[d]; }
  NodeId target(Dart d) const { return org_[d ^ 1]; }
  Dart rot_next(Dart d) const { return nxt_[d]; }  // ccw around the origin
  Dart rot_prev(Dart d) const { return prv_[d]; }
  Dart face_next(Dart d) const { return prv_[d ^ 1]; }  // region left of d
  Dart face_prev(Dart d) const { return nxt_[d] ^ 1; }
  std::vector<NodeId> node_ids() const;
  std::vector<ArcId> arc_ids() const;
  std::vector<Dart> out_darts(NodeId n) const;  // ccw order
  bool node_alive(NodeId n) const { return n >= 0 && n < int(nodes_.size()) && nodes_[n].alive; }
  bool arc_alive(ArcId a) const { return a >= 0 && a < int(arcs_.size()) && arcs_[a].alive; }

  // Graph-level ids live in the overlay's own id space.
  std::vector<VertexId> graph_vertex_ids() const;
  std::vector<EdgeId> graph_edge_ids() const;
  NodeId node_of_vertex(VertexId v) const;
  std::pair<VertexId, VertexId> edge_ends(EdgeId e) const;
  // Pieces of e ordered from its u endpoint, as darts directed u -> v.
  std::vector<Dart> edge_chain(EdgeId e) const;
  LineIdx edge_on_line(EdgeId e) const;          // -1 when not aligned
  std::vector<LineIdx> edge_crossings(EdgeId e) const;
  std::vector<LineIdx> vertex_lines(VertexId v) const;
  int graph_degree(VertexId v) const;
  // Darts of line i's path, oriented along the line, frame to frame.
  std::vector<Dart> line_chain(LineIdx i) const;

  // --- derived decomposition (cached) ------------------------------------
  struct Region {
    RegionId id = -1;
    std::vector<Dart> boundary;  // region lies left of each dart
    FaceId graph_face = -1;      // region class merged across non-edge arcs
    int cell = -1;               // class merged across non-aligned edge arcs;
                                 // -1 for the region outside the frame
    bool cell_unbounded = false;
  };
  const std::vector<Region>& regions() const;
  RegionId region_of(Dart d) const;  // region left of d
  // Region at the corner clockwise of dart c around its origin node.
  RegionId corner_region(Dart c) const { return region_of(twin(c)); }
  RegionId outside_region() const;
  int n_graph_faces() const;
  int n_cells() const;
  // Anchor dart of an isolated vertex: the vertex lies in the region left of
  // it. Throws if v is not isolated.
  Dart isolated_anchor(VertexId v) const;
  FaceId graph_face_of_region(RegionId r) const { return regions()[r].graph_face; }
  int cell_of_region(RegionId r) const { return regions()[r].cell; }
  // Sign of each cell with respect to each line (+1 left of the line's
  // traversal direction), indexed [cell][line].
  const std::vector<std::vector<int>>& cell_signs() const;

  // --- exports ------------------------------------------------------------
  struct Export {
    AlignedGraph ag;
    std::vector<VertexId> vertex_of;          // exported id -> overlay vertex id
    std::vector<EdgeId> edge_of;              // exported id -> overlay edge id
    std::map<VertexId, VertexId> vertex_to;   // overlay id -> exported id
    std::map<EdgeId, EdgeId> edge_to;         // overlay id -> exported id
    std::vector<FaceId> face_of_region;       // region -> exported face id
  };
  // Exports the graph, the pseudoline system read off the overlay, and the
  // traces, cross-validated through AlignedGraph::make.
  Export export_aligned() const;
  PseudolineSystem derive_system() const;

  // --- surgery ------------------------------------------------------------
  // New isolated vertex inside the region left of anchor.
  VertexId add_isolated_vertex(Dart anchor);
  struct PathStep {
    ArcId cross;  // line piece the new edge crosses
  };
  // New graph edge from vertex u to vertex v. Corners give the insertion
  // position in the rotation (corner clockwise of the given dart); -1 for
  // isolated endpoints. steps lists the pseudoline pieces crossed, in order;
  // consecutive pieces must bound a common region along the way.
  EdgeId add_edge(VertexId u, Dart corner_u, const std::vector<PathStep>& steps,
                  VertexId v, Dart corner_v);
  // Splits edge e at a new free vertex inside piece `piece` of its chain.
  VertexId split_edge(EdgeId e, int piece, EdgeId* left_id = nullptr,
                      EdgeId* right_id = nullptr);
  // Turns an edge-line crossing node into a graph vertex (aligned to the
  // node's lines); the edge splits into two new edge ids.
  VertexId promote_crossing(NodeId n, EdgeId* left_id = nullptr, EdgeId* right_id = nullptr);
  void delete_edge(EdgeId e);
  // Splits a pseudoline piece at a new degree-zero aligned vertex.
  VertexId add_vertex_on_line(ArcId piece);
  // Turns a pseudoline intersection node into a degree-zero aligned vertex.
  VertexId promote_line_cross(NodeId n);
  // Contracts a 0-crossed edge whose endpoints are either both free or both
  // on exactly the edge's own line (0-anchored aligned). Keeps u's vertex id.
  // Parallel chains created by collapsed triangles are merged pairwise.
  void contract_edge(EdgeId e);

  void check_structure() const;

 private:
  friend struct TraceBuilder;
  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<NodeId> org_;  // per dart
  std::vector<Dart> nxt_, prv_;
  std::vector<Dart> nrep_;  // representative out-dart per node, -1 if isolated
  std::vector<Dart> isolated_anchor_;  // per node: region anchor when isolated
  // Darts whose boundary walks bound the same region (nesting of components).
  std::vector<std::pair<Dart, Dart>> nest_pairs_;
  int k_ = 0;

  mutable bool derived_valid_ = false;
  mutable std::vector<Region> regions_;
  mutable std::vector<RegionId> region_of_dart_;
  mutable RegionId outside_ = -1;
  mutable int n_graph_faces_ = 0;
  mutable int n_cells_ = 0;
  mutable std::vector<std::vector<int>> cell_signs_;

  void touch() { derived_valid_ = false; }
  void ensure_derived() const;
  NodeId new_node(Node n);
  ArcId new_arc(Arc a, NodeId u, NodeId v);  // darts unlinked
  void attach_at_corner(Dart d, Dart corner);  // insert d cw of corner dart
  void attach_isolated(Dart d, NodeId n);
  void detach(Dart d);
  void remove_arc(ArcId a);
  Dart some_dart(NodeId n) const { return nrep_[n]; }
  VertexId fresh_vertex_id();
  EdgeId fresh_edge_id();
  ArcId split_arc(ArcId a, NodeId mid);  // returns the second half
  void dissolve_node(NodeId n);          // degree-2 node joining two like arcs
  void relabel_edge_sides(EdgeId e, VertexId u, VertexId v, EdgeId* left_id, EdgeId* right_id);
};

}  // namespace aligned

// Planar embedded graphs as rotation systems (half-edge structure).
// Graphs are values: structural operations return modified copies.
#pragma once

#include <optional>
#include <vector>

#include "aligned/rational.hpp"

namespace aligned {

using VertexId = int;
using EdgeId = int;
using HalfEdge = int;  // edge e owns half-edges 2e (u->v) and 2e+1 (v->u)
using FaceId = int;

struct GraphError : Error {
  using Error::Error;
};
struct NotATriangulation : GraphError {
  using GraphError::GraphError;
};
struct NotSeparating : GraphError {
  using GraphError::GraphError;
};
struct WouldCreateMultiEdge : GraphError {
  using GraphError::GraphError;
};

struct Face {
  FaceId id = -1;
  std::vector<HalfEdge> boundary;  // directed walk; the face lies left of each half-edge
};

struct Triangle {
  VertexId a, b, c;  // sorted ascending
  bool operator==(const Triangle&) const = default;
  auto operator<=>(const Triangle&) const = default;
};

class EmbeddedGraph {
 public:
  // rot[v] lists v's neighbors in counterclockwise order. outer_walk is a
  // directed boundary walk of the outer face (either orientation accepted).
  static EmbeddedGraph from_rotations(const std::vector<std::vector<VertexId>>& rot,
                                      const std::vector<VertexId>& outer_walk);

  // --- inspection ------------------------------------------------------
  int n_vertices() const;
  int n_edges() const;
  bool vertex_alive(VertexId v) const { return v >= 0 && v < int(vrep_.size()) && valive_[v]; }
  bool edge_alive(EdgeId e) const { return e >= 0 && 2 * e < int(org_.size()) && ealive_[e]; }
  std::vector<VertexId> vertex_ids() const;
  std::vector<EdgeId> edge_ids() const;

  static HalfEdge twin(HalfEdge h) { return h ^ 1; }
  static EdgeId edge_of(HalfEdge h) { return h >> 1; }
  VertexId origin(HalfEdge h) const { return org_[h]; }
  VertexId target(HalfEdge h) const { return org_[h ^ 1]; }
  HalfEdge rot_next(HalfEdge h) const { return nxt_[h]; }  // ccw around origin
  HalfEdge rot_prev(HalfEdge h) const { return prv_[h]; }
  HalfEdge face_next(HalfEdge h) const { return prv_[h ^ 1]; }  // face left of h
  HalfEdge face_prev(HalfEdge h) const { return nxt_[h] ^ 1; }

  int degree(VertexId v) const;
  std::vector<VertexId> neighbors_ccw(VertexId v) const;
  std::vector<HalfEdge> out_half_edges(VertexId v) const;  // ccw order
  // Half-edge u->v, or nullopt if uv is not an edge.
  std::optional<HalfEdge> half_edge(VertexId u, VertexId v) const;
  std::pair<VertexId, VertexId> edge_ends(EdgeId e) const { return {org_[2 * e], org_[2 * e + 1]}; }

  // Deterministic face enumeration: walks start from the smallest unvisited
  // half-edge id, so ids are stable for a given structure.
  std::vector<Face> faces() const;
  FaceId outer_face() const;  // id within faces()
  std::vector<HalfEdge> outer_walk() const;
  std::vector<VertexId> outer_vertices() const;
  bool on_outer_face(VertexId v) const;

  bool is_connected() const;
  bool is_biconnected() const;
  // Every inner face a triangle (outer face unconstrained), connected, simple.
  bool is_triangulation() const;
  // Euler + rotation-permutation consistency; throws GraphError on violation.
  void check_structure() const;

  std::vector<EdgeId> chords() const;
  struct WheelResult {
    bool yes = false;
    VertexId center = -1;
  };
  WheelResult is_k_wheel() const;
  std::vector<Triangle> separating_triangles() const;

  // --- structural operations (pure) ------------------------------------
  std::pair<EmbeddedGraph, VertexId> subdivide(EdgeId e) const;
  // Contracts e = uv, keeping u. Multi-edges arising from the (at most two)
  // triangle faces incident to e are merged; any other shared neighbor is an
  // error. Self-loops cannot arise on simple input.
  EmbeddedGraph contract(EdgeId e) const;
  std::pair<EmbeddedGraph, EmbeddedGraph> split_at_triangle(const Triangle& t) const;

  // Rotation lists of the live structure with vertices renumbered 0..n-1;
  // second element maps new ids back to old. Round-trips with from_rotations.
  std::pair<std::vector<std::vector<VertexId>>, std::vector<VertexId>> compact_rotations() const;

  bool operator==(const EmbeddedGraph&) const = default;

 private:
  std::vector<VertexId> org_;   // per half-edge
  std::vector<HalfEdge> nxt_;   // ccw next around origin
  std::vector<HalfEdge> prv_;
  std::vector<HalfEdge> vrep_;  // representative out-half-edge, -1 if isolated
  std::vector<char> valive_;
  std::vector<char> ealive_;
  HalfEdge outer_rep_ = -1;  // half-edge whose left face is the outer face

  void unlink_at_origin(HalfEdge h);
  void delete_edge(EdgeId e);
  friend class OverlayBuilderAccess;
};

}  // namespace aligned

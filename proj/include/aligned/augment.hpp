// Augmentation of an overlay towards a proper aligned triangulation:
// biconnect the graph, isolate multiply-crossed edges, triangulate all inner
// faces, and wrap everything in an outer cycle crossing each pseudoline
// exactly twice. Every stage mutates the overlay in place and reports what it
// added; original vertices and edges survive (edges possibly as subdivision
// chains recorded in the report).
#pragma once

#include <string>
#include <vector>

#include "aligned/overlay.hpp"

namespace aligned {

struct AugmentError : Error {
  using Error::Error;
};
// The input edges exceed the (1,0,_) alignment-complexity budget the
// augmentation stages are designed for.
struct ComplexityTooHigh : AugmentError {
  using AugmentError::AugmentError;
};
// A stage precondition (biconnectivity, face complexity) does not hold.
struct PreconditionViolated : AugmentError {
  using AugmentError::AugmentError;
};
// properize requires at least two pseudolines.
struct KTooSmall : AugmentError {
  using AugmentError::AugmentError;
};

struct AugmentationReport {
  struct Addition {
    std::string stage;  // connect / biconnect / isolate-crossed /
                        // isolate-intersection / isolate-aligned /
                        // isolate-segment / triangulate-free / outer-cycle
    bool is_vertex = false;
    int id = -1;  // overlay vertex or edge id
  };
  // Genuinely new vertices and edges.
  std::vector<Addition> additions;
  // Edges split in two at a new vertex sitting on a pseudoline; the pieces
  // identify with the original edge, not with additions.
  struct Subdivision {
    std::string stage;
    EdgeId old_edge = -1;
    VertexId mid = -1;
    EdgeId piece_a = -1, piece_b = -1;
  };
  std::vector<Subdivision> subdivisions;

  int added_vertices() const;
  int added_edges() const;
  void merge(AugmentationReport other);
};

// Adds vertices and edges until the graph is connected and has no cut
// vertices: a seed vertex in every vertex-free cell, connecting edges between
// co-visible vertices of distinct components, and a ring of face vertices
// around every cut vertex. Added edges are at most 1-anchored or 1-crossed
// and never aligned. Throws ComplexityTooHigh when the input graph exceeds
// the (1,0,_) budget.
AugmentationReport biconnect(Overlay& ov);

// Replaces each at-least-twice-crossed edge on a non-triangular inner face by
// a companion path of lower-crossed edges until every non-triangular inner
// face is bounded by at most 1-crossed edges. Requires a biconnected graph.
AugmentationReport isolate_crossed_edges(Overlay& ov);

// Triangulates all inner faces: vertices on interior pseudoline
// intersections, fan isolation of aligned vertices and edges, a six-edge
// gadget around each pseudoline segment crossing a face, and free chords
// elsewhere. Requires a biconnected graph whose non-triangular inner faces
// are bounded by at most 1-crossed, at most 1-anchored edges.
AugmentationReport triangulate(Overlay& ov);

// Produces a proper aligned triangulation: subdivides aligned edges at
// pseudoline crossings, embeds an outer cycle through all unbounded cells
// (crossing each pseudoline exactly twice), then biconnects and
// triangulates. Requires at least two pseudolines (KTooSmall otherwise).
AugmentationReport properize(Overlay& ov);

}  // namespace aligned

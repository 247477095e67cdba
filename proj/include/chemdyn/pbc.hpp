#pragma once

#include "chemdyn/core.hpp"

#include <array>
#include <string>
#include <vector>

namespace chemdyn {

/// Directed neighbor-list entry. `distance` is the image distance that
/// produced the edge (the minimum-image distance when the nearest image won).
struct NeighborEdge {
  int src = 0;
  int dst = 0;
  double distance = 0.0;
};

/// Per-atom k-capped radius graph. Edges are grouped by source atom and,
/// within a source, ordered by (distance, dst, image shift).
struct NeighborGraph {
  std::vector<NeighborEdge> edges;
  double cutoff = 2.5;
  int k_cap = 4;
};

/// Minimum-image displacement b - a under the cell's periodic directions.
/// Searches integer shifts in {-1,0,1} per periodic direction, so the cell
/// must be within the skew envelope checked by validate_cell. Exactly
/// antisymmetric: mic_displacement(a,b,c) == -mic_displacement(b,a,c).
Vec3 mic_displacement(const Vec3& a, const Vec3& b, const Cell& cell);

/// Images needed per periodic direction so that every neighbor within
/// `cutoff` of the reference cell is captured: ceil(cutoff / h_d) with h_d
/// the perpendicular height of basis row d over the other periodic rows.
/// Non-periodic directions get 0.
std::array<int, 3> tiling_extent(const Cell& cell, double cutoff);

/// Cell sanity for periodic searches: periodic rows must be nonzero and the
/// cell must not be so skewed that a +-1 image scan misses the minimum image.
/// Returns violation descriptions; empty means usable.
std::vector<std::string> validate_cell(const Cell& cell);

/// Builds the directed neighbor graph of a frame. Candidates are all atom
/// pairs and periodic images (periodic directions only) with
/// 0 < distance <= cutoff; self-images count, plain self-pairs do not. Each
/// atom keeps its k_cap nearest candidates, ties broken by ascending dst
/// index and then lexicographic image shift. Throws std::invalid_argument on
/// a degenerate or over-skewed cell.
NeighborGraph build_neighbor_graph(const Frame& f, double cutoff = 2.5,
                                   int k_cap = 4);

}  // namespace chemdyn

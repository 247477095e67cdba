#pragma once

#include "chemdyn/core.hpp"
#include "chemdyn/trajectory_io.hpp"

#include <cstdint>
#include <vector>

namespace chemdyn {

/// Atoms in the rigid toy slab every synthetic record is built on (3x3 sites,
/// 2 layers). Slab atoms come first in each frame; adsorbate atoms follow.
inline constexpr int kToySlabAtomCount = 18;

/// Deterministic desk-scale stand-in for the surface-reaction augmentation:
/// a periodic slab plus a 1-2 atom adsorbate, a reaction type drawn uniformly
/// at random, a 5-12 frame trajectory realizing it, and a smooth asymmetric
/// energy bump E(s) = h sin^2(pi s) (1 + a s) + dH s over the normalized path
/// coordinate. Labels (ts_step, barrier, enthalpy) come from the discrete
/// profile, so every record passes validation by construction.
std::vector<CatalyticRecord> synthesize_catalytic_records(std::uint64_t seed,
                                                          int count);

/// Rule-based reaction typing: desorption when the final minimum
/// adsorbate-slab MIC distance exceeds 4.0 A; otherwise dissociation when the
/// adsorbate-internal bond graph (2.0 A cutoff) gains connected components
/// between the first and last frames; otherwise transfer.
ReactionType classify_reaction(const Trajectory& t, int slab_atom_count);

/// Minimum MIC distance between any adsorbate atom and any slab atom.
double min_adsorbate_slab_distance(const Frame& f, int slab_atom_count);

CatalyticRecordRow to_row(const CatalyticRecord& rec,
                          const std::string& trajectory_path);

}  // namespace chemdyn

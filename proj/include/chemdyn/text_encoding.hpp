#pragma once

#include "chemdyn/core.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace chemdyn {

struct EncodingConfig {
  int coord_decimals = 2;
  int dist_decimals = 2;
  double cutoff = 2.5;  // angstrom
  int k_cap = 4;
  double delta = 0.1;  // angstrom, sparse-frame displacement threshold
};

/// Full single-frame text serialization: periodicity sentence (with the
/// lattice basis vectors when periodic), "Symbol<index> x y z" atom lines,
/// then the k-capped neighbor edge table as
/// "atom1_index atom2_index distance(A)" rows. All indices are 1-based;
/// edges are ordered by (src, distance, dst).
std::string encode_3d(const Frame& f, const EncodingConfig& cfg = {});

/// Sparse differential trajectory serialization. Frame 1 carries the full
/// encode_3d body; every later frame lists only atoms displaced by more
/// than delta since the previous frame (strict inequality, raw Cartesian
/// displacement) plus the recomputed edges incident to at least one listed
/// atom.
std::string encode_4d_sparse(const Trajectory& t, const EncodingConfig& cfg = {});

/// Per-frame encode_3d for the whole trajectory, frames separated by a
/// blank line. The uncompressed counterpart of encode_4d_sparse.
std::string encode_full3d(const Trajectory& t, const EncodingConfig& cfg = {});

/// Indices of atoms whose raw displacement from `prev` to `next` exceeds
/// delta.
std::vector<int> atoms_over_threshold(const Frame& prev, const Frame& next,
                                      double delta);

struct TokenStats {
  long whitespace_tokens = 0;  // maximal non-whitespace runs
  long chars = 0;
  long lines = 0;
};

TokenStats token_stats(std::string_view text);

// ---------------------------------------------------------------------------
// Graph-token layout for encoder-fused models.

enum class MarkerKind { graph_start, graph_node, graph_end };

struct Marker {
  MarkerKind kind = MarkerKind::graph_start;
  int frame = 0;
  int atom = -1;  // only set for graph_node
};

/// Raw per-atom feature block appended after the encoder features:
/// [atomic_number (1) | x y z (3) | pbc as 0/1 (3) | cell row-major (9)],
/// 16 values, giving width() = encoder_width + 16.
struct RawFeatureLayout {
  int encoder_width = 512;

  int width() const { return encoder_width + 16; }
  int raw_offset() const { return encoder_width; }
};

struct TokenLayout {
  std::vector<Marker> markers;       // K * (N + 2) entries
  Eigen::MatrixXd feature_rows;      // (K * N) x width
};

using FrameEncoder = std::function<Eigen::MatrixXd(const Frame&)>;

/// Lays out <graph_start> / per-atom <graph> / <graph_end> markers per frame
/// and concatenates encoder rows with the raw feature block. Throws
/// std::invalid_argument when the encoder output shape does not match.
TokenLayout build_token_layout(const Trajectory& t, const FrameEncoder& encoder,
                               const RawFeatureLayout& layout = {});

/// Deterministic stand-in for a pretrained per-atom encoder: features are
/// hashed from the atomic number and the sorted neighbor distances within
/// 2.5 A (quantized to 1e-6 A), so they are invariant under rigid
/// translation and rotation and identical across runs.
Eigen::MatrixXd mock_encoder(const Frame& f, int width);

// ---------------------------------------------------------------------------
// Supervision pairs.

enum class PairMode { text3d, text4d };

struct SupervisionPair {
  std::string id;
  std::string prompt;
  std::string target;
};

std::vector<SupervisionPair> emit_supervision_pairs(
    const std::vector<ReactionRecord>& records, PairMode mode,
    const EncodingConfig& cfg = {});
std::vector<SupervisionPair> emit_supervision_pairs(
    const std::vector<CatalyticRecord>& records, PairMode mode,
    const EncodingConfig& cfg = {});

std::string write_supervision_pairs(const std::vector<SupervisionPair>& pairs);

}  // namespace chemdyn

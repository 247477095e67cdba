#include "chemdyn/text_encoding.hpp"

#include "chemdyn/hashing.hpp"
#include "chemdyn/pbc.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace chemdyn {

namespace {

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  // Normalize the negative-zero spelling.
  std::string_view s(buf);
  if (!s.empty() && s[0] == '-' &&
      s.find_first_not_of("-0.") == std::string_view::npos) {
    return std::string(s.substr(1));
  }
  return std::string(s);
}

void append_lattice_block(std::ostringstream& os, const Frame& f,
                          const EncodingConfig& cfg) {
  os << "The system is periodic. The lattice vectors are as follows:\n";
  static constexpr const char* kAxis[3] = {"x", "y", "z"};
  for (int r = 0; r < 3; ++r) {
    os << kAxis[r];
    for (int c = 0; c < 3; ++c) {
      os << ' ' << format_fixed(f.cell.basis(r, c), cfg.coord_decimals);
    }
    os << "\n";
  }
}

void append_atom_line(std::ostringstream& os, const Frame& f, int i,
                      const EncodingConfig& cfg) {
  os << f.elements[i].symbol() << (i + 1);
  for (int k = 0; k < 3; ++k) {
    os << ' ' << format_fixed(f.positions(i, k), cfg.coord_decimals);
  }
  os << "\n";
}

void append_edge_line(std::ostringstream& os, const NeighborEdge& e,
                      const EncodingConfig& cfg) {
  os << (e.src + 1) << ' ' << (e.dst + 1) << ' '
     << format_fixed(e.distance, cfg.dist_decimals) << "\n";
}

constexpr const char* kAtomHeader = "The atom and its position are as follows:";
constexpr const char* kEdgeHeader = "The distance between atoms is as follows:";
constexpr const char* kEdgeColumns = "atom1_index atom2_index distance(A)";
constexpr const char* kSparseAtomHeader =
    "The atom with big movements are listed as follows:";
constexpr const char* kSparseEdgeHeader = "New edge distances:";

}  // namespace

std::string encode_3d(const Frame& f, const EncodingConfig& cfg) {
  std::ostringstream os;
  if (f.cell.periodic()) {
    append_lattice_block(os, f, cfg);
    os << kAtomHeader << "\n";
  } else {
    os << "The system is non-periodic. " << kAtomHeader << "\n";
  }
  for (int i = 0; i < f.atom_count(); ++i) append_atom_line(os, f, i, cfg);
  os << kEdgeHeader << "\n" << kEdgeColumns << "\n";
  const NeighborGraph graph = build_neighbor_graph(f, cfg.cutoff, cfg.k_cap);
  for (const NeighborEdge& e : graph.edges) append_edge_line(os, e, cfg);
  return os.str();
}

std::vector<int> atoms_over_threshold(const Frame& prev, const Frame& next,
                                      double delta) {
  const Positions d = displacement(prev, next);
  std::vector<int> out;
  for (int i = 0; i < d.rows(); ++i) {
    if (d.row(i).norm() > delta) out.push_back(i);
  }
  return out;
}

std::string encode_4d_sparse(const Trajectory& t, const EncodingConfig& cfg) {
  std::ostringstream os;
  for (int k = 0; k < t.frame_count(); ++k) {
    if (k > 0) os << "\n";
    os << "Frame " << (k + 1) << ":\n";
    const Frame& frame = t.frames[k];
    if (k == 0) {
      os << encode_3d(frame, cfg);
      continue;
    }
    const std::vector<int> moved =
        atoms_over_threshold(t.frames[k - 1], frame, cfg.delta);
    std::vector<bool> is_moved(frame.atom_count(), false);
    for (int i : moved) is_moved[i] = true;

    os << kSparseAtomHeader << "\n";
    for (int i : moved) append_atom_line(os, frame, i, cfg);
    os << kSparseEdgeHeader << "\n" << kEdgeColumns << "\n";
    const NeighborGraph graph =
        build_neighbor_graph(frame, cfg.cutoff, cfg.k_cap);
    for (const NeighborEdge& e : graph.edges) {
      if (is_moved[e.src] || is_moved[e.dst]) append_edge_line(os, e, cfg);
    }
  }
  return os.str();
}

std::string encode_full3d(const Trajectory& t, const EncodingConfig& cfg) {
  std::ostringstream os;
  for (int k = 0; k < t.frame_count(); ++k) {
    if (k > 0) os << "\n";
    os << encode_3d(t.frames[k], cfg);
  }
  return os.str();
}

TokenStats token_stats(std::string_view text) {
  TokenStats stats;
  stats.chars = static_cast<long>(text.size());
  bool in_token = false;
  bool line_has_content = false;
  for (char c : text) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
                    c == '\f' || c == '\v';
    if (!ws && !in_token) ++stats.whitespace_tokens;
    in_token = !ws;
    if (c == '\n') {
      ++stats.lines;
      line_has_content = false;
    } else {
      line_has_content = true;
    }
  }
  if (line_has_content) ++stats.lines;  // unterminated final line
  return stats;
}

TokenLayout build_token_layout(const Trajectory& t, const FrameEncoder& encoder,
                               const RawFeatureLayout& layout) {
  TokenLayout out;
  const int frames = t.frame_count();
  const int n = frames > 0 ? t.frames.front().atom_count() : 0;
  out.markers.reserve(static_cast<std::size_t>(frames) * (n + 2));
  out.feature_rows.resize(static_cast<Eigen::Index>(frames) * n, layout.width());

  for (int k = 0; k < frames; ++k) {
    const Frame& frame = t.frames[k];
    const Eigen::MatrixXd enc = encoder(frame);
    if (enc.rows() != frame.atom_count() || enc.cols() != layout.encoder_width) {
      std::ostringstream msg;
      msg << "encoder returned " << enc.rows() << "x" << enc.cols()
          << ", expected " << frame.atom_count() << "x" << layout.encoder_width;
      throw std::invalid_argument(msg.str());
    }
    out.markers.push_back({MarkerKind::graph_start, k, -1});
    for (int i = 0; i < frame.atom_count(); ++i) {
      out.markers.push_back({MarkerKind::graph_node, k, i});
      const Eigen::Index row = static_cast<Eigen::Index>(k) * n + i;
      out.feature_rows.block(row, 0, 1, layout.encoder_width) = enc.row(i);
      Eigen::Index col = layout.raw_offset();
      out.feature_rows(row, col++) =
          static_cast<double>(frame.elements[i].atomic_number);
      for (int a = 0; a < 3; ++a) {
        out.feature_rows(row, col++) = frame.positions(i, a);
      }
      for (int a = 0; a < 3; ++a) {
        out.feature_rows(row, col++) = frame.cell.pbc[a] ? 1.0 : 0.0;
      }
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          out.feature_rows(row, col++) = frame.cell.basis(r, c);
        }
      }
    }
    out.markers.push_back({MarkerKind::graph_end, k, -1});
  }
  return out;
}

Eigen::MatrixXd mock_encoder(const Frame& f, int width) {
  if (width < 1) throw std::invalid_argument("mock_encoder width must be >= 1");
  const int n = f.atom_count();
  Eigen::MatrixXd out(n, width);

  const NeighborGraph graph =
      build_neighbor_graph(f, 2.5, std::max(1, n * 32));
  std::vector<std::vector<double>> dists(n);
  for (const NeighborEdge& e : graph.edges) dists[e.src].push_back(e.distance);

  for (int i = 0; i < n; ++i) {
    std::sort(dists[i].begin(), dists[i].end());
    std::uint64_t h = mix64(0x6d6f636b656e63ULL);
    h = hash_combine(h, static_cast<std::uint64_t>(f.elements[i].atomic_number));
    for (double d : dists[i]) {
      h = hash_combine(
          h, static_cast<std::uint64_t>(std::llround(d * 1e6)));
    }
    for (int w = 0; w < width; ++w) {
      out(i, w) = hash_to_unit(hash_combine(h, static_cast<std::uint64_t>(w)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kGasInstruction =
    "Given the reactant and transition state geometries, predict the product "
    "SMILES, reaction barrier and reaction enthalpy. The geometry is as "
    "follows:";
constexpr const char* kCatalyticInstruction =
    "Given the catalytic reaction trajectory, predict the reaction type, the "
    "adsorbate and product SMILES, the transition state step, the reaction "
    "barrier and the reaction enthalpy. The geometry is as follows:";

std::string encode_body(const Trajectory& t, PairMode mode,
                        const EncodingConfig& cfg) {
  return mode == PairMode::text4d ? encode_4d_sparse(t, cfg)
                                  : encode_full3d(t, cfg);
}

std::string format_energy(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

}  // namespace

std::vector<SupervisionPair> emit_supervision_pairs(
    const std::vector<ReactionRecord>& records, PairMode mode,
    const EncodingConfig& cfg) {
  std::vector<SupervisionPair> out;
  out.reserve(records.size());
  for (const ReactionRecord& rec : records) {
    Trajectory pair_traj;
    pair_traj.frames = {rec.reactant, rec.transition_state};
    SupervisionPair sp;
    sp.id = rec.id;
    sp.prompt =
        std::string(kGasInstruction) + "\n" + encode_body(pair_traj, mode, cfg);
    sp.target = "Product: " + rec.product_smiles + "\n" +
                "Barrier: " + format_energy(rec.barrier_ev) + " eV\n" +
                "Enthalpy: " + format_energy(rec.enthalpy_ev) + " eV";
    out.push_back(std::move(sp));
  }
  return out;
}

std::vector<SupervisionPair> emit_supervision_pairs(
    const std::vector<CatalyticRecord>& records, PairMode mode,
    const EncodingConfig& cfg) {
  std::vector<SupervisionPair> out;
  out.reserve(records.size());
  for (const CatalyticRecord& rec : records) {
    SupervisionPair sp;
    sp.id = rec.id;
    sp.prompt = std::string(kCatalyticInstruction) + "\n" +
                encode_body(rec.trajectory, mode, cfg);
    // The TS step is written 1-based, matching the "Frame k:" headers.
    sp.target = std::string("Type: ") + to_string(rec.reaction_type) + "\n" +
                "Adsorbate: " + rec.adsorbate_smiles + "\n" +
                "Product: " + rec.product_smiles + "\n" +
                "TS step: " + std::to_string(rec.ts_step + 1) + "\n" +
                "Barrier: " + format_energy(rec.barrier_ev) + " eV\n" +
                "Enthalpy: " + format_energy(rec.enthalpy_ev) + " eV";
    out.push_back(std::move(sp));
  }
  return out;
}

std::string write_supervision_pairs(const std::vector<SupervisionPair>& pairs) {
  std::ostringstream os;
  for (const SupervisionPair& p : pairs) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["prompt"] = p.prompt;
    j["target"] = p.target;
    os << j.dump() << "\n";
  }
  return os.str();
}

}  // namespace chemdyn

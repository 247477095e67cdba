#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chemdyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
// One row per atom, angstrom.
using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// A chemical element. Symbol and atomic number map bijectively over
/// Z = 1..118.
struct Element {
  int atomic_number = 0;

  const char* symbol() const;
  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

std::optional<Element> element_from_symbol(std::string_view symbol);
bool element_known(int atomic_number);

/// Periodic cell. Rows of `basis` are the lattice vectors a, b, c in
/// angstrom; `pbc` flags one direction each. A direction flagged periodic
/// must have a basis row of nonzero norm; a fully non-periodic cell may be
/// all zeros.
struct Cell {
  Mat3 basis = Mat3::Zero();
  std::array<bool, 3> pbc{false, false, false};

  bool periodic() const { return pbc[0] || pbc[1] || pbc[2]; }
  bool operator==(const Cell& o) const {
    return basis == o.basis && pbc == o.pbc;
  }
};

/// One snapshot: N atoms with Cartesian coordinates (angstrom), an optional
/// per-frame energy in eV, and the periodic cell.
struct Frame {
  std::vector<Element> elements;
  Positions positions;
  Cell cell;
  std::optional<double> energy;

  int atom_count() const { return static_cast<int>(elements.size()); }
};

/// Time-ordered frames over a fixed atom set.
struct Trajectory {
  std::vector<Frame> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

/// Energies (eV) along a reaction coordinate, one per image.
struct EnergyProfile {
  std::vector<double> energies;

  int size() const { return static_cast<int>(energies.size()); }
};

enum class ReactionType { transfer, dissociation, desorption };

const char* to_string(ReactionType t);
std::optional<ReactionType> reaction_type_from_string(std::string_view s);

/// Gas-phase benchmark row: reactant/TS/product geometries plus labels.
struct ReactionRecord {
  std::string id;
  Frame reactant;
  Frame transition_state;
  Frame product;
  std::string reactant_smiles;
  std::string product_smiles;
  double barrier_ev = 0.0;   // deltaE‡, >= 0
  double enthalpy_ev = 0.0;  // deltaH
};

/// Catalytic benchmark row: a K-frame slab+adsorbate trajectory with its
/// energy profile and labels.
struct CatalyticRecord {
  std::string id;
  Trajectory trajectory;
  EnergyProfile profile;
  ReactionType reaction_type = ReactionType::transfer;
  std::string adsorbate_smiles;
  std::string product_smiles;
  int ts_step = 0;  // 0-based index into the trajectory
  double barrier_ev = 0.0;
  double enthalpy_ev = 0.0;
};

struct ValidateOptions {
  // Flag single-step displacements larger than half the shortest periodic
  // cell vector; unwrapped trajectories should never produce them.
  bool warn_wrap_jumps = true;
};

/// Collects every violated invariant as a human-readable description.
/// Empty result means the trajectory is valid. Never throws on finite input.
std::vector<std::string> validate_trajectory(const Trajectory& t,
                                             const ValidateOptions& opts = {});

std::vector<std::string> validate_frame(const Frame& f);
std::vector<std::string> validate_reaction_record(const ReactionRecord& r);
std::vector<std::string> validate_catalytic_record(const CatalyticRecord& r);

/// Per-atom raw Cartesian displacement b - a (angstrom). No periodic
/// wrapping: trajectories are assumed unwrapped, so a raw difference is the
/// physical motion. Throws std::invalid_argument on mismatched atom sets.
Positions displacement(const Frame& a, const Frame& b);

}  // namespace chemdyn

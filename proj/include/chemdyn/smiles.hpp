#pragma once

#include "chemdyn/core.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chemdyn {

enum class BondOrder { single, double_bond, triple, aromatic };

double bond_order_value(BondOrder order);  // aromatic counts 1.5

struct SmilesAtom {
  Element element;
  int formal_charge = 0;
  int hydrogens = 0;  // resolved total H (implicit fill for bare atoms)
  bool aromatic = false;
};

struct SmilesBond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::single;
};

/// Attributed molecular graph parsed from SMILES. `ring_membership` marks
/// atoms on at least one cycle; `adjacency[i]` lists (neighbor, bond index).
struct MoleculeGraph {
  std::vector<SmilesAtom> atoms;
  std::vector<SmilesBond> bonds;
  std::vector<bool> ring_membership;
  std::vector<std::vector<std::pair<int, int>>> adjacency;

  int atom_count() const { return static_cast<int>(atoms.size()); }
  int degree(int atom) const { return static_cast<int>(adjacency[atom].size()); }
};

struct SmilesError : std::runtime_error {
  SmilesError(std::size_t offset_, const std::string& message)
      : std::runtime_error("offset " + std::to_string(offset_) + ": " + message),
        offset(offset_) {}
  std::size_t offset;
};

/// Parses the supported SMILES subset: organic-subset bare atoms, bracket
/// atoms with charge and H-count, aromatic lowercase b/c/n/o/p/s, bonds
/// - = # :, branches, ring closures (digits and %nn), and dot-separated
/// components. Stereo markers and isotopes are accepted and dropped with a
/// note in `diagnostics`. Throws SmilesError with a character offset.
MoleculeGraph parse_smiles(std::string_view s,
                           std::vector<std::string>* diagnostics = nullptr);

/// Per-atom valence checks: bond-order sum (aromatic 1.5, rounded half-up)
/// plus hydrogens must hit an allowed valence (B 3, C 4, N 3, O 2, P 3/5,
/// S 2/4/6, halogens 1, H 1); a nonzero formal charge on N or O shifts the
/// allowed value by the charge's sign. Returns one description per
/// violating atom.
std::vector<std::string> check_valence(const MoleculeGraph& g);

/// Canonical SMILES via iterative invariant refinement. Permutation
/// invariant and idempotent. Aromatic and Kekule notations canonicalize
/// within their own bond-type representation; no aromaticity perception is
/// attempted.
std::string canonicalize(const MoleculeGraph& g);

/// parse + canonicalize in one step.
std::string canonical_smiles(std::string_view s);

/// Ring systems plus linkers: non-ring atoms of degree <= 1 are deleted
/// iteratively; pruned neighbors are re-saturated with hydrogens. A molecule
/// with no rings yields the acyclic sentinel (empty smiles, acyclic=true).
struct Scaffold {
  bool acyclic = true;
  std::string smiles;  // canonical; empty when acyclic

  friend bool operator==(const Scaffold&, const Scaffold&) = default;
};

Scaffold extract_scaffold(const MoleculeGraph& g);

/// Splits a graph into connected components (each with atoms reindexed).
std::vector<MoleculeGraph> connected_components(const MoleculeGraph& g);

}  // namespace chemdyn

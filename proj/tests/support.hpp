#pragma once

// Shared test helpers: deterministic random generators and the independent
// oracles the suites compare against. Everything here is test-only and kept
// separate from the library implementation paths it checks.

#include "chemdyn/core.hpp"
#include "chemdyn/pbc.hpp"
#include "chemdyn/smiles.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace chemdyn::testing {

// ---------------------------------------------------------------------------
// Random geometry.

inline Frame random_frame(std::mt19937_64& rng, int max_atoms = 12) {
  std::uniform_int_distribution<int> natoms_dist(1, max_atoms);
  std::uniform_real_distribution<double> len_dist(2.5, 8.0);
  std::uniform_int_distribution<int> pbc_dist(0, 1);
  std::uniform_int_distribution<int> elem_dist(0, 3);

  static const int kElems[4] = {1, 6, 8, 29};
  Frame f;
  const int n = natoms_dist(rng);
  f.cell.basis.setZero();
  bool any_pbc = false;
  std::array<double, 3> lengths{};
  for (int d = 0; d < 3; ++d) {
    lengths[d] = len_dist(rng);
    f.cell.pbc[d] = pbc_dist(rng) == 1;
    any_pbc = any_pbc || f.cell.pbc[d];
  }
  if (any_pbc) {
    for (int d = 0; d < 3; ++d) f.cell.basis(d, d) = lengths[d];
  }
  f.elements.reserve(n);
  f.positions.resize(n, 3);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    f.elements.push_back(Element{kElems[elem_dist(rng)]});
    for (int d = 0; d < 3; ++d) {
      f.positions(i, d) = coord(rng) * lengths[d];
    }
  }
  return f;
}

inline Trajectory random_trajectory(std::mt19937_64& rng, int max_atoms = 8,
                                    int max_frames = 5) {
  Trajectory t;
  Frame base = random_frame(rng, max_atoms);
  std::uniform_int_distribution<int> frames_dist(1, max_frames);
  std::uniform_real_distribution<double> step(-0.3, 0.3);
  const int frames = frames_dist(rng);
  t.frames.push_back(base);
  for (int k = 1; k < frames; ++k) {
    Frame next = t.frames.back();
    for (int i = 0; i < next.positions.rows(); ++i) {
      for (int d = 0; d < 3; ++d) next.positions(i, d) += step(rng);
    }
    t.frames.push_back(std::move(next));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Brute-force neighbor oracle: exhaustive enumeration over a generous image
// range, independent of tiling_extent.

inline NeighborGraph neighbor_oracle(const Frame& f, double cutoff, int k_cap,
                                     int image_range = 3) {
  struct Cand {
    double dist2;
    int dst;
    std::array<int, 3> shift;
  };
  NeighborGraph graph;
  graph.cutoff = cutoff;
  graph.k_cap = k_cap;
  const int n = f.atom_count();
  const int ra = f.cell.pbc[0] ? image_range : 0;
  const int rb = f.cell.pbc[1] ? image_range : 0;
  const int rc = f.cell.pbc[2] ? image_range : 0;
  for (int i = 0; i < n; ++i) {
    std::vector<Cand> cands;
    for (int j = 0; j < n; ++j) {
      const Vec3 base =
          f.positions.row(j).transpose() - f.positions.row(i).transpose();
      for (int na = -ra; na <= ra; ++na) {
        for (int nb = -rb; nb <= rb; ++nb) {
          for (int nc = -rc; nc <= rc; ++nc) {
            if (i == j && na == 0 && nb == 0 && nc == 0) continue;
            const Vec3 shift = na * f.cell.basis.row(0).transpose() +
                               nb * f.cell.basis.row(1).transpose() +
                               nc * f.cell.basis.row(2).transpose();
            const double d2 = (base + shift).squaredNorm();
            if (d2 > 0.0 && d2 <= cutoff * cutoff) {
              cands.push_back({d2, j, {na, nb, nc}});
            }
          }
        }
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
      if (a.dst != b.dst) return a.dst < b.dst;
      return a.shift < b.shift;
    });
    for (int k = 0; k < std::min<int>(k_cap, cands.size()); ++k) {
      graph.edges.push_back({i, cands[k].dst, std::sqrt(cands[k].dist2)});
    }
  }
  return graph;
}

inline bool graphs_equal(const NeighborGraph& a, const NeighborGraph& b) {
  if (a.edges.size() != b.edges.size()) return false;
  for (std::size_t k = 0; k < a.edges.size(); ++k) {
    if (a.edges[k].src != b.edges[k].src || a.edges[k].dst != b.edges[k].dst ||
        a.edges[k].distance != b.edges[k].distance) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Random molecules and random SMILES rewrites.

inline MoleculeGraph random_molecule(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> natoms_dist(2, 10);
  std::uniform_int_distribution<int> elem_dist(0, 5);
  std::uniform_int_distribution<int> order_dist(0, 9);
  std::uniform_int_distribution<int> h_dist(0, 3);
  std::uniform_int_distribution<int> charge_dist(0, 9);

  static const int kElems[6] = {6, 6, 6, 7, 8, 16};
  MoleculeGraph g;
  const int n = natoms_dist(rng);
  for (int i = 0; i < n; ++i) {
    SmilesAtom a;
    a.element = Element{kElems[elem_dist(rng)]};
    a.aromatic = order_dist(rng) == 0 && a.element.atomic_number != 16;
    a.hydrogens = h_dist(rng);
    const int c = charge_dist(rng);
    a.formal_charge = c == 0 ? 1 : (c == 1 ? -1 : 0);
    g.atoms.push_back(a);
  }
  auto order_of = [&](int code) {
    if (code < 6) return BondOrder::single;
    if (code < 8) return BondOrder::double_bond;
    if (code < 9) return BondOrder::triple;
    return BondOrder::aromatic;
  };
  std::set<std::pair<int, int>> used;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent_dist(0, i - 1);
    const int p = parent_dist(rng);
    g.bonds.push_back({p, i, order_of(order_dist(rng))});
    used.insert({p, i});
  }
  std::uniform_int_distribution<int> extra_dist(0, 2);
  const int extras = extra_dist(rng);
  for (int e = 0; e < extras && n > 2; ++e) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (used.count({a, b})) continue;
    used.insert({a, b});
    g.bonds.push_back({a, b, order_of(order_dist(rng))});
  }
  g.adjacency.assign(n, {});
  for (std::size_t k = 0; k < g.bonds.size(); ++k) {
    g.adjacency[g.bonds[k].a].emplace_back(g.bonds[k].b, static_cast<int>(k));
    g.adjacency[g.bonds[k].b].emplace_back(g.bonds[k].a, static_cast<int>(k));
  }
  // Ring flags are recomputed by parse on the rewrite path, so a blunt
  // derivation is fine here.
  g.ring_membership.assign(n, false);
  return g;
}

// Writes an arbitrary SMILES spelling of `g` with every atom bracketed and
// every bond explicit, starting from a random atom with shuffled branches.
inline std::string random_smiles_rewrite(const MoleculeGraph& g,
                                         std::mt19937_64& rng) {
  const int n = g.atom_count();
  std::vector<bool> visited(n, false);
  std::set<int> closure_bonds;
  struct Closure {
    int digit;
    int bond;
  };
  std::vector<std::vector<Closure>> digits(n);
  int next_digit = 1;

  auto bond_text = [&](BondOrder o) {
    switch (o) {
      case BondOrder::single: return "-";
      case BondOrder::double_bond: return "=";
      case BondOrder::triple: return "#";
      case BondOrder::aromatic: return ":";
    }
    return "-";
  };
  auto atom_text = [&](int i) {
    const SmilesAtom& a = g.atoms[i];
    std::string sym = a.element.symbol();
    if (a.aromatic) {
      for (char& ch : sym) ch = static_cast<char>(std::tolower(ch));
    }
    std::string out = "[" + sym;
    if (a.hydrogens == 1) out += "H";
    if (a.hydrogens > 1) out += "H" + std::to_string(a.hydrogens);
    if (a.formal_charge > 0) {
      out += "+";
      if (a.formal_charge > 1) out += std::to_string(a.formal_charge);
    }
    if (a.formal_charge < 0) {
      out += "-";
      if (a.formal_charge < -1) out += std::to_string(-a.formal_charge);
    }
    out += "]";
    for (const Closure& c : digits[i]) {
      // Both endpoints spell the closure bond; the parser checks they agree.
      out += bond_text(g.bonds[c.bond].order);
      out += c.digit < 10 ? std::to_string(c.digit)
                          : "%" + std::to_string(c.digit);
    }
    return out;
  };

  // First pass: discover closure bonds with the same shuffled order used for
  // emission, so digits can be attached to both endpoints up front.
  std::vector<std::vector<std::pair<int, int>>> shuffled(n);
  for (int i = 0; i < n; ++i) {
    shuffled[i] = g.adjacency[i];
    std::shuffle(shuffled[i].begin(), shuffled[i].end(), rng);
  }
  // Component roots in a random order.
  std::vector<int> atom_order(n);
  for (int i = 0; i < n; ++i) atom_order[i] = i;
  std::shuffle(atom_order.begin(), atom_order.end(), rng);
  std::vector<int> roots;
  for (int start : atom_order) {
    if (visited[start]) continue;
    roots.push_back(start);
    struct Item {
      int atom;
      int parent_bond;
      std::size_t next = 0;
    };
    std::vector<Item> stack{{start, -1, 0}};
    visited[start] = true;
    while (!stack.empty()) {
      Item& top = stack.back();
      if (top.next >= shuffled[top.atom].size()) {
        stack.pop_back();
        continue;
      }
      const auto [nbr, bidx] = shuffled[top.atom][top.next++];
      if (bidx == top.parent_bond || closure_bonds.count(bidx)) continue;
      if (visited[nbr]) {
        closure_bonds.insert(bidx);
        digits[nbr].push_back({next_digit, bidx});
        digits[top.atom].push_back({next_digit, bidx});
        ++next_digit;
      } else {
        visited[nbr] = true;
        stack.push_back({nbr, bidx, 0});
      }
    }
  }

  // Second pass: emit every component, dot-joined.
  std::fill(visited.begin(), visited.end(), false);
  std::string out;
  struct EmitItem {
    int atom;
    int bond;
    bool paren;
  };
  for (std::size_t r = 0; r < roots.size(); ++r) {
    if (r) out += '.';
    std::vector<EmitItem> stack{{roots[r], -1, false}};
    visited[roots[r]] = true;
    while (!stack.empty()) {
      const EmitItem item = stack.back();
      stack.pop_back();
      if (item.atom < 0) {
        out += ')';
        continue;
      }
      if (item.bond >= 0) {
        if (item.paren) out += '(';
        out += bond_text(g.bonds[item.bond].order);
      }
      out += atom_text(item.atom);
      std::vector<std::pair<int, int>> kids;
      for (const auto& [nbr, bidx] : shuffled[item.atom]) {
        if (bidx == item.bond || closure_bonds.count(bidx) || visited[nbr]) {
          continue;
        }
        visited[nbr] = true;
        kids.emplace_back(nbr, bidx);
      }
      for (std::size_t k = kids.size(); k-- > 0;) {
        const bool paren = k + 1 < kids.size();
        if (paren) stack.push_back({-1, -1, false});
        stack.push_back({kids[k].first, kids[k].second, paren});
      }
    }
  }
  return out;
}

inline const std::vector<std::string>& fixture_smiles() {
  static const std::vector<std::string> list = {
      "CCO",
      "OCC",
      "C",
      "O",
      "N",
      "C1CC1",
      "C1CCCCC1",
      "c1ccccc1",
      "C1=CC=CC=C1",
      "CC(C)C(=O)O",
      "CC(=O)Oc1ccccc1C(=O)O",
      "[NH4+]",
      "[OH-]",
      "N#Cc1ccccc1",
      "CCC1CCCCC1",
      "CC(C)(C)c1ccc(O)cc1",
      "C(F)(F)F",
      "ClCCl",
      "BrCBr",
      "S=C=S",
      "ICI",
      "O=C=O",
      "CCOC(=O)C",
      "c1ccc2ccccc2c1",
      "CN1CCC1",
      "CC.OO",
  };
  return list;
}

}  // namespace chemdyn::testing

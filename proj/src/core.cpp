#include "chemdyn/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace chemdyn {

namespace {

constexpr int kMaxZ = 118;

constexpr const char* kSymbols[kMaxZ + 1] = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U",  "Np", "Pu", "Am",
    "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh",
    "Hs", "Mt", "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og"};

const std::unordered_map<std::string_view, int>& symbol_table() {
  static const std::unordered_map<std::string_view, int> table = [] {
    std::unordered_map<std::string_view, int> t;
    for (int z = 1; z <= kMaxZ; ++z) t.emplace(kSymbols[z], z);
    return t;
  }();
  return table;
}

}  // namespace

const char* Element::symbol() const {
  if (atomic_number < 1 || atomic_number > kMaxZ) return "?";
  return kSymbols[atomic_number];
}

std::optional<Element> element_from_symbol(std::string_view symbol) {
  auto it = symbol_table().find(symbol);
  if (it == symbol_table().end()) return std::nullopt;
  return Element{it->second};
}

bool element_known(int atomic_number) {
  return atomic_number >= 1 && atomic_number <= kMaxZ;
}

const char* to_string(ReactionType t) {
  switch (t) {
    case ReactionType::transfer: return "transfer";
    case ReactionType::dissociation: return "dissociation";
    case ReactionType::desorption: return "desorption";
  }
  return "?";
}

std::optional<ReactionType> reaction_type_from_string(std::string_view s) {
  if (s == "transfer") return ReactionType::transfer;
  if (s == "dissociation") return ReactionType::dissociation;
  if (s == "desorption") return ReactionType::desorption;
  return std::nullopt;
}

std::vector<std::string> validate_frame(const Frame& f) {
  std::vector<std::string> out;
  const int n = f.atom_count();
  if (n < 1) out.push_back("frame has no atoms");
  if (f.positions.rows() != n) {
    std::ostringstream os;
    os << "frame has " << n << " elements but " << f.positions.rows()
       << " position rows";
    out.push_back(os.str());
  }
  const int rows = static_cast<int>(f.positions.rows());
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < 3; ++k) {
      if (!std::isfinite(f.positions(i, k))) {
        std::ostringstream os;
        os << "atom " << i << " has non-finite coordinate (axis " << k << ")";
        out.push_back(os.str());
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!element_known(f.elements[i].atomic_number)) {
      std::ostringstream os;
      os << "atom " << i << " has unknown atomic number "
         << f.elements[i].atomic_number;
      out.push_back(os.str());
    }
  }
  for (int d = 0; d < 3; ++d) {
    if (f.cell.pbc[d] && f.cell.basis.row(d).norm() == 0.0) {
      std::ostringstream os;
      os << "periodic direction " << d << " has zero basis vector";
      out.push_back(os.str());
    }
  }
  if (f.energy && !std::isfinite(*f.energy)) {
    out.push_back("frame energy is non-finite");
  }
  return out;
}

std::vector<std::string> validate_trajectory(const Trajectory& t,
                                             const ValidateOptions& opts) {
  std::vector<std::string> out;
  if (t.frames.empty()) {
    out.push_back("trajectory has no frames");
    return out;
  }
  for (std::size_t k = 0; k < t.frames.size(); ++k) {
    for (const auto& v : validate_frame(t.frames[k])) {
      std::ostringstream os;
      os << "frame " << k << ": " << v;
      out.push_back(os.str());
    }
  }
  const Frame& first = t.frames.front();
  for (std::size_t k = 1; k < t.frames.size(); ++k) {
    if (t.frames[k].elements != first.elements) {
      std::ostringstream os;
      os << "frame " << k << " has a different element list than frame 0";
      out.push_back(os.str());
    }
    if (t.frames[k].cell.pbc != first.cell.pbc) {
      std::ostringstream os;
      os << "frame " << k << " has different pbc flags than frame 0";
      out.push_back(os.str());
    }
  }

  if (opts.warn_wrap_jumps && first.cell.periodic()) {
    double shortest = std::numeric_limits<double>::infinity();
    for (int d = 0; d < 3; ++d) {
      if (first.cell.pbc[d]) {
        shortest = std::min(shortest, first.cell.basis.row(d).norm());
      }
    }
    for (std::size_t k = 1; k < t.frames.size(); ++k) {
      const Frame& a = t.frames[k - 1];
      const Frame& b = t.frames[k];
      if (a.elements != b.elements || a.positions.rows() != b.positions.rows())
        continue;
      for (int i = 0; i < a.positions.rows(); ++i) {
        const double step = (b.positions.row(i) - a.positions.row(i)).norm();
        if (step > 0.5 * shortest) {
          std::ostringstream os;
          os << "warning: frame " << k << " atom " << i << " moved " << step
             << " A in one step, more than half the shortest periodic cell "
                "vector; the trajectory may be wrapped";
          out.push_back(os.str());
        }
      }
    }
  }
  return out;
}

std::vector<std::string> validate_reaction_record(const ReactionRecord& r) {
  std::vector<std::string> out;
  for (const auto& [name, frame] :
       {std::pair<const char*, const Frame*>{"reactant", &r.reactant},
        {"transition_state", &r.transition_state},
        {"product", &r.product}}) {
    for (const auto& v : validate_frame(*frame)) {
      out.push_back(std::string(name) + ": " + v);
    }
  }
  if (r.reactant.elements != r.transition_state.elements ||
      r.reactant.elements != r.product.elements) {
    out.push_back("reactant, transition state and product atom sets differ");
  }
  constexpr double kTol = 1e-6;
  if (r.barrier_ev < -kTol) out.push_back("barrier is negative");
  if (r.barrier_ev < r.enthalpy_ev - kTol) {
    out.push_back("barrier is below enthalpy; the TS must be the path maximum");
  }
  return out;
}

std::vector<std::string> validate_catalytic_record(const CatalyticRecord& r) {
  std::vector<std::string> out = validate_trajectory(r.trajectory);
  const int k = r.trajectory.frame_count();
  if (r.ts_step < 0 || r.ts_step >= k) {
    std::ostringstream os;
    os << "ts_step " << r.ts_step << " out of range [0, " << k << ")";
    out.push_back(os.str());
  }
  if (r.profile.size() != k) {
    std::ostringstream os;
    os << "profile length " << r.profile.size() << " does not match "
       << k << " frames";
    out.push_back(os.str());
  }
  for (double e : r.profile.energies) {
    if (!std::isfinite(e)) {
      out.push_back("profile contains a non-finite energy");
      break;
    }
  }
  constexpr double kTol = 1e-6;
  if (r.profile.size() == k && k > 0 && r.ts_step >= 0 && r.ts_step < k) {
    const double barrier =
        r.profile.energies[r.ts_step] - r.profile.energies.front();
    if (std::abs(barrier - r.barrier_ev) > kTol) {
      out.push_back("barrier_ev does not equal profile[ts_step] - profile[0]");
    }
    const double enthalpy =
        r.profile.energies.back() - r.profile.energies.front();
    if (std::abs(enthalpy - r.enthalpy_ev) > kTol) {
      out.push_back("enthalpy_ev does not equal profile[K-1] - profile[0]");
    }
  }
  return out;
}

Positions displacement(const Frame& a, const Frame& b) {
  if (a.elements != b.elements) {
    throw std::invalid_argument("displacement: frames have different atom sets");
  }
  if (a.positions.rows() != b.positions.rows()) {
    throw std::invalid_argument("displacement: position row counts differ");
  }
  return b.positions - a.positions;
}

}  // namespace chemdyn

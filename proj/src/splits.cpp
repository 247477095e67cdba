#include "chemdyn/splits.hpp"

#include "chemdyn/hashing.hpp"
#include "chemdyn/smiles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace chemdyn {

namespace {

constexpr const char* kAcyclicKey = "<acyclic>";

}  // namespace

const char* to_string(SplitLabel label) {
  switch (label) {
    case SplitLabel::train: return "train";
    case SplitLabel::id_test: return "id_test";
    case SplitLabel::ood_reactants: return "ood_reactants";
    case SplitLabel::ood_products: return "ood_products";
    case SplitLabel::ood_both: return "ood_both";
  }
  return "?";
}

std::optional<SplitLabel> split_label_from_string(std::string_view s) {
  if (s == "train") return SplitLabel::train;
  if (s == "id_test") return SplitLabel::id_test;
  if (s == "ood_reactants") return SplitLabel::ood_reactants;
  if (s == "ood_products") return SplitLabel::ood_products;
  if (s == "ood_both") return SplitLabel::ood_both;
  return std::nullopt;
}

std::string scaffold_key(std::string_view smiles) {
  const MoleculeGraph g = parse_smiles(smiles);
  auto components = connected_components(g);
  // Largest component by atom count; ties by canonical-string order.
  const MoleculeGraph* best = nullptr;
  std::string best_canonical;
  for (const auto& comp : components) {
    std::string canonical = canonicalize(comp);
    if (!best || comp.atom_count() > best->atom_count() ||
        (comp.atom_count() == best->atom_count() &&
         canonical < best_canonical)) {
      best = &comp;
      best_canonical = std::move(canonical);
    }
  }
  const Scaffold scaffold = extract_scaffold(*best);
  return scaffold.acyclic ? kAcyclicKey : scaffold.smiles;
}

namespace {

struct RecordScaffolds {
  std::string id;
  std::string reactant;
  std::string product;
};

std::vector<RecordScaffolds> collect_scaffolds(
    const std::vector<GasRecordRow>& records) {
  std::vector<RecordScaffolds> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    RecordScaffolds rs;
    rs.id = rec.id;
    try {
      rs.reactant = scaffold_key(rec.reactant_smiles);
    } catch (const SmilesError& e) {
      throw std::runtime_error("record " + rec.id +
                               ": reactant SMILES does not parse (" + e.what() +
                               ")");
    }
    try {
      rs.product = scaffold_key(rec.product_smiles);
    } catch (const SmilesError& e) {
      throw std::runtime_error("record " + rec.id +
                               ": product SMILES does not parse (" + e.what() +
                               ")");
    }
    out.push_back(std::move(rs));
  }
  return out;
}

SplitAssignment split_impl(const std::vector<RecordScaffolds>& scaffolds,
                           double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0) || !(holdout_fraction < 1.0)) {
    throw std::invalid_argument("holdout_fraction must be in (0, 1)");
  }

  std::set<std::string> universe;
  for (const auto& rs : scaffolds) {
    universe.insert(rs.reactant);
    universe.insert(rs.product);
  }
  std::vector<std::string> shuffled(universe.begin(), universe.end());
  {
    std::mt19937_64 rng(seed);
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      const std::size_t j = rng() % i;
      std::swap(shuffled[i - 1], shuffled[j]);
    }
  }
  const auto n_holdout = static_cast<std::size_t>(
      std::llround(holdout_fraction * static_cast<double>(shuffled.size())));
  std::unordered_set<std::string> held(
      shuffled.begin(), shuffled.begin() + std::min(n_holdout, shuffled.size()));

  SplitAssignment assignment;
  assignment.holdout_fraction = holdout_fraction;
  assignment.seed = seed;
  assignment.held_out_scaffolds.assign(held.begin(), held.end());
  std::sort(assignment.held_out_scaffolds.begin(),
            assignment.held_out_scaffolds.end());

  for (const auto& rs : scaffolds) {
    const bool r_held = held.count(rs.reactant) > 0;
    const bool p_held = held.count(rs.product) > 0;
    SplitLabel label;
    if (r_held && p_held) {
      label = SplitLabel::ood_both;
    } else if (r_held) {
      label = SplitLabel::ood_reactants;
    } else if (p_held) {
      label = SplitLabel::ood_products;
    } else {
      // Seen-seen records: 90/10 train vs id_test by seeded id hash.
      const std::uint64_t h = hash_combine(hash_string(rs.id), seed);
      label = (h % 10 == 0) ? SplitLabel::id_test : SplitLabel::train;
    }
    assignment.labels.emplace_back(rs.id, label);
  }
  return assignment;
}

}  // namespace

SplitAssignment scaffold_split(const std::vector<GasRecordRow>& records,
                               double holdout_fraction, std::uint64_t seed) {
  return split_impl(collect_scaffolds(records), holdout_fraction, seed);
}

SplitAssignment scaffold_split(const std::vector<ReactionRecord>& records,
                               double holdout_fraction, std::uint64_t seed) {
  std::vector<GasRecordRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    GasRecordRow row;
    row.id = r.id;
    row.reactant_smiles = r.reactant_smiles;
    row.product_smiles = r.product_smiles;
    rows.push_back(std::move(row));
  }
  return scaffold_split(rows, holdout_fraction, seed);
}

std::vector<std::string> verify_split(const std::vector<GasRecordRow>& records,
                                      const SplitAssignment& assignment) {
  std::vector<std::string> out;
  const auto scaffolds = collect_scaffolds(records);
  std::unordered_map<std::string, const RecordScaffolds*> by_id;
  for (const auto& rs : scaffolds) by_id.emplace(rs.id, &rs);
  const std::unordered_set<std::string> held(
      assignment.held_out_scaffolds.begin(),
      assignment.held_out_scaffolds.end());

  std::unordered_set<std::string> labeled;
  for (const auto& [id, label] : assignment.labels) {
    if (!by_id.count(id)) {
      out.push_back("label for unknown record '" + id + "'");
      continue;
    }
    if (!labeled.insert(id).second) {
      out.push_back("record '" + id + "' labeled more than once");
      continue;
    }
    const RecordScaffolds& rs = *by_id[id];
    const bool r_held = held.count(rs.reactant) > 0;
    const bool p_held = held.count(rs.product) > 0;
    switch (label) {
      case SplitLabel::train:
      case SplitLabel::id_test:
        if (r_held || p_held) {
          out.push_back("record '" + id +
                        "' is labeled " + to_string(label) +
                        " but touches a held-out scaffold");
        }
        break;
      case SplitLabel::ood_reactants:
        if (!(r_held && !p_held)) {
          out.push_back("record '" + id +
                        "' is labeled ood_reactants but its held-out pattern "
                        "does not match");
        }
        break;
      case SplitLabel::ood_products:
        if (!(p_held && !r_held)) {
          out.push_back("record '" + id +
                        "' is labeled ood_products but its held-out pattern "
                        "does not match");
        }
        break;
      case SplitLabel::ood_both:
        if (!(r_held && p_held)) {
          out.push_back("record '" + id +
                        "' is labeled ood_both but its held-out pattern does "
                        "not match");
        }
        break;
    }
  }
  for (const auto& rs : scaffolds) {
    if (!labeled.count(rs.id)) {
      out.push_back("record '" + rs.id + "' has no label");
    }
  }
  return out;
}

std::string write_assignment(const SplitAssignment& assignment) {
  std::ostringstream os;
  for (const auto& [id, label] : assignment.labels) {
    os << id << ' ' << to_string(label) << "\n";
  }
  return os.str();
}

}  // namespace chemdyn

#pragma once

#include "chemdyn/core.hpp"
#include "chemdyn/trajectory_io.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace chemdyn {

enum class SplitLabel { train, id_test, ood_reactants, ood_products, ood_both };

const char* to_string(SplitLabel label);
std::optional<SplitLabel> split_label_from_string(std::string_view s);

struct SplitAssignment {
  std::vector<std::pair<std::string, SplitLabel>> labels;  // record order
  std::vector<std::string> held_out_scaffolds;             // sorted keys
  double holdout_fraction = 0.0;
  std::uint64_t seed = 0;
};

/// Scaffold key of a (possibly multi-component) SMILES: the scaffold of the
/// largest component by atom count, ties broken by canonical-string order;
/// acyclic molecules share the sentinel key "<acyclic>". Throws SmilesError
/// on unparseable input.
std::string scaffold_key(std::string_view smiles);

/// Scaffold-level holdout split. The scaffold universe (reactant and product
/// scaffolds of all records) is shuffled deterministically by seed and
/// round(holdout_fraction * universe size) scaffolds are held out. Records
/// with both scaffolds seen go to train or id_test (90/10 by seeded id
/// hash); a held-out reactant scaffold alone gives ood_reactants, product
/// alone ood_products, both ood_both.
SplitAssignment scaffold_split(const std::vector<GasRecordRow>& records,
                               double holdout_fraction, std::uint64_t seed);
SplitAssignment scaffold_split(const std::vector<ReactionRecord>& records,
                               double holdout_fraction, std::uint64_t seed);

/// Re-derives every scaffold and checks the assignment: labels partition the
/// record set, train/id_test records touch no held-out scaffold, and each
/// ood label matches its held-out pattern exactly.
std::vector<std::string> verify_split(const std::vector<GasRecordRow>& records,
                                      const SplitAssignment& assignment);

/// Two-column "id label" text form.
std::string write_assignment(const SplitAssignment& assignment);

}  // namespace chemdyn

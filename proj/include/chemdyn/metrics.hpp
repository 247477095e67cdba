#pragma once

#include "chemdyn/smiles.hpp"
#include "chemdyn/trajectory_io.hpp"

#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chemdyn {

/// Folded bit-set fingerprint.
struct Fingerprint {
  std::set<std::uint32_t> bits;
  int nbits = 2048;
};

/// Unit-cost insert/delete/substitute edit distance.
int levenshtein(std::string_view a, std::string_view b);

/// Character-level sentence BLEU, n-grams 1..4 with uniform weights,
/// add-one smoothing on numerator and denominator for n >= 2, and the
/// standard brevity penalty. Identical non-empty strings score 1.
double bleu(std::string_view hyp, std::string_view ref);

/// True iff both strings parse and canonicalize to the same molecule.
bool exact_match(std::string_view pred, std::string_view ref);

/// ECFP-style circular fingerprint: per-atom invariants rehashed with sorted
/// (bond order, neighbor invariant) pairs for r = 1..radius; every (atom, r)
/// invariant folds into the bit set modulo nbits.
Fingerprint morgan_fingerprint(const MoleculeGraph& g, int radius = 2,
                               int nbits = 2048);

/// Linear-path fingerprint: all simple paths of 1..max_len bonds, each
/// hashed from the lexicographically smaller of its two directional
/// element+bond spellings.
Fingerprint path_fingerprint(const MoleculeGraph& g, int max_len = 7,
                             int nbits = 2048);

/// |a n b| / |a u b|; two empty fingerprints count as identical (1.0).
/// Throws std::invalid_argument on an nbits mismatch.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

// ---------------------------------------------------------------------------

struct MetricValue {
  double value = 0.0;
  int count = 0;  // denominator behind the aggregate
};

struct PerRecordMetrics {
  std::string id;
  std::vector<std::pair<std::string, double>> values;
};

struct MetricReport {
  std::string task;  // "gas" or "catalytic"
  std::vector<std::pair<std::string, MetricValue>> aggregates;
  std::vector<PerRecordMetrics> per_record;
  int reference_count = 0;
  int missing_predictions = 0;
  int invalid_smiles_predictions = 0;

  const MetricValue* find(std::string_view name) const;
};

/// Scores gas-phase predictions against reference rows. Missing predictions
/// count as wrong/invalid everywhere except the MAE columns, which they
/// leave; unparseable predicted SMILES contribute 0 similarity but stay in
/// every denominator. Prediction ids must be a subset of reference ids.
MetricReport evaluate_gas(const std::vector<GasRecordRow>& refs,
                          const std::vector<GasPrediction>& preds);
MetricReport evaluate_gas(const std::vector<ReactionRecord>& refs,
                          const std::vector<GasPrediction>& preds);

MetricReport evaluate_catalytic(const std::vector<CatalyticRecordRow>& refs,
                                const std::vector<CatalyticPrediction>& preds);
MetricReport evaluate_catalytic(const std::vector<CatalyticRecord>& refs,
                                const std::vector<CatalyticPrediction>& preds);

std::string format_report_text(const MetricReport& report);
std::string format_report_jsonl(const MetricReport& report);

}  // namespace chemdyn

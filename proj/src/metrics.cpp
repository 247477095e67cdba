#include "chemdyn/metrics.hpp"

#include "chemdyn/hashing.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace chemdyn {

int levenshtein(std::string_view a, std::string_view b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double bleu(std::string_view hyp, std::string_view ref) {
  if (hyp.empty()) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    std::map<std::string_view, int> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i) {
      ++ref_counts[ref.substr(i, n)];
    }
    std::map<std::string_view, int> hyp_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
      ++hyp_counts[hyp.substr(i, n)];
    }
    long clipped = 0;
    long total = 0;
    for (const auto& [gram, count] : hyp_counts) {
      auto it = ref_counts.find(gram);
      clipped += std::min(count, it == ref_counts.end() ? 0 : it->second);
      total += count;
    }
    double num = static_cast<double>(clipped);
    double den = static_cast<double>(total);
    if (n >= 2) {
      num += 1.0;
      den += 1.0;
    }
    if (den == 0.0 || num == 0.0) return 0.0;  // only n=1 with empty overlap
    log_sum += std::log(num / den);
  }
  double bp = 1.0;
  if (hyp.size() < ref.size()) {
    bp = std::exp(1.0 - static_cast<double>(ref.size()) /
                            static_cast<double>(hyp.size()));
  }
  return bp * std::exp(log_sum / 4.0);
}

bool exact_match(std::string_view pred, std::string_view ref) {
  try {
    return canonical_smiles(pred) == canonical_smiles(ref);
  } catch (const SmilesError&) {
    return false;
  }
}

Fingerprint morgan_fingerprint(const MoleculeGraph& g, int radius, int nbits) {
  Fingerprint fp;
  fp.nbits = nbits;
  const int n = g.atom_count();
  std::vector<std::uint64_t> inv(n);
  for (int i = 0; i < n; ++i) {
    const SmilesAtom& a = g.atoms[i];
    std::uint64_t h = mix64(0x4d6f7267616e00ULL);
    h = hash_combine(h, static_cast<std::uint64_t>(a.element.atomic_number));
    h = hash_combine(h, static_cast<std::uint64_t>(g.degree(i)));
    h = hash_combine(h, static_cast<std::uint64_t>(a.formal_charge + 16));
    h = hash_combine(h, static_cast<std::uint64_t>(a.hydrogens));
    h = hash_combine(h, g.ring_membership[i] ? 1u : 0u);
    h = hash_combine(h, a.aromatic ? 1u : 0u);
    inv[i] = h;
    fp.bits.insert(static_cast<std::uint32_t>(h % nbits));
  }
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> env;
      env.reserve(g.adjacency[i].size());
      for (const auto& [nbr, bidx] : g.adjacency[i]) {
        env.emplace_back(
            static_cast<std::uint64_t>(static_cast<int>(g.bonds[bidx].order)),
            inv[nbr]);
      }
      std::sort(env.begin(), env.end());
      std::uint64_t h = hash_combine(static_cast<std::uint64_t>(r), inv[i]);
      for (const auto& [code, nb] : env) {
        h = hash_combine(h, code);
        h = hash_combine(h, nb);
      }
      next[i] = h;
      fp.bits.insert(static_cast<std::uint32_t>(h % nbits));
    }
    inv = std::move(next);
  }
  return fp;
}

namespace {

char bond_char(BondOrder order) {
  switch (order) {
    case BondOrder::single: return '-';
    case BondOrder::double_bond: return '=';
    case BondOrder::triple: return '#';
    case BondOrder::aromatic: return ':';
  }
  return '-';
}

std::string path_atom_symbol(const MoleculeGraph& g, int atom) {
  std::string sym = g.atoms[atom].element.symbol();
  if (g.atoms[atom].aromatic) {
    for (char& c : sym) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return sym;
}

}  // namespace

Fingerprint path_fingerprint(const MoleculeGraph& g, int max_len, int nbits) {
  Fingerprint fp;
  fp.nbits = nbits;
  const int n = g.atom_count();

  std::vector<int> atom_path;
  std::vector<int> bond_path;
  std::vector<bool> on_path(n, false);

  auto emit = [&]() {
    std::string fwd;
    for (std::size_t k = 0; k < atom_path.size(); ++k) {
      if (k) fwd += bond_char(g.bonds[bond_path[k - 1]].order);
      fwd += path_atom_symbol(g, atom_path[k]);
    }
    std::string bwd;
    for (std::size_t k = atom_path.size(); k-- > 0;) {
      if (k + 1 < atom_path.size()) bwd += bond_char(g.bonds[bond_path[k]].order);
      bwd += path_atom_symbol(g, atom_path[k]);
    }
    const std::string& canon = std::min(fwd, bwd);
    fp.bits.insert(static_cast<std::uint32_t>(hash_string(canon) % nbits));
  };

  std::function<void(int)> extend = [&](int atom) {
    for (const auto& [nbr, bidx] : g.adjacency[atom]) {
      if (on_path[nbr]) continue;
      atom_path.push_back(nbr);
      bond_path.push_back(bidx);
      on_path[nbr] = true;
      emit();
      if (static_cast<int>(bond_path.size()) < max_len) extend(nbr);
      on_path[nbr] = false;
      atom_path.pop_back();
      bond_path.pop_back();
    }
  };

  for (int start = 0; start < n; ++start) {
    atom_path.assign(1, start);
    bond_path.clear();
    on_path.assign(n, false);
    on_path[start] = true;
    extend(start);
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.nbits != b.nbits) {
    throw std::invalid_argument("tanimoto: fingerprints have different nbits");
  }
  if (a.bits.empty() && b.bits.empty()) return 1.0;
  std::size_t inter = 0;
  for (std::uint32_t bit : a.bits) inter += b.bits.count(bit);
  const std::size_t uni = a.bits.size() + b.bits.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------

namespace {

struct Accumulator {
  double sum = 0.0;
  int count = 0;

  void add(double v) {
    sum += v;
    ++count;
  }
  MetricValue finish() const {
    return {count > 0 ? sum / count : 0.0, count};
  }
};

std::optional<MoleculeGraph> try_parse(std::string_view s) {
  try {
    return parse_smiles(s);
  } catch (const SmilesError&) {
    return std::nullopt;
  }
}

MoleculeGraph parse_reference(const std::string& id, const std::string& s,
                              const char* what) {
  try {
    return parse_smiles(s);
  } catch (const SmilesError& e) {
    throw std::runtime_error("reference record " + id + ": " + what +
                             " SMILES does not parse (" + e.what() + ")");
  }
}

}  // namespace

const MetricValue* MetricReport::find(std::string_view name) const {
  for (const auto& [n, v] : aggregates) {
    if (n == name) return &v;
  }
  return nullptr;
}

MetricReport evaluate_gas(const std::vector<GasRecordRow>& refs,
                          const std::vector<GasPrediction>& preds) {
  std::unordered_map<std::string, const GasPrediction*> by_id;
  for (const auto& p : preds) by_id.emplace(p.id, &p);
  for (const auto& p : preds) {
    if (std::none_of(refs.begin(), refs.end(),
                     [&](const GasRecordRow& r) { return r.id == p.id; })) {
      throw std::runtime_error("prediction id '" + p.id +
                               "' has no reference record");
    }
  }

  MetricReport report;
  report.task = "gas";
  report.reference_count = static_cast<int>(refs.size());

  Accumulator bleu_acc, exact_acc, lev_acc, rdk_acc, morgan_acc, valid_acc,
      mae_barrier, mae_enthalpy;

  for (const auto& ref : refs) {
    PerRecordMetrics row;
    row.id = ref.id;
    const MoleculeGraph ref_graph =
        parse_reference(ref.id, ref.product_smiles, "product");
    const Fingerprint ref_morgan = morgan_fingerprint(ref_graph);
    const Fingerprint ref_path = path_fingerprint(ref_graph);

    const GasPrediction* pred = nullptr;
    if (auto it = by_id.find(ref.id); it != by_id.end()) pred = it->second;
    if (!pred) ++report.missing_predictions;

    const std::string pred_smiles =
        pred && pred->product_smiles ? *pred->product_smiles : std::string();
    const auto pred_graph = try_parse(pred_smiles);
    const bool valid = pred_graph && check_valence(*pred_graph).empty();
    if (pred && !pred_graph) ++report.invalid_smiles_predictions;

    auto put = [&](const char* name, Accumulator& acc, double v) {
      acc.add(v);
      row.values.emplace_back(name, v);
    };
    put("BLEU", bleu_acc, bleu(pred_smiles, ref.product_smiles));
    put("EXACT", exact_acc,
        pred_graph && exact_match(pred_smiles, ref.product_smiles) ? 1.0 : 0.0);
    put("LEVENSHTEIN", lev_acc,
        static_cast<double>(levenshtein(pred_smiles, ref.product_smiles)));
    put("RDK", rdk_acc,
        pred_graph ? tanimoto(path_fingerprint(*pred_graph), ref_path) : 0.0);
    put("MORGAN", morgan_acc,
        pred_graph ? tanimoto(morgan_fingerprint(*pred_graph), ref_morgan) : 0.0);
    put("VALIDITY", valid_acc, valid ? 1.0 : 0.0);
    if (pred && pred->barrier_ev) {
      put("MAE_BARRIER", mae_barrier, std::abs(*pred->barrier_ev - ref.barrier_ev));
    }
    if (pred && pred->enthalpy_ev) {
      put("MAE_ENTHALPY", mae_enthalpy,
          std::abs(*pred->enthalpy_ev - ref.enthalpy_ev));
    }
    report.per_record.push_back(std::move(row));
  }

  report.aggregates = {
      {"BLEU", bleu_acc.finish()},       {"EXACT", exact_acc.finish()},
      {"LEVENSHTEIN", lev_acc.finish()}, {"RDK", rdk_acc.finish()},
      {"MORGAN", morgan_acc.finish()},   {"VALIDITY", valid_acc.finish()},
      {"MAE_BARRIER", mae_barrier.finish()},
      {"MAE_ENTHALPY", mae_enthalpy.finish()},
  };
  return report;
}

MetricReport evaluate_gas(const std::vector<ReactionRecord>& refs,
                          const std::vector<GasPrediction>& preds) {
  std::vector<GasRecordRow> rows;
  rows.reserve(refs.size());
  for (const auto& r : refs) {
    GasRecordRow row;
    row.id = r.id;
    row.reactant_smiles = r.reactant_smiles;
    row.product_smiles = r.product_smiles;
    row.barrier_ev = r.barrier_ev;
    row.enthalpy_ev = r.enthalpy_ev;
    rows.push_back(std::move(row));
  }
  return evaluate_gas(rows, preds);
}

MetricReport evaluate_catalytic(const std::vector<CatalyticRecordRow>& refs,
                                const std::vector<CatalyticPrediction>& preds) {
  std::unordered_map<std::string, const CatalyticPrediction*> by_id;
  for (const auto& p : preds) by_id.emplace(p.id, &p);
  for (const auto& p : preds) {
    if (std::none_of(refs.begin(), refs.end(), [&](const CatalyticRecordRow& r) {
          return r.id == p.id;
        })) {
      throw std::runtime_error("prediction id '" + p.id +
                               "' has no reference record");
    }
  }

  MetricReport report;
  report.task = "catalytic";
  report.reference_count = static_cast<int>(refs.size());

  Accumulator type_acc, ads_exact, ads_morgan, prod_exact, prod_morgan,
      ts_step_mae, barrier_mae, enthalpy_mae;

  for (const auto& ref : refs) {
    PerRecordMetrics row;
    row.id = ref.id;
    const auto ref_type = reaction_type_from_string(ref.reaction_type);
    if (!ref_type) {
      throw std::runtime_error("reference record " + ref.id +
                               ": unknown reaction_type");
    }
    const MoleculeGraph ads_graph =
        parse_reference(ref.id, ref.adsorbate_smiles, "adsorbate");
    const MoleculeGraph prod_graph =
        parse_reference(ref.id, ref.product_smiles, "product");
    const Fingerprint ads_fp = morgan_fingerprint(ads_graph);
    const Fingerprint prod_fp = morgan_fingerprint(prod_graph);

    const CatalyticPrediction* pred = nullptr;
    if (auto it = by_id.find(ref.id); it != by_id.end()) pred = it->second;
    if (!pred) ++report.missing_predictions;

    auto put = [&](const char* name, Accumulator& acc, double v) {
      acc.add(v);
      row.values.emplace_back(name, v);
    };

    put("TYPE_ACC", type_acc,
        pred && pred->reaction_type && *pred->reaction_type == *ref_type ? 1.0
                                                                         : 0.0);

    const std::string pred_ads =
        pred && pred->adsorbate_smiles ? *pred->adsorbate_smiles : std::string();
    const auto pred_ads_graph = try_parse(pred_ads);
    if (pred && !pred_ads.empty() && !pred_ads_graph) {
      ++report.invalid_smiles_predictions;
    }
    put("ADS_EXACT", ads_exact,
        pred_ads_graph && exact_match(pred_ads, ref.adsorbate_smiles) ? 1.0 : 0.0);
    put("ADS_MORGAN", ads_morgan,
        pred_ads_graph ? tanimoto(morgan_fingerprint(*pred_ads_graph), ads_fp)
                       : 0.0);

    const std::string pred_prod =
        pred && pred->product_smiles ? *pred->product_smiles : std::string();
    const auto pred_prod_graph = try_parse(pred_prod);
    if (pred && !pred_prod.empty() && !pred_prod_graph) {
      ++report.invalid_smiles_predictions;
    }
    put("PROD_EXACT", prod_exact,
        pred_prod_graph && exact_match(pred_prod, ref.product_smiles) ? 1.0 : 0.0);
    put("PROD_MORGAN", prod_morgan,
        pred_prod_graph ? tanimoto(morgan_fingerprint(*pred_prod_graph), prod_fp)
                        : 0.0);

    if (pred && pred->ts_step) {
      put("TS_STEP_MAE", ts_step_mae,
          std::abs(static_cast<double>(*pred->ts_step - ref.ts_step)));
    }
    if (pred && pred->barrier_ev) {
      put("BARRIER_MAE", barrier_mae, std::abs(*pred->barrier_ev - ref.barrier_ev));
    }
    if (pred && pred->enthalpy_ev) {
      put("ENTHALPY_MAE", enthalpy_mae,
          std::abs(*pred->enthalpy_ev - ref.enthalpy_ev));
    }
    report.per_record.push_back(std::move(row));
  }

  report.aggregates = {
      {"TYPE_ACC", type_acc.finish()},
      {"ADS_EXACT", ads_exact.finish()},
      {"ADS_MORGAN", ads_morgan.finish()},
      {"PROD_EXACT", prod_exact.finish()},
      {"PROD_MORGAN", prod_morgan.finish()},
      {"TS_STEP_MAE", ts_step_mae.finish()},
      {"BARRIER_MAE", barrier_mae.finish()},
      {"ENTHALPY_MAE", enthalpy_mae.finish()},
  };
  return report;
}

MetricReport evaluate_catalytic(const std::vector<CatalyticRecord>& refs,
                                const std::vector<CatalyticPrediction>& preds) {
  std::vector<CatalyticRecordRow> rows;
  rows.reserve(refs.size());
  for (const auto& r : refs) {
    CatalyticRecordRow row;
    row.id = r.id;
    row.reaction_type = to_string(r.reaction_type);
    row.adsorbate_smiles = r.adsorbate_smiles;
    row.product_smiles = r.product_smiles;
    row.ts_step = r.ts_step;
    row.barrier_ev = r.barrier_ev;
    row.enthalpy_ev = r.enthalpy_ev;
    rows.push_back(std::move(row));
  }
  return evaluate_catalytic(rows, preds);
}

std::string format_report_text(const MetricReport& report) {
  std::ostringstream os;
  os << "task: " << report.task << "\n";
  os << "references: " << report.reference_count
     << "  missing_predictions: " << report.missing_predictions
     << "  invalid_smiles_predictions: " << report.invalid_smiles_predictions
     << "\n";
  for (const auto& [name, v] : report.aggregates) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-13s %10.6f  (n=%d)", name.c_str(),
                  v.value, v.count);
    os << buf << "\n";
  }
  return os.str();
}

std::string format_report_jsonl(const MetricReport& report) {
  std::ostringstream os;
  for (const auto& [name, v] : report.aggregates) {
    nlohmann::ordered_json j;
    j["metric"] = name;
    j["value"] = v.value;
    j["count"] = v.count;
    os << j.dump() << "\n";
  }
  for (const auto& row : report.per_record) {
    nlohmann::ordered_json j;
    j["record"] = row.id;
    nlohmann::ordered_json vals;
    for (const auto& [name, v] : row.values) vals[name] = v;
    j["metrics"] = vals;
    os << j.dump() << "\n";
  }
  return os.str();
}

}  // namespace chemdyn

#include "chemdyn/metrics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace chemdyn;

TEST_CASE("levenshtein basics") {
  CHECK(levenshtein("CCO", "CCO") == 0);
  CHECK(levenshtein("", "CCO") == 3);
  CHECK(levenshtein("CCO", "") == 3);
  CHECK(levenshtein("CCO", "CC=O") == 1);
  CHECK(levenshtein("kitten", "sitting") == 3);
}

TEST_CASE("levenshtein satisfies the metric axioms on random triples") {
  std::mt19937_64 rng(13);
  const std::string alphabet = "CNO=#()1";
  std::uniform_int_distribution<int> len_dist(0, 12);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  auto random_string = [&] {
    std::string s;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i) s.push_back(alphabet[pick(rng)]);
    return s;
  };
  for (int it = 0; it < 300; ++it) {
    const std::string a = random_string();
    const std::string b = random_string();
    const std::string c = random_string();
    const int ab = levenshtein(a, b);
    CHECK(ab >= 0);
    CHECK((ab == 0) == (a == b));
    CHECK(ab == levenshtein(b, a));
    CHECK(ab <= levenshtein(a, c) + levenshtein(c, b));
  }
}

TEST_CASE("bleu fixtures and ranges") {
  CHECK(bleu("CCO", "CCO") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bleu("CC", "CC") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bleu("", "CCO") == 0.0);
  // Hand-counted: p1=2/3, p2=2/3, p3=1/2, p4=1 (smoothed), BP=1.
  CHECK(bleu("CCN", "CCO") == doctest::Approx(0.6865890479690392).epsilon(1e-12));
  // One char against three: all precisions 1, brevity penalty e^(1-3).
  CHECK(bleu("C", "CCO") == doctest::Approx(0.1353352832366127).epsilon(1e-12));

  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> len_dist(0, 15);
  std::uniform_int_distribution<int> ch(0, 3);
  for (int it = 0; it < 500; ++it) {
    std::string h, r;
    for (int i = len_dist(rng); i > 0; --i) h.push_back("CNO="[ch(rng)]);
    for (int i = len_dist(rng); i > 0; --i) r.push_back("CNO="[ch(rng)]);
    const double v = bleu(h, r);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    if (!h.empty()) CHECK(bleu(h, h) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("exact_match compares canonical forms") {
  CHECK(exact_match("OCC", "CCO"));
  CHECK(!exact_match("CCO", "CCN"));
  CHECK(!exact_match("C1CC", "CCO"));  // invalid prediction
  CHECK(!exact_match("", "CCO"));
}

TEST_CASE("morgan fingerprint") {
  SUBCASE("permutation invariance") {
    std::mt19937_64 rng(37);
    for (const auto& s : chemdyn::testing::fixture_smiles()) {
      const MoleculeGraph g = parse_smiles(s);
      const Fingerprint ref = morgan_fingerprint(g);
      for (int k = 0; k < 3; ++k) {
        const MoleculeGraph h =
            parse_smiles(chemdyn::testing::random_smiles_rewrite(g, rng));
        CHECK(morgan_fingerprint(h).bits == ref.bits);
      }
    }
  }
  SUBCASE("canonical-form invariance") {
    for (const auto& s : chemdyn::testing::fixture_smiles()) {
      const MoleculeGraph g = parse_smiles(s);
      const MoleculeGraph c = parse_smiles(canonicalize(g));
      CHECK(morgan_fingerprint(g).bits == morgan_fingerprint(c).bits);
      CHECK(path_fingerprint(g).bits == path_fingerprint(c).bits);
    }
  }
  SUBCASE("methane and water are disjoint") {
    const Fingerprint a = morgan_fingerprint(parse_smiles("C"));
    const Fingerprint b = morgan_fingerprint(parse_smiles("O"));
    for (auto bit : a.bits) CHECK(b.bits.count(bit) == 0);
    CHECK(tanimoto(a, b) == 0.0);
  }
  SUBCASE("radius 0 depends only on atom-level invariants") {
    const Fingerprint fp = morgan_fingerprint(parse_smiles("CCO"), 0);
    // Two chemically distinct carbons (CH3 vs CH2) plus oxygen, but the
    // terminal CH3 and the OH oxygen differ, so 3 distinct atom classes.
    CHECK(fp.bits.size() == 3);
  }
}

TEST_CASE("path fingerprint") {
  CHECK(path_fingerprint(parse_smiles("[Na+]")).bits.empty());
  CHECK(path_fingerprint(parse_smiles("CC")).bits.size() == 1);
  CHECK(path_fingerprint(parse_smiles("CCC")).bits.size() == 2);
  CHECK(path_fingerprint(parse_smiles("CC=O")).bits.size() == 3);
  // max_len caps path growth.
  const auto longchain = parse_smiles("CCCCCCCCCC");
  CHECK(path_fingerprint(longchain, 2).bits.size() == 2);
}

TEST_CASE("tanimoto") {
  Fingerprint a{{1, 2, 3}, 2048};
  Fingerprint b{{2, 3, 9, 17}, 2048};
  CHECK(tanimoto(a, a) == 1.0);
  CHECK(tanimoto(a, b) == doctest::Approx(0.4));  // 2 shared of 5 total
  CHECK(tanimoto(b, a) == tanimoto(a, b));
  Fingerprint empty1{{}, 2048}, empty2{{}, 2048};
  CHECK(tanimoto(empty1, empty2) == 1.0);
  CHECK(tanimoto(empty1, a) == 0.0);
  Fingerprint other{{1}, 1024};
  CHECK_THROWS_AS(tanimoto(a, other), std::invalid_argument);
}

namespace {

std::vector<GasRecordRow> gas_fixture() {
  auto make = [](const char* id, const char* product, double barrier,
                 double enthalpy) {
    GasRecordRow r;
    r.id = id;
    r.reactant_smiles = "CC=O";
    r.product_smiles = product;
    r.barrier_ev = barrier;
    r.enthalpy_ev = enthalpy;
    return r;
  };
  return {make("g1", "CCO", 1.0, -0.5), make("g2", "CC(C)O", 0.9, -0.2),
          make("g3", "OCC", 1.1, 0.3), make("g4", "C1CCCCC1", 0.4, 0.1)};
}

std::vector<GasPrediction> perfect_gas_predictions(
    const std::vector<GasRecordRow>& refs) {
  std::vector<GasPrediction> out;
  for (const auto& r : refs) {
    GasPrediction p;
    p.id = r.id;
    p.product_smiles = r.product_smiles;
    p.barrier_ev = r.barrier_ev;
    p.enthalpy_ev = r.enthalpy_ev;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate_gas on the perfect-prediction fixture") {
  const auto refs = gas_fixture();
  const auto report = evaluate_gas(refs, perfect_gas_predictions(refs));
  CHECK(report.find("BLEU")->value == doctest::Approx(1.0));
  CHECK(report.find("EXACT")->value == doctest::Approx(1.0));
  CHECK(report.find("LEVENSHTEIN")->value == doctest::Approx(0.0));
  CHECK(report.find("RDK")->value == doctest::Approx(1.0));
  CHECK(report.find("MORGAN")->value == doctest::Approx(1.0));
  CHECK(report.find("VALIDITY")->value == doctest::Approx(1.0));
  CHECK(report.find("MAE_BARRIER")->value == doctest::Approx(0.0));
  CHECK(report.find("MAE_ENTHALPY")->value == doctest::Approx(0.0));
  CHECK(report.find("MAE_BARRIER")->count == 4);
}

TEST_CASE("evaluate_gas on all-garbage predictions") {
  const auto refs = gas_fixture();
  std::vector<GasPrediction> preds;
  for (const auto& r : refs) {
    GasPrediction p;
    p.id = r.id;
    p.product_smiles = "not(a(smiles";
    preds.push_back(std::move(p));
  }
  const auto report = evaluate_gas(refs, preds);
  CHECK(report.find("VALIDITY")->value == doctest::Approx(0.0));
  CHECK(report.find("EXACT")->value == doctest::Approx(0.0));
  CHECK(report.find("MORGAN")->value == doctest::Approx(0.0));
  CHECK(report.find("MAE_BARRIER")->count == 0);
  CHECK(report.invalid_smiles_predictions == 4);
}

TEST_CASE("evaluate_gas arithmetic fixture: one wrong product, one barrier off") {
  const auto refs = gas_fixture();
  auto preds = perfect_gas_predictions(refs);
  preds[3].product_smiles = "CCCC";          // wrong (and acyclic vs ring)
  preds[1].barrier_ev = *preds[1].barrier_ev + 0.4;
  const auto report = evaluate_gas(refs, preds);
  CHECK(report.find("EXACT")->value == doctest::Approx(0.75));
  CHECK(report.find("MAE_BARRIER")->value == doctest::Approx(0.1));
  CHECK(report.find("MAE_BARRIER")->count == 4);
  CHECK(report.find("VALIDITY")->value == doctest::Approx(1.0));
}

TEST_CASE("evaluate_gas handles missing predictions and missing numerics") {
  const auto refs = gas_fixture();
  auto preds = perfect_gas_predictions(refs);
  preds.erase(preds.begin());         // g1 missing entirely
  preds[0].enthalpy_ev.reset();       // g2 has no enthalpy
  const auto report = evaluate_gas(refs, preds);
  CHECK(report.missing_predictions == 1);
  CHECK(report.find("EXACT")->value == doctest::Approx(0.75));
  CHECK(report.find("VALIDITY")->value == doctest::Approx(0.75));
  CHECK(report.find("MAE_BARRIER")->count == 3);
  CHECK(report.find("MAE_ENTHALPY")->count == 2);
  // Missing prediction counts as the empty string for text metrics.
  CHECK(report.find("LEVENSHTEIN")->value == doctest::Approx(3.0 / 4.0));
}

TEST_CASE("evaluate_gas rejects unknown prediction ids") {
  const auto refs = gas_fixture();
  auto preds = perfect_gas_predictions(refs);
  preds[0].id = "nope";
  CHECK_THROWS(evaluate_gas(refs, preds));
}

namespace {

std::vector<CatalyticRecordRow> catalytic_fixture() {
  auto make = [](const char* id, const char* type, int ts) {
    CatalyticRecordRow r;
    r.id = id;
    r.reaction_type = type;
    r.adsorbate_smiles = "[C-]#[O+]";
    r.product_smiles = "[C].[O]";
    r.ts_step = ts;
    r.barrier_ev = 0.8;
    r.enthalpy_ev = 0.1;
    return r;
  };
  return {make("c1", "transfer", 3), make("c2", "dissociation", 4),
          make("c3", "desorption", 5), make("c4", "transfer", 6)};
}

std::vector<CatalyticPrediction> perfect_catalytic_predictions(
    const std::vector<CatalyticRecordRow>& refs) {
  std::vector<CatalyticPrediction> out;
  for (const auto& r : refs) {
    CatalyticPrediction p;
    p.id = r.id;
    p.reaction_type_raw = r.reaction_type;
    p.reaction_type = reaction_type_from_string(r.reaction_type);
    p.adsorbate_smiles = r.adsorbate_smiles;
    p.product_smiles = r.product_smiles;
    p.ts_step = r.ts_step;
    p.barrier_ev = r.barrier_ev;
    p.enthalpy_ev = r.enthalpy_ev;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TEST_CASE("evaluate_catalytic on perfect predictions") {
  const auto refs = catalytic_fixture();
  const auto report = evaluate_catalytic(refs, perfect_catalytic_predictions(refs));
  CHECK(report.find("TYPE_ACC")->value == doctest::Approx(1.0));
  CHECK(report.find("ADS_EXACT")->value == doctest::Approx(1.0));
  CHECK(report.find("ADS_MORGAN")->value == doctest::Approx(1.0));
  CHECK(report.find("PROD_EXACT")->value == doctest::Approx(1.0));
  CHECK(report.find("PROD_MORGAN")->value == doctest::Approx(1.0));
  CHECK(report.find("TS_STEP_MAE")->value == doctest::Approx(0.0));
  CHECK(report.find("BARRIER_MAE")->value == doctest::Approx(0.0));
  CHECK(report.find("ENTHALPY_MAE")->value == doctest::Approx(0.0));
}

TEST_CASE("evaluate_catalytic counts invalid reaction types as wrong") {
  const auto refs = catalytic_fixture();
  auto preds = perfect_catalytic_predictions(refs);
  preds[0].reaction_type_raw = "melting";
  preds[0].reaction_type.reset();
  const auto report = evaluate_catalytic(refs, preds);
  CHECK(report.find("TYPE_ACC")->value == doctest::Approx(0.75));
}

TEST_CASE("evaluate_catalytic ts-step fixture: half the records off by two") {
  const auto refs = catalytic_fixture();
  auto preds = perfect_catalytic_predictions(refs);
  preds[0].ts_step = *preds[0].ts_step + 2;
  preds[2].ts_step = *preds[2].ts_step - 2;
  const auto report = evaluate_catalytic(refs, preds);
  CHECK(report.find("TS_STEP_MAE")->value == doctest::Approx(1.0));
  CHECK(report.find("TS_STEP_MAE")->count == 4);
}

TEST_CASE("report aggregates equal the mean of the per-record breakdown") {
  const auto refs = gas_fixture();
  auto preds = perfect_gas_predictions(refs);
  preds[2].product_smiles = "CCCCN";
  preds[1].barrier_ev.reset();
  const auto report = evaluate_gas(refs, preds);
  for (const auto& [name, agg] : report.aggregates) {
    double sum = 0.0;
    int count = 0;
    for (const auto& row : report.per_record) {
      for (const auto& [metric, value] : row.values) {
        if (metric == name) {
          sum += value;
          ++count;
        }
      }
    }
    CHECK(count == agg.count);
    if (count > 0) {
      CHECK(sum / count == doctest::Approx(agg.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("report serialization shapes") {
  const auto refs = gas_fixture();
  const auto report = evaluate_gas(refs, perfect_gas_predictions(refs));
  const std::string text = format_report_text(report);
  CHECK(text.find("task: gas") != std::string::npos);
  CHECK(text.find("BLEU") != std::string::npos);
  const std::string jsonl = format_report_jsonl(report);
  CHECK(jsonl.find("\"metric\":\"EXACT\"") != std::string::npos);
  CHECK(jsonl.find("\"record\":\"g1\"") != std::string::npos);
}

#include "chemdyn/core.hpp"
#include "chemdyn/metrics.hpp"
#include "chemdyn/neb.hpp"
#include "chemdyn/pbc.hpp"
#include "chemdyn/potentials.hpp"
#include "chemdyn/smiles.hpp"
#include "chemdyn/splits.hpp"
#include "chemdyn/synth.hpp"
#include "chemdyn/text_encoding.hpp"
#include "chemdyn/trajectory_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

constexpr const char* kToolVersion = "0.1.0";

using nlohmann::ordered_json;

// Exit codes: 0 success, 1 usage error, 2 data/validation error.
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct ManifestWriter {
  std::string subcommand;
  ordered_json config = ordered_json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  ordered_json seed;  // null when the subcommand takes none
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void write(const std::filesystem::path& path) const {
    ordered_json j;
    j["tool"] = "chemdyn";
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["seed"] = seed;
    j["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0)
            .count();
    chemdyn::write_file_atomic(path, j.dump(2) + "\n");
  }
};

// Deterministic record-parallel map: results are collected by index.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const int n_workers = std::min<std::size_t>(jobs, count);
  workers.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& t : workers) t.join();
}

void encoding_flags(CLI::App* cmd, chemdyn::EncodingConfig& cfg) {
  cmd->add_option("--delta", cfg.delta, "Sparse displacement threshold (A)")
      ->capture_default_str();
  cmd->add_option("--cutoff", cfg.cutoff, "Neighbor cutoff (A)")
      ->capture_default_str();
  cmd->add_option("--kcap", cfg.k_cap, "Max neighbors per atom")
      ->capture_default_str();
  cmd->add_option("--decimals", cfg.coord_decimals,
                  "Decimals for coordinates and distances")
      ->capture_default_str();
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::stod(item));
  }
  return out;
}

int run_encode(const std::string& mode, const std::string& task,
               const std::string& pair_mode, chemdyn::EncodingConfig cfg,
               const std::string& input, const std::string& output, int jobs) {
  cfg.dist_decimals = cfg.coord_decimals;
  ManifestWriter manifest;
  manifest.subcommand = "encode";
  manifest.config = {{"mode", mode},
                     {"task", task},
                     {"pair_mode", pair_mode},
                     {"delta", cfg.delta},
                     {"cutoff", cfg.cutoff},
                     {"kcap", cfg.k_cap},
                     {"decimals", cfg.coord_decimals},
                     {"jobs", jobs}};
  manifest.inputs = {input};
  manifest.outputs = {output};

  std::string text;
  if (mode == "full3d" || mode == "sparse4d") {
    const auto parsed = chemdyn::parse_extxyz_file(input);
    const auto violations = chemdyn::validate_trajectory(parsed.trajectory);
    for (const auto& v : violations) {
      if (v.rfind("warning:", 0) == 0) {
        std::cerr << v << "\n";
      } else {
        throw std::runtime_error("invalid trajectory: " + v);
      }
    }
    text = mode == "full3d" ? chemdyn::encode_full3d(parsed.trajectory, cfg)
                            : chemdyn::encode_4d_sparse(parsed.trajectory, cfg);
  } else {  // pairs
    const chemdyn::PairMode pm = pair_mode == "text3d"
                                     ? chemdyn::PairMode::text3d
                                     : chemdyn::PairMode::text4d;
    std::vector<chemdyn::SupervisionPair> pairs;
    if (task == "gas") {
      const auto records = chemdyn::read_gas_records(input);
      pairs.resize(records.size());
      parallel_for(records.size(), jobs, [&](std::size_t i) {
        std::vector<chemdyn::ReactionRecord> one{records[i]};
        pairs[i] = chemdyn::emit_supervision_pairs(one, pm, cfg).front();
      });
    } else {
      const auto records = chemdyn::read_catalytic_records(input);
      pairs.resize(records.size());
      parallel_for(records.size(), jobs, [&](std::size_t i) {
        std::vector<chemdyn::CatalyticRecord> one{records[i]};
        pairs[i] = chemdyn::emit_supervision_pairs(one, pm, cfg).front();
      });
    }
    text = chemdyn::write_supervision_pairs(pairs);
  }
  chemdyn::write_file_atomic(output, text);
  manifest.write(output + ".manifest.json");
  return 0;
}

int run_evaluate(const std::string& task, const std::string& refs_path,
                 const std::string& preds_path, const std::string& out_prefix) {
  ManifestWriter manifest;
  manifest.subcommand = "evaluate";
  manifest.config = {{"task", task}};
  manifest.inputs = {refs_path, preds_path};

  std::ifstream refs_in(refs_path);
  if (!refs_in) throw std::runtime_error("cannot open " + refs_path);
  std::ifstream preds_in(preds_path);
  if (!preds_in) throw std::runtime_error("cannot open " + preds_path);

  chemdyn::MetricReport report;
  if (task == "gas") {
    report = chemdyn::evaluate_gas(chemdyn::read_gas_rows(refs_in),
                                   chemdyn::read_gas_predictions(preds_in));
  } else {
    report =
        chemdyn::evaluate_catalytic(chemdyn::read_catalytic_rows(refs_in),
                                    chemdyn::read_catalytic_predictions(preds_in));
  }
  if (report.missing_predictions > 0) {
    std::cerr << "warning: " << report.missing_predictions
              << " reference record(s) have no prediction\n";
  }
  const std::string text = chemdyn::format_report_text(report);
  std::cout << text;
  chemdyn::write_file_atomic(out_prefix + ".txt", text);
  chemdyn::write_file_atomic(out_prefix + ".jsonl",
                             chemdyn::format_report_jsonl(report));
  manifest.outputs = {out_prefix + ".txt", out_prefix + ".jsonl"};
  manifest.write(out_prefix + ".manifest.json");
  return 0;
}

chemdyn::Trajectory images_as_trajectory(
    const std::vector<Eigen::VectorXd>& images,
    const std::vector<double>& energies) {
  // Abstract coordinates are serialized as pseudo-atoms: dim % 3 == 0 maps to
  // dim/3 atoms, smaller dimensions are zero-padded into a single atom.
  chemdyn::Trajectory t;
  for (std::size_t k = 0; k < images.size(); ++k) {
    const Eigen::VectorXd& x = images[k];
    chemdyn::Frame f;
    const int dim = static_cast<int>(x.size());
    const int atoms = dim % 3 == 0 ? dim / 3 : 1;
    if (dim % 3 != 0 && dim > 3) {
      throw std::runtime_error("cannot serialize dimension " +
                               std::to_string(dim) + " as atoms");
    }
    f.elements.assign(atoms, chemdyn::Element{1});
    f.positions = chemdyn::Positions::Zero(atoms, 3);
    for (int i = 0; i < dim; ++i) f.positions(i / 3, i % 3) = x[i];
    f.energy = energies[k];
    t.frames.push_back(std::move(f));
  }
  return t;
}

int run_neb_cmd(const std::string& potential_name, const std::string& start_s,
                const std::string& end_s, chemdyn::NebConfig cfg,
                const std::string& out_path) {
  const auto pot = chemdyn::make_potential(potential_name);
  if (!pot) {
    std::cerr << "unknown potential '" << potential_name << "'; available:";
    for (const auto& name : chemdyn::builtin_potential_names()) {
      std::cerr << ' ' << name;
    }
    std::cerr << "\n";
    return kExitUsage;
  }
  const auto start_v = parse_point(start_s);
  const auto end_v = parse_point(end_s);
  if (static_cast<int>(start_v.size()) != pot->dimension() ||
      static_cast<int>(end_v.size()) != pot->dimension()) {
    std::cerr << "start/end must have " << pot->dimension()
              << " comma-separated coordinates\n";
    return kExitUsage;
  }
  ManifestWriter manifest;
  manifest.subcommand = "neb";
  manifest.config = {{"potential", potential_name}, {"start", start_s},
                     {"end", end_s},                {"images", cfg.n_images},
                     {"spring", cfg.spring_k},      {"climbing", cfg.climbing},
                     {"tol", cfg.max_force_tol},    {"max_steps", cfg.max_steps},
                     {"step", cfg.step_size}};

  const Eigen::VectorXd start =
      Eigen::Map<const Eigen::VectorXd>(start_v.data(), start_v.size());
  const Eigen::VectorXd end =
      Eigen::Map<const Eigen::VectorXd>(end_v.data(), end_v.size());
  const chemdyn::NebResult result = chemdyn::run_neb(*pot, start, end, cfg);
  const chemdyn::ProfileAnalysis analysis =
      chemdyn::analyze_profile(result.profile);

  chemdyn::write_file_atomic(
      out_path, chemdyn::write_extxyz(images_as_trajectory(
                    result.images, result.profile.energies)));
  std::string energies_text;
  for (double e : result.profile.energies) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g\n", e);
    energies_text += buf;
  }
  chemdyn::write_file_atomic(out_path + ".energies", energies_text);
  ordered_json aj;
  aj["ts_index"] = analysis.ts_index;
  aj["barrier"] = analysis.barrier_ev;
  aj["enthalpy"] = analysis.enthalpy_ev;
  aj["converged"] = result.converged;
  aj["steps_taken"] = result.steps_taken;
  chemdyn::write_file_atomic(out_path + ".analysis.json", aj.dump(2) + "\n");

  manifest.config["converged"] = result.converged;
  manifest.outputs = {out_path, out_path + ".energies",
                      out_path + ".analysis.json"};
  manifest.write(out_path + ".manifest.json");

  std::cout << "ts_index " << analysis.ts_index << "  barrier "
            << analysis.barrier_ev << "  enthalpy " << analysis.enthalpy_ev
            << "  converged " << (result.converged ? "yes" : "no") << "  steps "
            << result.steps_taken << "\n";
  return 0;  // non-convergence is a valid outcome
}

int run_split(double holdout_fraction, std::uint64_t seed,
              const std::string& records_path, const std::string& out_path) {
  ManifestWriter manifest;
  manifest.subcommand = "split";
  manifest.config = {{"holdout_fraction", holdout_fraction}};
  manifest.seed = seed;
  manifest.inputs = {records_path};

  std::ifstream in(records_path);
  if (!in) throw std::runtime_error("cannot open " + records_path);
  const auto rows = chemdyn::read_gas_rows(in);
  const auto assignment = chemdyn::scaffold_split(rows, holdout_fraction, seed);
  const auto violations = chemdyn::verify_split(rows, assignment);

  chemdyn::write_file_atomic(out_path, chemdyn::write_assignment(assignment));
  std::string verify_text;
  if (violations.empty()) {
    verify_text = "ok: no violations\n";
  } else {
    for (const auto& v : violations) verify_text += v + "\n";
  }
  chemdyn::write_file_atomic(out_path + ".verify.txt", verify_text);
  manifest.outputs = {out_path, out_path + ".verify.txt"};
  manifest.write(out_path + ".manifest.json");

  int counts[5] = {0, 0, 0, 0, 0};
  for (const auto& [id, label] : assignment.labels) {
    (void)id;
    ++counts[static_cast<int>(label)];
  }
  std::cout << "train " << counts[0] << "  id_test " << counts[1]
            << "  ood_reactants " << counts[2] << "  ood_products "
            << counts[3] << "  ood_both " << counts[4] << "  held_out_scaffolds "
            << assignment.held_out_scaffolds.size() << "\n";
  if (!violations.empty()) {
    std::cerr << violations.size() << " split violation(s); see "
              << out_path + ".verify.txt" << "\n";
    return kExitData;
  }
  return 0;
}

int run_synth(int count, std::uint64_t seed, const std::string& out_dir) {
  ManifestWriter manifest;
  manifest.subcommand = "synth";
  manifest.config = {{"count", count}};
  manifest.seed = seed;

  const auto records = chemdyn::synthesize_catalytic_records(seed, count);
  std::vector<chemdyn::CatalyticRecordRow> rows;
  rows.reserve(records.size());
  const std::filesystem::path dir(out_dir);
  for (const auto& rec : records) {
    const std::string rel = "trajectories/" + rec.id + ".extxyz";
    chemdyn::write_file_atomic(dir / rel, chemdyn::write_extxyz(rec.trajectory));
    rows.push_back(chemdyn::to_row(rec, rel));
    manifest.outputs.push_back((dir / rel).string());
  }
  const std::filesystem::path records_path = dir / "records.jsonl";
  chemdyn::write_file_atomic(records_path, chemdyn::write_catalytic_rows(rows));
  manifest.outputs.push_back(records_path.string());
  manifest.write(dir / "manifest.json");
  std::cout << "wrote " << records.size() << " records to " << records_path
            << "\n";
  return 0;
}

int run_stats(const std::string& mode, chemdyn::EncodingConfig cfg,
              const std::string& input, const std::string& out_path) {
  cfg.dist_decimals = cfg.coord_decimals;
  chemdyn::TokenStats stats;
  if (mode == "text") {
    stats = chemdyn::token_stats(chemdyn::read_file(input));
  } else {
    const auto parsed = chemdyn::parse_extxyz_file(input);
    const std::string text =
        mode == "full3d" ? chemdyn::encode_full3d(parsed.trajectory, cfg)
                         : chemdyn::encode_4d_sparse(parsed.trajectory, cfg);
    stats = chemdyn::token_stats(text);
  }
  std::cout << "tokens " << stats.whitespace_tokens << "  chars " << stats.chars
            << "  lines " << stats.lines << "\n";
  if (!out_path.empty()) {
    ManifestWriter manifest;
    manifest.subcommand = "stats";
    manifest.config = {{"mode", mode}};
    manifest.inputs = {input};
    ordered_json j;
    j["whitespace_tokens"] = stats.whitespace_tokens;
    j["chars"] = stats.chars;
    j["lines"] = stats.lines;
    chemdyn::write_file_atomic(out_path, j.dump(2) + "\n");
    manifest.outputs = {out_path};
    manifest.write(out_path + ".manifest.json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"4D molecular trajectory toolkit: text encodings, benchmark "
               "records, metrics, NEB, scaffold splits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "Optional config file (same keys as flags)");
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for record-parallel steps")
      ->capture_default_str();

  // encode
  auto* encode = app.add_subcommand("encode", "Serialize trajectories or records");
  std::string enc_mode;
  encode->add_option("--mode", enc_mode, "full3d, sparse4d, or pairs")
      ->required()
      ->check(CLI::IsMember({"full3d", "sparse4d", "pairs"}));
  std::string enc_task = "gas";
  encode->add_option("--task", enc_task, "Record kind for pairs mode")
      ->check(CLI::IsMember({"gas", "catalytic"}));
  std::string enc_pair_mode = "text4d";
  encode->add_option("--pair-mode", enc_pair_mode, "Prompt encoding for pairs")
      ->check(CLI::IsMember({"text3d", "text4d"}));
  chemdyn::EncodingConfig enc_cfg;
  encoding_flags(encode, enc_cfg);
  std::string enc_input, enc_output;
  encode->add_option("input", enc_input)->required();
  encode->add_option("output", enc_output)->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions");
  std::string eval_task, eval_refs, eval_preds, eval_out;
  evaluate->add_option("--task", eval_task)
      ->required()
      ->check(CLI::IsMember({"gas", "catalytic"}));
  evaluate->add_option("--refs", eval_refs, "Reference records")->required();
  evaluate->add_option("--preds", eval_preds, "Prediction rows")->required();
  evaluate->add_option("--out", eval_out, "Report path prefix")->required();

  // neb
  auto* neb = app.add_subcommand("neb", "Relax a path on a builtin potential");
  std::string neb_potential, neb_start, neb_end, neb_out;
  chemdyn::NebConfig neb_cfg;
  bool seed_free = true;
  neb->add_option("--potential", neb_potential)->required();
  neb->add_option("--start", neb_start, "Comma-separated coordinates")->required();
  neb->add_option("--end", neb_end, "Comma-separated coordinates")->required();
  neb->add_option("--images", neb_cfg.n_images)->capture_default_str();
  neb->add_option("--spring", neb_cfg.spring_k)->capture_default_str();
  neb->add_flag("--climbing,!--no-climbing", neb_cfg.climbing,
                "Climbing image for the highest interior image")
      ->capture_default_str();
  neb->add_option("--tol", neb_cfg.max_force_tol)->capture_default_str();
  neb->add_option("--max-steps", neb_cfg.max_steps)->capture_default_str();
  neb->add_option("--step", neb_cfg.step_size)->capture_default_str();
  neb->add_flag("--seed-free", seed_free,
                "This subcommand is deterministic and takes no seed");
  neb->add_option("--out", neb_out, "Output trajectory path")->required();

  // split
  auto* split = app.add_subcommand("split", "Scaffold-based dataset split");
  double split_fraction = 0.2;
  std::uint64_t split_seed = 0;
  std::string split_records, split_out;
  split->add_option("--holdout-fraction", split_fraction)->capture_default_str();
  split->add_option("--seed", split_seed)->capture_default_str();
  split->add_option("records", split_records)->required();
  split->add_option("--out", split_out)->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic catalytic records");
  int synth_count = 10;
  std::uint64_t synth_seed = 0;
  std::string synth_out_dir;
  synth->add_option("--count", synth_count)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--out-dir", synth_out_dir)->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Token, char and line counts");
  std::string stats_mode = "text";
  stats->add_option("--mode", stats_mode)
      ->check(CLI::IsMember({"text", "full3d", "sparse4d"}));
  chemdyn::EncodingConfig stats_cfg;
  encoding_flags(stats, stats_cfg);
  std::string stats_input, stats_out;
  stats->add_option("input", stats_input)->required();
  stats->add_option("--out", stats_out, "Optional stats JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage message
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (encode->parsed()) {
      return run_encode(enc_mode, enc_task, enc_pair_mode, enc_cfg, enc_input,
                        enc_output, jobs);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_task, eval_refs, eval_preds, eval_out);
    }
    if (neb->parsed()) {
      return run_neb_cmd(neb_potential, neb_start, neb_end, neb_cfg, neb_out);
    }
    if (split->parsed()) {
      return run_split(split_fraction, split_seed, split_records, split_out);
    }
    if (synth->parsed()) {
      return run_synth(synth_count, synth_seed, synth_out_dir);
    }
    if (stats->parsed()) {
      return run_stats(stats_mode, stats_cfg, stats_input, stats_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

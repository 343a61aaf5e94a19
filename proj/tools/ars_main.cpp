#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ars/config.hpp"
#include "ars/metrics.hpp"
#include "ars/report.hpp"
#include "ars/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

// Thrown for problems the user can fix in a config or path; maps to exit 2.
struct SetupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string resolve_data_path(const std::string& path) {
  if (path.empty()) return path;
  namespace fs = std::filesystem;
  if (fs::path(path).is_absolute() || fs::exists(path)) return path;
  if (const char* root = std::getenv("ARS_DATA_DIR")) {
    const fs::path joined = fs::path(root) / path;
    if (fs::exists(joined)) return joined.string();
  }
  return path;
}

ars::ScenarioConfig load_config_checked(const std::string& path,
                                        std::optional<std::uint64_t> seed_override,
                                        const std::vector<double>& epsilon_override) {
  try {
    ars::ScenarioConfig cfg = ars::load_scenario_config(path);
    cfg.dataset.images = resolve_data_path(cfg.dataset.images);
    cfg.dataset.labels = resolve_data_path(cfg.dataset.labels);
    cfg.dataset.path = resolve_data_path(cfg.dataset.path);
    cfg.dataset.schema_path = resolve_data_path(cfg.dataset.schema_path);
    if (seed_override) cfg.seed = *seed_override;
    if (!epsilon_override.empty()) cfg.noise.epsilon_grid = epsilon_override;
    cfg.validate();
    return cfg;
  } catch (const ars::Error& e) {
    throw SetupError(e.what());
  }
}

void write_manifest(const std::string& command, const std::string& config_path,
                    const ars::ScenarioConfig& cfg,
                    const std::vector<std::string>& outputs) {
  if (outputs.empty()) return;
  nlohmann::json doc;
  doc["command"] = command;
  doc["config_path"] = config_path;
  doc["config"] = nlohmann::json::parse(ars::scenario_config_to_json(cfg));
  doc["seed"] = cfg.seed;
  doc["outputs"] = outputs;
  doc["version"] = ARS_VERSION;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  doc["wall_clock_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  // The manifest is written before any result file so every output can be
  // traced back even if the run dies halfway.
  ars::write_text_file(outputs.front() + ".manifest.json", doc.dump(2) + "\n");
}

std::vector<double> parse_epsilon_list(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw SetupError("cannot parse epsilon value '" + item + "'");
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> load_truth_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw SetupError("cannot open truth file '" + path + "'");
  std::vector<Eigen::VectorXd> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.contains("x")) {
      throw SetupError("bad truth record in '" + path + "'");
    }
    const auto& arr = doc.at("x");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    out.push_back(std::move(v));
  }
  return out;
}

void write_truth_jsonl(const std::string& path, const std::vector<Eigen::VectorXd>& xs) {
  std::string text;
  for (const auto& x : xs) {
    nlohmann::json doc;
    doc["x"] = std::vector<double>(x.data(), x.data() + x.size());
    text += doc.dump();
    text += '\n';
  }
  ars::write_text_file(path, text);
}

std::vector<Eigen::VectorXd> shares_to_vectors(const ars::SharedPool& pool) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(pool.records.size());
  for (const auto& r : pool.records) out.push_back(r.z_hat);
  return out;
}

ars::AttackerConfig attacker_config(const ars::ScenarioConfig& cfg) {
  ars::AttackerConfig acfg;
  acfg.hidden = cfg.attacks.hidden.empty() ? cfg.arch.sdec_hidden : cfg.attacks.hidden;
  acfg.train = cfg.train.substitute;
  acfg.seed = ars::derive_seed(cfg.seed, 0xc11a);
  return acfg;
}

int run_publish(const std::string& config_path, std::optional<std::uint64_t> seed,
                const std::string& out_dir) {
  const ars::ScenarioConfig cfg = load_config_checked(config_path, seed, {});
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string enc_path = (fs::path(out_dir) / "enc.json").string();
  const std::string dec_path = (fs::path(out_dir) / "dec.json").string();
  write_manifest("publish", config_path, cfg, {enc_path, dec_path});

  const ars::PreparedScenario prepared = ars::prepare_scenario(cfg);
  ars::save_autoencoder(prepared.publish_result.autoencoder, enc_path, dec_path);
  std::cout << "published encoder (initiator party "
            << prepared.publish_result.initiator << ") -> " << enc_path << "\n"
            << "private decoder (initiator only)   -> " << dec_path << "\n";
  return kExitOk;
}

int run_share(const std::string& config_path, std::optional<std::uint64_t> seed,
              int party, double epsilon, const std::string& out_path,
              const std::string& truth_out) {
  const ars::ScenarioConfig cfg = load_config_checked(config_path, seed, {});
  if (party < 0 || party >= cfg.parties) {
    throw SetupError("party index " + std::to_string(party) + " out of range");
  }
  write_manifest("share", config_path, cfg, {out_path});

  const ars::PreparedScenario prepared = ars::prepare_scenario(cfg);
  const ars::NoiseBudget budget{prepared.effective_epsilon(cfg, epsilon),
                                cfg.noise.iterations};
  const ars::SharedPool pool =
      ars::run_data_sharing(cfg, prepared.handle, prepared.parties, budget, false, 0);
  ars::SharedPool mine;
  for (const auto& r : pool.records) {
    if (r.party_id == party) mine.records.push_back(r);
  }
  ars::write_pool_jsonl(mine, out_path);
  std::cout << "shared " << mine.records.size() << " representations (party " << party
            << ", epsilon " << epsilon << ") -> " << out_path << "\n";
  if (!truth_out.empty()) {
    write_truth_jsonl(truth_out,
                      prepared.train_parts[static_cast<std::size_t>(party)].samples);
    std::cout << "evaluation-only ground truth -> " << truth_out << "\n";
  }
  return kExitOk;
}

int run_attack(const std::string& kind, const std::string& config_path,
               std::optional<std::uint64_t> seed, const std::string& shares_path,
               const std::string& truth_path, double epsilon, int candidates,
               int attr_index, const std::string& out_path) {
  const ars::ScenarioConfig cfg = load_config_checked(config_path, seed, {});
  if (!std::filesystem::exists(shares_path)) {
    throw SetupError("shares file '" + shares_path + "' does not exist");
  }
  write_manifest("attack-" + kind, config_path, cfg, {out_path});

  const ars::PreparedScenario prepared = ars::prepare_scenario(cfg);
  const int attacker_id =
      cfg.attacks.attacker >= 0 ? cfg.attacks.attacker : cfg.parties - 1;
  const ars::Dataset& attacker_data =
      prepared.parties[static_cast<std::size_t>(attacker_id)].train_data;
  const ars::SharedPool shares = ars::pool_from_jsonl_file(shares_path);
  const std::vector<Eigen::VectorXd> z_hats = shares_to_vectors(shares);
  const ars::AttackerConfig acfg = attacker_config(cfg);
  const ars::NoiseBudget budget{prepared.effective_epsilon(cfg, epsilon),
                                cfg.noise.iterations};

  std::vector<Eigen::VectorXd> truth;
  if (!truth_path.empty()) truth = load_truth_jsonl(truth_path);

  std::string rendered;
  if (kind == "recon" || kind == "advtrain") {
    if (truth.empty()) {
      throw SetupError("reconstruction attacks need --truth (evaluation oracle)");
    }
    ars::NeuralNet decoder;
    if (kind == "recon") {
      decoder = ars::train_substitute_decoder(attacker_data, prepared.handle, acfg);
    } else {
      const ars::MaskVector attacker_mask = ars::generate_mask(
          prepared.handle.latent_dim(), ars::derive_seed(cfg.seed, 0xa11), attacker_id);
      decoder = ars::adversarial_training_attack(attacker_data, prepared.handle,
                                                 attacker_mask, budget, acfg);
    }
    ars::AttackReport report =
        ars::run_reconstruction_attack(decoder, z_hats, truth);
    report.attacker_hidden = acfg.hidden;
    report.attacker_train = acfg.train;
    report.attacker_seed = acfg.seed;
    rendered = ars::attack_report_to_json(report);
    std::cout << "attack " << kind << ": mse " << report.mse << ", psnr "
              << report.psnr << " dB over " << z_hats.size() << " shares\n";
  } else if (kind == "attr") {
    const ars::NeuralNet extractor = ars::train_attribute_extractor(
        attacker_data, prepared.handle, attr_index, acfg);
    const Eigen::VectorXd fixed = Eigen::Map<const Eigen::VectorXd>(
        cfg.noise.fixed_vector.data(),
        static_cast<Eigen::Index>(cfg.noise.fixed_vector.size()));
    ars::AttackReport report =
        ars::run_attribute_attack(extractor, z_hats, fixed, nullptr);
    report.attacker_hidden = acfg.hidden;
    report.attacker_train = acfg.train;
    report.attacker_seed = acfg.seed;
    rendered = ars::attack_report_to_json(report);
    std::cout << "attack attr[" << attr_index << "]: equal-to-fixed rate "
              << report.equal_to_fixed_rate.value_or(0.0) << "\n";
  } else if (kind == "mask-search") {
    if (truth.empty()) {
      throw SetupError("mask-search needs --truth probe plaintexts (evaluation oracle)");
    }
    if (truth.size() != z_hats.size()) {
      throw SetupError("mask-search probe truth and shares must align");
    }
    const ars::MaskVector& victim_mask =
        prepared.parties[static_cast<std::size_t>(cfg.attacks.victim)].mask;
    const ars::MaskSearchResult result = ars::mask_bruteforce_attack(
        attacker_data, prepared.handle, z_hats, truth, candidates,
        ars::derive_seed(cfg.seed, 0x5ea7c4), budget, acfg, &victim_mask);
    rendered = ars::mask_search_result_to_json(result);
    std::cout << "mask-search: best candidate " << result.best_index << " of "
              << candidates << ", probe mse "
              << result.candidate_scores[result.best_index] << ", overlap "
              << result.overlap_with_victim.value_or(-1.0) << "\n";
  } else {
    throw SetupError("unknown attack kind '" + kind + "'");
  }
  ars::write_text_file(out_path, rendered);
  std::cout << "report -> " << out_path << "\n";
  return kExitOk;
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 const std::string& epsilon_csv, const std::string& out_path,
                 const std::string& csv_path, bool task_suite) {
  const ars::ScenarioConfig cfg =
      load_config_checked(config_path, seed, parse_epsilon_list(epsilon_csv));
  std::vector<std::string> outputs{out_path};
  if (!csv_path.empty()) outputs.push_back(csv_path);
  write_manifest(task_suite ? "simulate-tasks" : "simulate", config_path, cfg, outputs);

  if (task_suite) {
    const ars::TaskSuiteReport report = ars::run_task_independence_suite(cfg, cfg.tasks);
    ars::write_text_file(out_path, ars::task_suite_report_to_json(report));
    for (const auto& row : report.rows) {
      std::cout << "task " << row.task << ": accuracy " << row.accuracy
                << " (shared set " << row.shared_hash << ")\n";
    }
  } else {
    const ars::ScenarioReport report = ars::run_scenario(cfg);
    ars::write_text_file(out_path, ars::scenario_report_to_json(report));
    if (!csv_path.empty()) {
      ars::write_text_file(csv_path, ars::scenario_report_to_csv(report));
    }
    for (const auto& row : report.rows) {
      std::cout << "epsilon " << row.epsilon << ": accuracy " << row.task_accuracy
                << ", attacker mse " << row.advtrain_mse << "\n";
    }
  }
  std::cout << "report -> " << out_path << "\n";
  return kExitOk;
}

int run_mask_analyze(int n, double t, const std::string& method) {
  ars::TailMethod m;
  if (method == "exact") {
    m = ars::TailMethod::Exact;
  } else if (method == "normal" || method == "normal_approx") {
    m = ars::TailMethod::NormalApprox;
  } else {
    throw SetupError("method must be 'exact' or 'normal_approx'");
  }
  try {
    const double p = ars::overlap_probability(n, t, m);
    std::cout.precision(15);
    std::cout << "P[overlap(m1, m2) >= " << t << "] with n = " << n << " (" << method
              << "): " << std::scientific << p << "\n";
  } catch (const ars::Error& e) {
    throw SetupError(e.what());
  }
  return kExitOk;
}

int run_report(const std::vector<std::string>& inputs, const std::string& csv_path,
               const std::string& json_path) {
  std::vector<std::string> texts;
  for (const auto& path : inputs) {
    if (!std::filesystem::exists(path)) {
      throw SetupError("report input '" + path + "' does not exist");
    }
    texts.push_back(ars::read_text_file(path));
  }
  try {
    const std::string csv = ars::merge_reports_to_csv(texts);
    if (!csv_path.empty()) {
      ars::write_text_file(csv_path, csv);
      std::cout << "merged CSV -> " << csv_path << "\n";
    }
    if (!json_path.empty()) {
      nlohmann::json merged = nlohmann::json::array();
      for (const auto& text : texts) merged.push_back(nlohmann::json::parse(text));
      ars::write_text_file(json_path, merged.dump(2) + "\n");
      std::cout << "merged JSON -> " << json_path << "\n";
    }
    if (csv_path.empty() && json_path.empty()) std::cout << csv;
  } catch (const ars::Error& e) {
    throw SetupError(e.what());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARS collaborative-learning simulator: share adversarially perturbed "
               "latent representations across parties and quantify the "
               "privacy/utility trade-off."};
  app.set_version_flag("--version", ARS_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_path, out_dir, csv_path, shares_path, truth_path;
  std::string epsilon_csv, method{"exact"}, json_path, truth_out;
  std::vector<std::string> report_inputs;
  std::optional<std::uint64_t> seed;
  int party = 0, candidates = 8, attr_index = 0, mask_n = 256;
  double epsilon = 0.0, mask_t = 0.75;
  bool task_suite = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed,
                    "Master seed; party i derives its stream as "
                    "splitmix64(seed ^ mix(i))");
  };

  CLI::App* publish = app.add_subcommand(
      "publish", "Train the initiator's autoencoder and write enc/dec model files");
  publish->add_option("--config", config_path, "Scenario config (.toml or .json)")
      ->required();
  publish->add_option("--out-dir", out_dir, "Output directory")->required();
  add_seed(publish);

  CLI::App* share = app.add_subcommand(
      "share", "Emit one party's adversarial representations as JSONL");
  share->add_option("--config", config_path, "Scenario config")->required();
  share->add_option("--party", party, "Sharing party index")->required();
  share->add_option("--epsilon", epsilon, "Nominal defense intensity")->required();
  share->add_option("--out", out_path, "Output JSONL path")->required();
  share->add_option("--truth-out", truth_out,
                    "Optional evaluation-only plaintext dump (never shared)");
  add_seed(share);

  CLI::App* attack = app.add_subcommand(
      "attack", "Run an adversary against a shared-representation file");
  std::string attack_kind;
  attack->add_option("kind", attack_kind, "recon | advtrain | attr | mask-search")
      ->required()
      ->check(CLI::IsMember({"recon", "advtrain", "attr", "mask-search"}));
  attack->add_option("--config", config_path, "Scenario config")->required();
  attack->add_option("--shares", shares_path, "Victim shares (JSONL)")->required();
  attack->add_option("--truth", truth_path,
                     "Evaluation-only plaintexts aligned with the shares");
  attack->add_option("--epsilon", epsilon, "Budget the attacker assumes");
  attack->add_option("--candidates", candidates, "Mask candidates (mask-search)");
  attack->add_option("--attr", attr_index, "Private attribute index (attr)");
  attack->add_option("--out", out_path, "Report output path")->required();
  add_seed(attack);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run a full multi-party scenario over the epsilon grid");
  simulate->add_option("--config", config_path, "Scenario config")->required();
  simulate->add_option("--epsilon", epsilon_csv,
                       "Comma-separated grid override, e.g. 0,25,50,100");
  simulate->add_option("--out", out_path, "Report JSON path")->required();
  simulate->add_option("--csv", csv_path, "Optional plot-ready CSV path");
  simulate->add_flag("--tasks", task_suite,
                     "Run the task-independence suite on one shared set instead");
  add_seed(simulate);

  CLI::App* mask = app.add_subcommand(
      "mask-analyze", "Probability that two random masks overlap at rate >= t");
  mask->add_option("--n", mask_n, "Mask dimension")->required();
  mask->add_option("--t", mask_t, "Overlap threshold in (1/2, 1]")->required();
  mask->add_option("--method", method, "exact | normal_approx");

  CLI::App* report = app.add_subcommand(
      "report", "Merge scenario reports into plot-ready CSV/JSON");
  report->add_option("--inputs", report_inputs, "Report JSON files")->required();
  report->add_option("--csv", csv_path, "Merged CSV output");
  report->add_option("--json", json_path, "Merged JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (*publish) return run_publish(config_path, seed, out_dir);
    if (*share) return run_share(config_path, seed, party, epsilon, out_path, truth_out);
    if (*attack) {
      return run_attack(attack_kind, config_path, seed, shares_path, truth_path,
                        epsilon, candidates, attr_index, out_path);
    }
    if (*simulate) {
      return run_simulate(config_path, seed, epsilon_csv, out_path, csv_path,
                          task_suite);
    }
    if (*mask) return run_mask_analyze(mask_n, mask_t, method);
    if (*report) return run_report(report_inputs, csv_path, json_path);
  } catch (const SetupError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitConfigError;
}

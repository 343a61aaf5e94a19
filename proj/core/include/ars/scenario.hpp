#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ars/attacks.hpp"
#include "ars/autoencoder.hpp"
#include "ars/dataset.hpp"
#include "ars/noise.hpp"

namespace ars {

struct DatasetSpec {
  std::string kind;  // idx | csv | synth_clusters | synth_digits | synth_census
  std::string images;
  std::string labels;
  std::string path;
  std::string schema_path;
  int n = 0;
  int dim = 0;
  int classes = 0;
  int attrs = 0;
  std::uint64_t seed = 0;  // 0 = derive from the scenario seed
  int limit = 0;           // optional cap applied after loading
};

struct ArchSection {
  int latent_dim = 64;
  std::vector<int> enc_hidden{256};
  std::vector<int> dec_hidden{256};
  std::vector<int> sdec_hidden{256};
  std::vector<int> clf_hidden{128};
  std::vector<int> attr_hidden{32};
};

struct TrainSection {
  TrainConfig autoencoder{0.05, 32, 20, Loss::SquaredError, 0, 0.0};
  TrainConfig substitute{0.05, 32, 20, Loss::SquaredError, 0, 0.0};
  TrainConfig classifier{0.1, 32, 20, Loss::CrossEntropy, 0, 0.0};
  TrainConfig extractor{0.1, 32, 20, Loss::CrossEntropy, 0, 0.0};
};

struct NoiseSection {
  std::vector<double> epsilon_grid{0.0};  // nominal values reported in rows
  int iterations = 10;
  // absolute: effective epsilon = nominal * scale.
  // relative: effective epsilon = nominal * scale * mean per-dimension latent
  // range measured on the initiator's representations.
  std::string epsilon_mode = "absolute";
  double epsilon_scale = 1.0;
  double lambda_reconstruction = 1.0;
  std::vector<double> lambda_attributes;
  std::string strategy = "adversarial";  // or "uniform" baseline
  bool mask_attribute_noise = true;
  std::vector<double> fixed_vector{1.0, 0.0};  // r_k for attribute defense
};

struct AttackSection {
  bool reconstruction = true;
  bool adversarial_training = true;
  bool attribute = false;
  bool mask_search = false;
  int mask_candidates = 8;
  double probe_fraction = 0.05;
  int victim = 0;
  int attacker = -1;  // -1 = last party
  std::vector<int> hidden;  // empty = reuse arch.sdec_hidden
};

struct ScenarioConfig {
  std::string name = "scenario";
  PartitionMode mode = PartitionMode::Horizontal;
  int parties = 2;
  int owners = 0;  // vertical: fixed column division; 0 = same as parties
  int label_holder = 0;
  int initiator = 0;
  bool initiator_largest = false;
  double test_fraction = 1.0 / 6.0;
  DatasetSpec dataset;
  ArchSection arch;
  TrainSection train;
  NoiseSection noise;
  AttackSection attacks;
  std::vector<std::string> tasks{"label"};
  std::uint64_t seed = 1;

  void validate() const;
};

// Exactly what crosses a party boundary: nothing else is ever serialized
// into the pool.
struct SharedRecord {
  int party_id = 0;
  int sample_id = 0;
  Eigen::VectorXd z_hat;
  Eigen::VectorXd label;
};

struct SharedPool {
  std::vector<SharedRecord> records;
};

std::string shared_record_to_json(const SharedRecord& record);
SharedRecord shared_record_from_json(const std::string& line);
std::string pool_to_jsonl(const SharedPool& pool);
SharedPool pool_from_jsonl_file(const std::string& path);
void write_pool_jsonl(const SharedPool& pool, const std::string& path);
std::string pool_content_hash(const SharedPool& pool);

struct Party {
  int id = 0;
  Dataset train_data;
  Dataset test_data;
  MaskVector mask;
  NeuralNet sdec;
  std::vector<NeuralNet> extractors;           // defense-side attribute models
  std::vector<Eigen::VectorXd> fixed_vectors;  // r_k per attribute
  bool initiator = false;
};

struct PublishResult {
  Autoencoder autoencoder;  // stays with the initiator
  int initiator = 0;
};

struct AttributeLeakRow {
  int index = 0;
  double equal_to_fixed_rate = 0.0;
  double accuracy = 0.0;
};

struct EpsilonRow {
  double epsilon = 0.0;            // nominal grid value
  double epsilon_effective = 0.0;  // latent-space bound actually applied
  double task_accuracy = 0.0;
  double task_f1 = 0.0;
  double naive_mse = 0.0;  // plain substitute decoder
  double naive_psnr = 0.0;
  double advtrain_mse = 0.0;  // data-enhancement attacker
  double advtrain_psnr = 0.0;
  std::optional<double> advtrain_ssim;
  double recon_loss_signed = 0.0;
  double recon_loss_raw = 0.0;
  std::vector<AttributeLeakRow> attributes;
  std::optional<double> advtr_rec_acc;  // vertical: enhanced decoder on plain z
  std::optional<double> rec_acc;        // vertical: enhanced decoder on shared z
  std::string shared_hash;
};

struct ScenarioReport {
  std::string name;
  std::uint64_t seed = 0;
  std::string config_json;  // canonical echo of the resolved config
  std::vector<EpsilonRow> rows;
};

struct TaskRow {
  std::string task;
  double accuracy = 0.0;
  std::string shared_hash;
};

struct TaskSuiteReport {
  std::string name;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::string config_json;
  std::vector<TaskRow> rows;
};

Dataset load_dataset(const DatasetSpec& spec, std::uint64_t scenario_seed);

// Trains the initiator's autoencoder and hands every party the same
// query-only handle; the decoder never leaves this struct.
PublishResult run_encoder_publishing(const ScenarioConfig& cfg,
                                     const std::vector<Dataset>& party_data);

// Everything a horizontal run sets up before the first grid point: the
// partitioned data, the published encoder, and the per-party local state.
struct PreparedScenario {
  std::vector<Dataset> train_parts;
  std::vector<Dataset> test_parts;
  PublishResult publish_result;
  std::vector<Party> parties;
  EncoderHandle handle{NeuralNet{{{1, 1, Activation::Identity}},
                                 {Eigen::MatrixXd::Identity(1, 1)},
                                 {Eigen::VectorXd::Zero(1)},
                                 Role::Encoder,
                                 0}};
  // relative epsilon mode: mean per-dimension latent range on the
  // initiator's data; 1.0 in absolute mode.
  double latent_unit = 1.0;

  double effective_epsilon(const ScenarioConfig& cfg, double nominal) const {
    return nominal * cfg.noise.epsilon_scale * latent_unit;
  }
};

PreparedScenario prepare_scenario(const ScenarioConfig& cfg);

// Per-party substitute models, extractors and masks (the local prerequisites
// of Algorithm-style sharing).
std::vector<Party> prepare_parties(const ScenarioConfig& cfg,
                                   const std::vector<Dataset>& train_parts,
                                   const std::vector<Dataset>& test_parts,
                                   const EncoderHandle& handle);

// One sharing round over the given split; re-checks the budget bound on
// every record while assembling the pool.
SharedPool run_data_sharing(const ScenarioConfig& cfg, const EncoderHandle& handle,
                            const std::vector<Party>& parties,
                            const NoiseBudget& budget, bool test_split,
                            std::uint64_t round_tag);

struct CollabResult {
  NeuralNet classifier;
  double accuracy = 0.0;
  double f1 = 0.0;
};

CollabResult run_collaborative_learning(const ScenarioConfig& cfg,
                                        const SharedPool& train_pool,
                                        const SharedPool& test_pool,
                                        std::uint64_t seed_tag);

ScenarioReport run_horizontal_scenario(const ScenarioConfig& cfg);
ScenarioReport run_vertical_scenario(const ScenarioConfig& cfg);
ScenarioReport run_scenario(const ScenarioConfig& cfg);

// Shares once, then trains one classifier per task on the same pool; the
// pool hash is recomputed per task to prove shares were not regenerated.
TaskSuiteReport run_task_independence_suite(const ScenarioConfig& cfg,
                                            const std::vector<std::string>& tasks);

// Derived label sets for the independence suite ("label", "parity", "ge5",
// "loop"); throws when a task is unavailable for the dataset.
Eigen::VectorXd derive_task_label(const std::string& task, const Eigen::VectorXd& base);
int task_label_dim(const std::string& task, int base_dim);

}  // namespace ars

#include "ars/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "ars/bytes.hpp"
#include "ars/config.hpp"
#include "ars/rng.hpp"

namespace ars {

namespace {

// Seed-split tags; every random stream in a scenario is derive_seed(master,
// one of these), so a single master seed pins the entire run.
constexpr std::uint64_t kTagShuffle = 0x01;
constexpr std::uint64_t kTagSynth = 0x02;
constexpr std::uint64_t kTagAttackerData = 0x03;
constexpr std::uint64_t kTagAutoencoderInit = 0x10;
constexpr std::uint64_t kTagAutoencoderShuffle = 0x11;
constexpr std::uint64_t kTagMaskBase = 0x100;
constexpr std::uint64_t kTagSdecBase = 0x200;
constexpr std::uint64_t kTagSdecShuffleBase = 0x300;
constexpr std::uint64_t kTagExtractorBase = 0x400;
constexpr std::uint64_t kTagClassifierBase = 0x1000;
constexpr std::uint64_t kTagAttackerBase = 0x2000;
constexpr std::uint64_t kTagAttackerMaskBase = 0x3000;
constexpr std::uint64_t kTagUniformBase = 0x4000;
constexpr std::uint64_t kTagTaskBase = 0x5000;
constexpr std::uint64_t kTagVerticalBase = 0x6000;

std::optional<std::pair<int, int>> image_dims_for(int feature_dim) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(feature_dim))));
  if (side >= 8 && side * side == feature_dim) return std::make_pair(side, side);
  return std::nullopt;
}

std::vector<LayerSpec> classifier_layers(int in_dim, const std::vector<int>& hidden,
                                         int classes) {
  std::vector<LayerSpec> layers;
  int prev = in_dim;
  for (int w : hidden) {
    layers.push_back({prev, w, Activation::Relu});
    prev = w;
  }
  layers.push_back({prev, classes, Activation::Softmax});
  return layers;
}

struct FitResult {
  NeuralNet net;
  double accuracy = 0.0;
  double f1 = 0.0;
};

double macro_f1(const std::vector<Eigen::VectorXd>& preds,
                const std::vector<Eigen::VectorXd>& labels, int classes) {
  if (classes == 2) return f1_score(preds, labels, 1);
  double total = 0.0;
  for (int c = 0; c < classes; ++c) total += f1_score(preds, labels, c);
  return total / classes;
}

FitResult fit_classifier(const std::vector<Eigen::VectorXd>& inputs,
                         const std::vector<Eigen::VectorXd>& targets,
                         const std::vector<Eigen::VectorXd>& test_inputs,
                         const std::vector<Eigen::VectorXd>& test_targets,
                         const std::vector<int>& hidden, const TrainConfig& schedule,
                         std::uint64_t init_seed, std::uint64_t shuffle_seed) {
  const int in_dim = static_cast<int>(inputs.front().size());
  const int classes = static_cast<int>(targets.front().size());
  NeuralNet net =
      make_net(classifier_layers(in_dim, hidden, classes), Role::Classifier, init_seed);
  TrainConfig cfg = schedule;
  cfg.loss = Loss::CrossEntropy;
  cfg.shuffle_seed = shuffle_seed;
  cfg.batch_size = std::min<int>(cfg.batch_size, static_cast<int>(inputs.size()));
  FitResult out{train(net, inputs, targets, cfg)};
  std::vector<Eigen::VectorXd> preds;
  preds.reserve(test_inputs.size());
  for (const auto& x : test_inputs) preds.push_back(forward(out.net, x));
  out.accuracy = accuracy(preds, test_targets);
  out.f1 = macro_f1(preds, test_targets, classes);
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(parties >= 1, ErrorCode::InvalidConfig, "config: parties must be >= 1");
  require(test_fraction >= 0.0 && test_fraction < 1.0, ErrorCode::InvalidConfig,
          "config: test_fraction must be in [0, 1)");
  require(dataset.kind == "idx" || dataset.kind == "csv" ||
              dataset.kind == "synth_clusters" || dataset.kind == "synth_digits" ||
              dataset.kind == "synth_census",
          ErrorCode::InvalidConfig, "config: unknown dataset kind '" + dataset.kind + "'");
  require(!noise.epsilon_grid.empty(), ErrorCode::InvalidConfig,
          "config: epsilon grid is empty");
  for (double e : noise.epsilon_grid) {
    require(e >= 0.0, ErrorCode::InvalidConfig, "config: negative epsilon");
  }
  require(noise.iterations >= 1, ErrorCode::InvalidConfig,
          "config: iterations must be >= 1");
  require(noise.epsilon_mode == "absolute" || noise.epsilon_mode == "relative",
          ErrorCode::InvalidConfig,
          "config: epsilon_mode must be 'absolute' or 'relative'");
  require(noise.epsilon_scale > 0.0, ErrorCode::InvalidConfig,
          "config: epsilon_scale must be positive");
  require(noise.strategy == "adversarial" || noise.strategy == "uniform",
          ErrorCode::InvalidConfig, "config: unknown noise strategy");
  if (!noise.lambda_attributes.empty()) {
    LambdaWeights{noise.lambda_reconstruction, noise.lambda_attributes}.validate();
  }
  require(initiator >= 0 && initiator < parties, ErrorCode::InvalidConfig,
          "config: initiator out of range");
  require(attacks.victim >= 0 && attacks.victim < parties, ErrorCode::InvalidConfig,
          "config: attack victim out of range");
  require(attacks.attacker == -1 || (attacks.attacker >= 0 && attacks.attacker < parties),
          ErrorCode::InvalidConfig, "config: attacker out of range");
  require(arch.latent_dim >= 1, ErrorCode::InvalidConfig,
          "config: latent_dim must be >= 1");
  if (mode == PartitionMode::Vertical) {
    const int division = owners > 0 ? owners : parties;
    require(division >= parties, ErrorCode::InvalidConfig,
            "config: owners must be >= participating parties");
    require(label_holder >= 0 && label_holder < parties, ErrorCode::InvalidConfig,
            "config: label_holder must be a participating party");
  }
}

Dataset load_dataset(const DatasetSpec& spec, std::uint64_t scenario_seed) {
  const std::uint64_t seed =
      spec.seed != 0 ? spec.seed : derive_seed(scenario_seed, kTagSynth);
  Dataset ds;
  if (spec.kind == "idx") {
    ds = load_idx(spec.images, spec.labels);
  } else if (spec.kind == "csv") {
    ds = load_csv(spec.path, load_schema(spec.schema_path));
  } else if (spec.kind == "synth_clusters") {
    ds = synth_gaussian_clusters(spec.n, spec.dim, spec.classes, spec.attrs, seed);
  } else if (spec.kind == "synth_digits") {
    ds = synth_digits(spec.n, seed);
  } else if (spec.kind == "synth_census") {
    ds = synth_census(spec.n, seed);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown dataset kind '" + spec.kind + "'");
  }
  if (spec.limit > 0 && static_cast<std::size_t>(spec.limit) < ds.size()) {
    ds = subset(ds, 0, static_cast<std::size_t>(spec.limit));
  }
  return ds;
}

PublishResult run_encoder_publishing(const ScenarioConfig& cfg,
                                     const std::vector<Dataset>& party_data) {
  require(!party_data.empty(), ErrorCode::InvalidArgument,
          "encoder publishing: no parties");
  int initiator = cfg.initiator;
  if (cfg.initiator_largest) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < party_data.size(); ++i) {
      if (party_data[i].size() > party_data[best].size()) best = i;
    }
    initiator = static_cast<int>(best);
  }
  const Dataset& local = party_data[static_cast<std::size_t>(initiator)];
  require(!local.samples.empty(), ErrorCode::InvalidArgument,
          "encoder publishing: initiator has no data");

  AutoencoderArch arch;
  arch.enc_hidden = cfg.arch.enc_hidden;
  arch.dec_hidden = cfg.arch.dec_hidden;
  TrainConfig schedule = cfg.train.autoencoder;
  schedule.loss = Loss::SquaredError;
  schedule.shuffle_seed = derive_seed(cfg.seed, kTagAutoencoderShuffle);
  schedule.batch_size = std::min<int>(schedule.batch_size, static_cast<int>(local.size()));

  PublishResult result;
  result.initiator = initiator;
  result.autoencoder = train_autoencoder(local, cfg.arch.latent_dim, arch, schedule,
                                         derive_seed(cfg.seed, kTagAutoencoderInit));
  return result;
}

std::vector<Party> prepare_parties(const ScenarioConfig& cfg,
                                   const std::vector<Dataset>& train_parts,
                                   const std::vector<Dataset>& test_parts,
                                   const EncoderHandle& handle) {
  require(train_parts.size() == test_parts.size(), ErrorCode::CountMismatch,
          "prepare_parties: train/test partition sizes differ");
  const int h = handle.latent_dim();
  const std::size_t attr_count = cfg.noise.lambda_attributes.size();

  std::vector<Party> parties;
  for (std::size_t i = 0; i < train_parts.size(); ++i) {
    Party party;
    party.id = static_cast<int>(i);
    party.train_data = train_parts[i];
    party.test_data = test_parts[i];
    party.initiator = static_cast<int>(i) == cfg.initiator;
    party.mask = generate_mask(h, derive_seed(cfg.seed, kTagMaskBase + i),
                               static_cast<int>(i));

    AttackerConfig sdec_cfg;
    sdec_cfg.hidden = cfg.arch.sdec_hidden;
    sdec_cfg.train = cfg.train.substitute;
    sdec_cfg.seed = derive_seed(cfg.seed, kTagSdecBase + i);
    sdec_cfg.train.shuffle_seed = derive_seed(cfg.seed, kTagSdecShuffleBase + i);
    party.sdec = train_substitute_decoder(party.train_data, handle, sdec_cfg);

    if (attr_count > 0) {
      require(party.train_data.private_attrs.size() >= attr_count,
              ErrorCode::InvalidConfig,
              "prepare_parties: dataset lacks the configured private attributes");
      for (std::size_t k = 0; k < attr_count; ++k) {
        AttackerConfig attr_cfg;
        attr_cfg.hidden = cfg.arch.attr_hidden;
        attr_cfg.train = cfg.train.extractor;
        attr_cfg.seed = derive_seed(cfg.seed, kTagExtractorBase + i * 16 + k);
        party.extractors.push_back(train_attribute_extractor(
            party.train_data, handle, static_cast<int>(k), attr_cfg));
        const int attr_dim =
            static_cast<int>(party.train_data.private_attrs[k].front().size());
        require(static_cast<int>(cfg.noise.fixed_vector.size()) == attr_dim,
                ErrorCode::InvalidConfig,
                "prepare_parties: fixed vector length does not match attribute dim");
        party.fixed_vectors.push_back(Eigen::Map<const Eigen::VectorXd>(
            cfg.noise.fixed_vector.data(),
            static_cast<Eigen::Index>(cfg.noise.fixed_vector.size())));
      }
    }
    parties.push_back(std::move(party));
  }
  return parties;
}

SharedPool run_data_sharing(const ScenarioConfig& cfg, const EncoderHandle& handle,
                            const std::vector<Party>& parties,
                            const NoiseBudget& budget, bool test_split,
                            std::uint64_t round_tag) {
  budget.validate();
  const LambdaWeights lambda{cfg.noise.lambda_reconstruction, cfg.noise.lambda_attributes};
  SharedPool pool;
  for (const Party& party : parties) {
    const Dataset& src = test_split ? party.test_data : party.train_data;
    if (src.samples.empty()) continue;

    std::vector<AdversarialRepresentation> reps;
    if (cfg.noise.strategy == "uniform") {
      Rng rng(derive_seed(cfg.seed, kTagUniformBase + round_tag * 64 +
                                        static_cast<std::uint64_t>(party.id) * 2 +
                                        (test_split ? 1 : 0)));
      reps.reserve(src.samples.size());
      for (const auto& x : src.samples) {
        const Eigen::VectorXd z = handle.encode(x);
        const Eigen::VectorXd z_hat =
            z + uniform_noise(static_cast<int>(z.size()), budget.epsilon, rng);
        reps.push_back(make_adversarial(z, z_hat, budget));
      }
    } else {
      reps = share_representations(src.samples, handle, party.sdec, party.extractors,
                                   party.fixed_vectors, party.mask, budget, lambda,
                                   cfg.noise.mask_attribute_noise);
    }

    for (std::size_t j = 0; j < reps.size(); ++j) {
      // Pool assembly re-checks the budget at the party boundary.
      const double worst = reps[j].delta.cwiseAbs().maxCoeff();
      require(worst <= budget.epsilon + 1e-9, ErrorCode::InvalidArgument,
              "pool assembly: record exceeds the privacy budget");
      SharedRecord record;
      record.party_id = party.id;
      record.sample_id = static_cast<int>(j);
      record.z_hat = reps[j].z_hat;
      record.label = src.labels.empty() ? Eigen::VectorXd() : src.labels[j];
      pool.records.push_back(std::move(record));
    }
  }
  return pool;
}

CollabResult run_collaborative_learning(const ScenarioConfig& cfg,
                                        const SharedPool& train_pool,
                                        const SharedPool& test_pool,
                                        std::uint64_t seed_tag) {
  require(!train_pool.records.empty(), ErrorCode::InvalidArgument,
          "collaborative learning: empty pool");
  std::vector<Eigen::VectorXd> inputs, targets, test_inputs, test_targets;
  for (const auto& r : train_pool.records) {
    inputs.push_back(r.z_hat);
    targets.push_back(r.label);
  }
  for (const auto& r : test_pool.records) {
    test_inputs.push_back(r.z_hat);
    test_targets.push_back(r.label);
  }
  FitResult fit = fit_classifier(inputs, targets, test_inputs, test_targets,
                                 cfg.arch.clf_hidden, cfg.train.classifier,
                                 derive_seed(cfg.seed, kTagClassifierBase + seed_tag),
                                 derive_seed(cfg.seed, kTagClassifierBase + seed_tag + 1));
  return {std::move(fit.net), fit.accuracy, fit.f1};
}

namespace {

int resolve_attacker(const ScenarioConfig& cfg) {
  return cfg.attacks.attacker >= 0 ? cfg.attacks.attacker : cfg.parties - 1;
}

std::vector<int> attacker_hidden(const ScenarioConfig& cfg) {
  return cfg.attacks.hidden.empty() ? cfg.arch.sdec_hidden : cfg.attacks.hidden;
}

}  // namespace

PreparedScenario prepare_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Dataset ds = load_dataset(cfg.dataset, cfg.seed);
  ds = shuffled(ds, derive_seed(cfg.seed, kTagShuffle));
  auto [train_ds, test_ds] = split_holdout(ds, cfg.test_fraction);

  PreparedScenario ctx;
  ctx.train_parts = partition(train_ds, horizontal_plan(static_cast<int>(train_ds.size()),
                                                        cfg.parties));
  ctx.test_parts = partition(test_ds, horizontal_plan(static_cast<int>(test_ds.size()),
                                                      cfg.parties));
  ctx.publish_result = run_encoder_publishing(cfg, ctx.train_parts);
  ctx.handle = publish(ctx.publish_result.autoencoder);
  ctx.parties = prepare_parties(cfg, ctx.train_parts, ctx.test_parts, ctx.handle);

  if (cfg.noise.epsilon_mode == "relative") {
    const Dataset& local =
        ctx.train_parts[static_cast<std::size_t>(ctx.publish_result.initiator)];
    Eigen::MatrixXd x(local.feature_dim(), static_cast<Eigen::Index>(local.size()));
    for (std::size_t i = 0; i < local.size(); ++i) {
      x.col(static_cast<Eigen::Index>(i)) = local.samples[i];
    }
    const Eigen::MatrixXd z = ctx.handle.encode_batch(x);
    const Eigen::VectorXd ranges =
        z.rowwise().maxCoeff() - z.rowwise().minCoeff();
    ctx.latent_unit = ranges.mean();
    require(ctx.latent_unit > 0.0, ErrorCode::InvalidArgument,
            "relative epsilon mode: degenerate latent range");
  }
  return ctx;
}

ScenarioReport run_horizontal_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  require(cfg.mode == PartitionMode::Horizontal, ErrorCode::InvalidConfig,
          "run_horizontal_scenario: config is not horizontal");
  PreparedScenario ctx = prepare_scenario(cfg);

  const int attacker_id = resolve_attacker(cfg);
  const int victim_id = cfg.attacks.victim;
  const Party& attacker = ctx.parties[static_cast<std::size_t>(attacker_id)];
  const auto dims = image_dims_for(ctx.train_parts[0].feature_dim());

  // The plain substitute decoder and the attribute extractors do not depend
  // on the grid point, so the attacker builds them once.
  AttackerConfig base_attack_cfg;
  base_attack_cfg.hidden = attacker_hidden(cfg);
  base_attack_cfg.train = cfg.train.substitute;
  base_attack_cfg.seed = derive_seed(cfg.seed, kTagAttackerBase);
  NeuralNet attacker_sdec;
  if (cfg.attacks.reconstruction || cfg.attacks.adversarial_training) {
    attacker_sdec =
        train_substitute_decoder(attacker.train_data, ctx.handle, base_attack_cfg);
  }
  std::vector<NeuralNet> attack_extractors;
  if (cfg.attacks.attribute) {
    const std::size_t attr_count = attacker.train_data.private_attrs.size();
    for (std::size_t k = 0; k < attr_count; ++k) {
      AttackerConfig attr_cfg;
      attr_cfg.hidden = cfg.arch.attr_hidden;
      attr_cfg.train = cfg.train.extractor;
      attr_cfg.seed = derive_seed(cfg.seed, kTagAttackerBase + 0x100 + k);
      attack_extractors.push_back(train_attribute_extractor(
          attacker.train_data, ctx.handle, static_cast<int>(k), attr_cfg));
    }
  }

  ScenarioReport report;
  report.name = cfg.name;
  report.seed = cfg.seed;
  report.config_json = scenario_config_to_json(cfg);

  for (std::size_t e = 0; e < cfg.noise.epsilon_grid.size(); ++e) {
    const double nominal = cfg.noise.epsilon_grid[e];
    const double effective = nominal * cfg.noise.epsilon_scale * ctx.latent_unit;
    const NoiseBudget budget{effective, cfg.noise.iterations};

    SharedPool train_pool =
        run_data_sharing(cfg, ctx.handle, ctx.parties, budget, false, e * 2);
    SharedPool test_pool =
        run_data_sharing(cfg, ctx.handle, ctx.parties, budget, true, e * 2 + 1);

    EpsilonRow row;
    row.epsilon = nominal;
    row.epsilon_effective = effective;
    row.shared_hash = pool_content_hash(train_pool);

    CollabResult collab =
        run_collaborative_learning(cfg, train_pool, test_pool, e * 16);
    row.task_accuracy = collab.accuracy;
    row.task_f1 = collab.f1;

    // Victim-side views used by the evaluation oracles.
    std::vector<Eigen::VectorXd> victim_shared;
    for (const auto& r : train_pool.records) {
      if (r.party_id == victim_id) victim_shared.push_back(r.z_hat);
    }
    const auto& victim_truth =
        ctx.train_parts[static_cast<std::size_t>(victim_id)].samples;

    if (cfg.attacks.reconstruction) {
      AttackReport naive =
          run_reconstruction_attack(attacker_sdec, victim_shared, victim_truth, dims);
      row.naive_mse = naive.mse;
      row.naive_psnr = naive.psnr;
    }
    if (cfg.attacks.adversarial_training) {
      AttackerConfig atk_cfg = base_attack_cfg;
      atk_cfg.seed = derive_seed(cfg.seed, kTagAttackerBase + 0x2000 + e);
      const MaskVector attacker_mask =
          generate_mask(ctx.handle.latent_dim(),
                        derive_seed(cfg.seed, kTagAttackerMaskBase + e), attacker_id);
      const NeuralNet sdec_prime = adversarial_training_attack(
          attacker.train_data, ctx.handle, attacker_mask, budget, atk_cfg,
          &attacker_sdec);
      AttackReport enhanced =
          run_reconstruction_attack(sdec_prime, victim_shared, victim_truth, dims);
      row.advtrain_mse = enhanced.mse;
      row.advtrain_psnr = enhanced.psnr;
      row.advtrain_ssim = enhanced.ssim;
      std::vector<Eigen::VectorXd> recs;
      recs.reserve(victim_shared.size());
      for (const auto& z : victim_shared) recs.push_back(forward(sdec_prime, z));
      const ReconstructionLoss loss = reconstruction_loss(victim_truth, recs);
      row.recon_loss_signed = loss.signed_value;
      row.recon_loss_raw = loss.raw_mean;
    }
    if (cfg.attacks.attribute) {
      const auto& victim_attrs =
          ctx.train_parts[static_cast<std::size_t>(victim_id)].private_attrs;
      const Eigen::VectorXd fixed = Eigen::Map<const Eigen::VectorXd>(
          cfg.noise.fixed_vector.data(),
          static_cast<Eigen::Index>(cfg.noise.fixed_vector.size()));
      for (std::size_t k = 0; k < attack_extractors.size(); ++k) {
        AttackReport attr = run_attribute_attack(attack_extractors[k], victim_shared,
                                                 fixed, &victim_attrs[k]);
        AttributeLeakRow leak;
        leak.index = static_cast<int>(k);
        leak.equal_to_fixed_rate = attr.equal_to_fixed_rate.value_or(0.0);
        leak.accuracy = attr.attribute_accuracy.value_or(0.0);
        row.attributes.push_back(leak);
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

ScenarioReport run_vertical_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  require(cfg.mode == PartitionMode::Vertical, ErrorCode::InvalidConfig,
          "run_vertical_scenario: config is not vertical");

  Dataset ds = load_dataset(cfg.dataset, cfg.seed);
  ds = shuffled(ds, derive_seed(cfg.seed, kTagShuffle));

  // Carve the adversary's auxiliary rows off before the collaborative split;
  // it holds the victim's columns for disjoint sample IDs.
  const std::size_t attacker_rows =
      std::min<std::size_t>(ds.size() / 5, std::max<std::size_t>(200, ds.size() / 10));
  Dataset attacker_rows_ds = subset(ds, 0, attacker_rows);
  Dataset main_ds = subset(ds, attacker_rows, ds.size());
  auto [train_ds, test_ds] = split_holdout(main_ds, cfg.test_fraction);

  const int owners = cfg.owners > 0 ? cfg.owners : cfg.parties;
  const PartitionPlan plan =
      vertical_plan(train_ds.feature_dim(), owners, cfg.label_holder);
  std::vector<Dataset> train_parts = partition(train_ds, plan);
  std::vector<Dataset> test_parts = partition(test_ds, plan);
  std::vector<Dataset> attacker_parts = partition(attacker_rows_ds, plan);

  const int k_participants = cfg.parties;
  const int victim_id = cfg.attacks.victim;
  require(victim_id < k_participants, ErrorCode::InvalidConfig,
          "vertical scenario: victim must be a participating party");

  // Per-party local autoencoders: no common encoder in the vertical mode.
  std::vector<Autoencoder> autoencoders;
  std::vector<EncoderHandle> handles;
  std::vector<NeuralNet> sdecs;
  std::vector<MaskVector> masks;
  for (int i = 0; i < k_participants; ++i) {
    const Dataset& block = train_parts[static_cast<std::size_t>(i)];
    const int block_dim = block.feature_dim();
    const int latent = std::min(cfg.arch.latent_dim, std::max(1, block_dim - 1));
    AutoencoderArch arch;
    arch.enc_hidden = cfg.arch.enc_hidden;
    arch.dec_hidden = cfg.arch.dec_hidden;
    TrainConfig schedule = cfg.train.autoencoder;
    schedule.loss = Loss::SquaredError;
    schedule.shuffle_seed =
        derive_seed(cfg.seed, kTagVerticalBase + static_cast<std::uint64_t>(i) * 8 + 1);
    schedule.batch_size = std::min<int>(schedule.batch_size, static_cast<int>(block.size()));
    autoencoders.push_back(train_autoencoder(
        block, latent, arch, schedule,
        derive_seed(cfg.seed, kTagVerticalBase + static_cast<std::uint64_t>(i) * 8)));
    handles.push_back(publish(autoencoders.back()));

    AttackerConfig sdec_cfg;
    sdec_cfg.hidden = cfg.arch.sdec_hidden;
    sdec_cfg.train = cfg.train.substitute;
    sdec_cfg.seed =
        derive_seed(cfg.seed, kTagVerticalBase + static_cast<std::uint64_t>(i) * 8 + 2);
    sdecs.push_back(train_substitute_decoder(block, handles.back(), sdec_cfg));
    masks.push_back(generate_mask(latent,
                                  derive_seed(cfg.seed, kTagMaskBase +
                                                            static_cast<std::uint64_t>(i)),
                                  i));
  }

  const Dataset& attacker_block = attacker_parts[static_cast<std::size_t>(victim_id)];
  AttackerConfig base_attack_cfg;
  base_attack_cfg.hidden = attacker_hidden(cfg);
  base_attack_cfg.train = cfg.train.substitute;
  base_attack_cfg.seed = derive_seed(cfg.seed, kTagAttackerBase);
  const NeuralNet attacker_sdec = train_substitute_decoder(
      attacker_block, handles[static_cast<std::size_t>(victim_id)], base_attack_cfg);

  const Dataset& victim_block = train_parts[static_cast<std::size_t>(victim_id)];
  const std::vector<Eigen::VectorXd> victim_plain_z =
      encode_all(handles[static_cast<std::size_t>(victim_id)], victim_block.samples);

  ScenarioReport report;
  report.name = cfg.name;
  report.seed = cfg.seed;
  report.config_json = scenario_config_to_json(cfg);

  for (std::size_t e = 0; e < cfg.noise.epsilon_grid.size(); ++e) {
    const double nominal = cfg.noise.epsilon_grid[e];
    const double effective = nominal * cfg.noise.epsilon_scale;
    const NoiseBudget budget{effective, cfg.noise.iterations};

    // Per-party sharing; the concatenation preserves aligned sample order.
    std::vector<std::vector<AdversarialRepresentation>> train_shares, test_shares;
    for (int i = 0; i < k_participants; ++i) {
      train_shares.push_back(share_representations(
          train_parts[static_cast<std::size_t>(i)].samples, handles[static_cast<std::size_t>(i)],
          sdecs[static_cast<std::size_t>(i)], {}, {}, masks[static_cast<std::size_t>(i)],
          budget, LambdaWeights{1.0, {}}));
      test_shares.push_back(share_representations(
          test_parts[static_cast<std::size_t>(i)].samples, handles[static_cast<std::size_t>(i)],
          sdecs[static_cast<std::size_t>(i)], {}, {}, masks[static_cast<std::size_t>(i)],
          budget, LambdaWeights{1.0, {}}));
    }

    auto concat_shares =
        [&](const std::vector<std::vector<AdversarialRepresentation>>& shares,
            std::size_t row_count) {
          std::vector<Eigen::VectorXd> w(row_count);
          int total = 0;
          for (int i = 0; i < k_participants; ++i) {
            total += static_cast<int>(shares[static_cast<std::size_t>(i)][0].z_hat.size());
          }
          for (std::size_t j = 0; j < row_count; ++j) {
            Eigen::VectorXd combined(total);
            int cursor = 0;
            for (int i = 0; i < k_participants; ++i) {
              const auto& rep = shares[static_cast<std::size_t>(i)][j];
              combined.segment(cursor, rep.z_hat.size()) = rep.z_hat;
              cursor += static_cast<int>(rep.z_hat.size());
            }
            w[j] = combined;
          }
          return w;
        };

    const std::vector<Eigen::VectorXd> w_train = concat_shares(train_shares, train_ds.size());
    const std::vector<Eigen::VectorXd> w_test = concat_shares(test_shares, test_ds.size());
    const auto& labels_train =
        train_parts[static_cast<std::size_t>(cfg.label_holder)].labels;
    const auto& labels_test =
        test_parts[static_cast<std::size_t>(cfg.label_holder)].labels;

    EpsilonRow row;
    row.epsilon = nominal;
    row.epsilon_effective = effective;

    FitResult fit = fit_classifier(
        w_train, labels_train, w_test, labels_test, cfg.arch.clf_hidden,
        cfg.train.classifier, derive_seed(cfg.seed, kTagClassifierBase + e * 16),
        derive_seed(cfg.seed, kTagClassifierBase + e * 16 + 1));
    row.task_accuracy = fit.accuracy;
    row.task_f1 = fit.f1;

    // Data-enhancement attacker against the victim's column block.
    AttackerConfig atk_cfg = base_attack_cfg;
    atk_cfg.seed = derive_seed(cfg.seed, kTagAttackerBase + 0x2000 + e);
    const MaskVector attacker_mask = generate_mask(
        static_cast<int>(victim_plain_z.front().size()),
        derive_seed(cfg.seed, kTagAttackerMaskBase + e), k_participants);
    const NeuralNet sdec_prime = adversarial_training_attack(
        attacker_block, handles[static_cast<std::size_t>(victim_id)], attacker_mask,
        budget, atk_cfg, &attacker_sdec);

    const auto& blocks = victim_block.blocks;
    auto reconstruct = [&](const std::vector<Eigen::VectorXd>& zs) {
      std::vector<Eigen::VectorXd> recs;
      recs.reserve(zs.size());
      for (const auto& z : zs) recs.push_back(forward(sdec_prime, z));
      return recs;
    };
    row.advtr_rec_acc = tabular_reconstruction_accuracy(
        victim_block.samples, reconstruct(victim_plain_z), blocks);
    std::vector<Eigen::VectorXd> victim_shared;
    victim_shared.reserve(train_shares[static_cast<std::size_t>(victim_id)].size());
    for (const auto& rep : train_shares[static_cast<std::size_t>(victim_id)]) {
      victim_shared.push_back(rep.z_hat);
    }
    row.rec_acc = tabular_reconstruction_accuracy(
        victim_block.samples, reconstruct(victim_shared), blocks);
    const ReconstructionLoss loss =
        reconstruction_loss(victim_block.samples, reconstruct(victim_shared));
    row.recon_loss_signed = loss.signed_value;
    row.recon_loss_raw = loss.raw_mean;
    row.advtrain_mse = loss.raw_mean;

    report.rows.push_back(std::move(row));
  }
  return report;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  return cfg.mode == PartitionMode::Horizontal ? run_horizontal_scenario(cfg)
                                               : run_vertical_scenario(cfg);
}

Eigen::VectorXd derive_task_label(const std::string& task, const Eigen::VectorXd& base) {
  Eigen::Index cls = 0;
  base.maxCoeff(&cls);
  auto binary = [](bool v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2);
    out[v ? 1 : 0] = 1.0;
    return out;
  };
  if (task == "label") return base;
  require(base.size() == 10, ErrorCode::InvalidConfig,
          "task '" + task + "' requires ten-class digit labels");
  if (task == "parity") return binary(cls % 2 == 1);
  if (task == "ge5") return binary(cls >= 5);
  if (task == "loop") return binary(cls == 0 || cls == 6 || cls == 8 || cls == 9);
  throw Error(ErrorCode::InvalidConfig, "unknown task '" + task + "'");
}

int task_label_dim(const std::string& task, int base_dim) {
  if (task == "label") return base_dim;
  return 2;
}

TaskSuiteReport run_task_independence_suite(const ScenarioConfig& cfg,
                                            const std::vector<std::string>& tasks) {
  cfg.validate();
  require(!tasks.empty(), ErrorCode::InvalidArgument, "task suite: no tasks");
  PreparedScenario ctx = prepare_scenario(cfg);

  const double nominal = cfg.noise.epsilon_grid.front();
  const double effective = nominal * cfg.noise.epsilon_scale * ctx.latent_unit;
  const NoiseBudget budget{effective, cfg.noise.iterations};

  // One sharing round; every task trains on exactly these records.
  SharedPool train_pool = run_data_sharing(cfg, ctx.handle, ctx.parties, budget, false, 0);
  SharedPool test_pool = run_data_sharing(cfg, ctx.handle, ctx.parties, budget, true, 1);

  TaskSuiteReport report;
  report.name = cfg.name;
  report.seed = cfg.seed;
  report.epsilon = nominal;
  report.config_json = scenario_config_to_json(cfg);

  std::vector<Eigen::VectorXd> inputs, test_inputs;
  for (const auto& r : train_pool.records) inputs.push_back(r.z_hat);
  for (const auto& r : test_pool.records) test_inputs.push_back(r.z_hat);

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    std::vector<Eigen::VectorXd> targets, test_targets;
    for (const auto& r : train_pool.records) {
      targets.push_back(derive_task_label(tasks[t], r.label));
    }
    for (const auto& r : test_pool.records) {
      test_targets.push_back(derive_task_label(tasks[t], r.label));
    }
    FitResult fit = fit_classifier(
        inputs, targets, test_inputs, test_targets, cfg.arch.clf_hidden,
        cfg.train.classifier, derive_seed(cfg.seed, kTagTaskBase + t * 2),
        derive_seed(cfg.seed, kTagTaskBase + t * 2 + 1));
    TaskRow row;
    row.task = tasks[t];
    row.accuracy = fit.accuracy;
    // Recomputed per task: proves the shares were not regenerated.
    row.shared_hash = pool_content_hash(train_pool);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace ars

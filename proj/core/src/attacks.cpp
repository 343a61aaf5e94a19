#include "ars/attacks.hpp"

#include <algorithm>
#include <cmath>

namespace ars {

namespace {

std::vector<LayerSpec> decoder_layers(int latent, const std::vector<int>& hidden,
                                      int out_dim) {
  std::vector<LayerSpec> layers;
  int prev = latent;
  for (int w : hidden) {
    layers.push_back({prev, w, Activation::Relu});
    prev = w;
  }
  layers.push_back({prev, out_dim, Activation::Sigmoid});
  return layers;
}

NeuralNet fit_decoder(const std::vector<Eigen::VectorXd>& latents,
                      const std::vector<Eigen::VectorXd>& targets,
                      const AttackerConfig& cfg, std::uint64_t seed_tag) {
  const int h = static_cast<int>(latents.front().size());
  const int d = static_cast<int>(targets.front().size());
  NeuralNet net = make_net(decoder_layers(h, cfg.hidden, d), Role::Decoder,
                           derive_seed(cfg.seed, seed_tag));
  TrainConfig train_cfg = cfg.train;
  train_cfg.loss = Loss::SquaredError;
  train_cfg.shuffle_seed = derive_seed(cfg.seed, seed_tag + 1);
  train_cfg.batch_size =
      std::min<int>(train_cfg.batch_size, static_cast<int>(latents.size()));
  return train(net, latents, targets, train_cfg);
}

}  // namespace

NeuralNet train_substitute_decoder(const Dataset& attacker_data,
                                   const EncoderHandle& handle,
                                   const AttackerConfig& cfg) {
  require(!attacker_data.samples.empty(), ErrorCode::InvalidArgument,
          "substitute decoder: attacker has no samples");
  const std::vector<Eigen::VectorXd> latents =
      encode_all(handle, attacker_data.samples);
  return fit_decoder(latents, attacker_data.samples, cfg, 0x5dec);
}

NeuralNet adversarial_training_attack(const Dataset& attacker_data,
                                      const EncoderHandle& handle,
                                      const MaskVector& attacker_mask,
                                      const NoiseBudget& budget,
                                      const AttackerConfig& cfg,
                                      const NeuralNet* pretrained_sdec) {
  budget.validate();
  NeuralNet sdec = pretrained_sdec != nullptr
                       ? *pretrained_sdec
                       : train_substitute_decoder(attacker_data, handle, cfg);
  const std::vector<AdversarialRepresentation> enhanced = share_representations(
      attacker_data.samples, handle, sdec, {}, {}, attacker_mask, budget,
      LambdaWeights{1.0, {}});
  std::vector<Eigen::VectorXd> z_hats;
  z_hats.reserve(enhanced.size());
  for (const auto& rep : enhanced) z_hats.push_back(rep.z_hat);
  return fit_decoder(z_hats, attacker_data.samples, cfg, 0x5dec2);
}

NeuralNet train_attribute_extractor(const Dataset& attacker_data,
                                    const EncoderHandle& handle, int attr_index,
                                    const AttackerConfig& cfg) {
  require(attr_index >= 0 &&
              attr_index < static_cast<int>(attacker_data.private_attrs.size()),
          ErrorCode::InvalidArgument,
          "attribute extractor: attribute index " + std::to_string(attr_index) +
              " out of range");
  const auto& attr_labels =
      attacker_data.private_attrs[static_cast<std::size_t>(attr_index)];
  require(attr_labels.size() == attacker_data.size(), ErrorCode::CountMismatch,
          "attribute extractor: attribute labels not aligned with samples");
  const std::vector<Eigen::VectorXd> latents =
      encode_all(handle, attacker_data.samples);

  const int h = handle.latent_dim();
  const int classes = static_cast<int>(attr_labels.front().size());
  std::vector<LayerSpec> layers;
  int prev = h;
  for (int w : cfg.hidden) {
    layers.push_back({prev, w, Activation::Relu});
    prev = w;
  }
  layers.push_back({prev, classes, Activation::Softmax});
  NeuralNet net = make_net(layers, Role::AttributeExtractor,
                           derive_seed(cfg.seed, 0xa77 + static_cast<std::uint64_t>(attr_index)));
  TrainConfig train_cfg = cfg.train;
  train_cfg.loss = Loss::CrossEntropy;
  train_cfg.shuffle_seed =
      derive_seed(cfg.seed, 0xa78 + static_cast<std::uint64_t>(attr_index));
  train_cfg.batch_size =
      std::min<int>(train_cfg.batch_size, static_cast<int>(latents.size()));
  return train(net, latents, attr_labels, train_cfg);
}

AttackReport run_reconstruction_attack(const NeuralNet& decoder,
                                       const std::vector<Eigen::VectorXd>& shared,
                                       const std::vector<Eigen::VectorXd>& ground_truth,
                                       std::optional<std::pair<int, int>> image_dims) {
  require(shared.size() == ground_truth.size(), ErrorCode::CountMismatch,
          "reconstruction attack: shared/ground truth counts differ");
  require(!shared.empty(), ErrorCode::InvalidArgument,
          "reconstruction attack: nothing to reconstruct");
  AttackReport report;
  report.kind = "reconstruction";
  double psnr_total = 0.0;
  double ssim_total = 0.0;
  for (std::size_t i = 0; i < shared.size(); ++i) {
    const Eigen::VectorXd rec = forward(decoder, shared[i]);
    const double err = mse(ground_truth[i], rec);
    report.per_sample_distance.push_back(err);
    psnr_total += psnr(ground_truth[i], rec, 1.0);
    if (image_dims) {
      ssim_total += ssim(ground_truth[i], rec, image_dims->first, image_dims->second, 1.0);
    }
  }
  const double n = static_cast<double>(shared.size());
  double mse_total = 0.0;
  for (double v : report.per_sample_distance) mse_total += v;
  report.mse = mse_total / n;
  report.psnr = psnr_total / n;
  if (image_dims) report.ssim = ssim_total / n;
  return report;
}

AttackReport run_attribute_attack(const NeuralNet& extractor,
                                  const std::vector<Eigen::VectorXd>& shared,
                                  const Eigen::VectorXd& fixed_vector,
                                  const std::vector<Eigen::VectorXd>* truth) {
  require(!shared.empty(), ErrorCode::InvalidArgument,
          "attribute attack: no shared representations");
  if (truth != nullptr) {
    require(truth->size() == shared.size(), ErrorCode::CountMismatch,
            "attribute attack: truth labels not aligned with shares");
  }
  AttackReport report;
  report.kind = "attribute";
  Eigen::Index fixed_class = 0;
  fixed_vector.maxCoeff(&fixed_class);
  std::size_t equal = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < shared.size(); ++i) {
    const Eigen::VectorXd pred = forward(extractor, shared[i]);
    Eigen::Index cls = 0;
    pred.maxCoeff(&cls);
    report.predicted.push_back(static_cast<int>(cls));
    if (cls == fixed_class) ++equal;
    if (truth != nullptr) {
      Eigen::Index actual = 0;
      (*truth)[i].maxCoeff(&actual);
      if (cls == actual) ++correct;
    }
  }
  const double n = static_cast<double>(shared.size());
  report.equal_to_fixed_rate = static_cast<double>(equal) / n;
  if (truth != nullptr) {
    report.attribute_accuracy = static_cast<double>(correct) / n;
  }
  return report;
}

MaskSearchResult mask_bruteforce_attack(const Dataset& attacker_data,
                                        const EncoderHandle& handle,
                                        const std::vector<Eigen::VectorXd>& probe_shared,
                                        const std::vector<Eigen::VectorXd>& probe_truth,
                                        int candidates, std::uint64_t seed,
                                        const NoiseBudget& budget,
                                        const AttackerConfig& cfg,
                                        const MaskVector* victim_mask) {
  require(candidates >= 1, ErrorCode::InvalidArgument,
          "mask search: need at least one candidate");
  require(probe_shared.size() == probe_truth.size() && !probe_shared.empty(),
          ErrorCode::InvalidArgument, "mask search: bad probe set");

  // The plain substitute decoder does not depend on the candidate mask.
  const NeuralNet sdec = train_substitute_decoder(attacker_data, handle, cfg);

  MaskSearchResult result;
  double best_score = 0.0;
  for (int c = 0; c < candidates; ++c) {
    MaskVector candidate =
        generate_mask(handle.latent_dim(), derive_seed(seed, static_cast<std::uint64_t>(c)));
    AttackerConfig run_cfg = cfg;
    run_cfg.seed = derive_seed(seed, 0x1000 + static_cast<std::uint64_t>(c));
    const NeuralNet sdec_prime = adversarial_training_attack(
        attacker_data, handle, candidate, budget, run_cfg, &sdec);
    AttackReport report =
        run_reconstruction_attack(sdec_prime, probe_shared, probe_truth);
    result.candidate_scores.push_back(report.mse);
    if (c == 0 || report.mse < best_score) {
      best_score = report.mse;
      result.best_index = static_cast<std::size_t>(c);
      result.best_mask = candidate;
      result.best_report = std::move(report);
    }
  }
  if (victim_mask != nullptr) {
    result.overlap_with_victim = overlap_rate(result.best_mask.bits, victim_mask->bits);
  }
  return result;
}

}  // namespace ars

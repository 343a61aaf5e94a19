#pragma once

#include <optional>

#include "ars/autoencoder.hpp"
#include "ars/dataset.hpp"
#include "ars/metrics.hpp"
#include "ars/noise.hpp"

namespace ars {

// Architecture and schedule an adversary uses for its inverse models. The
// attacker only ever sees its own data plus query access to the published
// encoder; ground-truth arguments on evaluation calls are test oracles.
struct AttackerConfig {
  std::vector<int> hidden{64};
  TrainConfig train;
  std::uint64_t seed = 0;
};

struct AttackReport {
  std::string kind;
  std::vector<double> per_sample_distance;
  double mse = 0.0;
  double psnr = 0.0;
  std::optional<double> ssim;
  // attribute extraction
  std::vector<int> predicted;
  std::optional<double> equal_to_fixed_rate;
  std::optional<double> attribute_accuracy;
  // echo of the attacker setup for reproducibility
  std::vector<int> attacker_hidden;
  TrainConfig attacker_train;
  std::uint64_t attacker_seed = 0;
};

// Chosen-plaintext style substitute decoder: queries z = Enc(x) for local
// samples and fits pairs (z, x).
NeuralNet train_substitute_decoder(const Dataset& attacker_data,
                                   const EncoderHandle& handle,
                                   const AttackerConfig& cfg);

// Data-enhancement attack: trains a plain substitute decoder, perturbs the
// attacker's own representations with its own mask and budget, then fits a
// second decoder on the perturbed pairs. Pass a pretrained substitute to
// skip the first step.
NeuralNet adversarial_training_attack(const Dataset& attacker_data,
                                      const EncoderHandle& handle,
                                      const MaskVector& attacker_mask,
                                      const NoiseBudget& budget,
                                      const AttackerConfig& cfg,
                                      const NeuralNet* pretrained_sdec = nullptr);

// Classifier from latent space to the one-hot attribute labels the attacker
// holds for attribute index k.
NeuralNet train_attribute_extractor(const Dataset& attacker_data,
                                    const EncoderHandle& handle, int attr_index,
                                    const AttackerConfig& cfg);

// Decodes every shared representation and scores it against the ground
// truth (evaluation oracle). image_dims enables SSIM for row-major images.
AttackReport run_reconstruction_attack(const NeuralNet& decoder,
                                       const std::vector<Eigen::VectorXd>& shared,
                                       const std::vector<Eigen::VectorXd>& ground_truth,
                                       std::optional<std::pair<int, int>> image_dims = {});

// Predicts the attribute from shared representations; reports the fraction
// of predictions equal to the fixed vector and, when the oracle labels are
// supplied, the attack accuracy.
AttackReport run_attribute_attack(const NeuralNet& extractor,
                                  const std::vector<Eigen::VectorXd>& shared,
                                  const Eigen::VectorXd& fixed_vector,
                                  const std::vector<Eigen::VectorXd>* truth = nullptr);

struct MaskSearchResult {
  MaskVector best_mask;
  std::size_t best_index = 0;
  std::vector<double> candidate_scores;  // probe reconstruction loss per candidate
  AttackReport best_report;
  std::optional<double> overlap_with_victim;  // filled only when the oracle mask is given
};

// Brute-force mask search: enumerate seeded candidate masks, run the
// adversarial-training attack under each, score on a probe set of known
// (x, z_hat) pairs, and keep the best. The victim mask parameter is a
// test-only oracle used for reporting the achieved overlap.
MaskSearchResult mask_bruteforce_attack(const Dataset& attacker_data,
                                        const EncoderHandle& handle,
                                        const std::vector<Eigen::VectorXd>& probe_shared,
                                        const std::vector<Eigen::VectorXd>& probe_truth,
                                        int candidates, std::uint64_t seed,
                                        const NoiseBudget& budget,
                                        const AttackerConfig& cfg,
                                        const MaskVector* victim_mask = nullptr);

}  // namespace ars

#pragma once

#include <optional>

#include "ars/autoencoder.hpp"
#include "ars/nn.hpp"
#include "ars/rng.hpp"

namespace ars {

// Per-dimension noise bound epsilon split over `iterations` sign steps of
// size alpha = epsilon / iterations; alpha is always derived, never set.
struct NoiseBudget {
  double epsilon = 0.0;
  int iterations = 1;

  double alpha() const { return epsilon / iterations; }
  void validate() const {
    require(epsilon >= 0.0, ErrorCode::InvalidConfig, "budget: epsilon must be >= 0");
    require(iterations >= 1, ErrorCode::InvalidConfig, "budget: iterations must be >= 1");
  }
};

// Secret per-party bit vector gating which latent dimensions receive noise.
// Never serialized into anything that crosses a party boundary.
struct MaskVector {
  std::vector<std::uint8_t> bits;
  int owner = -1;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(bits.size()); }
  Eigen::VectorXd as_vector() const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) v[i] = bits[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    return v;
  }
};

MaskVector generate_mask(int h, std::uint64_t seed, int owner = -1);

// Builds a mask whose overlap with `reference` is exactly
// round(overlap * h) positions; the flipped positions are seeded.
MaskVector mask_with_overlap(const MaskVector& reference, double overlap,
                             std::uint64_t seed, int owner = -1);

// Convex mixing weights: lambda_0 for the reconstruction component plus one
// weight per private attribute; must sum to 1 within 1e-12.
struct LambdaWeights {
  double reconstruction = 1.0;
  std::vector<double> attributes;

  void validate() const;
};

struct AdversarialRepresentation {
  Eigen::VectorXd z;      // source representation
  Eigen::VectorXd z_hat;  // shared representation
  Eigen::VectorXd delta;  // z_hat - z
  NoiseBudget budget;
};

// Checks the budget bound max|z_hat - z| <= epsilon + 1e-9 and packages the
// triple; every noise operation funnels through this.
AdversarialRepresentation make_adversarial(const Eigen::VectorXd& z,
                                           const Eigen::VectorXd& z_hat,
                                           const NoiseBudget& budget);

// Iterative fast gradient sign ascent of the reconstruction error
// D(x, sdec(z)) with D the squared error; n steps of size alpha.
AdversarialRepresentation ifgsm(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                                const NeuralNet& sdec, const NoiseBudget& budget);

// Same iteration with the gradient gated by the mask; dimensions with a zero
// mask bit stay bit-identical (sign(0) is 0).
AdversarialRepresentation masked_ifgsm(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                                       const NeuralNet& sdec, const MaskVector& mask,
                                       const NoiseBudget& budget);

// Batched core used by the per-sample wrappers; columns are samples.
Eigen::MatrixXd masked_ifgsm_batch(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x,
                                   const NeuralNet& sdec,
                                   const Eigen::VectorXd& mask_gate, double epsilon,
                                   int iterations);

// Single-step signed noise of magnitude epsilon per unmasked dimension,
// descending the distance between the extractor output and the fixed vector.
Eigen::VectorXd attribute_noise(const Eigen::VectorXd& z, const NeuralNet& extractor,
                                const Eigen::VectorXd& fixed_vector, double epsilon,
                                const MaskVector* mask = nullptr);

// Overall noise lambda_0 * delta_r + sum_k lambda_k * delta_k; all components
// must share the length and budget.
Eigen::VectorXd combine_noise(const Eigen::VectorXd& delta_reconstruction,
                              const std::vector<Eigen::VectorXd>& delta_attributes,
                              const LambdaWeights& lambda, double epsilon);

// Budget-matched baseline: independent uniform noise in [-epsilon, epsilon].
Eigen::VectorXd uniform_noise(int h, double epsilon, Rng& rng);

// Full per-party sharing pipeline: encode, craft masked reconstruction noise
// against the local substitute decoder, add attribute components, combine,
// and emit budget-checked representations. With no extractors the
// reconstruction weight is forced to 1.
std::vector<AdversarialRepresentation> share_representations(
    const std::vector<Eigen::VectorXd>& samples, const EncoderHandle& handle,
    const NeuralNet& sdec, const std::vector<NeuralNet>& extractors,
    const std::vector<Eigen::VectorXd>& fixed_vectors, const MaskVector& mask,
    const NoiseBudget& budget, const LambdaWeights& lambda,
    bool mask_attribute_noise = true);

}  // namespace ars

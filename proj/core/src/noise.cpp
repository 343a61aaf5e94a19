#include "ars/noise.hpp"

#include <cmath>

namespace ars {

namespace {

constexpr double kBudgetSlack = 1e-9;

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

MaskVector generate_mask(int h, std::uint64_t seed, int owner) {
  require(h >= 1, ErrorCode::InvalidArgument, "generate_mask: h must be >= 1");
  MaskVector mask;
  mask.owner = owner;
  mask.seed = seed;
  mask.bits.resize(static_cast<std::size_t>(h));
  Rng rng(seed);
  for (int i = 0; i < h; ++i) {
    mask.bits[static_cast<std::size_t>(i)] = rng.coin() ? 1 : 0;
  }
  return mask;
}

MaskVector mask_with_overlap(const MaskVector& reference, double overlap,
                             std::uint64_t seed, int owner) {
  require(overlap >= 0.0 && overlap <= 1.0, ErrorCode::InvalidArgument,
          "mask_with_overlap: overlap must be in [0, 1]");
  const int h = reference.size();
  const int keep = static_cast<int>(std::lround(overlap * h));
  std::vector<int> positions(static_cast<std::size_t>(h));
  for (int i = 0; i < h; ++i) positions[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(positions);
  MaskVector mask = reference;
  mask.owner = owner;
  mask.seed = seed;
  // First `keep` shuffled positions agree with the reference, the rest flip.
  for (int i = keep; i < h; ++i) {
    const auto p = static_cast<std::size_t>(positions[static_cast<std::size_t>(i)]);
    mask.bits[p] = reference.bits[p] ? 0 : 1;
  }
  return mask;
}

void LambdaWeights::validate() const {
  double sum = reconstruction;
  require(reconstruction >= 0.0, ErrorCode::InvalidConfig,
          "lambda: negative reconstruction weight");
  for (double l : attributes) {
    require(l >= 0.0, ErrorCode::InvalidConfig, "lambda: negative attribute weight");
    sum += l;
  }
  require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::InvalidConfig,
          "lambda: weights must sum to 1 (got " + std::to_string(sum) + ")");
}

AdversarialRepresentation make_adversarial(const Eigen::VectorXd& z,
                                           const Eigen::VectorXd& z_hat,
                                           const NoiseBudget& budget) {
  require(z.size() == z_hat.size(), ErrorCode::DimensionMismatch,
          "adversarial representation: z and z_hat lengths differ");
  AdversarialRepresentation rep;
  rep.z = z;
  rep.z_hat = z_hat;
  rep.delta = z_hat - z;
  rep.budget = budget;
  const double worst = rep.delta.size() == 0 ? 0.0 : rep.delta.cwiseAbs().maxCoeff();
  require(worst <= budget.epsilon + kBudgetSlack, ErrorCode::InvalidArgument,
          "adversarial representation exceeds budget: max|delta| = " +
              std::to_string(worst) + " > epsilon = " + std::to_string(budget.epsilon));
  return rep;
}

Eigen::MatrixXd masked_ifgsm_batch(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x,
                                   const NeuralNet& sdec,
                                   const Eigen::VectorXd& mask_gate, double epsilon,
                                   int iterations) {
  require(z.rows() == sdec.input_dim(), ErrorCode::DimensionMismatch,
          "ifgsm: latent dim does not match decoder input");
  require(x.rows() == sdec.output_dim(), ErrorCode::DimensionMismatch,
          "ifgsm: sample dim does not match decoder output");
  require(z.cols() == x.cols(), ErrorCode::DimensionMismatch,
          "ifgsm: sample count mismatch");
  require(mask_gate.size() == z.rows(), ErrorCode::DimensionMismatch,
          "ifgsm: mask length does not match latent dim");

  const double alpha = epsilon / iterations;
  Eigen::MatrixXd z_hat = z;
  if (epsilon == 0.0) return z_hat;
  for (int t = 0; t < iterations; ++t) {
    const Eigen::MatrixXd grad =
        input_gradient_batch(sdec, z_hat, Loss::SquaredError, x);
    // sign(m * grad): the gate is 0/1 so masked dimensions step by exactly 0.
    Eigen::MatrixXd step = grad.unaryExpr([](double g) { return sign0(g); });
    step = mask_gate.asDiagonal() * step;
    z_hat += alpha * step;
  }
  return z_hat;
}

AdversarialRepresentation ifgsm(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                                const NeuralNet& sdec, const NoiseBudget& budget) {
  budget.validate();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(z.size());
  const Eigen::MatrixXd z_hat =
      masked_ifgsm_batch(z, x, sdec, ones, budget.epsilon, budget.iterations);
  return make_adversarial(z, z_hat.col(0), budget);
}

AdversarialRepresentation masked_ifgsm(const Eigen::VectorXd& z, const Eigen::VectorXd& x,
                                       const NeuralNet& sdec, const MaskVector& mask,
                                       const NoiseBudget& budget) {
  budget.validate();
  require(mask.size() == z.size(), ErrorCode::DimensionMismatch,
          "masked_ifgsm: mask length does not match representation");
  const Eigen::MatrixXd z_hat = masked_ifgsm_batch(z, x, sdec, mask.as_vector(),
                                                   budget.epsilon, budget.iterations);
  return make_adversarial(z, z_hat.col(0), budget);
}

Eigen::VectorXd attribute_noise(const Eigen::VectorXd& z, const NeuralNet& extractor,
                                const Eigen::VectorXd& fixed_vector, double epsilon,
                                const MaskVector* mask) {
  require(epsilon >= 0.0, ErrorCode::InvalidArgument,
          "attribute_noise: epsilon must be >= 0");
  require(z.size() == extractor.input_dim(), ErrorCode::DimensionMismatch,
          "attribute_noise: latent dim does not match extractor input");
  require(fixed_vector.size() == extractor.output_dim(), ErrorCode::DimensionMismatch,
          "attribute_noise: fixed vector does not match extractor output");
  if (mask != nullptr) {
    require(mask->size() == z.size(), ErrorCode::DimensionMismatch,
            "attribute_noise: mask length does not match representation");
  }
  if (epsilon == 0.0) return Eigen::VectorXd::Zero(z.size());
  const Eigen::VectorXd grad =
      input_gradient(extractor, z, Loss::SquaredError, fixed_vector);
  Eigen::VectorXd delta = grad.unaryExpr([](double g) { return sign0(g); });
  delta *= -epsilon;
  if (mask != nullptr) {
    delta = mask->as_vector().cwiseProduct(delta);
  }
  return delta;
}

Eigen::VectorXd combine_noise(const Eigen::VectorXd& delta_reconstruction,
                              const std::vector<Eigen::VectorXd>& delta_attributes,
                              const LambdaWeights& lambda, double epsilon) {
  lambda.validate();
  require(lambda.attributes.size() == delta_attributes.size(), ErrorCode::DimensionMismatch,
          "combine_noise: weight count does not match component count");
  auto check_component = [&](const Eigen::VectorXd& d) {
    require(d.size() == delta_reconstruction.size(), ErrorCode::DimensionMismatch,
            "combine_noise: component lengths differ");
    const double worst = d.size() == 0 ? 0.0 : d.cwiseAbs().maxCoeff();
    require(worst <= epsilon + kBudgetSlack, ErrorCode::InvalidArgument,
            "combine_noise: component exceeds the shared budget");
  };
  check_component(delta_reconstruction);
  Eigen::VectorXd out = lambda.reconstruction * delta_reconstruction;
  for (std::size_t k = 0; k < delta_attributes.size(); ++k) {
    check_component(delta_attributes[k]);
    out += lambda.attributes[k] * delta_attributes[k];
  }
  return out;
}

Eigen::VectorXd uniform_noise(int h, double epsilon, Rng& rng) {
  Eigen::VectorXd out(h);
  for (int i = 0; i < h; ++i) out[i] = rng.uniform(-epsilon, epsilon);
  return out;
}

std::vector<AdversarialRepresentation> share_representations(
    const std::vector<Eigen::VectorXd>& samples, const EncoderHandle& handle,
    const NeuralNet& sdec, const std::vector<NeuralNet>& extractors,
    const std::vector<Eigen::VectorXd>& fixed_vectors, const MaskVector& mask,
    const NoiseBudget& budget, const LambdaWeights& lambda,
    bool mask_attribute_noise) {
  budget.validate();
  require(!samples.empty(), ErrorCode::InvalidArgument,
          "share_representations: no samples");
  require(extractors.size() == fixed_vectors.size(), ErrorCode::DimensionMismatch,
          "share_representations: extractor/fixed vector counts differ");

  LambdaWeights weights = lambda;
  if (extractors.empty()) {
    weights = LambdaWeights{1.0, {}};
  } else {
    weights.validate();
    require(weights.attributes.size() == extractors.size(), ErrorCode::InvalidConfig,
            "share_representations: one attribute weight per extractor required");
  }

  const int h = handle.latent_dim();
  require(mask.size() == h, ErrorCode::DimensionMismatch,
          "share_representations: mask length does not match latent dim");

  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(handle.input_dim(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.col(i) = samples[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd z = handle.encode_batch(x);

  const Eigen::MatrixXd z_ifgsm = masked_ifgsm_batch(z, x, sdec, mask.as_vector(),
                                                     budget.epsilon, budget.iterations);

  // Attribute components are crafted from z, not from the iterated point.
  std::vector<Eigen::MatrixXd> attr_steps;
  const Eigen::VectorXd gate = mask.as_vector();
  for (std::size_t k = 0; k < extractors.size(); ++k) {
    require(extractors[k].input_dim() == h, ErrorCode::DimensionMismatch,
            "share_representations: extractor input dim mismatch");
    Eigen::MatrixXd targets(fixed_vectors[k].size(), n);
    targets.colwise() = fixed_vectors[k];
    Eigen::MatrixXd grad =
        input_gradient_batch(extractors[k], z, Loss::SquaredError, targets);
    Eigen::MatrixXd step = grad.unaryExpr([](double g) { return sign0(g); });
    step *= -budget.epsilon;
    if (mask_attribute_noise) {
      step = gate.asDiagonal() * step;
    }
    attr_steps.push_back(std::move(step));
  }

  std::vector<AdversarialRepresentation> out;
  out.reserve(samples.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd delta_r = z_ifgsm.col(i) - z.col(i);
    std::vector<Eigen::VectorXd> delta_attrs;
    delta_attrs.reserve(attr_steps.size());
    for (const auto& step : attr_steps) delta_attrs.push_back(step.col(i));
    const Eigen::VectorXd delta =
        combine_noise(delta_r, delta_attrs, weights, budget.epsilon);
    out.push_back(make_adversarial(z.col(i), z.col(i) + delta, budget));
  }
  return out;
}

}  // namespace ars

#include "ars/metrics.hpp"

#include <cmath>

#include "ars/error.hpp"

namespace ars {

namespace {
int argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  v.maxCoeff(&best);
  return static_cast<int>(best);
}
}  // namespace

double mse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  require(a.size() == b.size(), ErrorCode::DimensionMismatch,
          "mse: vector lengths differ");
  require(a.size() > 0, ErrorCode::InvalidArgument, "mse: empty vectors");
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

double psnr(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double max_value) {
  require(max_value > 0.0, ErrorCode::InvalidArgument, "psnr: max_value must be positive");
  const double err = mse(a, b);
  if (err < 1e-10) return 100.0;
  return 10.0 * std::log10(max_value * max_value / err);
}

double ssim(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int width,
            int height, double max_value) {
  constexpr int kWindow = 8;
  require(a.size() == b.size(), ErrorCode::DimensionMismatch,
          "ssim: vector lengths differ");
  require(width >= kWindow && height >= kWindow, ErrorCode::InvalidArgument,
          "ssim: image smaller than the 8x8 window");
  require(static_cast<Eigen::Index>(width) * height == a.size(),
          ErrorCode::DimensionMismatch, "ssim: dims do not match vector length");

  const double c1 = (0.01 * max_value) * (0.01 * max_value);
  const double c2 = (0.03 * max_value) * (0.03 * max_value);
  const double inv_n = 1.0 / (kWindow * kWindow);

  double total = 0.0;
  int windows = 0;
  for (int y = 0; y + kWindow <= height; ++y) {
    for (int x = 0; x + kWindow <= width; ++x) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int dy = 0; dy < kWindow; ++dy) {
        const int row = (y + dy) * width + x;
        for (int dx = 0; dx < kWindow; ++dx) {
          const double va = a[row + dx];
          const double vb = b[row + dx];
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      }
      const double mu_a = sa * inv_n;
      const double mu_b = sb * inv_n;
      const double var_a = saa * inv_n - mu_a * mu_a;
      const double var_b = sbb * inv_n - mu_b * mu_b;
      const double cov = sab * inv_n - mu_a * mu_b;
      const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
      const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
      total += num / den;
      ++windows;
    }
  }
  return total / windows;
}

ReconstructionLoss reconstruction_loss(const std::vector<Eigen::VectorXd>& originals,
                                       const std::vector<Eigen::VectorXd>& reconstructions) {
  require(originals.size() == reconstructions.size(), ErrorCode::DimensionMismatch,
          "reconstruction_loss: list lengths differ");
  require(!originals.empty(), ErrorCode::InvalidArgument,
          "reconstruction_loss: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    total += mse(originals[i], reconstructions[i]);
  }
  const double raw = total / static_cast<double>(originals.size());
  return {-raw, raw};
}

double feature_loss(const std::vector<Eigen::VectorXd>& predictions,
                    const Eigen::VectorXd& fixed_vector) {
  require(!predictions.empty(), ErrorCode::InvalidArgument, "feature_loss: empty input");
  double total = 0.0;
  for (const auto& p : predictions) {
    require(p.size() == fixed_vector.size(), ErrorCode::DimensionMismatch,
            "feature_loss: prediction dim does not match fixed vector");
    total += (p - fixed_vector).squaredNorm();
  }
  return total / static_cast<double>(predictions.size());
}

double overall_privacy_loss(double reconstruction, const std::vector<double>& attribute_losses,
                            double lambda_reconstruction,
                            const std::vector<double>& lambda_attributes) {
  require(attribute_losses.size() == lambda_attributes.size(), ErrorCode::DimensionMismatch,
          "overall_privacy_loss: weight count does not match loss count");
  double sum = lambda_reconstruction;
  for (double l : lambda_attributes) sum += l;
  require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "overall_privacy_loss: weights must sum to 1");
  double out = lambda_reconstruction * reconstruction;
  for (std::size_t k = 0; k < attribute_losses.size(); ++k) {
    out += lambda_attributes[k] * attribute_losses[k];
  }
  return out;
}

double accuracy(const std::vector<Eigen::VectorXd>& predictions,
                const std::vector<Eigen::VectorXd>& labels) {
  require(predictions.size() == labels.size(), ErrorCode::DimensionMismatch,
          "accuracy: list lengths differ");
  require(!predictions.empty(), ErrorCode::InvalidArgument, "accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (argmax(predictions[i]) == argmax(labels[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double f1_score(const std::vector<Eigen::VectorXd>& predictions,
                const std::vector<Eigen::VectorXd>& labels, int positive_class) {
  require(predictions.size() == labels.size(), ErrorCode::DimensionMismatch,
          "f1_score: list lengths differ");
  require(!predictions.empty(), ErrorCode::InvalidArgument, "f1_score: empty input");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = argmax(predictions[i]) == positive_class;
    const bool true_pos = argmax(labels[i]) == positive_class;
    if (pred_pos && true_pos) ++tp;
    if (pred_pos && !true_pos) ++fp;
    if (!pred_pos && true_pos) ++fn;
  }
  const double denom = 2.0 * tp + fp + fn;
  if (denom == 0.0) return 0.0;
  return 2.0 * tp / denom;
}

double overlap_rate(const std::vector<std::uint8_t>& m1, const std::vector<std::uint8_t>& m2) {
  require(m1.size() == m2.size(), ErrorCode::DimensionMismatch,
          "overlap_rate: mask lengths differ");
  require(!m1.empty(), ErrorCode::InvalidArgument, "overlap_rate: empty masks");
  std::size_t hamming = 0;
  for (std::size_t i = 0; i < m1.size(); ++i) {
    if ((m1[i] != 0) != (m2[i] != 0)) ++hamming;
  }
  return 1.0 - static_cast<double>(hamming) / static_cast<double>(m1.size());
}

double overlap_probability(int n, double t, TailMethod method) {
  require(n >= 1, ErrorCode::InvalidArgument, "overlap_probability: n must be >= 1");
  require(t > 0.5 && t <= 1.0, ErrorCode::InvalidArgument,
          "overlap_probability: t must satisfy 1/2 < t <= 1");
  if (method == TailMethod::NormalApprox) {
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double lo = (2.0 * t - 1.0) * sqrt_n;
    const double hi = sqrt_n;
    // Phi(hi) - Phi(lo) via erfc tails; stable when both ends are close to 1.
    return 0.5 * (std::erfc(lo / std::sqrt(2.0)) - std::erfc(hi / std::sqrt(2.0)));
  }
  const int k0 = static_cast<int>(std::ceil(t * n - 1e-12));
  const double log2n = n * std::log(2.0);
  const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  double total = 0.0;
  // Terms shrink as i grows past n/2; accumulate smallest first.
  for (int i = n; i >= k0; --i) {
    const double log_term = lg_n1 - std::lgamma(static_cast<double>(i) + 1.0) -
                            std::lgamma(static_cast<double>(n - i) + 1.0) - log2n;
    total += std::exp(log_term);
  }
  return total;
}

double tabular_reconstruction_accuracy(const std::vector<Eigen::VectorXd>& originals,
                                       const std::vector<Eigen::VectorXd>& reconstructions,
                                       const std::vector<FeatureBlock>& blocks) {
  require(originals.size() == reconstructions.size(), ErrorCode::DimensionMismatch,
          "tabular_reconstruction_accuracy: list lengths differ");
  require(!originals.empty() && !blocks.empty(), ErrorCode::InvalidArgument,
          "tabular_reconstruction_accuracy: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    const Eigen::VectorXd& x = originals[i];
    const Eigen::VectorXd& r = reconstructions[i];
    require(x.size() == r.size(), ErrorCode::DimensionMismatch,
            "tabular_reconstruction_accuracy: sample dims differ");
    double correct = 0.0;
    for (const FeatureBlock& b : blocks) {
      require(b.offset + b.width <= x.size(), ErrorCode::DimensionMismatch,
              "tabular_reconstruction_accuracy: block exceeds sample dim");
      if (b.categorical) {
        const auto xs = x.segment(b.offset, b.width);
        const auto rs = r.segment(b.offset, b.width);
        Eigen::Index ax = 0, ar = 0;
        xs.maxCoeff(&ax);
        rs.maxCoeff(&ar);
        if (ax == ar) correct += 1.0;
      } else {
        if (std::abs(x[b.offset] - r[b.offset]) <= 0.05) correct += 1.0;
      }
    }
    total += correct / static_cast<double>(blocks.size());
  }
  return total / static_cast<double>(originals.size());
}

}  // namespace ars

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ars {

// Named metric with the parameters it was computed under, so that reported
// numbers stay comparable across runs.
struct MetricValue {
  std::string name;
  double value = 0.0;
  std::size_t sample_count = 0;
  std::map<std::string, double> parameters;
};

// Column structure of a tabular feature vector: a numeric column spans one
// dimension, a categorical column spans a one-hot block.
struct FeatureBlock {
  std::string name;
  bool categorical = false;
  int offset = 0;
  int width = 1;
};

double mse(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// 10*log10(max^2/mse), capped at 100 dB once mse drops below 1e-10.
double psnr(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double max_value);

// Mean local SSIM over 8x8 windows at stride 1 with C1=(0.01 max)^2,
// C2=(0.03 max)^2. Pixel layout is row-major.
double ssim(const Eigen::VectorXd& a, const Eigen::VectorXd& b, int width,
            int height, double max_value);

struct ReconstructionLoss {
  double signed_value = 0.0;  // negated mean distance
  double raw_mean = 0.0;      // mean distance, the value tables report
};

// Mean squared-error distance between originals and reconstructions,
// reported both with the leakage sign convention and raw.
ReconstructionLoss reconstruction_loss(const std::vector<Eigen::VectorXd>& originals,
                                       const std::vector<Eigen::VectorXd>& reconstructions);

// Mean squared Euclidean distance from each prediction to the fixed vector.
double feature_loss(const std::vector<Eigen::VectorXd>& predictions,
                    const Eigen::VectorXd& fixed_vector);

// Weighted sum of the reconstruction loss and per-attribute feature losses;
// weights must sum to 1 within 1e-12.
double overall_privacy_loss(double reconstruction, const std::vector<double>& attribute_losses,
                            double lambda_reconstruction, const std::vector<double>& lambda_attributes);

double accuracy(const std::vector<Eigen::VectorXd>& predictions,
                const std::vector<Eigen::VectorXd>& labels);

double f1_score(const std::vector<Eigen::VectorXd>& predictions,
                const std::vector<Eigen::VectorXd>& labels, int positive_class);

// 1 - normalized Hamming distance between two equally long bit vectors.
double overlap_rate(const std::vector<std::uint8_t>& m1, const std::vector<std::uint8_t>& m2);

enum class TailMethod { Exact, NormalApprox };

// P[overlap of two uniform random n-bit masks >= t] for 1/2 < t <= 1.
// Exact sums the binomial tail in log space; NormalApprox evaluates
// Phi(sqrt(n)) - Phi((2t-1) sqrt(n)).
double overlap_probability(int n, double t, TailMethod method);

// Per-sample reconstruction accuracy for tabular data: a categorical block
// counts as recovered when its argmax matches, a numeric column when it is
// within 0.05 after scaling; the sample score is the mean over columns.
double tabular_reconstruction_accuracy(const std::vector<Eigen::VectorXd>& originals,
                                       const std::vector<Eigen::VectorXd>& reconstructions,
                                       const std::vector<FeatureBlock>& blocks);

}  // namespace ars

#pragma once

#include <memory>

#include "ars/dataset.hpp"
#include "ars/nn.hpp"

namespace ars {

// Encoder/decoder pair owned by the initiator. Only the encoder half is ever
// published; the decoder stays local.
struct Autoencoder {
  NeuralNet enc;
  NeuralNet dec;

  int latent_dim() const { return enc.output_dim(); }
};

// Query-only access to a published encoder. Holders can encode inputs but
// cannot reach the architecture or parameters behind the handle.
class EncoderHandle {
 public:
  explicit EncoderHandle(const NeuralNet& enc)
      : enc_(std::make_shared<const NeuralNet>(enc)) {}

  Eigen::VectorXd encode(const Eigen::VectorXd& x) const { return forward(*enc_, x); }
  Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& x) const {
    return forward_batch(*enc_, x);
  }

  int input_dim() const { return enc_->input_dim(); }
  int latent_dim() const { return enc_->output_dim(); }

 private:
  std::shared_ptr<const NeuralNet> enc_;
};

struct AutoencoderArch {
  std::vector<int> enc_hidden;  // hidden widths between input and latent
  std::vector<int> dec_hidden;  // hidden widths between latent and output
  Activation hidden_activation = Activation::Relu;
  Activation latent_activation = Activation::Identity;
  Activation output_activation = Activation::Sigmoid;
};

// Trains enc/dec end to end on reconstruction (squared error) and returns
// both halves. Deterministic per (init_seed, cfg.shuffle_seed).
Autoencoder train_autoencoder(const Dataset& ds, int latent_dim,
                              const AutoencoderArch& arch, const TrainConfig& cfg,
                              std::uint64_t init_seed);

EncoderHandle publish(const Autoencoder& ae);

Eigen::VectorXd encode(const EncoderHandle& handle, const Eigen::VectorXd& x);
std::vector<Eigen::VectorXd> encode_all(const EncoderHandle& handle,
                                        const std::vector<Eigen::VectorXd>& xs);

// Initiator-only capability: runs the private decoder half.
Eigen::VectorXd decode(const Autoencoder& ae, const Eigen::VectorXd& z);

void save_autoencoder(const Autoencoder& ae, const std::string& enc_path,
                      const std::string& dec_path);
Autoencoder load_autoencoder(const std::string& enc_path, const std::string& dec_path);

}  // namespace ars

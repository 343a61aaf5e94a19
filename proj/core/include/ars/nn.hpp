#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ars/error.hpp"

namespace ars {

enum class Activation { Identity, Relu, Sigmoid, Tanh, Softmax };
enum class Role { Encoder, Decoder, Classifier, AttributeExtractor };
enum class Loss { SquaredError, CrossEntropy };

struct LayerSpec {
  int input_dim = 0;
  int output_dim = 0;
  Activation activation = Activation::Identity;
};

// Dense feed-forward network with immutable-value semantics: train() returns
// a new net, read-only evaluation is safe to call concurrently. All math is
// in doubles; identical seed and schedule give bit-identical parameters.
struct NeuralNet {
  std::vector<LayerSpec> layers;
  std::vector<Eigen::MatrixXd> weights;  // per layer, output_dim x input_dim
  std::vector<Eigen::VectorXd> biases;   // per layer, output_dim
  Role role = Role::Classifier;
  std::uint64_t seed = 0;

  int input_dim() const { return layers.front().input_dim; }
  int output_dim() const { return layers.back().output_dim; }
};

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 32;
  int epochs = 1;
  Loss loss = Loss::SquaredError;
  std::uint64_t shuffle_seed = 0;
  double momentum = 0.0;  // optional; off by default
};

// Validates the layer chain and initializes weights uniformly in
// [-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))] from `seed`;
// biases start at zero.
NeuralNet make_net(std::vector<LayerSpec> layers, Role role, std::uint64_t seed);

Eigen::VectorXd forward(const NeuralNet& net, const Eigen::VectorXd& input);

// Batched evaluation; samples are columns.
Eigen::MatrixXd forward_batch(const NeuralNet& net, const Eigen::MatrixXd& inputs);

// Per-sample loss. SquaredError is the summed squared difference over output
// dimensions; CrossEntropy pairs only with a softmax output layer and is
// computed in the fused numerically stable form.
double sample_loss(Loss loss, const Eigen::VectorXd& output,
                   const Eigen::VectorXd& target);

double mean_loss(const NeuralNet& net, const std::vector<Eigen::VectorXd>& inputs,
                 const std::vector<Eigen::VectorXd>& targets, Loss loss);

// Mini-batch SGD over (inputs, targets). epochs == 0 is a no-op schedule.
// A non-finite batch loss aborts with diagnostics.
NeuralNet train(const NeuralNet& net, const std::vector<Eigen::VectorXd>& inputs,
                const std::vector<Eigen::VectorXd>& targets, const TrainConfig& cfg);

// Gradient of the loss with respect to the network INPUT, exact up to
// floating point. relu contributes subgradient 0 at its kink.
Eigen::VectorXd input_gradient(const NeuralNet& net, const Eigen::VectorXd& input,
                               Loss loss, const Eigen::VectorXd& target);

// Batched variant; column k of the result is the input gradient for column k.
Eigen::MatrixXd input_gradient_batch(const NeuralNet& net,
                                     const Eigen::MatrixXd& inputs, Loss loss,
                                     const Eigen::MatrixXd& targets);

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);
const char* role_name(Role r);
Role role_from_name(const std::string& name);

// JSON model format: {layers, params (base64 little-endian f64), role, seed}.
// Round-trips are bit-exact.
std::string model_to_json(const NeuralNet& net);
NeuralNet model_from_json(const std::string& text);
void save_model(const NeuralNet& net, const std::string& path);
NeuralNet load_model(const std::string& path);

}  // namespace ars

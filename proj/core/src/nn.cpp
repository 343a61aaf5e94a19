#include "ars/nn.hpp"

#include <cmath>
#include <numeric>

#include "ars/rng.hpp"

namespace ars {

namespace {

void validate_layers(const std::vector<LayerSpec>& layers, Role role) {
  require(!layers.empty(), ErrorCode::InvalidConfig, "network needs at least one layer");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    require(layers[l].input_dim > 0 && layers[l].output_dim > 0,
            ErrorCode::InvalidConfig,
            "layer " + std::to_string(l) + " has non-positive dimensions");
    if (l + 1 < layers.size()) {
      require(layers[l].output_dim == layers[l + 1].input_dim,
              ErrorCode::InvalidConfig,
              "layer " + std::to_string(l) + " output dim " +
                  std::to_string(layers[l].output_dim) + " does not chain into layer " +
                  std::to_string(l + 1));
      require(layers[l].activation != Activation::Softmax, ErrorCode::InvalidConfig,
              "softmax is only permitted as the final layer");
    }
  }
  if (layers.back().activation == Activation::Softmax) {
    require(role == Role::Classifier || role == Role::AttributeExtractor,
            ErrorCode::InvalidConfig, "softmax output requires a classifier role");
  }
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void apply_activation(Activation act, Eigen::MatrixXd& z) {
  switch (act) {
    case Activation::Identity:
      break;
    case Activation::Relu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::Sigmoid:
      z = z.unaryExpr([](double v) { return stable_sigmoid(v); });
      break;
    case Activation::Tanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::Softmax:
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        const double m = z.col(c).maxCoeff();
        Eigen::VectorXd e = (z.col(c).array() - m).exp();
        z.col(c) = e / e.sum();
      }
      break;
  }
}

// Derivative of the activation expressed through its output value a.
Eigen::MatrixXd activation_derivative(Activation act, const Eigen::MatrixXd& a) {
  switch (act) {
    case Activation::Identity:
      return Eigen::MatrixXd::Ones(a.rows(), a.cols());
    case Activation::Relu:
      // relu' at the kink is taken as 0, so a == 0 contributes nothing.
      return (a.array() > 0.0).cast<double>().matrix();
    case Activation::Sigmoid:
      return (a.array() * (1.0 - a.array())).matrix();
    case Activation::Tanh:
      return (1.0 - a.array().square()).matrix();
    case Activation::Softmax:
      throw Error(ErrorCode::InvalidConfig,
                  "softmax derivative is only available fused with cross entropy");
  }
  return {};
}

struct ForwardTrace {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] = inputs
};

ForwardTrace run_forward(const NeuralNet& net, const Eigen::MatrixXd& inputs) {
  ForwardTrace trace;
  trace.activations.reserve(net.layers.size() + 1);
  trace.activations.push_back(inputs);
  Eigen::MatrixXd a = inputs;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Eigen::MatrixXd z = (net.weights[l] * a).colwise() + net.biases[l];
    apply_activation(net.layers[l].activation, z);
    if (!z.allFinite()) {
      throw Error(ErrorCode::NonFiniteValue,
                  "non-finite activation at layer " + std::to_string(l));
    }
    a = z;
    trace.activations.push_back(a);
  }
  return trace;
}

// Deltas with respect to pre-activations, starting from the output layer.
// Returns one matrix per layer. Fused softmax + cross entropy yields p - t.
std::vector<Eigen::MatrixXd> run_backward(const NeuralNet& net,
                                          const ForwardTrace& trace, Loss loss,
                                          const Eigen::MatrixXd& targets) {
  const std::size_t num_layers = net.layers.size();
  std::vector<Eigen::MatrixXd> deltas(num_layers);
  const Eigen::MatrixXd& output = trace.activations.back();
  const Activation out_act = net.layers.back().activation;

  if (loss == Loss::CrossEntropy) {
    require(out_act == Activation::Softmax, ErrorCode::InvalidConfig,
            "cross entropy requires a softmax output layer");
    deltas[num_layers - 1] = output - targets;
  } else {
    require(out_act != Activation::Softmax, ErrorCode::InvalidConfig,
            "softmax output requires the cross entropy loss");
    Eigen::MatrixXd dl = 2.0 * (output - targets);
    deltas[num_layers - 1] =
        dl.cwiseProduct(activation_derivative(out_act, output));
  }

  for (std::size_t l = num_layers - 1; l > 0; --l) {
    Eigen::MatrixXd back = net.weights[l].transpose() * deltas[l];
    deltas[l - 1] = back.cwiseProduct(
        activation_derivative(net.layers[l - 1].activation, trace.activations[l]));
    if (!deltas[l - 1].allFinite()) {
      throw Error(ErrorCode::NonFiniteValue,
                  "non-finite gradient at layer " + std::to_string(l - 1));
    }
  }
  return deltas;
}

double batch_loss_sum(Loss loss, const Eigen::MatrixXd& output,
                      const Eigen::MatrixXd& targets) {
  if (loss == Loss::SquaredError) {
    return (output - targets).squaredNorm();
  }
  // Cross entropy from softmax outputs; the small floor only guards
  // log(0) for targets the model assigns exactly zero mass.
  double total = 0.0;
  for (Eigen::Index c = 0; c < output.cols(); ++c) {
    for (Eigen::Index r = 0; r < output.rows(); ++r) {
      if (targets(r, c) != 0.0) {
        total -= targets(r, c) * std::log(std::max(output(r, c), 1e-300));
      }
    }
  }
  return total;
}

Eigen::MatrixXd to_matrix(const std::vector<Eigen::VectorXd>& columns,
                          Eigen::Index expected_rows, const char* what) {
  require(!columns.empty(), ErrorCode::InvalidArgument,
          std::string(what) + ": empty list");
  Eigen::MatrixXd m(expected_rows, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    require(columns[i].size() == expected_rows, ErrorCode::DimensionMismatch,
            std::string(what) + "[" + std::to_string(i) + "] has length " +
                std::to_string(columns[i].size()) + ", expected " +
                std::to_string(expected_rows));
    m.col(static_cast<Eigen::Index>(i)) = columns[i];
  }
  return m;
}

}  // namespace

NeuralNet make_net(std::vector<LayerSpec> layers, Role role, std::uint64_t seed) {
  validate_layers(layers, role);
  NeuralNet net;
  net.layers = std::move(layers);
  net.role = role;
  net.seed = seed;
  Rng rng(seed);
  for (const LayerSpec& spec : net.layers) {
    const double bound =
        std::sqrt(6.0 / (static_cast<double>(spec.input_dim) + spec.output_dim));
    Eigen::MatrixXd w(spec.output_dim, spec.input_dim);
    for (int i = 0; i < spec.output_dim; ++i) {
      for (int j = 0; j < spec.input_dim; ++j) {
        w(i, j) = rng.uniform(-bound, bound);
      }
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(spec.output_dim));
  }
  return net;
}

Eigen::VectorXd forward(const NeuralNet& net, const Eigen::VectorXd& input) {
  require(input.size() == net.input_dim(), ErrorCode::DimensionMismatch,
          "forward: input length " + std::to_string(input.size()) +
              " does not match first layer input dim " +
              std::to_string(net.input_dim()));
  return run_forward(net, input).activations.back().col(0);
}

Eigen::MatrixXd forward_batch(const NeuralNet& net, const Eigen::MatrixXd& inputs) {
  require(inputs.rows() == net.input_dim(), ErrorCode::DimensionMismatch,
          "forward_batch: input rows do not match first layer input dim");
  return run_forward(net, inputs).activations.back();
}

double sample_loss(Loss loss, const Eigen::VectorXd& output,
                   const Eigen::VectorXd& target) {
  require(output.size() == target.size(), ErrorCode::DimensionMismatch,
          "loss: output and target lengths differ");
  return batch_loss_sum(loss, output, target);
}

double mean_loss(const NeuralNet& net, const std::vector<Eigen::VectorXd>& inputs,
                 const std::vector<Eigen::VectorXd>& targets, Loss loss) {
  require(inputs.size() == targets.size() && !inputs.empty(),
          ErrorCode::InvalidArgument, "mean_loss: mismatched or empty lists");
  Eigen::MatrixXd x = to_matrix(inputs, net.input_dim(), "inputs");
  Eigen::MatrixXd t = to_matrix(targets, net.output_dim(), "targets");
  Eigen::MatrixXd y = forward_batch(net, x);
  return batch_loss_sum(loss, y, t) / static_cast<double>(inputs.size());
}

NeuralNet train(const NeuralNet& net, const std::vector<Eigen::VectorXd>& inputs,
                const std::vector<Eigen::VectorXd>& targets, const TrainConfig& cfg) {
  require(inputs.size() == targets.size(), ErrorCode::InvalidArgument,
          "train: |inputs| != |targets|");
  require(!inputs.empty(), ErrorCode::InvalidArgument, "train: empty dataset");
  require(cfg.learning_rate > 0.0, ErrorCode::InvalidConfig,
          "train: learning_rate must be positive");
  require(cfg.batch_size >= 1, ErrorCode::InvalidConfig,
          "train: batch_size must be at least 1");
  require(static_cast<std::size_t>(cfg.batch_size) <= inputs.size(),
          ErrorCode::InvalidConfig, "train: batch_size exceeds dataset size");
  require(cfg.epochs >= 0, ErrorCode::InvalidConfig, "train: negative epochs");

  const Eigen::MatrixXd all_x = to_matrix(inputs, net.input_dim(), "inputs");
  const Eigen::MatrixXd all_t = to_matrix(targets, net.output_dim(), "targets");

  NeuralNet out = net;
  if (cfg.epochs == 0) return out;

  std::vector<Eigen::MatrixXd> vel_w;
  std::vector<Eigen::VectorXd> vel_b;
  if (cfg.momentum != 0.0) {
    for (std::size_t l = 0; l < out.weights.size(); ++l) {
      vel_w.push_back(Eigen::MatrixXd::Zero(out.weights[l].rows(), out.weights[l].cols()));
      vel_b.push_back(Eigen::VectorXd::Zero(out.biases[l].size()));
    }
  }

  const std::size_t n = inputs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.shuffle_seed);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t b = std::min(static_cast<std::size_t>(cfg.batch_size), n - start);
      Eigen::MatrixXd x(all_x.rows(), static_cast<Eigen::Index>(b));
      Eigen::MatrixXd t(all_t.rows(), static_cast<Eigen::Index>(b));
      for (std::size_t k = 0; k < b; ++k) {
        x.col(static_cast<Eigen::Index>(k)) = all_x.col(static_cast<Eigen::Index>(order[start + k]));
        t.col(static_cast<Eigen::Index>(k)) = all_t.col(static_cast<Eigen::Index>(order[start + k]));
      }

      ForwardTrace trace = run_forward(out, x);
      const double loss_value =
          batch_loss_sum(cfg.loss, trace.activations.back(), t) / static_cast<double>(b);
      if (!std::isfinite(loss_value)) {
        throw Error(ErrorCode::NonFiniteValue,
                    "train: non-finite loss at epoch " + std::to_string(epoch) +
                        ", batch offset " + std::to_string(start) +
                        " (learning rate too high?)");
      }

      std::vector<Eigen::MatrixXd> deltas = run_backward(out, trace, cfg.loss, t);
      const double inv_b = 1.0 / static_cast<double>(b);
      for (std::size_t l = 0; l < out.weights.size(); ++l) {
        Eigen::MatrixXd grad_w = deltas[l] * trace.activations[l].transpose() * inv_b;
        Eigen::VectorXd grad_b = deltas[l].rowwise().sum() * inv_b;
        if (cfg.momentum != 0.0) {
          vel_w[l] = cfg.momentum * vel_w[l] + grad_w;
          vel_b[l] = cfg.momentum * vel_b[l] + grad_b;
          out.weights[l] -= cfg.learning_rate * vel_w[l];
          out.biases[l] -= cfg.learning_rate * vel_b[l];
        } else {
          out.weights[l] -= cfg.learning_rate * grad_w;
          out.biases[l] -= cfg.learning_rate * grad_b;
        }
      }
    }
  }
  return out;
}

Eigen::VectorXd input_gradient(const NeuralNet& net, const Eigen::VectorXd& input,
                               Loss loss, const Eigen::VectorXd& target) {
  require(target.size() == net.output_dim(), ErrorCode::DimensionMismatch,
          "input_gradient: target length does not match output dim");
  return input_gradient_batch(net, input, loss, target).col(0);
}

Eigen::MatrixXd input_gradient_batch(const NeuralNet& net,
                                     const Eigen::MatrixXd& inputs, Loss loss,
                                     const Eigen::MatrixXd& targets) {
  require(inputs.rows() == net.input_dim(), ErrorCode::DimensionMismatch,
          "input_gradient_batch: input rows do not match input dim");
  require(targets.rows() == net.output_dim(), ErrorCode::DimensionMismatch,
          "input_gradient_batch: target rows do not match output dim");
  require(inputs.cols() == targets.cols(), ErrorCode::DimensionMismatch,
          "input_gradient_batch: column counts differ");
  ForwardTrace trace = run_forward(net, inputs);
  std::vector<Eigen::MatrixXd> deltas = run_backward(net, trace, loss, targets);
  Eigen::MatrixXd grad = net.weights[0].transpose() * deltas[0];
  if (!grad.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "non-finite gradient at layer 0");
  }
  return grad;
}

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Softmax: return "softmax";
  }
  return "identity";
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  if (name == "softmax") return Activation::Softmax;
  throw Error(ErrorCode::ParseFailure, "unknown activation '" + name + "'");
}

const char* role_name(Role r) {
  switch (r) {
    case Role::Encoder: return "encoder";
    case Role::Decoder: return "decoder";
    case Role::Classifier: return "classifier";
    case Role::AttributeExtractor: return "attribute_extractor";
  }
  return "classifier";
}

Role role_from_name(const std::string& name) {
  if (name == "encoder") return Role::Encoder;
  if (name == "decoder") return Role::Decoder;
  if (name == "classifier") return Role::Classifier;
  if (name == "attribute_extractor") return Role::AttributeExtractor;
  throw Error(ErrorCode::ParseFailure, "unknown role '" + name + "'");
}

}  // namespace ars

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ars/bytes.hpp"
#include "ars/nn.hpp"

namespace ars {

namespace {

std::string matrix_to_b64(const Eigen::MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      flat.push_back(m(i, j));
    }
  }
  return base64_encode(pack_f64_le(flat));
}

Eigen::MatrixXd matrix_from_b64(const std::string& text, Eigen::Index rows,
                                Eigen::Index cols) {
  std::vector<double> flat = unpack_f64_le(base64_decode(text));
  require(static_cast<Eigen::Index>(flat.size()) == rows * cols,
          ErrorCode::ParseFailure, "model params have unexpected length");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = flat[k++];
    }
  }
  return m;
}

}  // namespace

std::string model_to_json(const NeuralNet& net) {
  nlohmann::json doc;
  doc["role"] = role_name(net.role);
  doc["seed"] = net.seed;
  doc["layers"] = nlohmann::json::array();
  doc["params"] = nlohmann::json::array();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    doc["layers"].push_back({{"input_dim", net.layers[l].input_dim},
                             {"output_dim", net.layers[l].output_dim},
                             {"activation", activation_name(net.layers[l].activation)}});
    std::vector<double> bias(net.biases[l].data(),
                             net.biases[l].data() + net.biases[l].size());
    doc["params"].push_back({{"weights", matrix_to_b64(net.weights[l])},
                             {"bias", base64_encode(pack_f64_le(bias))}});
  }
  return doc.dump(2);
}

NeuralNet model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure, std::string("model JSON: ") + e.what());
  }
  try {
    NeuralNet net;
    net.role = role_from_name(doc.at("role").get<std::string>());
    net.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& layer : doc.at("layers")) {
      net.layers.push_back({layer.at("input_dim").get<int>(),
                            layer.at("output_dim").get<int>(),
                            activation_from_name(layer.at("activation").get<std::string>())});
    }
    require(doc.at("params").size() == net.layers.size(), ErrorCode::ParseFailure,
            "model JSON: params/layers count mismatch");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      const auto& p = doc.at("params")[l];
      net.weights.push_back(matrix_from_b64(p.at("weights").get<std::string>(),
                                            net.layers[l].output_dim,
                                            net.layers[l].input_dim));
      std::vector<double> bias =
          unpack_f64_le(base64_decode(p.at("bias").get<std::string>()));
      require(static_cast<int>(bias.size()) == net.layers[l].output_dim,
              ErrorCode::ParseFailure, "model JSON: bias length mismatch");
      net.biases.push_back(
          Eigen::Map<const Eigen::VectorXd>(bias.data(), static_cast<Eigen::Index>(bias.size())));
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure, std::string("model JSON: ") + e.what());
  }
}

void save_model(const NeuralNet& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  out << model_to_json(net) << '\n';
  require(out.good(), ErrorCode::IoFailure, "short write to '" + path + "'");
}

NeuralNet load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoFailure, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace ars

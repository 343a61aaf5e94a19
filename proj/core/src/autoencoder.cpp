#include "ars/autoencoder.hpp"

namespace ars {

namespace {

std::vector<LayerSpec> chain(int in_dim, const std::vector<int>& hidden, int out_dim,
                             Activation hidden_act, Activation out_act) {
  std::vector<LayerSpec> layers;
  int prev = in_dim;
  for (int width : hidden) {
    layers.push_back({prev, width, hidden_act});
    prev = width;
  }
  layers.push_back({prev, out_dim, out_act});
  return layers;
}

}  // namespace

Autoencoder train_autoencoder(const Dataset& ds, int latent_dim,
                              const AutoencoderArch& arch, const TrainConfig& cfg,
                              std::uint64_t init_seed) {
  require(!ds.samples.empty(), ErrorCode::InvalidArgument,
          "train_autoencoder: empty dataset");
  const int d = ds.feature_dim();
  require(latent_dim >= 1 && latent_dim <= d, ErrorCode::InvalidConfig,
          "train_autoencoder: latent dim must be in [1, feature dim]");
  require(cfg.loss == Loss::SquaredError, ErrorCode::InvalidConfig,
          "train_autoencoder: reconstruction uses the squared error loss");

  std::vector<LayerSpec> enc_layers = chain(d, arch.enc_hidden, latent_dim,
                                            arch.hidden_activation, arch.latent_activation);
  std::vector<LayerSpec> dec_layers = chain(latent_dim, arch.dec_hidden, d,
                                            arch.hidden_activation, arch.output_activation);

  std::vector<LayerSpec> all_layers = enc_layers;
  all_layers.insert(all_layers.end(), dec_layers.begin(), dec_layers.end());
  NeuralNet net = make_net(all_layers, Role::Encoder, init_seed);
  net = train(net, ds.samples, ds.samples, cfg);

  Autoencoder ae;
  const std::size_t split = enc_layers.size();
  ae.enc.role = Role::Encoder;
  ae.enc.seed = init_seed;
  ae.dec.role = Role::Decoder;
  ae.dec.seed = init_seed;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    NeuralNet& half = l < split ? ae.enc : ae.dec;
    half.layers.push_back(net.layers[l]);
    half.weights.push_back(net.weights[l]);
    half.biases.push_back(net.biases[l]);
  }
  return ae;
}

EncoderHandle publish(const Autoencoder& ae) { return EncoderHandle(ae.enc); }

Eigen::VectorXd encode(const EncoderHandle& handle, const Eigen::VectorXd& x) {
  return handle.encode(x);
}

std::vector<Eigen::VectorXd> encode_all(const EncoderHandle& handle,
                                        const std::vector<Eigen::VectorXd>& xs) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(handle.encode(x));
  return out;
}

Eigen::VectorXd decode(const Autoencoder& ae, const Eigen::VectorXd& z) {
  return forward(ae.dec, z);
}

void save_autoencoder(const Autoencoder& ae, const std::string& enc_path,
                      const std::string& dec_path) {
  save_model(ae.enc, enc_path);
  save_model(ae.dec, dec_path);
}

Autoencoder load_autoencoder(const std::string& enc_path, const std::string& dec_path) {
  Autoencoder ae;
  ae.enc = load_model(enc_path);
  ae.dec = load_model(dec_path);
  require(ae.enc.output_dim() == ae.dec.input_dim(), ErrorCode::InvalidConfig,
          "autoencoder halves do not chain: latent dims differ");
  return ae;
}

}  // namespace ars

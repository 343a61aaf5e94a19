#include <doctest.h>

#include <cstring>

#include "ars/nn.hpp"
#include "ars/rng.hpp"
#include "testutil.hpp"

using namespace ars;

namespace {

NeuralNet identity_net(int dim) {
  NeuralNet net;
  net.layers = {{dim, dim, Activation::Identity}};
  net.weights = {Eigen::MatrixXd::Identity(dim, dim)};
  net.biases = {Eigen::VectorXd::Zero(dim)};
  net.role = Role::Decoder;
  return net;
}

NeuralNet random_net(const std::vector<LayerSpec>& layers, std::uint64_t seed) {
  return make_net(layers, Role::Decoder, seed);
}

}  // namespace

TEST_CASE("forward through an identity layer returns the input") {
  NeuralNet net = identity_net(2);
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  CHECK(forward(net, x) == x);
}

TEST_CASE("forward applies relu") {
  NeuralNet net = identity_net(2);
  net.layers[0].activation = Activation::Relu;
  Eigen::VectorXd x(2);
  x << -3.0, 4.0;
  const Eigen::VectorXd y = forward(net, x);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 4.0);
}

TEST_CASE("forward matches a hand-evaluated 2-2-2 matrix chain") {
  NeuralNet net = random_net({{2, 2, Activation::Tanh}, {2, 2, Activation::Identity}}, 99);
  Eigen::VectorXd x(2);
  x << 0.5, -0.5;

  // independent scalar evaluation of the same parameters
  double h0 = std::tanh(net.weights[0](0, 0) * x[0] + net.weights[0](0, 1) * x[1] +
                        net.biases[0][0]);
  double h1 = std::tanh(net.weights[0](1, 0) * x[0] + net.weights[0](1, 1) * x[1] +
                        net.biases[0][1]);
  double y0 = net.weights[1](0, 0) * h0 + net.weights[1](0, 1) * h1 + net.biases[1][0];
  double y1 = net.weights[1](1, 0) * h0 + net.weights[1](1, 1) * h1 + net.biases[1][1];

  const Eigen::VectorXd y = forward(net, x);
  CHECK(y[0] == doctest::Approx(y0).epsilon(1e-12));
  CHECK(y[1] == doctest::Approx(y1).epsilon(1e-12));
}

TEST_CASE("forward rejects dimension mismatches") {
  NeuralNet net = identity_net(3);
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  CHECK_THROWS_WITH_AS(forward(net, x) /* wrong length */,
                       doctest::Contains("does not match"), Error);
}

TEST_CASE("make_net validates the layer chain") {
  CHECK_THROWS_AS(make_net({{2, 3, Activation::Relu}, {4, 2, Activation::Identity}},
                           Role::Classifier, 1),
                  Error);
  CHECK_THROWS_AS(make_net({{0, 3, Activation::Relu}}, Role::Classifier, 1), Error);
  // softmax only on the final layer of a classifier
  CHECK_THROWS_AS(make_net({{2, 2, Activation::Softmax}, {2, 2, Activation::Identity}},
                           Role::Classifier, 1),
                  Error);
  CHECK_THROWS_AS(make_net({{2, 2, Activation::Softmax}}, Role::Decoder, 1), Error);
}

TEST_CASE("xavier initialization is bounded and seeded") {
  NeuralNet a = make_net({{30, 20, Activation::Relu}}, Role::Encoder, 7);
  NeuralNet b = make_net({{30, 20, Activation::Relu}}, Role::Encoder, 7);
  NeuralNet c = make_net({{30, 20, Activation::Relu}}, Role::Encoder, 8);
  CHECK(a.weights[0] == b.weights[0]);
  CHECK(a.weights[0] != c.weights[0]);
  const double bound = std::sqrt(6.0 / 50.0);
  CHECK(a.weights[0].cwiseAbs().maxCoeff() <= bound);
  CHECK(a.biases[0].isZero());
}

TEST_CASE("train on y = 2x recovers the slope (least squares oracle)") {
  // closed form: for noiseless y = 2x the optimum weight is exactly 2
  std::vector<Eigen::VectorXd> xs, ys;
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(1), y(1);
    x[0] = -1.0 + 2.0 * i / 19.0;
    y[0] = 2.0 * x[0];
    xs.push_back(x);
    ys.push_back(y);
  }
  NeuralNet net = make_net({{1, 1, Activation::Identity}}, Role::Classifier, 3);
  TrainConfig cfg{0.1, 4, 200, Loss::SquaredError, 17, 0.0};
  NeuralNet fitted = train(net, xs, ys, cfg);
  CHECK(std::abs(fitted.weights[0](0, 0) - 2.0) < 0.05);
  CHECK(std::abs(fitted.biases[0][0]) < 0.05);
}

TEST_CASE("train with zero epochs is a no-op") {
  NeuralNet net = make_net({{2, 2, Activation::Relu}}, Role::Classifier, 5);
  std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Ones(2)};
  std::vector<Eigen::VectorXd> ys{Eigen::VectorXd::Zero(2)};
  TrainConfig cfg{0.1, 1, 0, Loss::SquaredError, 0, 0.0};
  NeuralNet same = train(net, xs, ys, cfg);
  CHECK(same.weights[0] == net.weights[0]);
  CHECK(same.biases[0] == net.biases[0]);
}

TEST_CASE("train reduces the loss on a separable classification task") {
  Rng rng(21);
  std::vector<Eigen::VectorXd> xs, ys;
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd x(2);
    const int cls = i % 2;
    x[0] = (cls == 0 ? -0.5 : 0.5) + 0.1 * rng.gaussian();
    x[1] = (cls == 0 ? 0.5 : -0.5) + 0.1 * rng.gaussian();
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
    y[cls] = 1.0;
    xs.push_back(x);
    ys.push_back(y);
  }
  NeuralNet net = make_net({{2, 8, Activation::Relu}, {8, 2, Activation::Softmax}},
                           Role::Classifier, 9);
  const double before = mean_loss(net, xs, ys, Loss::CrossEntropy);
  TrainConfig cfg{0.2, 16, 30, Loss::CrossEntropy, 4, 0.0};
  NeuralNet fitted = train(net, xs, ys, cfg);
  const double after = mean_loss(fitted, xs, ys, Loss::CrossEntropy);
  CHECK(after < before);
  CHECK(after < 0.2);
}

TEST_CASE("train rejects invalid schedules and non-finite losses") {
  NeuralNet net = make_net({{1, 1, Activation::Identity}}, Role::Classifier, 3);
  std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Ones(1)};
  std::vector<Eigen::VectorXd> ys{Eigen::VectorXd::Ones(1)};
  CHECK_THROWS_AS(train(net, xs, ys, {0.0, 1, 1, Loss::SquaredError, 0, 0.0}), Error);
  CHECK_THROWS_AS(train(net, xs, ys, {0.1, 2, 1, Loss::SquaredError, 0, 0.0}), Error);
  CHECK_THROWS_AS(train(net, {}, {}, {0.1, 1, 1, Loss::SquaredError, 0, 0.0}), Error);

  // an absurd learning rate diverges and must abort, not return NaN weights
  std::vector<Eigen::VectorXd> big_x, big_y;
  Rng rng(5);
  for (int i = 0; i < 32; ++i) {
    Eigen::VectorXd x(1), y(1);
    x[0] = rng.uniform(1.0, 2.0);
    y[0] = -x[0];
    big_x.push_back(x);
    big_y.push_back(y);
  }
  CHECK_THROWS_WITH_AS(train(net, big_x, big_y, {1e18, 8, 50, Loss::SquaredError, 0, 0.0}),
                       doctest::Contains("non-finite"), Error);
}

TEST_CASE("training is bit-identical across runs with one seed") {
  Rng rng(33);
  std::vector<Eigen::VectorXd> xs, ys;
  for (int i = 0; i < 64; ++i) {
    Eigen::VectorXd x(3), y(2);
    for (int j = 0; j < 3; ++j) x[j] = rng.uniform();
    y[0] = x.sum();
    y[1] = x[0] - x[2];
    xs.push_back(x);
    ys.push_back(y);
  }
  const std::vector<LayerSpec> spec{{3, 8, Activation::Tanh}, {8, 2, Activation::Identity}};
  TrainConfig cfg{0.05, 8, 5, Loss::SquaredError, 77, 0.0};
  NeuralNet a = train(make_net(spec, Role::Classifier, 55), xs, ys, cfg);
  NeuralNet b = train(make_net(spec, Role::Classifier, 55), xs, ys, cfg);
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    CHECK(std::memcmp(a.weights[l].data(), b.weights[l].data(),
                      sizeof(double) * a.weights[l].size()) == 0);
    CHECK(std::memcmp(a.biases[l].data(), b.biases[l].data(),
                      sizeof(double) * a.biases[l].size()) == 0);
  }
}

TEST_CASE("input gradient of the identity map is 2(z - t)") {
  NeuralNet net = identity_net(3);
  Eigen::VectorXd z(3), t(3);
  z << 0.5, -1.0, 2.0;
  t << 0.0, 0.0, 1.0;
  const Eigen::VectorXd g = input_gradient(net, z, Loss::SquaredError, t);
  CHECK((g - 2.0 * (z - t)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("input gradient is zero where the loss is locally constant") {
  // all-negative pre-activations under relu: output constant zero near z
  NeuralNet net = identity_net(2);
  net.layers[0].activation = Activation::Relu;
  Eigen::VectorXd z(2), t(2);
  z << -5.0, -3.0;
  t << 0.0, 0.0;
  const Eigen::VectorXd g = input_gradient(net, z, Loss::SquaredError, t);
  CHECK(g.isZero());
}

TEST_CASE("input gradient matches central finite differences on seeded nets") {
  const std::vector<LayerSpec> spec{{4, 6, Activation::Tanh},
                                    {6, 5, Activation::Sigmoid},
                                    {5, 3, Activation::Identity}};
  Rng rng(2024);
  for (int round = 0; round < 20; ++round) {
    NeuralNet net = make_net(spec, Role::Decoder, 1000 + round);
    Eigen::VectorXd z(4), t(3);
    for (int i = 0; i < 4; ++i) z[i] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < 3; ++i) t[i] = rng.uniform(-1.0, 1.0);
    const Eigen::VectorXd g = input_gradient(net, z, Loss::SquaredError, t);
    const Eigen::VectorXd fd = testutil::fd_input_gradient(net, z, Loss::SquaredError, t);
    CHECK(testutil::gradient_gap(g, fd) < 1e-4);
  }
}

TEST_CASE("input gradient matches finite differences for softmax + cross entropy") {
  const std::vector<LayerSpec> spec{{3, 8, Activation::Relu}, {8, 4, Activation::Softmax}};
  Rng rng(77);
  for (int round = 0; round < 10; ++round) {
    NeuralNet net = make_net(spec, Role::Classifier, 31 + round);
    Eigen::VectorXd z(3);
    for (int i = 0; i < 3; ++i) z[i] = rng.uniform(-1.0, 1.0) + 0.01;
    Eigen::VectorXd t = Eigen::VectorXd::Zero(4);
    t[static_cast<Eigen::Index>(rng.below(4))] = 1.0;
    const Eigen::VectorXd g = input_gradient(net, z, Loss::CrossEntropy, t);
    const Eigen::VectorXd fd = testutil::fd_input_gradient(net, z, Loss::CrossEntropy, t);
    CHECK(testutil::gradient_gap(g, fd) < 1e-4);
  }
}

TEST_CASE("forward output stays finite for finite inputs across random nets") {
  Rng rng(404);
  for (int round = 0; round < 50; ++round) {
    const int in = 1 + static_cast<int>(rng.below(6));
    const int mid = 1 + static_cast<int>(rng.below(6));
    const int out = 1 + static_cast<int>(rng.below(6));
    const Activation acts[] = {Activation::Identity, Activation::Relu,
                               Activation::Sigmoid, Activation::Tanh};
    NeuralNet net = make_net({{in, mid, acts[rng.below(4)]}, {mid, out, acts[rng.below(4)]}},
                             Role::Decoder, 9000 + round);
    Eigen::VectorXd x(in);
    for (int i = 0; i < in; ++i) x[i] = rng.uniform(-100.0, 100.0);
    CHECK(forward(net, x).allFinite());
  }
}

TEST_CASE("model JSON round-trips bit-exactly") {
  NeuralNet net = make_net({{5, 7, Activation::Relu}, {7, 3, Activation::Softmax}},
                           Role::Classifier, 0xdeadbeefcafe);
  // make the parameters less regular than a fresh init
  net.biases[0] = Eigen::VectorXd::Random(7);
  const std::string text = model_to_json(net);
  const NeuralNet back = model_from_json(text);
  CHECK(back.role == net.role);
  CHECK(back.seed == net.seed);
  REQUIRE(back.layers.size() == net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    CHECK(back.layers[l].activation == net.layers[l].activation);
    CHECK(std::memcmp(back.weights[l].data(), net.weights[l].data(),
                      sizeof(double) * net.weights[l].size()) == 0);
    CHECK(std::memcmp(back.biases[l].data(), net.biases[l].data(),
                      sizeof(double) * net.biases[l].size()) == 0);
  }
  // and the serialized text itself is stable
  CHECK(model_to_json(back) == text);
}

TEST_CASE("model files save and load") {
  testutil::TempDir tmp("model_io");
  NeuralNet net = make_net({{3, 2, Activation::Tanh}}, Role::Encoder, 12);
  save_model(net, tmp.path("m.json"));
  const NeuralNet back = load_model(tmp.path("m.json"));
  CHECK(back.weights[0] == net.weights[0]);
  CHECK_THROWS_AS(load_model(tmp.path("missing.json")), Error);
  CHECK_THROWS_AS(model_from_json("{not json"), Error);
}

#include <doctest.h>

#include <cmath>

#include "ars/metrics.hpp"
#include "ars/rng.hpp"

using namespace ars;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}
}  // namespace

TEST_CASE("mse and psnr closed forms") {
  const Eigen::VectorXd a = vec({1.0, 0.0, 0.5});
  CHECK(mse(a, a) == 0.0);
  CHECK(psnr(a, a, 1.0) == 100.0);  // capped for identical inputs

  // mse = 0.01 at max 1 gives exactly 20 dB
  Eigen::VectorXd b = a;
  b[0] -= std::sqrt(0.03);  // (0.03)/3 = 0.01
  CHECK(mse(a, b) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(psnr(a, b, 1.0) == doctest::Approx(20.0).epsilon(1e-9));

  CHECK_THROWS_AS(mse(a, vec({1.0})), Error);
}

TEST_CASE("psnr strictly decreases as mse grows") {
  const Eigen::VectorXd a = Eigen::VectorXd::Zero(16);
  double last = 1e9;
  for (double step : {0.01, 0.02, 0.05, 0.1, 0.3}) {
    const Eigen::VectorXd b = Eigen::VectorXd::Constant(16, step);
    const double p = psnr(a, b, 1.0);
    CHECK(p < last);
    last = p;
  }
}

TEST_CASE("ssim is 1 for identical images and degrades with noise") {
  Rng rng(3);
  Eigen::VectorXd img(784);
  for (int i = 0; i < 784; ++i) img[i] = rng.uniform();
  CHECK(ssim(img, img, 28, 28, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd noisy = img;
  for (int i = 0; i < 784; ++i) {
    noisy[i] = std::clamp(noisy[i] + rng.uniform(-0.3, 0.3), 0.0, 1.0);
  }
  const double s = ssim(img, noisy, 28, 28, 1.0);
  CHECK(s < 0.9);
  CHECK(s >= -1.0);
  CHECK(s <= 1.0);

  CHECK_THROWS_AS(ssim(img, noisy, 7, 112, 1.0), Error);   // window larger than side
  CHECK_THROWS_AS(ssim(img, noisy, 28, 27, 1.0), Error);   // dims do not match
}

TEST_CASE("reconstruction loss reports both sign conventions") {
  const Eigen::VectorXd x = vec({1.0, 0.0});
  Eigen::VectorXd xbar = x;
  SUBCASE("perfect reconstruction") {
    const auto loss = reconstruction_loss({x}, {xbar});
    CHECK(loss.raw_mean == 0.0);
    CHECK(loss.signed_value == 0.0);
  }
  SUBCASE("single sample with distance 0.5") {
    xbar = vec({0.0, 0.0});  // squared diffs (1, 0), mean 0.5
    const auto loss = reconstruction_loss({x}, {xbar});
    CHECK(loss.raw_mean == doctest::Approx(0.5));
    CHECK(loss.signed_value == doctest::Approx(-0.5));
  }
  CHECK_THROWS_AS(reconstruction_loss({}, {}), Error);
}

TEST_CASE("feature loss arithmetic example") {
  const Eigen::VectorXd r = vec({1.0, 0.0});
  CHECK(feature_loss({r, r, r}, r) == 0.0);
  // predictions (1,0) and (0,1): squared distances 0 and 2, mean 1
  CHECK(feature_loss({vec({1.0, 0.0}), vec({0.0, 1.0})}, r) == doctest::Approx(1.0));
  CHECK_THROWS_AS(feature_loss({}, r), Error);
}

TEST_CASE("overall privacy loss is the lambda-weighted sum") {
  CHECK(overall_privacy_loss(0.4, {}, 1.0, {}) == doctest::Approx(0.4));
  CHECK(overall_privacy_loss(0.3, {0.6, 0.9}, 1.0 / 3, {1.0 / 3, 1.0 / 3}) ==
        doctest::Approx((0.3 + 0.6 + 0.9) / 3));
  CHECK_THROWS_AS(overall_privacy_loss(0.3, {0.6}, 0.5, {0.6}), Error);
  CHECK_THROWS_AS(overall_privacy_loss(0.3, {0.6}, 0.5, {0.5, 0.1}), Error);
}

TEST_CASE("accuracy and f1 definitions") {
  const Eigen::VectorXd pos = vec({0.1, 0.9});
  const Eigen::VectorXd neg = vec({0.8, 0.2});
  SUBCASE("all correct") {
    CHECK(accuracy({pos, neg}, {pos, neg}) == 1.0);
    CHECK(f1_score({pos, neg}, {pos, neg}, 1) == 1.0);
  }
  SUBCASE("TP=2 FP=1 FN=1 gives F1 = 2/3") {
    const std::vector<Eigen::VectorXd> preds{pos, pos, pos, neg, neg};
    const std::vector<Eigen::VectorXd> truth{pos, pos, neg, pos, neg};
    CHECK(f1_score(preds, truth, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(accuracy(preds, truth) == doctest::Approx(3.0 / 5.0));
  }
  CHECK_THROWS_AS(accuracy({}, {}), Error);
}

TEST_CASE("overlap rate examples") {
  const std::vector<std::uint8_t> m1{1, 0, 1, 1};
  const std::vector<std::uint8_t> m2{1, 1, 1, 0};
  CHECK(overlap_rate(m1, m1) == 1.0);
  const std::vector<std::uint8_t> complement{0, 1, 0, 0};
  CHECK(overlap_rate(m1, complement) == 0.0);
  CHECK(overlap_rate(m1, m2) == doctest::Approx(0.5));  // Hamming 2 of 4
  CHECK_THROWS_AS(overlap_rate(m1, {1, 0}), Error);
}

TEST_CASE("overlap probability matches the enumerated tail for n = 4") {
  // brute force over all 2^4 equally likely agreement patterns:
  // P[X >= 3] = (C(4,3) + C(4,4)) / 16 = 5/16
  int hits = 0;
  for (int pattern = 0; pattern < 16; ++pattern) {
    const int agreements = __builtin_popcount(static_cast<unsigned>(pattern));
    if (agreements >= 3) ++hits;
  }
  CHECK(hits == 5);
  CHECK(overlap_probability(4, 0.75, TailMethod::Exact) ==
        doctest::Approx(5.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("overlap probability paper anchor at n = 256") {
  const double exact = overlap_probability(256, 0.75, TailMethod::Exact);
  CHECK(exact <= 2.449e-16);
  CHECK(exact > 2.4e-16);
  const double approx = overlap_probability(256, 0.75, TailMethod::NormalApprox);
  // documented approximation check: within a factor of 10 for n >= 64
  CHECK(approx / exact < 10.0);
  CHECK(exact / approx < 10.0);
}

TEST_CASE("overlap probability boundary and monotonicity") {
  CHECK(overlap_probability(1, 1.0, TailMethod::Exact) == doctest::Approx(0.5));
  CHECK_THROWS_AS(overlap_probability(4, 0.5, TailMethod::Exact), Error);
  CHECK_THROWS_AS(overlap_probability(4, 1.5, TailMethod::Exact), Error);
  CHECK_THROWS_AS(overlap_probability(0, 0.75, TailMethod::Exact), Error);

  // non-increasing in t for fixed n
  double last = 1.0;
  for (double t : {0.55, 0.65, 0.75, 0.85, 0.95}) {
    const double p = overlap_probability(64, t, TailMethod::Exact);
    CHECK(p <= last);
    last = p;
  }
  // non-increasing in n for fixed t (beyond small n)
  last = 1.0;
  for (int n : {16, 32, 64, 128, 256}) {
    const double p = overlap_probability(n, 0.75, TailMethod::Exact);
    CHECK(p <= last);
    last = p;
  }
}

TEST_CASE("metrics are pure: repeated calls give bit-identical results") {
  Rng rng(8);
  Eigen::VectorXd a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = rng.uniform();
    b[i] = rng.uniform();
  }
  CHECK(mse(a, b) == mse(a, b));
  CHECK(psnr(a, b, 1.0) == psnr(a, b, 1.0));
  CHECK(overlap_probability(128, 0.8, TailMethod::Exact) ==
        overlap_probability(128, 0.8, TailMethod::Exact));
}

TEST_CASE("tabular reconstruction accuracy convention") {
  std::vector<FeatureBlock> blocks{{"num", false, 0, 1}, {"cat", true, 1, 3}};
  const Eigen::VectorXd x = vec({0.50, 0.0, 1.0, 0.0});
  SUBCASE("exact recovery scores 1") {
    CHECK(tabular_reconstruction_accuracy({x}, {x}, blocks) == 1.0);
  }
  SUBCASE("numeric within 0.05 counts, argmax drives categoricals") {
    const Eigen::VectorXd r = vec({0.54, 0.2, 0.6, 0.2});
    CHECK(tabular_reconstruction_accuracy({x}, {r}, blocks) == 1.0);
  }
  SUBCASE("numeric off by more than 0.05 fails that column") {
    const Eigen::VectorXd r = vec({0.60, 0.0, 1.0, 0.0});
    CHECK(tabular_reconstruction_accuracy({x}, {r}, blocks) == doctest::Approx(0.5));
  }
  SUBCASE("wrong categorical argmax fails that block") {
    const Eigen::VectorXd r = vec({0.50, 0.9, 0.1, 0.0});
    CHECK(tabular_reconstruction_accuracy({x}, {r}, blocks) == doctest::Approx(0.5));
  }
}

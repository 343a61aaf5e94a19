#include <doctest.h>

#include "ars/bytes.hpp"
#include "ars/error.hpp"
#include "ars/rng.hpp"

using namespace ars;

TEST_CASE("f64 packing round-trips bit-exactly") {
  Rng rng(7);
  std::vector<double> values;
  for (int i = 0; i < 257; ++i) values.push_back(rng.gaussian() * 1e12);
  values.push_back(0.0);
  values.push_back(-0.0);
  values.push_back(1e-308);
  const auto back = unpack_f64_le(pack_f64_le(values));
  REQUIRE(back.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t a, b;
    std::memcpy(&a, &values[i], 8);
    std::memcpy(&b, &back[i], 8);
    CHECK(a == b);
  }
}

TEST_CASE("base64 known vectors") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("f") == "Zg==");
  CHECK(base64_encode("fo") == "Zm8=");
  CHECK(base64_encode("foo") == "Zm9v");
  CHECK(base64_encode("foobar") == "Zm9vYmFy");
  CHECK(base64_decode("Zm9vYmFy") == "foobar");
  CHECK(base64_decode("Zg==") == "f");
}

TEST_CASE("base64 round-trip over random binary blobs") {
  Rng rng(11);
  for (int round = 0; round < 50; ++round) {
    std::string blob;
    const std::size_t len = rng.below(200);
    for (std::size_t i = 0; i < len; ++i) {
      blob.push_back(static_cast<char>(rng.below(256)));
    }
    CHECK(base64_decode(base64_encode(blob)) == blob);
  }
}

TEST_CASE("base64 rejects malformed input") {
  CHECK_THROWS_AS(base64_decode("abc"), Error);
  CHECK_THROWS_AS(base64_decode("ab=c"), Error);
  CHECK_THROWS_AS(base64_decode("a!=="), Error);
}

TEST_CASE("fnv1a64 matches reference values") {
  // reference values from the FNV specification
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(to_hex(0xdeadbeefULL) == "00000000deadbeef");
}

TEST_CASE("seed derivation separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
}

TEST_CASE("rng is deterministic and distribution helpers stay in range") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng g(5);
  double mean = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) mean += g.gaussian();
  mean /= n;
  CHECK(std::abs(mean) < 0.05);
}

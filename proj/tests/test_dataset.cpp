#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include "ars/dataset.hpp"
#include "ars/rng.hpp"
#include "testutil.hpp"

using namespace ars;

namespace {

void put_u32_be(std::ofstream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {static_cast<unsigned char>(v >> 24),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

// Writes a tiny IDX pair with pixel (i + j) % 256 for sample i, byte j.
void write_idx_fixture(const std::string& images, const std::string& labels, int count,
                       int rows, int cols, bool corrupt_magic = false,
                       bool truncate = false) {
  std::ofstream img(images, std::ios::binary);
  put_u32_be(img, corrupt_magic ? 0x00000802u : 0x00000803u);
  put_u32_be(img, static_cast<std::uint32_t>(count));
  put_u32_be(img, static_cast<std::uint32_t>(rows));
  put_u32_be(img, static_cast<std::uint32_t>(cols));
  const int dim = rows * cols;
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (truncate && i == count - 1 && j == dim / 2) {
        return;  // cut the last sample short
      }
      img.put(static_cast<char>((i + j) % 256));
    }
  }
  img.close();
  std::ofstream lab(labels, std::ios::binary);
  put_u32_be(lab, 0x00000801u);
  put_u32_be(lab, static_cast<std::uint32_t>(count));
  for (int i = 0; i < count; ++i) lab.put(static_cast<char>(i % 10));
}

Dataset toy_tabular() {
  // 6 samples, 3 feature columns (1 numeric + categorical of arity 3), binary label
  Dataset ds;
  ds.blocks = {{"num", false, 0, 1}, {"cat", true, 1, 3}};
  Rng rng(17);
  for (int i = 0; i < 6; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    x[0] = rng.uniform();
    x[1 + i % 3] = 1.0;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
    y[i % 2] = 1.0;
    ds.samples.push_back(x);
    ds.labels.push_back(y);
  }
  return ds;
}

}  // namespace

TEST_CASE("load_idx parses the documented big-endian layout") {
  testutil::TempDir tmp("idx");
  write_idx_fixture(tmp.path("img"), tmp.path("lab"), 5, 4, 3);
  const Dataset ds = load_idx(tmp.path("img"), tmp.path("lab"));
  REQUIRE(ds.size() == 5);
  CHECK(ds.feature_dim() == 12);
  CHECK(ds.label_dim() == 10);

  // independent checksum: sample 0 holds bytes j % 256 scaled by 255
  double expected = 0.0;
  for (int j = 0; j < 12; ++j) expected += static_cast<double>(j % 256) / 255.0;
  CHECK(ds.samples[0].sum() == doctest::Approx(expected).epsilon(1e-12));
  // labels are one-hot with the written class
  for (int i = 0; i < 5; ++i) {
    CHECK(ds.labels[static_cast<std::size_t>(i)][i % 10] == 1.0);
    CHECK(ds.labels[static_cast<std::size_t>(i)].sum() == 1.0);
  }
  // values scaled into [0,1]
  for (const auto& x : ds.samples) {
    CHECK(x.minCoeff() >= 0.0);
    CHECK(x.maxCoeff() <= 1.0);
  }
}

TEST_CASE("load_idx distinguishes error variants") {
  testutil::TempDir tmp("idx_err");
  SUBCASE("bad magic") {
    write_idx_fixture(tmp.path("img"), tmp.path("lab"), 2, 2, 2, true);
    try {
      load_idx(tmp.path("img"), tmp.path("lab"));
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadMagic);
    }
  }
  SUBCASE("empty file is truncated") {
    std::ofstream(tmp.path("img"), std::ios::binary).close();
    std::ofstream(tmp.path("lab"), std::ios::binary).close();
    try {
      load_idx(tmp.path("img"), tmp.path("lab"));
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TruncatedFile);
    }
  }
  SUBCASE("truncated pixel data") {
    write_idx_fixture(tmp.path("img"), tmp.path("lab"), 3, 2, 2, false, true);
    // labels file was never written in truncate mode
    std::ofstream lab(tmp.path("lab"), std::ios::binary);
    put_u32_be(lab, 0x00000801u);
    put_u32_be(lab, 3);
    for (int i = 0; i < 3; ++i) lab.put(static_cast<char>(i));
    lab.close();
    try {
      load_idx(tmp.path("img"), tmp.path("lab"));
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TruncatedFile);
    }
  }
  SUBCASE("count mismatch") {
    write_idx_fixture(tmp.path("img"), tmp.path("lab"), 2, 2, 2);
    std::ofstream lab(tmp.path("lab"), std::ios::binary);
    put_u32_be(lab, 0x00000801u);
    put_u32_be(lab, 5);
    for (int i = 0; i < 5; ++i) lab.put(static_cast<char>(i));
    lab.close();
    try {
      load_idx(tmp.path("img"), tmp.path("lab"));
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CountMismatch);
    }
  }
}

TEST_CASE("loaders are pure: same bytes give identical datasets") {
  testutil::TempDir tmp("idx_pure");
  write_idx_fixture(tmp.path("img"), tmp.path("lab"), 4, 3, 3);
  const Dataset a = load_idx(tmp.path("img"), tmp.path("lab"));
  const Dataset b = load_idx(tmp.path("img"), tmp.path("lab"));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.samples[i] == b.samples[i]);
    CHECK(a.labels[i] == b.labels[i]);
  }
}

TEST_CASE("load_csv applies the schema") {
  testutil::TempDir tmp("csv");
  {
    std::ofstream out(tmp.path("toy.csv"));
    out << "age,color,grade\n"
        << "10,red,pass\n"
        << "20,green,fail\n"
        << "30,blue,pass\n";
  }
  CsvSchema schema;
  ColumnSpec age;
  age.name = "age";
  age.kind = ColumnSpec::Kind::Numeric;
  age.min = 10;
  age.max = 30;
  ColumnSpec color;
  color.name = "color";
  color.kind = ColumnSpec::Kind::Categorical;
  color.values = {"red", "green", "blue"};
  ColumnSpec grade;
  grade.name = "grade";
  grade.kind = ColumnSpec::Kind::Categorical;
  grade.values = {"fail", "pass"};
  schema.columns = {age, color, grade};
  schema.label = "grade";

  const Dataset ds = load_csv(tmp.path("toy.csv"), schema);
  REQUIRE(ds.size() == 3);
  CHECK(ds.feature_dim() == 4);  // 1 numeric + 3 one-hot
  CHECK(ds.samples[0][0] == doctest::Approx(0.0));
  CHECK(ds.samples[1][0] == doctest::Approx(0.5));
  CHECK(ds.samples[2][0] == doctest::Approx(1.0));
  // one-hot block forms an identity-like pattern across the three rows
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(ds.samples[static_cast<std::size_t>(i)][1 + j] == (i == j ? 1.0 : 0.0));
    }
  }
  CHECK(ds.labels[0][1] == 1.0);
  CHECK(ds.labels[1][0] == 1.0);
  REQUIRE(ds.blocks.size() == 2);
  CHECK(ds.blocks[1].categorical);
  CHECK(ds.blocks[1].width == 3);

  SUBCASE("min == max maps to zero by convention") {
    CsvSchema degen = schema;
    degen.columns[0].min = degen.columns[0].max = 42.0;
    const Dataset d2 = load_csv(tmp.path("toy.csv"), degen);
    for (const auto& x : d2.samples) CHECK(x[0] == 0.0);
  }
  SUBCASE("unknown categorical value names the row") {
    std::ofstream out(tmp.path("bad.csv"));
    out << "age,color,grade\n10,red,pass\n20,purple,pass\n";
    out.close();
    try {
      load_csv(tmp.path("bad.csv"), schema);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadRow);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
  SUBCASE("unparsable numeric names the row") {
    std::ofstream out(tmp.path("bad2.csv"));
    out << "age,color,grade\nabc,red,pass\n";
    out.close();
    CHECK_THROWS_AS(load_csv(tmp.path("bad2.csv"), schema), Error);
  }
}

TEST_CASE("schema JSON round-trip and min/max fitting") {
  testutil::TempDir tmp("schema");
  {
    std::ofstream out(tmp.path("data.csv"));
    out << "v,tag\n-5,a\n15,b\n10,a\n";
  }
  CsvSchema schema;
  ColumnSpec v;
  v.name = "v";
  v.kind = ColumnSpec::Kind::Numeric;
  ColumnSpec tag;
  tag.name = "tag";
  tag.kind = ColumnSpec::Kind::Categorical;
  tag.values = {"a", "b"};
  schema.columns = {v, tag};
  schema.label = "tag";

  const CsvSchema fitted = schema_with_minmax_from(schema, tmp.path("data.csv"));
  CHECK(fitted.columns[0].min == -5.0);
  CHECK(fitted.columns[0].max == 15.0);

  const CsvSchema back = schema_from_json(schema_to_json(fitted));
  CHECK(back.columns[0].min == -5.0);
  CHECK(back.columns[1].values == tag.values);
  CHECK(back.label == "tag");
}

TEST_CASE("synthetic clusters are deterministic and linearly separable") {
  const Dataset a = synth_gaussian_clusters(100, 2, 2, 1, 42);
  const Dataset b = synth_gaussian_clusters(100, 2, 2, 1, 42);
  REQUIRE(a.size() == 100);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.samples[i] == b.samples[i]);
  }
  REQUIRE(a.private_attrs.size() == 1);
  CHECK(a.private_attrs[0].size() == 100);

  SUBCASE("one class means constant labels") {
    const Dataset c = synth_gaussian_clusters(10, 2, 1, 0, 7);
    for (const auto& y : c.labels) CHECK(y[0] == 1.0);
  }

  SUBCASE("a linear classifier reaches 90 percent") {
    NeuralNet clf = make_net({{2, 2, Activation::Softmax}}, Role::Classifier, 5);
    TrainConfig cfg{0.5, 10, 40, Loss::CrossEntropy, 3, 0.0};
    clf = train(clf, a.samples, a.labels, cfg);
    std::vector<Eigen::VectorXd> preds;
    for (const auto& x : a.samples) preds.push_back(forward(clf, x));
    CHECK(accuracy(preds, a.labels) > 0.9);
  }

  SUBCASE("private attributes are roughly balanced") {
    int ones = 0;
    for (const auto& attr : a.private_attrs[0]) ones += attr[1] == 1.0 ? 1 : 0;
    CHECK(ones > 30);
    CHECK(ones < 70);
  }
}

TEST_CASE("synthetic digits look like digit images") {
  const Dataset ds = synth_digits(50, 9);
  REQUIRE(ds.size() == 50);
  CHECK(ds.feature_dim() == 784);
  CHECK(ds.label_dim() == 10);
  for (const auto& x : ds.samples) {
    CHECK(x.minCoeff() >= 0.0);
    CHECK(x.maxCoeff() <= 1.0);
    CHECK(x.sum() > 5.0);  // glyph strokes carry mass
  }
  // determinism and class balance from i % 10
  const Dataset again = synth_digits(50, 9);
  CHECK(again.samples[17] == ds.samples[17]);
  CHECK(ds.labels[13][3] == 1.0);
}

TEST_CASE("census data matches the shipped 133-column convention") {
  const CsvSchema schema = census_schema();
  int dim = 0;
  for (const auto& col : schema.columns) {
    if (col.name == schema.label) continue;
    dim += col.kind == ColumnSpec::Kind::Numeric ? 1 : static_cast<int>(col.values.size());
  }
  CHECK(dim == 133);

  const Dataset ds = synth_census(200, 31);
  CHECK(ds.feature_dim() == 133);
  CHECK(ds.label_dim() == 2);
  CHECK(ds.blocks.size() == 17);

  testutil::TempDir tmp("census");
  write_census_csv(tmp.path("census.csv"), 200, 31);
  const Dataset from_file = load_csv(tmp.path("census.csv"), schema);
  REQUIRE(from_file.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK((from_file.samples[i] - ds.samples[i]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("horizontal partition preserves the sample multiset") {
  const Dataset ds = synth_gaussian_clusters(53, 3, 2, 0, 11);
  const PartitionPlan plan = horizontal_plan(53, 5);
  const auto parts = partition(ds, plan);
  REQUIRE(parts.size() == 5);
  // 53 over 5 parties: 11/11/11/10/10
  CHECK(parts[0].size() == 11);
  CHECK(parts[4].size() == 10);

  std::multiset<double> source, rebuilt;
  for (const auto& x : ds.samples) source.insert(x.sum());
  std::size_t total = 0;
  for (const auto& p : parts) {
    total += p.size();
    for (const auto& x : p.samples) rebuilt.insert(x.sum());
    CHECK(p.feature_dim() == ds.feature_dim());
  }
  CHECK(total == ds.size());
  CHECK(source == rebuilt);
}

TEST_CASE("K = 1 horizontal partition is the identity") {
  const Dataset ds = synth_gaussian_clusters(10, 2, 2, 0, 3);
  const auto parts = partition(ds, horizontal_plan(10, 1));
  REQUIRE(parts.size() == 1);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(parts[0].samples[i] == ds.samples[i]);
  }
}

TEST_CASE("vertical partition splits columns and re-concatenates exactly") {
  const Dataset ds = synth_census(40, 5);
  const PartitionPlan plan = vertical_plan(133, 3, 0);
  // earlier parties take the remainder: 45/44/44
  CHECK(plan.ranges[0] == std::pair<int, int>{0, 45});
  CHECK(plan.ranges[1] == std::pair<int, int>{45, 89});
  CHECK(plan.ranges[2] == std::pair<int, int>{89, 133});

  const auto parts = partition(ds, plan);
  CHECK(parts[0].feature_dim() == 45);
  CHECK(parts[1].feature_dim() == 44);
  CHECK(parts[2].feature_dim() == 44);
  // labels only with the holder
  CHECK(parts[0].labels.size() == ds.size());
  CHECK(parts[1].labels.empty());
  CHECK(parts[2].labels.empty());

  const Dataset whole = concat_columns(parts, plan);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK((whole.samples[i] - ds.samples[i]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("partition validation rejects bad plans") {
  const Dataset ds = synth_gaussian_clusters(10, 4, 2, 0, 3);
  PartitionPlan overlapping;
  overlapping.mode = PartitionMode::Horizontal;
  overlapping.parties = 2;
  overlapping.ranges = {{0, 6}, {5, 10}};
  CHECK_THROWS_AS(partition(ds, overlapping), Error);

  PartitionPlan gap;
  gap.mode = PartitionMode::Vertical;
  gap.parties = 2;
  gap.ranges = {{0, 1}, {2, 4}};  // column 1 uncovered
  gap.label_holder = 0;
  CHECK_THROWS_AS(partition(ds, gap), Error);

  CHECK_THROWS_AS(vertical_plan(2, 3, 0), Error);  // fewer columns than parties
}

TEST_CASE("shuffle and holdout split are seeded and consistent") {
  const Dataset ds = synth_gaussian_clusters(60, 2, 3, 1, 19);
  const Dataset s1 = shuffled(ds, 4);
  const Dataset s2 = shuffled(ds, 4);
  const Dataset s3 = shuffled(ds, 5);
  CHECK(s1.samples[0] == s2.samples[0]);
  bool any_diff = false;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (s1.samples[i] != s3.samples[i]) any_diff = true;
  }
  CHECK(any_diff);
  // labels and attrs stay aligned through the shuffle
  for (std::size_t i = 0; i < s1.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < ds.size(); ++j) {
      if (ds.samples[j] == s1.samples[i]) {
        CHECK(ds.labels[j] == s1.labels[i]);
        CHECK(ds.private_attrs[0][j] == s1.private_attrs[0][i]);
        found = true;
        break;
      }
    }
    CHECK(found);
  }

  const auto [train, test] = split_holdout(ds, 0.25);
  CHECK(train.size() == 45);
  CHECK(test.size() == 15);
}

TEST_CASE("blocks_for_range clips tabular structure") {
  const std::vector<FeatureBlock> blocks{{"a", false, 0, 1}, {"b", true, 1, 4},
                                         {"c", true, 5, 3}};
  const auto clipped = blocks_for_range(blocks, 3, 8);
  REQUIRE(clipped.size() == 2);
  CHECK(clipped[0].name == "b");
  CHECK(clipped[0].offset == 0);
  CHECK(clipped[0].width == 2);  // columns 3,4 of the original block
  CHECK(clipped[1].name == "c");
  CHECK(clipped[1].offset == 2);
  CHECK(clipped[1].width == 3);
}

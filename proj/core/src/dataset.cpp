#include "ars/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ars/bytes.hpp"
#include "ars/rng.hpp"

namespace ars {

namespace {

Eigen::VectorXd one_hot(int index, int size) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(size);
  v[index] = 1.0;
  return v;
}

std::uint32_t read_u32_be(std::istream& in, const std::string& what) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  require(in.gcount() == 4, ErrorCode::TruncatedFile, "truncated " + what);
  return (static_cast<std::uint32_t>(buf[0]) << 24) |
         (static_cast<std::uint32_t>(buf[1]) << 16) |
         (static_cast<std::uint32_t>(buf[2]) << 8) | static_cast<std::uint32_t>(buf[3]);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

PartitionPlan horizontal_plan(int sample_count, int parties) {
  require(parties >= 1, ErrorCode::InvalidArgument, "horizontal_plan: parties must be >= 1");
  require(sample_count >= parties, ErrorCode::InvalidArgument,
          "horizontal_plan: fewer samples than parties");
  PartitionPlan plan;
  plan.mode = PartitionMode::Horizontal;
  plan.parties = parties;
  const int base = sample_count / parties;
  const int extra = sample_count % parties;
  int cursor = 0;
  for (int p = 0; p < parties; ++p) {
    const int len = base + (p < extra ? 1 : 0);
    plan.ranges.emplace_back(cursor, cursor + len);
    cursor += len;
  }
  return plan;
}

PartitionPlan vertical_plan(int column_count, int parties, int label_holder) {
  require(parties >= 1, ErrorCode::InvalidArgument, "vertical_plan: parties must be >= 1");
  require(column_count >= parties, ErrorCode::InvalidArgument,
          "vertical_plan: fewer columns than parties");
  require(label_holder >= 0 && label_holder < parties, ErrorCode::InvalidArgument,
          "vertical_plan: label_holder out of range");
  PartitionPlan plan;
  plan.mode = PartitionMode::Vertical;
  plan.parties = parties;
  plan.label_holder = label_holder;
  const int base = column_count / parties;
  const int extra = column_count % parties;
  int cursor = 0;
  for (int p = 0; p < parties; ++p) {
    // earlier parties take the extra column(s): 133 over 3 -> 45/44/44
    const int len = base + (p < extra ? 1 : 0);
    plan.ranges.emplace_back(cursor, cursor + len);
    cursor += len;
  }
  return plan;
}

namespace {

void validate_plan(const Dataset& ds, const PartitionPlan& plan) {
  require(plan.parties >= 1 &&
              plan.ranges.size() == static_cast<std::size_t>(plan.parties),
          ErrorCode::InvalidConfig, "partition: plan has wrong range count");
  const int limit = plan.mode == PartitionMode::Horizontal
                        ? static_cast<int>(ds.size())
                        : ds.feature_dim();
  std::vector<std::pair<int, int>> sorted = plan.ranges;
  std::sort(sorted.begin(), sorted.end());
  int covered = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    auto [b, e] = sorted[i];
    require(0 <= b && b < e && e <= limit, ErrorCode::InvalidConfig,
            "partition: range out of bounds");
    require(e - b > 0, ErrorCode::InvalidConfig, "partition: empty party range");
    if (i > 0) {
      require(sorted[i - 1].second <= b, ErrorCode::InvalidConfig,
              "partition: overlapping ranges");
    }
    covered += e - b;
  }
  if (plan.mode == PartitionMode::Vertical) {
    require(covered == limit, ErrorCode::InvalidConfig,
            "partition: vertical ranges must cover every feature column");
    require(plan.label_holder >= 0 && plan.label_holder < plan.parties,
            ErrorCode::InvalidConfig, "partition: label_holder out of range");
  }
}

}  // namespace

std::vector<Dataset> partition(const Dataset& ds, const PartitionPlan& plan) {
  validate_plan(ds, plan);
  std::vector<Dataset> parts;
  parts.reserve(plan.ranges.size());
  if (plan.mode == PartitionMode::Horizontal) {
    for (auto [b, e] : plan.ranges) {
      parts.push_back(subset(ds, static_cast<std::size_t>(b), static_cast<std::size_t>(e)));
    }
    return parts;
  }
  for (int p = 0; p < plan.parties; ++p) {
    auto [b, e] = plan.ranges[static_cast<std::size_t>(p)];
    Dataset part;
    part.samples.reserve(ds.size());
    for (const auto& x : ds.samples) {
      part.samples.push_back(x.segment(b, e - b));
    }
    if (p == plan.label_holder) {
      part.labels = ds.labels;
      part.private_attrs = ds.private_attrs;
    }
    if (static_cast<int>(ds.feature_names.size()) >= e) {
      part.feature_names.assign(ds.feature_names.begin() + b, ds.feature_names.begin() + e);
    }
    part.blocks = blocks_for_range(ds.blocks, b, e);
    parts.push_back(std::move(part));
  }
  return parts;
}

Dataset shuffled(const Dataset& ds, std::uint64_t seed) {
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  Dataset out;
  out.feature_names = ds.feature_names;
  out.blocks = ds.blocks;
  out.samples.reserve(ds.size());
  out.labels.reserve(ds.labels.size());
  out.private_attrs.resize(ds.private_attrs.size());
  for (std::size_t i : order) {
    out.samples.push_back(ds.samples[i]);
    if (!ds.labels.empty()) out.labels.push_back(ds.labels[i]);
    for (std::size_t k = 0; k < ds.private_attrs.size(); ++k) {
      out.private_attrs[k].push_back(ds.private_attrs[k][i]);
    }
  }
  return out;
}

Dataset subset(const Dataset& ds, std::size_t begin, std::size_t end) {
  require(begin <= end && end <= ds.size(), ErrorCode::InvalidArgument,
          "subset: range out of bounds");
  Dataset out;
  out.feature_names = ds.feature_names;
  out.blocks = ds.blocks;
  out.samples.assign(ds.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     ds.samples.begin() + static_cast<std::ptrdiff_t>(end));
  if (!ds.labels.empty()) {
    out.labels.assign(ds.labels.begin() + static_cast<std::ptrdiff_t>(begin),
                      ds.labels.begin() + static_cast<std::ptrdiff_t>(end));
  }
  for (const auto& attr : ds.private_attrs) {
    out.private_attrs.emplace_back(attr.begin() + static_cast<std::ptrdiff_t>(begin),
                                   attr.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double test_fraction) {
  require(test_fraction >= 0.0 && test_fraction < 1.0, ErrorCode::InvalidArgument,
          "split_holdout: test_fraction must be in [0, 1)");
  const auto cut = ds.size() - static_cast<std::size_t>(std::floor(
                                   test_fraction * static_cast<double>(ds.size())));
  return {subset(ds, 0, cut), subset(ds, cut, ds.size())};
}

Dataset concat_columns(const std::vector<Dataset>& parts, const PartitionPlan& plan) {
  require(plan.mode == PartitionMode::Vertical, ErrorCode::InvalidArgument,
          "concat_columns: plan must be vertical");
  require(parts.size() == plan.ranges.size(), ErrorCode::InvalidArgument,
          "concat_columns: part count does not match plan");
  int total = 0;
  for (auto [b, e] : plan.ranges) total = std::max(total, e);
  const std::size_t n = parts.empty() ? 0 : parts[0].size();
  Dataset out;
  for (const auto& part : parts) {
    require(part.size() == n, ErrorCode::CountMismatch,
            "concat_columns: parts disagree on sample count");
  }
  out.samples.assign(n, Eigen::VectorXd::Zero(total));
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto [b, e] = plan.ranges[p];
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i].segment(b, e - b) = parts[p].samples[i];
    }
  }
  const auto& holder = parts[static_cast<std::size_t>(plan.label_holder)];
  out.labels = holder.labels;
  out.private_attrs = holder.private_attrs;
  return out;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  require(img.good(), ErrorCode::IoFailure, "cannot open '" + images_path + "'");
  std::ifstream lab(labels_path, std::ios::binary);
  require(lab.good(), ErrorCode::IoFailure, "cannot open '" + labels_path + "'");

  const std::uint32_t img_magic = read_u32_be(img, "image file header");
  require(img_magic == 0x00000803u, ErrorCode::BadMagic,
          "bad image magic in '" + images_path + "'");
  const std::uint32_t n_images = read_u32_be(img, "image count");
  const std::uint32_t rows = read_u32_be(img, "row count");
  const std::uint32_t cols = read_u32_be(img, "column count");

  const std::uint32_t lab_magic = read_u32_be(lab, "label file header");
  require(lab_magic == 0x00000801u, ErrorCode::BadMagic,
          "bad label magic in '" + labels_path + "'");
  const std::uint32_t n_labels = read_u32_be(lab, "label count");
  require(n_images == n_labels, ErrorCode::CountMismatch,
          "image/label counts disagree: " + std::to_string(n_images) + " vs " +
              std::to_string(n_labels));

  const std::size_t dim = static_cast<std::size_t>(rows) * cols;
  Dataset ds;
  ds.samples.reserve(n_images);
  ds.labels.reserve(n_images);
  std::vector<unsigned char> buf(dim);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(dim));
    require(static_cast<std::size_t>(img.gcount()) == dim, ErrorCode::TruncatedFile,
            "truncated image data at sample " + std::to_string(i));
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
      x[static_cast<Eigen::Index>(j)] = static_cast<double>(buf[j]) / 255.0;
    }
    int label = lab.get();
    require(label != EOF, ErrorCode::TruncatedFile,
            "truncated label data at sample " + std::to_string(i));
    require(label >= 0 && label <= 9, ErrorCode::BadRow,
            "label byte out of range at sample " + std::to_string(i));
    ds.samples.push_back(std::move(x));
    ds.labels.push_back(one_hot(label, 10));
  }
  return ds;
}

namespace {

ColumnSpec::Kind kind_from_name(const std::string& name) {
  if (name == "numeric") return ColumnSpec::Kind::Numeric;
  if (name == "categorical") return ColumnSpec::Kind::Categorical;
  throw Error(ErrorCode::ParseFailure, "unknown column kind '" + name + "'");
}

}  // namespace

CsvSchema schema_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure, std::string("schema JSON: ") + e.what());
  }
  try {
    CsvSchema schema;
    for (const auto& col : doc.at("columns")) {
      ColumnSpec spec;
      spec.name = col.at("name").get<std::string>();
      spec.kind = kind_from_name(col.at("kind").get<std::string>());
      if (spec.kind == ColumnSpec::Kind::Numeric) {
        spec.min = col.value("min", 0.0);
        spec.max = col.value("max", 1.0);
      } else {
        spec.values = col.at("values").get<std::vector<std::string>>();
        require(!spec.values.empty(), ErrorCode::ParseFailure,
                "categorical column '" + spec.name + "' has no values");
      }
      schema.columns.push_back(std::move(spec));
    }
    schema.label = doc.at("label").get<std::string>();
    if (doc.contains("private_attrs")) {
      schema.private_attrs = doc.at("private_attrs").get<std::vector<std::string>>();
    }
    return schema;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure, std::string("schema JSON: ") + e.what());
  }
}

std::string schema_to_json(const CsvSchema& schema) {
  nlohmann::json doc;
  doc["columns"] = nlohmann::json::array();
  for (const auto& col : schema.columns) {
    nlohmann::json c{{"name", col.name}};
    if (col.kind == ColumnSpec::Kind::Numeric) {
      c["kind"] = "numeric";
      c["min"] = col.min;
      c["max"] = col.max;
    } else {
      c["kind"] = "categorical";
      c["values"] = col.values;
    }
    doc["columns"].push_back(std::move(c));
  }
  doc["label"] = schema.label;
  doc["private_attrs"] = schema.private_attrs;
  return doc.dump(2);
}

CsvSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return schema_from_json(buf.str());
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv_stream(std::istream& in, const std::string& name) {
  CsvTable table;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::TruncatedFile,
          "'" + name + "' has no header row");
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    require(fields.size() == table.header.size(), ErrorCode::BadRow,
            "row " + std::to_string(table.rows.size() + 1) + " has " +
                std::to_string(fields.size()) + " fields, expected " +
                std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open '" + path + "'");
  return read_csv_stream(in, path);
}

Dataset dataset_from_table(const CsvTable& table, const CsvSchema& schema,
                           const std::string& name);

double parse_numeric(const std::string& text, std::size_t row, const std::string& col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    require(used == text.size(), ErrorCode::BadRow,
            "row " + std::to_string(row) + ": unparsable numeric '" + text +
                "' in column '" + col + "'");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadRow, "row " + std::to_string(row) +
                                       ": unparsable numeric '" + text +
                                       "' in column '" + col + "'");
  }
}

}  // namespace

CsvSchema schema_with_minmax_from(const CsvSchema& schema, const std::string& csv_path) {
  CsvTable table = read_csv(csv_path);
  CsvSchema out = schema;
  for (auto& col : out.columns) {
    if (col.kind != ColumnSpec::Kind::Numeric) continue;
    const auto it = std::find(table.header.begin(), table.header.end(), col.name);
    require(it != table.header.end(), ErrorCode::InvalidConfig,
            "column '" + col.name + "' missing from '" + csv_path + "'");
    const std::size_t idx = static_cast<std::size_t>(it - table.header.begin());
    double lo = 0.0, hi = 0.0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const double v = parse_numeric(table.rows[r][idx], r + 1, col.name);
      if (r == 0) {
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    col.min = lo;
    col.max = hi;
  }
  return out;
}

namespace {

struct ColumnRole {
  const ColumnSpec* spec = nullptr;
  std::size_t file_index = 0;
};

Eigen::VectorXd encode_categorical(const ColumnSpec& spec, const std::string& value,
                                   std::size_t row) {
  const auto it = std::find(spec.values.begin(), spec.values.end(), value);
  require(it != spec.values.end(), ErrorCode::BadRow,
          "row " + std::to_string(row) + ": unknown value '" + value +
              "' for categorical column '" + spec.name + "'");
  return one_hot(static_cast<int>(it - spec.values.begin()),
                 static_cast<int>(spec.values.size()));
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  return dataset_from_table(read_csv(path), schema, path);
}

namespace {

Dataset dataset_from_table(const CsvTable& table, const CsvSchema& schema,
                           const std::string& name) {
  std::map<std::string, std::size_t> file_index;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    file_index[table.header[i]] = i;
  }
  auto locate = [&](const std::string& col_name) {
    const auto it = file_index.find(col_name);
    require(it != file_index.end(), ErrorCode::InvalidConfig,
            "column '" + col_name + "' missing from '" + name + "'");
    return it->second;
  };

  const auto is_attr = [&](const std::string& name) {
    return std::find(schema.private_attrs.begin(), schema.private_attrs.end(), name) !=
           schema.private_attrs.end();
  };

  std::vector<ColumnRole> features;
  const ColumnSpec* label_spec = nullptr;
  std::size_t label_index = 0;
  std::vector<ColumnRole> attrs(schema.private_attrs.size());
  int feature_dim = 0;

  Dataset ds;
  for (const auto& col : schema.columns) {
    const std::size_t idx = locate(col.name);
    if (col.name == schema.label) {
      require(col.kind == ColumnSpec::Kind::Categorical, ErrorCode::InvalidConfig,
              "label column must be categorical");
      label_spec = &col;
      label_index = idx;
      continue;
    }
    if (is_attr(col.name)) {
      require(col.kind == ColumnSpec::Kind::Categorical, ErrorCode::InvalidConfig,
              "private attribute column '" + col.name + "' must be categorical");
      const auto pos = std::find(schema.private_attrs.begin(), schema.private_attrs.end(),
                                 col.name) -
                       schema.private_attrs.begin();
      attrs[static_cast<std::size_t>(pos)] = {&col, idx};
      continue;
    }
    FeatureBlock block;
    block.name = col.name;
    block.offset = feature_dim;
    if (col.kind == ColumnSpec::Kind::Numeric) {
      block.categorical = false;
      block.width = 1;
      feature_dim += 1;
    } else {
      block.categorical = true;
      block.width = static_cast<int>(col.values.size());
      feature_dim += block.width;
    }
    ds.blocks.push_back(block);
    ds.feature_names.push_back(col.name);
    features.push_back({&col, idx});
  }
  require(label_spec != nullptr, ErrorCode::InvalidConfig,
          "label column '" + schema.label + "' not described in schema");
  for (std::size_t k = 0; k < attrs.size(); ++k) {
    require(attrs[k].spec != nullptr, ErrorCode::InvalidConfig,
            "private attribute '" + schema.private_attrs[k] + "' not described in schema");
  }

  ds.private_attrs.resize(attrs.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Eigen::VectorXd x(feature_dim);
    int cursor = 0;
    for (const ColumnRole& role : features) {
      const std::string& raw = row[role.file_index];
      if (role.spec->kind == ColumnSpec::Kind::Numeric) {
        const double v = parse_numeric(raw, r + 1, role.spec->name);
        double scaled = 0.0;  // min == max maps to 0 by convention
        if (role.spec->max > role.spec->min) {
          scaled = (v - role.spec->min) / (role.spec->max - role.spec->min);
          scaled = std::clamp(scaled, 0.0, 1.0);
        }
        x[cursor++] = scaled;
      } else {
        const Eigen::VectorXd enc = encode_categorical(*role.spec, raw, r + 1);
        x.segment(cursor, enc.size()) = enc;
        cursor += static_cast<int>(enc.size());
      }
    }
    ds.samples.push_back(std::move(x));
    ds.labels.push_back(encode_categorical(*label_spec, row[label_index], r + 1));
    for (std::size_t k = 0; k < attrs.size(); ++k) {
      ds.private_attrs[k].push_back(
          encode_categorical(*attrs[k].spec, row[attrs[k].file_index], r + 1));
    }
  }
  return ds;
}

}  // namespace

Dataset synth_gaussian_clusters(int n, int dim, int classes, int private_attr_planes,
                                std::uint64_t seed) {
  require(n >= 1 && dim >= 1 && classes >= 1, ErrorCode::InvalidArgument,
          "synth_gaussian_clusters: n, dim, classes must be >= 1");
  require(private_attr_planes >= 0, ErrorCode::InvalidArgument,
          "synth_gaussian_clusters: negative attribute count");

  Rng center_rng(derive_seed(seed, 1));
  std::vector<Eigen::VectorXd> centers;
  const double min_gap = 0.45;
  // Redraw the whole center set until pairwise gaps are wide enough; the
  // loop is deterministic for a given seed.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    centers.clear();
    for (int c = 0; c < classes; ++c) {
      Eigen::VectorXd center(dim);
      for (int j = 0; j < dim; ++j) center[j] = center_rng.uniform(0.15, 0.85);
      centers.push_back(std::move(center));
    }
    bool ok = true;
    for (std::size_t a = 0; a < centers.size() && ok; ++a) {
      for (std::size_t b = a + 1; b < centers.size(); ++b) {
        if ((centers[a] - centers[b]).norm() < min_gap) {
          ok = false;
          break;
        }
      }
    }
    if (ok) break;
  }

  Dataset ds;
  Rng sample_rng(derive_seed(seed, 2));
  const double sigma = 0.07;
  for (int i = 0; i < n; ++i) {
    const int c = i % classes;
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) {
      x[j] = std::clamp(centers[static_cast<std::size_t>(c)][j] +
                            sigma * sample_rng.gaussian(),
                        0.0, 1.0);
    }
    ds.samples.push_back(std::move(x));
    ds.labels.push_back(one_hot(c, classes));
  }

  Rng plane_rng(derive_seed(seed, 3));
  for (int k = 0; k < private_attr_planes; ++k) {
    Eigen::VectorXd normal(dim);
    for (int j = 0; j < dim; ++j) normal[j] = plane_rng.gaussian();
    std::vector<double> projections;
    projections.reserve(static_cast<std::size_t>(n));
    for (const auto& x : ds.samples) projections.push_back(normal.dot(x));
    std::vector<double> sorted = projections;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double threshold = sorted[static_cast<std::size_t>(n / 2)];
    std::vector<Eigen::VectorXd> attr;
    attr.reserve(static_cast<std::size_t>(n));
    for (double p : projections) {
      attr.push_back(one_hot(p > threshold ? 1 : 0, 2));
    }
    ds.private_attrs.push_back(std::move(attr));
  }
  return ds;
}

namespace {

// Seven-segment glyph geometry on a 28x28 canvas. Segments:
// 0 top, 1 top-left, 2 top-right, 3 middle, 4 bottom-left, 5 bottom-right,
// 6 bottom.
constexpr int kDigitSegments[10] = {
    0b1110111,  // 0
    0b0100100,  // 1
    0b1011101,  // 2
    0b1101101,  // 3
    0b0101110,  // 4
    0b1101011,  // 5
    0b1111011,  // 6
    0b0100101,  // 7
    0b1111111,  // 8
    0b1101111,  // 9
};

void fill_rect(Eigen::VectorXd& img, int x0, int y0, int x1, int y1, double value) {
  for (int y = std::max(0, y0); y < std::min(28, y1); ++y) {
    for (int x = std::max(0, x0); x < std::min(28, x1); ++x) {
      img[y * 28 + x] = std::max(img[y * 28 + x], value);
    }
  }
}

}  // namespace

Dataset synth_digits(int n, std::uint64_t seed) {
  require(n >= 1, ErrorCode::InvalidArgument, "synth_digits: n must be >= 1");
  Dataset ds;
  ds.samples.reserve(static_cast<std::size_t>(n));
  ds.labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const int digit = i % 10;
    const int mask = kDigitSegments[digit];
    const int dx = static_cast<int>(rng.below(7)) - 3;
    const int dy = static_cast<int>(rng.below(7)) - 3;
    const double intensity = rng.uniform(0.7, 1.0);
    Eigen::VectorXd img = Eigen::VectorXd::Zero(784);

    // Base glyph box: x in [9,19), y in [5,23), stroke width 3.
    const int x0 = 9 + dx, x1 = 19 + dx;
    const int y0 = 5 + dy, ym = 13 + dy, y1 = 21 + dy;
    if (mask & (1 << 0)) fill_rect(img, x0, y0, x1, y0 + 3, intensity);
    if (mask & (1 << 1)) fill_rect(img, x0, y0, x0 + 3, ym + 2, intensity);
    if (mask & (1 << 2)) fill_rect(img, x1 - 3, y0, x1, ym + 2, intensity);
    if (mask & (1 << 3)) fill_rect(img, x0, ym - 1, x1, ym + 2, intensity);
    if (mask & (1 << 4)) fill_rect(img, x0, ym, x0 + 3, y1 + 2, intensity);
    if (mask & (1 << 5)) fill_rect(img, x1 - 3, ym, x1, y1 + 2, intensity);
    if (mask & (1 << 6)) fill_rect(img, x0, y1 - 1, x1, y1 + 2, intensity);

    for (int p = 0; p < 784; ++p) {
      img[p] = std::clamp(img[p] + rng.uniform(0.0, 0.12), 0.0, 1.0);
    }
    ds.samples.push_back(std::move(img));
    ds.labels.push_back(one_hot(digit, 10));
  }
  return ds;
}

namespace {

const std::vector<std::string>& census_values(const std::string& column) {
  static const std::map<std::string, std::vector<std::string>> tables = {
      {"workclass",
       {"private", "self_emp_not_inc", "self_emp_inc", "federal_gov", "local_gov",
        "state_gov", "without_pay", "never_worked", "unknown"}},
      {"education",
       {"preschool", "g1_4", "g5_6", "g7_8", "g9", "g10", "g11", "g12", "hs_grad",
        "some_college", "assoc_voc", "assoc_acdm", "bachelors", "masters",
        "prof_school", "doctorate"}},
      {"marital_status",
       {"married", "divorced", "never_married", "separated", "widowed",
        "spouse_absent", "spouse_af"}},
      {"occupation",
       {"tech_support", "craft_repair", "other_service", "sales", "exec_managerial",
        "prof_specialty", "handlers_cleaners", "machine_op_inspct", "adm_clerical",
        "farming_fishing", "transport_moving", "priv_house_serv", "protective_serv",
        "armed_forces", "unknown"}},
      {"relationship",
       {"wife", "own_child", "husband", "not_in_family", "other_relative",
        "unmarried"}},
      {"race", {"white", "black", "asian_pac_islander", "amer_indian_eskimo", "other"}},
      {"sex", {"male", "female"}},
      {"native_country",
       {"united_states", "cambodia",  "england",     "puerto_rico", "canada",
        "germany",       "outlying",  "india",       "japan",       "greece",
        "south",         "china",     "cuba",        "iran",        "honduras",
        "philippines",   "italy",     "poland",      "jamaica",     "vietnam",
        "mexico",        "portugal",  "ireland",     "france",      "dominican",
        "laos",          "ecuador",   "taiwan",      "haiti",       "columbia",
        "hungary",       "guatemala", "nicaragua",   "scotland",    "thailand",
        "yugoslavia",    "el_salvador", "trinadad",  "peru",        "hong",
        "holand",        "unknown"}},
      {"age_bucket",
       {"17_21", "22_26", "27_31", "32_36", "37_44", "45_52", "53_60", "61_70",
        "71_plus"}},
      {"hours_bucket",
       {"lt_10", "10_19", "20_29", "30_39", "40", "41_49", "50_59", "60_79",
        "80_plus"}},
      {"industry",
       {"agriculture", "manufacturing", "trade", "finance", "services", "public",
        "other"}},
      {"income", {"le_50k", "gt_50k"}},
  };
  return tables.at(column);
}

}  // namespace

CsvSchema census_schema() {
  CsvSchema schema;
  auto numeric = [](const std::string& name, double lo, double hi) {
    ColumnSpec c;
    c.name = name;
    c.kind = ColumnSpec::Kind::Numeric;
    c.min = lo;
    c.max = hi;
    return c;
  };
  auto categorical = [](const std::string& name) {
    ColumnSpec c;
    c.name = name;
    c.kind = ColumnSpec::Kind::Categorical;
    c.values = census_values(name);
    return c;
  };
  // One-hot expansion of the feature columns below comes to exactly 133.
  schema.columns = {
      numeric("age", 17.0, 90.0),
      categorical("workclass"),
      categorical("education"),
      categorical("marital_status"),
      categorical("occupation"),
      categorical("relationship"),
      categorical("race"),
      categorical("sex"),
      numeric("capital_gain", 0.0, 99999.0),
      numeric("capital_loss", 0.0, 4356.0),
      numeric("hours_per_week", 1.0, 99.0),
      categorical("native_country"),
      categorical("age_bucket"),
      categorical("hours_bucket"),
      numeric("education_num", 1.0, 16.0),
      numeric("fnlwgt", 10000.0, 1500000.0),
      categorical("industry"),
      categorical("income"),
  };
  schema.label = "income";
  return schema;
}

namespace {

struct CensusRow {
  std::vector<std::string> fields;
};

std::vector<std::string> census_header() {
  std::vector<std::string> h;
  for (const auto& col : census_schema().columns) h.push_back(col.name);
  return h;
}

int bucket_age(double age) {
  const double edges[] = {22, 27, 32, 37, 45, 53, 61, 71};
  int b = 0;
  for (double e : edges) {
    if (age >= e) ++b;
  }
  return b;
}

int bucket_hours(double h) {
  const double edges[] = {10, 20, 30, 40, 41, 50, 60, 80};
  int b = 0;
  for (double e : edges) {
    if (h >= e) ++b;
  }
  return b;
}

CensusRow make_census_row(Rng& rng) {
  const double age = 17.0 + 73.0 * rng.uniform();
  const int education_num = 1 + static_cast<int>(rng.below(16));
  const int workclass = static_cast<int>(rng.below(9));
  const int marital = static_cast<int>(rng.below(7));
  const int occupation = static_cast<int>(rng.below(15));
  const int relationship = static_cast<int>(rng.below(6));
  const int race = static_cast<int>(rng.below(5));
  const int sex = static_cast<int>(rng.below(2));
  const int country = static_cast<int>(rng.below(42));
  const int industry = static_cast<int>(rng.below(7));
  const double hours = 1.0 + 98.0 * rng.uniform();
  const bool has_gain = rng.uniform() < 0.15;
  const double capital_gain = has_gain ? 2000.0 + 40000.0 * rng.uniform() : 0.0;
  const bool has_loss = rng.uniform() < 0.08;
  const double capital_loss = has_loss ? 500.0 + 3000.0 * rng.uniform() : 0.0;
  const double fnlwgt = 10000.0 + 1490000.0 * rng.uniform();

  // Latent income score; signal is deliberately spread across the column
  // span so vertical participation with more parties sees more of it.
  static const double occ_score[15] = {0.6, 0.1, -0.7, 0.3,  1.2, 1.1, -0.9, -0.3,
                                       -0.1, -1.0, 0.0, -1.1, 0.2, 0.4, -0.5};
  static const double ind_score[7] = {-0.8, 0.2, 0.0, 0.9, 0.3, 0.1, -0.4};
  double score = 0.0;
  score += 0.045 * (std::min(age, 60.0) - 38.0);
  score += 0.38 * (education_num - 9.5);
  score += occ_score[occupation];
  score += ind_score[industry];
  score += 0.035 * (hours - 40.0);
  score += (capital_gain > 5000.0) ? 1.6 : 0.0;
  score += (capital_loss > 1500.0) ? 0.4 : 0.0;
  score += (marital == 0) ? 0.9 : -0.2;
  score += (sex == 0) ? 0.25 : -0.25;
  score += 1.1 * rng.gaussian();
  const bool high_income = score > 0.8;

  CensusRow row;
  auto num = [&](double v) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(3);
    ss << v;
    return ss.str();
  };
  row.fields = {
      num(age),
      census_values("workclass")[static_cast<std::size_t>(workclass)],
      census_values("education")[static_cast<std::size_t>(education_num - 1)],
      census_values("marital_status")[static_cast<std::size_t>(marital)],
      census_values("occupation")[static_cast<std::size_t>(occupation)],
      census_values("relationship")[static_cast<std::size_t>(relationship)],
      census_values("race")[static_cast<std::size_t>(race)],
      census_values("sex")[static_cast<std::size_t>(sex)],
      num(capital_gain),
      num(capital_loss),
      num(hours),
      census_values("native_country")[static_cast<std::size_t>(country)],
      census_values("age_bucket")[static_cast<std::size_t>(bucket_age(age))],
      census_values("hours_bucket")[static_cast<std::size_t>(bucket_hours(hours))],
      num(static_cast<double>(education_num)),
      num(fnlwgt),
      census_values("industry")[static_cast<std::size_t>(industry)],
      census_values("income")[high_income ? 1 : 0],
  };
  return row;
}

}  // namespace

void write_census_csv(const std::string& path, int n, std::uint64_t seed) {
  require(n >= 1, ErrorCode::InvalidArgument, "write_census_csv: n must be >= 1");
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
  const auto header = census_header();
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const CensusRow row = make_census_row(rng);
    for (std::size_t j = 0; j < row.fields.size(); ++j) {
      out << row.fields[j] << (j + 1 < row.fields.size() ? "," : "\n");
    }
  }
  require(out.good(), ErrorCode::IoFailure, "short write to '" + path + "'");
}

Dataset synth_census(int n, std::uint64_t seed) {
  // Route through the CSV text path so the in-memory variant and file-based
  // loads can never diverge.
  require(n >= 1, ErrorCode::InvalidArgument, "synth_census: n must be >= 1");
  std::ostringstream csv;
  const auto header = census_header();
  for (std::size_t i = 0; i < header.size(); ++i) {
    csv << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const CensusRow row = make_census_row(rng);
    for (std::size_t j = 0; j < row.fields.size(); ++j) {
      csv << row.fields[j] << (j + 1 < row.fields.size() ? "," : "\n");
    }
  }
  std::istringstream in(csv.str());
  return dataset_from_table(read_csv_stream(in, "synth_census"), census_schema(),
                            "synth_census");
}

std::vector<FeatureBlock> blocks_for_range(const std::vector<FeatureBlock>& blocks,
                                           int begin, int end) {
  std::vector<FeatureBlock> out;
  for (const FeatureBlock& b : blocks) {
    const int lo = std::max(b.offset, begin);
    const int hi = std::min(b.offset + b.width, end);
    if (lo >= hi) continue;
    FeatureBlock clipped = b;
    clipped.offset = lo - begin;
    clipped.width = hi - lo;
    out.push_back(clipped);
  }
  return out;
}

}  // namespace ars

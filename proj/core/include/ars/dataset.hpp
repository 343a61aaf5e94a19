#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ars/error.hpp"
#include "ars/metrics.hpp"

namespace ars {

// Samples with one-hot task labels and zero or more aligned one-hot private
// attribute label sets. Feature values are normalized to [0,1].
struct Dataset {
  std::vector<Eigen::VectorXd> samples;
  std::vector<Eigen::VectorXd> labels;
  std::vector<std::vector<Eigen::VectorXd>> private_attrs;  // [attr][sample]
  std::vector<std::string> feature_names;
  std::vector<FeatureBlock> blocks;  // tabular column structure, empty for images

  std::size_t size() const { return samples.size(); }
  int feature_dim() const { return samples.empty() ? 0 : static_cast<int>(samples[0].size()); }
  int label_dim() const { return labels.empty() ? 0 : static_cast<int>(labels[0].size()); }
};

enum class PartitionMode { Horizontal, Vertical };

// Horizontal: per-party sample index ranges. Vertical: per-party feature
// column ranges with a designated label holder.
struct PartitionPlan {
  PartitionMode mode = PartitionMode::Horizontal;
  int parties = 1;
  std::vector<std::pair<int, int>> ranges;  // [begin, end) per party
  int label_holder = 0;
};

// Contiguous equal-as-possible blocks; earlier parties take the remainder.
PartitionPlan horizontal_plan(int sample_count, int parties);
PartitionPlan vertical_plan(int column_count, int parties, int label_holder = 0);

std::vector<Dataset> partition(const Dataset& ds, const PartitionPlan& plan);

// Reorders samples (with labels and attributes) by one seeded shuffle.
Dataset shuffled(const Dataset& ds, std::uint64_t seed);

// Splits off the trailing fraction as a held-out set (shuffle first if the
// source ordering is meaningful).
std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double test_fraction);

Dataset subset(const Dataset& ds, std::size_t begin, std::size_t end);

// Re-concatenates vertical parts in plan order; exact inverse of partition.
Dataset concat_columns(const std::vector<Dataset>& parts, const PartitionPlan& plan);

// IDX (big-endian) loaders; magic 0x00000803 for images, 0x00000801 for labels.
// Pixels are scaled to [0,1]; labels become one-hot vectors of length 10.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

struct ColumnSpec {
  enum class Kind { Numeric, Categorical };
  std::string name;
  Kind kind = Kind::Numeric;
  double min = 0.0;  // numeric scaling bounds, stored so test data reuses them
  double max = 1.0;
  std::vector<std::string> values;  // categorical one-hot order
};

struct CsvSchema {
  std::vector<ColumnSpec> columns;  // all columns, including label and attrs
  std::string label;
  std::vector<std::string> private_attrs;
};

CsvSchema schema_from_json(const std::string& text);
std::string schema_to_json(const CsvSchema& schema);
CsvSchema load_schema(const std::string& path);

// Fills numeric min/max from a data file; run on the training split so the
// stored schema applies identical scaling to any later file.
CsvSchema schema_with_minmax_from(const CsvSchema& schema, const std::string& csv_path);

// Header row required. Feature columns follow schema order, not file order;
// numeric values are min-max scaled and clamped to [0,1], min == max maps
// to 0 by convention; categoricals expand to one-hot blocks.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Gaussian class clusters in [0,1]^dim with binary private attributes cut by
// median-centered random hyperplanes. Deterministic per seed.
Dataset synth_gaussian_clusters(int n, int dim, int classes, int private_attr_planes,
                                std::uint64_t seed);

// Procedural 28x28 digit glyphs (ten classes) with jitter and pixel noise;
// a stand-in for handwritten-digit data in self-contained runs.
Dataset synth_digits(int n, std::uint64_t seed);

// Census-style tabular data matching census_schema(); 133 feature columns
// after one-hot expansion, binary income label.
CsvSchema census_schema();
Dataset synth_census(int n, std::uint64_t seed);
void write_census_csv(const std::string& path, int n, std::uint64_t seed);

// Clips tabular blocks to a column range [begin, end); offsets become local.
std::vector<FeatureBlock> blocks_for_range(const std::vector<FeatureBlock>& blocks,
                                           int begin, int end);

}  // namespace ars

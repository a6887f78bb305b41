#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "a2pm/schema.hpp"

namespace a2pm {

struct PipelineSpec {
  std::string label_column;
  std::vector<std::string> drop_columns;
  std::vector<std::string> categorical_columns;
  // Categories seen in fewer than this fraction of rows collapse to 'Other'.
  double min_category_frequency = 0.01;
  std::vector<std::string> integer_columns;
  double holdout_fraction = 0.30;
  std::uint64_t split_seed = 0;

  void validate() const;
};

// Parsed CSV with column access by name; all cells kept as text, numeric
// validation happens in load_csv.
struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> rows;

  std::size_t row_count() const { return rows.size(); }
  std::optional<std::size_t> column_index(std::string_view name) const;
};

// Reads a CSV with a mandatory header and checks that every column that will
// become numeric (not the label, not categorical, not dropped) parses as a
// real number. Throws DataError listing the offending cells otherwise.
RawTable load_csv(const std::filesystem::path& path, const PipelineSpec& spec);

struct CategoryEncoding {
  std::string column;
  std::vector<std::string> categories;  // retained, lexicographic; 'Other' is implicit last
};

// Fitted one-hot vocabulary. Applying it to new rows never creates columns;
// categories outside the fitted vocabulary map to 'Other'.
struct EncodingMap {
  static constexpr const char* kOtherLabel = "Other";
  std::vector<CategoryEncoding> columns;
};

struct PreprocessResult {
  Dataset dataset;
  EncodingMap encoding;
  FeatureSchema schema;
};

// Drops columns, collapses rare categories to 'Other', one-hot encodes in
// (column, category-lexicographic) order after the numeric block, flags
// integer columns, and maps labels to class indices in first-appearance
// order.
PreprocessResult preprocess(const RawTable& table, const PipelineSpec& spec);

// Encodes new rows with an already-fitted vocabulary and schema. Unseen
// categories map to 'Other'; unseen class labels are an error.
Dataset apply_encoding(const RawTable& table, const PipelineSpec& spec,
                       const FeatureSchema& schema, const EncodingMap& encoding);

// Seeded per-class index split: the second element receives
// round(n_c * fraction) indices of every class (half-up), the first the rest,
// both in ascending order. Classes with fewer than 2 rows are an error.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_indices(
    std::span<const int> labels, std::size_t class_count, double fraction,
    std::uint64_t seed, const std::vector<std::string>& class_names);

// Stratified holdout split preserving per-class proportions within rounding.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double fraction,
                                             std::uint64_t seed);

// Lossless dataset round-trip: header from the schema, label names in the
// last column, values with full round-trip precision.
void write_csv(const Dataset& ds, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path, const FeatureSchema& schema);

// Last column of any CSV with a header, e.g. the label column of a dataset
// CSV or a bare prediction file.
std::vector<std::string> read_label_column(const std::filesystem::path& path);

}  // namespace a2pm

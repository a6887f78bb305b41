#include "a2pm/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "a2pm/error.hpp"
#include "a2pm/rng.hpp"
#include "csv.hpp"

namespace a2pm {

namespace {

bool contains(const std::vector<std::string>& list, const std::string& name) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

std::string class_label(const std::vector<std::string>& names, std::size_t index) {
  return index < names.size() ? names[index] : "#" + std::to_string(index);
}

}  // namespace

void PipelineSpec::validate() const {
  if (label_column.empty()) throw ConfigError("pipeline label column is empty");
  if (contains(drop_columns, label_column))
    throw ConfigError("label column '" + label_column + "' is listed in drop columns");
  if (contains(categorical_columns, label_column) || contains(integer_columns, label_column))
    throw ConfigError("label column '" + label_column + "' cannot appear in column lists");

  const auto overlap = [](const std::vector<std::string>& a,
                          const std::vector<std::string>& b) -> std::optional<std::string> {
    for (const auto& name : a)
      if (contains(b, name)) return name;
    return std::nullopt;
  };
  if (auto name = overlap(drop_columns, categorical_columns))
    throw ConfigError("column '" + *name + "' is both dropped and categorical");
  if (auto name = overlap(drop_columns, integer_columns))
    throw ConfigError("column '" + *name + "' is both dropped and integer");
  if (auto name = overlap(categorical_columns, integer_columns))
    throw ConfigError("column '" + *name + "' is both categorical and integer");

  if (!(min_category_frequency >= 0.0 && min_category_frequency < 1.0))
    throw ConfigError("min category frequency must be in [0, 1)");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw ConfigError("holdout fraction must be in (0, 1)");
}

std::optional<std::size_t> RawTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < column_names.size(); ++i)
    if (column_names[i] == name) return i;
  return std::nullopt;
}

RawTable load_csv(const std::filesystem::path& path, const PipelineSpec& spec) {
  spec.validate();
  auto records = csv::read_file(path);
  if (records.empty()) throw DataError("'" + path.string() + "' has no header row");

  RawTable table;
  table.column_names = records.front();
  std::set<std::string> seen;
  for (const auto& name : table.column_names)
    if (!seen.insert(name).second)
      throw DataError("duplicate column '" + name + "' in '" + path.string() + "'");

  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.column_names.size())
      throw DataError("row " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " cells, header has " +
                      std::to_string(table.column_names.size()));
    table.rows.push_back(std::move(records[r]));
  }

  if (!table.column_index(spec.label_column))
    throw DataError("label column '" + spec.label_column + "' missing from '" +
                    path.string() + "'");
  for (const auto* list : {&spec.drop_columns, &spec.categorical_columns,
                           &spec.integer_columns})
    for (const auto& name : *list)
      if (!table.column_index(name))
        throw DataError("configured column '" + name + "' missing from '" +
                        path.string() + "'");

  // Everything that is not dropped, categorical or the label must be numeric.
  std::string bad_cells;
  std::size_t bad_count = 0;
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    const auto& name = table.column_names[c];
    if (name == spec.label_column || contains(spec.drop_columns, name) ||
        contains(spec.categorical_columns, name))
      continue;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      double value;
      if (parse_double(table.rows[r][c], value)) continue;
      ++bad_count;
      if (bad_count <= 10)
        bad_cells += "\n  row " + std::to_string(r) + ", column '" + name + "': '" +
                     table.rows[r][c] + "'";
    }
  }
  if (bad_count > 0)
    throw DataError("non-numeric cells in numeric columns (" +
                    std::to_string(bad_count) + " total):" + bad_cells);
  return table;
}

namespace {

struct ColumnPlan {
  std::vector<std::size_t> numeric;      // table column indices, table order
  std::vector<std::size_t> categorical;  // table column indices, table order
  std::size_t label = 0;
};

ColumnPlan plan_columns(const RawTable& table, const PipelineSpec& spec) {
  ColumnPlan plan;
  plan.label = *table.column_index(spec.label_column);
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    const auto& name = table.column_names[c];
    if (name == spec.label_column || contains(spec.drop_columns, name)) continue;
    if (contains(spec.categorical_columns, name))
      plan.categorical.push_back(c);
    else
      plan.numeric.push_back(c);
  }
  return plan;
}

FeatureSchema build_schema(const RawTable& table, const PipelineSpec& spec,
                           const ColumnPlan& plan, const EncodingMap& encoding,
                           std::vector<std::string> class_names) {
  FeatureSchema schema;
  for (std::size_t c : plan.numeric) {
    const auto& name = table.column_names[c];
    Feature f;
    f.name = name;
    f.kind = contains(spec.integer_columns, name) ? FeatureKind::DiscreteInteger
                                                  : FeatureKind::Continuous;
    schema.features.push_back(std::move(f));
  }
  for (const auto& enc : encoding.columns) {
    for (const auto& cat : enc.categories)
      schema.features.push_back(
          {enc.column + "=" + cat, FeatureKind::CategoricalEncoded, enc.column});
    schema.features.push_back({enc.column + "=" + EncodingMap::kOtherLabel,
                               FeatureKind::CategoricalEncoded, enc.column});
  }
  schema.class_names = std::move(class_names);
  schema.validate();
  return schema;
}

Dataset encode_rows(const RawTable& table, const PipelineSpec& spec,
                    const FeatureSchema& schema, const EncodingMap& encoding,
                    bool allow_new_classes, std::vector<std::string>* class_names_out) {
  std::vector<std::string> class_names =
      class_names_out ? *class_names_out : schema.class_names;

  // Source columns are resolved by name, so the table's column order is free
  // to differ from the order the encoding was fitted on.
  std::size_t numeric_count = 0;
  for (const auto& f : schema.features)
    if (f.kind != FeatureKind::CategoricalEncoded) ++numeric_count;

  std::vector<std::size_t> numeric_source(numeric_count);
  for (std::size_t i = 0; i < numeric_count; ++i) {
    const auto idx = table.column_index(schema.features[i].name);
    if (!idx)
      throw DataError("column '" + schema.features[i].name + "' missing from the table");
    numeric_source[i] = *idx;
  }
  std::vector<std::size_t> categorical_source(encoding.columns.size());
  for (std::size_t g = 0; g < encoding.columns.size(); ++g) {
    const auto idx = table.column_index(encoding.columns[g].column);
    if (!idx)
      throw DataError("column '" + encoding.columns[g].column +
                      "' missing from the table");
    categorical_source[g] = *idx;
  }
  const std::size_t label_source = *table.column_index(spec.label_column);

  Dataset ds;
  ds.values = Matrix(table.row_count(), schema.feature_count(), 0.0);

  std::string integral_violations;
  std::size_t integral_count = 0;

  for (std::size_t r = 0; r < table.row_count(); ++r) {
    for (std::size_t i = 0; i < numeric_count; ++i) {
      double value = 0.0;
      parse_double(table.rows[r][numeric_source[i]], value);  // validated in load_csv
      if (schema.features[i].kind == FeatureKind::DiscreteInteger &&
          value != std::floor(value)) {
        ++integral_count;
        if (integral_count <= 10)
          integral_violations += "\n  row " + std::to_string(r) + ", column '" +
                                 schema.features[i].name + "': " +
                                 table.rows[r][numeric_source[i]];
      }
      ds.values(r, i) = value;
    }

    std::size_t offset = numeric_count;
    for (std::size_t g = 0; g < encoding.columns.size(); ++g) {
      const auto& enc = encoding.columns[g];
      const auto& cell = table.rows[r][categorical_source[g]];
      const auto it = std::find(enc.categories.begin(), enc.categories.end(), cell);
      const std::size_t hot = it == enc.categories.end()
                                  ? enc.categories.size()  // 'Other'
                                  : static_cast<std::size_t>(it - enc.categories.begin());
      ds.values(r, offset + hot) = 1.0;
      offset += enc.categories.size() + 1;
    }

    const auto& label = table.rows[r][label_source];
    auto found = std::find(class_names.begin(), class_names.end(), label);
    if (found == class_names.end()) {
      if (!allow_new_classes)
        throw DataError("row " + std::to_string(r) + " has unknown class '" + label + "'");
      class_names.push_back(label);
      found = class_names.end() - 1;
    }
    ds.labels.push_back(static_cast<int>(found - class_names.begin()));
  }

  if (integral_count > 0)
    throw DataError("non-integral values in integer columns (" +
                    std::to_string(integral_count) + " total):" + integral_violations);

  if (class_names_out) *class_names_out = std::move(class_names);
  return ds;
}

}  // namespace

PreprocessResult preprocess(const RawTable& table, const PipelineSpec& spec) {
  spec.validate();
  const ColumnPlan plan = plan_columns(table, spec);

  EncodingMap encoding;
  for (std::size_t c : plan.categorical) {
    std::map<std::string, std::size_t> counts;
    for (const auto& row : table.rows) ++counts[row[c]];

    CategoryEncoding enc;
    enc.column = table.column_names[c];
    const double total = static_cast<double>(table.row_count());
    for (const auto& [cat, count] : counts) {
      if (total > 0.0 &&
          static_cast<double>(count) / total < spec.min_category_frequency)
        continue;  // collapses to 'Other'
      if (cat == EncodingMap::kOtherLabel) continue;  // shares the implicit column
      enc.categories.push_back(cat);
    }
    std::sort(enc.categories.begin(), enc.categories.end());
    encoding.columns.push_back(std::move(enc));
  }

  std::vector<std::string> class_names;
  // Two passes: labels first so the schema can be built, then the encode.
  for (const auto& row : table.rows) {
    const auto& label = row[plan.label];
    if (!contains(class_names, label)) class_names.push_back(label);
  }

  PreprocessResult result;
  result.encoding = encoding;
  result.schema = build_schema(table, spec, plan, encoding, class_names);
  result.dataset = encode_rows(table, spec, result.schema, encoding,
                               /*allow_new_classes=*/true, &class_names);
  result.dataset.schema = result.schema;
  return result;
}

Dataset apply_encoding(const RawTable& table, const PipelineSpec& spec,
                       const FeatureSchema& schema, const EncodingMap& encoding) {
  spec.validate();
  Dataset ds = encode_rows(table, spec, schema, encoding,
                           /*allow_new_classes=*/false, nullptr);
  ds.schema = schema;
  return ds;
}

std::vector<std::string> read_label_column(const std::filesystem::path& path) {
  auto records = csv::read_file(path);
  if (records.empty()) throw DataError("'" + path.string() + "' has no header row");
  std::vector<std::string> labels;
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].empty()) continue;
    labels.push_back(records[r].back());
  }
  return labels;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_indices(
    std::span<const int> labels, std::size_t class_count, double fraction,
    std::uint64_t seed, const std::vector<std::string>& class_names) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError("split fraction must be in (0, 1)");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  for (std::size_t c = 0; c < class_count; ++c) {
    auto it = by_class.find(static_cast<int>(c));
    const std::size_t n_c = it == by_class.end() ? 0 : it->second.size();
    if (n_c == 0) continue;
    if (n_c < 2)
      throw DataError("class '" + class_label(class_names, c) +
                      "' has fewer than 2 rows, cannot split");

    auto& indices = it->second;
    RngStream rng(RngStream::mix(seed, c));
    for (std::size_t i = indices.size() - 1; i > 0; --i)
      std::swap(indices[i], indices[rng.pick(i + 1)]);

    // round-half-up share for the held-out side
    const auto take = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_c) * fraction + 0.5));
    for (std::size_t i = 0; i < indices.size(); ++i)
      (i < take ? second : first).push_back(indices[i]);
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {std::move(first), std::move(second)};
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double fraction,
                                             std::uint64_t seed) {
  auto [train_idx, eval_idx] = stratified_indices(
      ds.labels, ds.schema.class_count(), fraction, seed, ds.schema.class_names);

  const auto gather = [&](const std::vector<std::size_t>& indices) {
    Dataset out;
    out.schema = ds.schema;
    out.values = Matrix(0, ds.values.cols());
    for (std::size_t i : indices) {
      out.values.push_row(ds.values.row(i));
      out.labels.push_back(ds.labels[i]);
    }
    return out;
  };
  return {gather(train_idx), gather(eval_idx)};
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> header;
  for (const auto& f : ds.schema.features) header.push_back(f.name);
  header.push_back("label");
  records.push_back(std::move(header));

  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<std::string> record;
    record.reserve(ds.values.cols() + 1);
    for (std::size_t j = 0; j < ds.values.cols(); ++j)
      record.push_back(csv::format_double(ds.values(i, j)));
    record.push_back(ds.schema.class_names.at(static_cast<std::size_t>(ds.labels[i])));
    records.push_back(std::move(record));
  }
  csv::write_file(path, records);
}

Dataset read_dataset(const std::filesystem::path& path, const FeatureSchema& schema) {
  auto records = csv::read_file(path);
  if (records.empty()) throw DataError("'" + path.string() + "' has no header row");

  const std::size_t d = schema.feature_count();
  const auto& header = records.front();
  if (header.size() != d + 1)
    throw DataError("'" + path.string() + "' has " + std::to_string(header.size()) +
                    " columns, schema expects " + std::to_string(d + 1));
  for (std::size_t j = 0; j < d; ++j)
    if (header[j] != schema.features[j].name)
      throw DataError("column " + std::to_string(j) + " is '" + header[j] +
                      "', schema expects '" + schema.features[j].name + "'");

  Dataset ds;
  ds.schema = schema;
  ds.values = Matrix(records.size() - 1, d, 0.0);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& record = records[r];
    if (record.size() != d + 1)
      throw DataError("row " + std::to_string(r) + " has " +
                      std::to_string(record.size()) + " cells, expected " +
                      std::to_string(d + 1));
    for (std::size_t j = 0; j < d; ++j) {
      double value;
      if (!parse_double(record[j], value))
        throw DataError("row " + std::to_string(r) + ", column '" +
                        schema.features[j].name + "': cannot parse '" + record[j] + "'");
      ds.values(r - 1, j) = value;
    }
    const auto cls = schema.class_index(record[d]);
    if (!cls)
      throw DataError("row " + std::to_string(r) + " has unknown class '" + record[d] + "'");
    ds.labels.push_back(*cls);
  }
  return ds;
}

}  // namespace a2pm

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smm/postprocess.hpp"

namespace smm {

/// Comma-separated numeric table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  RowMatrix values;

  /// Index of the named column, or -1.
  int column(const std::string& name) const;
};

/// Throws FormatError on ragged rows or non-numeric cells, with the line number.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in);

/// Features plus optional one-based truth columns `component` and `cluster`
/// (stored zero-based).
struct LabeledData {
  RowMatrix features;
  std::vector<std::string> feature_names;
  std::optional<Labels> component;
  std::optional<Labels> cluster;
};

/// Every column except `component` and `cluster` is a feature.
LabeledData read_data_csv(const std::string& path);
void write_data_csv(const std::string& path, const RowMatrix& features,
                    const Labels* component = nullptr, const Labels* cluster = nullptr);

/// Dense zero-based codes in order of first appearance of each distinct value.
Labels encode_labels(const std::vector<double>& raw);

/// Reads the label column of a CSV: `cluster`, else `S_hat`, else `label`,
/// else the last column.
Labels read_label_column(const std::string& path);

/// %.17g
std::string format_real(double x);

/// One JSON record per line: {iter, eta, clusters[{w, mu, sigma, b0, lambda}], S, K0}
/// with one-based S.
void write_chain(std::ostream& out, const ChainOutput& chain);
void write_chain_file(const std::string& path, const ChainOutput& chain);
ChainOutput read_chain(std::istream& in);
ChainOutput read_chain_file(const std::string& path);

std::string identified_model_json(const IdentifiedModel& model);
void write_identified_model(const std::string& path, const IdentifiedModel& model);
/// id, S_hat, max_t with one-based id and label.
void write_labels_csv(const std::string& path, const IdentifiedModel& model);
void write_similarity_csv(const std::string& path, const Matrix& similarity);

std::uint64_t fnv1a64(const void* data, std::size_t size);
/// Hash of the raw feature matrix bytes (row-major) and its shape.
std::uint64_t data_hash(const RowMatrix& features);
std::string hex64(std::uint64_t h);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace smm

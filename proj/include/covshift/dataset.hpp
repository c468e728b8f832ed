#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace covshift {

/// Raised for malformed input files; the message names the offending cell.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An N×d matrix of finite features with optional dense class labels.
///
/// Labels are ids in [0, num_classes). Column and class names are carried
/// along so a dataset can be written back in the format it was read from.
class Dataset {
 public:
  /// Unlabeled dataset. Throws DataError if empty or non-finite.
  Dataset(Eigen::MatrixXd features, std::string name = {});

  /// Labeled dataset. Every label must lie in [0, num_classes).
  Dataset(Eigen::MatrixXd features, std::vector<int> labels, int num_classes,
          std::string name = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(features_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  const Eigen::MatrixXd& features() const noexcept { return features_; }

  bool labeled() const noexcept { return labels_.has_value(); }
  /// Throws std::logic_error on an unlabeled dataset.
  const std::vector<int>& labels() const;
  int num_classes() const noexcept { return num_classes_; }
  /// Rows per class; empty for unlabeled data.
  std::vector<std::size_t> class_counts() const;
  /// True when every class id in [0, num_classes) occurs.
  bool covers_all_classes() const;

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::vector<std::string>& column_names() const noexcept { return column_names_; }
  void set_column_names(std::vector<std::string> names);
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  void set_class_names(std::vector<std::string> names);
  const std::string& label_column() const noexcept { return label_column_; }
  void set_label_column(std::string name) { label_column_ = std::move(name); }

  /// Rows in the given order; names and class metadata are carried over.
  Dataset subset(const std::vector<std::size_t>& rows) const;
  /// Same labels and metadata, new features (row count must match).
  Dataset with_features(Eigen::MatrixXd features) const;

 private:
  void validate() const;

  Eigen::MatrixXd features_;
  std::optional<std::vector<int>> labels_;
  int num_classes_ = 0;
  std::string name_;
  std::vector<std::string> column_names_;
  std::vector<std::string> class_names_;
  std::string label_column_;
};

/// Reads a comma-separated file with a header row. If `label_column` is set,
/// that column is read as categorical and re-encoded to dense ids in order of
/// first appearance; all other columns must parse as finite reals.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = std::nullopt);

/// Writes `data` in the same layout load_csv accepts.
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// Per-column z-scoring (population std); constant columns are only centered.
Dataset standardize(const Dataset& data);

}  // namespace covshift

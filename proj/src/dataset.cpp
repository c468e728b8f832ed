#include "covshift/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace covshift {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_real(std::string_view text, double& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd features, std::string name)
    : features_(std::move(features)), name_(std::move(name)) {
  validate();
}

Dataset::Dataset(Eigen::MatrixXd features, std::vector<int> labels, int num_classes,
                 std::string name)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      name_(std::move(name)) {
  validate();
}

void Dataset::validate() const {
  if (features_.rows() < 1 || features_.cols() < 1)
    throw DataError(fmt::format("dataset '{}' must have at least one row and one column (got {}x{})",
                                name_, features_.rows(), features_.cols()));
  if (!features_.allFinite()) throw DataError(fmt::format("dataset '{}' has non-finite features", name_));
  if (labels_) {
    if (labels_->size() != size())
      throw DataError(fmt::format("dataset '{}': {} labels for {} rows", name_, labels_->size(), size()));
    if (num_classes_ < 1) throw DataError("labeled dataset needs at least one class");
    for (int y : *labels_)
      if (y < 0 || y >= num_classes_)
        throw DataError(fmt::format("dataset '{}': label {} outside [0, {})", name_, y, num_classes_));
  }
}

const std::vector<int>& Dataset::labels() const {
  if (!labels_) throw std::logic_error("dataset '" + name_ + "' is unlabeled");
  return *labels_;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(labels_ ? static_cast<std::size_t>(num_classes_) : 0, 0);
  if (labels_)
    for (int y : *labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

bool Dataset::covers_all_classes() const {
  const auto counts = class_counts();
  return std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
}

void Dataset::set_column_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != dim())
    throw std::invalid_argument(fmt::format("{} column names for {} columns", names.size(), dim()));
  column_names_ = std::move(names);
}

void Dataset::set_class_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != static_cast<std::size_t>(num_classes_))
    throw std::invalid_argument(fmt::format("{} class names for {} classes", names.size(), num_classes_));
  class_names_ = std::move(names);
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), features_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= size()) throw std::out_of_range("subset row out of range");
    sub.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(rows[r]));
  }
  Dataset out = [&] {
    if (!labels_) return Dataset(std::move(sub), name_);
    std::vector<int> y;
    y.reserve(rows.size());
    for (std::size_t r : rows) y.push_back((*labels_)[r]);
    return Dataset(std::move(sub), std::move(y), num_classes_, name_);
  }();
  out.column_names_ = column_names_;
  out.class_names_ = class_names_;
  out.label_column_ = label_column_;
  return out;
}

Dataset Dataset::with_features(Eigen::MatrixXd features) const {
  if (features.rows() != features_.rows())
    throw std::invalid_argument("with_features: row count changed");
  Dataset out = labels_ ? Dataset(std::move(features), *labels_, num_classes_, name_)
                        : Dataset(std::move(features), name_);
  out.class_names_ = class_names_;
  out.label_column_ = label_column_;
  if (out.dim() == dim()) out.column_names_ = column_names_;
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));

  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw DataError(fmt::format("'{}' is empty", path.string()));
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  std::vector<std::string> header;
  for (auto field : split_fields(line)) header.emplace_back(field);
  std::optional<std::size_t> label_index;
  if (label_column) {
    const auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end())
      throw DataError(fmt::format("'{}': no column named '{}'", path.string(), *label_column));
    label_index = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_index) feature_names.emplace_back(header[c]);
  if (feature_names.empty()) throw DataError(fmt::format("'{}' has no feature columns", path.string()));

  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::unordered_map<std::string, int> class_ids;
  std::size_t rows = 0;
  std::size_t line_number = 1;

  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw DataError(fmt::format("'{}' line {}: expected {} fields, found {}", path.string(),
                                  line_number, header.size(), fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_index) {
        if (fields[c].empty())
          throw DataError(fmt::format("'{}' line {}, column '{}': empty label", path.string(),
                                      line_number, header[c]));
        std::string key(fields[c]);
        auto [it, inserted] = class_ids.try_emplace(key, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(key);
        labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      if (!parse_real(fields[c], v))
        throw DataError(fmt::format("'{}' line {}, column '{}': cannot parse '{}' as a number",
                                    path.string(), line_number, header[c], fields[c]));
      if (!std::isfinite(v))
        throw DataError(fmt::format("'{}' line {}, column '{}': non-finite value", path.string(),
                                    line_number, header[c]));
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError(fmt::format("'{}' has a header but no data rows", path.string()));

  const auto d = static_cast<Eigen::Index>(feature_names.size());
  Eigen::MatrixXd features =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          values.data(), static_cast<Eigen::Index>(rows), d);

  const std::string name = path.stem().string();
  Dataset data = label_index ? Dataset(std::move(features), std::move(labels),
                                       static_cast<int>(class_names.size()), name)
                             : Dataset(std::move(features), name);
  data.set_column_names(std::move(feature_names));
  if (label_index) {
    data.set_class_names(std::move(class_names));
    data.set_label_column(*label_column);
  }
  return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));

  std::vector<std::string> names = data.column_names();
  if (names.empty())
    for (std::size_t c = 0; c < data.dim(); ++c) names.push_back(fmt::format("x{}", c + 1));
  std::string header = fmt::format("{}", fmt::join(names, ","));
  if (data.labeled()) header += "," + (data.label_column().empty() ? std::string("class") : data.label_column());
  out << header << '\n';

  const auto& x = data.features();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::string row;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c) row += ',';
      row += fmt::format("{}", x(r, c));
    }
    if (data.labeled()) {
      const int y = data.labels()[static_cast<std::size_t>(r)];
      row += ',';
      row += data.class_names().empty() ? std::to_string(y) : data.class_names()[static_cast<std::size_t>(y)];
    }
    out << row << '\n';
  }
}

Dataset standardize(const Dataset& data) {
  const auto& x = data.features();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - mean;
  Eigen::RowVectorXd sd = (centered.array().square().colwise().sum() / static_cast<double>(x.rows())).sqrt();
  for (Eigen::Index c = 0; c < sd.size(); ++c)
    if (sd[c] > 0.0) centered.col(c) /= sd[c];
  return data.with_features(std::move(centered));
}

}  // namespace covshift

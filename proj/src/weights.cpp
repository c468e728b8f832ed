#include "covshift/weights.hpp"

#include "covshift/dataset.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace covshift {

WeightVector::WeightVector(Eigen::VectorXd values, Normalization normalization)
    : values_(std::move(values)), normalization_(normalization) {
  for (Eigen::Index i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]) || values_[i] < 0.0)
      throw std::invalid_argument(fmt::format("weight {} is {}; weights must be finite and >= 0", i, values_[i]));
}

std::size_t WeightVector::count_positive() const {
  return static_cast<std::size_t>((values_.array() > 0.0).count());
}

WeightVector WeightVector::uniform(std::size_t n) {
  return WeightVector(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)), Normalization::MeanOne);
}

WeightVector normalize_mean_one(const WeightVector& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw std::domain_error("cannot normalise: every weight is zero");
  const double scale = static_cast<double>(weights.size()) / total;
  return WeightVector(weights.values() * scale, Normalization::MeanOne);
}

void write_weights_csv(const WeightVector& weights, std::ostream& out) {
  out << "weight\n";
  for (std::size_t i = 0; i < weights.size(); ++i) out << fmt::format("{}\n", weights[i]);
}

void write_weights_csv(const WeightVector& weights, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  write_weights_csv(weights, out);
}

WeightVector read_weights_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line) || line.rfind("weight", 0) != 0)
    throw DataError(fmt::format("'{}': expected header 'weight'", path.string()));
  std::vector<double> values;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || ptr != line.data() + line.size())
      throw DataError(fmt::format("'{}' line {}: cannot parse '{}'", path.string(), line_number, line));
    values.push_back(v);
  }
  return WeightVector(Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace covshift

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>

namespace covshift {

enum class Normalization { RawCounts, MeanOne };

/// Nonnegative, finite per-source-sample importance weights.
class WeightVector {
 public:
  /// Throws std::invalid_argument on a negative or non-finite entry.
  explicit WeightVector(Eigen::VectorXd values,
                        Normalization normalization = Normalization::RawCounts);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Normalization normalization() const noexcept { return normalization_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  double sum() const { return values_.sum(); }
  std::size_t count_positive() const;

  static WeightVector uniform(std::size_t n);

 private:
  Eigen::VectorXd values_;
  Normalization normalization_;
};

/// Rescales to mean one (w · N / Σw). Throws std::domain_error when Σw == 0,
/// the signature of every source point being starved of target mass.
WeightVector normalize_mean_one(const WeightVector& weights);

/// Single column with header `weight`, one row per source sample.
void write_weights_csv(const WeightVector& weights, std::ostream& out);
void write_weights_csv(const WeightVector& weights, const std::filesystem::path& path);
WeightVector read_weights_csv(const std::filesystem::path& path);

}  // namespace covshift

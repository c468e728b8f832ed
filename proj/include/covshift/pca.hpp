#pragma once

#include "covshift/dataset.hpp"

#include <Eigen/Dense>

namespace covshift {

/// Principal axes of a sample covariance, truncated to the smallest number of
/// components that retains the requested variance fraction.
struct PcaModel {
  Eigen::VectorXd mean;         ///< length d
  Eigen::MatrixXd components;   ///< d×k, orthonormal columns, descending eigenvalue
  Eigen::VectorXd eigenvalues;  ///< length k, nonincreasing, nonnegative
  Eigen::VectorXd all_eigenvalues;  ///< length d, the full spectrum
  double retained_fraction = 1.0;

  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(mean.size()); }
  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(components.cols()); }
  double total_variance() const { return all_eigenvalues.sum(); }
  double discarded_variance() const { return total_variance() - eigenvalues.sum(); }
};

/// Eigendecomposition of the (N−1)-normalised covariance. Each component's
/// sign is fixed so its largest-magnitude loading is positive.
/// Throws std::invalid_argument for N < 2 or a fraction outside (0, 1], and
/// DataError when all rows are identical.
PcaModel fit_pca(const Dataset& data, double retained_fraction);

/// (features − mean)·components; labels and metadata carried through.
/// Throws std::invalid_argument on dimension mismatch.
Dataset project(const PcaModel& model, const Dataset& data);

/// Maps projected coordinates back to the input space.
Eigen::MatrixXd reconstruct(const PcaModel& model, const Eigen::MatrixXd& projected);

}  // namespace covshift

#pragma once

#include "covshift/estimators.hpp"
#include "covshift/outcome.hpp"
#include "covshift/random.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>

namespace covshift {

/// Multivariate normal with a positive-definite covariance.
class GaussianDensity {
 public:
  /// Throws std::invalid_argument if the covariance is not PD or sizes differ.
  GaussianDensity(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }

  double log_pdf(std::span<const double> x) const;
  /// n×d draws.
  Eigen::MatrixXd sample(std::size_t n, Rng& rng) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd lower_;  // Cholesky factor
  double log_norm_ = 0.0;
};

/// Known source and target densities with the exact importance ratio.
struct SyntheticShift {
  std::string name;
  GaussianDensity source;
  GaussianDensity target;

  double log_true_ratio(std::span<const double> x) const;
  double true_ratio(std::span<const double> x) const;

  /// Family descriptors:
  ///   none[:DIM]                 source = target = N(0, I)
  ///   gauss-mean:SHIFT[:DIM]     N(0, I) → N(SHIFT·e₁, I)
  ///   gauss-scale:SCALE[:DIM]    N(0, I) → N(0, SCALE²·I)
  /// Throws std::invalid_argument on anything else.
  static SyntheticShift parse(const std::string& descriptor);
};

struct OracleMetrics {
  double correlation = 0.0;   ///< Pearson, mean-one weights vs mean-one true ratio
  double ms_log_error = 0.0;  ///< over strictly positive weights only
  std::size_t positive_count = 0;
};

/// Pearson correlation; 0 when either input is constant.
double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Draws n_source/n_target points, estimates weights at the source points and
/// compares them with the analytic ratio there.
Outcome<OracleMetrics> oracle_validate(const SyntheticShift& shift, std::size_t n_source,
                                       std::size_t n_target, EstimatorKind estimator,
                                       std::uint64_t seed,
                                       const EstimatorSettings& settings = {});

}  // namespace covshift

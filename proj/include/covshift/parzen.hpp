#pragma once

#include "covshift/weights.hpp"

#include <Eigen/Dense>

namespace covshift {

enum class BandwidthRule { Silverman, Fixed };

struct Bandwidth {
  BandwidthRule rule = BandwidthRule::Silverman;
  double value = 1.0;  ///< used when rule == Fixed

  static Bandwidth silverman() { return {}; }
  static Bandwidth fixed(double h) { return {BandwidthRule::Fixed, h}; }
};

/// Silverman's rule of thumb for a spherical Gaussian kernel:
/// (4/(d+2))^{1/(d+4)} · n^{−1/(d+4)} · σ̄, with σ̄ the root mean per-axis
/// variance. Returns 1 for a sample with zero spread.
double silverman_bandwidth(const Eigen::MatrixXd& sample);

/// log p̂(x) for each row of `points` under a Gaussian KDE over `sample`.
Eigen::VectorXd log_kde(const Eigen::MatrixXd& sample, double bandwidth,
                        const Eigen::MatrixXd& points);

/// Ratio of two separately fitted kernel density estimates, evaluated at the
/// source rows and rescaled to mean one. Bandwidths are chosen independently
/// for the two samples. Throws std::invalid_argument when either sample has
/// fewer than two rows or dimensions differ.
WeightVector parzen_ratio(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                          Bandwidth bandwidth = Bandwidth::silverman());

}  // namespace covshift

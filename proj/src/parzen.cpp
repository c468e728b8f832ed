#include "covshift/parzen.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace covshift {

double silverman_bandwidth(const Eigen::MatrixXd& sample) {
  const auto n = static_cast<double>(sample.rows());
  const auto d = static_cast<double>(sample.cols());
  if (sample.rows() < 2) return 1.0;
  const Eigen::MatrixXd centered = sample.rowwise() - sample.colwise().mean();
  const double mean_variance = centered.array().square().sum() / ((n - 1.0) * d);
  if (!(mean_variance > 0.0)) return 1.0;
  return std::pow(4.0 / (d + 2.0), 1.0 / (d + 4.0)) * std::pow(n, -1.0 / (d + 4.0)) *
         std::sqrt(mean_variance);
}

Eigen::VectorXd log_kde(const Eigen::MatrixXd& sample, double bandwidth, const Eigen::MatrixXd& points) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  const auto n = static_cast<double>(sample.rows());
  const auto d = static_cast<double>(sample.cols());
  const double log_norm = -std::log(n) - 0.5 * d * std::log(2.0 * std::numbers::pi * bandwidth * bandwidth);
  const double scale = -1.0 / (2.0 * bandwidth * bandwidth);

  Eigen::VectorXd out(points.rows());
  Eigen::VectorXd exponents(sample.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index k = 0; k < sample.rows(); ++k)
      exponents[k] = scale * (points.row(i) - sample.row(k)).squaredNorm();
    const double top = exponents.maxCoeff();
    out[i] = log_norm + top + std::log((exponents.array() - top).exp().sum());
  }
  return out;
}

WeightVector parzen_ratio(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target, Bandwidth bandwidth) {
  if (source.rows() < 2 || target.rows() < 2)
    throw std::invalid_argument("parzen_ratio needs at least two source and two target rows");
  if (source.cols() != target.cols())
    throw std::invalid_argument(fmt::format("source has dimension {}, target {}", source.cols(), target.cols()));

  const bool silverman = bandwidth.rule == BandwidthRule::Silverman;
  const double h_source = silverman ? silverman_bandwidth(source) : bandwidth.value;
  const double h_target = silverman ? silverman_bandwidth(target) : bandwidth.value;

  // Ratio in log space; the common scale cancels under mean-one normalisation.
  Eigen::VectorXd log_ratio = log_kde(target, h_target, source) - log_kde(source, h_source, source);
  log_ratio.array() -= log_ratio.maxCoeff();
  Eigen::VectorXd w = log_ratio.array().exp();
  w *= static_cast<double>(w.size()) / w.sum();
  return WeightVector(std::move(w), Normalization::MeanOne);
}

}  // namespace covshift

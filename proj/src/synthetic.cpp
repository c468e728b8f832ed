#include "covshift/synthetic.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace covshift {

GaussianDensity::GaussianDensity(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), covariance_(std::move(covariance)) {
  if (mean_.size() < 1 || covariance_.rows() != mean_.size() || covariance_.cols() != mean_.size())
    throw std::invalid_argument("GaussianDensity: mean/covariance size mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("GaussianDensity: covariance is not positive definite");
  lower_ = llt.matrixL();
  const double log_det = 2.0 * lower_.diagonal().array().log().sum();
  log_norm_ = -0.5 * (static_cast<double>(mean_.size()) * std::log(2.0 * std::numbers::pi) + log_det);
}

double GaussianDensity::log_pdf(std::span<const double> x) const {
  if (x.size() != dim()) throw std::invalid_argument("log_pdf: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> point(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd z = lower_.triangularView<Eigen::Lower>().solve(point - mean_);
  return log_norm_ - 0.5 * z.squaredNorm();
}

Eigen::MatrixXd GaussianDensity::sample(std::size_t n, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), mean_.size());
  for (Eigen::Index r = 0; r < z.rows(); ++r)
    for (Eigen::Index c = 0; c < z.cols(); ++c) z(r, c) = normal(rng);
  return (z * lower_.transpose()).rowwise() + mean_.transpose();
}

double SyntheticShift::log_true_ratio(std::span<const double> x) const { return target.log_pdf(x) - source.log_pdf(x); }

double SyntheticShift::true_ratio(std::span<const double> x) const { return std::exp(log_true_ratio(x)); }

namespace {

double parse_number(const std::string& text, const std::string& descriptor) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw std::invalid_argument("bad number '" + text + "' in shift '" + descriptor + "'");
  return v;
}

}  // namespace

SyntheticShift SyntheticShift::parse(const std::string& descriptor) {
  std::vector<std::string> parts;
  std::stringstream ss(descriptor);
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.empty()) throw std::invalid_argument("empty shift descriptor");

  const std::string& family = parts[0];
  const bool takes_parameter = family == "gauss-mean" || family == "gauss-scale";
  if (!takes_parameter && family != "none")
    throw std::invalid_argument("unknown shift family '" + family + "' (expected none, gauss-mean, gauss-scale)");

  const std::size_t dim_at = takes_parameter ? 2 : 1;
  if (parts.size() > dim_at + 1 || (takes_parameter && parts.size() < 2))
    throw std::invalid_argument("malformed shift descriptor '" + descriptor + "'");
  double dim_value = parts.size() > dim_at ? parse_number(parts[dim_at], descriptor) : 1.0;
  if (dim_value < 1 || dim_value != std::floor(dim_value) || dim_value > 1000)
    throw std::invalid_argument("shift dimension must be a positive integer");
  const auto d = static_cast<Eigen::Index>(dim_value);

  Eigen::VectorXd target_mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd target_cov = Eigen::MatrixXd::Identity(d, d);
  if (family == "gauss-mean") {
    target_mean[0] = parse_number(parts[1], descriptor);
  } else if (family == "gauss-scale") {
    const double scale = parse_number(parts[1], descriptor);
    if (!(scale > 0.0)) throw std::invalid_argument("gauss-scale needs a positive scale");
    target_cov *= scale * scale;
  }
  return SyntheticShift{descriptor, GaussianDensity(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d)),
                        GaussianDensity(std::move(target_mean), std::move(target_cov))};
}

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson_correlation: need equal sizes >= 2");
  const Eigen::ArrayXd da = a.array() - a.mean();
  const Eigen::ArrayXd db = b.array() - b.mean();
  const double saa = (da * da).sum();
  const double sbb = (db * db).sum();
  if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
  return (da * db).sum() / std::sqrt(saa * sbb);
}

Outcome<OracleMetrics> oracle_validate(const SyntheticShift& shift, std::size_t n_source, std::size_t n_target,
                                       EstimatorKind estimator, std::uint64_t seed, const EstimatorSettings& settings) {
  if (n_source < 2 || n_target < 1) throw std::invalid_argument("oracle_validate needs n_source >= 2 and n_target >= 1");
  Rng rng = make_rng({seed, 0x5A5A});
  const Eigen::MatrixXd source = shift.source.sample(n_source, rng);
  const Eigen::MatrixXd target = shift.target.sample(n_target, rng);

  EstimatorSettings local = settings;
  local.seed = seed;
  auto estimated = estimate_weights(estimator, source, target, local);
  if (!estimated) return estimated.failure();
  const Eigen::VectorXd w = normalize_mean_one(estimated.value()).values();

  Eigen::VectorXd log_ratio(static_cast<Eigen::Index>(n_source));
  for (Eigen::Index i = 0; i < log_ratio.size(); ++i) {
    const Eigen::RowVectorXd row = source.row(i);
    log_ratio[i] = shift.log_true_ratio({row.data(), static_cast<std::size_t>(row.size())});
  }
  Eigen::VectorXd ratio = (log_ratio.array() - log_ratio.maxCoeff()).exp();
  ratio *= static_cast<double>(ratio.size()) / ratio.sum();

  OracleMetrics metrics;
  metrics.correlation = pearson_correlation(w, ratio);
  double sq = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0)) continue;
    const double diff = std::log(w[i]) - std::log(ratio[i]);
    sq += diff * diff;
    ++metrics.positive_count;
  }
  metrics.ms_log_error = metrics.positive_count ? sq / static_cast<double>(metrics.positive_count) : 0.0;
  return metrics;
}

}  // namespace covshift

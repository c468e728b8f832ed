#pragma once

#include "covshift/dataset.hpp"
#include "covshift/outcome.hpp"
#include "covshift/weights.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace covshift {

enum class DiscriminantKind { LDA, QDA };

const char* to_string(DiscriminantKind kind) noexcept;
DiscriminantKind parse_discriminant_kind(const std::string& text);

/// Gaussian class model with cached Cholesky factors.
///
/// LDA shares one pooled covariance across classes; QDA keeps one per class.
/// Construct via fit_weighted().
class FittedDiscriminant {
 public:
  DiscriminantKind kind() const noexcept { return kind_; }
  int num_classes() const noexcept { return static_cast<int>(priors_.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(means_.cols()); }

  const Eigen::VectorXd& priors() const noexcept { return priors_; }
  const Eigen::MatrixXd& means() const noexcept { return means_; }  ///< C×d
  /// One matrix for LDA, C for QDA.
  const std::vector<Eigen::MatrixXd>& covariances() const noexcept { return covariances_; }
  const Eigen::MatrixXd& covariance_of(int cls) const;
  double log_det_of(int cls) const;

  /// log π_c − ½ log|Σ_c| − ½ (x−μ_c)ᵀΣ_c⁻¹(x−μ_c) for every class.
  Eigen::VectorXd scores(std::span<const double> x) const;

  nlohmann::json to_json() const;

 private:
  friend Outcome<FittedDiscriminant> fit_weighted(DiscriminantKind, const Dataset&,
                                                  const WeightVector&);
  FittedDiscriminant() = default;

  DiscriminantKind kind_ = DiscriminantKind::LDA;
  Eigen::VectorXd priors_;
  Eigen::MatrixXd means_;
  std::vector<Eigen::MatrixXd> covariances_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  std::vector<double> log_dets_;
};

/// Sample-weighted moment estimates: for class c with weight sum W_c,
/// prior W_c/ΣW, weighted mean, and covariance Σ w_i (x_i−μ_c)(x_i−μ_c)ᵀ / W_c.
/// LDA pools as Σ_c W_c·Σ_c / ΣW. No regularisation is added.
///
/// Throws std::invalid_argument if `train` is unlabeled or the weights have
/// the wrong length. Returns a Failure when some class has zero weight or a
/// covariance is not numerically positive definite.
Outcome<FittedDiscriminant> fit_weighted(DiscriminantKind kind, const Dataset& train,
                                         const WeightVector& weights);

/// Plug-in Bayes rule; ties go to the smallest class id.
/// Throws std::invalid_argument on a non-finite or mis-sized input.
int predict(const FittedDiscriminant& model, std::span<const double> x);

/// Unweighted fraction of misclassified rows. Throws on an empty or unlabeled set.
double error_rate(const FittedDiscriminant& model, const Dataset& test);

}  // namespace covshift

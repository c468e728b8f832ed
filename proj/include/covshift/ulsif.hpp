#pragma once

#include "covshift/kernel_model.hpp"
#include "covshift/outcome.hpp"
#include "covshift/weights.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace covshift {

struct UlsifOptions {
  std::vector<double> sigma_grid;   ///< empty: default_sigma_grid()
  std::vector<double> lambda_grid;  ///< empty: default_lambda_grid()
  std::size_t max_centers = 100;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  /// Fewer strictly positive clipped weights than this flags starvation.
  std::size_t min_positive = 0;
};

/// H_{ℓm} = mean_i k_ℓ(x_i)k_m(x_i) over the source, h_ℓ = mean_j k_ℓ(ξ_j)
/// over the target.
struct UlsifSystem {
  Eigen::MatrixXd H;
  Eigen::VectorXd h;
};

UlsifSystem ulsif_system(const Eigen::MatrixXd& source_kernel, const Eigen::MatrixXd& target_kernel);

struct UlsifSolution {
  Eigen::VectorXd alpha;
  double relative_residual = 0.0;  ///< ‖(H+λI)α − h‖/‖h‖
};

/// α = (H + λI)⁻¹h. λ = +∞ is the ridge limit α = 0. Fails when the solve is
/// non-finite or its relative residual exceeds 1e-8.
Outcome<UlsifSolution> ulsif_solve(const UlsifSystem& system, double lambda);

struct UlsifFit {
  KernelModel model;
  CvReport cv;
  double lambda = 0.0;
  double relative_residual = 0.0;
  /// ŵ at the source rows with negatives clipped to zero; mean one unless
  /// every weight was clipped, in which case raw zeros.
  WeightVector weights;
  std::size_t positive_count = 0;
  bool starved = false;
};

/// (σ, λ) by k-fold cross-validation on the squared-error criterion
/// ½·mean ŵ(x)² − mean ŵ(ξ) over held-out folds, then a closed-form fit.
Outcome<UlsifFit> ulsif_fit(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                            const UlsifOptions& options = {});

}  // namespace covshift

#pragma once

#include "covshift/kernel_model.hpp"
#include "covshift/outcome.hpp"
#include "covshift/weights.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace covshift {

struct KliepOptions {
  std::vector<double> sigma_grid;  ///< empty: default_sigma_grid()
  std::size_t max_centers = 100;
  std::size_t folds = 5;
  std::size_t max_iterations = 500;
  double tolerance = 1e-7;  ///< relative objective change
  std::uint64_t seed = 0;
};

/// Result of maximising Σ_j log (Aα)_j over {α ≥ 0, bᵀα = 1}.
struct KliepSolution {
  Eigen::VectorXd alpha;
  std::vector<double> objective_trace;  ///< objective at every accepted iterate
  std::size_t iterations = 0;
  bool converged = false;
};

/// Projected gradient ascent with Armijo backtracking. `target_kernel` is
/// N_τ×b (kernels at target points), `source_mean` is the length-b vector of
/// kernel means over the source. Fails on a non-finite objective or when the
/// constraint cannot be met.
Outcome<KliepSolution> kliep_optimize(const Eigen::MatrixXd& target_kernel,
                                      const Eigen::VectorXd& source_mean,
                                      const KliepOptions& options);

struct KliepFit {
  KernelModel model;
  CvReport cv;
  KliepSolution solution;
  WeightVector weights;  ///< ŵ at the source rows; mean one by construction
};

/// Kernel width by likelihood cross-validation over target folds, then a
/// final fit on all target rows.
Outcome<KliepFit> kliep_fit(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                            const KliepOptions& options = {});

}  // namespace covshift

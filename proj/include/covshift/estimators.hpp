#pragma once

#include "covshift/kliep.hpp"
#include "covshift/neighbor_index.hpp"
#include "covshift/outcome.hpp"
#include "covshift/parzen.hpp"
#include "covshift/ulsif.hpp"
#include "covshift/weights.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace covshift {

enum class EstimatorKind { NNeW, NNeWPlusOne, Kliep, Ulsif, Parzen, Uniform };

/// CLI name: nnew | nnew1 | kliep | ulsif | parzen | uniform.
const char* to_string(EstimatorKind kind) noexcept;
/// Column header used in reports (NNeW, NNeW+1, KLIEP, ...).
const char* display_name(EstimatorKind kind) noexcept;
std::optional<EstimatorKind> parse_estimator(std::string_view name);
const std::vector<std::string>& estimator_names();

struct EstimatorSettings {
  Acceleration acceleration = Acceleration::KdTree;
  Bandwidth parzen_bandwidth = Bandwidth::silverman();
  std::uint64_t seed = 0;  ///< centre selection for KLIEP/uLSIF
  /// uLSIF fits with fewer strictly positive weights fail with WeightStarvation.
  std::size_t min_positive = 1;
  std::vector<double> sigma_grid;   ///< KLIEP/uLSIF; empty: defaults
  std::vector<double> lambda_grid;  ///< uLSIF; empty: defaults
};

/// Weights for the source rows, rescaled to mean one. Estimator failures
/// (ill-behaved optimisation, starvation, singular solves) come back as a
/// Failure; malformed input (empty source, dimension mismatch) throws.
Outcome<WeightVector> estimate_weights(EstimatorKind kind, const Eigen::MatrixXd& source,
                                       const Eigen::MatrixXd& target,
                                       const EstimatorSettings& settings = {});

}  // namespace covshift

#pragma once

#include "covshift/dataset.hpp"
#include "covshift/neighbor_index.hpp"
#include "covshift/weights.hpp"

#include <cstdint>
#include <vector>

namespace covshift {

/// Number of target rows whose nearest source point is i, for each i.
/// Equivalently, the number of targets inside each source point's Voronoi
/// cell. Sums to the number of targets. `targets` may have zero rows.
std::vector<std::uint64_t> voronoi_counts(const NeighborIndex& index,
                                          const Eigen::MatrixXd& targets);

/// Nearest-neighbour weights: raw Voronoi counts.
WeightVector nnew_weights(const NeighborIndex& index, const Eigen::MatrixXd& targets);
WeightVector nnew_weights(const NeighborIndex& index, const Dataset& target);

/// Laplace-smoothed variant: every cell starts with one count.
WeightVector nnew_plus_one(const NeighborIndex& index, const Eigen::MatrixXd& targets);
WeightVector nnew_plus_one(const NeighborIndex& index, const Dataset& target);

}  // namespace covshift

#include "covshift/nnew.hpp"

#include <fmt/format.h>

namespace covshift {

std::vector<std::uint64_t> voronoi_counts(const NeighborIndex& index, const Eigen::MatrixXd& targets) {
  std::vector<std::uint64_t> counts(index.size(), 0);
  if (targets.rows() == 0) return counts;
  if (static_cast<std::size_t>(targets.cols()) != index.dim())
    throw std::invalid_argument(fmt::format("targets have dimension {}, source {}", targets.cols(), index.dim()));
  for (std::size_t cell : index.nearest_all(targets)) ++counts[cell];
  return counts;
}

namespace {

WeightVector counts_to_weights(const std::vector<std::uint64_t>& counts, std::uint64_t offset) {
  Eigen::VectorXd values(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i)
    values[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i] + offset);
  return WeightVector(std::move(values), Normalization::RawCounts);
}

}  // namespace

WeightVector nnew_weights(const NeighborIndex& index, const Eigen::MatrixXd& targets) {
  return counts_to_weights(voronoi_counts(index, targets), 0);
}

WeightVector nnew_weights(const NeighborIndex& index, const Dataset& target) {
  return nnew_weights(index, target.features());
}

WeightVector nnew_plus_one(const NeighborIndex& index, const Eigen::MatrixXd& targets) {
  return counts_to_weights(voronoi_counts(index, targets), 1);
}

WeightVector nnew_plus_one(const NeighborIndex& index, const Dataset& target) {
  return nnew_plus_one(index, target.features());
}

}  // namespace covshift

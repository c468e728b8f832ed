#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace covshift {

enum class Acceleration { BruteForce, KdTree };

/// Exact Euclidean 1-NN over a fixed point set. Query answers partition space
/// into the Voronoi cells of the stored points.
///
/// Ties in distance go to the smallest row index, in both acceleration modes.
/// Both modes evaluate squared distances with the same summation order, so
/// their answers are identical, not merely equal up to rounding.
class NeighborIndex {
 public:
  /// Throws std::invalid_argument for an empty point set or non-finite entries.
  static NeighborIndex build(const Eigen::MatrixXd& points,
                             Acceleration acceleration = Acceleration::KdTree);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  Acceleration acceleration() const noexcept { return acceleration_; }

  /// Index of the nearest stored point. `query.size()` must equal dim().
  std::size_t nearest(std::span<const double> query) const;

  /// nearest() for every row of `queries` (m×d); result has m entries.
  std::vector<std::size_t> nearest_all(const Eigen::MatrixXd& queries) const;

 private:
  struct Node {
    // Leaf when left == right == -1: points order_[begin, end).
    std::size_t begin = 0;
    std::size_t end = 0;
    int left = -1;
    int right = -1;
    std::size_t axis = 0;
    double split = 0.0;
  };

  NeighborIndex() = default;
  double squared_distance(std::span<const double> query, std::size_t row) const noexcept;
  std::size_t nearest_brute(std::span<const double> query) const noexcept;
  std::size_t nearest_tree(std::span<const double> query) const noexcept;
  int build_node(std::size_t begin, std::size_t end);
  void search(int node, std::span<const double> query, double& best_dist,
              std::size_t& best_row) const noexcept;

  std::size_t n_ = 0;
  std::size_t d_ = 0;
  Acceleration acceleration_ = Acceleration::BruteForce;
  std::vector<double> points_;  // row-major n_×d_
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace covshift

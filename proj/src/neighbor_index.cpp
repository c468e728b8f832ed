#include "covshift/neighbor_index.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace covshift {

namespace {
constexpr std::size_t kLeafSize = 12;
}

NeighborIndex NeighborIndex::build(const Eigen::MatrixXd& points, Acceleration acceleration) {
  if (points.rows() < 1 || points.cols() < 1)
    throw std::invalid_argument("NeighborIndex needs at least one point of dimension >= 1");
  if (!points.allFinite()) throw std::invalid_argument("NeighborIndex: non-finite coordinates");

  NeighborIndex index;
  index.n_ = static_cast<std::size_t>(points.rows());
  index.d_ = static_cast<std::size_t>(points.cols());
  index.acceleration_ = acceleration;
  index.points_.resize(index.n_ * index.d_);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      index.points_.data(), points.rows(), points.cols()) = points;

  if (acceleration == Acceleration::KdTree) {
    index.order_.resize(index.n_);
    std::iota(index.order_.begin(), index.order_.end(), std::size_t{0});
    index.nodes_.reserve(2 * index.n_ / kLeafSize + 1);
    index.build_node(0, index.n_);
  }
  return index;
}

int NeighborIndex::build_node(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  std::size_t axis = 0;
  double widest = 0.0;
  for (std::size_t a = 0; a < d_; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = points_[order_[i] * d_ + a];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = a;
    }
  }
  if (widest == 0.0) return id;  // all points coincide

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return points_[a * d_ + axis] < points_[b * d_ + axis]; });
  const double split = points_[order_[mid] * d_ + axis];

  const int left = build_node(begin, mid);
  const int right = build_node(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.left = left;
  node.right = right;
  node.axis = axis;
  node.split = split;
  return id;
}

double NeighborIndex::squared_distance(std::span<const double> query, std::size_t row) const noexcept {
  const double* p = points_.data() + row * d_;
  double sum = 0.0;
  for (std::size_t j = 0; j < d_; ++j) {
    const double diff = query[j] - p[j];
    sum += diff * diff;
  }
  return sum;
}

std::size_t NeighborIndex::nearest(std::span<const double> query) const {
  if (query.size() != d_)
    throw std::invalid_argument(fmt::format("query has dimension {}, index {}", query.size(), d_));
  return acceleration_ == Acceleration::KdTree ? nearest_tree(query) : nearest_brute(query);
}

std::vector<std::size_t> NeighborIndex::nearest_all(const Eigen::MatrixXd& queries) const {
  if (queries.rows() > 0 && static_cast<std::size_t>(queries.cols()) != d_)
    throw std::invalid_argument(fmt::format("queries have dimension {}, index {}", queries.cols(), d_));
  std::vector<std::size_t> out(static_cast<std::size_t>(queries.rows()));
  std::vector<double> q(d_);
  for (Eigen::Index r = 0; r < queries.rows(); ++r) {
    for (std::size_t j = 0; j < d_; ++j) q[j] = queries(r, static_cast<Eigen::Index>(j));
    out[static_cast<std::size_t>(r)] = nearest(q);
  }
  return out;
}

std::size_t NeighborIndex::nearest_brute(std::span<const double> query) const noexcept {
  std::size_t best_row = 0;
  double best = squared_distance(query, 0);
  for (std::size_t i = 1; i < n_; ++i) {
    const double dist = squared_distance(query, i);
    if (dist < best) {
      best = dist;
      best_row = i;
    }
  }
  return best_row;
}

std::size_t NeighborIndex::nearest_tree(std::span<const double> query) const noexcept {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_row = n_;
  search(0, query, best, best_row);
  return best_row;
}

void NeighborIndex::search(int node_id, std::span<const double> query, double& best_dist,
                           std::size_t& best_row) const noexcept {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.left < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t row = order_[i];
      const double dist = squared_distance(query, row);
      if (dist < best_dist || (dist == best_dist && row < best_row)) {
        best_dist = dist;
        best_row = row;
      }
    }
    return;
  }
  const double diff = query[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search(near, query, best_dist, best_row);
  // `<=` so that an equidistant point with a smaller index is still found.
  if (diff * diff <= best_dist) search(far, query, best_dist, best_row);
}

}  // namespace covshift

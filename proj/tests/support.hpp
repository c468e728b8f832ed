#pragma once

#include "covshift/dataset.hpp"
#include "covshift/experiment.hpp"
#include "covshift/random.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testing {

#ifndef COVSHIFT_DATA_DIR
#define COVSHIFT_DATA_DIR "data"
#endif

inline std::filesystem::path data_path(const std::string& file) {
  return std::filesystem::path(COVSHIFT_DATA_DIR) / file;
}

inline Eigen::MatrixXd gaussian_matrix(covshift::Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                       double scale = 1.0, double shift = 0.0) {
  std::normal_distribution<double> normal(shift, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  return m;
}

inline Eigen::MatrixXd uniform_matrix(covshift::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = unit(rng);
  return m;
}

// Small integer grid coordinates, so that distance ties are exact.
inline Eigen::MatrixXd grid_matrix(covshift::Rng& rng, Eigen::Index rows, Eigen::Index cols, int span = 4) {
  std::uniform_int_distribution<int> pick(0, span);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = pick(rng);
  return m;
}

// Exhaustive 1-NN with the smallest index winning ties.
inline std::vector<std::size_t> brute_nearest(const Eigen::MatrixXd& points, const Eigen::MatrixXd& queries) {
  std::vector<std::size_t> out;
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    std::size_t best = 0;
    double best_dist = (points.row(0) - queries.row(q)).squaredNorm();
    for (Eigen::Index i = 1; i < points.rows(); ++i) {
      const double dist = (points.row(i) - queries.row(q)).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<std::size_t>(i);
      }
    }
    out.push_back(best);
  }
  return out;
}

inline std::vector<std::uint64_t> brute_tally(const Eigen::MatrixXd& points, const Eigen::MatrixXd& queries) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(points.rows()), 0);
  for (std::size_t i : brute_nearest(points, queries)) ++counts[i];
  return counts;
}

// Two or three labeled Gaussian blobs in d dimensions.
inline covshift::Dataset blobs(covshift::Rng& rng, std::size_t per_class, int classes, Eigen::Index d,
                               double separation = 3.0) {
  Eigen::MatrixXd x = gaussian_matrix(rng, static_cast<Eigen::Index>(per_class) * classes, d);
  std::vector<int> y;
  for (int c = 0; c < classes; ++c)
    for (std::size_t i = 0; i < per_class; ++i) {
      x(static_cast<Eigen::Index>(y.size()), c % d) += separation * c;
      y.push_back(c);
    }
  return covshift::Dataset(std::move(x), std::move(y), classes, "blobs");
}

inline std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto dir = std::filesystem::temp_directory_path() / "covshift_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << content;
  return path;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Classical unweighted moments: per-class mean and covariance with divisor n_c.
struct Moments {
  Eigen::MatrixXd means;
  std::vector<Eigen::MatrixXd> covs;
  Eigen::MatrixXd pooled;
  Eigen::VectorXd priors;
};

inline Moments plain_moments(const covshift::Dataset& d) {
  const int c_count = d.num_classes();
  const auto dim = static_cast<Eigen::Index>(d.dim());
  Moments m{Eigen::MatrixXd::Zero(c_count, dim), {}, Eigen::MatrixXd::Zero(dim, dim), Eigen::VectorXd::Zero(c_count)};
  for (int c = 0; c < c_count; ++c) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d.labels()[i] == c) rows.push_back(static_cast<Eigen::Index>(i));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t k = 0; k < rows.size(); ++k) x.row(static_cast<Eigen::Index>(k)) = d.features().row(rows[k]);
    m.means.row(c) = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    m.covs.push_back(centered.transpose() * centered / static_cast<double>(rows.size()));
    m.pooled += centered.transpose() * centered / static_cast<double>(d.size());
    m.priors[c] = static_cast<double>(rows.size()) / static_cast<double>(d.size());
  }
  return m;
}

// Two far source clusters plus one point per class next to a tight target
// cloud; with sigma = 0.1 the far kernels underflow to exactly zero.
inline covshift::Draw starvation_draw() {
  covshift::Rng rng = covshift::make_rng({8});
  std::normal_distribution<double> jitter(0.0, 0.3), tight(0.0, 0.1);
  Eigen::MatrixXd x(22, 2);
  std::vector<int> y;
  for (int i = 0; i < 10; ++i) {
    x.row(i) << -3 + jitter(rng), jitter(rng);
    y.push_back(0);
  }
  for (int i = 10; i < 20; ++i) {
    x.row(i) << -3 + jitter(rng), 3 + jitter(rng);
    y.push_back(1);
  }
  x.row(20) << 4, 0;
  y.push_back(0);
  x.row(21) << 4, 1;
  y.push_back(1);
  Eigen::MatrixXd t(60, 2);
  for (int i = 0; i < 60; ++i) t.row(i) << 4 + tight(rng), 0.5 + tight(rng);
  Eigen::MatrixXd tx(4, 2);
  tx << 4, 0, 4, 1, 4.1, 0.1, 3.9, 0.9;
  return covshift::Draw{covshift::Dataset(x, y, 2), covshift::Dataset(tx, {0, 1, 0, 1}, 2), t};
}

}  // namespace testing

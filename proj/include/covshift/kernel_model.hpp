#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace covshift {

/// exp(−‖x−c‖²/(2σ²)) for every row x of `points` (n×d) against every row c
/// of `centers` (b×d); result is n×b.
Eigen::MatrixXd gaussian_kernel_matrix(const Eigen::MatrixXd& points,
                                       const Eigen::MatrixXd& centers, double sigma);

/// Median Euclidean distance over all pairs of rows of the stacked samples.
/// Uses an evenly strided subsample of at most `max_points` rows.
double median_pairwise_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                std::size_t max_points = 1000);

/// Gaussian-kernel expansion ŵ(x) = Σ α_ℓ exp(−‖x−c_ℓ‖²/(2σ²)).
struct KernelModel {
  Eigen::MatrixXd centers;  ///< b×d
  double sigma = 1.0;
  Eigen::VectorXd alpha;    ///< length b

  std::size_t num_centers() const noexcept { return static_cast<std::size_t>(centers.rows()); }
  double evaluate(std::span<const double> x) const;
  Eigen::VectorXd evaluate(const Eigen::MatrixXd& points) const;
};

/// `count` distinct rows of an n-row sample, uniformly without replacement,
/// returned in ascending order.
std::vector<std::size_t> choose_centers(std::size_t n, std::size_t count, std::uint64_t seed);

/// One row of a hyperparameter search.
struct CvEntry {
  double sigma = 0.0;
  double lambda = 0.0;
  double score = 0.0;
};

struct CvReport {
  std::vector<CvEntry> grid;
  std::size_t chosen = 0;

  const CvEntry& best() const { return grid.at(chosen); }
};

/// CSV with header `sigma,lambda,score,chosen`.
void write_cv_csv(const CvReport& report, std::ostream& out);
void write_cv_csv(const CvReport& report, const std::filesystem::path& path);

/// {1/8, 1/4, 1/2, 1, 2, 4} × median pairwise distance (falls back to 1 when
/// every point coincides).
std::vector<double> default_sigma_grid(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target);

/// {1e-3, 1e-2, 1e-1, 1, 10}.
std::vector<double> default_lambda_grid();

}  // namespace covshift

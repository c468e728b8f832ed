#include "covshift/kernel_model.hpp"

#include "covshift/dataset.hpp"
#include "covshift/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace covshift {

Eigen::MatrixXd gaussian_kernel_matrix(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centers,
                                       double sigma) {
  if (points.rows() > 0 && centers.rows() > 0 && points.cols() != centers.cols())
    throw std::invalid_argument("kernel matrix: dimension mismatch");
  if (!(sigma > 0.0)) throw std::invalid_argument("kernel width must be positive");
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd k(points.rows(), centers.rows());
  for (Eigen::Index c = 0; c < centers.rows(); ++c)
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      k(i, c) = std::exp(scale * (points.row(i) - centers.row(c)).squaredNorm());
  return k;
}

double median_pairwise_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::size_t max_points) {
  const auto total = static_cast<std::size_t>(a.rows() + b.rows());
  if (total < 2) return 0.0;
  const std::size_t m = std::min(total, std::max<std::size_t>(max_points, 2));
  auto row = [&](std::size_t i) -> Eigen::RowVectorXd {
    const auto r = static_cast<Eigen::Index>(i);
    return r < a.rows() ? a.row(r) : b.row(r - a.rows());
  };
  std::vector<Eigen::RowVectorXd> picked;
  picked.reserve(m);
  for (std::size_t i = 0; i < m; ++i) picked.push_back(row(i * total / m));

  std::vector<double> distances;
  distances.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) distances.push_back((picked[i] - picked[j]).norm());
  const auto mid = distances.begin() + static_cast<std::ptrdiff_t>(distances.size() / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  return *mid;
}

double KernelModel::evaluate(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(centers.cols()))
    throw std::invalid_argument("KernelModel::evaluate: dimension mismatch");
  const Eigen::Map<const Eigen::RowVectorXd> point(x.data(), static_cast<Eigen::Index>(x.size()));
  const double scale = -1.0 / (2.0 * sigma * sigma);
  double value = 0.0;
  for (Eigen::Index c = 0; c < centers.rows(); ++c)
    value += alpha[c] * std::exp(scale * (point - centers.row(c)).squaredNorm());
  return value;
}

Eigen::VectorXd KernelModel::evaluate(const Eigen::MatrixXd& points) const {
  return gaussian_kernel_matrix(points, centers, sigma) * alpha;
}

std::vector<std::size_t> choose_centers(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (count >= n) return rows;
  Rng rng = make_rng({seed, 0xCE27E5u});
  std::shuffle(rows.begin(), rows.end(), rng);
  rows.resize(count);
  std::sort(rows.begin(), rows.end());
  return rows;
}

void write_cv_csv(const CvReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  write_cv_csv(report, out);
}

void write_cv_csv(const CvReport& report, std::ostream& out) {
  out << "sigma,lambda,score,chosen\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    const auto& e = report.grid[i];
    out << fmt::format("{},{},{},{}\n", e.sigma, e.lambda, e.score, i == report.chosen ? 1 : 0);
  }
}

std::vector<double> default_sigma_grid(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target) {
  double median = median_pairwise_distance(source, target);
  if (!(median > 0.0)) median = 1.0;
  std::vector<double> grid;
  for (double f : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0}) grid.push_back(f * median);
  return grid;
}

std::vector<double> default_lambda_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 10.0}; }

}  // namespace covshift

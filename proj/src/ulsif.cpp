#include "covshift/ulsif.hpp"

#include "covshift/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace covshift {

namespace {

constexpr double kResidualTolerance = 1e-8;

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

struct Folds {
  std::vector<std::vector<std::size_t>> held_out;
  std::vector<std::vector<std::size_t>> kept;
};

Folds make_folds(std::size_t n, std::size_t folds, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  Folds out{std::vector<std::vector<std::size_t>>(folds), std::vector<std::vector<std::size_t>>(folds)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < folds; ++k) (i % folds == k ? out.held_out : out.kept)[k].push_back(order[i]);
  return out;
}

}  // namespace

UlsifSystem ulsif_system(const Eigen::MatrixXd& source_kernel, const Eigen::MatrixXd& target_kernel) {
  if (source_kernel.cols() != target_kernel.cols())
    throw std::invalid_argument("ulsif_system: kernel matrices have different numbers of centres");
  if (source_kernel.rows() == 0 || target_kernel.rows() == 0)
    throw std::invalid_argument("ulsif_system: empty sample");
  UlsifSystem system;
  system.H = source_kernel.transpose() * source_kernel / static_cast<double>(source_kernel.rows());
  system.h = target_kernel.colwise().mean().transpose();
  return system;
}

Outcome<UlsifSolution> ulsif_solve(const UlsifSystem& system, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("uLSIF regulariser must be nonnegative");
  const Eigen::Index b = system.h.size();
  if (std::isinf(lambda)) return UlsifSolution{Eigen::VectorXd::Zero(b), 0.0};

  const double h_norm = system.h.norm();
  if (!(h_norm > 0.0) || !std::isfinite(h_norm))
    return make_failure(FailureKind::LinearSolveFailed, "uLSIF: target kernel mass is zero");

  Eigen::MatrixXd m = system.H;
  m.diagonal().array() += lambda;
  const Eigen::LDLT<Eigen::MatrixXd> factor(m);
  if (factor.info() != Eigen::Success)
    return make_failure(FailureKind::LinearSolveFailed, "uLSIF: factorisation failed");
  Eigen::VectorXd alpha = factor.solve(system.h);
  if (!alpha.allFinite()) return make_failure(FailureKind::LinearSolveFailed, "uLSIF: non-finite solution");

  const double residual = (m * alpha - system.h).norm() / h_norm;
  if (!(residual <= kResidualTolerance))
    return make_failure(FailureKind::LinearSolveFailed,
                        fmt::format("uLSIF: relative residual {:.3g} exceeds {:g}", residual, kResidualTolerance));
  return UlsifSolution{std::move(alpha), residual};
}

Outcome<UlsifFit> ulsif_fit(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target, const UlsifOptions& options) {
  if (source.rows() < 2 || target.rows() < 2)
    throw std::invalid_argument("uLSIF needs at least two source and two target rows");
  if (source.cols() != target.cols())
    throw std::invalid_argument(fmt::format("source has dimension {}, target {}", source.cols(), target.cols()));

  const auto n_source = static_cast<std::size_t>(source.rows());
  const auto n_target = static_cast<std::size_t>(target.rows());
  const auto center_rows = choose_centers(n_target, std::min(options.max_centers, n_target), options.seed);
  const Eigen::MatrixXd centers = select_rows(target, center_rows);

  std::vector<double> sigmas = options.sigma_grid.empty() ? default_sigma_grid(source, target) : options.sigma_grid;
  std::vector<double> lambdas = options.lambda_grid.empty() ? default_lambda_grid() : options.lambda_grid;
  std::sort(sigmas.begin(), sigmas.end());
  std::sort(lambdas.begin(), lambdas.end());

  const std::size_t folds = std::clamp<std::size_t>(options.folds, 2, std::min(n_source, n_target));
  Rng rng = make_rng({options.seed, 0xF01D5u});
  const Folds source_folds = make_folds(n_source, folds, rng);
  const Folds target_folds = make_folds(n_target, folds, rng);

  CvReport cv;
  double best_score = std::numeric_limits<double>::infinity();
  bool any = false;
  for (double sigma : sigmas) {
    const Eigen::MatrixXd ks = gaussian_kernel_matrix(source, centers, sigma);
    const Eigen::MatrixXd kt = gaussian_kernel_matrix(target, centers, sigma);
    std::vector<UlsifSystem> fold_systems;
    for (std::size_t k = 0; k < folds; ++k)
      fold_systems.push_back(ulsif_system(select_rows(ks, source_folds.kept[k]), select_rows(kt, target_folds.kept[k])));

    for (double lambda : lambdas) {
      double score = 0.0;
      for (std::size_t k = 0; k < folds; ++k) {
        const auto solved = ulsif_solve(fold_systems[k], lambda);
        if (!solved) {
          score = std::numeric_limits<double>::infinity();
          break;
        }
        const Eigen::VectorXd ws = (select_rows(ks, source_folds.held_out[k]) * solved->alpha).cwiseMax(0.0);
        const Eigen::VectorXd wt = (select_rows(kt, target_folds.held_out[k]) * solved->alpha).cwiseMax(0.0);
        score += 0.5 * ws.squaredNorm() / static_cast<double>(ws.size()) - wt.mean();
      }
      if (std::isfinite(score)) score /= static_cast<double>(folds);
      if (std::isnan(score)) score = std::numeric_limits<double>::infinity();
      cv.grid.push_back({sigma, lambda, score});
      if (score < best_score) {
        best_score = score;
        cv.chosen = cv.grid.size() - 1;
        any = true;
      }
    }
  }
  if (!any) return make_failure(FailureKind::LinearSolveFailed, "uLSIF: every (sigma, lambda) candidate failed");

  const auto [sigma, lambda, score] = cv.best();
  const Eigen::MatrixXd ks = gaussian_kernel_matrix(source, centers, sigma);
  const auto solved = ulsif_solve(ulsif_system(ks, gaussian_kernel_matrix(target, centers, sigma)), lambda);
  if (!solved) return solved.failure();

  const Eigen::VectorXd clipped = (ks * solved->alpha).cwiseMax(0.0);
  const auto positive = static_cast<std::size_t>((clipped.array() > 0.0).count());
  WeightVector weights(clipped, Normalization::RawCounts);
  if (positive > 0) weights = normalize_mean_one(weights);

  UlsifFit fit{KernelModel{centers, sigma, solved->alpha}, std::move(cv), lambda, solved->relative_residual,
               std::move(weights), positive, positive < options.min_positive || positive == 0};
  return fit;
}

}  // namespace covshift

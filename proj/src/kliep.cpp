#include "covshift/kliep.hpp"

#include "covshift/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace covshift {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kConstraintTolerance = 1e-3;

double log_likelihood(const Eigen::MatrixXd& a, const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd fitted = a * alpha;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < fitted.size(); ++j) sum += std::log(fitted[j]);
  return sum;  // -inf when some fitted value is 0, NaN propagates
}

// Clip to the nonnegative orthant and rescale onto bᵀα = 1. Returns false if
// nothing positive survives.
bool restore_feasibility(Eigen::VectorXd& alpha, const Eigen::VectorXd& b) {
  alpha = alpha.cwiseMax(0.0);
  const double mass = b.dot(alpha);
  if (!(mass > 0.0) || !std::isfinite(mass)) return false;
  alpha /= mass;
  return true;
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

}  // namespace

Outcome<KliepSolution> kliep_optimize(const Eigen::MatrixXd& target_kernel, const Eigen::VectorXd& source_mean,
                                      const KliepOptions& options) {
  if (target_kernel.cols() != source_mean.size())
    throw std::invalid_argument("kliep_optimize: kernel/mean size mismatch");

  KliepSolution solution;
  Eigen::VectorXd alpha = Eigen::VectorXd::Ones(source_mean.size());
  if (!restore_feasibility(alpha, source_mean))
    return make_failure(FailureKind::ConstraintViolated, "KLIEP: source kernel mass is zero");

  double objective = log_likelihood(target_kernel, alpha);
  if (!std::isfinite(objective))
    return make_failure(FailureKind::NonFiniteObjective, "KLIEP: initial objective is not finite");
  solution.objective_trace.push_back(objective);

  Eigen::VectorXd gradient = target_kernel.transpose() * (target_kernel * alpha).cwiseInverse();
  double step = alpha.norm() / std::max(gradient.norm(), std::numeric_limits<double>::min());

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    bool accepted = false;
    Eigen::VectorXd candidate;
    double candidate_objective = objective;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, step *= 0.5) {
      candidate = alpha + step * gradient;
      if (!restore_feasibility(candidate, source_mean)) continue;
      candidate_objective = log_likelihood(target_kernel, candidate);
      if (!std::isfinite(candidate_objective)) continue;
      const double predicted = std::max(0.0, gradient.dot(candidate - alpha));
      if (candidate_objective >= objective + kArmijo * predicted) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent direction survives the projection: stationary point.
      solution.converged = true;
      break;
    }

    const double change = std::abs(candidate_objective - objective) / std::max(1.0, std::abs(objective));
    alpha = std::move(candidate);
    objective = candidate_objective;
    solution.objective_trace.push_back(objective);
    solution.iterations = it + 1;
    gradient = target_kernel.transpose() * (target_kernel * alpha).cwiseInverse();
    step *= 2.0;
    if (change < options.tolerance) {
      solution.converged = true;
      break;
    }
  }

  if (!std::isfinite(objective) || !alpha.allFinite())
    return make_failure(FailureKind::NonFiniteObjective, "KLIEP: optimiser diverged");
  const double residual = std::abs(source_mean.dot(alpha) - 1.0);
  if (residual > kConstraintTolerance)
    return make_failure(FailureKind::ConstraintViolated,
                        fmt::format("KLIEP: normalisation residual {:.3g} after optimisation", residual));
  solution.alpha = std::move(alpha);
  return solution;
}

Outcome<KliepFit> kliep_fit(const Eigen::MatrixXd& source, const Eigen::MatrixXd& target,
                            const KliepOptions& options) {
  if (source.rows() < 2 || target.rows() < 2)
    throw std::invalid_argument("KLIEP needs at least two source and two target rows");
  if (source.cols() != target.cols())
    throw std::invalid_argument(fmt::format("source has dimension {}, target {}", source.cols(), target.cols()));

  const auto n_target = static_cast<std::size_t>(target.rows());
  const auto center_rows = choose_centers(n_target, std::min(options.max_centers, n_target), options.seed);
  const Eigen::MatrixXd centers = select_rows(target, center_rows);

  std::vector<double> sigmas = options.sigma_grid.empty() ? default_sigma_grid(source, target) : options.sigma_grid;
  std::sort(sigmas.begin(), sigmas.end());

  const std::size_t folds = std::clamp<std::size_t>(options.folds, 2, n_target);
  std::vector<std::size_t> order(n_target);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = make_rng({options.seed, 0xF01D5u});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> held_out(folds), kept(folds);
  for (std::size_t i = 0; i < n_target; ++i)
    for (std::size_t k = 0; k < folds; ++k) (i % folds == k ? held_out : kept)[k].push_back(order[i]);

  CvReport cv;
  double best_score = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (double sigma : sigmas) {
    const Eigen::VectorXd source_mean = gaussian_kernel_matrix(source, centers, sigma).colwise().mean().transpose();
    const Eigen::MatrixXd target_kernel = gaussian_kernel_matrix(target, centers, sigma);
    double score = 0.0;
    for (std::size_t k = 0; k < folds && std::isfinite(score); ++k) {
      const auto fit = kliep_optimize(select_rows(target_kernel, kept[k]), source_mean, options);
      if (!fit) {
        score = -std::numeric_limits<double>::infinity();
        break;
      }
      const Eigen::VectorXd held = select_rows(target_kernel, held_out[k]) * fit->alpha;
      double fold_score = 0.0;
      for (Eigen::Index j = 0; j < held.size(); ++j) fold_score += std::log(held[j]);
      score += fold_score / static_cast<double>(held.size());
    }
    if (std::isfinite(score)) score /= static_cast<double>(folds);
    if (std::isnan(score)) score = -std::numeric_limits<double>::infinity();
    cv.grid.push_back({sigma, 0.0, score});
    if (score > best_score) {
      best_score = score;
      cv.chosen = cv.grid.size() - 1;
      any = true;
    }
  }
  if (!any)
    return make_failure(FailureKind::NonFiniteObjective,
                        "KLIEP: no kernel width gives a finite held-out likelihood");

  const double sigma = cv.best().sigma;
  const Eigen::MatrixXd source_kernel = gaussian_kernel_matrix(source, centers, sigma);
  const Eigen::VectorXd source_mean = source_kernel.colwise().mean().transpose();
  auto solved = kliep_optimize(gaussian_kernel_matrix(target, centers, sigma), source_mean, options);
  if (!solved) return solved.failure();

  Eigen::VectorXd w = source_kernel * solved->alpha;
  KernelModel model{centers, sigma, solved->alpha};
  return KliepFit{std::move(model), std::move(cv), std::move(solved).value(),
                  WeightVector(std::move(w), Normalization::MeanOne)};
}

}  // namespace covshift

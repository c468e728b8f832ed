#include "covshift/pca.hpp"

#include <fmt/format.h>

#include <numeric>

namespace covshift {

PcaModel fit_pca(const Dataset& data, double retained_fraction) {
  if (data.size() < 2) throw std::invalid_argument("fit_pca needs at least two rows");
  if (!(retained_fraction > 0.0 && retained_fraction <= 1.0))
    throw std::invalid_argument(fmt::format("retained fraction {} outside (0, 1]", retained_fraction));

  const auto& x = data.features();
  const Eigen::Index d = x.cols();
  PcaModel model;
  model.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DataError("covariance eigendecomposition failed");

  // Eigen returns ascending order.
  Eigen::VectorXd values = solver.eigenvalues().reverse();
  Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index i = 0; i < d; ++i)
    if (values[i] < 0.0) values[i] = 0.0;

  const double total = values.sum();
  if (!(total > 0.0)) throw DataError(fmt::format("dataset '{}' has zero total variance", data.name()));

  Eigen::Index k = 0;
  double cumulative = 0.0;
  // Relative slack of a few ulps: with a fraction of 1, rounding-level
  // eigenvalues are not retained.
  const double target = retained_fraction * total * (1.0 - 8 * std::numeric_limits<double>::epsilon());
  while (k < d && cumulative < target) cumulative += values[k++];
  if (k == 0) k = 1;

  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }

  model.components = vectors.leftCols(k);
  model.eigenvalues = values.head(k);
  model.all_eigenvalues = values;
  model.retained_fraction = retained_fraction;
  return model;
}

Dataset project(const PcaModel& model, const Dataset& data) {
  if (data.dim() != model.input_dim())
    throw std::invalid_argument(fmt::format("project: data has {} columns, model expects {}",
                                            data.dim(), model.input_dim()));
  Eigen::MatrixXd projected = (data.features().rowwise() - model.mean.transpose()) * model.components;
  Dataset out = data.with_features(std::move(projected));
  std::vector<std::string> names;
  for (std::size_t j = 0; j < model.output_dim(); ++j) names.push_back(fmt::format("pc{}", j + 1));
  out.set_column_names(std::move(names));
  return out;
}

Eigen::MatrixXd reconstruct(const PcaModel& model, const Eigen::MatrixXd& projected) {
  return (projected * model.components.transpose()).rowwise() + model.mean.transpose();
}

}  // namespace covshift

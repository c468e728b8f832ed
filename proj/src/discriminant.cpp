#include "covshift/discriminant.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace covshift {

namespace {

// A Cholesky pivot this small relative to the largest variance means the
// covariance is singular up to rounding.
constexpr double kRelativePivotFloor = 1e-12;

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

const char* to_string(DiscriminantKind kind) noexcept { return kind == DiscriminantKind::LDA ? "lda" : "qda"; }

DiscriminantKind parse_discriminant_kind(const std::string& text) {
  if (text == "lda" || text == "LDA") return DiscriminantKind::LDA;
  if (text == "qda" || text == "QDA") return DiscriminantKind::QDA;
  throw std::invalid_argument("unknown classifier '" + text + "' (expected lda or qda)");
}

const Eigen::MatrixXd& FittedDiscriminant::covariance_of(int cls) const {
  return covariances_.at(kind_ == DiscriminantKind::LDA ? 0 : static_cast<std::size_t>(cls));
}

double FittedDiscriminant::log_det_of(int cls) const {
  return log_dets_.at(kind_ == DiscriminantKind::LDA ? 0 : static_cast<std::size_t>(cls));
}

Eigen::VectorXd FittedDiscriminant::scores(std::span<const double> x) const {
  const Eigen::Map<const Eigen::VectorXd> point(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd out(num_classes());
  for (int c = 0; c < num_classes(); ++c) {
    const std::size_t k = kind_ == DiscriminantKind::LDA ? 0 : static_cast<std::size_t>(c);
    const Eigen::VectorXd diff = point - means_.row(c).transpose();
    const Eigen::VectorXd z = factors_[k].matrixL().solve(diff);
    out[c] = std::log(priors_[c]) - 0.5 * log_dets_[k] - 0.5 * z.squaredNorm();
  }
  return out;
}

nlohmann::json FittedDiscriminant::to_json() const {
  nlohmann::json doc;
  doc["kind"] = to_string(kind_);
  doc["priors"] = std::vector<double>(priors_.data(), priors_.data() + priors_.size());
  doc["means"] = matrix_to_json(means_);
  auto covs = nlohmann::json::array();
  for (const auto& cov : covariances_) covs.push_back(matrix_to_json(cov));
  doc["covariances"] = std::move(covs);
  return doc;
}

Outcome<FittedDiscriminant> fit_weighted(DiscriminantKind kind, const Dataset& train, const WeightVector& weights) {
  if (!train.labeled()) throw std::invalid_argument("fit_weighted needs labeled training data");
  if (weights.size() != train.size())
    throw std::invalid_argument(fmt::format("{} weights for {} training rows", weights.size(), train.size()));

  const auto& x = train.features();
  const auto& y = train.labels();
  const int classes = train.num_classes();
  const Eigen::Index d = x.cols();
  const Eigen::VectorXd& w = weights.values();

  Eigen::VectorXd class_weight = Eigen::VectorXd::Zero(classes);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(classes, d);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    class_weight[y[static_cast<std::size_t>(i)]] += w[i];
    means.row(y[static_cast<std::size_t>(i)]) += w[i] * x.row(i);
  }
  for (int c = 0; c < classes; ++c) {
    if (!(class_weight[c] > 0.0))
      return make_failure(FailureKind::EmptyClassWeight, fmt::format("class {} has zero total weight", c));
    means.row(c) /= class_weight[c];
  }
  const double total = class_weight.sum();

  std::vector<Eigen::MatrixXd> scatter(static_cast<std::size_t>(classes), Eigen::MatrixXd::Zero(d, d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = y[static_cast<std::size_t>(i)];
    const Eigen::RowVectorXd diff = x.row(i) - means.row(c);
    scatter[static_cast<std::size_t>(c)].noalias() += w[i] * diff.transpose() * diff;
  }

  FittedDiscriminant model;
  model.kind_ = kind;
  model.priors_ = class_weight / total;
  model.means_ = std::move(means);
  if (kind == DiscriminantKind::LDA) {
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
    for (const auto& s : scatter) pooled += s;
    model.covariances_.push_back(pooled / total);
  } else {
    for (int c = 0; c < classes; ++c)
      model.covariances_.push_back(scatter[static_cast<std::size_t>(c)] / class_weight[c]);
  }

  for (std::size_t k = 0; k < model.covariances_.size(); ++k) {
    auto& cov = model.covariances_[k];
    cov = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Eigen::MatrixXd> factor(cov);
    const double scale = cov.diagonal().maxCoeff();
    bool positive_definite = factor.info() == Eigen::Success && scale > 0.0 && std::isfinite(scale);
    if (positive_definite) {
      const Eigen::VectorXd pivots = factor.matrixLLT().diagonal();
      positive_definite = pivots.array().square().minCoeff() > kRelativePivotFloor * scale;
    }
    if (!positive_definite) {
      const std::string which = kind == DiscriminantKind::LDA ? "pooled covariance" : fmt::format("covariance of class {}", k);
      return make_failure(FailureKind::SingularCovariance, which + " is not positive definite");
    }
    model.log_dets_.push_back(2.0 * factor.matrixLLT().diagonal().array().log().sum());
    model.factors_.push_back(std::move(factor));
  }
  return model;
}

int predict(const FittedDiscriminant& model, std::span<const double> x) {
  if (x.size() != model.dim())
    throw std::invalid_argument(fmt::format("input has dimension {}, model {}", x.size(), model.dim()));
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("predict: non-finite input");
  const Eigen::VectorXd s = model.scores(x);
  int best = 0;
  for (int c = 1; c < s.size(); ++c)
    if (s[c] > s[best]) best = c;
  return best;
}

double error_rate(const FittedDiscriminant& model, const Dataset& test) {
  if (!test.labeled()) throw std::invalid_argument("error_rate needs a labeled test set");
  if (test.size() == 0) throw std::invalid_argument("error_rate on an empty test set");
  const auto& x = test.features();
  std::size_t wrong = 0;
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[static_cast<std::size_t>(c)] = x(r, c);
    if (predict(model, row) != test.labels()[static_cast<std::size_t>(r)]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(x.rows());
}

}  // namespace covshift

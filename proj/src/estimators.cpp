#include "covshift/estimators.hpp"

#include "covshift/nnew.hpp"

#include <fmt/format.h>

#include <array>

namespace covshift {

const char* to_string(FailureKind kind) noexcept {
  switch (kind) {
    case FailureKind::SingularCovariance: return "singular-covariance";
    case FailureKind::EmptyClassWeight: return "empty-class-weight";
    case FailureKind::NonFiniteObjective: return "non-finite-objective";
    case FailureKind::ConstraintViolated: return "constraint-violated";
    case FailureKind::LinearSolveFailed: return "linear-solve-failed";
    case FailureKind::WeightStarvation: return "weight-starvation";
    case FailureKind::InvalidSplit: return "invalid-split";
  }
  return "unknown";
}

namespace {

struct Entry {
  EstimatorKind kind;
  const char* name;
  const char* display;
};

constexpr std::array<Entry, 6> kEstimators{{
    {EstimatorKind::NNeW, "nnew", "NNeW"},
    {EstimatorKind::NNeWPlusOne, "nnew1", "NNeW+1"},
    {EstimatorKind::Kliep, "kliep", "KLIEP"},
    {EstimatorKind::Ulsif, "ulsif", "uLSIF"},
    {EstimatorKind::Parzen, "parzen", "Parzen"},
    {EstimatorKind::Uniform, "uniform", "uniform"},
}};

const Entry& entry(EstimatorKind kind) {
  for (const auto& e : kEstimators)
    if (e.kind == kind) return e;
  return kEstimators.back();
}

Outcome<WeightVector> starvation(std::size_t positive, std::size_t total) {
  return make_failure(FailureKind::WeightStarvation,
                      fmt::format("{} of {} source weights are zero ({} positive)", total - positive, total, positive));
}

}  // namespace

const char* to_string(EstimatorKind kind) noexcept { return entry(kind).name; }
const char* display_name(EstimatorKind kind) noexcept { return entry(kind).display; }

std::optional<EstimatorKind> parse_estimator(std::string_view name) {
  for (const auto& e : kEstimators)
    if (name == e.name) return e.kind;
  return std::nullopt;
}

const std::vector<std::string>& estimator_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : kEstimators) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

Outcome<WeightVector> estimate_weights(EstimatorKind kind, const Eigen::MatrixXd& source,
                                       const Eigen::MatrixXd& target, const EstimatorSettings& settings) {
  if (source.rows() < 1) throw std::invalid_argument("empty source sample");
  if (target.rows() > 0 && target.cols() != source.cols())
    throw std::invalid_argument(fmt::format("source has dimension {}, target {}", source.cols(), target.cols()));
  const auto n = static_cast<std::size_t>(source.rows());

  switch (kind) {
    case EstimatorKind::Uniform:
      return WeightVector::uniform(n);
    case EstimatorKind::NNeW:
    case EstimatorKind::NNeWPlusOne: {
      const auto index = NeighborIndex::build(source, settings.acceleration);
      const WeightVector raw =
          kind == EstimatorKind::NNeW ? nnew_weights(index, target) : nnew_plus_one(index, target);
      if (raw.sum() <= 0.0) return starvation(0, n);
      return normalize_mean_one(raw);
    }
    case EstimatorKind::Parzen:
      return parzen_ratio(source, target, settings.parzen_bandwidth);
    case EstimatorKind::Kliep: {
      KliepOptions options;
      options.seed = settings.seed;
      options.sigma_grid = settings.sigma_grid;
      auto fit = kliep_fit(source, target, options);
      if (!fit) return fit.failure();
      return fit->weights;
    }
    case EstimatorKind::Ulsif: {
      UlsifOptions options;
      options.seed = settings.seed;
      options.sigma_grid = settings.sigma_grid;
      options.lambda_grid = settings.lambda_grid;
      options.min_positive = settings.min_positive;
      auto fit = ulsif_fit(source, target, options);
      if (!fit) return fit.failure();
      if (fit->starved) return starvation(fit->positive_count, n);
      return fit->weights;
    }
  }
  throw std::logic_error("unhandled estimator");
}

}  // namespace covshift

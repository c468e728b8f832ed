#pragma once

#include "covshift/dataset.hpp"
#include "covshift/discriminant.hpp"
#include "covshift/estimators.hpp"
#include "covshift/sampling.hpp"
#include "covshift/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace covshift {

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
};

/// Benchmark protocol settings. Defaults:
/// 100 repetitions, PCA retaining 0.999 of the variance, and a factor-5
/// thinning of quadrants I and III.
struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<EstimatorKind> estimators{EstimatorKind::Kliep, EstimatorKind::Ulsif,
                                        EstimatorKind::Parzen, EstimatorKind::NNeW,
                                        EstimatorKind::NNeWPlusOne};
  std::vector<DiscriminantKind> classifiers{DiscriminantKind::LDA, DiscriminantKind::QDA};
  std::vector<TrainMode> train_modes{TrainMode::Minimal, TrainMode::Half};
  std::size_t repetitions = 100;
  double retained_fraction = 0.999;
  double reduction_factor = 5.0;
  std::uint64_t seed = 0;
  bool standardize = false;
  std::string label_column = "class";
  EstimatorSettings estimator_settings{};
};

/// Reads `key = value` lines (`#` starts a comment). Keys: dataset (repeatable,
/// `NAME PATH`), estimators, classifiers, train_modes (comma lists),
/// repetitions, seed, retained_fraction, reduction_factor, standardize,
/// label_column. Relative dataset paths resolve against `base_dir`.
/// Throws std::invalid_argument naming the offending line.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Mean over successful repetitions with the standard error of that mean.
struct CellResult {
  double mean_error = 0.0;
  double stderr_of_mean = 0.0;
  std::size_t n_successes = 0;
  std::size_t n_failures = 0;

  bool dash() const noexcept { return n_successes == 0; }
  /// stderr = sample std (n−1 divisor) / √n; zero for a single success.
  static CellResult aggregate(std::span<const double> errors, std::size_t failures);
};

enum class CellFlag { Best, Tied, Plain, Dash };

const char* to_string(CellFlag flag) noexcept;
CellFlag parse_cell_flag(const std::string& text);

/// Lowest mean is `best` (first on ties); others within
/// z·(stderr_best + stderr_cell) of it are `tied`; cells without successes
/// are `dash`.
std::vector<CellFlag> mark_significance(std::span<const CellResult> row, double z = 2.0);

struct CellRecord {
  std::string dataset;
  std::string train_mode;
  DiscriminantKind classifier = DiscriminantKind::LDA;
  EstimatorKind estimator = EstimatorKind::Uniform;
  CellResult result;
  CellFlag flag = CellFlag::Plain;
  std::vector<double> errors;  ///< per successful repetition, in repetition order
  /// Failed repetitions by cause (estimator, classifier or split failure kind).
  std::map<std::string, std::size_t> failure_kinds;
};

/// Cells ordered dataset → train mode → classifier → estimator (config order).
struct ExperimentReport {
  std::vector<CellRecord> cells;
  std::vector<std::string> diagnostics;
  std::vector<std::string> dataset_names;
};

/// Fills in CellRecord::flag row by row (dataset × mode × classifier).
void assign_flags(ExperimentReport& report, double z = 2.0);

/// Per dataset: load → (standardize) → PCA → target = projected data. Per
/// repetition: fresh biased source, split per train mode, weights from the
/// training features against target rows not in the test set, weighted fit,
/// error on the test set. Unloadable datasets are skipped with a diagnostic.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// One repetition's data: labeled train and test sets plus the unlabeled
/// target sample the estimators see.
struct Draw {
  Dataset train;
  Dataset test;
  Eigen::MatrixXd weight_target;
};

/// The estimator → weighted fit → test error loop over fixed draws, one
/// repetition per draw; cells are reported under `dataset` / `train_mode`.
ExperimentReport evaluate_draws(const std::string& dataset, const std::string& train_mode,
                                std::span<const Draw> draws, const std::vector<EstimatorKind>& estimators,
                                const std::vector<DiscriminantKind>& classifiers,
                                const EstimatorSettings& settings, std::uint64_t seed);

/// Binary labels from a fixed rule P(y=1|x) = logistic(sharpness·(x₀ − curvature·x₁²
/// − offset)) (x₁ term only when d ≥ 2), so P(y|x) is shared by source and target.
struct LabelRule {
  double offset = 0.0;
  double curvature = 0.0;
  double sharpness = 4.0;

  double probability(std::span<const double> x) const;
};

struct SyntheticExperimentConfig {
  std::string name = "synthetic";
  SyntheticShift shift = SyntheticShift::parse("none:2");
  LabelRule rule{};
  std::size_t n_train = 200;
  std::size_t n_target = 400;  ///< unlabeled target sample seen by the estimators
  std::size_t n_test = 1000;
  std::vector<EstimatorKind> estimators{EstimatorKind::Uniform, EstimatorKind::NNeWPlusOne};
  std::vector<DiscriminantKind> classifiers{DiscriminantKind::LDA};
  std::size_t repetitions = 100;
  std::uint64_t seed = 0;
  EstimatorSettings estimator_settings{};
};

/// Same repetition loop as run_experiment with data drawn from known
/// densities; reported with train mode "synthetic".
ExperimentReport run_synthetic_experiment(const SyntheticExperimentConfig& config);

}  // namespace covshift

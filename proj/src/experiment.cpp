#include "covshift/experiment.hpp"

#include "covshift/pca.hpp"
#include "covshift/random.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace covshift {

namespace {

enum Stream : std::uint64_t { kBiasStream = 1, kSplitStream = 2, kEstimatorStream = 3, kSyntheticStream = 4 };
constexpr int kMaxBiasAttempts = 100;

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) { return make_rng(keys)(); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

template <class T>
T parse_integer(const std::string& text, const std::string& key) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument(fmt::format("'{}' is not a valid integer for {}", text, key));
  return value;
}

double parse_real(const std::string& text, const std::string& key) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw std::invalid_argument(fmt::format("'{}' is not a valid number for {}", text, key));
  return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument(fmt::format("'{}' is not a boolean for {}", text, key));
}

// Accumulator for one (train mode, classifier, estimator) cell.
struct Tally {
  std::vector<double> errors;
  std::size_t failures = 0;
  std::map<std::string, std::size_t> kinds;

  void fail(FailureKind kind) {
    ++failures;
    ++kinds[to_string(kind)];
  }
};

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(fmt::format("config line {}: expected key = value", line_number));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "dataset") {
        std::istringstream parts(value);
        DatasetSpec spec;
        std::string path;
        parts >> spec.name;
        std::getline(parts, path);
        path = trim(path);
        if (spec.name.empty() || path.empty()) throw std::invalid_argument("dataset needs NAME PATH");
        spec.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base_dir / path;
        config.datasets.push_back(std::move(spec));
      } else if (key == "estimators") {
        config.estimators.clear();
        for (const auto& name : split_list(value)) {
          const auto kind = parse_estimator(name);
          if (!kind) throw std::invalid_argument("unknown estimator '" + name + "'");
          config.estimators.push_back(*kind);
        }
      } else if (key == "classifiers") {
        config.classifiers.clear();
        for (const auto& name : split_list(value)) config.classifiers.push_back(parse_discriminant_kind(name));
      } else if (key == "train_modes") {
        config.train_modes.clear();
        for (const auto& name : split_list(value)) config.train_modes.push_back(parse_train_mode(name));
      } else if (key == "repetitions") {
        config.repetitions = parse_integer<std::size_t>(value, key);
      } else if (key == "seed") {
        config.seed = parse_integer<std::uint64_t>(value, key);
      } else if (key == "retained_fraction") {
        config.retained_fraction = parse_real(value, key);
      } else if (key == "reduction_factor") {
        config.reduction_factor = parse_real(value, key);
      } else if (key == "standardize") {
        config.standardize = parse_bool(value, key);
      } else if (key == "label_column") {
        config.label_column = value;
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("config line {}: {}", line_number, e.what()));
    }
  }
  if (config.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(fmt::format("cannot open config '{}'", path.string()));
  return parse_config(in, path.parent_path());
}

CellResult CellResult::aggregate(std::span<const double> errors, std::size_t failures) {
  CellResult cell;
  cell.n_successes = errors.size();
  cell.n_failures = failures;
  if (errors.empty()) return cell;
  const double n = static_cast<double>(errors.size());
  double sum = 0.0;
  for (double e : errors) sum += e;
  cell.mean_error = sum / n;
  if (errors.size() > 1) {
    double sq = 0.0;
    for (double e : errors) sq += (e - cell.mean_error) * (e - cell.mean_error);
    cell.stderr_of_mean = std::sqrt(sq / (n - 1.0)) / std::sqrt(n);
  }
  return cell;
}

const char* to_string(CellFlag flag) noexcept {
  switch (flag) {
    case CellFlag::Best: return "best";
    case CellFlag::Tied: return "tied";
    case CellFlag::Plain: return "plain";
    case CellFlag::Dash: return "dash";
  }
  return "plain";
}

CellFlag parse_cell_flag(const std::string& text) {
  if (text == "best") return CellFlag::Best;
  if (text == "tied") return CellFlag::Tied;
  if (text == "plain") return CellFlag::Plain;
  if (text == "dash") return CellFlag::Dash;
  throw std::invalid_argument("unknown flag '" + text + "'");
}

std::vector<CellFlag> mark_significance(std::span<const CellResult> row, double z) {
  if (row.empty()) throw std::invalid_argument("mark_significance: empty row");
  std::vector<CellFlag> flags(row.size(), CellFlag::Plain);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i].dash()) {
      flags[i] = CellFlag::Dash;
      continue;
    }
    if (!best || row[i].mean_error < row[*best].mean_error) best = i;
  }
  if (!best) return flags;
  flags[*best] = CellFlag::Best;
  const CellResult& b = row[*best];
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i == *best || flags[i] == CellFlag::Dash) continue;
    if (row[i].mean_error <= b.mean_error + z * (b.stderr_of_mean + row[i].stderr_of_mean)) flags[i] = CellFlag::Tied;
  }
  return flags;
}

void assign_flags(ExperimentReport& report, double z) {
  std::map<std::tuple<std::string, std::string, int>, std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const auto& c = report.cells[i];
    rows[{c.dataset, c.train_mode, static_cast<int>(c.classifier)}].push_back(i);
  }
  for (const auto& [key, members] : rows) {
    std::vector<CellResult> results;
    for (std::size_t i : members) results.push_back(report.cells[i].result);
    const auto flags = mark_significance(results, z);
    for (std::size_t k = 0; k < members.size(); ++k) report.cells[members[k]].flag = flags[k];
  }
}

namespace {

void emit_cells(ExperimentReport& report, const std::string& dataset, const std::vector<std::string>& modes,
                const std::vector<DiscriminantKind>& classifiers, const std::vector<EstimatorKind>& estimators,
                const std::vector<Tally>& tallies) {
  // tallies are indexed [mode][estimator][classifier]
  for (std::size_t m = 0; m < modes.size(); ++m)
    for (std::size_t c = 0; c < classifiers.size(); ++c)
      for (std::size_t e = 0; e < estimators.size(); ++e) {
        const Tally& t = tallies[(m * estimators.size() + e) * classifiers.size() + c];
        CellRecord cell;
        cell.dataset = dataset;
        cell.train_mode = modes[m];
        cell.classifier = classifiers[c];
        cell.estimator = estimators[e];
        cell.result = CellResult::aggregate(t.errors, t.failures);
        cell.errors = t.errors;
        cell.failure_kinds = t.kinds;
        report.cells.push_back(std::move(cell));
      }
}

// Runs every estimator and classifier on one train/test draw.
void evaluate_draw(const Dataset& train, const Dataset& test, const Eigen::MatrixXd& weight_target,
                   const std::vector<EstimatorKind>& estimators, const std::vector<DiscriminantKind>& classifiers,
                   EstimatorSettings settings, const std::array<std::uint64_t, 4>& keys,
                   std::vector<Tally>& tallies, std::size_t tally_offset) {
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    settings.seed = derive_seed({keys[0], keys[1], keys[2], keys[3], e, kEstimatorStream});
    Outcome<WeightVector> weights = [&]() -> Outcome<WeightVector> {
      try {
        return estimate_weights(estimators[e], train.features(), weight_target, settings);
      } catch (const std::invalid_argument& ex) {
        return make_failure(FailureKind::InvalidSplit, ex.what());
      }
    }();
    for (std::size_t c = 0; c < classifiers.size(); ++c) {
      Tally& t = tallies[tally_offset + e * classifiers.size() + c];
      if (!weights) {
        t.fail(weights.failure().kind);
        continue;
      }
      const auto model = fit_weighted(classifiers[c], train, weights.value());
      if (!model) {
        t.fail(model.failure().kind);
        continue;
      }
      t.errors.push_back(error_rate(model.value(), test));
    }
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  ExperimentReport report;
  std::vector<std::string> mode_names;
  for (TrainMode m : config.train_modes) mode_names.emplace_back(to_string(m));
  const std::size_t per_mode = config.estimators.size() * config.classifiers.size();

  for (std::size_t di = 0; di < config.datasets.size(); ++di) {
    const DatasetSpec& spec = config.datasets[di];
    std::optional<Dataset> target;
    try {
      Dataset raw = load_csv(spec.path, config.label_column);
      raw.set_name(spec.name);
      if (config.standardize) raw = standardize(raw);
      target = project(fit_pca(raw, config.retained_fraction), raw);
      if (target->dim() < 2) throw DataError("fewer than two principal components retained");
    } catch (const std::exception& e) {
      report.diagnostics.push_back(fmt::format("{}: skipped ({})", spec.name, e.what()));
      continue;
    }
    report.dataset_names.push_back(spec.name);

    std::vector<Tally> tallies(mode_names.size() * per_mode);
    std::vector<std::size_t> split_failures(mode_names.size(), 0);
    std::size_t redraws = 0;

    for (std::size_t r = 0; r < config.repetitions; ++r) {
      std::optional<Dataset> source;
      for (int attempt = 0; attempt < kMaxBiasAttempts && !source; ++attempt) {
        try {
          source = bias_sample(*target, config.reduction_factor,
                               derive_seed({config.seed, di, r, static_cast<std::uint64_t>(attempt), kBiasStream}));
        } catch (const EmptyClassError&) {
          ++redraws;
        }
      }
      for (std::size_t m = 0; m < config.train_modes.size(); ++m) {
        std::optional<Split> split;
        if (source) {
          try {
            split = make_splits(*source, *target,
                                SplitSpec{derive_seed({config.seed, di, kSplitStream}), config.train_modes[m], r});
          } catch (const SplitError&) {
          }
        }
        if (!split) {
          ++split_failures[m];
          for (std::size_t k = 0; k < per_mode; ++k) tallies[m * per_mode + k].fail(FailureKind::InvalidSplit);
          continue;
        }
        // Estimators see every target row except the test rows.
        std::vector<std::size_t> visible;
        for (std::size_t i = 0, t = 0; i < target->size(); ++i) {
          while (t < split->test_rows.size() && split->test_rows[t] < i) ++t;
          if (t < split->test_rows.size() && split->test_rows[t] == i) continue;
          visible.push_back(i);
        }
        const Eigen::MatrixXd weight_target = target->subset(visible).features();
        evaluate_draw(split->train, split->test, weight_target, config.estimators, config.classifiers,
                      config.estimator_settings, {config.seed, di, r, m}, tallies, m * per_mode);
      }
    }

    for (std::size_t m = 0; m < mode_names.size(); ++m)
      if (split_failures[m])
        report.diagnostics.push_back(fmt::format("{}/{}: {} of {} repetitions could not be split", spec.name,
                                                 mode_names[m], split_failures[m], config.repetitions));
    if (redraws)
      report.diagnostics.push_back(fmt::format("{}: {} biased draws emptied a class and were redrawn", spec.name, redraws));
    emit_cells(report, spec.name, mode_names, config.classifiers, config.estimators, tallies);
  }
  assign_flags(report);
  return report;
}

double LabelRule::probability(std::span<const double> x) const {
  double margin = x[0] - offset;
  if (x.size() >= 2) margin -= curvature * x[1] * x[1];
  return 1.0 / (1.0 + std::exp(-sharpness * margin));
}

ExperimentReport run_synthetic_experiment(const SyntheticExperimentConfig& config) {
  if (config.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (config.n_train < 2 || config.n_target < 2 || config.n_test < 1)
    throw std::invalid_argument("synthetic experiment sample sizes too small");

  auto labeled = [&](Eigen::MatrixXd x, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<int> y(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const Eigen::RowVectorXd row = x.row(r);
      y[static_cast<std::size_t>(r)] = unit(rng) < config.rule.probability({row.data(), static_cast<std::size_t>(row.size())}) ? 1 : 0;
    }
    return Dataset(std::move(x), std::move(y), 2, config.name);
  };

  std::vector<Draw> draws;
  for (std::size_t r = 0; r < config.repetitions; ++r) {
    Rng rng = make_rng({config.seed, r, kSyntheticStream});
    Dataset train = labeled(config.shift.source.sample(config.n_train, rng), rng);
    Eigen::MatrixXd weight_target = config.shift.target.sample(config.n_target, rng);
    Dataset test = labeled(config.shift.target.sample(config.n_test, rng), rng);
    draws.push_back(Draw{std::move(train), std::move(test), std::move(weight_target)});
  }
  return evaluate_draws(config.name, "synthetic", draws, config.estimators, config.classifiers,
                        config.estimator_settings, derive_seed({config.seed, kSyntheticStream}));
}

ExperimentReport evaluate_draws(const std::string& dataset, const std::string& train_mode,
                                std::span<const Draw> draws, const std::vector<EstimatorKind>& estimators,
                                const std::vector<DiscriminantKind>& classifiers,
                                const EstimatorSettings& settings, std::uint64_t seed) {
  std::vector<Tally> tallies(estimators.size() * classifiers.size());
  for (std::size_t r = 0; r < draws.size(); ++r)
    evaluate_draw(draws[r].train, draws[r].test, draws[r].weight_target, estimators, classifiers, settings,
                  {seed, r, 0, 0}, tallies, 0);
  ExperimentReport report;
  report.dataset_names.push_back(dataset);
  emit_cells(report, dataset, {train_mode}, classifiers, estimators, tallies);
  assign_flags(report);
  return report;
}

}  // namespace covshift

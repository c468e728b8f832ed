#include "cli.hpp"

#include "covshift/experiment.hpp"
#include "covshift/kliep.hpp"
#include "covshift/nnew.hpp"
#include "covshift/pca.hpp"
#include "covshift/report.hpp"
#include "covshift/synthetic.hpp"
#include "covshift/ulsif.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace covshift::cli {

namespace {

const std::vector<std::string> kFormats{"table", "csv", "json"};
const std::vector<std::string> kClassifiers{"lda", "qda"};
const std::vector<std::string> kTrainModes{"half", "minimal"};

struct WeightsArgs {
  std::string source;
  std::string target;
  std::string estimator = "nnew1";
  std::string out;
  std::string cv_out;
  std::string label_column = "class";
  std::string format = "csv";
  std::uint64_t seed = 0;
  long min_positive = -1;
  bool brute_force = false;
  bool mean_one = false;
  std::vector<double> sigmas;
  std::vector<double> lambdas;
};

struct BenchArgs {
  std::string config;
  std::vector<std::string> datasets;
  std::vector<std::string> estimators;
  std::vector<std::string> classifiers;
  std::vector<std::string> train_modes;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  double retained_fraction = 0.0;
  double reduction_factor = 0.0;
  bool standardize = false;
  std::string format = "table";
  std::string out;
};

struct SynthArgs {
  std::string shift = "gauss-mean:0.5";
  std::string estimator = "nnew";
  std::size_t n = 1000;
  std::size_t n_source = 0;
  std::size_t n_target = 0;
  std::uint64_t seed = 0;
  std::string format = "table";
};

struct InfoArgs {
  std::vector<std::string> files;
  std::string label_column = "class";
  double retained_fraction = 0.999;
};

// Whether the CSV header names `column`.
bool has_column(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  std::string header;
  if (!in || !std::getline(in, header)) return false;
  if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
  std::stringstream ss(header);
  for (std::string field; std::getline(ss, field, ',');) {
    const auto first = field.find_first_not_of(" \t\r\"");
    const auto last = field.find_last_not_of(" \t\r\"");
    if (first != std::string::npos && field.substr(first, last - first + 1) == column) return true;
  }
  return false;
}

Dataset load_features(const std::string& path, const std::string& label_column) {
  return has_column(path, label_column) ? load_csv(path, label_column) : load_csv(path);
}

EstimatorKind estimator_of(const std::string& name) {
  const auto kind = parse_estimator(name);
  if (!kind) throw CLI::ValidationError("--estimator", name + " is not a known estimator");
  return *kind;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw DataError(fmt::format("cannot write '{}'", path));
  return file;
}

int cmd_weights(const WeightsArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset source = load_features(a.source, a.label_column);
  const Dataset target = load_features(a.target, a.label_column);
  if (source.dim() != target.dim())
    throw DataError(fmt::format("source has {} features, target {}", source.dim(), target.dim()));

  const EstimatorKind kind = estimator_of(a.estimator);
  EstimatorSettings settings;
  settings.seed = a.seed;
  settings.acceleration = a.brute_force ? Acceleration::BruteForce : Acceleration::KdTree;
  settings.min_positive = a.min_positive < 0 ? source.dim() + 1 : static_cast<std::size_t>(a.min_positive);
  settings.sigma_grid = a.sigmas;
  settings.lambda_grid = a.lambdas;

  if (!a.cv_out.empty()) {
    std::ofstream cv = open_output(a.cv_out);
    if (kind == EstimatorKind::Kliep) {
      KliepOptions options;
      options.seed = settings.seed;
      options.sigma_grid = settings.sigma_grid;
      if (auto fit = kliep_fit(source.features(), target.features(), options)) write_cv_csv(fit->cv, cv);
    } else if (kind == EstimatorKind::Ulsif) {
      UlsifOptions options;
      options.seed = settings.seed;
      options.sigma_grid = settings.sigma_grid;
      options.lambda_grid = settings.lambda_grid;
      if (auto fit = ulsif_fit(source.features(), target.features(), options)) write_cv_csv(fit->cv, cv);
    } else {
      err << "note: --cv-out only applies to kliep and ulsif\n";
    }
  }

  auto weights = estimate_weights(kind, source.features(), target.features(), settings);
  // Counting estimators report their native integer counts unless asked otherwise.
  const bool counting = kind == EstimatorKind::NNeW || kind == EstimatorKind::NNeWPlusOne;
  if (weights && counting && !a.mean_one) {
    const auto index = NeighborIndex::build(source.features(), settings.acceleration);
    weights = kind == EstimatorKind::NNeW ? nnew_weights(index, target.features())
                                          : nnew_plus_one(index, target.features());
  }
  if (!weights) {
    err << fmt::format("error: {} failed ({}): {}\n", to_string(kind), to_string(weights.failure().kind),
                       weights.failure().message);
    return kEstimatorFailure;
  }
  const Eigen::VectorXd& w = weights->values();
  const std::string summary =
      fmt::format("n_source={} n_target={} estimator={} min={:.6g} mean={:.6g} max={:.6g} zero={}\n", source.size(),
                  target.size(), to_string(kind), w.minCoeff(), w.mean(), w.maxCoeff(),
                  weights->size() - weights->count_positive());

  std::ostringstream body;
  if (a.format == "json") {
    nlohmann::json doc;
    doc["estimator"] = to_string(kind);
    doc["weights"] = std::vector<double>(w.data(), w.data() + w.size());
    body << doc.dump(2) << '\n';
  } else {
    write_weights_csv(weights.value(), body);
  }
  if (a.out.empty()) {
    out << body.str();
    err << summary;
  } else {
    open_output(a.out) << body.str();
    out << summary;
  }
  return kOk;
}

int cmd_bench(const BenchArgs& a, const CLI::App& app, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  for (const auto& entry : a.datasets) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size())
      throw CLI::ValidationError("--dataset", "expected NAME=PATH, got '" + entry + "'");
    config.datasets.push_back({entry.substr(0, eq), entry.substr(eq + 1)});
  }
  if (config.datasets.empty()) throw CLI::ValidationError("bench", "no datasets given (config file or --dataset)");

  if (!a.estimators.empty()) {
    config.estimators.clear();
    for (const auto& name : a.estimators) config.estimators.push_back(estimator_of(name));
  }
  if (!a.classifiers.empty()) {
    config.classifiers.clear();
    for (const auto& name : a.classifiers) config.classifiers.push_back(parse_discriminant_kind(name));
  }
  if (!a.train_modes.empty()) {
    config.train_modes.clear();
    for (const auto& name : a.train_modes) config.train_modes.push_back(parse_train_mode(name));
  }
  if (app.count("--repetitions")) config.repetitions = a.repetitions;
  if (app.count("--seed")) config.seed = a.seed;
  if (app.count("--retained-fraction")) config.retained_fraction = a.retained_fraction;
  if (app.count("--reduction-factor")) config.reduction_factor = a.reduction_factor;
  if (a.standardize) config.standardize = true;

  const ExperimentReport report = run_experiment(config);
  for (const auto& d : report.diagnostics) err << "note: " << d << '\n';
  if (report.dataset_names.empty()) {
    err << "error: no dataset could be loaded\n";
    return kRuntime;
  }

  auto emit = [&](std::ostream& stream, const std::string& format) {
    if (format == "csv")
      write_report_csv(stream, report);
    else if (format == "json")
      write_report_json(stream, report);
    else {
      ExperimentReport quiet = report;
      quiet.diagnostics.clear();
      write_table(stream, quiet);
    }
  };
  emit(out, a.format);
  if (!a.out.empty()) {
    std::ofstream file = open_output(a.out);
    emit(file, a.format == "json" ? "json" : "csv");
  }
  return kOk;
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  const SyntheticShift shift = [&] {
    try {
      return SyntheticShift::parse(a.shift);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--shift", e.what());
    }
  }();
  const EstimatorKind kind = estimator_of(a.estimator);
  const std::size_t n_source = a.n_source ? a.n_source : a.n;
  const std::size_t n_target = a.n_target ? a.n_target : a.n;
  if (n_source < 2 || n_target < 1) throw CLI::ValidationError("--n", "need at least two source points");

  EstimatorSettings settings;
  settings.seed = a.seed;
  const auto metrics = oracle_validate(shift, n_source, n_target, kind, a.seed, settings);
  if (!metrics) {
    err << fmt::format("error: {} failed ({}): {}\n", to_string(kind), to_string(metrics.failure().kind),
                       metrics.failure().message);
    return kRuntime;
  }
  if (a.format == "json") {
    nlohmann::json doc{{"shift", a.shift},          {"estimator", to_string(kind)},
                       {"n_source", n_source},      {"n_target", n_target},
                       {"corr", metrics->correlation}, {"mslog", metrics->ms_log_error},
                       {"positive", metrics->positive_count}};
    out << doc.dump(2) << '\n';
  } else if (a.format == "csv") {
    out << "shift,estimator,n_source,n_target,corr,mslog,positive\n";
    out << fmt::format("{},{},{},{},{:.6f},{:.6f},{}\n", a.shift, to_string(kind), n_source, n_target,
                       metrics->correlation, metrics->ms_log_error, metrics->positive_count);
  } else {
    out << fmt::format("shift={} estimator={} n_source={} n_target={} corr={:.6f} mslog={:.6f} positive={}\n",
                       a.shift, to_string(kind), n_source, n_target, metrics->correlation, metrics->ms_log_error,
                       metrics->positive_count);
  }
  return kOk;
}

int cmd_info(const InfoArgs& a, std::ostream& out) {
  if (a.files.empty()) {
    out << "estimators:";
    for (const auto& name : estimator_names()) out << ' ' << name;
    out << "\nclassifiers: lda qda\ntrain modes: half minimal\nshift families: none[:DIM] gauss-mean:SHIFT[:DIM] "
           "gauss-scale:SCALE[:DIM]\n";
    const ExperimentConfig defaults;
    out << fmt::format("bench defaults: repetitions={} retained_fraction={} reduction_factor={} seed={}\n",
                       defaults.repetitions, defaults.retained_fraction, defaults.reduction_factor, defaults.seed);
    return kOk;
  }
  for (const auto& path : a.files) {
    const Dataset data = load_features(path, a.label_column);
    out << fmt::format("{}: rows={} features={}", path, data.size(), data.dim());
    if (data.labeled()) {
      out << fmt::format(" classes={} counts=", data.num_classes());
      const auto counts = data.class_counts();
      for (std::size_t c = 0; c < counts.size(); ++c) out << (c ? "/" : "") << counts[c];
    }
    const PcaModel pca = fit_pca(data, a.retained_fraction);
    out << fmt::format(" pca_dims={}\n", pca.output_dim());
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Importance weighting for covariate shift: nearest-neighbour Voronoi counts and kernel baselines",
               "covshift"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "covshift 1.0.0");

  WeightsArgs wa;
  auto* weights = app.add_subcommand("weights", "Estimate importance weights for the source rows");
  weights->add_option("source", wa.source, "Source CSV (training features)")->required();
  weights->add_option("target", wa.target, "Target CSV (unlabeled features)")->required();
  weights->add_option("--estimator", wa.estimator, "Weighting method")
      ->check(CLI::IsMember(estimator_names()))
      ->capture_default_str();
  weights->add_option("-o,--out", wa.out, "Write weights here (default: standard output)");
  weights->add_option("--cv-out", wa.cv_out, "Write the kernel-width search (kliep, ulsif) as CSV");
  weights->add_option("--seed", wa.seed, "Seed for centre choice and folds")->capture_default_str();
  weights->add_option("--min-positive", wa.min_positive,
                      "uLSIF fails when fewer weights are positive (default: features + 1)");
  weights->add_option("--label-column", wa.label_column, "Column ignored when present")->capture_default_str();
  weights->add_option("--format", wa.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  weights->add_option("--sigma", wa.sigmas, "Kernel widths to search (kliep, ulsif; comma list)")
      ->allow_extra_args(false)
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  weights->add_option("--lambda", wa.lambdas, "Ridge strengths to search (ulsif; comma list, inf allowed)")
      ->allow_extra_args(false)
      ->delimiter(',')
      ->check(CLI::Validator(
          [](std::string& text) -> std::string {
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            return end != text.c_str() && *end == '\0' && v >= 0.0 ? "" : "must be a nonnegative number or inf";
          },
          "NONNEGATIVE|inf"));
  weights->add_flag("--mean-one", wa.mean_one, "Rescale nnew/nnew1 counts to mean one");
  weights->add_flag("--brute-force", wa.brute_force, "Exhaustive nearest-neighbour search instead of a kd-tree");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run the weighted LDA/QDA benchmark");
  bench->add_option("config", ba.config, "key = value config file")->check(CLI::ExistingFile);
  bench->add_option("--dataset", ba.datasets, "Extra dataset as NAME=PATH (repeatable)");
  bench->add_option("--estimator", ba.estimators, "Estimators (comma list)")
      ->allow_extra_args(false)
      ->delimiter(',')
      ->check(CLI::IsMember(estimator_names()));
  bench->add_option("--classifier", ba.classifiers, "Classifiers (comma list)")
      ->allow_extra_args(false)
      ->delimiter(',')
      ->check(CLI::IsMember(kClassifiers));
  bench->add_option("--train-mode", ba.train_modes, "Training-set sizes (comma list)")
      ->allow_extra_args(false)
      ->delimiter(',')
      ->check(CLI::IsMember(kTrainModes));
  bench->add_option("--repetitions", ba.repetitions, "Repetitions per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", ba.seed, "Seed for the whole run");
  bench->add_option("--retained-fraction", ba.retained_fraction, "PCA variance fraction kept")
      ->check(CLI::Range(1e-9, 1.0));
  bench->add_option("--reduction-factor", ba.reduction_factor, "Thinning factor for quadrants I and III")
      ->check(CLI::Range(1.0, 1e9));
  bench->add_flag("--standardize", ba.standardize, "z-score features before PCA");
  bench->add_option("--format", ba.format, "Standard output format")
      ->check(CLI::IsMember(kFormats))
      ->capture_default_str();
  bench->add_option("-o,--out", ba.out, "Also write a CSV (or JSON with --format json) report here");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Compare estimated weights with the exact ratio on a Gaussian shift");
  synth->add_option("--shift", sa.shift, "none[:DIM] | gauss-mean:SHIFT[:DIM] | gauss-scale:SCALE[:DIM]")
      ->capture_default_str();
  synth->add_option("--estimator", sa.estimator, "Weighting method")
      ->check(CLI::IsMember(estimator_names()))
      ->capture_default_str();
  synth->add_option("--n", sa.n, "Source and target sample size")->capture_default_str();
  synth->add_option("--n-source", sa.n_source, "Source sample size (overrides --n)");
  synth->add_option("--n-target", sa.n_target, "Target sample size (overrides --n)");
  synth->add_option("--seed", sa.seed, "Sampling seed")->capture_default_str();
  synth->add_option("--format", sa.format, "Output format")
      ->check(CLI::IsMember(kFormats))
      ->capture_default_str();

  InfoArgs ia;
  auto* info = app.add_subcommand("info", "List methods, or describe CSV files");
  info->add_option("files", ia.files, "CSV files to describe");
  info->add_option("--label-column", ia.label_column, "Label column")->capture_default_str();
  info->add_option("--retained-fraction", ia.retained_fraction, "PCA variance fraction kept")
      ->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*weights) return cmd_weights(wa, out, err);
    if (*bench) return cmd_bench(ba, *bench, out, err);
    if (*synth) return cmd_synth(sa, out, err);
    return cmd_info(ia, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace covshift::cli

#include "covshift/report.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace covshift {

namespace {

const char* kCsvHeader = "dataset,train_mode,classifier,estimator,mean,stderr,n_success,n_fail,flag";

template <class T>
void append_unique(std::vector<T>& items, const T& value) {
  if (std::find(items.begin(), items.end(), value) == items.end()) items.push_back(value);
}

template <class T>
T parse_field(const std::string& text, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw DataError(fmt::format("report line {}: bad numeric field '{}'", line, text));
  return value;
}

}  // namespace

std::string format_cell(double mean_error, CellFlag flag) {
  switch (flag) {
    case CellFlag::Dash: return "-";
    case CellFlag::Best: return fmt::format("{:.3f}*", mean_error);
    case CellFlag::Tied: return fmt::format("{:.3f}~", mean_error);
    case CellFlag::Plain: break;
  }
  return fmt::format("{:.3f}", mean_error);
}

void write_table(std::ostream& out, const ExperimentReport& report) {
  std::vector<std::pair<DiscriminantKind, std::string>> panels;
  std::vector<EstimatorKind> estimators;
  std::vector<std::string> datasets = report.dataset_names;
  for (const auto& c : report.cells) {
    append_unique(panels, std::make_pair(c.classifier, c.train_mode));
    append_unique(estimators, c.estimator);
    append_unique(datasets, c.dataset);
  }

  std::size_t name_width = 7;
  for (const auto& d : datasets) name_width = std::max(name_width, d.size());
  std::size_t col_width = 7;
  for (auto e : estimators) col_width = std::max(col_width, std::string(display_name(e)).size());

  bool first = true;
  for (const auto& [classifier, mode] : panels) {
    if (!first) out << '\n';
    first = false;
    std::string upper = to_string(classifier);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) { return std::toupper(ch); });
    out << fmt::format("{} / {}\n", upper, mode);
    out << fmt::format("{:<{}}", "dataset", name_width);
    for (auto e : estimators) out << fmt::format("  {:>{}}", display_name(e), col_width);
    out << '\n';
    for (const auto& d : datasets) {
      std::string line = fmt::format("{:<{}}", d, name_width);
      bool any = false;
      for (auto e : estimators) {
        const auto it = std::find_if(report.cells.begin(), report.cells.end(), [&](const CellRecord& c) {
          return c.dataset == d && c.train_mode == mode && c.classifier == classifier && c.estimator == e;
        });
        std::string text = " ";
        if (it != report.cells.end()) {
          text = format_cell(it->result.mean_error, it->flag);
          any = true;
        }
        line += fmt::format("  {:>{}}", text, col_width);
      }
      if (any) out << line << '\n';
    }
  }
  for (const auto& d : report.diagnostics) out << "note: " << d << '\n';
}

void write_report_csv(std::ostream& out, const ExperimentReport& report) {
  out << kCsvHeader << '\n';
  for (const auto& c : report.cells) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", c.dataset, c.train_mode, to_string(c.classifier),
                       to_string(c.estimator), c.result.mean_error, c.result.stderr_of_mean, c.result.n_successes,
                       c.result.n_failures, to_string(c.flag));
  }
}

void write_report_json(std::ostream& out, const ExperimentReport& report) {
  nlohmann::json doc;
  doc["datasets"] = report.dataset_names;
  auto cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json cell;
    cell["dataset"] = c.dataset;
    cell["train_mode"] = c.train_mode;
    cell["classifier"] = to_string(c.classifier);
    cell["estimator"] = to_string(c.estimator);
    if (c.result.dash())
      cell["mean"] = nullptr;
    else
      cell["mean"] = c.result.mean_error;
    cell["stderr"] = c.result.stderr_of_mean;
    cell["n_success"] = c.result.n_successes;
    cell["n_fail"] = c.result.n_failures;
    cell["flag"] = to_string(c.flag);
    cell["errors"] = c.errors;
    cell["failure_kinds"] = c.failure_kinds;
    cells.push_back(std::move(cell));
  }
  doc["cells"] = std::move(cells);
  doc["diagnostics"] = report.diagnostics;
  out << doc.dump(2) << '\n';
}

ExperimentReport read_report_csv(std::istream& in) {
  ExperimentReport report;
  std::string line;
  if (!std::getline(in, line)) throw DataError("report: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw DataError("report: unexpected header '" + line + "'");
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string field; std::getline(ss, field, ',');) fields.push_back(field);
    if (fields.size() != 9)
      throw DataError(fmt::format("report line {}: expected 9 fields, found {}", line_number, fields.size()));
    CellRecord cell;
    cell.dataset = fields[0];
    cell.train_mode = fields[1];
    const auto estimator = parse_estimator(fields[3]);
    if (!estimator) throw DataError(fmt::format("report line {}: unknown estimator '{}'", line_number, fields[3]));
    try {
      cell.classifier = parse_discriminant_kind(fields[2]);
      cell.flag = parse_cell_flag(fields[8]);
    } catch (const std::invalid_argument& e) {
      throw DataError(fmt::format("report line {}: {}", line_number, e.what()));
    }
    cell.estimator = *estimator;
    cell.result.mean_error = parse_field<double>(fields[4], line_number);
    cell.result.stderr_of_mean = parse_field<double>(fields[5], line_number);
    cell.result.n_successes = parse_field<std::size_t>(fields[6], line_number);
    cell.result.n_failures = parse_field<std::size_t>(fields[7], line_number);
    append_unique(report.dataset_names, cell.dataset);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

}  // namespace covshift

#pragma once

#include "covshift/experiment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace covshift {

/// Table cell text: mean to three decimals followed by `*` (best) or `~`
/// (tied); `-` for a dash.
std::string format_cell(double mean_error, CellFlag flag);

/// One aligned table per (classifier, train mode), datasets as rows and
/// estimators as columns.
void write_table(std::ostream& out, const ExperimentReport& report);

/// Columns: dataset,train_mode,classifier,estimator,mean,stderr,n_success,n_fail,flag.
void write_report_csv(std::ostream& out, const ExperimentReport& report);

void write_report_json(std::ostream& out, const ExperimentReport& report);

/// Parses write_report_csv output (per-repetition errors are not stored).
/// Throws DataError on malformed input.
ExperimentReport read_report_csv(std::istream& in);

}  // namespace covshift

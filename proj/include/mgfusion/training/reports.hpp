#pragma once

#include <string>

#include "mgfusion/training/cross_validation.hpp"

namespace mgf {

// JSON records. Field names are stable; see the README for the schema.
std::string history_to_json(const TrainHistory& history);
std::string fold_report_to_json(const FoldReport& fold);
std::string cv_summary_to_json(const CvReport& report);

// Writes <dir>/folds/repeat<r>_<session>.json for every fold and
// <dir>/summary.json.
void write_cv_reports(const CvReport& report, const std::string& dir);

std::string train_config_to_text(const TrainConfig& config);

}  // namespace mgf

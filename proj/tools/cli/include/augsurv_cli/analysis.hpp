#pragma once

#include "augsurv/augmentation.hpp"
#include "augsurv/dataset.hpp"
#include "augsurv/effect_measures.hpp"
#include "augsurv/learner.hpp"
#include "augsurv_cli/csv.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace augsurv::cli {

enum class MissingPolicy { fail, median_impute };

MissingPolicy parse_missing_policy(const std::string& text);

struct AnalysisConfig {
  std::filesystem::path input;
  std::string time_column;
  std::string event_column;
  std::string treatment_column;
  std::vector<std::string> continuous;
  std::vector<std::string> categorical;
  double pi = 0.5;
  MeasureId measure = MeasureId::log_hr;
  std::optional<double> tau;
  LearnerKind learner = LearnerKind::linear;
  std::vector<LearnerKind> candidates;  // super learner; empty = defaults
  int k_folds = 5;                      // 0 = no splitting
  std::uint64_t seed = 12345;
  MissingPolicy missing = MissingPolicy::median_impute;
  double ci_level = 0.95;

  void validate() const;
  EffectMeasureSpec measure_spec() const;
  LearnerSpec learner_spec() const;
};

struct IngestResult {
  TrialDataset data;
  std::size_t imputed = 0;
  std::vector<std::string> messages;
};

/// Builds the dataset from a parsed table. Categorical columns become
/// indicators for every level except the alphabetically first. "" and "NA"
/// are missing.
IngestResult ingest_table(const CsvTable& table, const AnalysisConfig& config);
IngestResult ingest_csv(const AnalysisConfig& config);

/// One printed row: label, point estimate and standard error with its CI.
struct ResultRow {
  std::string label;
  PointEstimate estimate;
  Interval ci;
};

struct AnalysisResult {
  std::vector<ResultRow> rows;  // unadjusted first
  std::vector<std::string> notes;
  double ci_level = 0.95;
};

/// Single learner: unadjusted and augmented rows. Super learner: one row
/// per candidate and the combined row, all on the same fold plan.
AnalysisResult analyze(const TrialDataset& data, const AnalysisConfig& config);

/// 3 decimals, or 1 when |point| >= 10.
void render_analysis(std::ostream& out, const AnalysisResult& result);

}  // namespace augsurv::cli

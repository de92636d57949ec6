#include "augsurv_cli/analysis.hpp"

#include "augsurv/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace augsurv::cli {
namespace {

bool is_missing(const std::string& v) { return v.empty() || v == "NA"; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_real(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string row_ref(std::size_t r, const std::string& column) {
  return "row " + std::to_string(r + 1) + ", column '" + column + "'";
}

double required_real(const CsvTable& t, std::size_t r, std::size_t j) {
  const std::string v = trim(t.rows[r][j]);
  if (is_missing(v)) throw Error(row_ref(r, t.header[j]) + ": missing value");
  const auto x = parse_real(v);
  if (!x) throw Error(row_ref(r, t.header[j]) + ": cannot parse '" + v + "' as a number");
  return *x;
}

int required_binary(const CsvTable& t, std::size_t r, std::size_t j, const char* what) {
  const double x = required_real(t, r, j);
  if (x != 0.0 && x != 1.0) {
    throw Error(row_ref(r, t.header[j]) + ": " + what + " must be 0 or 1, got " + trim(t.rows[r][j]));
  }
  return static_cast<int>(x);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

MissingPolicy parse_missing_policy(const std::string& text) {
  if (text == "fail") return MissingPolicy::fail;
  if (text == "median-impute" || text == "median_impute") return MissingPolicy::median_impute;
  throw Error("unknown missing-data policy '" + text + "'");
}

void AnalysisConfig::validate() const {
  if (time_column.empty() || event_column.empty() || treatment_column.empty()) {
    throw Error("time, event and treatment columns are required");
  }
  if (!(pi > 0.0 && pi < 1.0)) throw Error("pi must lie in (0, 1)");
  if (measure == MeasureId::custom) throw Error("custom measures are not available from the command line");
  if (measure_needs_tau(measure) && !tau) throw Error(to_string(measure) + " requires --tau");
  if (!measure_needs_tau(measure) && tau) throw Error(to_string(measure) + " does not take --tau");
  if (k_folds < 0 || k_folds == 1) throw Error("--k-folds must be 0 (no splitting) or at least 2");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw Error("--ci-level must lie in (0, 1)");
  if (learner != LearnerKind::super_learner && !candidates.empty()) {
    throw Error("--candidates applies only to the super learner");
  }
  for (LearnerKind c : candidates) {
    if (c == LearnerKind::super_learner) throw Error("a super learner cannot be its own candidate");
  }
}

EffectMeasureSpec AnalysisConfig::measure_spec() const { return EffectMeasureSpec::builtin(measure, tau); }

LearnerSpec AnalysisConfig::learner_spec() const {
  if (learner == LearnerKind::super_learner) {
    return LearnerSpec::super_learner(candidates.empty() ? LearnerSpec::default_candidates() : candidates);
  }
  return LearnerSpec::of(learner);
}

IngestResult ingest_table(const CsvTable& table, const AnalysisConfig& config) {
  config.validate();
  const std::size_t n = table.rows.size();
  if (n == 0) throw Error("input has no data rows");

  const std::size_t jt = table.column(config.time_column);
  const std::size_t je = table.column(config.event_column);
  const std::size_t ja = table.column(config.treatment_column);

  std::vector<double> time(n);
  std::vector<int> event(n), treatment(n);
  for (std::size_t r = 0; r < n; ++r) {
    time[r] = required_real(table, r, jt);
    event[r] = required_binary(table, r, je, "event");
    treatment[r] = required_binary(table, r, ja, "treatment");
  }

  std::vector<std::vector<double>> columns;
  std::vector<std::string> names;
  std::size_t imputed = 0;
  std::vector<std::string> messages;

  for (const auto& name : config.continuous) {
    const std::size_t j = table.column(name);
    std::vector<double> values(n);
    std::vector<double> observed;
    std::vector<std::size_t> missing;
    for (std::size_t r = 0; r < n; ++r) {
      const std::string v = trim(table.rows[r][j]);
      if (is_missing(v)) {
        if (config.missing == MissingPolicy::fail) throw Error(row_ref(r, name) + ": missing value");
        missing.push_back(r);
        continue;
      }
      const auto x = parse_real(v);
      if (!x) throw Error(row_ref(r, name) + ": cannot parse '" + v + "' as a number");
      values[r] = *x;
      observed.push_back(*x);
    }
    if (!missing.empty()) {
      if (observed.empty()) throw Error("column '" + name + "' has no observed values");
      const double fill = median(observed);
      for (std::size_t r : missing) values[r] = fill;
      imputed += missing.size();
      messages.push_back(std::to_string(missing.size()) + " missing value(s) in '" + name + "' set to median " +
                         std::to_string(fill));
    }
    columns.push_back(std::move(values));
    names.push_back(name);
  }

  for (const auto& name : config.categorical) {
    const std::size_t j = table.column(name);
    std::vector<std::string> values(n);
    std::map<std::string, std::size_t> counts;
    std::vector<std::size_t> missing;
    for (std::size_t r = 0; r < n; ++r) {
      values[r] = trim(table.rows[r][j]);
      if (is_missing(values[r])) {
        if (config.missing == MissingPolicy::fail) throw Error(row_ref(r, name) + ": missing value");
        missing.push_back(r);
      } else {
        ++counts[values[r]];
      }
    }
    if (counts.empty()) throw Error("column '" + name + "' has no observed values");
    if (!missing.empty()) {
      // most frequent level; ties go to the alphabetically first
      std::string mode = counts.begin()->first;
      for (const auto& [level, c] : counts) {
        if (c > counts[mode]) mode = level;
      }
      for (std::size_t r : missing) values[r] = mode;
      imputed += missing.size();
      messages.push_back(std::to_string(missing.size()) + " missing value(s) in '" + name +
                         "' set to most frequent level '" + mode + "'");
    }
    auto level = counts.begin();
    for (++level; level != counts.end(); ++level) {
      std::vector<double> indicator(n);
      for (std::size_t r = 0; r < n; ++r) indicator[r] = values[r] == level->first ? 1.0 : 0.0;
      columns.push_back(std::move(indicator));
      names.push_back(name + "_" + level->first);
    }
  }

  Eigen::MatrixXd w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t r = 0; r < n; ++r) w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = columns[c][r];
  }
  if (imputed > 0) messages.insert(messages.begin(), std::to_string(imputed) + " value" + (imputed == 1 ? "" : "s") + " imputed");
  return {TrialDataset(std::move(w), std::move(treatment), std::move(time), std::move(event), config.pi, names),
          imputed, std::move(messages)};
}

IngestResult ingest_csv(const AnalysisConfig& config) { return ingest_table(read_csv_file(config.input), config); }

}  // namespace augsurv::cli

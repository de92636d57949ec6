#include "augsurv_cli/analysis.hpp"

#include "augsurv/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace augsurv::cli {
namespace {

std::string row_label(const LearnerSpec& spec) {
  return spec.kind == LearnerKind::super_learner ? "Super learner" : spec.label();
}

ResultRow augmented_row(const std::string& label, const EstimateReport& report) {
  return {label, report.augmented, report.ci};
}

}  // namespace

AnalysisResult analyze(const TrialDataset& data, const AnalysisConfig& config) {
  config.validate();
  const EffectMeasureSpec spec = config.measure_spec();
  const LearnerSpec learner = config.learner_spec();
  const InitialEstimate initial = initial_estimate(data, spec);

  std::vector<LearnerSpec> fits;
  if (learner.kind == LearnerKind::super_learner) {
    for (LearnerKind c : learner.candidates) fits.push_back(learner.candidate(c));
  }
  fits.push_back(learner);

  AnalysisResult result;
  result.ci_level = config.ci_level;
  std::vector<EstimateReport> reports;
  if (config.k_folds == 0) {
    for (const auto& f : fits) reports.push_back(augment_no_split(data, initial, f, config.seed, config.ci_level));
  } else {
    const CrossFitPlan plan = make_plan(data.n(), data.treatment(), data.event(), config.k_folds, config.seed);
    const CrossFitNuisance nuisance = prepare_cross_fit(data, spec, plan);
    for (const auto& f : fits) {
      reports.push_back(augment_cross_fit(data, initial, nuisance, f, plan, config.ci_level));
    }
  }

  const EstimateReport& any = reports.front();
  result.rows.push_back({"Unadjusted", any.unadjusted, any.unadjusted_ci});
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const bool single = fits.size() == 1;
    result.rows.push_back(augmented_row(single ? "Augmented" : row_label(fits[i]), reports[i]));
    for (const auto& note : reports[i].notes) result.notes.push_back(row_label(fits[i]) + ": " + note);
  }
  return result;
}

void render_analysis(std::ostream& out, const AnalysisResult& result) {
  std::size_t width = 10;
  for (const auto& r : result.rows) width = std::max(width, r.label.size());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %9s  %9s  %g%% CI\n", static_cast<int>(width), "", "Pt. Est.", "Std. Err.",
                100.0 * result.ci_level);
  out << buf;
  for (const auto& r : result.rows) {
    const int digits = std::abs(r.estimate.point) >= 10.0 ? 1 : 3;
    std::snprintf(buf, sizeof buf, "%-*s  %9.*f  %9.*f  (%.*f, %.*f)\n", static_cast<int>(width), r.label.c_str(),
                  digits, r.estimate.point, digits, r.estimate.se, digits, r.ci.lower, digits, r.ci.upper);
    out << buf;
  }
}

}  // namespace augsurv::cli

#include "augsurv/monte_carlo.hpp"

#include "augsurv/augmentation.hpp"
#include "augsurv/error.hpp"
#include "augsurv/random.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

namespace augsurv {
namespace {

constexpr std::uint64_t kTrialStream = 0;
constexpr std::uint64_t kPlanStream = 1;
constexpr std::uint64_t kLearnerStreamBase = 100;

ReplicateRecord failed_record(std::size_t r, MeasureId m, std::string id, bool split, const std::string& what) {
  ReplicateRecord rec;
  rec.replicate = r;
  rec.measure = m;
  rec.estimator_id = std::move(id);
  rec.split = split;
  rec.failed = true;
  rec.error = what;
  return rec;
}

ReplicateRecord ok_record(std::size_t r, MeasureId m, std::string id, bool split, const PointEstimate& e) {
  ReplicateRecord rec;
  rec.replicate = r;
  rec.measure = m;
  rec.estimator_id = std::move(id);
  rec.split = split;
  rec.estimate = e.point;
  rec.se = e.se;
  if (!std::isfinite(e.point) || !std::isfinite(e.se)) {
    rec.failed = true;
    rec.error = "non-finite estimate";
  }
  return rec;
}

// All records of one replicate, in the fixed (measure, estimator) order.
std::vector<ReplicateRecord> run_replicate(std::size_t r, const ScenarioSpec& scenario,
                                           const std::vector<MeasureTarget>& measures,
                                           const std::vector<EstimatorConfig>& estimators,
                                           std::uint64_t master_seed, double ci_level) {
  const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(r));
  std::vector<ReplicateRecord> out;
  out.reserve(measures.size() * (1 + estimators.size()));

  std::optional<TrialDataset> data;
  std::string trial_error;
  try {
    data.emplace(generate_trial(scenario, derive_seed(seed, kTrialStream)));
  } catch (const std::exception& e) {
    trial_error = e.what();
  }

  for (const auto& target : measures) {
    const MeasureId m = target.spec.id;
    std::optional<InitialEstimate> initial;
    std::string initial_error = trial_error;
    if (data) {
      try {
        initial.emplace(initial_estimate(*data, target.spec));
      } catch (const std::exception& e) {
        initial_error = e.what();
      }
    }
    if (!initial) {
      out.push_back(failed_record(r, m, "unadjusted", false, initial_error));
      for (const auto& cfg : estimators) out.push_back(failed_record(r, m, cfg.label(), cfg.split, initial_error));
      continue;
    }
    const PointEstimate unadjusted{initial->theta, std::sqrt(initial->psi.variance_estimate())};
    out.push_back(ok_record(r, m, "unadjusted", false, unadjusted));

    // Plans and fold nuisances are shared by all split estimators with the same K.
    std::map<int, std::pair<CrossFitPlan, CrossFitNuisance>> folds;
    std::map<int, std::string> fold_errors;
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      const auto& cfg = estimators[e];
      const std::uint64_t learner_seed = derive_seed(seed, kLearnerStreamBase + e);
      try {
        EstimateReport report;
        if (cfg.split) {
          if (fold_errors.count(cfg.k_folds)) throw Error(fold_errors[cfg.k_folds]);
          auto it = folds.find(cfg.k_folds);
          if (it == folds.end()) {
            try {
              CrossFitPlan plan = make_plan(data->n(), data->treatment(), data->event(), cfg.k_folds,
                                            derive_seed(derive_seed(seed, kPlanStream), static_cast<std::uint64_t>(cfg.k_folds)));
              CrossFitNuisance nuisance = prepare_cross_fit(*data, target.spec, plan);
              it = folds.emplace(cfg.k_folds, std::make_pair(std::move(plan), std::move(nuisance))).first;
            } catch (const std::exception& ex) {
              fold_errors[cfg.k_folds] = ex.what();
              throw;
            }
          }
          CrossFitPlan plan = it->second.first;
          plan.seed = learner_seed;
          report = augment_cross_fit(*data, *initial, it->second.second, cfg.learner, plan, ci_level);
        } else {
          report = augment_no_split(*data, *initial, cfg.learner, learner_seed, ci_level);
        }
        out.push_back(ok_record(r, m, cfg.label(), cfg.split, report.augmented));
      } catch (const std::exception& ex) {
        out.push_back(failed_record(r, m, cfg.label(), cfg.split, ex.what()));
      }
    }
  }
  return out;
}

}  // namespace

std::string EstimatorConfig::label() const { return learner.label(); }

SimMetrics summarize(const std::vector<ReplicateRecord>& records, double truth, double ci_level) {
  const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + ci_level));
  SimMetrics s;
  if (!records.empty()) {
    s.estimator_id = records.front().estimator_id;
    s.measure = records.front().measure;
    s.split = records.front().split;
  }
  double sum = 0.0, sum_se = 0.0;
  std::size_t covered = 0;
  for (const auto& rec : records) {
    if (rec.failed) {
      ++s.n_failures;
      continue;
    }
    ++s.n_reps;
    sum += rec.estimate;
    sum_se += rec.se;
    if (std::abs(rec.estimate - truth) <= z * rec.se) ++covered;
  }
  if (s.n_reps == 0) {
    s.bias = s.sd = s.cp = s.mean_se = std::nan("");
  } else {
    const double k = static_cast<double>(s.n_reps);
    const double mean = sum / k;
    double ss = 0.0;
    for (const auto& rec : records) {
      if (!rec.failed) ss += (rec.estimate - mean) * (rec.estimate - mean);
    }
    s.bias = mean - truth;
    s.sd = s.n_reps > 1 ? std::sqrt(ss / (k - 1.0)) : std::nan("");
    s.cp = static_cast<double>(covered) / k;
    s.mean_se = sum_se / k;
  }
  const std::size_t total = s.n_reps + s.n_failures;
  s.failure_flag = total > 0 && static_cast<double>(s.n_failures) > 0.01 * static_cast<double>(total);
  return s;
}

MonteCarloResult run_monte_carlo(const ScenarioSpec& scenario, const std::vector<MeasureTarget>& measures,
                                 const std::vector<EstimatorConfig>& estimators, const MonteCarloOptions& options) {
  scenario.validate();
  if (options.n_reps < 2) throw Error("Monte Carlo needs at least two replicates");
  if (measures.empty()) throw Error("no measures requested");
  for (const auto& m : measures) m.spec.validate();
  for (const auto& cfg : estimators) {
    if (cfg.split && cfg.k_folds < 2) throw Error("split estimators need k_folds >= 2");
  }

  const std::size_t reps = options.n_reps;
  std::vector<std::vector<ReplicateRecord>> per_rep(reps);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    for (std::size_t r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) {
      try {
        per_rep[r] = run_replicate(r, scenario, measures, estimators, options.master_seed, options.ci_level);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next.store(reps);
        return;
      }
      const std::size_t d = done.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, reps);
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(reps)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  MonteCarloResult result;
  const std::size_t per_measure = 1 + estimators.size();
  for (auto& recs : per_rep) {
    for (auto& rec : recs) result.log.push_back(std::move(rec));
  }
  const std::size_t stride = measures.size() * per_measure;
  for (std::size_t mi = 0; mi < measures.size(); ++mi) {
    std::vector<SimMetrics> cell;
    for (std::size_t e = 0; e < per_measure; ++e) {
      std::vector<ReplicateRecord> column;
      column.reserve(reps);
      for (std::size_t r = 0; r < reps; ++r) column.push_back(result.log[r * stride + mi * per_measure + e]);
      cell.push_back(summarize(column, measures[mi].truth, options.ci_level));
    }
    const double unadjusted_var = cell.front().sd * cell.front().sd;
    for (auto& s : cell) {
      s.re = unadjusted_var / (s.sd * s.sd);
      result.metrics.push_back(s);
    }
  }
  return result;
}

}  // namespace augsurv

#include <benchmark/benchmark.h>

#include "augsurv/augmentation.hpp"
#include "augsurv/cox.hpp"
#include "augsurv/forest.hpp"
#include "augsurv/regression_problem.hpp"
#include "augsurv/scenario.hpp"
#include "augsurv/super_learner.hpp"

using namespace augsurv;

namespace {

TrialDataset trial(std::size_t n) {
  ScenarioSpec spec;
  spec.scenario = Scenario::D;
  spec.n = n;
  return generate_trial(spec, 7);
}

RegressionProblem log_hr_problem(const TrialDataset& data) {
  return make_problem(data, analytic_influence(EffectMeasureSpec::log_hr(), data));
}

}  // namespace

static void BM_CoxFit(benchmark::State& state) {
  const TrialDataset data = trial(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cox_unadjusted(data).log_hr());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CoxFit)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

static void BM_GenerateTrial(benchmark::State& state) {
  ScenarioSpec spec;
  spec.n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_trial(spec, ++seed).n());
}
BENCHMARK(BM_GenerateTrial)->Arg(250)->Arg(100000);

static void BM_ForestFit(benchmark::State& state) {
  const RegressionProblem problem = log_hr_problem(trial(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(fit_random_forest(problem, {}, 1).kind());
}
BENCHMARK(BM_ForestFit)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_SuperLearnerFit(benchmark::State& state) {
  const RegressionProblem problem = log_hr_problem(trial(250));
  std::vector<LearnerSpec> candidates;
  for (LearnerKind k : LearnerSpec::default_candidates()) candidates.push_back(LearnerSpec::of(k));
  for (auto _ : state) benchmark::DoNotOptimize(fit_super_learner(problem, candidates, 5, 1).combined_cv_risk);
}
BENCHMARK(BM_SuperLearnerFit)->Unit(benchmark::kMillisecond);

// one replicate's worth of work for a single learner: plan, nuisance and fit
static void BM_CrossFitReplicate(benchmark::State& state) {
  const TrialDataset data = trial(250);
  const auto kind = static_cast<LearnerKind>(state.range(0));
  const EffectMeasureSpec spec = EffectMeasureSpec::rmst_diff(2.0);
  for (auto _ : state) {
    const CrossFitPlan plan = make_plan(data.n(), data.treatment(), data.event(), 5, 3);
    benchmark::DoNotOptimize(augment_cross_fit(data, spec, LearnerSpec::of(kind), plan).augmented.point);
  }
  state.SetLabel(to_string(kind));
}
BENCHMARK(BM_CrossFitReplicate)
    ->Arg(static_cast<int>(LearnerKind::linear))
    ->Arg(static_cast<int>(LearnerKind::spline_additive))
    ->Arg(static_cast<int>(LearnerKind::tree))
    ->Arg(static_cast<int>(LearnerKind::random_forest))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

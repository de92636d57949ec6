#include "augsurv/cox.hpp"

#include "augsurv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace augsurv {
namespace {

// Counts at one distinct event time; with a binary covariate the Breslow
// risk-set sums reduce to S0 = n0 + e^b n1 and S1 = e^b n1.
struct RiskRow {
  double time;
  double n0, n1;  // at risk by arm
  double d, d1;   // events, events in arm 1
};

double log_s0(const RiskRow& r, double beta) {
  if (r.n1 == 0.0) return std::log(r.n0);
  if (r.n0 == 0.0) return beta + std::log(r.n1);
  return beta > 0.0 ? beta + std::log(r.n0 * std::exp(-beta) + r.n1)
                    : std::log(r.n0 + std::exp(beta) * r.n1);
}

double share_treated(const RiskRow& r, double beta) {
  if (r.n1 == 0.0) return 0.0;
  if (r.n0 == 0.0) return 1.0;
  return 1.0 / (1.0 + r.n0 / r.n1 * std::exp(-beta));
}

double log_likelihood(const std::vector<RiskRow>& rows, double beta) {
  double ll = 0.0;
  for (const auto& r : rows) ll += r.d1 * beta - r.d * log_s0(r, beta);
  return ll;
}

void score_and_information(const std::vector<RiskRow>& rows, double beta, double& score,
                           double& information) {
  score = 0.0;
  information = 0.0;
  for (const auto& r : rows) {
    const double p = share_treated(r, beta);
    score += r.d1 - r.d * p;
    information += r.d * p * (1.0 - p);
  }
}

std::vector<RiskRow> risk_rows(std::span<const double> time, std::span<const int> event,
                               std::span<const int> treatment, const std::vector<std::size_t>& order) {
  const std::size_t n = time.size();
  double total1 = 0.0;
  for (int a : treatment) total1 += a;
  double remaining0 = static_cast<double>(n) - total1;
  double remaining1 = total1;

  std::vector<RiskRow> rows;
  std::size_t pos = 0;
  while (pos < n) {
    const double t = time[order[pos]];
    RiskRow row{t, remaining0, remaining1, 0.0, 0.0};
    while (pos < n && time[order[pos]] == t) {
      const std::size_t i = order[pos];
      if (event[i] == 1) {
        row.d += 1.0;
        row.d1 += treatment[i];
      }
      (treatment[i] == 1 ? remaining1 : remaining0) -= 1.0;
      ++pos;
    }
    if (row.d > 0.0) rows.push_back(row);
  }
  return rows;
}

}  // namespace

CoxFit cox_unadjusted(std::span<const double> time, std::span<const int> event,
                      std::span<const int> treatment) {
  const std::size_t n = time.size();
  if (n == 0) throw Error("empty sample");
  if (event.size() != n || treatment.size() != n) throw Error("cox: inconsistent input lengths");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return time[a] < time[b]; });
  const auto rows = risk_rows(time, event, treatment, order);

  // The score is strictly decreasing in beta, so a finite root exists iff
  // U(-inf) > 0 > U(+inf). Both limits are exact integer sums.
  double score_pos_inf = 0.0, score_neg_inf = 0.0;
  for (const auto& r : rows) {
    score_pos_inf += r.d1 - r.d * (r.n1 > 0.0 ? 1.0 : 0.0);
    score_neg_inf += r.d1 - r.d * (r.n0 > 0.0 ? 0.0 : 1.0);
  }
  if (rows.empty() || !(score_pos_inf < 0.0) || !(score_neg_inf > 0.0)) {
    throw Error("partial likelihood degenerate");
  }

  double beta = 0.0;
  double ll = log_likelihood(rows, beta);
  double score = 0.0, information = 0.0;
  int iterations = 0;
  bool converged = false;
  constexpr int kMaxIterations = 50;
  for (; iterations < kMaxIterations && !converged; ++iterations) {
    score_and_information(rows, beta, score, information);
    if (std::abs(score) < 1e-9) {
      converged = true;
      break;
    }
    if (!(information > 0.0)) break;
    double step = score / information;
    double candidate = beta + step;
    double ll_candidate = log_likelihood(rows, candidate);
    for (int halving = 0; halving < 40 && !(ll_candidate >= ll); ++halving) {
      step *= 0.5;
      candidate = beta + step;
      ll_candidate = log_likelihood(rows, candidate);
    }
    beta = candidate;
    ll = ll_candidate;
    if (std::abs(step) < 1e-10 * std::max(1.0, std::abs(beta))) converged = true;
  }
  if (!converged || !std::isfinite(beta)) throw Error("partial likelihood degenerate");
  score_and_information(rows, beta, score, information);
  if (!(information > 0.0)) throw Error("partial likelihood degenerate");

  CoxFit fit;
  fit.log_hr_ = beta;
  fit.information_ = information;
  fit.iterations_ = iterations;
  fit.sample_size_ = n;

  auto& curves = fit.curves_;
  double c0 = 0.0, c1 = 0.0;
  for (const auto& r : rows) {
    const double s0 = std::exp(log_s0(r, beta));
    c0 += r.d / s0;
    c1 += r.d * share_treated(r, beta) / s0;
    curves.event_times.push_back(r.time);
    curves.cum_hazard0.push_back(c0);
    curves.cum_hazard1.push_back(c1);
  }
  curves.sorted_times.resize(n);
  curves.suffix_n1.resize(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) curves.sorted_times[k] = time[order[k]];
  for (std::size_t k = n; k-- > 0;) curves.suffix_n1[k] = curves.suffix_n1[k + 1] + treatment[order[k]];

  fit.residuals_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals_[i] = fit.score_residual({treatment[i], time[i], event[i]});
  }
  return fit;
}

CoxFit cox_unadjusted(const TrialDataset& data) {
  return cox_unadjusted(data.time(), data.event(), data.treatment());
}

double CoxFit::mean_treatment_at(double t) const noexcept {
  const auto& ts = curves_.sorted_times;
  auto idx = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), t) - ts.begin());
  if (idx == ts.size()) {
    // Beyond the training support: carry the last non-empty risk set.
    idx = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), ts.back()) - ts.begin());
  }
  const double at_risk = static_cast<double>(ts.size() - idx);
  const double n1 = curves_.suffix_n1[idx];
  const double n0 = at_risk - n1;
  if (n1 == 0.0) return 0.0;
  if (n0 == 0.0) return 1.0;
  return 1.0 / (1.0 + n0 / n1 * std::exp(-log_hr_));
}

double CoxFit::score_residual(const SubjectOutcome& s) const {
  const auto& et = curves_.event_times;
  const auto k = static_cast<std::size_t>(std::upper_bound(et.begin(), et.end(), s.time) - et.begin());
  double compensator = 0.0;
  if (k > 0) {
    const double risk = s.treatment == 1 ? std::exp(log_hr_) : 1.0;
    compensator = risk * (s.treatment * curves_.cum_hazard0[k - 1] - curves_.cum_hazard1[k - 1]);
  }
  const double jump = s.event == 1 ? s.treatment - mean_treatment_at(s.time) : 0.0;
  return jump - compensator;
}

double cox_score(std::span<const double> time, std::span<const int> event,
                 std::span<const int> treatment, double beta) {
  std::vector<std::size_t> order(time.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return time[a] < time[b]; });
  double score = 0.0, information = 0.0;
  score_and_information(risk_rows(time, event, treatment, order), beta, score, information);
  return score;
}

}  // namespace augsurv

#include "augsurv/effect_measures.hpp"

#include "augsurv/cox.hpp"
#include "augsurv/error.hpp"
#include "augsurv/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace augsurv {
namespace {

EventTable arm_table(const TrialDataset& data, int arm) {
  std::vector<double> x;
  std::vector<int> d;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.treatment()[i] == arm) {
      x.push_back(data.time()[i]);
      d.push_back(data.event()[i]);
    }
  }
  return EventTable::build(x, d);
}

void check_tau_support(const EventTable& table, double tau) {
  if (tau > table.last_time()) throw Error("tau outside support");
}

// Kaplan-Meier nuisance of one arm, prepared for evaluating the martingale
// form of the influence of either S(tau) or the area under S on [0, tau].
class ArmCurve {
 public:
  ArmCurve(const TrialDataset& data, int arm, double tau, bool area)
      : table_(arm_table(data, arm)), surv_(kaplan_meier(table_)), tau_(tau), area_(area) {
    check_tau_support(table_, tau_);
    arm_size_ = static_cast<double>(table_.sample_size());
    total_area_ = surv_.integrate(tau_);
    // Compensator prefix sums over event times t_k <= tau.
    double acc = 0.0;
    double area_before = 0.0, left = 0.0, level = 1.0;
    const auto& values = surv_.values();
    for (std::size_t k = 0; k < table_.times.size() && table_.times[k] <= tau_; ++k) {
      const double y = static_cast<double>(table_.at_risk[k]);
      const double d = static_cast<double>(table_.events[k]);
      area_before += (table_.times[k] - left) * level;
      left = table_.times[k];
      level = values[k];
      const double w = area_ ? total_area_ - area_before : surv_(tau_);
      if (y - d > 0.0 && w != 0.0) acc += (d / y) * w / (y - d);
      compensator_.push_back(acc);
    }
  }

  double survival_at_tau() const { return surv_(tau_); }
  double area_to_tau() const { return total_area_; }

  // Influence of this arm's functional for one subject of the arm, in the
  // within-arm normalization (its mean square over the arm / n_a is the
  // Greenwood-type variance).
  double influence(double x, int delta) const {
    double jump = 0.0;
    if (delta == 1 && x <= tau_) {
      const double w = weight(x);
      if (w != 0.0) {
        const auto beyond = static_cast<double>(table_.count_at_risk(x) - table_.count_events_at(x));
        if (beyond > 0.0) {
          jump = w / beyond;
        } else if (surv_(x) != 0.0) {
          throw Error("influence evaluation outside the fitted risk set");
        }
      }
    }
    const auto& ts = table_.times;
    const auto k = static_cast<std::size_t>(
        std::upper_bound(ts.begin(), ts.begin() + static_cast<std::ptrdiff_t>(compensator_.size()),
                         std::min(x, tau_)) -
        ts.begin());
    const double comp = k > 0 ? compensator_[k - 1] : 0.0;
    return -arm_size_ * (jump - comp);
  }

 private:
  double weight(double t) const {
    return area_ ? total_area_ - surv_.integrate(t) : surv_(tau_);
  }

  EventTable table_;
  StepFunction surv_;
  double tau_;
  bool area_;
  double arm_size_ = 0.0;
  double total_area_ = 0.0;
  std::vector<double> compensator_;
};

void require_uncensored(const TrialDataset& data) {
  for (int d : data.event()) {
    if (d != 1) throw Error("mean_diff requires uncensored data");
  }
}

double arm_mean(const TrialDataset& data, int arm) {
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.treatment()[i] == arm) {
      sum += data.time()[i];
      count += 1.0;
    }
  }
  return sum / count;
}

std::vector<double> builtin_influence(const EffectMeasureSpec& spec, const TrialDataset& fitted,
                                      const TrialDataset& source, std::span<const std::size_t> rows) {
  const double pi = fitted.pi();
  std::vector<double> psi(rows.size());
  switch (spec.id) {
    case MeasureId::log_hr: {
      const CoxFit fit = cox_unadjusted(fitted);
      const double scale = static_cast<double>(fit.sample_size()) / fit.information();
      for (std::size_t k = 0; k < rows.size(); ++k) {
        psi[k] = scale * fit.score_residual(outcome_of(source, rows[k]));
      }
      break;
    }
    case MeasureId::surv_diff:
    case MeasureId::rmst_diff: {
      const bool area = spec.id == MeasureId::rmst_diff;
      const ArmCurve treated(fitted, 1, *spec.tau, area);
      const ArmCurve control(fitted, 0, *spec.tau, area);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto s = outcome_of(source, rows[k]);
        psi[k] = s.treatment == 1 ? treated.influence(s.time, s.event) / pi
                                  : -control.influence(s.time, s.event) / (1.0 - pi);
      }
      break;
    }
    case MeasureId::mean_diff: {
      require_uncensored(fitted);
      const double m1 = arm_mean(fitted, 1);
      const double m0 = arm_mean(fitted, 0);
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto s = outcome_of(source, rows[k]);
        if (s.event != 1) throw Error("mean_diff requires uncensored data");
        psi[k] = s.treatment == 1 ? (s.time - m1) / pi : -(s.time - m0) / (1.0 - pi);
      }
      break;
    }
    case MeasureId::custom:
      throw Error("custom measure has no built-in influence function");
  }
  return psi;
}

// `base` plus subject i of `other`, appended last.
TrialDataset with_subject(const TrialDataset& base, const TrialDataset& other, std::size_t i) {
  const auto n = static_cast<Eigen::Index>(base.n());
  Eigen::MatrixXd w(n + 1, base.covariates().cols());
  w.topRows(n) = base.covariates();
  w.row(n) = other.covariates().row(static_cast<Eigen::Index>(i));
  std::vector<int> a(base.treatment().begin(), base.treatment().end());
  std::vector<double> x(base.time().begin(), base.time().end());
  std::vector<int> d(base.event().begin(), base.event().end());
  a.push_back(other.treatment()[i]);
  x.push_back(other.time()[i]);
  d.push_back(other.event()[i]);
  return TrialDataset(std::move(w), std::move(a), std::move(x), std::move(d), base.pi(),
                      base.covariate_names());
}

}  // namespace

std::string to_string(MeasureId id) {
  switch (id) {
    case MeasureId::log_hr: return "log_hr";
    case MeasureId::surv_diff: return "surv_diff";
    case MeasureId::rmst_diff: return "rmst_diff";
    case MeasureId::mean_diff: return "mean_diff";
    case MeasureId::custom: return "custom";
  }
  return "unknown";
}

MeasureId parse_measure(const std::string& text) {
  std::string key = text;
  std::replace(key.begin(), key.end(), '-', '_');
  for (MeasureId id : {MeasureId::log_hr, MeasureId::surv_diff, MeasureId::rmst_diff,
                       MeasureId::mean_diff}) {
    if (key == to_string(id)) return id;
  }
  throw Error("unknown measure '" + text + "'");
}

bool measure_needs_tau(MeasureId id) noexcept {
  return id == MeasureId::surv_diff || id == MeasureId::rmst_diff;
}

EffectMeasureSpec EffectMeasureSpec::log_hr() { return builtin(MeasureId::log_hr, std::nullopt); }
EffectMeasureSpec EffectMeasureSpec::surv_diff(double tau) { return builtin(MeasureId::surv_diff, tau); }
EffectMeasureSpec EffectMeasureSpec::rmst_diff(double tau) { return builtin(MeasureId::rmst_diff, tau); }
EffectMeasureSpec EffectMeasureSpec::mean_diff() { return builtin(MeasureId::mean_diff, std::nullopt); }

EffectMeasureSpec EffectMeasureSpec::builtin(MeasureId id, std::optional<double> tau) {
  if (id == MeasureId::custom) throw Error("custom measures need an estimator");
  EffectMeasureSpec spec;
  spec.id = id;
  spec.tau = tau;
  spec.name = to_string(id);
  spec.validate();
  return spec;
}

EffectMeasureSpec EffectMeasureSpec::custom(std::string name, Estimator estimator,
                                            InfluenceFunction influence) {
  EffectMeasureSpec spec;
  spec.id = MeasureId::custom;
  spec.name = std::move(name);
  spec.estimator = std::move(estimator);
  spec.influence = std::move(influence);
  spec.influence_mode = spec.influence ? InfluenceMode::analytic : InfluenceMode::jackknife;
  spec.validate();
  return spec;
}

void EffectMeasureSpec::validate() const {
  if (measure_needs_tau(id) != tau.has_value()) {
    throw Error(measure_needs_tau(id) ? name + " requires tau" : name + " does not take tau");
  }
  if (tau && !(*tau > 0.0)) throw Error("tau must be positive");
  if (id == MeasureId::custom) {
    if (!estimator) throw Error("custom measure needs an estimator");
    if (influence_mode == InfluenceMode::analytic && !influence) {
      throw Error("custom measure without an influence function must use jackknife mode");
    }
  }
}

std::string EffectMeasureSpec::label() const {
  if (!tau) return name;
  std::string t = std::to_string(*tau);
  t.erase(t.find_last_not_of('0') + 1);
  if (!t.empty() && t.back() == '.') t.pop_back();
  return name + "(tau=" + t + ")";
}

double InfluenceVector::variance_estimate() const {
  const double n = static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += v * v;
  return ss / (n * n);
}

double estimate(const EffectMeasureSpec& spec, const TrialDataset& data) {
  spec.validate();
  switch (spec.id) {
    case MeasureId::log_hr:
      return cox_unadjusted(data).log_hr();
    case MeasureId::surv_diff:
    case MeasureId::rmst_diff: {
      const EventTable t1 = arm_table(data, 1);
      const EventTable t0 = arm_table(data, 0);
      check_tau_support(t1, *spec.tau);
      check_tau_support(t0, *spec.tau);
      const StepFunction s1 = kaplan_meier(t1);
      const StepFunction s0 = kaplan_meier(t0);
      if (spec.id == MeasureId::surv_diff) return s1(*spec.tau) - s0(*spec.tau);
      return rmst(s1, *spec.tau) - rmst(s0, *spec.tau);
    }
    case MeasureId::mean_diff:
      require_uncensored(data);
      return arm_mean(data, 1) - arm_mean(data, 0);
    case MeasureId::custom:
      return spec.estimator(data);
  }
  throw Error("unknown measure");
}

InfluenceVector analytic_influence(const EffectMeasureSpec& spec, const TrialDataset& data) {
  spec.validate();
  InfluenceVector out;
  out.measure = spec.id;
  out.provenance = InfluenceMode::analytic;
  std::vector<std::size_t> rows(data.n());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (spec.id == MeasureId::custom) {
    if (!spec.influence) throw Error("custom measure has no analytic influence function");
    out.values = spec.influence(data, data, rows);
  } else {
    out.values = builtin_influence(spec, data, data, rows);
  }
  if (out.values.size() != data.n()) throw Error("influence vector has wrong length");
  for (double v : out.values) {
    if (!std::isfinite(v)) throw Error("influence vector has non-finite entries");
  }
  return out;
}

InfluenceVector jackknife_influence(const EffectMeasureSpec& spec, const TrialDataset& data) {
  spec.validate();
  const std::size_t n = data.n();
  if (n < 2) throw Error("jackknife needs at least two subjects");
  const double full = estimate(spec, data);
  std::vector<std::size_t> rows(n - 1);
  InfluenceVector out;
  out.measure = spec.id;
  out.provenance = InfluenceMode::jackknife;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) rows[k++] = j;
    }
    double reduced;
    try {
      reduced = estimate(spec, data.subset(rows));
    } catch (const std::exception& e) {
      throw Error("jackknife failed when leaving out subject " + std::to_string(i) + ": " + e.what());
    }
    if (!std::isfinite(reduced)) {
      throw Error("jackknife failed when leaving out subject " + std::to_string(i) + ": non-finite estimate");
    }
    out.values[i] = static_cast<double>(n - 1) * (full - reduced);
  }
  const double mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / static_cast<double>(n);
  for (double& v : out.values) v -= mean;
  return out;
}

InfluenceVector estimate_influence(const EffectMeasureSpec& spec, const TrialDataset& data) {
  return spec.influence_mode == InfluenceMode::analytic ? analytic_influence(spec, data)
                                                        : jackknife_influence(spec, data);
}

std::vector<double> influence_out_of_sample(const EffectMeasureSpec& spec, const TrialDataset& fitted,
                                            const TrialDataset& source, std::span<const std::size_t> rows) {
  spec.validate();
  for (std::size_t i : rows) {
    if (i >= source.n()) throw Error("influence evaluation row out of range");
  }
  std::vector<double> psi;
  if (spec.influence_mode == InfluenceMode::analytic) {
    psi = spec.id == MeasureId::custom ? spec.influence(fitted, source, rows)
                                       : builtin_influence(spec, fitted, source, rows);
  } else {
    const double base = estimate(spec, fitted);
    const double scale = static_cast<double>(fitted.n());
    psi.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      double augmented;
      try {
        augmented = estimate(spec, with_subject(fitted, source, rows[k]));
      } catch (const std::exception& e) {
        throw Error("add-one influence failed for subject " + std::to_string(rows[k]) + ": " + e.what());
      }
      psi[k] = scale * (augmented - base);
    }
  }
  if (psi.size() != rows.size()) throw Error("influence vector has wrong length");
  for (double v : psi) {
    if (!std::isfinite(v)) throw Error("influence vector has non-finite entries");
  }
  return psi;
}

}  // namespace augsurv

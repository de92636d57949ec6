#include "augsurv/sim_report.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <string>

namespace augsurv {
namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::vector<SimCell> cells_from(const ScenarioSpec& scenario, const std::vector<MeasureTarget>& measures,
                                const MonteCarloResult& result) {
  std::vector<SimCell> cells;
  for (const auto& target : measures) {
    SimCell cell{scenario, target.truth, {}};
    for (const auto& m : result.metrics) {
      if (m.measure == target.spec.id) cell.metrics.push_back(m);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

void write_metrics_csv(std::ostream& out, const std::vector<SimCell>& cells) {
  out << "scenario,gamma,pi,n,measure,estimator,split,bias,sd,re,cp,n_reps,n_failures\n";
  for (const auto& cell : cells) {
    const auto& s = cell.scenario;
    for (const auto& m : cell.metrics) {
      out << to_string(s.scenario) << ',' << fmt(s.gamma, 3) << ',' << fmt(s.pi, 4) << ',' << s.n << ','
          << to_string(m.measure) << ',' << csv_quote(m.estimator_id) << ',' << (m.split ? "yes" : "no") << ','
          << fmt(m.bias, 6) << ',' << fmt(m.sd, 6) << ',' << fmt(m.re, 4) << ',' << fmt(m.cp, 4) << ','
          << m.n_reps << ',' << m.n_failures << '\n';
    }
  }
}

void render_metrics_table(std::ostream& out, const std::vector<SimCell>& cells) {
  for (const auto& cell : cells) {
    const MeasureId measure = cell.metrics.empty() ? MeasureId::log_hr : cell.metrics.front().measure;
    out << cell.scenario.label() << ", " << to_string(measure) << ", true value " << fmt(cell.truth, 4) << '\n';
    out << pad("Method", 26) << "  " << pad("Without sample splitting", 29) << "  With sample splitting\n";
    out << pad("", 26);
    for (int block = 0; block < 2; ++block) {
      out << "  " << lpad("Bias", 7) << lpad("SD", 7) << lpad("RE", 7) << lpad("CP", 7);
      if (block == 0) out << ' ';
    }
    out << '\n';

    // rows keyed by estimator id, in first-appearance order
    std::vector<std::string> order;
    std::map<std::string, std::pair<const SimMetrics*, const SimMetrics*>> rows;
    for (const auto& m : cell.metrics) {
      auto [it, inserted] = rows.try_emplace(m.estimator_id, nullptr, nullptr);
      if (inserted) order.push_back(m.estimator_id);
      (m.split ? it->second.second : it->second.first) = &m;
    }
    bool flagged = false;
    for (const auto& id : order) {
      const auto& [plain, split] = rows[id];
      out << pad(id, 26);
      for (const SimMetrics* m : {plain, split}) {
        out << "  ";
        if (m == nullptr) {
          out << std::string(28, ' ');
        } else {
          out << lpad(fmt(m->bias, 3), 7) << lpad(fmt(m->sd, 3), 7) << lpad(fmt(m->re, 2), 7)
              << lpad(fmt(m->cp, 2), 7);
          if (m->failure_flag) flagged = true;
        }
        if (m == plain) out << (m != nullptr && m->failure_flag ? '*' : ' ');
      }
      if (split != nullptr && split->failure_flag) out << '*';
      out << '\n';
    }
    if (flagged) out << "* more than 1% of replicates failed for this estimator\n";
    out << '\n';
  }
}

void write_replicate_log_csv(std::ostream& out, const ScenarioSpec& scenario,
                             const std::vector<ReplicateRecord>& log) {
  out << "scenario,gamma,n,replicate,measure,estimator,split,estimate,se,error\n";
  char buf[64];
  for (const auto& r : log) {
    out << to_string(scenario.scenario) << ',' << fmt(scenario.gamma, 3) << ',' << scenario.n << ','
        << r.replicate << ',' << to_string(r.measure) << ',' << csv_quote(r.estimator_id) << ','
        << (r.split ? "yes" : "no") << ',';
    if (r.failed) {
      out << ",," << csv_quote(r.error) << '\n';
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.estimate, r.se);
      out << buf << ",\n";
    }
  }
}

}  // namespace augsurv

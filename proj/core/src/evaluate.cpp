#include "dhp/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dhp {

namespace {

constexpr std::size_t kMinResidualEvents = 10;

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Kolmogorov limiting distribution: P(K > x).
double kolmogorov_survival(double x) {
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

NllResult test_nll(const PointProcessModel& model, const EventSequence& seq) {
  if (!(seq.horizon() > seq.start())) throw std::invalid_argument("test window is empty");
  return negative_log_likelihood(model, seq);
}

MapeResult mape_from_totals(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) throw std::invalid_argument("mape: size mismatch");
  MapeResult r;
  r.predicted.assign(predicted.begin(), predicted.end());
  r.actual.assign(actual.begin(), actual.end());
  r.per_dimension.assign(actual.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<double> used;
  for (std::size_t m = 0; m < actual.size(); ++m) {
    if (!(actual[m] > 0.0)) {
      r.excluded.push_back(m);
      continue;
    }
    r.per_dimension[m] = std::abs(predicted[m] - actual[m]) / actual[m];
    used.push_back(r.per_dimension[m]);
  }
  if (used.empty()) {
    r.mean = r.stddev = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  double sum = 0.0;
  for (double v : used) sum += v;
  r.mean = sum / static_cast<double>(used.size());
  double sq = 0.0;
  for (double v : used) sq += (v - r.mean) * (v - r.mean);
  r.stddev = std::sqrt(sq / static_cast<double>(used.size()));
  return r;
}

MapeResult mape(const PointProcessModel& model, const EventSequence& seq, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("mape: interval width must be > 0");
  const auto boundaries = interval_boundaries(seq.start(), seq.horizon(), width);
  const Matrix predicted = predict_counts(model, seq.events(), boundaries);
  const CountGrid grid = count_events(seq.events(), seq.num_marks(), boundaries);
  std::vector<double> pred(seq.num_marks(), 0.0), act(seq.num_marks(), 0.0);
  for (std::size_t s = 0; s < predicted.rows(); ++s)
    for (std::size_t m = 0; m < seq.num_marks(); ++m) {
      pred[m] += predicted(s, m);
      act[m] += static_cast<double>(grid.counts[s][m]);
    }
  return mape_from_totals(pred, act);
}

KsResult ks_exponential(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_exponential: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = samples[i] > 0.0 ? -std::expm1(-samples[i]) : 0.0;
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

std::vector<ResidualResult> residual_diagnostics(const PointProcessModel& model, const EventSequence& seq) {
  const auto terms = model.likelihood_terms(seq);
  const auto events = seq.events();
  const std::size_t M = seq.num_marks();
  std::vector<ResidualResult> out(M);
  std::vector<double> cumulative(M, 0.0), last(M, 0.0);
  std::vector<bool> seen(M, false);
  for (std::size_t m = 0; m < M; ++m) out[m].mark = m;
  for (std::size_t k = 0; k < terms.num_events(); ++k) {
    for (std::size_t m = 0; m < M; ++m) cumulative[m] += terms.increments(k, m);
    const std::size_t mk = events[terms.first + k].mark;
    ++out[mk].events;
    if (seen[mk]) out[mk].residuals.push_back(cumulative[mk] - last[mk]);
    seen[mk] = true;
    last[mk] = cumulative[mk];
  }
  for (auto& r : out) {
    r.sufficient = r.events >= kMinResidualEvents;
    if (!r.sufficient) continue;
    r.ks = ks_exponential(r.residuals);
    r.pass_1pct = r.ks.p_value >= 0.01;
    r.pass_5pct = r.ks.p_value >= 0.05;
  }
  return out;
}

EvaluationReport evaluate(const PointProcessModel& model, const EventSequence& seq, double width,
                          bool with_residuals) {
  EvaluationReport report;
  report.model_type = std::string(model.model_type());
  report.width = width;
  report.window_start = seq.start();
  report.window_end = seq.horizon();
  report.nll = test_nll(model, seq);
  report.mape = mape(model, seq, width);
  for (std::size_t m : report.mape.excluded)
    report.warnings.push_back("dimension " + std::to_string(m) + " has no events in the window; excluded from MAPE");
  if (report.nll.floored > 0)
    report.warnings.push_back(std::to_string(report.nll.floored) + " events scored at the intensity floor 1e-10");
  if (with_residuals) report.residuals = residual_diagnostics(model, seq);
  return report;
}

nlohmann::json EvaluationReport::to_json(std::span<const std::string> mark_labels) const {
  auto nullable = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json per_dim = nlohmann::json::array();
  for (double v : mape.per_dimension) per_dim.push_back(nullable(v));
  nlohmann::json residual_json = nlohmann::json::array();
  for (const auto& r : residuals) {
    nlohmann::json e = {{"mark", r.mark}, {"events", r.events}};
    if (r.mark < mark_labels.size()) e["label"] = mark_labels[r.mark];
    if (r.sufficient) {
      e["status"] = "ok";
      e["ks_statistic"] = r.ks.statistic;
      e["p_value"] = r.ks.p_value;
      e["pass_1pct"] = r.pass_1pct;
      e["pass_5pct"] = r.pass_5pct;
    } else {
      e["status"] = "insufficient";
    }
    residual_json.push_back(e);
  }
  return {{"model_type", model_type},
          {"window", {window_start, window_end}},
          {"nll",
           {{"total", nll.total}, {"per_event", nll.per_event}, {"events", nll.num_events}, {"floored", nll.floored}}},
          {"mape",
           {{"per_dimension", per_dim},
            {"mean", nullable(mape.mean)},
            {"stddev", nullable(mape.stddev)},
            {"predicted_totals", mape.predicted},
            {"actual_totals", mape.actual},
            {"excluded", mape.excluded}}},
          {"width", width},
          {"residuals", residual_json},
          {"warnings", warnings}};
}

void EvaluationReport::write_csv_header(std::ostream& out) {
  out << "model_type,window_start,window_end,events,nll_total,nll_per_event,mape_mean,mape_std,width,floored\n";
}

void EvaluationReport::write_csv_row(std::ostream& out) const {
  out << model_type << ',' << number(window_start) << ',' << number(window_end) << ',' << nll.num_events << ','
      << number(nll.total) << ',' << number(nll.per_event) << ',' << number(mape.mean) << ','
      << number(mape.stddev) << ',' << number(width) << ',' << nll.floored << '\n';
}

}  // namespace dhp

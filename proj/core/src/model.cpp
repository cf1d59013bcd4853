#include "dhp/model.hpp"

#include <algorithm>
#include <cmath>

namespace dhp {

namespace {

class GenericTracker final : public IntensityTracker {
 public:
  explicit GenericTracker(const PointProcessModel& model) : model_(model) {}

  void push(const Event& event) override { history_.push_back(event); }
  double intensity(std::size_t mark, double t) const override { return model_.intensity(mark, t, history_); }
  double total_bound(double t, double window) const override {
    return model_.intensity_bound(t, window, history_);
  }
  std::span<const Event> history() const override { return history_; }

 private:
  const PointProcessModel& model_;
  std::vector<Event> history_;
};

}  // namespace

std::vector<double> LikelihoodTerms::event_losses() const {
  const std::size_t n = num_events();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = -log_intensity[k];
    for (double v : increments.row(k)) sum += v;
    out[k] = sum;
  }
  if (n > 0)
    for (double v : increments.row(n)) out[n - 1] += v;
  return out;
}

double LikelihoodTerms::total() const {
  if (num_events() == 0) {
    double sum = 0.0;
    for (double v : increments.row(0)) sum += v;
    return sum;
  }
  double sum = 0.0;
  for (double v : event_losses()) sum += v;
  return sum;
}

LikelihoodTerms PointProcessModel::likelihood_terms(const EventSequence& seq) const {
  if (seq.num_marks() != num_marks()) throw std::invalid_argument("sequence and model disagree on the number of marks");
  const auto events = seq.events();
  const std::size_t M = num_marks();
  LikelihoodTerms terms;
  terms.first = seq.scored_begin();
  const std::size_t n = seq.scored_count();
  terms.log_intensity.resize(n);
  terms.increments = Matrix(n + 1, M);

  double prev = seq.start();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = terms.first + k;
    const auto history = events.first(i);
    const double t = events[i].time;
    const double lambda = intensity(events[i].mark, t, history);
    if (!(lambda > kIntensityFloor)) ++terms.floored;
    terms.log_intensity[k] = std::log(std::max(lambda, kIntensityFloor));
    for (std::size_t m = 0; m < M; ++m) terms.increments(k, m) = compensator(m, prev, t, history);
    prev = t;
  }
  for (std::size_t m = 0; m < M; ++m) terms.increments(n, m) = compensator(m, prev, seq.horizon(), events);
  return terms;
}

Matrix PointProcessModel::predict_counts(std::span<const Event> events, std::span<const double> boundaries) const {
  const std::size_t S = boundaries.size() - 1;
  Matrix out(S, num_marks());
  for (std::size_t s = 0; s < S; ++s) {
    const auto end = std::upper_bound(events.begin(), events.end(), boundaries[s],
                                      [](double t, const Event& e) { return t < e.time; });
    const auto history = events.first(static_cast<std::size_t>(end - events.begin()));
    for (std::size_t m = 0; m < num_marks(); ++m)
      out(s, m) = compensator(m, boundaries[s], boundaries[s + 1], history);
  }
  return out;
}

std::unique_ptr<IntensityTracker> PointProcessModel::tracker() const {
  return std::make_unique<GenericTracker>(*this);
}

void PointProcessModel::initialize_from(const EventSequence&) {}

NllResult negative_log_likelihood(const PointProcessModel& model, const EventSequence& seq) {
  const auto terms = model.likelihood_terms(seq);
  NllResult r;
  r.num_events = terms.num_events();
  r.floored = terms.floored;
  r.event_terms = terms.event_losses();
  r.total = terms.total();
  r.per_event = r.num_events ? r.total / static_cast<double>(r.num_events) : r.total;
  return r;
}

Matrix predict_counts(const PointProcessModel& model, std::span<const Event> events,
                      std::span<const double> boundaries) {
  if (boundaries.size() < 2) throw std::invalid_argument("predict_counts: need at least two boundaries");
  for (std::size_t k = 1; k < boundaries.size(); ++k)
    if (!(boundaries[k] > boundaries[k - 1])) throw std::invalid_argument("predict_counts: unordered boundaries");
  if (boundaries.front() < 0.0) throw std::invalid_argument("predict_counts: boundaries must be >= 0");
  return model.predict_counts(events, boundaries);
}

std::vector<double> empirical_rates(const EventSequence& seq) {
  std::vector<double> rates(seq.num_marks(), 0.0);
  for (const auto& e : seq.scored()) rates[e.mark] += 1.0;
  const double span = seq.horizon() - seq.start();
  for (auto& r : rates) r /= span;
  return rates;
}

}  // namespace dhp

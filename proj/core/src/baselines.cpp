#include "dhp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dhp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double normal_pdf(double z) {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Upper tail 1 − Φ(z).
double normal_q(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Φ(hi) − Φ(lo) without cancellation in either tail.
double normal_mass(double lo, double hi) {
  if (lo > 0.0) return normal_q(lo) - normal_q(hi);
  return normal_q(-hi) - normal_q(-lo);
}

std::size_t count_mark(std::span<const Event> history, std::size_t m) {
  return static_cast<std::size_t>(
      std::count_if(history.begin(), history.end(), [m](const Event& e) { return e.mark == m; }));
}

class CountingTracker final : public IntensityTracker {
 public:
  explicit CountingTracker(const CountingModel& model) : model_(model), counts_(model.num_marks(), 0) {}

  void push(const Event& e) override {
    history_.push_back(e);
    ++counts_.at(e.mark);
  }
  double intensity(std::size_t m, double t) const override {
    return std::exp(model_.log_intensity(m, t, counts_[m]).value);
  }
  double total_bound(double t, double window) const override {
    double total = 0.0;
    for (std::size_t m = 0; m < counts_.size(); ++m) total += model_.max_intensity(m, t, t + window, counts_[m]);
    return total;
  }
  std::span<const Event> history() const override { return history_; }

 private:
  const CountingModel& model_;
  std::vector<std::size_t> counts_;
  std::vector<Event> history_;
};

}  // namespace

// ---------------------------------------------------------------------------
// HawkesModel

HawkesModel::HawkesModel(std::size_t num_marks, KernelSpec kernel, bool pairwise_decay)
    : ExcitationModel(num_marks, kernel, pairwise_decay) {}

void HawkesModel::transform(std::size_t, std::span<const double> times, std::span<double> F,
                            std::span<double> f) const {
  std::copy(times.begin(), times.end(), F.begin());
  std::fill(f.begin(), f.end(), 1.0);
}

nlohmann::json HawkesModel::describe() const { return excitation_describe(); }

nlohmann::json HawkesModel::to_json() const {
  return {{"model_type", "hawkes"},
          {"meta",
           {{"kernel", std::string(to_string(kernel().family))},
            {"power", kernel().power},
            {"M", num_marks()},
            {"pairwise_decay", pairwise_decay()}}},
          {"params", excitation_params_json()}};
}

HawkesModel HawkesModel::from_json(const nlohmann::json& j) {
  const auto& meta = j.at("meta");
  KernelSpec kernel{parse_kernel_family(meta.at("kernel").get<std::string>()), meta.value("power", 2.0)};
  HawkesModel model(meta.at("M").get<std::size_t>(), kernel, meta.value("pairwise_decay", false));
  model.load_excitation_params(j.at("params"));
  return model;
}

// ---------------------------------------------------------------------------
// CountingModel

CountingModel::CountingModel(std::size_t num_marks, std::vector<std::string> labels,
                             std::vector<double> raw_per_mark)
    : num_marks_(num_marks), per_mark_(labels.size()), labels_(std::move(labels)) {
  if (num_marks_ == 0) throw std::invalid_argument("model needs at least one mark");
  if (per_mark_ > kMaxParams || raw_per_mark.size() != per_mark_)
    throw std::logic_error("counting model parameter layout mismatch");
  for (std::size_t m = 0; m < num_marks_; ++m) raw_.insert(raw_.end(), raw_per_mark.begin(), raw_per_mark.end());
}

void CountingModel::set_parameters(std::span<const double> raw) {
  if (raw.size() != raw_.size()) throw std::invalid_argument("parameter vector has the wrong size");
  std::copy(raw.begin(), raw.end(), raw_.begin());
}

std::vector<std::string> CountingModel::parameter_names() const {
  std::vector<std::string> names;
  for (std::size_t m = 0; m < num_marks_; ++m)
    for (const auto& l : labels_) names.push_back(l + "." + std::to_string(m));
  return names;
}

double CountingModel::intensity(std::size_t mark, double t, std::span<const Event> history) const {
  if (mark >= num_marks_) throw std::out_of_range("mark out of range");
  return std::exp(log_intensity(mark, t, count_mark(history, mark)).value);
}

double CountingModel::compensator(std::size_t mark, double a, double b, std::span<const Event> history) const {
  if (mark >= num_marks_) throw std::out_of_range("mark out of range");
  if (!(a <= b)) throw std::invalid_argument("compensator: need a <= b");
  return segment(mark, a, b, count_mark(history, mark)).value;
}

double CountingModel::intensity_bound(double t, double window, std::span<const Event> history) const {
  CountingTracker tr(*this);
  for (const auto& e : history) tr.push(e);
  return tr.total_bound(t, window);
}

std::unique_ptr<IntensityTracker> CountingModel::tracker() const { return std::make_unique<CountingTracker>(*this); }

template <bool WithGrad>
double CountingModel::batch_loss(const EventSequence& seq, std::span<const std::size_t> batch,
                                 std::span<double> grad, LikelihoodTerms* terms) const {
  if (seq.num_marks() != num_marks_) throw std::invalid_argument("sequence and model disagree on the number of marks");
  const auto events = seq.events();
  const std::size_t M = num_marks_;
  const std::size_t first = seq.scored_begin();
  const std::size_t last = events.size() - 1;
  std::size_t needed = first;
  for (std::size_t i : batch) {
    if (i < first || i >= events.size()) throw std::out_of_range("batch index outside the scored window");
    needed = std::max(needed, i + 1);
  }
  // counts(k, m): mark-m events among events[0, k).
  Matrix counts(needed + 1, M);
  for (std::size_t k = 0; k < needed; ++k) {
    for (std::size_t m = 0; m < M; ++m) counts(k + 1, m) = counts(k, m);
    counts(k + 1, events[k].mark) += 1.0;
  }
  auto n_at = [&](std::size_t k, std::size_t m) { return static_cast<std::size_t>(counts(k, m)); };

  auto add_grad = [&](std::size_t m, const Piece& p, double w) {
    if constexpr (WithGrad)
      for (std::size_t k = 0; k < per_mark_; ++k) grad[m * per_mark_ + k] += w * p.d[k];
  };

  double loss = 0.0;
  for (std::size_t i : batch) {
    const std::size_t mi = events[i].mark;
    const auto li = log_intensity(mi, events[i].time, n_at(i, mi));
    const bool floored = !(li.value > std::log(kIntensityFloor));
    const double log_lambda = floored ? std::log(kIntensityFloor) : li.value;
    loss -= log_lambda;
    if (!floored) add_grad(mi, li, -1.0);
    if (terms) {
      terms->log_intensity[i - first] = log_lambda;
      if (floored) ++terms->floored;
    }
    const double a = i == first ? seq.start() : events[i - 1].time;
    for (std::size_t m = 0; m < M; ++m) {
      const auto s = segment(m, a, events[i].time, n_at(i, m));
      loss += s.value;
      add_grad(m, s, 1.0);
      if (terms) terms->increments(i - first, m) = s.value;
    }
    if (i == last) {
      for (std::size_t m = 0; m < M; ++m) {
        const auto s = segment(m, events[i].time, seq.horizon(), n_at(i + 1, m));
        loss += s.value;
        add_grad(m, s, 1.0);
        if (terms) terms->increments(i - first + 1, m) = s.value;
      }
    }
  }
  if (terms && batch.empty()) {
    for (std::size_t m = 0; m < M; ++m) {
      const auto s = segment(m, seq.start(), seq.horizon(), n_at(first, m));
      loss += s.value;
      terms->increments(0, m) = s.value;
    }
  }
  return loss;
}

LikelihoodTerms CountingModel::likelihood_terms(const EventSequence& seq) const {
  LikelihoodTerms terms;
  terms.first = seq.scored_begin();
  const std::size_t n = seq.scored_count();
  terms.log_intensity.assign(n, 0.0);
  terms.increments = Matrix(n + 1, num_marks_);
  std::vector<std::size_t> batch(n);
  for (std::size_t k = 0; k < n; ++k) batch[k] = terms.first + k;
  batch_loss<false>(seq, batch, {}, &terms);
  return terms;
}

double CountingModel::loss_and_gradient(const EventSequence& seq, std::span<const std::size_t> batch,
                                        std::span<double> grad) const {
  if (grad.empty()) return batch_loss<false>(seq, batch, grad, nullptr);
  if (grad.size() != raw_.size()) throw std::invalid_argument("gradient buffer has the wrong size");
  return batch_loss<true>(seq, batch, grad, nullptr);
}

nlohmann::json CountingModel::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t m = 0; m < num_marks_; ++m)
    rows.push_back(std::vector<double>(raw_.begin() + static_cast<std::ptrdiff_t>(m * per_mark_),
                                       raw_.begin() + static_cast<std::ptrdiff_t>((m + 1) * per_mark_)));
  return {{"model_type", std::string(model_type())},
          {"meta", {{"M", num_marks_}, {"parameters", labels_}}},
          {"params", {{"raw", rows}}}};
}

void CountingModel::load_raw(const nlohmann::json& j) {
  const auto rows = j.at("params").at("raw").get<std::vector<std::vector<double>>>();
  if (rows.size() != num_marks_) throw Error("checkpoint: raw parameters have the wrong shape");
  for (std::size_t m = 0; m < num_marks_; ++m) {
    if (rows[m].size() != per_mark_) throw Error("checkpoint: raw parameters have the wrong shape");
    for (std::size_t k = 0; k < per_mark_; ++k) set_raw(m, k, rows[m][k]);
  }
}

// ---------------------------------------------------------------------------
// HppModel

HppModel::HppModel(std::size_t num_marks, double rate)
    : CountingModel(num_marks, {"rate"}, {softplus_inverse(rate)}) {}

double HppModel::rate(std::size_t m) const { return softplus(raw(m, 0)); }

void HppModel::set_rates(std::span<const double> rates) {
  if (rates.size() != num_marks()) throw std::invalid_argument("need one rate per mark");
  for (std::size_t m = 0; m < rates.size(); ++m) set_raw(m, 0, softplus_inverse(rates[m]));
}

CountingModel::Piece HppModel::log_intensity(std::size_t m, double, std::size_t) const {
  const double r = rate(m);
  return {std::log(r), {sigmoid(raw(m, 0)) / r}};
}

CountingModel::Piece HppModel::segment(std::size_t m, double a, double b, std::size_t) const {
  return {rate(m) * (b - a), {(b - a) * sigmoid(raw(m, 0))}};
}

double HppModel::max_intensity(std::size_t m, double, double, std::size_t) const { return rate(m); }

void HppModel::initialize_from(const EventSequence& train) {
  if (train.scored_count() == 0) throw Error("empty training data");
  const auto rates = empirical_rates(train);
  for (std::size_t m = 0; m < num_marks(); ++m) set_raw(m, 0, softplus_inverse(std::max(rates[m], 1e-9)));
}

nlohmann::json HppModel::describe() const {
  std::vector<double> r(num_marks());
  for (std::size_t m = 0; m < r.size(); ++m) r[m] = rate(m);
  return {{"rate", r}};
}

HppModel HppModel::from_json(const nlohmann::json& j) {
  HppModel model(j.at("meta").at("M").get<std::size_t>());
  model.load_raw(j);
  return model;
}

// ---------------------------------------------------------------------------
// RppModel

RppModel::RppModel(std::size_t num_marks) : CountingModel(num_marks, {"alpha", "beta"}, {0.0, softplus_inverse(1.0)}) {}

double RppModel::beta(std::size_t m) const { return softplus(raw(m, 1)); }

void RppModel::set_params(std::size_t m, double alpha, double beta) {
  set_raw(m, 0, alpha);
  set_raw(m, 1, softplus_inverse(beta));
}

CountingModel::Piece RppModel::log_intensity(std::size_t m, double t, std::size_t n) const {
  if (n == 0 || !(t > 0.0)) return {kNegInf, {}};
  const double a = alpha(m), b = beta(m);
  const double r = std::log(t) - a;
  const double value = std::log(static_cast<double>(n)) - r * r / (2.0 * b * b) -
                       std::log(std::sqrt(2.0 * std::numbers::pi) * b * t);
  return {value, {r / (b * b), (r * r / (b * b * b) - 1.0 / b) * sigmoid(raw(m, 1))}};
}

CountingModel::Piece RppModel::segment(std::size_t m, double a, double b, std::size_t n) const {
  if (n == 0 || !(b > a)) return {};
  const double al = alpha(m), be = beta(m);
  auto z = [&](double t) { return t > 0.0 ? (std::log(t) - al) / be : -std::numeric_limits<double>::infinity(); };
  const double za = z(a), zb = z(b);
  const double nn = static_cast<double>(n);
  const double pa = normal_pdf(za), pb = normal_pdf(zb);
  const double za_pa = std::isinf(za) ? 0.0 : za * pa;
  const double zb_pb = std::isinf(zb) ? 0.0 : zb * pb;
  return {nn * normal_mass(za, zb),
          {nn * (pa - pb) / be, nn * (za_pa - zb_pb) / be * sigmoid(raw(m, 1))}};
}

double RppModel::max_intensity(std::size_t m, double a, double b, std::size_t n) const {
  if (n == 0) return 0.0;
  const double mode = std::exp(alpha(m) - beta(m) * beta(m));
  const double t = std::clamp(mode, a, b);
  if (!(t > 0.0)) return 0.0;
  return std::exp(log_intensity(m, t, n).value);
}

void RppModel::initialize_from(const EventSequence& train) {
  if (train.scored_count() == 0) throw Error("empty training data");
  for (std::size_t m = 0; m < num_marks(); ++m) {
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (const auto& e : train.scored()) {
      if (e.mark != m || !(e.time > 0.0)) continue;
      const double l = std::log(e.time);
      sum += l;
      sq += l * l;
      ++n;
    }
    const double mean = n ? sum / static_cast<double>(n) : std::log(std::max(train.horizon(), 1e-9));
    const double var = n > 1 ? sq / static_cast<double>(n) - mean * mean : 1.0;
    set_params(m, mean, std::max(std::sqrt(std::max(var, 0.0)), 0.1));
  }
}

nlohmann::json RppModel::describe() const {
  std::vector<double> a(num_marks()), b(num_marks());
  for (std::size_t m = 0; m < a.size(); ++m) a[m] = alpha(m), b[m] = beta(m);
  return {{"alpha", a}, {"beta", b}, {"note", "intensity is zero before the first event of a mark; floored at 1e-10"}};
}

RppModel RppModel::from_json(const nlohmann::json& j) {
  RppModel model(j.at("meta").at("M").get<std::size_t>());
  model.load_raw(j);
  return model;
}

// ---------------------------------------------------------------------------
// SelfCorrectingModel

SelfCorrectingModel::SelfCorrectingModel(std::size_t num_marks)
    : CountingModel(num_marks, {"alpha", "beta", "rho"}, {0.0, softplus_inverse(0.1), softplus_inverse(1.0)}) {}

double SelfCorrectingModel::beta(std::size_t m) const { return softplus(raw(m, 1)); }
double SelfCorrectingModel::rho(std::size_t m) const { return softplus(raw(m, 2)); }

void SelfCorrectingModel::set_params(std::size_t m, double alpha, double beta, double rho) {
  set_raw(m, 0, alpha);
  set_raw(m, 1, softplus_inverse(beta));
  set_raw(m, 2, softplus_inverse(rho));
}

CountingModel::Piece SelfCorrectingModel::log_intensity(std::size_t m, double t, std::size_t n) const {
  const double b = beta(m), r = rho(m), nn = static_cast<double>(n);
  return {alpha(m) + b * (t - r * nn), {1.0, (t - r * nn) * sigmoid(raw(m, 1)), -b * nn * sigmoid(raw(m, 2))}};
}

CountingModel::Piece SelfCorrectingModel::segment(std::size_t m, double a, double b, std::size_t n) const {
  if (!(b > a)) return {};
  const double be = beta(m), r = rho(m), nn = static_cast<double>(n);
  const double D = b - a;
  const double h = -std::expm1(-be * D);  // 1 − e^{−βD}
  const double shift = b - r * nn;
  const double value = std::exp(alpha(m) + be * shift + std::log(h) - std::log(be));
  // d/dβ of log Λ: shift + D e^{−βD}/h − 1/β.
  const double dlog_beta = shift + D * std::exp(-be * D) / h - 1.0 / be;
  return {value, {value, value * dlog_beta * sigmoid(raw(m, 1)), -value * be * nn * sigmoid(raw(m, 2))}};
}

double SelfCorrectingModel::max_intensity(std::size_t m, double, double b, std::size_t n) const {
  return std::exp(log_intensity(m, b, n).value);
}

void SelfCorrectingModel::initialize_from(const EventSequence& train) {
  if (train.scored_count() == 0) throw Error("empty training data");
  const auto rates = empirical_rates(train);
  for (std::size_t m = 0; m < num_marks(); ++m) {
    const double r = std::max(rates[m], 1e-9);
    set_params(m, std::log(r), r, 1.0 / r);
  }
}

nlohmann::json SelfCorrectingModel::describe() const {
  std::vector<double> a(num_marks()), b(num_marks()), r(num_marks());
  for (std::size_t m = 0; m < a.size(); ++m) a[m] = alpha(m), b[m] = beta(m), r[m] = rho(m);
  return {{"alpha", a}, {"beta", b}, {"rho", r}};
}

SelfCorrectingModel SelfCorrectingModel::from_json(const nlohmann::json& j) {
  SelfCorrectingModel model(j.at("meta").at("M").get<std::size_t>());
  model.load_raw(j);
  return model;
}

}  // namespace dhp

#include "dhp/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dhp {

namespace {

constexpr double kTailExponent = 40.0;

double raw_from_value(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("parameter values must be finite and >= 0");
  return v == 0.0 ? -1000.0 : softplus_inverse(v);
}

std::vector<double> constrained(const std::vector<double>& raw) {
  std::vector<double> out(raw.size());
  std::transform(raw.begin(), raw.end(), out.begin(), [](double r) { return softplus(r); });
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tracker

class ExcitationTracker final : public IntensityTracker {
 public:
  explicit ExcitationTracker(const ExcitationModel& model)
      : model_(model), M_(model.num_marks()), transformed_(M_) {
    for (std::size_t m = 0; m < M_; ++m) cut_.push_back(model.cutoff(m));
  }

  void push(const Event& e) override {
    history_.push_back(e);
    for (std::size_t m = 0; m < M_; ++m) transformed_[m].push_back(point(m, e.time).first);
  }

  double intensity(std::size_t m, double t) const override {
    const auto [F, f] = point(m, t);
    double sum = 0.0;
    for (std::size_t j = history_.size(); j-- > 0;) {
      const double d = std::max(0.0, F - transformed_[m][j]);
      if (d > cut_[m]) break;
      sum += kernel_value(model_.kernel(), model_.kernel_params(m, history_[j].mark), d);
    }
    return model_.mu(m) + f * sum;
  }

  double total_bound(double t, double window) const override {
    double total = 0.0;
    for (std::size_t m = 0; m < M_; ++m) {
      total += model_.mu(m);
      if (history_.empty()) continue;
      const double Fa = point(m, t).first;
      const double Fb = point(m, t + window).first;
      double sum = 0.0;
      for (std::size_t j = history_.size(); j-- > 0;) {
        const double lo = std::max(0.0, Fa - transformed_[m][j]);
        if (lo > cut_[m]) break;
        const double hi = std::max(lo, Fb - transformed_[m][j]);
        sum += kernel_max(model_.kernel(), model_.kernel_params(m, history_[j].mark), lo, hi);
      }
      if (sum > 0.0) total += model_.derivative_bound(m, t, t + window) * sum;
    }
    return total;
  }

  std::span<const Event> history() const override { return history_; }

 private:
  std::pair<double, double> point(std::size_t m, double t) const {
    double F = 0.0, f = 0.0;
    model_.transform(m, std::span<const double>(&t, 1), std::span<double>(&F, 1), std::span<double>(&f, 1));
    return {F, f};
  }

  const ExcitationModel& model_;
  std::size_t M_;
  std::vector<Event> history_;
  std::vector<std::vector<double>> transformed_;
  std::vector<double> cut_;
};

// ---------------------------------------------------------------------------
// Parameters

ExcitationModel::ExcitationModel(std::size_t num_marks, KernelSpec kernel, bool pairwise_decay)
    : num_marks_(num_marks),
      kernel_(kernel),
      pairwise_decay_(pairwise_decay),
      mu_raw_(num_marks, softplus_inverse(0.1)),
      alpha_raw_(num_marks * num_marks, softplus_inverse(0.1)),
      beta_raw_(pairwise_decay ? num_marks * num_marks : num_marks, softplus_inverse(1.0)) {
  if (num_marks_ == 0) throw std::invalid_argument("model needs at least one mark");
  kernel_.validate();
}

double ExcitationModel::mu(std::size_t m) const { return softplus(mu_raw_.at(m)); }

double ExcitationModel::alpha(std::size_t m, std::size_t source) const {
  return softplus(alpha_raw_.at(m * num_marks_ + source));
}

double ExcitationModel::beta(std::size_t m, std::size_t source) const {
  return softplus(beta_raw_.at(beta_index(m, source)));
}

void ExcitationModel::set_mu(std::span<const double> mu) {
  if (mu.size() != num_marks_) throw std::invalid_argument("mu must have one entry per mark");
  for (std::size_t m = 0; m < num_marks_; ++m) mu_raw_[m] = raw_from_value(mu[m]);
}

void ExcitationModel::set_alpha(const Matrix& alpha) {
  if (alpha.rows() != num_marks_ || alpha.cols() != num_marks_)
    throw std::invalid_argument("interaction matrix must be M x M");
  for (std::size_t k = 0; k < alpha_raw_.size(); ++k) alpha_raw_[k] = raw_from_value(alpha.data()[k]);
}

void ExcitationModel::set_beta(std::span<const double> beta) {
  if (beta.size() != beta_raw_.size())
    throw std::invalid_argument("beta must have " + std::to_string(beta_raw_.size()) + " entries");
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (!(beta[k] > 0.0)) throw std::invalid_argument("beta must be > 0");
    beta_raw_[k] = softplus_inverse(beta[k]);
  }
}

double ExcitationModel::cutoff(std::size_t m) const {
  if (kernel_.family == KernelFamily::PowerLaw) return std::numeric_limits<double>::infinity();
  double b = beta(m, 0);
  if (pairwise_decay_)
    for (std::size_t s = 1; s < num_marks_; ++s) b = std::min(b, beta(m, s));
  if (kernel_.family == KernelFamily::Exponential) return kTailExponent / b;
  return std::sqrt(kTailExponent / b);
}

std::vector<double> ExcitationModel::parameters() const {
  std::vector<double> out;
  out.reserve(core_parameter_count());
  out.insert(out.end(), mu_raw_.begin(), mu_raw_.end());
  out.insert(out.end(), alpha_raw_.begin(), alpha_raw_.end());
  out.insert(out.end(), beta_raw_.begin(), beta_raw_.end());
  const auto extra = transform_parameters();
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

void ExcitationModel::set_parameters(std::span<const double> raw) {
  const std::size_t core = core_parameter_count();
  if (raw.size() < core) throw std::invalid_argument("parameter vector too short");
  auto it = raw.begin();
  std::copy(it, it + static_cast<std::ptrdiff_t>(mu_raw_.size()), mu_raw_.begin());
  it += static_cast<std::ptrdiff_t>(mu_raw_.size());
  std::copy(it, it + static_cast<std::ptrdiff_t>(alpha_raw_.size()), alpha_raw_.begin());
  it += static_cast<std::ptrdiff_t>(alpha_raw_.size());
  std::copy(it, it + static_cast<std::ptrdiff_t>(beta_raw_.size()), beta_raw_.begin());
  set_transform_parameters(raw.subspan(core));
}

void ExcitationModel::set_transform_parameters(std::span<const double> raw) {
  if (!raw.empty()) throw std::invalid_argument("parameter vector too long");
}

std::vector<std::string> ExcitationModel::parameter_names() const {
  std::vector<std::string> names;
  for (std::size_t m = 0; m < num_marks_; ++m) names.push_back("mu." + std::to_string(m));
  for (std::size_t m = 0; m < num_marks_; ++m)
    for (std::size_t s = 0; s < num_marks_; ++s)
      names.push_back("alpha." + std::to_string(m) + "." + std::to_string(s));
  for (std::size_t k = 0; k < beta_raw_.size(); ++k)
    names.push_back(pairwise_decay_ ? "beta." + std::to_string(k / num_marks_) + "." + std::to_string(k % num_marks_)
                                    : "beta." + std::to_string(k));
  const auto extra = transform_parameter_names();
  names.insert(names.end(), extra.begin(), extra.end());
  return names;
}

void ExcitationModel::transform_gradient(std::size_t, std::span<const double>, std::span<const double>,
                                         std::span<const double>, std::span<double>) const {}

double ExcitationModel::branching_ratio() const {
  double worst = 0.0;
  for (std::size_t m = 0; m < num_marks_; ++m) {
    double row = 0.0;
    for (std::size_t s = 0; s < num_marks_; ++s) row += kernel_mass(kernel_, kernel_params(m, s));
    worst = std::max(worst, row);
  }
  return worst;
}

void ExcitationModel::initialize_from(const EventSequence& train) {
  if (train.scored_count() == 0) throw Error("empty training data");
  const auto rates = empirical_rates(train);
  double total = 0.0;
  for (double r : rates) total += r;
  const double floor_rate = 1e-3 * total / static_cast<double>(num_marks_);
  std::vector<double> mu(num_marks_);
  for (std::size_t m = 0; m < num_marks_; ++m) mu[m] = std::max(0.5 * rates[m], floor_rate);
  set_mu(mu);

  const double mass = 0.5 / static_cast<double>(num_marks_);
  const double n = static_cast<double>(train.scored_count());
  const double ends[2] = {train.start(), train.horizon()};
  for (std::size_t m = 0; m < num_marks_; ++m) {
    double F[2], f[2];
    transform(m, ends, F, f);
    const double gap = std::max((F[1] - F[0]) / n, 1e-12);
    double a = 0.0, b = 0.0;
    switch (kernel_.family) {
      case KernelFamily::Exponential: b = 1.0 / gap; a = mass * b; break;
      case KernelFamily::Rayleigh: b = 1.0 / (gap * gap); a = 2.0 * mass * b; break;
      case KernelFamily::PowerLaw:
        a = std::pow(1.0 / (kernel_.power * mass), 1.0 / (kernel_.power - 1.0));
        b = a / gap;
        break;
    }
    for (std::size_t s = 0; s < num_marks_; ++s) {
      alpha_raw_[m * num_marks_ + s] = softplus_inverse(a);
      beta_raw_[beta_index(m, s)] = softplus_inverse(b);
    }
  }
}

// ---------------------------------------------------------------------------
// Pointwise queries

double ExcitationModel::intensity(std::size_t m, double t, std::span<const Event> history) const {
  if (m >= num_marks_) throw std::out_of_range("mark out of range");
  std::vector<double> times(history.size() + 1), F(times.size()), f(times.size());
  for (std::size_t j = 0; j < history.size(); ++j) times[j] = history[j].time;
  times.back() = t;
  transform(m, times, F, f);
  const double cut = cutoff(m);
  double sum = 0.0;
  for (std::size_t j = history.size(); j-- > 0;) {
    const double d = std::max(0.0, F.back() - F[j]);
    if (d > cut) break;
    sum += kernel_value(kernel_, kernel_params(m, history[j].mark), d);
  }
  return mu(m) + f.back() * sum;
}

double ExcitationModel::compensator(std::size_t m, double a, double b, std::span<const Event> history) const {
  if (m >= num_marks_) throw std::out_of_range("mark out of range");
  if (!(a <= b)) throw std::invalid_argument("compensator: need a <= b");
  std::vector<double> times(history.size() + 2), F(times.size()), f(times.size());
  for (std::size_t j = 0; j < history.size(); ++j) times[j] = history[j].time;
  const std::size_t pa = history.size(), pb = pa + 1;
  times[pa] = a;
  times[pb] = b;
  transform(m, times, F, f);
  const double cut = cutoff(m);
  double sum = 0.0;
  for (std::size_t j = history.size(); j-- > 0;) {
    const double lo = std::max(0.0, F[pa] - F[j]);
    if (lo > cut) break;
    sum += kernel_integral(kernel_, kernel_params(m, history[j].mark), lo, std::max(lo, F[pb] - F[j]));
  }
  return mu(m) * (b - a) + sum;
}

double ExcitationModel::intensity_bound(double t, double window, std::span<const Event> history) const {
  ExcitationTracker tr(*this);
  for (const auto& e : history) tr.push(e);
  return tr.total_bound(t, window);
}

std::unique_ptr<IntensityTracker> ExcitationModel::tracker() const {
  return std::make_unique<ExcitationTracker>(*this);
}

Matrix ExcitationModel::predict_counts(std::span<const Event> events, std::span<const double> boundaries) const {
  const std::size_t S = boundaries.size() - 1;
  const std::size_t M = num_marks_;
  const auto last = std::upper_bound(events.begin(), events.end(), boundaries[S - 1],
                                     [](double t, const Event& e) { return t < e.time; });
  const std::size_t N = static_cast<std::size_t>(last - events.begin());
  std::vector<double> times(N + S + 1);
  for (std::size_t j = 0; j < N; ++j) times[j] = events[j].time;
  std::copy(boundaries.begin(), boundaries.end(), times.begin() + static_cast<std::ptrdiff_t>(N));

  Matrix out(S, M);
  std::vector<double> F(times.size()), f(times.size());
  for (std::size_t m = 0; m < M; ++m) {
    transform(m, times, F, f);
    const double cut = cutoff(m);
    const double mu_m = mu(m);
    std::size_t h = 0;
    for (std::size_t s = 0; s < S; ++s) {
      while (h < N && events[h].time <= boundaries[s]) ++h;
      const double Fa = F[N + s], Fb = F[N + s + 1];
      double sum = 0.0;
      for (std::size_t j = h; j-- > 0;) {
        const double lo = std::max(0.0, Fa - F[j]);
        if (lo > cut) break;
        sum += kernel_integral(kernel_, kernel_params(m, events[j].mark), lo, std::max(lo, Fb - F[j]));
      }
      out(s, m) = mu_m * (boundaries[s + 1] - boundaries[s]) + sum;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Likelihood and gradient

template <bool WithGrad>
double ExcitationModel::batch_loss(const EventSequence& seq, std::span<const std::size_t> batch,
                                   std::span<double> grad, LikelihoodTerms* terms) const {
  if (seq.num_marks() != num_marks_) throw std::invalid_argument("sequence and model disagree on the number of marks");
  const auto events = seq.events();
  const std::size_t M = num_marks_;
  const std::size_t first = seq.scored_begin();
  const std::size_t last = events.size() - 1;
  std::size_t needed = 0;
  bool with_tail = terms != nullptr;
  for (std::size_t i : batch) {
    if (i < first || i >= events.size()) throw std::out_of_range("batch index outside the scored window");
    needed = std::max(needed, i + 1);
    with_tail = with_tail || i == last;
  }
  if (batch.empty() && !terms) return 0.0;

  // Points: events [0, needed), then the window start and the horizon.
  const std::size_t P_start = needed, P_end = needed + 1;
  std::vector<double> times(needed + 2);
  for (std::size_t k = 0; k < needed; ++k) times[k] = events[k].time;
  times[P_start] = seq.start();
  times[P_end] = seq.horizon();
  Matrix F(M, times.size()), f(M, times.size());
  for (std::size_t m = 0; m < M; ++m) transform(m, times, F.row(m), f.row(m));

  const auto mu_v = constrained(mu_raw_);
  const auto alpha_v = constrained(alpha_raw_);
  const auto beta_v = constrained(beta_raw_);
  std::vector<double> cut(M);
  for (std::size_t m = 0; m < M; ++m) cut[m] = cutoff(m);
  auto params = [&](std::size_t m, std::size_t s) {
    return KernelParams{alpha_v[m * M + s], beta_v[beta_index(m, s)]};
  };

  std::vector<double> g_mu, g_alpha, g_beta;
  Matrix adj_F, adj_f;
  if constexpr (WithGrad) {
    g_mu.assign(M, 0.0);
    g_alpha.assign(alpha_v.size(), 0.0);
    g_beta.assign(beta_v.size(), 0.0);
    adj_F = Matrix(M, times.size());
    adj_f = Matrix(M, times.size());
  }

  // Compensator of mark m between points p and q given history [0, hist_end).
  auto segment = [&](std::size_t m, std::size_t p, std::size_t q, std::size_t hist_end) {
    const double Fp = F(m, p), Fq = F(m, q);
    double value = mu_v[m] * (times[q] - times[p]);
    if constexpr (WithGrad) g_mu[m] += times[q] - times[p];
    for (std::size_t j = hist_end; j-- > 0;) {
      const double lo = std::max(0.0, Fp - F(m, j));
      if (lo > cut[m]) break;
      const double hi = std::max(lo, Fq - F(m, j));
      const std::size_t s = events[j].mark;
      if constexpr (WithGrad) {
        const auto kg = kernel_integral_grad(kernel_, params(m, s), lo, hi);
        value += kg.value;
        g_alpha[m * M + s] += kg.d_alpha;
        g_beta[beta_index(m, s)] += kg.d_beta;
        adj_F(m, p) += kg.d_lower;
        adj_F(m, q) += kg.d_upper;
        adj_F(m, j) -= kg.d_lower + kg.d_upper;
      } else {
        value += kernel_integral(kernel_, params(m, s), lo, hi);
      }
    }
    return value;
  };

  double loss = 0.0;
  for (std::size_t i : batch) {
    const std::size_t mi = events[i].mark;
    const double Fi = F(mi, i);
    double excitation = 0.0;
    for (std::size_t j = i; j-- > 0;) {
      const double d = std::max(0.0, Fi - F(mi, j));
      if (d > cut[mi]) break;
      excitation += kernel_value(kernel_, params(mi, events[j].mark), d);
    }
    const double lambda = mu_v[mi] + f(mi, i) * excitation;
    const bool floored = !(lambda > kIntensityFloor);
    const double log_lambda = std::log(std::max(lambda, kIntensityFloor));
    loss -= log_lambda;
    if (terms) {
      terms->log_intensity[i - first] = log_lambda;
      if (floored) ++terms->floored;
    }

    if constexpr (WithGrad) {
      if (!floored) {
        const double w = -1.0 / lambda;
        const double wf = w * f(mi, i);
        g_mu[mi] += w;
        adj_f(mi, i) += w * excitation;
        for (std::size_t j = i; j-- > 0;) {
          const double d = std::max(0.0, Fi - F(mi, j));
          if (d > cut[mi]) break;
          const std::size_t s = events[j].mark;
          const auto kg = kernel_value_grad(kernel_, params(mi, s), d);
          g_alpha[mi * M + s] += wf * kg.d_alpha;
          g_beta[beta_index(mi, s)] += wf * kg.d_beta;
          adj_F(mi, i) += wf * kg.d_delta;
          adj_F(mi, j) -= wf * kg.d_delta;
        }
      }
    }

    const std::size_t p = i == first ? P_start : i - 1;
    for (std::size_t m = 0; m < M; ++m) {
      const double inc = segment(m, p, i, i);
      loss += inc;
      if (terms) terms->increments(i - first, m) = inc;
    }
    if (i == last) {
      for (std::size_t m = 0; m < M; ++m) {
        const double inc = segment(m, i, P_end, i + 1);
        loss += inc;
        if (terms) terms->increments(i - first + 1, m) = inc;
      }
    }
  }
  if (terms && batch.empty()) {
    for (std::size_t m = 0; m < M; ++m) {
      const double inc = segment(m, P_start, P_end, first);
      loss += inc;
      terms->increments(0, m) = inc;
    }
  }

  if constexpr (WithGrad) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < M; ++k) grad[off + k] += g_mu[k] * sigmoid(mu_raw_[k]);
    off += M;
    for (std::size_t k = 0; k < g_alpha.size(); ++k) grad[off + k] += g_alpha[k] * sigmoid(alpha_raw_[k]);
    off += g_alpha.size();
    for (std::size_t k = 0; k < g_beta.size(); ++k) grad[off + k] += g_beta[k] * sigmoid(beta_raw_[k]);
    off += g_beta.size();
    const auto extra = grad.subspan(off);
    if (!extra.empty())
      for (std::size_t m = 0; m < M; ++m) transform_gradient(m, times, adj_F.row(m), adj_f.row(m), extra);
  }
  return loss;
}

LikelihoodTerms ExcitationModel::likelihood_terms(const EventSequence& seq) const {
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

double ExcitationModel::loss_and_gradient(const EventSequence& seq, std::span<const std::size_t> batch,
                                          std::span<double> grad) const {
  if (grad.empty()) return batch_loss<false>(seq, batch, grad, nullptr);
  if (grad.size() != num_parameters()) throw std::invalid_argument("gradient buffer has the wrong size");
  return batch_loss<true>(seq, batch, grad, nullptr);
}

// ---------------------------------------------------------------------------
// Serialization helpers

nlohmann::json ExcitationModel::excitation_params_json() const {
  nlohmann::json A = nlohmann::json::array();
  for (std::size_t m = 0; m < num_marks_; ++m)
    A.push_back(std::vector<double>(alpha_raw_.begin() + static_cast<std::ptrdiff_t>(m * num_marks_),
                                    alpha_raw_.begin() + static_cast<std::ptrdiff_t>((m + 1) * num_marks_)));
  nlohmann::json beta = beta_raw_;
  if (pairwise_decay_) {
    beta = nlohmann::json::array();
    for (std::size_t m = 0; m < num_marks_; ++m)
      beta.push_back(std::vector<double>(beta_raw_.begin() + static_cast<std::ptrdiff_t>(m * num_marks_),
                                         beta_raw_.begin() + static_cast<std::ptrdiff_t>((m + 1) * num_marks_)));
  }
  return {{"mu_raw", mu_raw_}, {"A_raw", A}, {"beta_raw", beta}};
}

void ExcitationModel::load_excitation_params(const nlohmann::json& params) {
  const auto mu = params.at("mu_raw").get<std::vector<double>>();
  if (mu.size() != num_marks_) throw Error("checkpoint: mu_raw has the wrong length");
  const auto A = params.at("A_raw").get<std::vector<std::vector<double>>>();
  if (A.size() != num_marks_) throw Error("checkpoint: A_raw has the wrong shape");
  std::vector<double> alpha;
  for (const auto& row : A) {
    if (row.size() != num_marks_) throw Error("checkpoint: A_raw has the wrong shape");
    alpha.insert(alpha.end(), row.begin(), row.end());
  }
  std::vector<double> beta;
  if (pairwise_decay_) {
    for (const auto& row : params.at("beta_raw").get<std::vector<std::vector<double>>>()) {
      if (row.size() != num_marks_) throw Error("checkpoint: beta_raw has the wrong shape");
      beta.insert(beta.end(), row.begin(), row.end());
    }
  } else {
    beta = params.at("beta_raw").get<std::vector<double>>();
  }
  if (beta.size() != beta_raw_.size()) throw Error("checkpoint: beta_raw has the wrong length");
  mu_raw_ = mu;
  alpha_raw_ = alpha;
  beta_raw_ = beta;
}

nlohmann::json ExcitationModel::excitation_describe() const {
  nlohmann::json A = nlohmann::json::array();
  for (std::size_t m = 0; m < num_marks_; ++m) {
    std::vector<double> row(num_marks_);
    for (std::size_t s = 0; s < num_marks_; ++s) row[s] = alpha(m, s);
    A.push_back(row);
  }
  return {{"mu", constrained(mu_raw_)},
          {"alpha", A},
          {"beta", constrained(beta_raw_)},
          {"kernel", std::string(to_string(kernel_.family))},
          {"branching_ratio", branching_ratio()}};
}

}  // namespace dhp

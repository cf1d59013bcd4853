#include "dhp/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dhp/random.hpp"

namespace dhp {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw std::invalid_argument("ADAM betas must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw std::invalid_argument("ADAM epsilon must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), b1_(beta1), b2_(beta2), eps_(epsilon), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw std::invalid_argument("Adam: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = b1_ * m_[k] + (1.0 - b1_) * grad[k];
    v_[k] = b2_ * v_[k] + (1.0 - b2_) * grad[k] * grad[k];
    params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
}

nlohmann::json to_json(const EpochRecord& r) {
  return {{"epoch", r.epoch}, {"train_nll", r.train_nll}, {"val_nll", r.val_nll}, {"seconds", r.seconds}};
}

nlohmann::json TrainReport::to_json() const {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : epochs) history.push_back(dhp::to_json(e));
  return {{"epochs", history},
          {"best_epoch", best_epoch},
          {"best_val_nll", best_val_nll},
          {"seconds", seconds},
          {"stopped_early", stopped_early},
          {"parameters", parameters}};
}

namespace {

std::string snapshot(const PointProcessModel& model) {
  const auto names = model.parameter_names();
  const auto values = model.parameters();
  std::ostringstream os;
  for (std::size_t k = 0; k < values.size() && k < 12; ++k) os << (k ? ", " : "") << names[k] << "=" << values[k];
  if (values.size() > 12) os << ", ... (" << values.size() << " total)";
  return os.str();
}

}  // namespace

TrainReport fit(PointProcessModel& model, const EventSequence& train, const EventSequence& validation,
                const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train.scored_count() == 0) throw Error("empty training data");
  if (train.num_marks() != model.num_marks() || validation.num_marks() != model.num_marks())
    throw std::invalid_argument("training data and model disagree on the number of marks");
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  if (config.initialize) model.initialize_from(train);
  const bool has_validation = validation.scored_count() > 0;
  auto score = [&](EpochRecord& r) {
    r.train_nll = negative_log_likelihood(model, train).per_event;
    r.val_nll = has_validation ? negative_log_likelihood(model, validation).per_event : r.train_nll;
    r.seconds = elapsed();
  };

  // Contiguous chunks of scored indices.
  const std::size_t first = train.scored_begin();
  const std::size_t n = train.scored_count();
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t b = 0; b < n; b += config.batch_size) {
    std::vector<std::size_t> chunk(std::min(config.batch_size, n - b));
    std::iota(chunk.begin(), chunk.end(), first + b);
    batches.push_back(std::move(chunk));
  }
  std::vector<std::size_t> order(batches.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  Xoshiro256 rng(config.seed);
  auto params = model.parameters();
  std::vector<double> grad(params.size());
  Adam adam(params.size(), config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon);

  TrainReport report;
  EpochRecord initial;
  score(initial);
  report.epochs.push_back(initial);
  if (on_epoch) on_epoch(initial);
  report.best_val_nll = initial.val_nll;
  auto best_params = params;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t b : order) {
      std::fill(grad.begin(), grad.end(), 0.0);
      const double loss = model.loss_and_gradient(train, batches[b], grad);
      const bool finite = std::isfinite(loss) && std::all_of(grad.begin(), grad.end(), [](double g) { return std::isfinite(g); });
      if (!finite) {
        std::ostringstream os;
        os << "non-finite loss in epoch " << epoch << ", batch of events [" << batches[b].front() << ", "
           << batches[b].back() << "]; parameters: " << snapshot(model);
        throw Error(os.str());
      }
      adam.step(params, grad);
      model.set_parameters(params);
    }
    EpochRecord record;
    record.epoch = epoch;
    score(record);
    report.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
    if (!std::isfinite(record.val_nll))
      throw Error("non-finite validation NLL after epoch " + std::to_string(epoch) + "; parameters: " + snapshot(model));
    if (record.val_nll < report.best_val_nll) {
      report.best_val_nll = record.val_nll;
      report.best_epoch = epoch;
      best_params = params;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      report.stopped_early = true;
      break;
    }
  }
  model.set_parameters(best_params);
  report.seconds = elapsed();
  report.parameters = model.describe();
  return report;
}

void SweepSpec::validate() const {
  if (layers.empty() || mixtures.empty() || kernels.empty()) throw std::invalid_argument("sweep: empty choice set");
}

void SweepResult::write_csv(std::ostream& out) const {
  out << "kernel,mixtures,layers,val_nll,best_epoch,status\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    out << to_string(r.kernel) << ',' << r.mixtures << ',' << r.layers << ',';
    if (r.error.empty()) {
      std::ostringstream v;
      v.precision(17);
      v << r.val_nll;
      out << v.str() << ',' << r.best_epoch << ',' << (k == best ? "best" : "ok") << '\n';
    } else {
      std::string msg = r.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      out << ",,error: " << msg << '\n';
    }
  }
}

SweepResult sweep(const SweepSpec& spec, const DhpConfig& base, double time_scale, const EventSequence& train,
                  const EventSequence& validation, const TrainConfig& config) {
  spec.validate();
  SweepResult result;
  double best = std::numeric_limits<double>::infinity();
  for (KernelFamily kernel : spec.kernels)
    for (std::size_t mixtures : spec.mixtures)
      for (std::size_t layers : spec.layers) {
        SweepRow row;
        row.kernel = kernel;
        row.mixtures = mixtures;
        row.layers = layers;
        const auto t0 = std::chrono::steady_clock::now();
        try {
          DhpConfig cell = base;
          cell.kernel.family = kernel;
          cell.dynamics.components = mixtures;
          cell.dynamics.layers = layers;
          auto model = DhpModel::create(cell, time_scale, config.seed);
          const auto report = fit(model, train, validation, config);
          row.val_nll = report.best_val_nll;
          row.best_epoch = report.best_epoch;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (row.error.empty() && row.val_nll < best) {
          best = row.val_nll;
          result.best = result.rows.size();
        }
        result.rows.push_back(row);
      }
  if (!std::isfinite(best)) result.best = result.rows.size();
  return result;
}

}  // namespace dhp

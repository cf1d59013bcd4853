#pragma once

// Maximum-likelihood fitting with ADAM on unconstrained parameters.
//
// Each epoch visits contiguous chunks of `batch_size` scored events in a
// shuffled order. A chunk's loss is the exact sum of its events' NLL terms,
// so one epoch touches the full likelihood once. Early stopping tracks the
// per-event validation NLL and restores the best parameters.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dhp/dhp_model.hpp"
#include "dhp/event_store.hpp"
#include "dhp/model.hpp"

namespace dhp {

struct TrainConfig {
  double learning_rate = 0.002;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  /// Call model.initialize_from(train) before the first epoch.
  bool initialize = true;

  void validate() const;
};

class Adam {
 public:
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);
  std::size_t steps() const { return t_; }

 private:
  double lr_, b1_, b2_, eps_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 0 is the starting point
  double train_nll = 0.0;  // per event
  double val_nll = 0.0;    // per event
  double seconds = 0.0;    // since fit() started
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_nll = 0.0;
  double seconds = 0.0;
  bool stopped_early = false;
  nlohmann::json parameters;  // model.describe() at the best epoch

  nlohmann::json to_json() const;
};

nlohmann::json to_json(const EpochRecord& record);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Fits `model` in place; it ends holding the best-validation parameters.
/// An empty validation window falls back to the training NLL.
TrainReport fit(PointProcessModel& model, const EventSequence& train, const EventSequence& validation,
                const TrainConfig& config, const EpochCallback& on_epoch = {});

struct SweepSpec {
  std::vector<std::size_t> layers{2};
  std::vector<std::size_t> mixtures{3};
  std::vector<KernelFamily> kernels{KernelFamily::PowerLaw};

  void validate() const;
};

struct SweepRow {
  KernelFamily kernel = KernelFamily::PowerLaw;
  std::size_t mixtures = 0;
  std::size_t layers = 0;
  double val_nll = 0.0;
  std::size_t best_epoch = 0;
  double seconds = 0.0;
  std::string error;  // empty on success
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Index of the row with the lowest validation NLL; rows.size() if all failed.
  std::size_t best = 0;

  void write_csv(std::ostream& out) const;
};

/// Trains one DHP per grid cell with the same seed. `base` supplies the mark
/// count, hidden width, PWL power and decay layout.
SweepResult sweep(const SweepSpec& spec, const DhpConfig& base, double time_scale, const EventSequence& train,
                  const EventSequence& validation, const TrainConfig& config);

}  // namespace dhp

#pragma once

// Common interface for every point-process model in the library and the
// likelihood/prediction operations built on it.
//
// Conventions shared by all models:
//  * The history of the i-th event is every event with a smaller index, so
//    simultaneous events see each other in input order (a kernel at Δ = 0
//    contributes g(0)).
//  * The likelihood over the window [start, T) decomposes by event: scored
//    event i owns −log λ_{m_i}(t_i) plus, for every mark, the compensator over
//    (t_{i-1}, t_i] (the first scored event's segment starts at `start`). The
//    final scored event also owns the tail (t_last, T]. Batches of event
//    indices therefore partition the exact negative log-likelihood.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dhp/event_store.hpp"
#include "dhp/numeric.hpp"

namespace dhp {

/// Intensities are floored at this value inside the logarithm.
inline constexpr double kIntensityFloor = 1e-10;

/// Per-event pieces of the negative log-likelihood over a sequence's window.
struct LikelihoodTerms {
  std::size_t first = 0;                // index of the first scored event
  std::vector<double> log_intensity;    // log max(λ_{m_i}(t_i), floor), one per scored event
  Matrix increments;                    // compensator per segment × mark; n + 1 rows, the last is the tail
  std::size_t floored = 0;              // events whose intensity hit the floor

  std::size_t num_events() const { return log_intensity.size(); }
  /// −log λ_i + Σ_m Λ_m over the event's segment (plus the tail for the last).
  std::vector<double> event_losses() const;
  double total() const;
};

/// Sequential state for simulation: history grows one event at a time.
class IntensityTracker {
 public:
  virtual ~IntensityTracker() = default;
  virtual void push(const Event& event) = 0;
  virtual double intensity(std::size_t mark, double t) const = 0;
  /// Upper bound of the total intensity over [t, t + window] with the current history.
  virtual double total_bound(double t, double window) const = 0;
  virtual std::span<const Event> history() const = 0;
};

class PointProcessModel {
 public:
  virtual ~PointProcessModel() = default;

  virtual std::string_view model_type() const = 0;
  virtual std::size_t num_marks() const = 0;

  /// λ_mark(t) given `history` (all of which precedes t or ties with it).
  virtual double intensity(std::size_t mark, double t, std::span<const Event> history) const = 0;

  /// ∫_a^b λ_mark with the history fixed: every history event is at or before a.
  virtual double compensator(std::size_t mark, double a, double b, std::span<const Event> history) const = 0;

  /// Upper bound of Σ_m λ_m over [t, t + window] with history fixed.
  virtual double intensity_bound(double t, double window, std::span<const Event> history) const = 0;

  virtual LikelihoodTerms likelihood_terms(const EventSequence& seq) const;

  /// Expected counts per interval (rows) and mark (cols). Interval s
  /// conditions on every event at or before boundaries[s].
  virtual Matrix predict_counts(std::span<const Event> events, std::span<const double> boundaries) const;

  virtual std::unique_ptr<IntensityTracker> tracker() const;

  /// Largest row sum of kernel masses (expected direct offspring), when defined.
  virtual double branching_ratio() const { return 0.0; }

  // Training surface: unconstrained parameters.
  virtual std::vector<double> parameters() const = 0;
  virtual void set_parameters(std::span<const double> raw) = 0;
  virtual std::vector<std::string> parameter_names() const = 0;
  std::size_t num_parameters() const { return parameters().size(); }

  /// Sum of the event losses over `batch` (indices into seq.events(), all
  /// scored). Adds the gradient with respect to parameters() into `grad`
  /// unless `grad` is empty.
  virtual double loss_and_gradient(const EventSequence& seq, std::span<const std::size_t> batch,
                                   std::span<double> grad) const = 0;

  /// Data-driven starting point before fitting.
  virtual void initialize_from(const EventSequence& train);

  /// Constrained parameter values, for reports.
  virtual nlohmann::json describe() const = 0;

  /// Checkpoint envelope: {model_type, meta, params}.
  virtual nlohmann::json to_json() const = 0;

  virtual std::unique_ptr<PointProcessModel> clone() const = 0;
};

struct NllResult {
  double total = 0.0;
  double per_event = 0.0;  // total / n (total itself when n = 0)
  std::size_t num_events = 0;
  std::size_t floored = 0;
  std::vector<double> event_terms;
};

NllResult negative_log_likelihood(const PointProcessModel& model, const EventSequence& seq);

/// Expected counts on (t_s, t_{s+1}] with rolling ground-truth history.
Matrix predict_counts(const PointProcessModel& model, std::span<const Event> events,
                      std::span<const double> boundaries);

/// Empirical rate per mark over the scored window, for initialization.
std::vector<double> empirical_rates(const EventSequence& seq);

}  // namespace dhp

#pragma once

// Held-out scoring: per-event NLL over a window, interval-count MAPE and
// time-rescaling residual diagnostics.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dhp/event_store.hpp"
#include "dhp/model.hpp"

namespace dhp {

/// NLL over the sequence's window [start, horizon), conditioning on all earlier events.
NllResult test_nll(const PointProcessModel& model, const EventSequence& seq);

struct MapeResult {
  std::vector<double> per_dimension;  // NaN where the dimension was excluded
  std::vector<double> predicted;      // total predicted count per dimension
  std::vector<double> actual;         // total observed count per dimension
  std::vector<std::size_t> excluded;  // dimensions with no observed events
  double mean = 0.0;                  // over included dimensions
  double stddev = 0.0;                // population std over included dimensions
};

/// |Σ predicted − Σ actual| / Σ actual per dimension, then mean and std.
MapeResult mape_from_totals(std::span<const double> predicted, std::span<const double> actual);

/// Rolling predictions on (t_s, t_{s+1}] of width `width` across the window,
/// each conditioned on the observed events up to t_s.
MapeResult mape(const PointProcessModel& model, const EventSequence& seq, double width);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov–Smirnov test of `samples` against Exp(1), with the
/// asymptotic distribution and Stephens' small-sample correction.
KsResult ks_exponential(std::vector<double> samples);

struct ResidualResult {
  std::size_t mark = 0;
  std::size_t events = 0;
  bool sufficient = false;  // at least 10 events
  KsResult ks;
  bool pass_1pct = false;
  bool pass_5pct = false;
  std::vector<double> residuals;
};

/// Compensator increments between consecutive same-mark events in the window,
/// tested against Exp(1) per mark.
std::vector<ResidualResult> residual_diagnostics(const PointProcessModel& model, const EventSequence& seq);

struct EvaluationReport {
  std::string model_type;
  NllResult nll;
  MapeResult mape;
  double width = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<ResidualResult> residuals;
  std::vector<std::string> warnings;

  nlohmann::json to_json(std::span<const std::string> mark_labels = {}) const;
  static void write_csv_header(std::ostream& out);
  void write_csv_row(std::ostream& out) const;
};

EvaluationReport evaluate(const PointProcessModel& model, const EventSequence& seq, double width,
                          bool with_residuals = true);

}  // namespace dhp

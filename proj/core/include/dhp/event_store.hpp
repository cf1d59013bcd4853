#pragma once

// Marked event sequences: ingestion, validation, chronological splitting and
// interval counting.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dhp/numeric.hpp"

namespace dhp {

struct Event {
  double time = 0.0;
  std::size_t mark = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// An ordered list of events on [0, horizon) together with a scoring window
/// [start, horizon). Events before `start` are conditioning history only; the
/// likelihood and all window-based metrics are taken over events with
/// time >= start.
class EventSequence {
 public:
  EventSequence() = default;
  EventSequence(std::vector<Event> events, std::size_t num_marks, double horizon,
                std::vector<std::string> mark_labels = {}, std::string time_unit = {},
                double start = 0.0);

  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }

  std::size_t num_marks() const { return num_marks_; }
  double start() const { return start_; }
  double horizon() const { return horizon_; }
  const std::vector<std::string>& mark_labels() const { return mark_labels_; }
  const std::string& time_unit() const { return time_unit_; }

  /// Index of the first event inside the scoring window.
  std::size_t scored_begin() const { return scored_begin_; }
  std::size_t scored_count() const { return events_.size() - scored_begin_; }
  std::span<const Event> scored() const {
    return std::span<const Event>(events_).subspan(scored_begin_);
  }

  /// Copy restricted to a new window; events at or after `horizon` are dropped.
  EventSequence window(double start, double horizon) const;

 private:
  std::vector<Event> events_;
  std::size_t num_marks_ = 1;
  double start_ = 0.0;
  double horizon_ = 0.0;
  std::vector<std::string> mark_labels_;
  std::string time_unit_;
  std::size_t scored_begin_ = 0;
};

enum class EventFormat { Csv, Jsonl };

/// Infers the format from a file extension (.csv, .jsonl / .json).
EventFormat format_from_path(const std::filesystem::path& path);

struct LoadOptions {
  /// Stable-sort unordered input instead of rejecting it.
  bool sort = false;
  /// Multiplies every timestamp at load.
  double time_scale = 1.0;
  /// Fixed label -> index map (index order). Unknown labels are rejected.
  std::optional<std::vector<std::string>> manifest;
  /// Observation window end; defaults to max time + smallest positive gap.
  std::optional<double> horizon;
  std::string time_unit;
};

EventSequence parse_events(std::istream& in, EventFormat format, const LoadOptions& options = {});
EventSequence load_events(const std::filesystem::path& path, const LoadOptions& options = {});
EventSequence load_events(const std::filesystem::path& path, EventFormat format,
                          const LoadOptions& options = {});

/// Canonical CSV: header `time,mark`, shortest round-trip decimal times,
/// mark labels. Only the events are written.
void save_events(const EventSequence& seq, std::ostream& out);
void save_events(const EventSequence& seq, const std::filesystem::path& path);

std::vector<std::string> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::vector<std::string>& labels, const std::filesystem::path& path);

struct SplitSpec {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;

  void validate() const;
};

struct SplitResult {
  EventSequence train;
  EventSequence validation;
  EventSequence test;
};

/// Partitions the scored events by time order into ⌊train·I⌋, ⌊val·I⌋ and the
/// remainder. Each part keeps every earlier event as history; window
/// boundaries sit halfway between the last event of one part and the first of
/// the next. A boundary never separates tied timestamps: it moves forward past
/// the tie.
SplitResult chronological_split(const EventSequence& seq, const SplitSpec& spec);

/// Counts per interval (t_s, t_{s+1}] and mark.
struct CountGrid {
  std::vector<double> boundaries;
  std::vector<std::vector<std::size_t>> counts;  // [interval][mark]

  std::size_t intervals() const { return counts.size(); }
  std::size_t total() const;
  std::vector<std::size_t> column_totals(std::size_t num_marks) const;
};

/// Uniform boundaries start, start+width, ..., end; the last interval may be
/// shorter. Yields ⌈(end-start)/width⌉ intervals.
std::vector<double> interval_boundaries(double start, double end, double width);

CountGrid slice_counts(const EventSequence& seq, double start, double end, double width);
CountGrid count_events(std::span<const Event> events, std::size_t num_marks,
                       std::span<const double> boundaries);

}  // namespace dhp

#pragma once

// Ogata thinning. Candidates are proposed from a local upper bound of the
// total intensity over [t, t + refresh]; the bound is recomputed after every
// candidate, accepted or not.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dhp/event_store.hpp"
#include "dhp/model.hpp"

namespace dhp {

struct SimConfig {
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_events = 1'000'000;
  /// Lookahead for the intensity bound; 0 picks horizon / 100.
  double refresh = 0.0;

  void validate() const;
};

struct SimResult {
  EventSequence sequence;
  std::size_t candidates = 0;
  /// Candidates where the exact intensity exceeded the bound (should stay 0).
  std::size_t bound_violations = 0;
  bool hit_cap = false;
  std::vector<std::string> warnings;
};

SimResult thinning_simulate(const PointProcessModel& model, const SimConfig& config,
                            std::vector<std::string> mark_labels = {});

/// Generating model, seed and run statistics for a simulated file.
nlohmann::json simulation_sidecar(const PointProcessModel& model, const SimConfig& config, const SimResult& result);

}  // namespace dhp

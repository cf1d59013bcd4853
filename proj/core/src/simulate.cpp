#include "dhp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dhp/excitation.hpp"
#include "dhp/random.hpp"

namespace dhp {

void SimConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("simulation horizon must be > 0");
  if (max_events < 1) throw std::invalid_argument("event cap must be >= 1");
  if (!(refresh >= 0.0)) throw std::invalid_argument("refresh interval must be >= 0");
}

namespace {

double peak_derivative(const ExcitationModel& model, double horizon) {
  double peak = 0.0;
  for (std::size_t m = 0; m < model.num_marks(); ++m) peak = std::max(peak, model.derivative_bound(m, 0.0, horizon));
  return peak;
}

}  // namespace

SimResult thinning_simulate(const PointProcessModel& model, const SimConfig& config,
                            std::vector<std::string> mark_labels) {
  config.validate();
  SimResult result;
  const std::size_t M = model.num_marks();
  if (const auto* ex = dynamic_cast<const ExcitationModel*>(&model)) {
    const double ratio = ex->branching_ratio();
    if (ratio >= 1.0 && peak_derivative(*ex, config.horizon) >= 1.0)
      result.warnings.push_back("possibly supercritical: branching ratio " + std::to_string(ratio) +
                                "; relying on the event cap");
  }

  const double window = config.refresh > 0.0 ? config.refresh : config.horizon / 100.0;
  Xoshiro256 rng(config.seed);
  auto tracker = model.tracker();
  std::vector<Event> events;
  std::vector<double> lambda(M);
  double t = 0.0;
  while (t < config.horizon) {
    if (events.size() >= config.max_events) {
      result.hit_cap = true;
      result.warnings.push_back("event cap reached at t = " + std::to_string(t));
      break;
    }
    const double bound = tracker->total_bound(t, window);
    if (!std::isfinite(bound)) throw Error("simulation: intensity bound is not finite at t = " + std::to_string(t));
    const double step = bound > 0.0 ? rng.exponential(bound) : window;
    if (step > window) {
      t += window;
      continue;
    }
    t += step;
    if (t >= config.horizon) break;
    ++result.candidates;
    double total = 0.0;
    for (std::size_t m = 0; m < M; ++m) total += (lambda[m] = tracker->intensity(m, t));
    if (total > bound * (1.0 + 1e-9)) ++result.bound_violations;
    const double u = rng.uniform() * std::max(bound, total);
    if (u >= total) continue;
    double cumulative = 0.0;
    std::size_t mark = M - 1;
    for (std::size_t m = 0; m < M; ++m) {
      cumulative += lambda[m];
      if (u < cumulative) {
        mark = m;
        break;
      }
    }
    const Event e{t, mark};
    events.push_back(e);
    tracker->push(e);
  }
  if (result.bound_violations > 0)
    result.warnings.push_back(std::to_string(result.bound_violations) + " candidates exceeded the intensity bound");
  result.sequence = EventSequence(std::move(events), M, config.horizon, std::move(mark_labels));
  return result;
}

nlohmann::json simulation_sidecar(const PointProcessModel& model, const SimConfig& config, const SimResult& result) {
  return {{"generator", model.to_json()},
          {"seed", config.seed},
          {"horizon", config.horizon},
          {"max_events", config.max_events},
          {"refresh", config.refresh > 0.0 ? config.refresh : config.horizon / 100.0},
          {"rng", "xoshiro256** seeded by splitmix64"},
          {"events", result.sequence.size()},
          {"candidates", result.candidates},
          {"hit_cap", result.hit_cap},
          {"warnings", result.warnings}};
}

}  // namespace dhp

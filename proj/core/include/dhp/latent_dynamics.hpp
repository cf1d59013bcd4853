#pragma once

// Latent dynamics f_m(t) >= 0 and its integral F_m(t), one pair per mark.
//
// MixtureIntegralDynamics models F_m as a non-negative mixture of monotonic
// networks plus a linear term:
//
//   F_m(t) = Σ_c π_c Φ_m^c(t) + b0·t,      f_m(t) = dF_m/dt,
//
// with every network weight, output weight, π_c and b0 stored unconstrained
// and mapped through softplus. Hidden layers use tanh, the last layer
// softplus. Each network reads u = t / T_scale and its output is multiplied
// by T_scale, so f_m stays O(1) whatever the time unit. F_m is anchored at
// F_m(0) = 0.
//
// AnalyticDynamics supplies closed-form f/F profiles (constant, clipped
// linear ramp, piecewise constant) for simulation ground truth.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace dhp {

struct DynamicsConfig {
  std::size_t components = 3;
  std::size_t layers = 2;
  std::size_t hidden = 8;

  void validate() const;
};

/// Read-only view over one network's raw parameters.
///
/// Layout: W1 (H), b1 (H), then for each further layer W (H×H row-major) and
/// b (H), then the output weights B (H). Weight entries are softplus-mapped;
/// biases are used as stored.
class MonotonicNetwork {
 public:
  MonotonicNetwork(std::size_t layers, std::size_t hidden, std::span<const double> raw);

  static std::size_t parameter_count(std::size_t layers, std::size_t hidden);
  /// True when entry `index` is a weight (non-negative after softplus).
  static bool is_weight(std::size_t layers, std::size_t hidden, std::size_t index);

  /// Φ(u).
  double value(double u) const;
  /// dΦ/du.
  double slope(double u) const;

  std::size_t layers() const { return layers_; }
  std::size_t hidden() const { return hidden_; }
  /// Effective (constrained) parameters in layout order.
  std::vector<double> constrained() const;

 private:
  std::size_t layers_;
  std::size_t hidden_;
  std::span<const double> raw_;
};

class MixtureIntegralDynamics {
 public:
  MixtureIntegralDynamics(std::size_t num_marks, DynamicsConfig config, double time_scale,
                          std::vector<double> raw);

  /// Fan-in scaled weights with Normal(0, 0.1) jitter; b0 starts at 0.5.
  static MixtureIntegralDynamics random(std::size_t num_marks, DynamicsConfig config,
                                        double time_scale, std::uint64_t seed);
  /// π_c = 0 and b0 = 1, so F_m(t) = t.
  static MixtureIntegralDynamics identity(std::size_t num_marks, DynamicsConfig config,
                                          double time_scale);

  std::size_t num_marks() const { return num_marks_; }
  const DynamicsConfig& config() const { return config_; }
  double time_scale() const { return time_scale_; }

  std::span<const double> parameters() const { return raw_; }
  void set_parameters(std::span<const double> raw);
  std::size_t num_parameters() const { return raw_.size(); }
  std::vector<std::string> parameter_names() const;

  MonotonicNetwork network(std::size_t mark, std::size_t component) const;
  double mixture_weight(std::size_t component) const;
  double base_slope() const;

  double integral(std::size_t mark, double t) const;
  /// Input derivative of integral(), taken by reverse-mode with t as a leaf.
  double derivative(std::size_t mark, double t) const;

  /// F_m and f_m at each time (f via forward tangent propagation).
  void evaluate(std::size_t mark, std::span<const double> times, std::span<double> integral,
                std::span<double> derivative) const;

  /// Adds Σ_k (adj_F[k]·∂F_m(t_k) + adj_f[k]·∂f_m(t_k)) / ∂raw into `grad`.
  void accumulate_gradient(std::size_t mark, std::span<const double> times,
                           std::span<const double> adj_integral,
                           std::span<const double> adj_derivative, std::span<double> grad) const;

  /// Upper bound of f_m on [a, b]: dense grid maximum times 1.2.
  double derivative_bound(std::size_t mark, double a, double b) const;

  nlohmann::json to_json() const;
  static MixtureIntegralDynamics from_json(const nlohmann::json& j);

 private:
  std::size_t block_offset(std::size_t mark, std::size_t component) const;
  std::size_t mixture_offset() const;

  std::size_t num_marks_;
  DynamicsConfig config_;
  double time_scale_;
  std::size_t block_size_;
  std::vector<double> raw_;
};

/// A closed-form f with exact integral.
class AnalyticProfile {
 public:
  enum class Kind { Constant, Ramp, Piecewise };

  static AnalyticProfile constant(double value);
  /// f(t) = max(0, intercept + slope·t).
  static AnalyticProfile ramp(double intercept, double slope);
  /// value[k] on [start[k], start[k+1]); start[0] must be 0 and the last piece
  /// extends to infinity.
  static AnalyticProfile piecewise(std::vector<double> starts, std::vector<double> values);

  /// Parses "constant:2", "ramp:1,-0.01" or "piecewise:0=1,50=0.25".
  static AnalyticProfile parse(const std::string& text);
  std::string to_string() const;

  Kind kind() const { return kind_; }
  double value(double t) const;
  double integral(double t) const;
  double max_on(double a, double b) const;

 private:
  Kind kind_ = Kind::Constant;
  std::vector<double> a_;
  std::vector<double> b_;
};

class AnalyticDynamics {
 public:
  AnalyticDynamics(std::size_t num_marks, AnalyticProfile profile);
  explicit AnalyticDynamics(std::vector<AnalyticProfile> profiles);

  std::size_t num_marks() const { return profiles_.size(); }
  const AnalyticProfile& profile(std::size_t mark) const { return profiles_.at(mark); }

  double integral(std::size_t mark, double t) const { return profiles_.at(mark).integral(t); }
  double derivative(std::size_t mark, double t) const { return profiles_.at(mark).value(t); }
  double derivative_bound(std::size_t mark, double a, double b) const {
    return profiles_.at(mark).max_on(a, b);
  }

  nlohmann::json to_json() const;
  static AnalyticDynamics from_json(const nlohmann::json& j);

 private:
  std::vector<AnalyticProfile> profiles_;
};

/// Either learned or closed-form dynamics, with value semantics.
class LatentDynamics {
 public:
  LatentDynamics(MixtureIntegralDynamics d) : impl_(std::move(d)) {}
  LatentDynamics(AnalyticDynamics d) : impl_(std::move(d)) {}

  bool is_learned() const { return std::holds_alternative<MixtureIntegralDynamics>(impl_); }
  const MixtureIntegralDynamics* learned() const { return std::get_if<MixtureIntegralDynamics>(&impl_); }
  const AnalyticDynamics* analytic() const { return std::get_if<AnalyticDynamics>(&impl_); }

  std::size_t num_marks() const;
  double integral(std::size_t mark, double t) const;
  double derivative(std::size_t mark, double t) const;
  void evaluate(std::size_t mark, std::span<const double> times, std::span<double> integral,
                std::span<double> derivative) const;
  double derivative_bound(std::size_t mark, double a, double b) const;

  std::size_t num_parameters() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> raw);
  std::vector<std::string> parameter_names() const;
  void accumulate_gradient(std::size_t mark, std::span<const double> times,
                           std::span<const double> adj_integral,
                           std::span<const double> adj_derivative, std::span<double> grad) const;

  nlohmann::json to_json() const;
  static LatentDynamics from_json(const nlohmann::json& j);

 private:
  std::variant<MixtureIntegralDynamics, AnalyticDynamics> impl_;
};

struct DynamicsSample {
  double time;
  double derivative;  // f_m(t)
  double integral;    // F_m(t)
};

/// `points` uniformly spaced samples over [start, end].
std::vector<DynamicsSample> export_grid(const LatentDynamics& dynamics, std::size_t mark,
                                        double start, double end, std::size_t points);

}  // namespace dhp

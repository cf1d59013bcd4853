#pragma once

// Dynamic Hawkes process: the excitation kernel runs on the transformed time
// F_m(t) − F_m(t_j) and is scaled by f_m(t), with F/f supplied by a
// LatentDynamics (a learned monotone-network mixture or closed-form profile).

#include <cstdint>
#include <memory>

#include "dhp/excitation.hpp"
#include "dhp/latent_dynamics.hpp"

namespace dhp {

struct DhpConfig {
  std::size_t num_marks = 1;
  KernelSpec kernel;
  DynamicsConfig dynamics;
  bool pairwise_decay = false;
};

class DhpModel final : public ExcitationModel {
 public:
  DhpModel(std::size_t num_marks, KernelSpec kernel, LatentDynamics dynamics, bool pairwise_decay = false);

  /// Randomly initialized network dynamics with inputs scaled by `time_scale`.
  static DhpModel create(const DhpConfig& config, double time_scale, std::uint64_t seed);

  std::string_view model_type() const override { return "dhp"; }

  const LatentDynamics& dynamics() const { return dynamics_; }
  void set_dynamics(LatentDynamics dynamics);

  /// F_m(t) − F_m(t_j) for t_j <= t.
  double transformed_interval(std::size_t m, double t, double t_j) const;

  void transform(std::size_t m, std::span<const double> times, std::span<double> F,
                 std::span<double> f) const override;
  double derivative_bound(std::size_t m, double a, double b) const override;

  nlohmann::json describe() const override;
  nlohmann::json to_json() const override;
  static DhpModel from_json(const nlohmann::json& j);
  std::unique_ptr<PointProcessModel> clone() const override { return std::make_unique<DhpModel>(*this); }

 protected:
  std::vector<double> transform_parameters() const override { return dynamics_.parameters(); }
  void set_transform_parameters(std::span<const double> raw) override { dynamics_.set_parameters(raw); }
  std::vector<std::string> transform_parameter_names() const override { return dynamics_.parameter_names(); }
  void transform_gradient(std::size_t m, std::span<const double> times, std::span<const double> adj_F,
                          std::span<const double> adj_f, std::span<double> grad) const override;

 private:
  LatentDynamics dynamics_;
};

/// A DHP carrying the background rates, interactions and decays of `model`
/// with `dynamics` as its time transform.
DhpModel inject_dynamics(const ExcitationModel& model, LatentDynamics dynamics);

}  // namespace dhp

#pragma once

// Shared machinery for self-exciting models whose intensity has the form
//
//   λ_m(t) = μ_m + f_m(t) Σ_{j<i} g(α_{m,m_j}, β; F_m(t) − F_m(t_j)).
//
// The classical Hawkes process is the case F_m(t) = t. Subclasses provide
// the time transform F/f and any parameters it owns; everything else
// (likelihood terms, gradients, predictions, simulation tracking) lives here.
//
// For EXP and RAY kernels, history events whose transformed age exceeds the
// point where the kernel and its tail mass fall below e^-40 of their peak
// scale are skipped. PWL is never truncated.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dhp/kernels.hpp"
#include "dhp/model.hpp"

namespace dhp {

class ExcitationModel : public PointProcessModel {
 public:
  std::size_t num_marks() const override { return num_marks_; }
  const KernelSpec& kernel() const { return kernel_; }
  bool pairwise_decay() const { return pairwise_decay_; }

  double mu(std::size_t m) const;
  /// Influence of source mark `source` on target `m`.
  double alpha(std::size_t m, std::size_t source) const;
  double beta(std::size_t m, std::size_t source) const;
  KernelParams kernel_params(std::size_t m, std::size_t source) const {
    return {alpha(m, source), beta(m, source)};
  }

  /// Constrained setters; zero entries of A map to an exactly-zero effective value.
  void set_mu(std::span<const double> mu);
  void set_alpha(const Matrix& alpha);
  /// M values, or M×M row-major when pairwise_decay() is set.
  void set_beta(std::span<const double> beta);

  /// Time transform at arbitrary times (t >= 0).
  virtual void transform(std::size_t m, std::span<const double> times, std::span<double> F,
                         std::span<double> f) const = 0;
  /// Upper bound on f_m over [a, b].
  virtual double derivative_bound(std::size_t m, double a, double b) const = 0;

  double intensity(std::size_t mark, double t, std::span<const Event> history) const override;
  double compensator(std::size_t mark, double a, double b, std::span<const Event> history) const override;
  double intensity_bound(double t, double window, std::span<const Event> history) const override;
  LikelihoodTerms likelihood_terms(const EventSequence& seq) const override;
  Matrix predict_counts(std::span<const Event> events, std::span<const double> boundaries) const override;
  std::unique_ptr<IntensityTracker> tracker() const override;
  double branching_ratio() const override;

  std::vector<double> parameters() const override;
  void set_parameters(std::span<const double> raw) override;
  std::vector<std::string> parameter_names() const override;
  double loss_and_gradient(const EventSequence& seq, std::span<const std::size_t> batch,
                           std::span<double> grad) const override;

  /// μ at half the empirical rate; α and β so that each kernel has mass
  /// 0.5/M and decays over roughly one mean inter-event gap.
  void initialize_from(const EventSequence& train) override;

  /// Largest transformed age that can still contribute for target m.
  double cutoff(std::size_t m) const;

 protected:
  ExcitationModel(std::size_t num_marks, KernelSpec kernel, bool pairwise_decay);

  nlohmann::json excitation_params_json() const;
  void load_excitation_params(const nlohmann::json& params);
  nlohmann::json excitation_describe() const;

  // Parameters owned by the transform, appended after μ, A, β.
  virtual std::vector<double> transform_parameters() const { return {}; }
  virtual void set_transform_parameters(std::span<const double> raw);
  virtual std::vector<std::string> transform_parameter_names() const { return {}; }
  /// Adds Σ_k adjF[k] ∂F_m(t_k) + adjf[k] ∂f_m(t_k) into `grad` (transform parameters only).
  virtual void transform_gradient(std::size_t m, std::span<const double> times, std::span<const double> adj_F,
                                  std::span<const double> adj_f, std::span<double> grad) const;

 private:
  std::size_t beta_index(std::size_t m, std::size_t source) const {
    return pairwise_decay_ ? m * num_marks_ + source : m;
  }
  std::size_t core_parameter_count() const { return mu_raw_.size() + alpha_raw_.size() + beta_raw_.size(); }

  template <bool WithGrad>
  double batch_loss(const EventSequence& seq, std::span<const std::size_t> batch, std::span<double> grad,
                    LikelihoodTerms* terms) const;

  friend class ExcitationTracker;

  std::size_t num_marks_;
  KernelSpec kernel_;
  bool pairwise_decay_;
  std::vector<double> mu_raw_;
  std::vector<double> alpha_raw_;  // M×M, row = target
  std::vector<double> beta_raw_;   // M or M×M
};

}  // namespace dhp

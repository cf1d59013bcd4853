#pragma once

// Classical comparison models: homogeneous Poisson (HPP), reinforced Poisson
// with log-normal relaxation (RPP), self-correcting, and the static Hawkes
// process.

#include <array>
#include <memory>

#include "dhp/excitation.hpp"

namespace dhp {

/// Hawkes process with the kernel running on raw time (F_m(t) = t, f = 1).
class HawkesModel final : public ExcitationModel {
 public:
  HawkesModel(std::size_t num_marks, KernelSpec kernel, bool pairwise_decay = false);

  std::string_view model_type() const override { return "hawkes"; }
  void transform(std::size_t m, std::span<const double> times, std::span<double> F,
                 std::span<double> f) const override;
  double derivative_bound(std::size_t, double, double) const override { return 1.0; }

  nlohmann::json describe() const override;
  nlohmann::json to_json() const override;
  static HawkesModel from_json(const nlohmann::json& j);
  std::unique_ptr<PointProcessModel> clone() const override { return std::make_unique<HawkesModel>(*this); }
};

/// Models whose intensity for mark m depends only on t and the count n of
/// earlier mark-m events. Each mark owns a fixed number of raw parameters.
class CountingModel : public PointProcessModel {
 public:
  static constexpr std::size_t kMaxParams = 3;

  /// A value with its derivatives with respect to one mark's raw parameters.
  struct Piece {
    double value = 0.0;
    std::array<double, kMaxParams> d{};
  };

  std::size_t num_marks() const override { return num_marks_; }

  /// log λ_m(t) with n earlier mark-m events; -inf where λ = 0.
  virtual Piece log_intensity(std::size_t m, double t, std::size_t n) const = 0;
  /// ∫_a^b λ_m with n fixed.
  virtual Piece segment(std::size_t m, double a, double b, std::size_t n) const = 0;
  virtual double max_intensity(std::size_t m, double a, double b, std::size_t n) const = 0;

  double intensity(std::size_t mark, double t, std::span<const Event> history) const override;
  double compensator(std::size_t mark, double a, double b, std::span<const Event> history) const override;
  double intensity_bound(double t, double window, std::span<const Event> history) const override;
  LikelihoodTerms likelihood_terms(const EventSequence& seq) const override;
  std::unique_ptr<IntensityTracker> tracker() const override;

  std::vector<double> parameters() const override { return raw_; }
  void set_parameters(std::span<const double> raw) override;
  std::vector<std::string> parameter_names() const override;
  double loss_and_gradient(const EventSequence& seq, std::span<const std::size_t> batch,
                           std::span<double> grad) const override;

  nlohmann::json to_json() const override;

 protected:
  CountingModel(std::size_t num_marks, std::vector<std::string> labels, std::vector<double> raw_per_mark);

  double raw(std::size_t m, std::size_t k) const { return raw_[m * per_mark_ + k]; }
  void set_raw(std::size_t m, std::size_t k, double v) { raw_[m * per_mark_ + k] = v; }
  std::size_t per_mark() const { return per_mark_; }
  const std::vector<std::string>& labels() const { return labels_; }
  void load_raw(const nlohmann::json& j);

 private:
  template <bool WithGrad>
  double batch_loss(const EventSequence& seq, std::span<const std::size_t> batch, std::span<double> grad,
                    LikelihoodTerms* terms) const;

  std::size_t num_marks_;
  std::size_t per_mark_;
  std::vector<std::string> labels_;
  std::vector<double> raw_;
};

/// λ_m(t) = rate_m.
class HppModel final : public CountingModel {
 public:
  explicit HppModel(std::size_t num_marks, double rate = 1.0);

  std::string_view model_type() const override { return "hpp"; }
  double rate(std::size_t m) const;
  void set_rates(std::span<const double> rates);

  Piece log_intensity(std::size_t m, double t, std::size_t n) const override;
  Piece segment(std::size_t m, double a, double b, std::size_t n) const override;
  double max_intensity(std::size_t m, double a, double b, std::size_t n) const override;

  /// Starts at the maximum-likelihood rates.
  void initialize_from(const EventSequence& train) override;
  nlohmann::json describe() const override;
  static HppModel from_json(const nlohmann::json& j);
  std::unique_ptr<PointProcessModel> clone() const override { return std::make_unique<HppModel>(*this); }
};

/// λ_m(t) = γ_m(t) N^m(t) with γ_m the log-normal density
/// exp(−(log t − α_m)² / 2β_m²) / (√(2π) β_m t). λ is zero until the first
/// mark-m event, so such events hit the likelihood floor.
class RppModel final : public CountingModel {
 public:
  explicit RppModel(std::size_t num_marks);

  std::string_view model_type() const override { return "rpp"; }
  double alpha(std::size_t m) const { return raw(m, 0); }
  double beta(std::size_t m) const;
  void set_params(std::size_t m, double alpha, double beta);

  Piece log_intensity(std::size_t m, double t, std::size_t n) const override;
  Piece segment(std::size_t m, double a, double b, std::size_t n) const override;
  double max_intensity(std::size_t m, double a, double b, std::size_t n) const override;

  void initialize_from(const EventSequence& train) override;
  nlohmann::json describe() const override;
  static RppModel from_json(const nlohmann::json& j);
  std::unique_ptr<PointProcessModel> clone() const override { return std::make_unique<RppModel>(*this); }
};

/// λ_m(t) = exp(α_m + β_m (t − ρ_m N^m(t))).
class SelfCorrectingModel final : public CountingModel {
 public:
  explicit SelfCorrectingModel(std::size_t num_marks);

  std::string_view model_type() const override { return "selfcorrecting"; }
  double alpha(std::size_t m) const { return raw(m, 0); }
  double beta(std::size_t m) const;
  double rho(std::size_t m) const;
  void set_params(std::size_t m, double alpha, double beta, double rho);

  Piece log_intensity(std::size_t m, double t, std::size_t n) const override;
  Piece segment(std::size_t m, double a, double b, std::size_t n) const override;
  double max_intensity(std::size_t m, double a, double b, std::size_t n) const override;

  void initialize_from(const EventSequence& train) override;
  nlohmann::json describe() const override;
  static SelfCorrectingModel from_json(const nlohmann::json& j);
  std::unique_ptr<PointProcessModel> clone() const override {
    return std::make_unique<SelfCorrectingModel>(*this);
  }
};

}  // namespace dhp

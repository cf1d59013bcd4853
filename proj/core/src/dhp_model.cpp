#include "dhp/dhp_model.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dhp {

DhpModel::DhpModel(std::size_t num_marks, KernelSpec kernel, LatentDynamics dynamics, bool pairwise_decay)
    : ExcitationModel(num_marks, kernel, pairwise_decay), dynamics_(std::move(dynamics)) {
  if (dynamics_.num_marks() != num_marks) throw std::invalid_argument("dynamics and model disagree on marks");
}

DhpModel DhpModel::create(const DhpConfig& config, double time_scale, std::uint64_t seed) {
  return DhpModel(config.num_marks, config.kernel,
                  MixtureIntegralDynamics::random(config.num_marks, config.dynamics, time_scale, seed),
                  config.pairwise_decay);
}

void DhpModel::set_dynamics(LatentDynamics dynamics) {
  if (dynamics.num_marks() != num_marks()) throw std::invalid_argument("dynamics and model disagree on marks");
  dynamics_ = std::move(dynamics);
}

double DhpModel::transformed_interval(std::size_t m, double t, double t_j) const {
  if (!(t_j <= t)) throw std::invalid_argument("transformed_interval: need t_j <= t");
  const double times[2] = {t_j, t};
  double F[2], f[2];
  dynamics_.evaluate(m, times, F, f);
  return std::max(0.0, F[1] - F[0]);
}

void DhpModel::transform(std::size_t m, std::span<const double> times, std::span<double> F,
                         std::span<double> f) const {
  dynamics_.evaluate(m, times, F, f);
}

double DhpModel::derivative_bound(std::size_t m, double a, double b) const {
  return dynamics_.derivative_bound(m, a, b);
}

void DhpModel::transform_gradient(std::size_t m, std::span<const double> times, std::span<const double> adj_F,
                                  std::span<const double> adj_f, std::span<double> grad) const {
  dynamics_.accumulate_gradient(m, times, adj_F, adj_f, grad);
}

nlohmann::json DhpModel::describe() const {
  auto j = excitation_describe();
  if (const auto* net = dynamics_.learned()) {
    std::vector<double> pi;
    for (std::size_t c = 0; c < net->config().components; ++c) pi.push_back(net->mixture_weight(c));
    j["mixture_weights"] = pi;
    j["base_slope"] = net->base_slope();
  } else {
    j["dynamics"] = dynamics_.to_json();
  }
  return j;
}

nlohmann::json DhpModel::to_json() const {
  nlohmann::json meta = {{"kernel", std::string(to_string(kernel().family))},
                         {"power", kernel().power},
                         {"M", num_marks()},
                         {"pairwise_decay", pairwise_decay()}};
  if (const auto* net = dynamics_.learned()) {
    meta["C"] = net->config().components;
    meta["L"] = net->config().layers;
    meta["H"] = net->config().hidden;
  }
  auto params = excitation_params_json();
  params["dynamics"] = dynamics_.to_json();
  return {{"model_type", "dhp"}, {"meta", meta}, {"params", params}};
}

DhpModel DhpModel::from_json(const nlohmann::json& j) {
  const auto& meta = j.at("meta");
  KernelSpec kernel{parse_kernel_family(meta.at("kernel").get<std::string>()), meta.value("power", 2.0)};
  const auto& params = j.at("params");
  DhpModel model(meta.at("M").get<std::size_t>(), kernel, LatentDynamics::from_json(params.at("dynamics")),
                 meta.value("pairwise_decay", false));
  model.load_excitation_params(params);
  return model;
}

DhpModel inject_dynamics(const ExcitationModel& model, LatentDynamics dynamics) {
  DhpModel out(model.num_marks(), model.kernel(), dynamics, model.pairwise_decay());
  const std::size_t M = model.num_marks();
  const std::size_t core = M + M * M + (model.pairwise_decay() ? M * M : M);
  auto raw = model.parameters();
  raw.resize(core);
  const auto extra = dynamics.parameters();
  raw.insert(raw.end(), extra.begin(), extra.end());
  out.set_parameters(raw);
  return out;
}

}  // namespace dhp

#include "dhp/latent_dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dhp/autodiff.hpp"
#include "dhp/numeric.hpp"
#include "dhp/random.hpp"

namespace dhp {

namespace {

using ad::Var;

// Offsets into one network block.
struct Layout {
  std::size_t layers;
  std::size_t hidden;

  std::size_t first_weight() const { return 0; }
  std::size_t first_bias() const { return hidden; }
  // Layer l >= 1 (0-based) starts after the first layer's 2H entries.
  std::size_t weight(std::size_t l) const { return 2 * hidden + (l - 1) * (hidden * hidden + hidden); }
  std::size_t bias(std::size_t l) const { return weight(l) + hidden * hidden; }
  std::size_t output() const { return 2 * hidden + (layers - 1) * (hidden * hidden + hidden); }
  std::size_t size() const { return output() + hidden; }
};

template <class W, class U>
using Result = decltype(std::declval<W>() * std::declval<U>());

template <class R>
struct NetworkOutput {
  R value;
  R slope;
};

// Forward pass of one monotonic network over constrained parameters `p`.
// With WithSlope the input tangent du = 1 is pushed through alongside the
// values; that branch requires W and the result type to coincide.
template <bool WithSlope, class W, class U>
NetworkOutput<Result<W, U>> network_forward(const Layout& lay, std::span<const W> p, const U& u) {
  using R = Result<W, U>;
  using std::tanh;
  using dhp::sigmoid;
  using dhp::softplus;
  using ad::sigmoid;
  using ad::softplus;
  using ad::tanh;

  const std::size_t H = lay.hidden;
  std::vector<R> h, dh, next, dnext;
  h.reserve(H);
  next.reserve(H);
  if constexpr (WithSlope) {
    dh.reserve(H);
    dnext.reserve(H);
  }

  auto activate = [&](const R& z, bool last, auto& out, auto& dout, const auto* dz) {
    if (last) {
      out.push_back(softplus(z));
      if constexpr (WithSlope) dout.push_back(sigmoid(z) * *dz);
    } else {
      R t = tanh(z);
      if constexpr (WithSlope) dout.push_back((1.0 - t * t) * *dz);
      out.push_back(std::move(t));
    }
  };

  bool last = lay.layers == 1;
  for (std::size_t k = 0; k < H; ++k) {
    const W& w = p[lay.first_weight() + k];
    R z = w * u + p[lay.first_bias() + k];
    if constexpr (WithSlope) {
      const R dz = w;
      activate(z, last, h, dh, &dz);
    } else {
      activate(z, last, h, dh, static_cast<const R*>(nullptr));
    }
  }

  for (std::size_t l = 1; l < lay.layers; ++l) {
    last = l + 1 == lay.layers;
    next.clear();
    if constexpr (WithSlope) dnext.clear();
    const std::size_t wo = lay.weight(l);
    const std::size_t bo = lay.bias(l);
    for (std::size_t k = 0; k < H; ++k) {
      const W* row = p.data() + wo + k * H;
      R z = row[0] * h[0] + p[bo + k];
      for (std::size_t j = 1; j < H; ++j) z = z + row[j] * h[j];
      if constexpr (WithSlope) {
        R dz = row[0] * dh[0];
        for (std::size_t j = 1; j < H; ++j) dz = dz + row[j] * dh[j];
        activate(z, last, next, dnext, &dz);
      } else {
        activate(z, last, next, dnext, static_cast<const R*>(nullptr));
      }
    }
    std::swap(h, next);
    if constexpr (WithSlope) std::swap(dh, dnext);
  }

  const std::size_t bo = lay.output();
  R value = p[bo] * h[0];
  for (std::size_t k = 1; k < H; ++k) value = value + p[bo + k] * h[k];
  if constexpr (WithSlope) {
    R slope = p[bo] * dh[0];
    for (std::size_t k = 1; k < H; ++k) slope = slope + p[bo + k] * dh[k];
    return {std::move(value), std::move(slope)};
  } else {
    return {value, value};
  }
}

std::vector<double> constrain(const Layout& lay, std::span<const double> raw) {
  std::vector<double> out(raw.begin(), raw.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (MonotonicNetwork::is_weight(lay.layers, lay.hidden, i)) out[i] = softplus(out[i]);
  return out;
}

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("malformed number '" + std::string(s) + "' in dynamics profile");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto at = s.find(sep, pos);
    out.push_back(s.substr(pos, at == std::string_view::npos ? at : at - pos));
    if (at == std::string_view::npos) break;
    pos = at + 1;
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void DynamicsConfig::validate() const {
  if (components < 1) throw std::invalid_argument("dynamics: need at least one mixture component");
  if (layers < 1) throw std::invalid_argument("dynamics: need at least one layer");
  if (hidden < 1) throw std::invalid_argument("dynamics: need at least one hidden unit");
}

// ---------------------------------------------------------------------------
// MonotonicNetwork

MonotonicNetwork::MonotonicNetwork(std::size_t layers, std::size_t hidden, std::span<const double> raw)
    : layers_(layers), hidden_(hidden), raw_(raw) {
  if (raw.size() != parameter_count(layers, hidden))
    throw std::invalid_argument("MonotonicNetwork: parameter block has the wrong size");
}

std::size_t MonotonicNetwork::parameter_count(std::size_t layers, std::size_t hidden) {
  return Layout{layers, hidden}.size();
}

bool MonotonicNetwork::is_weight(std::size_t layers, std::size_t hidden, std::size_t index) {
  const Layout lay{layers, hidden};
  if (index < lay.first_bias()) return true;
  if (index < lay.weight(1)) return false;
  if (index >= lay.output()) return true;
  const std::size_t within = (index - lay.weight(1)) % (hidden * hidden + hidden);
  return within < hidden * hidden;
}

std::vector<double> MonotonicNetwork::constrained() const { return constrain({layers_, hidden_}, raw_); }

double MonotonicNetwork::value(double u) const {
  const auto p = constrained();
  return network_forward<false, double, double>({layers_, hidden_}, std::span<const double>(p), u).value;
}

double MonotonicNetwork::slope(double u) const {
  const auto p = constrained();
  return network_forward<true, double, double>({layers_, hidden_}, std::span<const double>(p), u).slope;
}

// ---------------------------------------------------------------------------
// MixtureIntegralDynamics

MixtureIntegralDynamics::MixtureIntegralDynamics(std::size_t num_marks, DynamicsConfig config,
                                                 double time_scale, std::vector<double> raw)
    : num_marks_(num_marks),
      config_(config),
      time_scale_(time_scale),
      block_size_(MonotonicNetwork::parameter_count(config.layers, config.hidden)),
      raw_(std::move(raw)) {
  config_.validate();
  if (num_marks_ == 0) throw std::invalid_argument("dynamics: need at least one mark");
  if (!(time_scale_ > 0.0) || !std::isfinite(time_scale_))
    throw std::invalid_argument("dynamics: time scale must be positive");
  const std::size_t expected = num_marks_ * config_.components * block_size_ + config_.components + 1;
  if (raw_.size() != expected)
    throw std::invalid_argument("dynamics: expected " + std::to_string(expected) + " parameters, got " +
                                std::to_string(raw_.size()));
}

MixtureIntegralDynamics MixtureIntegralDynamics::random(std::size_t num_marks, DynamicsConfig config,
                                                        double time_scale, std::uint64_t seed) {
  config.validate();
  const std::size_t block = MonotonicNetwork::parameter_count(config.layers, config.hidden);
  std::vector<double> raw(num_marks * config.components * block + config.components + 1);
  Xoshiro256 rng(seed);
  for (auto& v : raw) v = rng.normal(0.0, 0.1);
  // Weights start near 1/fan_in so each network's slope is at most about 1,
  // and the mixture starts with f_m between 0.5 and 1.
  const double first = softplus_inverse(1.0), rest = softplus_inverse(1.0 / static_cast<double>(config.hidden));
  for (std::size_t b = 0; b < num_marks * config.components; ++b)
    for (std::size_t i = 0; i < block; ++i)
      if (MonotonicNetwork::is_weight(config.layers, config.hidden, i))
        raw[b * block + i] += i < config.hidden ? first : rest;
  const std::size_t mix = num_marks * config.components * block;
  for (std::size_t c = 0; c < config.components; ++c)
    raw[mix + c] += softplus_inverse(0.5 / static_cast<double>(config.components));
  raw.back() = softplus_inverse(0.5);
  return MixtureIntegralDynamics(num_marks, config, time_scale, std::move(raw));
}

MixtureIntegralDynamics MixtureIntegralDynamics::identity(std::size_t num_marks, DynamicsConfig config,
                                                          double time_scale) {
  config.validate();
  const std::size_t block = MonotonicNetwork::parameter_count(config.layers, config.hidden);
  std::vector<double> raw(num_marks * config.components * block + config.components + 1, 0.0);
  // softplus(-1000) underflows to exactly zero.
  for (std::size_t c = 0; c < config.components; ++c) raw[raw.size() - 1 - config.components + c] = -1000.0;
  raw.back() = softplus_inverse(1.0);
  return MixtureIntegralDynamics(num_marks, config, time_scale, std::move(raw));
}

void MixtureIntegralDynamics::set_parameters(std::span<const double> raw) {
  if (raw.size() != raw_.size()) throw std::invalid_argument("dynamics: parameter vector has the wrong size");
  std::copy(raw.begin(), raw.end(), raw_.begin());
}

std::vector<std::string> MixtureIntegralDynamics::parameter_names() const {
  std::vector<std::string> names;
  names.reserve(raw_.size());
  for (std::size_t m = 0; m < num_marks_; ++m)
    for (std::size_t c = 0; c < config_.components; ++c)
      for (std::size_t i = 0; i < block_size_; ++i)
        names.push_back("dyn.m" + std::to_string(m) + ".c" + std::to_string(c) + "." + std::to_string(i));
  for (std::size_t c = 0; c < config_.components; ++c) names.push_back("dyn.pi" + std::to_string(c));
  names.push_back("dyn.b0");
  return names;
}

std::size_t MixtureIntegralDynamics::block_offset(std::size_t mark, std::size_t component) const {
  return (mark * config_.components + component) * block_size_;
}

std::size_t MixtureIntegralDynamics::mixture_offset() const {
  return num_marks_ * config_.components * block_size_;
}

MonotonicNetwork MixtureIntegralDynamics::network(std::size_t mark, std::size_t component) const {
  if (mark >= num_marks_ || component >= config_.components) throw std::out_of_range("dynamics: bad network index");
  return MonotonicNetwork(config_.layers, config_.hidden,
                          std::span<const double>(raw_).subspan(block_offset(mark, component), block_size_));
}

double MixtureIntegralDynamics::mixture_weight(std::size_t component) const {
  return softplus(raw_.at(mixture_offset() + component));
}

double MixtureIntegralDynamics::base_slope() const { return softplus(raw_.back()); }

double MixtureIntegralDynamics::integral(std::size_t mark, double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("dynamics: time must be >= 0");
  double F = 0.0, f = 0.0;
  evaluate(mark, std::span<const double>(&t, 1), std::span<double>(&F, 1), std::span<double>(&f, 1));
  return F;
}

double MixtureIntegralDynamics::derivative(std::size_t mark, double t) const {
  if (mark >= num_marks_) throw std::out_of_range("dynamics: mark out of range");
  if (!(t >= 0.0)) throw std::invalid_argument("dynamics: time must be >= 0");
  const Layout lay{config_.layers, config_.hidden};
  ad::Tape tape;
  const Var time = tape.variable(t);
  const Var u = time / time_scale_;
  Var total = base_slope() * time;
  for (std::size_t c = 0; c < config_.components; ++c) {
    const double pi = mixture_weight(c);
    const auto p = constrain(lay, std::span<const double>(raw_).subspan(block_offset(mark, c), block_size_));
    const Var phi = network_forward<false, double, Var>(lay, std::span<const double>(p), u).value;
    total = total + (pi * time_scale_) * phi;
  }
  return tape.backward(total).at(0);
}

void MixtureIntegralDynamics::evaluate(std::size_t mark, std::span<const double> times,
                                       std::span<double> integral, std::span<double> derivative) const {
  if (mark >= num_marks_) throw std::out_of_range("dynamics: mark out of range");
  if (integral.size() != times.size() || derivative.size() != times.size())
    throw std::invalid_argument("dynamics: output spans must match the time grid");
  const Layout lay{config_.layers, config_.hidden};
  const double b0 = base_slope();
  std::vector<std::vector<double>> params(config_.components);
  std::vector<double> pis(config_.components);
  std::vector<double> anchor(config_.components);
  for (std::size_t c = 0; c < config_.components; ++c) {
    pis[c] = mixture_weight(c);
    params[c] = constrain(lay, std::span<const double>(raw_).subspan(block_offset(mark, c), block_size_));
    anchor[c] = network_forward<false, double, double>(lay, std::span<const double>(params[c]), 0.0).value;
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double u = t / time_scale_;
    double F = 0.0;
    double f = b0;
    for (std::size_t c = 0; c < config_.components; ++c) {
      if (pis[c] == 0.0) continue;
      const auto out = network_forward<true, double, double>(lay, std::span<const double>(params[c]), u);
      F += pis[c] * (out.value - anchor[c]);
      f += pis[c] * out.slope;
    }
    integral[k] = time_scale_ * F + b0 * t;
    derivative[k] = f;
  }
}

void MixtureIntegralDynamics::accumulate_gradient(std::size_t mark, std::span<const double> times,
                                                  std::span<const double> adj_integral,
                                                  std::span<const double> adj_derivative,
                                                  std::span<double> grad) const {
  if (grad.size() != raw_.size()) throw std::invalid_argument("dynamics: gradient buffer has the wrong size");
  if (adj_integral.size() != times.size() || adj_derivative.size() != times.size())
    throw std::invalid_argument("dynamics: adjoint spans must match the time grid");
  const Layout lay{config_.layers, config_.hidden};
  const std::size_t C = config_.components;
  const std::size_t P = block_size_;

  // Leaves: C constrained network blocks, then π_1..π_C, then b0.
  std::vector<double> leaf_values(C * P + C + 1);
  for (std::size_t c = 0; c < C; ++c) {
    const auto p = constrain(lay, std::span<const double>(raw_).subspan(block_offset(mark, c), P));
    std::copy(p.begin(), p.end(), leaf_values.begin() + static_cast<std::ptrdiff_t>(c * P));
    leaf_values[C * P + c] = mixture_weight(c);
  }
  leaf_values.back() = base_slope();

  std::vector<double> leaf_grad(leaf_values.size(), 0.0);
  std::vector<double> scratch;
  std::vector<Var> leaves;
  leaves.reserve(leaf_values.size());
  ad::Tape tape;

  // The anchor F(0) enters every F value with a minus sign.
  double anchor_adjoint = 0.0;
  for (double a : adj_integral) anchor_adjoint -= a;

  auto backprop_point = [&](double t, double aF, double af) {
    if (aF == 0.0 && af == 0.0) return;
    tape.clear();
    leaves.clear();
    for (double v : leaf_values) leaves.push_back(tape.variable(v));
    const double u = t / time_scale_;
    const std::span<const Var> all(leaves);
    const Var& b0 = leaves.back();
    Var F = b0 * t;
    Var f = b0 * 1.0;
    for (std::size_t c = 0; c < C; ++c) {
      const auto out = network_forward<true, Var, double>(lay, all.subspan(c * P, P), u);
      const Var& pi = leaves[C * P + c];
      F = F + (pi * out.value) * time_scale_;
      f = f + pi * out.slope;
    }
    const ad::Tape::Seed seeds[2] = {{F, aF}, {f, af}};
    tape.accumulate(seeds, leaf_grad, scratch);
  };

  for (std::size_t k = 0; k < times.size(); ++k) backprop_point(times[k], adj_integral[k], adj_derivative[k]);
  backprop_point(0.0, anchor_adjoint, 0.0);

  // Chain through softplus back to raw storage.
  for (std::size_t c = 0; c < C; ++c) {
    const std::size_t off = block_offset(mark, c);
    for (std::size_t i = 0; i < P; ++i) {
      const double g = leaf_grad[c * P + i];
      grad[off + i] += MonotonicNetwork::is_weight(lay.layers, lay.hidden, i) ? g * sigmoid(raw_[off + i]) : g;
    }
    grad[mixture_offset() + c] += leaf_grad[C * P + c] * sigmoid(raw_[mixture_offset() + c]);
  }
  grad.back() += leaf_grad.back() * sigmoid(raw_.back());
}

double MixtureIntegralDynamics::derivative_bound(std::size_t mark, double a, double b) const {
  constexpr std::size_t kGrid = 33;
  std::vector<double> times(kGrid), F(kGrid), f(kGrid);
  for (std::size_t k = 0; k < kGrid; ++k) times[k] = a + (b - a) * static_cast<double>(k) / (kGrid - 1);
  evaluate(mark, times, F, f);
  return 1.2 * *std::max_element(f.begin(), f.end());
}

nlohmann::json MixtureIntegralDynamics::to_json() const {
  nlohmann::json marks = nlohmann::json::array();
  for (std::size_t m = 0; m < num_marks_; ++m) {
    nlohmann::json comps = nlohmann::json::array();
    for (std::size_t c = 0; c < config_.components; ++c) {
      const auto first = raw_.begin() + static_cast<std::ptrdiff_t>(block_offset(m, c));
      comps.push_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(block_size_)));
    }
    marks.push_back(std::move(comps));
  }
  const auto mix = raw_.begin() + static_cast<std::ptrdiff_t>(mixture_offset());
  return {
      {"type", "mixture"},
      {"components", config_.components},
      {"layers", config_.layers},
      {"hidden", config_.hidden},
      {"T_scale", time_scale_},
      {"networks_raw", std::move(marks)},
      {"pi_raw", std::vector<double>(mix, mix + static_cast<std::ptrdiff_t>(config_.components))},
      {"b0_raw", raw_.back()},
  };
}

MixtureIntegralDynamics MixtureIntegralDynamics::from_json(const nlohmann::json& j) {
  DynamicsConfig cfg{j.at("components").get<std::size_t>(), j.at("layers").get<std::size_t>(),
                     j.at("hidden").get<std::size_t>()};
  const auto& marks = j.at("networks_raw");
  std::vector<double> raw;
  for (const auto& comps : marks) {
    if (comps.size() != cfg.components) throw Error("dynamics: component count mismatch in checkpoint");
    for (const auto& block : comps) {
      const auto v = block.get<std::vector<double>>();
      raw.insert(raw.end(), v.begin(), v.end());
    }
  }
  const auto pi = j.at("pi_raw").get<std::vector<double>>();
  raw.insert(raw.end(), pi.begin(), pi.end());
  raw.push_back(j.at("b0_raw").get<double>());
  return MixtureIntegralDynamics(marks.size(), cfg, j.at("T_scale").get<double>(), std::move(raw));
}

// ---------------------------------------------------------------------------
// AnalyticProfile

AnalyticProfile AnalyticProfile::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("constant dynamics must be >= 0");
  AnalyticProfile p;
  p.kind_ = Kind::Constant;
  p.a_ = {value};
  return p;
}

AnalyticProfile AnalyticProfile::ramp(double intercept, double slope) {
  if (!std::isfinite(intercept) || !std::isfinite(slope)) throw std::invalid_argument("ramp dynamics must be finite");
  AnalyticProfile p;
  p.kind_ = Kind::Ramp;
  p.a_ = {intercept};
  p.b_ = {slope};
  return p;
}

AnalyticProfile AnalyticProfile::piecewise(std::vector<double> starts, std::vector<double> values) {
  if (starts.empty() || starts.size() != values.size())
    throw std::invalid_argument("piecewise dynamics needs matching, non-empty starts and values");
  if (starts.front() != 0.0) throw std::invalid_argument("piecewise dynamics must start at t = 0");
  for (std::size_t k = 1; k < starts.size(); ++k)
    if (!(starts[k] > starts[k - 1])) throw std::invalid_argument("piecewise starts must increase");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("piecewise values must be >= 0");
  AnalyticProfile p;
  p.kind_ = Kind::Piecewise;
  p.a_ = std::move(starts);
  p.b_ = std::move(values);
  return p;
}

AnalyticProfile AnalyticProfile::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown dynamics spec '" + text + "'");
  const std::string_view kind = std::string_view(text).substr(0, colon);
  const std::string_view body = std::string_view(text).substr(colon + 1);
  if (kind == "constant") return constant(parse_number(body));
  if (kind == "ramp") {
    const auto parts = split(body, ',');
    if (parts.size() != 2) throw std::invalid_argument("ramp spec must be 'ramp:intercept,slope'");
    return ramp(parse_number(parts[0]), parse_number(parts[1]));
  }
  if (kind == "piecewise") {
    std::vector<double> starts, values;
    for (auto piece : split(body, ',')) {
      const auto eq = piece.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("piecewise spec must be 'piecewise:t0=v0,t1=v1,...'");
      starts.push_back(parse_number(piece.substr(0, eq)));
      values.push_back(parse_number(piece.substr(eq + 1)));
    }
    return piecewise(std::move(starts), std::move(values));
  }
  throw std::invalid_argument("unknown dynamics spec '" + text + "'");
}

std::string AnalyticProfile::to_string() const {
  switch (kind_) {
    case Kind::Constant: return "constant:" + format_number(a_[0]);
    case Kind::Ramp: return "ramp:" + format_number(a_[0]) + "," + format_number(b_[0]);
    case Kind::Piecewise: {
      std::string s = "piecewise:";
      for (std::size_t k = 0; k < a_.size(); ++k) {
        if (k) s += ',';
        s += format_number(a_[k]) + "=" + format_number(b_[k]);
      }
      return s;
    }
  }
  return {};
}

double AnalyticProfile::value(double t) const {
  switch (kind_) {
    case Kind::Constant: return a_[0];
    case Kind::Ramp: return std::max(0.0, a_[0] + b_[0] * t);
    case Kind::Piecewise: {
      const auto it = std::upper_bound(a_.begin(), a_.end(), t);
      const auto k = it == a_.begin() ? 0 : static_cast<std::size_t>(it - a_.begin()) - 1;
      return b_[k];
    }
  }
  return 0.0;
}

double AnalyticProfile::integral(double t) const {
  switch (kind_) {
    case Kind::Constant: return a_[0] * t;
    case Kind::Ramp: {
      const double a = a_[0];
      const double b = b_[0];
      auto prim = [&](double x) { return a * x + 0.5 * b * x * x; };
      if (b == 0.0) return std::max(0.0, a) * t;
      const double root = -a / b;
      double lo = 0.0, hi = t;
      if (b > 0.0) {
        lo = std::clamp(root, 0.0, t);
      } else {
        hi = std::clamp(root, 0.0, t);
      }
      return prim(hi) - prim(lo);
    }
    case Kind::Piecewise: {
      double sum = 0.0;
      for (std::size_t k = 0; k < a_.size() && a_[k] < t; ++k) {
        const double end = k + 1 < a_.size() ? std::min(a_[k + 1], t) : t;
        sum += b_[k] * (end - a_[k]);
      }
      return sum;
    }
  }
  return 0.0;
}

double AnalyticProfile::max_on(double a, double b) const {
  switch (kind_) {
    case Kind::Constant: return a_[0];
    case Kind::Ramp: return std::max(value(a), value(b));
    case Kind::Piecewise: {
      double best = value(a);
      for (std::size_t k = 0; k < a_.size(); ++k)
        if (a_[k] > a && a_[k] <= b) best = std::max(best, b_[k]);
      return best;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// AnalyticDynamics

AnalyticDynamics::AnalyticDynamics(std::size_t num_marks, AnalyticProfile profile)
    : profiles_(num_marks, profile) {
  if (num_marks == 0) throw std::invalid_argument("dynamics: need at least one mark");
}

AnalyticDynamics::AnalyticDynamics(std::vector<AnalyticProfile> profiles) : profiles_(std::move(profiles)) {
  if (profiles_.empty()) throw std::invalid_argument("dynamics: need at least one mark");
}

nlohmann::json AnalyticDynamics::to_json() const {
  std::vector<std::string> specs;
  for (const auto& p : profiles_) specs.push_back(p.to_string());
  return {{"type", "analytic"}, {"profiles", specs}};
}

AnalyticDynamics AnalyticDynamics::from_json(const nlohmann::json& j) {
  std::vector<AnalyticProfile> profiles;
  for (const auto& s : j.at("profiles")) profiles.push_back(AnalyticProfile::parse(s.get<std::string>()));
  return AnalyticDynamics(std::move(profiles));
}

// ---------------------------------------------------------------------------
// LatentDynamics

std::size_t LatentDynamics::num_marks() const {
  return std::visit([](const auto& d) { return d.num_marks(); }, impl_);
}

double LatentDynamics::integral(std::size_t mark, double t) const {
  return std::visit([&](const auto& d) { return d.integral(mark, t); }, impl_);
}

double LatentDynamics::derivative(std::size_t mark, double t) const {
  return std::visit([&](const auto& d) { return d.derivative(mark, t); }, impl_);
}

void LatentDynamics::evaluate(std::size_t mark, std::span<const double> times, std::span<double> integral,
                              std::span<double> derivative) const {
  if (const auto* net = learned()) {
    net->evaluate(mark, times, integral, derivative);
    return;
  }
  const auto& profile = analytic()->profile(mark);
  for (std::size_t k = 0; k < times.size(); ++k) {
    integral[k] = profile.integral(times[k]);
    derivative[k] = profile.value(times[k]);
  }
}

double LatentDynamics::derivative_bound(std::size_t mark, double a, double b) const {
  return std::visit([&](const auto& d) { return d.derivative_bound(mark, a, b); }, impl_);
}

std::size_t LatentDynamics::num_parameters() const {
  const auto* net = learned();
  return net ? net->num_parameters() : 0;
}

std::vector<double> LatentDynamics::parameters() const {
  const auto* net = learned();
  if (!net) return {};
  return {net->parameters().begin(), net->parameters().end()};
}

void LatentDynamics::set_parameters(std::span<const double> raw) {
  if (auto* net = std::get_if<MixtureIntegralDynamics>(&impl_)) {
    net->set_parameters(raw);
  } else if (!raw.empty()) {
    throw std::invalid_argument("analytic dynamics have no parameters");
  }
}

std::vector<std::string> LatentDynamics::parameter_names() const {
  const auto* net = learned();
  return net ? net->parameter_names() : std::vector<std::string>{};
}

void LatentDynamics::accumulate_gradient(std::size_t mark, std::span<const double> times,
                                         std::span<const double> adj_integral,
                                         std::span<const double> adj_derivative,
                                         std::span<double> grad) const {
  if (const auto* net = learned()) net->accumulate_gradient(mark, times, adj_integral, adj_derivative, grad);
}

nlohmann::json LatentDynamics::to_json() const {
  return std::visit([](const auto& d) { return d.to_json(); }, impl_);
}

LatentDynamics LatentDynamics::from_json(const nlohmann::json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "mixture") return MixtureIntegralDynamics::from_json(j);
  if (type == "analytic") return AnalyticDynamics::from_json(j);
  throw Error("unknown dynamics type '" + type + "'");
}

std::vector<DynamicsSample> export_grid(const LatentDynamics& dynamics, std::size_t mark, double start,
                                        double end, std::size_t points) {
  if (points < 2) throw std::invalid_argument("export_grid: need at least two points");
  if (!(start >= 0.0) || !(end > start)) throw std::invalid_argument("export_grid: need 0 <= start < end");
  std::vector<double> times(points), F(points), f(points);
  for (std::size_t k = 0; k < points; ++k)
    times[k] = k + 1 == points ? end : start + (end - start) * static_cast<double>(k) / static_cast<double>(points - 1);
  dynamics.evaluate(mark, times, F, f);
  std::vector<DynamicsSample> out(points);
  for (std::size_t k = 0; k < points; ++k) out[k] = {times[k], f[k], F[k]};
  return out;
}

}  // namespace dhp

#pragma once

// Independent reference computations for tests: adaptive quadrature, finite
// differences, and small synthetic fixtures.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dhp/baselines.hpp"
#include "dhp/dhp_model.hpp"
#include "dhp/event_store.hpp"
#include "dhp/random.hpp"

namespace dhp::testing {

/// Adaptive 61-point Gauss–Kronrod over [a, b]; b may be +infinity.
inline double quadrature(const std::function<double(double)>& f, double a, double b, double tol = 1e-11) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol);
}

/// Quadrature split at each breakpoint inside (a, b).
inline double quadrature_split(const std::function<double(double)>& f, double a, double b,
                               const std::vector<double>& breaks, double tol = 1e-11) {
  double total = 0.0, lo = a;
  for (double x : breaks) {
    if (x <= lo || x >= b) continue;
    total += quadrature(f, lo, x, tol);
    lo = x;
  }
  return total + quadrature(f, lo, b, tol);
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double relative_error(double got, double want) {
  const double scale = std::max(std::abs(want), std::numeric_limits<double>::min());
  return std::abs(got - want) / scale;
}

/// Uniform random times on [0, horizon) with uniform marks.
inline EventSequence random_sequence(std::size_t marks, std::size_t n, double horizon, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  std::vector<Event> events(n);
  for (auto& e : events) e = {rng.uniform() * horizon, static_cast<std::size_t>(rng.index(marks))};
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  return EventSequence(std::move(events), marks, horizon);
}

inline Matrix matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values) {
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (double v : values) m.data()[k++] = v;
  return m;
}

/// Hawkes model with the given constrained parameters.
inline HawkesModel hawkes(KernelFamily family, std::vector<double> mu, const Matrix& alpha, std::vector<double> beta) {
  HawkesModel h(mu.size(), KernelSpec{family, 2.0});
  h.set_mu(mu);
  h.set_alpha(alpha);
  h.set_beta(beta);
  return h;
}

/// DHP with random network dynamics and the given excitation parameters.
inline DhpModel random_dhp(KernelFamily family, std::size_t marks, double time_scale, std::uint64_t seed,
                           DynamicsConfig dyn = {}) {
  DhpModel model = DhpModel::create({marks, KernelSpec{family, 2.0}, dyn, false}, time_scale, seed);
  Xoshiro256 rng(seed ^ 0x5eedULL);
  std::vector<double> mu(marks), beta(marks);
  Matrix alpha(marks, marks);
  for (auto& v : mu) v = 0.2 + 0.3 * rng.uniform();
  for (auto& v : beta) v = 0.5 + rng.uniform();
  for (auto& v : alpha.data()) v = family == KernelFamily::PowerLaw ? 1.0 + 2.0 * rng.uniform() : 0.1 + 0.3 * rng.uniform();
  model.set_mu(mu);
  model.set_alpha(alpha);
  model.set_beta(beta);
  return model;
}

}  // namespace dhp::testing

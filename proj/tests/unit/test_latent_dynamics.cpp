#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "dhp/latent_dynamics.hpp"
#include "dhp/random.hpp"
#include "oracles.hpp"

using namespace dhp;
using dhp::testing::quadrature;
using dhp::testing::relative_error;

TEST_CASE("identity dynamics reduce to F(t) = t") {
  const auto dyn = MixtureIntegralDynamics::identity(2, {}, 50.0);
  for (double t : {0.0, 0.5, 3.0, 120.0}) {
    CHECK(dyn.integral(1, t) == doctest::Approx(t).epsilon(1e-15));
    CHECK(dyn.derivative(0, t) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("integral is anchored at zero") {
  const auto dyn = MixtureIntegralDynamics::random(3, {}, 10.0, 1);
  for (std::size_t m = 0; m < 3; ++m) CHECK(dyn.integral(m, 0.0) == 0.0);
}

TEST_CASE("integral equals quadrature of the derivative") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto dyn = MixtureIntegralDynamics::random(2, {3, 3, 8}, 4.0, seed);
    for (std::size_t m = 0; m < 2; ++m) {
      const double want = quadrature([&](double t) { return dyn.derivative(m, t); }, 0.0, 2.0);
      CHECK(relative_error(dyn.integral(m, 2.0), want) <= 1e-6);
      const double part = quadrature([&](double t) { return dyn.derivative(m, t); }, 0.7, 3.1);
      CHECK(relative_error(dyn.integral(m, 3.1) - dyn.integral(m, 0.7), part) <= 1e-6);
    }
  }
}

TEST_CASE("derivative matches central differences of the integral") {
  const auto dyn = MixtureIntegralDynamics::random(1, {2, 2, 8}, 5.0, 17);
  for (double t : {0.3, 1.7, 4.2, 9.0}) {
    const double h = 1e-5;
    const double fd = (dyn.integral(0, t + h) - dyn.integral(0, t - h)) / (2 * h);
    CHECK(relative_error(dyn.derivative(0, t), fd) <= 1e-5);
  }
}

TEST_CASE("tangent route and reverse route agree") {
  const auto dyn = MixtureIntegralDynamics::random(2, {3, 2, 8}, 7.0, 4);
  std::vector<double> times{0.0, 0.1, 2.0, 6.5, 20.0}, F(5), f(5);
  dyn.evaluate(1, times, F, f);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(f[k] == doctest::Approx(dyn.derivative(1, times[k])).epsilon(1e-12));
    CHECK(F[k] == dyn.integral(1, times[k]));
  }
}

TEST_CASE("monotone for arbitrary raw parameters") {
  Xoshiro256 rng(123);
  for (int draw = 0; draw < 10; ++draw) {
    const DynamicsConfig cfg{1 + rng.index(3), 1 + rng.index(3), 8};
    auto dyn = MixtureIntegralDynamics::random(1, cfg, 10.0, draw);
    std::vector<double> raw(dyn.parameters().begin(), dyn.parameters().end());
    for (auto& v : raw) v = rng.normal(0.0, 3.0);
    dyn.set_parameters(raw);
    std::vector<double> times(2000), F(2000), f(2000);
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = 30.0 * static_cast<double>(k) / 1999.0;
    dyn.evaluate(0, times, F, f);
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(f[k] >= 0.0);
      if (k) CHECK(F[k] >= F[k - 1]);
    }
  }
}

TEST_CASE("network weights are non-negative after the softplus map") {
  const auto dyn = MixtureIntegralDynamics::random(1, {1, 3, 4}, 1.0, 8);
  const auto net = dyn.network(0, 0);
  const auto p = net.constrained();
  for (std::size_t i = 0; i < p.size(); ++i)
    if (MonotonicNetwork::is_weight(3, 4, i)) CHECK(p[i] >= 0.0);
  CHECK(p.size() == MonotonicNetwork::parameter_count(3, 4));
  CHECK(net.value(0.2) <= net.value(0.9));
}

TEST_CASE("parameter gradient matches finite differences") {
  auto dyn = MixtureIntegralDynamics::random(2, {2, 2, 4}, 3.0, 21);
  const std::vector<double> times{0.4, 1.5, 3.3};
  const std::vector<double> aF{0.7, -0.2, 1.1}, af{0.3, 0.9, -0.4};
  auto objective = [&](const MixtureIntegralDynamics& d) {
    std::vector<double> F(3), f(3);
    d.evaluate(1, times, F, f);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += aF[k] * F[k] + af[k] * f[k];
    return s;
  };
  std::vector<double> grad(dyn.num_parameters(), 0.0);
  dyn.accumulate_gradient(1, times, aF, af, grad);
  std::vector<double> raw(dyn.parameters().begin(), dyn.parameters().end());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    auto up = raw, dn = raw;
    const double h = 1e-6;
    up[k] += h;
    dn[k] -= h;
    auto du = dyn, dd = dyn;
    du.set_parameters(up);
    dd.set_parameters(dn);
    const double fd = (objective(du) - objective(dd)) / (2 * h);
    CHECK(std::abs(grad[k] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("analytic profiles") {
  const auto c = AnalyticProfile::parse("constant:2");
  CHECK(c.integral(3.0) == 6.0);
  const auto pw = AnalyticProfile::parse("piecewise:0=1,50=0.25");
  CHECK(pw.value(10.0) == 1.0);
  CHECK(pw.value(60.0) == 0.25);
  CHECK(pw.integral(100.0) == doctest::Approx(62.5));
  CHECK(pw.integral(100.0) == doctest::Approx(testing::quadrature_split([&](double t) { return pw.value(t); }, 0.0, 100.0, std::vector<double>{50.0})));
  const auto ramp = AnalyticProfile::parse("ramp:1,-0.1");
  CHECK(ramp.value(20.0) == 0.0);
  CHECK(ramp.integral(20.0) == doctest::Approx(5.0));
  CHECK(ramp.max_on(0.0, 20.0) == 1.0);
  CHECK(AnalyticProfile::parse(pw.to_string()).integral(70.0) == pw.integral(70.0));
  CHECK_THROWS(AnalyticProfile::parse("sine:1"));
}

TEST_CASE("grid export") {
  const LatentDynamics constant(AnalyticDynamics(1, AnalyticProfile::constant(1.0)));
  const auto g = export_grid(constant, 0, 0.0, 2.0, 3);
  REQUIRE(g.size() == 3);
  CHECK(g[1].time == 1.0);
  CHECK(g[1].derivative == 1.0);
  CHECK(g[2].integral == 2.0);

  const LatentDynamics net(MixtureIntegralDynamics::random(2, {}, 10.0, 3));
  const auto grid = export_grid(net, 1, 0.0, 10.0, 41);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(grid[k].integral == net.integral(1, grid[k].time));
    CHECK(grid[k].derivative == doctest::Approx(net.derivative(1, grid[k].time)).epsilon(1e-12));
    if (k) CHECK(grid[k].integral >= grid[k - 1].integral);
  }
  CHECK_THROWS(export_grid(net, 0, 0.0, 1.0, 1));
}

TEST_CASE("json round trip") {
  const LatentDynamics a(MixtureIntegralDynamics::random(2, {2, 3, 5}, 9.0, 77));
  const auto b = LatentDynamics::from_json(a.to_json());
  CHECK(b.integral(1, 4.0) == a.integral(1, 4.0));
  const LatentDynamics c(AnalyticDynamics({AnalyticProfile::parse("ramp:2,-0.5"), AnalyticProfile::constant(1)}));
  CHECK(LatentDynamics::from_json(c.to_json()).integral(0, 3.0) == c.integral(0, 3.0));
}

#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "dhp/baselines.hpp"
#include "dhp/evaluate.hpp"
#include "dhp/simulate.hpp"
#include "oracles.hpp"

using namespace dhp;

TEST_CASE("Poisson simulation has the right rate") {
  const auto sim = thinning_simulate(HppModel(1, 2.0), {10000.0, 1});
  const double rate = static_cast<double>(sim.sequence.size()) / 10000.0;
  CHECK(std::abs(rate - 2.0) <= 0.06);
  CHECK(sim.bound_violations == 0);
  CHECK_FALSE(sim.hit_cap);
}

TEST_CASE("identical seeds give identical sequences") {
  const auto model = testing::random_dhp(KernelFamily::PowerLaw, 2, 50.0, 4);
  const auto a = thinning_simulate(model, {50.0, 17});
  const auto b = thinning_simulate(model, {50.0, 17});
  const auto c = thinning_simulate(model, {50.0, 18});
  REQUIRE(a.sequence.size() == b.sequence.size());
  for (std::size_t i = 0; i < a.sequence.size(); ++i) {
    CHECK(a.sequence[i].time == b.sequence[i].time);
    CHECK(a.sequence[i].mark == b.sequence[i].mark);
  }
  CHECK(simulation_sidecar(model, {50.0, 17}, a).dump() == simulation_sidecar(model, {50.0, 17}, b).dump());
  CHECK((c.sequence.size() != a.sequence.size() || c.sequence[0].time != a.sequence[0].time));
}

TEST_CASE("no excitation gives exponential gaps") {
  auto model = testing::random_dhp(KernelFamily::Exponential, 1, 100.0, 6);
  model.set_alpha(testing::matrix(1, 1, {0.0}));
  model.set_mu(std::vector<double>{0.7});
  const auto sim = thinning_simulate(model, {2000.0, 2});
  std::vector<double> gaps;
  double prev = 0.0;
  for (const auto& e : sim.sequence.events()) {
    gaps.push_back(0.7 * (e.time - prev));
    prev = e.time;
  }
  CHECK(ks_exponential(gaps).p_value > 0.01);
}

TEST_CASE("stationary Hawkes rate follows the branching formula") {
  // Kernel mass α/β = 0.5, so the long-run rate is μ / (1 − 0.5).
  const auto h = testing::hawkes(KernelFamily::Exponential, {0.5}, testing::matrix(1, 1, {0.5}), {1.0});
  CHECK(h.branching_ratio() == doctest::Approx(0.5));
  const auto sim = thinning_simulate(h, {20000.0, 9});
  const double rate = static_cast<double>(sim.sequence.size()) / 20000.0;
  CHECK(rate == doctest::Approx(1.0).epsilon(0.05));
  CHECK(sim.warnings.empty());
}

TEST_CASE("simulations pass the time-rescaling check") {
  for (auto family : {KernelFamily::Exponential, KernelFamily::PowerLaw, KernelFamily::Rayleigh}) {
    const auto model = testing::random_dhp(family, 2, 300.0, 21);
    const auto sim = thinning_simulate(model, {300.0, 22});
    CHECK(sim.bound_violations == 0);
    for (const auto& r : residual_diagnostics(model, sim.sequence)) {
      INFO(to_string(family) << " mark " << r.mark << " events " << r.events << " KS " << r.ks.statistic);
      CHECK(r.sufficient);
      CHECK(r.pass_1pct);
    }
  }
}

TEST_CASE("injected constant dynamics") {
  const auto h = testing::hawkes(KernelFamily::Exponential, {0.2}, testing::matrix(1, 1, {0.4}), {1.3});
  const std::vector<Event> hist{{1.0, 0}, {2.5, 0}};
  // f = 1 is the plain Hawkes process.
  const auto one = inject_dynamics(h, AnalyticDynamics(1, AnalyticProfile::constant(1.0)));
  CHECK(one.intensity(0, 3.0, hist) == doctest::Approx(h.intensity(0, 3.0, hist)).epsilon(1e-15));
  // f = 2 with EXP: each history term is 2α exp(−2βΔ).
  const auto two = inject_dynamics(h, AnalyticDynamics(1, AnalyticProfile::constant(2.0)));
  const double want = 0.2 + 2 * 0.4 * (std::exp(-2 * 1.3 * 2.0) + std::exp(-2 * 1.3 * 0.5));
  CHECK(two.intensity(0, 3.0, hist) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("injected piecewise dynamics") {
  const auto profile = AnalyticProfile::piecewise({0.0, 50.0}, {1.0, 0.25});
  const auto h = testing::hawkes(KernelFamily::Exponential, {0.2}, testing::matrix(1, 1, {0.4}), {1.3});
  const auto d = inject_dynamics(h, AnalyticDynamics(1, profile));
  CHECK(d.transformed_interval(0, 60.0, 40.0) == doctest::Approx(10.0 + 2.5));
  const double q = testing::quadrature_split([&](double t) { return profile.value(t); }, 0.0, 100.0, {50.0});
  CHECK(profile.integral(100.0) == doctest::Approx(q).epsilon(1e-10));
  CHECK_THROWS(AnalyticProfile::parse("spline:1,2"));
}

TEST_CASE("explosive parameters warn and stop at the cap") {
  const auto h = testing::hawkes(KernelFamily::Exponential, {1.0}, testing::matrix(1, 1, {2.0}), {1.0});
  const auto sim = thinning_simulate(h, {1000.0, 3, 500});
  CHECK(sim.hit_cap);
  CHECK(sim.sequence.size() == 500);
  REQUIRE_FALSE(sim.warnings.empty());
  CHECK(sim.warnings[0].find("possibly supercritical") != std::string::npos);
}

TEST_CASE("config validation") {
  CHECK_THROWS(SimConfig{0.0, 1}.validate());
  CHECK_THROWS(SimConfig{10.0, 1, 0}.validate());
  CHECK_NOTHROW(SimConfig{10.0, 1}.validate());
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "dhp/baselines.hpp"
#include "dhp/dhp_model.hpp"
#include "dhp/kernels.hpp"
#include "dhp/random.hpp"
#include "dhp/training.hpp"
#include "oracles.hpp"

using namespace dhp;

namespace {

constexpr KernelFamily kFamilies[] = {KernelFamily::Exponential, KernelFamily::PowerLaw, KernelFamily::Rayleigh};

}  // namespace

TEST_CASE("kernel integrals are additive, non-negative and sum to the mass") {
  Xoshiro256 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const KernelSpec spec{kFamilies[trial % 3], 1.2 + 3.0 * rng.uniform()};
    const KernelParams p{0.05 + 2.0 * rng.uniform(), 0.05 + 3.0 * rng.uniform()};
    double a = 5.0 * rng.uniform(), b = 5.0 * rng.uniform(), c = 5.0 * rng.uniform();
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const double ab = kernel_integral(spec, p, a, b), bc = kernel_integral(spec, p, b, c);
    CHECK(ab >= 0.0);
    CHECK(bc >= 0.0);
    CHECK(std::abs(ab + bc - kernel_integral(spec, p, a, c)) <= 1e-12 * std::max(1.0, kernel_mass(spec, p)));
    const double mass = kernel_mass(spec, p);
    CHECK(std::abs(kernel_integral(spec, p, 0.0, std::numeric_limits<double>::infinity()) - mass) <= 1e-12 * mass);
    CHECK(kernel_max(spec, p, a, c) >= kernel_value(spec, p, b) * (1 - 1e-12));
  }
}

TEST_CASE("compensators of every model are additive over time") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto family = kFamilies[seed % 3];
    const auto model = testing::random_dhp(family, 2, 40.0, seed, {2, 2, 4});
    const auto seq = testing::random_sequence(2, 30, 20.0, seed + 1000);
    Xoshiro256 rng(seed);
    const double a = 20.0 + 5.0 * rng.uniform(), b = a + 5.0 * rng.uniform(), c = b + 5.0 * rng.uniform();
    for (std::size_t m = 0; m < 2; ++m) {
      const double whole = model.compensator(m, a, c, seq.events());
      const double parts = model.compensator(m, a, b, seq.events()) + model.compensator(m, b, c, seq.events());
      CHECK(whole >= model.mu(m) * (c - a) * (1 - 1e-12));
      CHECK(testing::relative_error(parts, whole) <= 1e-11);
    }
  }
}

TEST_CASE("intensity stays above the base rate and below the bound") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto model = testing::random_dhp(kFamilies[seed % 3], 2, 40.0, seed + 50, {2, 2, 4});
    const auto seq = testing::random_sequence(2, 25, 10.0, seed + 2000);
    const double t0 = 10.0, window = 3.0;
    const double bound = model.intensity_bound(t0, window, seq.events());
    for (int k = 0; k <= 60; ++k) {
      const double t = t0 + window * k / 60.0;
      double total = 0.0;
      for (std::size_t m = 0; m < 2; ++m) {
        const double lam = model.intensity(m, t, seq.events());
        CHECK(lam >= model.mu(m) * (1 - 1e-12));
        total += lam;
      }
      CHECK(total <= bound * (1 + 1e-12));
    }
  }
}

TEST_CASE("integrated dynamics never decrease") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto model = testing::random_dhp(KernelFamily::Exponential, 2, 100.0, seed + 300,
                                           {1 + seed % 4, 1 + seed % 3, 8});
    for (std::size_t m = 0; m < 2; ++m) {
      double prev = model.dynamics().integral(m, 0.0);
      for (int k = 1; k <= 200; ++k) {
        const double now = model.dynamics().integral(m, 0.5 * k);
        CHECK(now >= prev);
        prev = now;
      }
    }
  }
}

TEST_CASE("count predictions add up across a refined grid without events") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto model = testing::random_dhp(kFamilies[seed % 3], 2, 40.0, seed + 400, {2, 1, 4});
    const auto seq = testing::random_sequence(2, 20, 10.0, seed + 3000);
    const std::vector<double> coarse{10.0, 16.0}, fine{10.0, 12.0, 14.0, 16.0};
    const auto a = model.predict_counts(seq.events(), coarse), b = model.predict_counts(seq.events(), fine);
    for (std::size_t m = 0; m < 2; ++m) {
      const double sum = b(0, m) + b(1, m) + b(2, m);
      CHECK(b(0, m) >= 0.0);
      CHECK(testing::relative_error(sum, a(0, m)) <= 1e-11);
    }
  }
}

TEST_CASE("chronological splits partition the scored events") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Xoshiro256 rng(seed);
    const auto seq = testing::random_sequence(3, 50 + rng.index(200), 100.0, seed + 4000);
    const double train = 0.5 + 0.3 * rng.uniform(), val = 0.5 * (1.0 - train);
    const auto parts = chronological_split(seq, {train, val, 1.0 - train - val});
    CHECK(parts.train.scored_count() + parts.validation.scored_count() + parts.test.scored_count() == seq.size());
    CHECK(parts.test.horizon() == seq.horizon());
  }
}

TEST_CASE("the likelihood of a Poisson model depends only on counts and the window") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Xoshiro256 rng(seed);
    const double rate = 0.1 + 2.0 * rng.uniform();
    HppModel hpp(1, rate);
    const auto seq = testing::random_sequence(1, 5 + rng.index(50), 30.0, seed + 5000);
    const double n = static_cast<double>(seq.size());
    CHECK(testing::relative_error(negative_log_likelihood(hpp, seq).total, -n * std::log(rate) + rate * 30.0) <= 1e-12);
  }
}

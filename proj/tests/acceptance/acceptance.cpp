// Runs the ten acceptance checks and prints one PASS/FAIL line for each.
// Arguments select a subset by number; no arguments runs all of them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dhp/baselines.hpp"
#include "dhp/evaluate.hpp"
#include "dhp/simulate.hpp"
#include "dhp/training.hpp"
#include "oracles.hpp"

using namespace dhp;
using testing::quadrature;
using testing::relative_error;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<std::size_t> all_scored(const EventSequence& seq) {
  std::vector<std::size_t> idx(seq.scored_count());
  std::iota(idx.begin(), idx.end(), seq.scored_begin());
  return idx;
}

double uniform(Xoshiro256& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

Outcome kernel_integrals() {
  Xoshiro256 rng(101);
  const KernelFamily families[] = {KernelFamily::Exponential, KernelFamily::PowerLaw, KernelFamily::Rayleigh};
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const KernelSpec spec{families[k % 3], 2.0};
    const KernelParams p{uniform(rng, 0.05, 3.0), uniform(rng, 0.1, 3.0)};
    const double a = uniform(rng, 0.0, 5.0), b = a + uniform(rng, 1e-3, 10.0);
    const double want = quadrature([&](double x) { return kernel_value(spec, p, x); }, a, b);
    worst = std::max(worst, relative_error(kernel_integral(spec, p, a, b), want));
  }
  return {worst <= 1e-8, fmt("1000 draws, worst relative error %.2e (limit 1e-8)", worst)};
}

Outcome gradient_check() {
  double worst_rel = 0.0, worst_abs = 0.0, largest = 0.0;
  std::size_t checked = 0, failed = 0;
  for (auto family : {KernelFamily::PowerLaw, KernelFamily::Exponential, KernelFamily::Rayleigh}) {
    auto model = testing::random_dhp(family, 3, 30.0, 202);
    const auto seq = testing::random_sequence(3, 50, 30.0, 203);
    std::vector<double> grad(model.num_parameters(), 0.0);
    model.loss_and_gradient(seq, all_scored(seq), grad);
    const auto raw = model.parameters();
    for (std::size_t k = 0; k < raw.size(); ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(raw[k]));
      auto up = raw, dn = raw;
      up[k] += h;
      dn[k] -= h;
      auto mu = model, md = model;
      mu.set_parameters(up);
      md.set_parameters(dn);
      const double fd = (negative_log_likelihood(mu, seq).total - negative_log_likelihood(md, seq).total) / (2 * h);
      const double err = std::abs(grad[k] - fd);
      ++checked;
      worst_abs = std::max(worst_abs, err);
      largest = std::max(largest, std::abs(fd));
      if (err <= 1e-7) continue;
      const double rel = err / std::abs(fd);
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-4) ++failed;
    }
  }
  return {failed == 0, fmt("%zu raw parameters over 3 kernels, %zu failures, worst abs error %.2e, worst relative "
                           "error above 1e-7 abs %.2e, largest |gradient| %.1f",
                           checked, failed, worst_abs, worst_rel, largest)};
}

Outcome reduction_identity() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const KernelFamily family = std::array{KernelFamily::Exponential, KernelFamily::PowerLaw, KernelFamily::Rayleigh}[seed % 3];
    const auto base = testing::random_dhp(family, 3, 100.0, 300 + seed);
    const auto seq = testing::random_sequence(3, 300, 100.0, 400 + seed);
    HawkesModel h(3, base.kernel());
    auto raw = base.parameters();
    raw.resize(3 + 9 + 3);
    h.set_parameters(raw);
    const auto d = inject_dynamics(h, MixtureIntegralDynamics::identity(3, {}, 100.0));
    worst = std::max(worst, std::abs(negative_log_likelihood(d, seq).total - negative_log_likelihood(h, seq).total));
    const auto ev = seq.events();
    for (std::size_t i = 0; i < ev.size(); i += 5)
      for (std::size_t m = 0; m < 3; ++m)
        worst = std::max(worst, std::abs(d.intensity(m, ev[i].time, ev.first(i)) - h.intensity(m, ev[i].time, ev.first(i))));
    const auto bounds = interval_boundaries(50.0, 100.0, 2.5);
    const auto pd = predict_counts(d, ev, bounds), ph = predict_counts(h, ev, bounds);
    for (std::size_t k = 0; k < pd.data().size(); ++k) worst = std::max(worst, std::abs(pd.data()[k] - ph.data()[k]));
  }
  return {worst <= 1e-10, fmt("6 datasets, worst absolute difference %.2e (limit 1e-10)", worst)};
}

Outcome compensator_exactness() {
  // Train briefly on data with changing dynamics so F is clearly nonlinear.
  const double horizon = 200.0;
  const auto truth = inject_dynamics(testing::hawkes(KernelFamily::PowerLaw, {0.6, 0.5}, testing::matrix(2, 2, {1.6, 1.2, 1.3, 1.8}), {1.0, 1.0}),
                                     AnalyticDynamics(2, AnalyticProfile::ramp(2.0, -0.009)));
  const auto data = thinning_simulate(truth, {horizon, 41}).sequence;
  auto model = DhpModel::create({2, {KernelFamily::PowerLaw, 2.0}, {3, 2, 8}, false}, horizon, 42);
  TrainConfig cfg;
  cfg.max_epochs = 20;
  cfg.learning_rate = 0.01;
  fit(model, data.window(0.0, 160.0), data.window(160.0, horizon), cfg);

  // Curvature of F over the horizon: ratio of largest to smallest f on a grid.
  std::vector<double> grid(200), F(200), f(200);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = horizon * static_cast<double>(k) / 199.0;
  model.transform(0, grid, F, f);
  const double spread = *std::max_element(f.begin(), f.end()) / *std::min_element(f.begin(), f.end());

  Xoshiro256 rng(43);
  const auto ev = data.events();
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double a = uniform(rng, 0.0, horizon - 1.0);
    const double b = std::min(horizon, a + uniform(rng, 0.01, 5.0));
    std::size_t n = 0;
    while (n < ev.size() && ev[n].time <= a) ++n;
    const auto hist = ev.first(n);
    const std::size_t m = static_cast<std::size_t>(k % 2);
    const double want = quadrature([&](double t) { return model.intensity(m, t, hist); }, a, b);
    worst = std::max(worst, relative_error(model.compensator(m, a, b, hist), want));
  }
  return {worst <= 1e-6 && spread > 1.05,
          fmt("100 intervals on a trained model (f varies by x%.2f), worst relative error %.2e", spread, worst)};
}

Outcome hawkes_recovery() {
  const std::vector<double> mu{0.2, 0.3}, beta{1.0, 1.5};
  const auto alpha = testing::matrix(2, 2, {0.3, 0.1, 0.2, 0.3});
  const auto truth = testing::hawkes(KernelFamily::Exponential, mu, alpha, beta);
  const double horizon = 40000.0;
  const auto data = thinning_simulate(truth, {horizon, 501}).sequence;
  HawkesModel model(2, {KernelFamily::Exponential, 2.0});
  TrainConfig cfg;
  // Near-full batches: the likelihood is flat along β, where small-batch noise dominates.
  cfg.learning_rate = 0.01;
  cfg.batch_size = 4096;
  cfg.max_epochs = 500;
  cfg.seed = 5;
  // Recovery targets the maximum-likelihood estimate, so the whole sequence
  // serves as both training and stopping set.
  const auto report = fit(model, data, data, cfg);
  double worst = 0.0;
  std::string names;
  auto track = [&](double got, double want, const std::string& name) {
    const double e = relative_error(got, want);
    if (e > worst) {
      worst = e;
      names = name + fmt("=%.4f vs %.4f", got, want);
    }
  };
  for (std::size_t m = 0; m < 2; ++m) {
    track(model.mu(m), mu[m], "mu" + std::to_string(m));
    track(model.beta(m, 0), beta[m], "beta" + std::to_string(m));
    for (std::size_t s = 0; s < 2; ++s)
      track(model.alpha(m, s), alpha(m, s), "alpha" + std::to_string(m) + std::to_string(s));
  }
  return {worst <= 0.15 && data.size() >= 5000,
          fmt("%zu events, %zu epochs, worst relative error %.3f at %s", data.size(), report.epochs.size() - 1, worst,
              names.c_str())};
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

Outcome dynamic_recovery() {
  const double horizon = 3000.0;
  const auto profile = AnalyticProfile::piecewise({0.0, horizon / 2}, {1.0, 0.25});
  const auto base = testing::hawkes(KernelFamily::Exponential, {0.4, 0.3}, testing::matrix(2, 2, {0.5, 0.15, 0.2, 0.45}), {1.0, 1.0});
  const auto truth = inject_dynamics(base, AnalyticDynamics(2, profile));
  const auto data = thinning_simulate(truth, {horizon, 601}).sequence;
  const auto parts = chronological_split(data, {0.7, 0.1, 0.2});

  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 128;
  cfg.max_epochs = 100;
  cfg.patience = 10;
  cfg.seed = 6;
  auto dhp = DhpModel::create({2, {KernelFamily::Exponential, 2.0}, {3, 2, 8}, false}, horizon, 7);
  const auto dhp_report = fit(dhp, parts.train, parts.validation, cfg);
  HawkesModel hawkes(2, {KernelFamily::Exponential, 2.0});
  fit(hawkes, parts.train, parts.validation, cfg);

  const double nll_dhp = test_nll(dhp, parts.test).total, nll_hawkes = test_nll(hawkes, parts.test).total;
  std::vector<double> grid(200), F(200), f(200), want(200);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k] = horizon * (static_cast<double>(k) + 0.5) / 200.0;
    want[k] = profile.value(grid[k]);
  }
  double worst_r = 1.0;
  for (std::size_t m = 0; m < 2; ++m) {
    dhp.transform(m, grid, F, f);
    worst_r = std::min(worst_r, pearson(f, want));
  }
  return {nll_dhp < nll_hawkes && worst_r >= 0.8,
          fmt("%zu events, test NLL DHP %.2f vs Hawkes %.2f, lowest Pearson r %.3f, DHP stopped at epoch %zu", data.size(),
              nll_dhp, nll_hawkes, worst_r, dhp_report.epochs.size() - 1)};
}

Outcome time_rescaling() {
  const double horizon = 1500.0;
  const auto base = testing::hawkes(KernelFamily::PowerLaw, {0.3, 0.35}, testing::matrix(2, 2, {1.5, 1.2, 1.3, 1.6}), {1.2, 1.0});
  const auto truth = inject_dynamics(base, AnalyticDynamics(2, AnalyticProfile::ramp(1.5, -0.0008)));
  const auto data = thinning_simulate(truth, {horizon, 701}).sequence;
  const auto rows = residual_diagnostics(truth, data);
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    ok = ok && r.events >= 500 && r.pass_1pct;
    if (!detail.empty()) detail += "; ";
    detail += fmt("mark %zu: %zu events KS p=%.3f", r.mark, r.events, r.ks.p_value);
  }
  return {ok, detail};
}

Outcome mape_oracle() {
  const std::vector<double> predicted{8.0, 14.0}, actual{10.0, 10.0};
  const auto r = mape_from_totals(predicted, actual);
  const bool exact = r.per_dimension[0] == 0.2 && std::abs(r.per_dimension[1] - 0.4) <= 1e-15 && std::abs(r.mean - 0.3) <= 1e-15;
  // Same totals reached through the model path: an HPP on a fixture with known counts.
  const EventSequence seq({{0.5, 0}, {1.5, 0}, {2.5, 1}, {3.5, 1}, {3.6, 1}, {3.7, 1}, {3.8, 1}}, 2, 4.0);
  HppModel hpp(2);
  hpp.set_rates(std::vector<double>{0.4, 1.5});  // predicts 1.6 and 6 against 2 and 5
  const auto m = mape(hpp, seq, 1.0);
  const bool model_path = std::abs(m.per_dimension[0] - 0.2) <= 1e-12 && std::abs(m.per_dimension[1] - 0.2) <= 1e-12;
  return {exact && model_path, fmt("dims 0.2/0.4 -> mean %.15g; model path %.15g/%.15g", r.mean, m.per_dimension[0], m.per_dimension[1])};
}

Outcome monotonicity() {
  std::size_t violations = 0, points = 0;
  for (std::uint64_t draw = 0; draw < 100; ++draw) {
    const DynamicsConfig cfg{1 + draw % 4, 1 + draw % 3, 4 + 2 * (draw % 3)};
    auto dyn = MixtureIntegralDynamics::random(1, cfg, 50.0, draw);
    // Widen the draw well beyond the initializer's spread.
    Xoshiro256 rng(1000 + draw);
    auto raw = std::vector<double>(dyn.parameters().begin(), dyn.parameters().end());
    for (auto& v : raw) v = rng.normal(0.0, 2.0);
    dyn.set_parameters(raw);
    std::vector<double> t(10000), F(10000), f(10000);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = 100.0 * static_cast<double>(k) / 9999.0;
    dyn.evaluate(0, t, F, f);
    for (std::size_t k = 0; k < t.size(); ++k) {
      ++points;
      if (!(f[k] >= 0.0) || (k > 0 && F[k] < F[k - 1])) ++violations;
    }
  }
  return {violations == 0, fmt("%zu grid points over 100 draws, %zu violations", points, violations)};
}

Outcome minibatch_exactness() {
  double worst = 0.0;
  std::size_t partitions = 0;
  for (auto family : {KernelFamily::Exponential, KernelFamily::PowerLaw, KernelFamily::Rayleigh}) {
    const auto model = testing::random_dhp(family, 3, 100.0, 801);
    const auto seq = testing::random_sequence(3, 400, 100.0, 802).window(20.0, 100.0);
    const double full = negative_log_likelihood(model, seq).total;
    Xoshiro256 rng(803);
    for (int trial = 0; trial < 10; ++trial) {
      auto idx = all_scored(seq);
      for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.index(i)]);
      const std::size_t parts = 1 + rng.index(20);
      double sum = 0.0;
      std::vector<std::size_t> cuts{0};
      for (std::size_t p = 1; p < parts; ++p) cuts.push_back(rng.index(idx.size() + 1));
      cuts.push_back(idx.size());
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t p = 0; p + 1 < cuts.size(); ++p)
        sum += model.loss_and_gradient(seq, std::span(idx).subspan(cuts[p], cuts[p + 1] - cuts[p]), {});
      worst = std::max(worst, std::abs(sum - full));
      ++partitions;
    }
  }
  return {worst <= 1e-10, fmt("%zu random partitions, worst |sum - full| %.2e (limit 1e-10)", partitions, worst)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "kernel integral oracle", 10, kernel_integrals},
      {2, "gradient check", 60, gradient_check},
      {3, "reduction identity", 5, reduction_identity},
      {4, "compensator exactness", 30, compensator_exactness},
      {5, "Hawkes parameter recovery", 600, hawkes_recovery},
      {6, "dynamic recovery", 900, dynamic_recovery},
      {7, "time-rescaling residuals", 120, time_rescaling},
      {8, "MAPE oracle", 1, mape_oracle},
      {9, "monotonicity suite", 30, monotonicity},
      {10, "mini-batch exactness", 10, minibatch_exactness},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = out.pass && seconds < c.budget_seconds;
    if (!pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.1fs, budget %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(), seconds,
                c.budget_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dhp/baselines.hpp"
#include "dhp/evaluate.hpp"
#include "dhp/simulate.hpp"
#include "oracles.hpp"

using namespace dhp;

TEST_CASE("count error from totals") {
  const std::vector<double> pred{8.0}, actual{10.0};
  CHECK(mape_from_totals(pred, actual).mean == doctest::Approx(0.2));
  const std::vector<double> p2{8.0, 14.0}, a2{10.0, 10.0};
  const auto two = mape_from_totals(p2, a2);
  CHECK(two.per_dimension[0] == doctest::Approx(0.2));
  CHECK(two.per_dimension[1] == doctest::Approx(0.4));
  CHECK(two.mean == doctest::Approx(0.3));
  CHECK(two.stddev == doctest::Approx(0.1));
  const std::vector<double> same{3.0, 4.0};
  CHECK(mape_from_totals(same, same).mean == 0.0);
}

TEST_CASE("dimensions without events are excluded") {
  const std::vector<double> pred{8.0, 1.0}, actual{10.0, 0.0};
  const auto r = mape_from_totals(pred, actual);
  CHECK(r.excluded == std::vector<std::size_t>{1});
  CHECK(std::isnan(r.per_dimension[1]));
  CHECK(r.mean == doctest::Approx(0.2));
}

TEST_CASE("test likelihood of a Poisson model by hand") {
  HppModel hpp(1, 2.0);
  const EventSequence seq({{0.5, 0}}, 1, 1.0);
  const auto r = test_nll(hpp, seq);
  CHECK(r.total == doctest::Approx(-std::log(2.0) + 2.0).epsilon(1e-14));
  CHECK(r.per_event == r.total);

  const EventSequence none({}, 1, 1.0);
  CHECK(test_nll(hpp, none).total == doctest::Approx(2.0));
  CHECK_THROWS(test_nll(hpp, seq.window(1.0, 1.0)));
}

TEST_CASE("test window conditions on earlier history") {
  const auto h = testing::hawkes(KernelFamily::Exponential, {0.3}, testing::matrix(1, 1, {0.8}), {1.0});
  const EventSequence full({{1.0, 0}, {1.5, 0}, {2.2, 0}, {3.0, 0}}, 1, 4.0);
  const auto test = full.window(2.0, 4.0);
  const auto events = test.events();
  double want = 0.0;
  for (std::size_t i = test.scored_begin(); i < events.size(); ++i) want -= std::log(h.intensity(0, events[i].time, events.first(i)));
  want += testing::quadrature_split(
      [&](double t) {
        std::size_t k = 0;
        while (k < events.size() && events[k].time < t) ++k;
        return h.intensity(0, t, events.first(k));
      },
      2.0, 4.0, {2.2, 3.0});
  CHECK(testing::relative_error(test_nll(h, test).total, want) <= 1e-6);
}

TEST_CASE("count error on exact predictions") {
  // An HPP predicting exactly the observed count in each dimension.
  const EventSequence seq({{0.5, 0}, {1.5, 1}, {2.5, 0}, {3.5, 1}}, 2, 4.0);
  HppModel hpp(2, 0.5);
  const auto r = mape(hpp, seq, 1.0);
  CHECK(r.predicted[0] == doctest::Approx(2.0));
  CHECK(r.mean == doctest::Approx(0.0));
  CHECK(mape(hpp, seq, 0.5).mean == doctest::Approx(0.0));
  CHECK_THROWS(mape(hpp, seq, 0.0));
}

TEST_CASE("KS statistic against the exponential") {
  CHECK_THROWS(ks_exponential({}));
  Xoshiro256 rng(3);
  std::vector<double> good(2000), bad(2000);
  for (auto& v : good) v = rng.exponential(1.0);
  for (auto& v : bad) v = rng.exponential(0.5);
  CHECK(ks_exponential(good).p_value > 0.01);
  CHECK(ks_exponential(bad).p_value < 0.01);
  // Single sample at the median: D = 0.5.
  CHECK(ks_exponential({std::log(2.0)}).statistic == doctest::Approx(0.5));
}

TEST_CASE("residual diagnostics") {
  const auto h = testing::hawkes(KernelFamily::Exponential, {0.3, 0.2}, testing::matrix(2, 2, {0.6, 0.1, 0.2, 0.5}), {1.0, 1.0});
  const auto sim = thinning_simulate(h, {3000.0, 12});
  for (const auto& r : residual_diagnostics(h, sim.sequence)) {
    CHECK(r.sufficient);
    CHECK(r.pass_1pct);
  }
  // A constant rate misses the clustering.
  HppModel hpp(2);
  hpp.initialize_from(sim.sequence);
  bool any_fail = false;
  for (const auto& r : residual_diagnostics(hpp, sim.sequence)) any_fail |= !r.pass_1pct;
  CHECK(any_fail);

  const EventSequence sparse({{1.0, 0}, {2.0, 0}}, 2, 3.0);
  const auto few = residual_diagnostics(hpp, sparse);
  CHECK_FALSE(few[0].sufficient);
  CHECK_FALSE(few[1].sufficient);
  CHECK(few[1].events == 0);
}

TEST_CASE("true model beats a constant rate on most seeds") {
  const auto h = testing::hawkes(KernelFamily::Exponential, {0.4}, testing::matrix(1, 1, {0.6}), {1.5});
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto sim = thinning_simulate(h, {400.0, seed});
    const auto train = sim.sequence.window(0.0, 300.0), test = sim.sequence.window(300.0, 400.0);
    HppModel hpp(1);
    hpp.initialize_from(train);
    wins += test_nll(h, test).total < test_nll(hpp, test).total;
  }
  CHECK(wins > 10);
}

TEST_CASE("evaluation report") {
  const auto h = testing::hawkes(KernelFamily::Exponential, {0.4}, testing::matrix(1, 1, {0.6}), {1.5});
  const auto sim = thinning_simulate(h, {200.0, 1});
  const auto report = evaluate(h, sim.sequence.window(150.0, 200.0), 5.0);
  const auto j = report.to_json(std::vector<std::string>{"a"});
  CHECK(j.contains("nll"));
  CHECK(j.contains("mape"));
  CHECK(report.nll.per_event == doctest::Approx(report.nll.total / static_cast<double>(report.nll.num_events)));
  std::ostringstream csv;
  EvaluationReport::write_csv_header(csv);
  report.write_csv_row(csv);
  std::string header, row;
  std::istringstream in(csv.str());
  std::getline(in, header);
  std::getline(in, row);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}

TEST_CASE("count error barely moves when the interval grid is refined") {
  const auto h = testing::hawkes(KernelFamily::Exponential, {0.5, 0.4}, testing::matrix(2, 2, {0.4, 0.1, 0.1, 0.3}), {1.0, 1.0});
  const auto sim = thinning_simulate(h, {2000.0, 8});
  const auto test = sim.sequence.window(1500.0, 2000.0);
  const auto coarse = mape(h, test, 10.0), fine = mape(h, test, 5.0);
  for (std::size_t m = 0; m < 2; ++m) CHECK(std::abs(coarse.per_dimension[m] - fine.per_dimension[m]) <= 0.05);
}

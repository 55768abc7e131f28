#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kappa/errors.hpp"
#include "kappa/semigroup.hpp"
#include "kappa/stochastic.hpp"

using namespace kappa;
using doctest::Approx;

namespace {

const double pi = std::numbers::pi;

ScalarField sin_x1(double a) { return ScalarField::along_axis(Profile::sine(a, 1.0), 0); }

}  // namespace

TEST_CASE("step count") {
  CHECK(step_count(1.0, 1e-3) == 1000);
  CHECK(step_count(0.5, 1e-4) == 5000);
  CHECK_THROWS_AS(step_count(1.0, 0.3), InvalidParameter);
  CHECK_THROWS_AS(step_count(1.0, 0.0), InvalidParameter);
}

TEST_CASE("path invariants") {
  const std::vector<std::pair<Domain, Point>> cases = {
      {Domain::half_space(2, 0, 0.0), Point{0.0, 0.0}},
      {Domain::ball(Point{0.0, 0.0}, 1.0), Point{0.9, 0.0}},
      {Domain::ball_complement(Point{0.0, 0.0, 0.0}, 1.0), Point{1.0, 0.0, 0.0}},
      {Domain::interval(0.0, 0.5), Point{0.25}},
      {Domain::box(Point{0.0, 0.0}, Point{0.3, 0.4}), Point{0.1, 0.1}}};
  for (const auto& [d, x0] : cases)
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto p = simulate_reflected(d, x0, 0.5, 1e-3, RngSpec{3}, i);
      REQUIRE(p.times.size() == 501);
      double sum = 0.0;
      for (size_t k = 0; k < p.positions.size(); ++k) {
        if (d.signed_distance(p.positions[k]) > 1e-12) FAIL("position left Y");
        if (k > 0) {
          const double dL = p.localtime[k] - p.localtime[k - 1];
          CHECK(dL >= 0.0);
          CHECK(std::abs(dL - p.pushes[k - 1]) <= 1e-15 * (1.0 + p.localtime[k]));
          sum += p.pushes[k - 1];
        }
      }
      CHECK(p.localtime.back() == Approx(sum).epsilon(1e-14));
    }
  CHECK_THROWS_AS(simulate_reflected(Domain::ball(Point{0.0, 0.0}, 1.0), Point{2.0, 0.0}, 1.0, 0.1, RngSpec{}, 0),
                  InvalidParameter);
}

TEST_CASE("no boundary contact") {
  const auto d = Domain::box(Point{-10.0, -10.0}, Point{10.0, 10.0});
  for (std::uint64_t i = 0; i < 50; ++i)
    CHECK(simulate_reflected(d, Point{0.0, 0.0}, 0.1, 1e-3, RngSpec{1}, i).localtime.back() == 0.0);
  // Final positions are Gaussian with variance T per coordinate.
  const auto batch = simulate_batch(d, Point{0.0, 0.0}, 0.2, 1e-2, RngSpec{2}, 20000);
  std::vector<double> x, x2;
  for (const auto& p : batch.paths) {
    x.push_back(p.positions.back()[0]);
    x2.push_back(p.positions.back()[0] * p.positions.back()[0]);
  }
  const auto m1 = mean_se(x), m2 = mean_se(x2);
  CHECK(std::abs(m1.mean) <= 3 * m1.se);
  CHECK(std::abs(m2.mean - 0.2) <= 3 * m2.se);
}

TEST_CASE("antithetic pairs mirror increments") {
  const auto d = Domain::box(Point{-10.0, -10.0}, Point{10.0, 10.0});
  SimulateOptions o;
  o.antithetic = true;
  const auto a = simulate_reflected(d, Point{0.0, 0.0}, 0.1, 1e-2, RngSpec{4}, 6, nullptr, o);
  const auto b = simulate_reflected(d, Point{0.0, 0.0}, 0.1, 1e-2, RngSpec{4}, 7, nullptr, o);
  for (size_t k = 0; k < a.positions.size(); ++k) CHECK(a.positions[k][1] == Approx(-b.positions[k][1]));
}

TEST_CASE("Feynman-Kac exponent") {
  const auto d = Domain::half_space(1, 0, 0.0);
  const auto p = simulate_reflected(d, Point{0.0}, 1.0, 1e-3, RngSpec{5}, 0);
  const auto zero = ScalarField::constant(0.0);
  CHECK(fk_exponent(p, zero, zero) == 0.0);
  CHECK(fk_exponent(p, ScalarField::constant(0.6), zero) == Approx(-0.3));
  CHECK(fk_exponent(p, zero, ScalarField::constant(2.0)) == Approx(-p.localtime.back()).epsilon(1e-13));
}

TEST_CASE("additive functional N") {
  const auto d = Domain::half_space(2, 0, 0.0);
  const auto c = ScalarField::constant(1.3);
  const auto p = simulate_reflected(d, Point{0.0, 0.0}, 0.5, 1e-3, RngSpec{6}, 0, &c);
  CHECK(additive_functional_N(p, c) == 0.0);
  const auto bare = simulate_reflected(d, Point{0.0, 0.0}, 0.5, 1e-3, RngSpec{6}, 0);
  CHECK_THROWS_AS(additive_functional_N(bare, c), MissingFunctional);

  // Interior paths: linear psi gives N -> 0, |x|^2/2 gives E N = T.
  const auto far = Domain::box(Point{-50.0, -50.0}, Point{50.0, 50.0});
  const auto lin = ScalarField::affine(Vec{1.0, -0.5}, 0.2);
  const auto quad = ScalarField::radial(Profile::polynomial({0.0, 0.0, 0.5}), Point{0.0, 0.0});
  std::vector<double> nl, nq;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    nl.push_back(additive_functional_N(simulate_reflected(far, Point{0.0, 0.0}, 1.0, 1e-3, RngSpec{7}, i, &lin), lin));
    nq.push_back(additive_functional_N(simulate_reflected(far, Point{0.0, 0.0}, 1.0, 1e-3, RngSpec{8}, i, &quad), quad));
  }
  const auto ml = mean_se(nl), mq = mean_se(nq);
  CHECK(std::abs(ml.mean) <= 1e-12);
  CHECK(std::abs(mq.mean - 1.0) <= 3 * mq.se + std::sqrt(1e-3));
}

TEST_CASE("decomposition identity is algebraic") {
  const auto d = Domain::ball(Point{0.0, 0.0}, 1.0);
  const std::vector<ScalarField> psis = {
      sin_x1(1.0), ScalarField::separable(Profile::cosine(0.7, 2.0), 0, Profile::sine(1.0, 1.0), 1),
      ScalarField::radial(Profile::polynomial({0.1, 0.0, 1.5, 0.0, -0.4}), Point{0.2, 0.1})};
  for (const auto& psi : psis) {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const auto p = simulate_reflected(d, Point{0.5, 0.0}, 0.2, 1e-3, RngSpec{9}, i, &psi);
      worst = std::max(worst, decomposition_identity(p, psi));
    }
    CHECK(worst <= 1e-12);
  }
  const auto c = ScalarField::constant(0.5);
  CHECK(decomposition_identity(simulate_reflected(d, Point{0.0, 0.0}, 0.1, 1e-2, RngSpec{}, 0, &c), c) == 0.0);
}

TEST_CASE("time change") {
  const auto d = Domain::ball(Point{0.0, 0.0}, 1.0);
  const double h = 1e-3;
  const auto p = simulate_reflected(d, Point{0.3, 0.0}, 1.0, h, RngSpec{10}, 0);

  const auto same = time_change_path(p, ScalarField::constant(0.0));
  REQUIRE(same.times.size() == p.times.size());
  for (size_t k = 0; k < p.times.size(); ++k) CHECK(distance(same.positions[k], p.positions[k]) <= 1e-12);

  const double c = 0.4;
  const auto fast = time_change_path(p, ScalarField::constant(c));
  for (size_t k = 0; k < fast.times.size(); ++k)
    CHECK(fast.source_times[k] == Approx(std::exp(-2 * c) * fast.times[k]).epsilon(1e-12));

  const auto psi = ScalarField::separable(Profile::sine(0.5, 2.0), 0, Profile::cosine(0.5, 1.0), 1);
  const double sup = 1.0;  // |psi| <= 0.5 + 0.5
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto q = simulate_reflected(d, Point{0.3, 0.0}, 1.0, h, RngSpec{11}, i);
    const auto once = time_change_path(q, psi);
    const auto back = time_change_path(once, -1.0 * psi);
    CHECK(round_trip_residual(once, back) <= 2 * h * std::exp(2 * sup));
  }
  CHECK_THROWS_AS(time_change_path(p, ScalarField::constant(400.0)), ClockError);
}

TEST_CASE("Revuz consistency") {
  SUBCASE("half-space from the boundary") {
    const auto r = local_time_consistency(Domain::half_space(1, 0, 0.0), Point{0.0}, 0.5, 1e-3, 10000, RngSpec{12});
    CHECK(r.verdict == Verdict::Pass);
    // L - x_T is minus the sum of increments: mean zero to sampling error.
    CHECK(std::abs(r.extra["mean_difference"].get<double>()) <= 4 * r.extra["se_difference"].get<double>());
  }
  SUBCASE("interior-only paths") {
    const auto r = local_time_consistency(Domain::ball(Point{0.0, 0.0}, 5.0), Point{0.0, 0.1}, 0.05, 1e-3, 10000,
                                          RngSpec{13});
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.extra["mean_localtime"].get<double>() == 0.0);
  }
  SUBCASE("stored paths agree with the streaming estimator") {
    const auto d = Domain::ball(Point{0.0, 0.0}, 1.0);
    const auto batch = simulate_batch(d, Point{0.9, 0.0}, 0.1, 1e-3, RngSpec{14}, 10000);
    const auto a = local_time_consistency(batch.paths, d);
    const auto b = local_time_consistency(d, Point{0.9, 0.0}, 0.1, 1e-3, 10000, RngSpec{14});
    CHECK(a.extra["mean_difference"].get<double>() == Approx(b.extra["mean_difference"].get<double>()).epsilon(1e-12));
    CHECK(a.verdict == Verdict::Pass);
  }
  SUBCASE("too few paths") {
    CHECK_THROWS_AS(local_time_consistency(Domain::half_space(1, 0, 0.0), Point{0.0}, 0.5, 1e-3, 100, RngSpec{}),
                    StatisticalPowerError);
  }
}

TEST_CASE("half-space local time law at moderate resolution") {
  const auto e = local_time_mean(Domain::half_space(1, 0, 0.0), Point{0.0}, 1.0, 1e-3, 20000, RngSpec{15});
  CHECK(std::abs(e.mean - std::sqrt(2 / pi)) <= 3 * e.se + 0.02 + std::sqrt(1e-3));
}

TEST_CASE("results do not depend on the thread count") {
  const auto d = Domain::ball(Point{0.0, 0.0}, 1.0);
  const auto a = local_time_mean(d, Point{0.9, 0.0}, 0.2, 1e-3, 3000, RngSpec{16}, 1);
  const auto b = local_time_mean(d, Point{0.9, 0.0}, 0.2, 1e-3, 3000, RngSpec{16}, 4);
  CHECK(a.mean == b.mean);
  CHECK(a.se == b.se);
}

TEST_CASE("taming expectation") {
  const auto d = Domain::interval(0.0, pi);
  McParams mc;
  mc.paths = 4000;
  mc.h = 1e-3;
  SUBCASE("conservativeness") {
    TamingSpec s;
    s.f = ScalarField::constant(1.0);
    const auto r = taming_expectation(d, s, {Point{0.1}, Point{1.5}, Point{3.0}}, 0.25, mc);
    for (const auto& e : r.estimates) CHECK(std::abs(e.mean - 1.0) <= 3 * e.se + 1e-12);
    CHECK(r.path_horizon == Approx(0.5));
  }
  SUBCASE("constant potential matches the PDE") {
    TamingSpec s;
    s.f = ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0);
    s.phi = ScalarField::constant(0.7);
    const double Ts = 0.25, t = 2 * Ts;
    const auto grid = Grid::interval(0.0, pi, 400);
    const auto Pf = neumann_heat(grid, grid.sample(s.f), Ts);
    const auto r = taming_expectation(d, s, {Point{0.4}, Point{2.0}}, Ts, mc);
    for (const auto& e : r.estimates) {
      const double ref = std::exp(-0.7 * t) * Pf[static_cast<Eigen::Index>(grid.nearest(e.x0))];
      const double ref_exact = std::exp(-0.7 * t) * std::exp(-Ts) * std::cos(e.x0[0]);
      CHECK(std::abs(e.mean - ref_exact) <= 3 * e.se + 0.02);
      CHECK(std::abs(ref - ref_exact) <= 1e-2);
    }
  }
  SUBCASE("gradient mode with zero curvature") {
    TamingSpec s;
    s.mode = TamingMode::GradientEstimate;
    s.f = ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0);
    const auto r = taming_expectation(d, s, {Point{1.0}}, 0.1, mc);
    CHECK(r.estimates[0].mean > 0.0);
    CHECK(r.estimates[0].mean <= 1.0);
  }
  SUBCASE("exponent cap poisons") {
    TamingSpec s;
    s.f = ScalarField::constant(1.0);
    s.phi = ScalarField::constant(-100.0);
    mc.exponent_cap = 10.0;
    const auto r = taming_expectation(d, s, {Point{1.0}}, 0.25, mc);
    CHECK(r.poisoned());
  }
  SUBCASE("power checks") {
    TamingSpec s;
    s.f = ScalarField::constant(1.0);
    mc.paths = 10;
    CHECK_THROWS_AS(taming_expectation(d, s, {Point{1.0}}, 0.25, mc), StatisticalPowerError);
  }
  SUBCASE("L2 norm bound of the psi-form semigroup") {
    TamingSpec s;
    s.psi = sin_x1(0.3);
    const double Ts = 0.25, t = 2 * Ts, lip2 = 0.09;
    mc.paths = 2000;
    std::vector<Point> xs;
    for (int i = 0; i < 16; ++i) xs.push_back(Point{(i + 0.5) * pi / 16});
    for (int trial = 0; trial < 3; ++trial) {
      s.f = ScalarField::along_axis(Profile::cosine(1.0, 1.0 + trial, 0.3 * trial), 0) + 1.2;
      const auto r = taming_expectation(d, s, xs, Ts, mc);
      double num = 0.0, den = 0.0, se = 0.0;
      for (const auto& e : r.estimates) {
        num += e.mean * e.mean;
        den += s.f(e.x0) * s.f(e.x0);
        se = std::max(se, e.se / std::max(1e-12, std::abs(e.mean)));
      }
      CHECK(std::sqrt(num / den) <= std::exp(lip2 * t) * (1 + 3 * se));
    }
  }
}

TEST_CASE("trace export") {
  const auto p = simulate_reflected(Domain::half_space(2, 0, 0.0), Point{0.0, 0.0}, 0.01, 1e-3, RngSpec{}, 0);
  std::ostringstream os;
  write_trace_csv(os, p);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,x1,x2,L,M,push\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 12);
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "kappa/errors.hpp"
#include "kappa/verify.hpp"

using namespace kappa;
using doctest::Approx;

namespace {

const double pi = std::numbers::pi;

ScalarField cos_x1() { return ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0); }

CheckOptions cheap(std::uint64_t seed, size_t paths = 3000) {
  CheckOptions o;
  o.mc.paths = paths;
  o.mc.rng = RngSpec{seed};
  return o;
}

}  // namespace

TEST_CASE("clock pairing") {
  const auto c = ClockPair::from_semigroup(0.3);
  CHECK(c.path_horizon == 0.6);
  CHECK(ClockPair::from_path(0.6).semigroup_time == 0.3);
  CHECK_THROWS_AS(ClockPair::from_semigroup(0.0), InvalidParameter);

  TamingResult r;
  r.semigroup_time = 0.3;
  r.path_horizon = 0.6;
  CHECK_NOTHROW(c.verify(r));
  // Horizon passed where a semigroup time was expected: doubled twice.
  r.semigroup_time = 0.6;
  r.path_horizon = 1.2;
  CHECK_THROWS_AS(c.verify(r), ClockError);
  r.semigroup_time = 0.15;
  r.path_horizon = 0.3;
  CHECK_THROWS_AS(c.verify(r), ClockError);
}

TEST_CASE("second-order gradient estimate") {
  const Grid g = Grid::interval(0.0, pi, 400);
  SUBCASE("dimension term loosens with N") {
    double prev = -1e300;
    for (double N : {1.0, 2.0, 4.0}) {
      const Report r = check_ge2(g, ScalarField::constant(0.0), N, cos_x1(), 0.3);
      CHECK(r.passed());
      CHECK(r.min_slack >= prev);
      prev = r.min_slack;
    }
  }
  SUBCASE("constants hold trivially") {
    const Report r = check_ge2(g, ScalarField::constant(0.0), 1.0, ScalarField::constant(2.0), 0.3);
    CHECK(r.passed());
    CHECK(r.extra["nodes_checked"] == 400);
  }
  SUBCASE("too small N breaks it") {
    // N = 0.2 overstates the Laplacian term by a factor of five.
    const Report r = check_ge2(g, ScalarField::constant(0.0), 0.2, cos_x1(), 0.3);
    CHECK(r.verdict == Verdict::Fail);
  }
}

TEST_CASE("weak Bochner inequality") {
  const Grid g = Grid::interval(0.0, pi, 1000);
  const ScalarField phi = ScalarField::along_axis(Profile::rescaled(Profile::poly_bump(), pi / 2, 2.0), 0);
  const auto run = [&](double kappa) { return check_be1_weakform(g, ScalarField::constant(kappa), cos_x1(), phi); };
  const Report neg = run(-1.0), zero = run(0.0), pos = run(1.0);
  CHECK(neg.passed());
  CHECK(zero.passed());
  CHECK(neg.min_slack > zero.min_slack + 0.5);
  CHECK(pos.verdict == Verdict::Fail);
}

TEST_CASE("spectral gap of the disc") {
  const Report r = check_spectral_gap(0.5, 64);
  CHECK(r.passed());
  CHECK(r.extra["relative_error"].get<double>() < 5e-3);
  CHECK(r.extra["lambda_1"].get<double>() == Approx(13.5598).epsilon(5e-3));
  CHECK(check_spectral_gap(0.5, 64, 20.0).verdict == Verdict::Fail);
  CHECK_THROWS_AS(check_spectral_gap(0.9), InvalidParameter);
}

TEST_CASE("integration by parts") {
  const ScalarField f = ScalarField::separable(Profile::cosine(1.0, 1.3), 0, Profile::sine(1.0, 0.7, 0.4), 1);
  const ScalarField g = ScalarField::affine(Vec{0.5, -0.3}, 1.0);
  const Domain disc = Domain::ball(Point{0.0, 0.0}, 1.0);
  const Report ok = check_integration_by_parts(disc, f, g, 128);
  CHECK(ok.passed());
  CHECK(ok.extra["observed_order"].get<double>() >= 1.9);
  CHECK(check_integration_by_parts(disc, f, g, 128, 1.1).verdict == Verdict::Fail);
  CHECK_THROWS_AS(check_integration_by_parts(Domain::half_space(2, 0, 0.0), f, g), UnsupportedGeometry);
}

TEST_CASE("Cantor weight") {
  const CantorWeight c0 = cantor_weight(0);
  CHECK(c0.report.passed());
  CHECK(c0.profile(0.5) == 0.0);
  const CantorWeight c1 = cantor_weight(1);
  CHECK(c1.report.passed());
  // One bump of height 1/3 centred at 1/2.
  CHECK(c1.profile(0.5) == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(c1.report.extra["ratio"].get<double>() == Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(cantor_weight(2, Profile::cosine(1.0, 1.0)), InvalidParameter);
  CHECK_THROWS_AS(cantor_weight(13), InvalidParameter);
}

TEST_CASE("Cantor curvature grows with the level") {
  CheckOptions o = cheap(5, 200);
  const Report r3 = cantor2_scenario(3, 0.05, o);
  const Report r6 = cantor2_scenario(6, 0.05, o);
  CHECK(r6.extra["sup_abs_k"].get<double>() > 4.0 * r3.extra["sup_abs_k"].get<double>());
  CHECK(r6.extra["sup_abs_psi"].get<double>() < 0.2);
}

TEST_CASE("ball controls") {
  const CheckOptions o = cheap(11);
  CHECK(check_ball_decay(0.5, 2, 2.0, o, 0.0).verdict == Verdict::Fail);
  const Domain ball = Domain::ball(Point{0.0, 0.0}, 0.5);
  const auto ge1 = [&](double ell) {
    return check_ge1(ball, ScalarField::constant(0.0), ScalarField::constant(ell), ScalarField::affine(Vec{1.0, 0.0}, 0.0),
                     0.05, {Point{0.0, 0.5}}, o);
  };
  CHECK(ge1(2.0).passed());
  CHECK(ge1(20.0).verdict == Verdict::Fail);
  CHECK_THROWS_AS(check_ge1(Domain::half_space(2, 0, 0.0), ScalarField::constant(0.0), ScalarField::constant(0.0),
                            ScalarField::affine(Vec{1.0, 0.0}, 0.0), 0.1, {Point{0.1, 0.0}}, o),
                  UnsupportedGeometry);
}

// With the push-sum normalization of the local time, the concave boundary
// of the disc exterior needs twice the curvature weight for a linear f.
TEST_CASE("concave boundary weight normalization") {
  const Domain ext = Domain::ball_complement(Point{0.0, 0.0}, 1.0);
  const auto run = [&](double ell) {
    return check_ge1(ext, ScalarField::constant(0.0), ScalarField::constant(ell), ScalarField::affine(Vec{0.0, 1.0}, 0.0),
                     0.5, {Point{1.02, 0.05}}, cheap(7, 4000));
  };
  CHECK(run(0.0).verdict == Verdict::Fail);
  CHECK(run(-1.0).verdict == Verdict::Fail);
  CHECK(run(-2.0).passed());
}

TEST_CASE("suite bookkeeping") {
  CHECK_THROWS_AS(suite_entry("no_such_check"), InvalidParameter);
  size_t controls = 0;
  for (const auto& e : suite_entries()) controls += e.expected == Verdict::Fail;
  CHECK(controls >= 5);

  SuiteRun run;
  run.ids = {"a", "b"};
  run.expected = {Verdict::Pass, Verdict::Fail};
  run.reports.resize(2);
  run.errors = {"", ""};
  run.reports[0].verdict = Verdict::Pass;
  run.reports[1].verdict = Verdict::Fail;
  CHECK(suite_exit_code(run) == 0);
  run.reports[0].verdict = Verdict::Inconclusive;
  CHECK(suite_exit_code(run) == 2);
  run.reports[1].verdict = Verdict::Pass;
  CHECK(suite_exit_code(run) == 1);
  run.reports[1].verdict = Verdict::Fail;
  run.errors[1] = "boom";
  CHECK(suite_exit_code(run) == 1);
}

TEST_CASE("suite is independent of the thread count") {
  SuiteOptions o;
  o.rng = RngSpec{42};
  o.paths = 1500;
  const std::vector<std::string> ids = {"revuz_ball", "double_potential", "ge1_ball", "decomposition"};
  std::string text[2];
  for (int k = 0; k < 2; ++k) {
    o.threads = k == 0 ? 1 : 4;
    const SuiteRun run = run_suite(ids, o);
    std::ostringstream os;
    write_summary_csv(os, run);
    os << summary_json(run).dump();
    for (const auto& r : run.reports) os << r.to_json(false).dump();
    text[k] = os.str();
  }
  CHECK(text[0] == text[1]);
  CHECK(text[0].find("runtime") == std::string::npos);
}

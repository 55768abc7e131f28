#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kappa/conformal.hpp"
#include "kappa/errors.hpp"

using namespace kappa;
using doctest::Approx;

namespace {

const double pi = std::numbers::pi;

Polyline arc(double r, double a0, double a1, int n) {
  std::vector<Point> v;
  for (int i = 0; i < n; ++i) {
    const double a = a0 + (a1 - a0) * i / (n - 1);
    v.push_back(Point{r * std::cos(a), r * std::sin(a)});
  }
  return Polyline(v);
}

ScalarField quadratic(double lambda, int dim) {
  return ScalarField::radial(Profile::polynomial({0.0, 0.0, 0.5 * lambda}), Point(dim));
}

}  // namespace

TEST_CASE("polyline validation") {
  CHECK_THROWS_AS(Polyline({Point{0.0, 0.0}}), InvalidParameter);
  CHECK_THROWS_AS(Polyline({Point{0.0, 0.0}, Point{0.0, 0.0}}), InvalidParameter);
  CHECK(Polyline::segment(Point{0.0, 0.0}, Point{3.0, 4.0}, 7).euclidean_length() == Approx(5.0));
}

TEST_CASE("conformal length") {
  const auto seg = Polyline::segment(Point{0.0, 0.0}, Point{3.0, 4.0}, 9);
  CHECK(conformal_length(ScalarField::constant(0.0), seg) == Approx(5.0).epsilon(1e-15));
  const auto curve = arc(2.0, 0.1, 2.0, 33);
  const auto psi = ScalarField::along_axis(Profile::sine(0.4, 1.3), 0);
  // Adding a constant scales the length by e^c.
  CHECK(conformal_length(psi + 0.7, curve) == Approx(std::exp(0.7) * conformal_length(psi, curve)).epsilon(1e-14));
  CHECK(conformal_length(ScalarField::constant(0.3), curve) ==
        Approx(std::exp(0.3) * curve.euclidean_length()).epsilon(1e-14));
  const auto logr = ScalarField::log_radial(Point{0.0, 0.0}, 1.0, -1.0);
  CHECK(std::abs(conformal_length(logr, arc(1.0, 0.0, pi / 2, 512)) - pi / 2) <= 1e-4);
}

TEST_CASE("geodesics") {
  SUBCASE("flat metric gives the segment") {
    const Point x{0.0, 0.0}, y{1.0, 2.0};
    const auto g = geodesic(ScalarField::constant(0.0), x, y);
    CHECK(conformal_length(ScalarField::constant(0.0), g) == Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(conformal_distance(ScalarField::constant(0.4), x, y) == Approx(std::exp(0.4) * std::sqrt(5.0)).epsilon(1e-12));
  }
  SUBCASE("circle is totally geodesic for -log(|x - z|/r)") {
    const Point z{0.3, -0.2};
    const double r = 0.8;
    const auto psi = ScalarField::log_radial(z, r, -1.0);
    const Point x = z + Point{r, 0.0}, y = z + Point{0.0, r};
    const auto g = geodesic(psi, x, y);
    double dev = 0.0;
    for (const auto& v : g.vertices()) dev = std::max(dev, std::abs(distance(v, z) - r));
    CHECK(dev <= 1e-3 * r);
    CHECK(conformal_length(psi, g) <= conformal_length(psi, Polyline::segment(x, y, 65)));
    CHECK(std::abs(conformal_distance(ScalarField::log_radial(Point{0.0, 0.0}, 1.0, -1.0), Point{1.0, 0.0},
                                      Point{0.0, 1.0}) - pi / 2) <= 5e-3);
  }
  SUBCASE("convexified complement keeps geodesics in Y") {
    const auto d = Domain::ball_complement(Point{0.0, 0.0}, 1.0);
    const auto psi = convexification_weight(d, ScalarField::constant(-1.0), 0.05);
    const double th = 0.2;
    const Point x{std::cos(th), std::sin(th)}, y{std::cos(th), -std::sin(th)};
    const auto g = geodesic(psi, x, y);
    double worst = -1.0;
    for (const auto& v : g.vertices()) worst = std::max(worst, d.signed_distance(v));
    CHECK(worst <= 1e-3);
    CHECK(d.signed_distance(Point{std::cos(th), 0.0}) > 0.0);  // the chord enters the ball
  }
  SUBCASE("symmetry and triangle inequality") {
    const auto psi = ScalarField::separable(Profile::cosine(0.5, 1.0), 0, Profile::sine(0.5, 1.0), 1);
    const Point a{0.0, 0.0}, b{1.0, 0.5}, c{0.3, 1.2};
    const double ab = conformal_distance(psi, a, b), ba = conformal_distance(psi, b, a);
    CHECK(std::abs(ab - ba) <= 1e-6 * ab);
    CHECK(conformal_distance(psi, a, c) <= ab + conformal_distance(psi, b, c) + 1e-6);
  }
  SUBCASE("mesh convergence is second order") {
    const auto psi = ScalarField::separable(Profile::cosine(0.5, 1.0), 0, Profile::sine(0.5, 1.0), 1);
    const Point a{0.0, 0.0}, b{2.0, 1.0};
    GeodesicParams p;
    std::vector<double> d;
    for (int n : {17, 33, 65}) {
      p.vertices = n;
      d.push_back(conformal_distance(psi, a, b, p));
    }
    const double order = std::log2(std::abs(d[0] - d[1]) / std::abs(d[1] - d[2]));
    CHECK(order >= 1.8);
  }
  SUBCASE("degenerate endpoints") {
    CHECK_THROWS_AS(geodesic(ScalarField::constant(0.0), Point{1.0, 1.0}, Point{1.0, 1.0}), InvalidParameter);
  }
}

TEST_CASE("time-change curvature") {
  CurvatureBoundSpec spec{ScalarField::constant(1.5), 3.0, 4.0};
  CHECK(spec.gamma_coefficient() == Approx(2.0));
  CHECK(timechange_curvature(spec, ScalarField::constant(0.4), Point{0.2, 0.1}) == Approx(std::exp(-0.8) * 1.5));

  CurvatureBoundSpec s2{ScalarField::constant(0.0), 3.0, 4.0};
  CHECK(timechange_curvature(s2, ScalarField::affine(Vec{1.0, 0.0}, 0.0), Point{0.0, 0.0}) == Approx(-2.0));

  CurvatureBoundSpec s3{ScalarField::constant(0.0), 2.0};
  const auto psi = ScalarField::separable(Profile::sine(0.3, 2.0), 0, Profile::cosine(1.0, 1.0), 1);
  const Point x{0.4, 0.7};
  CHECK(timechange_curvature(s3, psi, x) == Approx(-std::exp(-2 * psi(x)) * psi.laplacian(x)).epsilon(1e-14));

  CurvatureBoundSpec bad{ScalarField::constant(0.0), 3.0, 3.0};
  CHECK_THROWS_AS(bad.gamma_coefficient(), InvalidParameter);
}

TEST_CASE("psi-form and phi-form agree") {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto psi = ScalarField::separable(Profile::sine(0.3, 2.0), 0, Profile::cosine(1.0, 1.0), 1) +
                   ScalarField::radial(Profile::polynomial({0.0, 0.0, 0.2}), Point{0.1, 0.0});
  const auto phi = exp(-1.0 * psi);
  const auto k = ScalarField::along_axis(Profile::cosine(1.0, 1.0), 1);
  for (double Np : {3.5, 10.0, std::numeric_limits<double>::infinity()}) {
    CurvatureBoundSpec spec{k, 3.0, Np};
    for (int i = 0; i < 1000; ++i) {
      const Point x{u(g), u(g)};
      const double a = timechange_curvature(spec, psi, x), b = timechange_curvature_phi(spec, phi, x);
      if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a))) FAIL("psi/phi mismatch at " << x.str());
    }
  }
}

TEST_CASE("convexification weight") {
  const auto d = Domain::ball_complement(Point{0.0, 0.0}, 1.0);
  CHECK(convexification_weight(d, ScalarField::constant(-1.0), 0.01)(Point{0.5, 0.0}) == Approx(0.505));
  const auto w = convexification_weight(d, ScalarField::along_axis(Profile::sine(1.0, 1.0), 0), 0.2);
  CHECK(w(Point{0.6, 0.8}) == Approx(0.0).epsilon(1e-15));
  const auto V = convexification_weight(Domain::ball(Point{0.0, 0.0}, 1.0), ScalarField::constant(0.0), 1.0);
  CHECK(V(Point{0.3, 0.0}) == Approx(-0.7));
  CHECK_THROWS_AS(convexification_weight(d, ScalarField::constant(0.0), 0.0), InvalidParameter);
}

TEST_CASE("local convexity certificate") {
  PairSampler s;
  s.pairs = 12;
  SUBCASE("Euclidean ball is convex") {
    const auto r = check_local_convexity(Domain::ball(Point{0.0, 0.0}, 1.0), ScalarField::constant(0.0), s);
    CHECK(r.verdict == Verdict::Pass);
  }
  SUBCASE("complement is not") {
    s.max_separation = 1.2;
    const auto r = check_local_convexity(Domain::ball_complement(Point{0.0, 0.0}, 1.0), ScalarField::constant(0.0), s);
    CHECK(r.verdict == Verdict::Fail);
  }
  SUBCASE("complement with the convexification weight") {
    s.max_separation = 1.2;
    const auto d = Domain::ball_complement(Point{0.0, 0.0}, 1.0);
    const auto r = check_local_convexity(d, convexification_weight(d, ScalarField::constant(-1.0), 0.05), s);
    CHECK(r.verdict == Verdict::Pass);
  }
  SUBCASE("unsupported sampler domain") {
    CHECK_THROWS_AS(sample_boundary_pairs(Domain::interval(0.0, 1.0), s), UnsupportedGeometry);
  }
}

TEST_CASE("gradient flows and contraction") {
  SUBCASE("linear flow") {
    const double lambda = 0.8;
    const auto tr = evi_flow(quadratic(lambda, 2), Point{1.0, -0.5}, 2.0, 0.1);
    for (size_t i = 0; i < tr.t.size(); ++i) {
      const double e = std::exp(-lambda * tr.t[i]);
      CHECK(std::abs(tr.x[i][0] - e) <= 1e-6);
      CHECK(std::abs(tr.x[i][1] + 0.5 * e) <= 1e-6);
    }
    CHECK(tr.t.back() == Approx(2.0));
  }
  SUBCASE("quadratic saturates the bound") {
    const double lambda = 1.3;
    const auto c = evi_contraction(quadratic(lambda, 2), ScalarField::constant(lambda), Point{1.0, 0.0},
                                   Point{-0.2, 0.7}, 1.5, 0.05);
    CHECK(c.max_abs_gap() <= 1e-6);
    CHECK(c.min_slack() >= -1e-9);
  }
  SUBCASE("quartic on the annulus") {
    const auto V = ScalarField::radial(Profile::polynomial({0.0, 0.0, 0.0, 0.0, 0.25}), Point{0.0, 0.0});
    const auto ell = ScalarField::radial(Profile::polynomial({0.0, 0.0, 1.0}), Point{0.0, 0.0});
    const auto c = evi_contraction(V, ell, Point{2.0, 0.0}, Point{0.0, 1.9}, 0.1, 0.005);
    CHECK(c.min_slack() >= 0.0);
  }
  SUBCASE("blow-up is reported") {
    const auto V = ScalarField::along_axis(Profile::polynomial({0.0, 0.0, 0.0, 0.0, -1.0}), 0);
    FlowOptions o;
    o.grad_bound = 1e6;
    CHECK_THROWS_AS(evi_flow(V, Point{2.0}, 10.0, 0.1, o), DivergenceError);
  }
  SUBCASE("segment average of a linear field is exact") {
    const auto ell = ScalarField::affine(Vec{1.0, 2.0}, 0.5);
    CHECK(segment_average(ell, Point{0.0, 0.0}, Point{1.0, 1.0}) == Approx(0.5 + 1.5).epsilon(1e-14));
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kappa/domain.hpp"
#include "kappa/errors.hpp"
#include "kappa/profiles.hpp"
#include "kappa/scalar_field.hpp"

using namespace kappa;
using doctest::Approx;

namespace {

Point random_point(std::mt19937_64& g, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point p(dim);
  for (int i = 0; i < dim; ++i) p[i] = u(g);
  return p;
}

// Central-difference gradient and Laplacian of f at x with step h.
Vec fd_grad(const ScalarField& f, const Point& x, double h) {
  Vec g(x.dim());
  for (int i = 0; i < x.dim(); ++i) {
    const Vec e = Point::unit(x.dim(), i) * h;
    g[i] = (f(x + e) - f(x - e)) / (2 * h);
  }
  return g;
}

double fd_lap(const ScalarField& f, const Point& x, double h) {
  double s = 0;
  for (int i = 0; i < x.dim(); ++i) {
    const Vec e = Point::unit(x.dim(), i) * h;
    s += (f(x + e) - 2 * f(x) + f(x - e)) / (h * h);
  }
  return s;
}

// Observed order of the finite-difference error of grad and Laplacian.
void check_fd_order(const ScalarField& f, const Point& x) {
  const double h = 1e-2;
  const double eg1 = norm(fd_grad(f, x, h) - f.grad(x));
  const double eg2 = norm(fd_grad(f, x, h / 2) - f.grad(x));
  const double el1 = std::abs(fd_lap(f, x, h) - f.laplacian(x));
  const double el2 = std::abs(fd_lap(f, x, h / 2) - f.laplacian(x));
  INFO(f.describe() << " at " << x.str());
  if (eg1 > 1e-9) CHECK(std::log2(eg1 / eg2) >= 1.9);
  if (el1 > 1e-7) CHECK(std::log2(el1 / el2) >= 1.9);
  CHECK(eg1 < 1e-2);
  CHECK(el1 < 1e-1);
}

}  // namespace

TEST_CASE("signed distance examples") {
  const auto ball = Domain::ball(Point{0.0, 0.0}, 1.0);
  CHECK(signed_distance(ball, Point{0.0, 0.0}) == Approx(-1.0));
  CHECK(signed_distance(ball, Point{2.0, 0.0}) == Approx(1.0));
  const auto hs = Domain::half_space(2, 0, 0.0);
  CHECK(signed_distance(hs, Point{0.3, 5.0}) == Approx(-0.3));
  const auto comp = Domain::ball_complement(Point{0.0, 0.0}, 1.0);
  CHECK(signed_distance(comp, Point{0.5, 0.0}) == Approx(0.5));
  const auto box = Domain::box(Point{0.0, 0.0}, Point{2.0, 1.0});
  CHECK(signed_distance(box, Point{1.0, 0.25}) == Approx(-0.25));
  CHECK(signed_distance(box, Point{3.0, 2.0}) == Approx(std::sqrt(2.0)));
  const auto iv = Domain::interval(0.0, std::numbers::pi);
  CHECK(signed_distance(iv, Point{1.0}) == Approx(-1.0));
  CHECK(signed_distance(iv, Point{-0.5}) == Approx(0.5));
}

TEST_CASE("derivative queries at the skeleton are errors") {
  const auto ball = Domain::ball(Point{0.0, 0.0}, 1.0);
  CHECK(ball.singular_at(Point{0.0, 0.0}));
  CHECK_THROWS_AS(ball.grad_signed_distance(Point{0.0, 0.0}), SingularityError);
  CHECK_THROWS_AS(ball.laplacian_signed_distance(Point{0.0, 0.0}), SingularityError);
  const auto comp = Domain::ball_complement(Point{0.0, 0.0, 0.0}, 1.0);
  CHECK_THROWS_AS(comp.reflect_into(Point{0.0, 0.0, 0.0}), SingularityError);
  const auto iv = Domain::interval(0.0, 2.0);
  CHECK_THROWS_AS(iv.grad_signed_distance(Point{1.0}), SingularityError);
}

TEST_CASE("eikonal and Laplacian of V on random points") {
  std::mt19937_64 g(11);
  const std::vector<Domain> domains = {
      Domain::ball(Point{0.1, -0.2}, 1.0), Domain::ball(Point{0.0, 0.0, 0.0}, 0.7),
      Domain::ball_complement(Point{0.0, 0.0}, 1.0), Domain::ball_complement(Point{0.0, 0.0, 0.0}, 1.0),
      Domain::half_space(3, 1, 0.5), Domain::box(Point{0.0, 0.0}, Point{1.0, 2.0})};
  for (const auto& d : domains) {
    int checked = 0;
    for (int i = 0; i < 10000; ++i) {
      const Point x = random_point(g, d.dim(), -2.0, 2.0);
      if (d.singular_at(x)) continue;
      if (std::abs(norm(d.grad_signed_distance(x)) - 1.0) > 1e-10) {
        FAIL("eikonal violated for " << d.name() << " at " << x.str());
      }
      ++checked;
    }
    CHECK(checked > 9000);
  }
  const auto V = ScalarField::signed_distance(Domain::ball(Point{0.0, 0.0, 0.0}, 1.0));
  for (int i = 0; i < 50; ++i) {
    const Point x = random_point(g, 3, 0.3, 1.5);
    CHECK(V.laplacian(x) == Approx(2.0 / norm(x)).epsilon(1e-12));
    CHECK(fd_lap(V, x, 1e-3) == Approx(V.laplacian(x)).epsilon(1e-4));
  }
}

TEST_CASE("boundary curvature bounds") {
  CHECK(*boundary_curvature_bound(Domain::ball(Point{0.0, 0.0}, 0.5)).is_constant() == Approx(2.0));
  CHECK(boundary_curvature_bound(Domain::ball_complement(Point{0.0, 0.0}, 0.5))(Point{3.0, 1.0}) == Approx(-2.0));
  CHECK(boundary_curvature_bound(Domain::half_space(2, 0, 0.0))(Point{1.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(boundary_curvature_bound(Domain::ball(Point{0.0, 0.0}, 0.5), 1.0), UnsupportedGeometry);
}

TEST_CASE("comparison potential") {
  const Point z{0.0, 0.0};
  CHECK(comparison_potential(1.0, z, 0.0, z) == Approx(0.5));
  CHECK(comparison_potential(1.0, z, 0.0, Point{0.6, 0.8}) == Approx(0.0).epsilon(1e-15));
  CHECK(comparison_potential(std::numbers::pi / 4, z, 1.0, z) == Approx(0.41421356).epsilon(1e-7));
  CHECK(comparison_potential(1.0, z, 0.0, Point{2.0, 0.0}) < 0.0);
  CHECK(comparison_potential(1.0, z, -1.0, Point{0.3, 0.0}) > 0.0);
  CHECK_THROWS_AS(comparison_potential(0.0, z, 0.0, z), InvalidParameter);
  CHECK(cot_k(0.0, 0.5) == Approx(2.0));
  CHECK(cot_k(1.0, 0.5) == Approx(1.0 / std::tan(0.5)));
}

TEST_CASE("reflect_into examples and idempotence") {
  const auto ball = Domain::ball(Point{0.0, 0.0}, 1.0);
  auto r = ball.reflect_into(Point{1.2, 0.0});
  CHECK(r.point[0] == Approx(1.0));
  CHECK(r.point[1] == Approx(0.0));
  CHECK(r.push == Approx(0.2));
  REQUIRE(r.normal);
  CHECK((*r.normal)[0] == Approx(-1.0));
  r = ball.reflect_into(Point{0.5, 0.0});
  CHECK(r.push == 0.0);
  CHECK(r.point == Point{0.5, 0.0});
  CHECK_FALSE(r.normal);
  const auto hs = Domain::half_space(2, 0, 0.0);
  r = hs.reflect_into(Point{-0.1, 3.0});
  CHECK(r.point[0] == 0.0);
  CHECK(r.point[1] == 3.0);
  CHECK(r.push == Approx(0.1));
  CHECK((*r.normal)[0] == Approx(1.0));

  std::mt19937_64 g(5);
  const std::vector<Domain> domains = {ball, hs, Domain::ball_complement(Point{0.0, 0.0, 0.0}, 1.0),
                                       Domain::box(Point{0.0, 0.0}, Point{1.0, 1.0}), Domain::interval(-1.0, 1.0)};
  for (const auto& d : domains)
    for (int i = 0; i < 1000; ++i) {
      const Point x = random_point(g, d.dim(), -3.0, 3.0);
      const auto once = d.reflect_into(x);
      CHECK(d.signed_distance(once.point) <= 1e-12);
      CHECK(d.reflect_into(once.point).push == 0.0);
      CHECK(once.push == Approx(std::max(0.0, d.signed_distance(x))).epsilon(1e-12));
    }
}

TEST_CASE("profiles match finite differences") {
  const std::vector<Profile> ps = {Profile::polynomial({1.0, -2.0, 0.5, 0.25}), Profile::cosine(0.7, 2.0, 0.3),
                                   Profile::sine(1.5, 0.5), Profile::log(2.0, 0.5), Profile::cos2_bump(),
                                   Profile::poly_bump(), Profile::cantor_eta(),
                                   Profile::rescaled(Profile::poly_bump(), 0.2, 0.7)};
  for (const auto& p : ps)
    for (double t : {0.11, 0.23, 0.37}) {
      const double h = 1e-4;
      const Jet j = p.jet(t);
      CHECK((p(t + h) - p(t - h)) / (2 * h) == Approx(j.d1).epsilon(1e-6));
      CHECK((p(t + h) - 2 * p(t) + p(t - h)) / (h * h) == Approx(j.d2).epsilon(1e-4));
    }
  CHECK(Profile::polynomial({0.0, 0.0, 1.0}).even());
  CHECK_FALSE(Profile::polynomial({0.0, 1.0, 1.0}).even());
  CHECK(Profile::cos2_bump()(0.6) == 0.0);
}

TEST_CASE("Cantor profile is a sum of disjoint scaled bumps") {
  const Profile phi = Profile::cantor(3, Profile::cos2_bump());
  // Level-1 bump centred at 1/2 with height 1/3.
  CHECK(phi(0.5) == Approx(1.0 / 3.0));
  CHECK(phi(1.0 / 6.0) == Approx(1.0 / 9.0));
  CHECK(phi(0.0) == 0.0);
  CHECK(phi(1.0 / 3.0) == Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(Profile::cantor(13, Profile::cos2_bump()), InvalidParameter);
}

TEST_CASE("scalar field oracles converge at second order") {
  const Point c{0.2, -0.1};
  const auto V = ScalarField::signed_distance(Domain::ball_complement(Point{0.0, 0.0}, 1.0));
  const std::vector<ScalarField> fs = {
      ScalarField::affine(Vec{1.0, -2.0}, 0.5),
      ScalarField::along_axis(Profile::sine(0.3, 1.0), 0),
      ScalarField::separable(Profile::cosine(1.0, 1.0), 0, Profile::sine(1.0, 2.0), 1),
      ScalarField::radial(Profile::polynomial({0.0, 0.0, 0.5}), c),
      ScalarField::log_radial(c, 1.0, -1.0),
      V,
      1.05 * V + 0.5,
      exp(ScalarField::along_axis(Profile::sine(0.3, 1.0), 0)),
      ScalarField::along_axis(Profile::cosine(1.0, 1.0), 1) * ScalarField::radial(Profile::polynomial({1.0, 0.0, 1.0}), c),
  };
  std::mt19937_64 g(3);
  for (const auto& f : fs)
    for (int i = 0; i < 5; ++i) {
      const Point x = random_point(g, 2, 1.2, 2.0);
      check_fd_order(f, x);
    }
}

TEST_CASE("constant fields report their value") {
  CHECK(*ScalarField::constant(2.5).is_constant() == 2.5);
  CHECK_FALSE(ScalarField::affine(Vec{1.0}, 0.0).is_constant());
  CHECK(ScalarField::constant(2.0).laplacian(Point{1.0, 1.0}) == 0.0);
}

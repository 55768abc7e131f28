#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "kappa/errors.hpp"
#include "kappa/semigroup.hpp"

using namespace kappa;
using doctest::Approx;

namespace {

const double pi = std::numbers::pi;

GridFunction random_function(const Grid& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 r(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  GridFunction f(static_cast<Eigen::Index>(g.size()));
  for (auto& v : f) v = u(r);
  return f;
}

std::vector<Grid> sample_grids() {
  std::vector<Grid> gs;
  gs.push_back(Grid::interval(0.0, pi, 40));
  gs.push_back(Grid::box(Point{0.0, 0.0}, Point{1.0, 2.0}, 12, 10));
  gs.push_back(Grid::polar(Point{0.0, 0.0}, 0.0, 1.0, 8, 16));
  gs.push_back(Grid::polar(Point{0.0, 0.0}, 0.5, 2.0, 8, 16));
  gs.push_back(Grid::radial(Point{0.0, 0.0, 0.0}, 1.0, 4.0, 30, 3));
  gs.push_back(Grid::radial(Point{0.0, 0.0}, 0.0, 1.0, 30, 2));
  return gs;
}

}  // namespace

TEST_CASE("grid operator structure") {
  for (const auto& g : sample_grids()) {
    const Eigen::MatrixXd K(g.stiffness());
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(K.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10 * K.cwiseAbs().maxCoeff());
    const auto one = GridFunction::Ones(static_cast<Eigen::Index>(g.size()));
    CHECK(g.apply_laplacian(one).cwiseAbs().maxCoeff() <= 1e-9);
  }
  CHECK(Grid::polar(Point{0.0, 0.0}, 0.0, 1.0, 16, 32).weights().sum() == Approx(pi).epsilon(1e-12));
  CHECK(Grid::radial(Point{0.0, 0.0, 0.0}, 1.0, 2.0, 10, 3).weights().sum() == Approx(4 * pi * 7 / 3).epsilon(1e-12));
  CHECK_THROWS_AS(Grid::interval(1.0, 0.0, 10), InvalidParameter);
  CHECK_THROWS_AS(Grid::polar(Point{0.0, 0.0}, 0.0, 1.0, 8, 15), InvalidParameter);
}

TEST_CASE("Neumann heat flow") {
  SUBCASE("constants are fixed") {
    for (const auto& g : sample_grids()) {
      const auto u = neumann_heat(g, GridFunction::Ones(static_cast<Eigen::Index>(g.size())), 0.7);
      CHECK((u.array() - 1.0).abs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("cosine eigenfunction, second order in h") {
    const double t = 0.4;
    std::vector<double> err;
    for (int n : {50, 100, 200}) {
      const auto g = Grid::interval(0.0, pi, n);
      const auto f = g.sample(ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0));
      err.push_back((neumann_heat(g, f, t) - std::exp(-t) * f).cwiseAbs().maxCoeff());
    }
    CHECK(err[2] <= 1e-4);
    CHECK(std::log2(err[0] / err[1]) >= 1.9);
    CHECK(std::log2(err[1] / err[2]) >= 1.9);
  }
  SUBCASE("ergodic limit") {
    const auto g = Grid::box(Point{0.0, 0.0}, Point{1.0, 1.0}, 10, 10);
    const auto f = random_function(g, 1);
    const auto u = neumann_heat(g, f, 40.0);
    CHECK((u.array() - g.mean(f)).abs().maxCoeff() <= 1e-8);
  }
  SUBCASE("mass, semigroup property, symmetry, positivity") {
    for (const auto& g : sample_grids()) {
      const auto f = random_function(g, 2), h = random_function(g, 3);
      const auto Pf = neumann_heat(g, f, 0.3);
      CHECK(std::abs(g.integrate(Pf) - g.integrate(f)) <= 1e-10 * g.weights().sum());
      const auto two = neumann_heat(g, neumann_heat(g, f, 0.1), 0.2);
      CHECK((two - Pf).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK(std::abs(g.inner(Pf, h) - g.inner(f, neumann_heat(g, h, 0.3))) <= 1e-10);
      const auto pos = neumann_heat(g, random_function(g, 4, 0.0, 1.0), 0.05);
      CHECK(pos.minCoeff() >= -1e-12);
      CHECK(pos.maxCoeff() <= 1.0 + 1e-12);
    }
  }
  SUBCASE("sparse path agrees with the dense path") {
    const auto g = Grid::polar(Point{0.0, 0.0}, 0.0, 1.0, 12, 24);
    const auto f = g.sample(ScalarField::affine(Vec{1.0, 0.3}, 0.0));
    HeatPropagator::Options o;
    o.dense_limit = 0;
    const HeatPropagator sparse(g, GridFunction(), o);
    CHECK((sparse.apply(f, 0.2) - neumann_heat(g, f, 0.2)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  SUBCASE("tensor path agrees with the dense path") {
    const auto g = Grid::box(Point{0.0, 0.0}, Point{1.0, 2.0}, 20, 30);
    const auto f = random_function(g, 5);
    HeatPropagator::Options o;
    o.dense_limit = 0;
    const HeatPropagator tensor(g, GridFunction::Constant(600, 0.5), o);
    const HeatPropagator dense(g, GridFunction::Constant(600, 0.5));
    CHECK((tensor.apply(f, 0.3) - dense.apply(f, 0.3)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Schrodinger flow") {
  const auto g = Grid::interval(0.0, pi, 60);
  const auto f = random_function(g, 6);
  const auto zero = ScalarField::constant(0.0);
  CHECK((schrodinger_heat(g, f, zero, 0.3) - neumann_heat(g, f, 0.3)).cwiseAbs().maxCoeff() == 0.0);
  const auto one = GridFunction::Ones(60);
  CHECK((schrodinger_heat(g, one, ScalarField::constant(0.8), 0.5).array() - std::exp(-0.4)).abs().maxCoeff() <= 1e-12);
  CHECK((schrodinger_heat(g, f, ScalarField::constant(0.8), 0.5) - std::exp(-0.4) * neumann_heat(g, f, 0.5))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  // Operator norm growth stays below e^{C(C+1)t}, C = max|kappa|.
  const auto kappa = ScalarField::along_axis(Profile::sine(-1.5, 2.0), 0);
  const double C = 1.5, t = 0.4;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto h = random_function(g, 10 + s);
    const auto u = schrodinger_heat(g, h, kappa, t);
    CHECK(std::sqrt(g.inner(u, u) / g.inner(h, h)) <= std::exp(C * (C + 1) * t));
  }
  const auto pos = schrodinger_heat(g, random_function(g, 20, 0.0, 1.0), kappa, t);
  CHECK(pos.minCoeff() >= -1e-12);
}

TEST_CASE("Robin boundary term") {
  // Constant beta on the interval: the boundary layer adds beta * 1 / h at each end cell.
  const auto g = Grid::interval(0.0, 1.0, 10);
  const auto q = g.boundary_potential(ScalarField::constant(0.5));
  CHECK(q[0] == Approx(5.0));
  CHECK(q[9] == Approx(5.0));
  CHECK(q.segment(1, 8).cwiseAbs().maxCoeff() == 0.0);
  const auto pg = Grid::polar(Point{0.0, 0.0}, 0.0, 2.0, 8, 16);
  CHECK(pg.integrate(pg.boundary_potential(ScalarField::constant(1.0))) == Approx(4 * pi).epsilon(1e-12));
}

TEST_CASE("gradient norm") {
  const auto b = Grid::box(Point{0.0, 0.0}, Point{1.0, 1.0}, 10, 10);
  const auto grad = gradient_norm(b, b.sample(ScalarField::affine(Vec{0.3, -0.4}, 1.0)));
  for (auto v : grad) CHECK(v == Approx(0.5).epsilon(1e-12));
  CHECK(gradient_norm(b, GridFunction::Constant(100, 2.0)).cwiseAbs().maxCoeff() == 0.0);
  std::vector<double> err;
  for (int n : {100, 200}) {
    const auto g = Grid::interval(0.0, pi, n);
    const auto gn = gradient_norm(g, g.sample(ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0)));
    double e = 0.0;
    for (int i = 1; i + 1 < n; ++i) e = std::max(e, std::abs(gn[i] - std::abs(std::sin(g.nodes()[i][0]))));
    err.push_back(e);
  }
  CHECK(err[1] <= 1e-4);
  CHECK(std::log2(err[0] / err[1]) >= 1.9);
  const auto pg = Grid::polar(Point{0.0, 0.0}, 0.0, 1.0, 40, 80);
  const auto pgn = gradient_norm(pg, pg.sample(ScalarField::affine(Vec{1.0, 0.0}, 0.0)));
  for (int i = 0; i + 1 < 40; ++i) CHECK(pgn[static_cast<Eigen::Index>(pg.index(i, 3))] == Approx(1.0).epsilon(3e-3));
}

TEST_CASE("Bessel functions") {
  for (double x : {0.1, 0.7, 1.8, 3.3, 7.5}) {
    CHECK(bessel_j(0, x) == Approx(std::cyl_bessel_j(0.0, x)).epsilon(1e-13));
    CHECK(bessel_j(1, x) == Approx(std::cyl_bessel_j(1.0, x)).epsilon(1e-13));
    CHECK(bessel_j(2, x) == Approx(std::cyl_bessel_j(2.0, x)).epsilon(1e-13));
    CHECK(bessel_j_prime(1, x) == Approx(bessel_j(0, x) - bessel_j(1, x) / x).epsilon(1e-12));
  }
  CHECK(bessel_j_prime_zero(1, 1) == Approx(1.8411837813406593).epsilon(1e-13));
  CHECK(bessel_j_zero(1, 1) == Approx(3.8317059702075123).epsilon(1e-13));
  CHECK(bessel_j_zero(0, 1) == Approx(2.404825557695773).epsilon(1e-13));
}

TEST_CASE("spectral gap") {
  SUBCASE("interval") {
    std::vector<double> err;
    for (int n : {50, 100}) err.push_back(std::abs(spectral_gap(Grid::interval(0.0, 2.0, n)) - pi * pi / 4));
    CHECK(err[1] <= 1e-3);
    CHECK(std::log2(err[0] / err[1]) >= 1.9);
  }
  SUBCASE("box uses the longer side") {
    CHECK(spectral_gap(Grid::box(Point{0.0, 0.0}, Point{1.0, 2.0}, 40, 80)) == Approx(pi * pi / 4).epsilon(1e-3));
  }
  SUBCASE("unit disc against the Bessel root") {
    const double j = bessel_j_prime_zero(1, 1);
    const double lam = spectral_gap(Domain::ball(Point{0.0, 0.0}, 1.0), 64);
    CHECK(std::abs(lam - j * j) <= 5e-3 * j * j);
  }
  SUBCASE("unsupported domains") {
    CHECK_THROWS_AS(spectral_gap(Domain::half_space(2, 0, 0.0)), UnsupportedGeometry);
  }
}

TEST_CASE("grid export") {
  const auto g = Grid::interval(0.0, 1.0, 4);
  std::ostringstream os;
  write_grid_csv(os, g, GridFunction::Zero(4));
  CHECK(os.str().rfind("x1,value\n", 0) == 0);
  CHECK_THROWS_AS(write_grid_csv(os, g, GridFunction::Zero(3)), InvalidParameter);
}

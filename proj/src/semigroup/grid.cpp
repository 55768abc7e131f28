#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "kappa/errors.hpp"
#include "kappa/semigroup.hpp"

namespace kappa {

namespace {

using Trip = Eigen::Triplet<double>;

void link(std::vector<Trip>& t, size_t a, size_t b, double T) {
  t.emplace_back(static_cast<int>(a), static_cast<int>(b), T);
  t.emplace_back(static_cast<int>(b), static_cast<int>(a), T);
  t.emplace_back(static_cast<int>(a), static_cast<int>(a), -T);
  t.emplace_back(static_cast<int>(b), static_cast<int>(b), -T);
}

void need(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

double sphere_area(int dim) {
  if (dim == 1) return 2.0;
  if (dim == 2) return 2.0 * std::numbers::pi;
  return 4.0 * std::numbers::pi;
}

}  // namespace

void Grid::finish(std::vector<Trip>& trips) {
  const auto n = static_cast<int>(nodes_.size());
  K_.resize(n, n);
  K_.setFromTriplets(trips.begin(), trips.end());
  K_.makeCompressed();
}

Grid Grid::interval(double a, double b, int n) {
  need(b > a && n >= 2, "interval grid needs a < b and at least 2 cells");
  Grid g;
  g.kind_ = GridKind::Interval;
  g.dim_ = 1;
  g.n1_ = n;
  g.n2_ = 1;
  g.h1_ = (b - a) / n;
  g.lo_ = Point{a};
  g.hi_ = Point{b};
  g.weights_ = Eigen::VectorXd::Constant(n, g.h1_);
  std::vector<Trip> t;
  for (int i = 0; i < n; ++i) {
    g.nodes_.push_back(Point{a + (i + 0.5) * g.h1_});
    if (i + 1 < n) link(t, static_cast<size_t>(i), static_cast<size_t>(i + 1), 1.0 / g.h1_);
  }
  g.faces_.push_back({0, 1.0, Point{a}});
  g.faces_.push_back({static_cast<size_t>(n - 1), 1.0, Point{b}});
  g.finish(t);
  return g;
}

Grid Grid::box(const Point& lo, const Point& hi, int nx, int ny) {
  need(lo.dim() == 2 && hi.dim() == 2, "box grids are two-dimensional");
  need(hi[0] > lo[0] && hi[1] > lo[1] && nx >= 2 && ny >= 2, "box grid needs lo < hi and at least 2x2 cells");
  Grid g;
  g.kind_ = GridKind::Box;
  g.dim_ = 2;
  g.n1_ = nx;
  g.n2_ = ny;
  g.lo_ = lo;
  g.hi_ = hi;
  const double hx = (hi[0] - lo[0]) / nx, hy = (hi[1] - lo[1]) / ny;
  g.h1_ = hx;
  g.h2_ = hy;
  g.weights_ = Eigen::VectorXd::Constant(nx * ny, hx * hy);
  std::vector<Trip> t;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double x = lo[0] + (i + 0.5) * hx, y = lo[1] + (j + 0.5) * hy;
      g.nodes_.push_back(Point{x, y});
      const size_t k = g.index(i, j);
      if (i + 1 < nx) link(t, k, g.index(i + 1, j), hy / hx);
      if (j + 1 < ny) link(t, k, g.index(i, j + 1), hx / hy);
      if (i == 0) g.faces_.push_back({k, hy, Point{lo[0], y}});
      if (i == nx - 1) g.faces_.push_back({k, hy, Point{hi[0], y}});
      if (j == 0) g.faces_.push_back({k, hx, Point{x, lo[1]}});
      if (j == ny - 1) g.faces_.push_back({k, hx, Point{x, hi[1]}});
    }
  g.finish(t);
  return g;
}

Grid Grid::polar(const Point& center, double r0, double R, int nr, int ntheta) {
  need(center.dim() == 2, "polar grids are two-dimensional");
  need(r0 >= 0.0 && R > r0 && nr >= 2, "polar grid needs 0 <= r0 < R and at least 2 rings");
  need(ntheta >= 4 && ntheta % 2 == 0, "polar grid needs an even number (>= 4) of sectors");
  Grid g;
  g.kind_ = GridKind::Polar;
  g.dim_ = 2;
  g.n1_ = nr;
  g.n2_ = ntheta;
  g.center_ = center;
  g.r0_ = r0;
  g.R_ = R;
  const double dr = (R - r0) / nr, dth = 2.0 * std::numbers::pi / ntheta;
  g.h1_ = dr;
  g.h2_ = dth;
  g.weights_.resize(nr * ntheta);
  std::vector<Trip> t;
  for (int i = 0; i < nr; ++i) {
    const double rho = r0 + (i + 0.5) * dr;
    for (int j = 0; j < ntheta; ++j) {
      const double th = (j + 0.5) * dth;
      g.nodes_.push_back(center + Point{rho * std::cos(th), rho * std::sin(th)});
      const size_t k = g.index(i, j);
      g.weights_[static_cast<Eigen::Index>(k)] = rho * dr * dth;
      if (i + 1 < nr) link(t, k, g.index(i + 1, j), (rho + 0.5 * dr) * dth / dr);
      link(t, k, g.index(i, (j + 1) % ntheta), dr / (rho * dth));
      if (i == nr - 1) g.faces_.push_back({k, R * dth, center + Point{R * std::cos(th), R * std::sin(th)}});
      if (i == 0 && r0 > 0.0) g.faces_.push_back({k, r0 * dth, center + Point{r0 * std::cos(th), r0 * std::sin(th)}});
    }
  }
  g.finish(t);
  return g;
}

Grid Grid::radial(const Point& center, double r0, double R, int n, int dim) {
  need(dim >= 1 && dim <= 3 && center.dim() == dim, "radial grid dimension mismatch");
  need(r0 >= 0.0 && R > r0 && n >= 2, "radial grid needs 0 <= r0 < R and at least 2 cells");
  Grid g;
  g.kind_ = GridKind::Radial;
  g.dim_ = dim;
  g.n1_ = n;
  g.n2_ = 1;
  g.center_ = center;
  g.r0_ = r0;
  g.R_ = R;
  const double dr = (R - r0) / n;
  g.h1_ = dr;
  const double S = sphere_area(dim);
  const auto shell = [&](double a, double b) { return S * (std::pow(b, dim) - std::pow(a, dim)) / dim; };
  g.weights_.resize(n);
  std::vector<Trip> t;
  for (int i = 0; i < n; ++i) {
    const double a = r0 + i * dr, b = a + dr;
    g.nodes_.push_back(center + (a + 0.5 * dr) * Point::unit(dim, 0));
    g.weights_[i] = shell(a, b);
    if (i + 1 < n) link(t, static_cast<size_t>(i), static_cast<size_t>(i + 1), S * std::pow(b, dim - 1) / dr);
  }
  g.faces_.push_back({static_cast<size_t>(n - 1), S * std::pow(R, dim - 1), center + R * Point::unit(dim, 0)});
  if (r0 > 0.0) g.faces_.push_back({0, S * std::pow(r0, dim - 1), center + r0 * Point::unit(dim, 0)});
  g.finish(t);
  return g;
}

Grid Grid::reweighted(const GridFunction& density) const {
  check(density);
  if (!(density.array() > 0.0).all() || !density.allFinite())
    throw InvalidParameter("grid density must be positive and finite");
  Grid g = *this;
  g.weights_ = weights_.cwiseProduct(density);
  g.reweighted_ = true;
  return g;
}

void Grid::check(const GridFunction& u) const {
  if (static_cast<size_t>(u.size()) != size())
    throw InvalidParameter("grid function has " + std::to_string(u.size()) + " values, grid has " +
                           std::to_string(size()) + " nodes");
}

GridFunction Grid::sample(const ScalarField& f) const {
  GridFunction u(static_cast<Eigen::Index>(size()));
  for (size_t i = 0; i < size(); ++i) u[static_cast<Eigen::Index>(i)] = f(nodes_[i]);
  return u;
}

double Grid::integrate(const GridFunction& u) const {
  check(u);
  return weights_.dot(u);
}

double Grid::inner(const GridFunction& u, const GridFunction& v) const {
  check(u);
  check(v);
  return (weights_.array() * u.array() * v.array()).sum();
}

GridFunction Grid::apply_laplacian(const GridFunction& u) const {
  check(u);
  return (K_ * u).cwiseQuotient(weights_);
}

GridFunction Grid::boundary_potential(const ScalarField& beta) const {
  GridFunction q = GridFunction::Zero(static_cast<Eigen::Index>(size()));
  for (const auto& f : faces_) q[static_cast<Eigen::Index>(f.cell)] += beta(f.at) * f.area / weights_[static_cast<Eigen::Index>(f.cell)];
  return q;
}

std::vector<bool> Grid::boundary_flags() const {
  std::vector<bool> b(size(), false);
  for (const auto& f : faces_) b[f.cell] = true;
  return b;
}

size_t Grid::nearest(const Point& x) const {
  size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < size(); ++i) {
    const double d = distance(nodes_[i], x);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

void write_grid_csv(std::ostream& os, const Grid& grid, const GridFunction& u) {
  grid.check(u);
  for (int c = 0; c < grid.dim(); ++c) os << "x" << (c + 1) << ',';
  os << "value\n";
  os.precision(17);
  for (size_t i = 0; i < grid.size(); ++i) {
    for (int c = 0; c < grid.dim(); ++c) os << grid.nodes()[i][c] << ',';
    os << u[static_cast<Eigen::Index>(i)] << '\n';
  }
}

}  // namespace kappa

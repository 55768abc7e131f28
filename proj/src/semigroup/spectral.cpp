#include <cmath>

#include <Eigen/SparseCholesky>

#include "kappa/errors.hpp"
#include "kappa/semigroup.hpp"

namespace kappa {

double spectral_gap(const Grid& grid) {
  using SpMat = Eigen::SparseMatrix<double>;
  const Eigen::VectorXd& w = grid.weights();
  const auto n = static_cast<Eigen::Index>(grid.size());
  const SpMat negK = -grid.stiffness();

  // Shift of the order of the gap itself: 1/extent^2.
  double extent = 0.0;
  for (const auto& p : grid.nodes()) extent = std::max(extent, distance(p, grid.nodes().front()));
  const double mu = 1.0 / (extent * extent);
  SpMat M = negK;
  M.diagonal() += mu * w;
  Eigen::SimplicialLDLT<SpMat> solver(M);
  if (solver.info() != Eigen::Success) throw SolverError("spectral shift factorization failed");

  const double wsum = w.sum();
  const auto deflate = [&](Eigen::VectorXd& x) {
    x.array() -= w.dot(x) / wsum;
    x /= std::sqrt(x.dot(w.cwiseProduct(x)));
  };

  // Deterministic start with no symmetry: coordinates plus a small scramble.
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& p = grid.nodes()[static_cast<size_t>(i)];
    double v = p[0];
    if (p.dim() > 1) v += 0.37 * p[1];
    x[i] = v + 1e-3 * std::sin(7.0 * static_cast<double>(i));
  }
  deflate(x);

  double lambda = x.dot(negK * x);
  for (int it = 0; it < 2000; ++it) {
    const Eigen::VectorXd rhs = w.cwiseProduct(x);  // solve() must not alias its argument
    x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw SolverError("spectral solve failed");
    deflate(x);
    const double next = x.dot(negK * x);
    if (std::abs(next - lambda) <= 1e-13 * std::abs(next) && it > 3) return next;
    lambda = next;
  }
  throw SolverError("inverse power iteration stagnated");
}

double spectral_gap(const Domain& domain, int resolution) {
  switch (domain.kind()) {
    case DomainKind::Interval:
      return spectral_gap(Grid::interval(domain.lower()[0], domain.upper()[0], resolution));
    case DomainKind::Box:
      if (domain.dim() == 1) return spectral_gap(Grid::interval(domain.lower()[0], domain.upper()[0], resolution));
      if (domain.dim() == 2) return spectral_gap(Grid::box(domain.lower(), domain.upper(), resolution, resolution));
      break;
    case DomainKind::Ball:
      if (domain.dim() == 2) return spectral_gap(Grid::polar(domain.center(), 0.0, domain.radius(), resolution, 2 * resolution));
      break;
    default:
      break;
  }
  throw UnsupportedGeometry("spectral gap is implemented for Interval, 2D Box and Disc, not " + domain.name());
}

}  // namespace kappa

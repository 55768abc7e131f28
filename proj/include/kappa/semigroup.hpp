#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kappa/domain.hpp"
#include "kappa/point.hpp"
#include "kappa/scalar_field.hpp"

namespace kappa {

using GridFunction = Eigen::VectorXd;

enum class GridKind { Interval, Box, Polar, Radial };

/// Cell-centred finite-volume grid with Neumann (no-flux) boundary.
///
/// The discrete Laplacian is A = W^{-1} K, with K symmetric, K 1 = 0 and W
/// the diagonal of cell volumes. Polar grids cover a disc (inner radius 0)
/// or an annulus; radial grids carry the weight ρ^{d-1} of a d-dimensional
/// ball or shell.
class Grid {
 public:
  static Grid interval(double a, double b, int n);
  static Grid box(const Point& lo, const Point& hi, int nx, int ny);
  static Grid polar(const Point& center, double r0, double R, int nr, int ntheta);
  static Grid radial(const Point& center, double r0, double R, int n, int dim);

  /// Same stiffness, cell volumes multiplied by a positive density. The
  /// generator becomes density^{-1} Δ (a conformal change in 2D).
  Grid reweighted(const GridFunction& density) const;
  bool reweighted() const { return reweighted_; }

  GridKind kind() const { return kind_; }
  size_t size() const { return nodes_.size(); }
  /// Dimension of the space the nodes live in.
  int dim() const { return dim_; }
  const std::vector<Point>& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// Symmetric stiffness K (off-diagonal transmissibilities, rows sum to 0).
  const Eigen::SparseMatrix<double>& stiffness() const { return K_; }
  /// Shape: (n) for 1D grids, (nx, ny) for boxes, (nr, ntheta) for polar.
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  /// Spacing along the first and second grid direction (Δθ for polar).
  double h1() const { return h1_; }
  double h2() const { return h2_; }
  const Point& lower() const { return lo_; }
  const Point& upper() const { return hi_; }
  double r0() const { return r0_; }
  double R() const { return R_; }
  const Point& center() const { return center_; }

  size_t index(int i, int j) const { return static_cast<size_t>(i) * static_cast<size_t>(n2_) + static_cast<size_t>(j); }

  /// Samples a field at the nodes (radial grids: along the first axis).
  GridFunction sample(const ScalarField& f) const;
  double integrate(const GridFunction& u) const;
  double mean(const GridFunction& u) const { return integrate(u) / weights_.sum(); }
  double inner(const GridFunction& u, const GridFunction& v) const;
  GridFunction apply_laplacian(const GridFunction& u) const;

  /// Per-node potential equivalent to the boundary term ∫ β u over ∂Y:
  /// β at each boundary face times face area over cell volume.
  GridFunction boundary_potential(const ScalarField& beta) const;
  /// Nodes whose cell touches the outer boundary.
  std::vector<bool> boundary_flags() const;
  /// Node nearest to x.
  size_t nearest(const Point& x) const;

  void check(const GridFunction& u) const;

 private:
  Grid() = default;
  void finish(std::vector<Eigen::Triplet<double>>& trips);

  struct Face {
    size_t cell;
    double area;
    Point at;
  };

  GridKind kind_ = GridKind::Interval;
  int dim_ = 1;
  int n1_ = 0, n2_ = 1;
  double h1_ = 0.0, h2_ = 0.0;
  Point lo_, hi_, center_;
  double r0_ = 0.0, R_ = 0.0;
  std::vector<Point> nodes_;
  std::vector<Face> faces_;
  Eigen::VectorXd weights_;
  Eigen::SparseMatrix<double> K_;
  bool reweighted_ = false;
};

/// Exponential of the symmetric generator A = W^{-1}K - diag(q).
///
/// Small grids use a dense eigendecomposition (exact in time); boxes with a
/// constant potential use a tensor product of 1D exponentials; everything
/// else uses implicit Euler with Richardson extrapolation and step
/// doubling until two successive estimates agree to `tol`.
class HeatPropagator {
 public:
  struct Options {
    size_t dense_limit = 1200;
    double tol = 1e-9;
    double dt0 = 1e-2;
    int max_doublings = 14;
  };

  HeatPropagator(const Grid& grid, GridFunction potential);
  HeatPropagator(const Grid& grid, GridFunction potential, Options opts);
  ~HeatPropagator();
  HeatPropagator(HeatPropagator&&) noexcept;

  GridFunction apply(const GridFunction& f, double t) const;
  const Grid& grid() const { return grid_; }

 private:
  struct Dense;
  struct Tensor;
  GridFunction richardson(const GridFunction& f, double t) const;

  const Grid& grid_;
  GridFunction q_;
  Options opts_;
  std::unique_ptr<Dense> dense_;
  std::unique_ptr<Tensor> tensor_;
};

/// ∂_t u = Δu with Neumann boundary, semigroup clock.
GridFunction neumann_heat(const Grid& grid, const GridFunction& f, double t);

/// ∂_t u = Δu - κu. An optional boundary field β adds the Robin term
/// ∫_∂Y β u (a potential concentrated on the boundary).
GridFunction schrodinger_heat(const Grid& grid, const GridFunction& f, const ScalarField& kappa, double t,
                              const ScalarField* beta = nullptr);

/// Nodewise |∇u|: centred differences inside, one-sided at the boundary.
GridFunction gradient_norm(const Grid& grid, const GridFunction& u);

/// Smallest nonzero eigenvalue of -Δ (Neumann) by shifted inverse power
/// iteration with constants deflated.
double spectral_gap(const Grid& grid);

/// Grid chosen for a domain: Interval (n cells), Box (n x n), Ball in R^2
/// (polar n x 2n).
double spectral_gap(const Domain& domain, int resolution = 128);

/// Bessel function of the first kind by its power series (moderate x).
double bessel_j(int n, double x);
/// J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2.
double bessel_j_prime(int n, double x);
/// k-th positive zero of J_n' by bracketing and bisection.
double bessel_j_prime_zero(int n, int k);
/// k-th positive zero of J_n.
double bessel_j_zero(int n, int k);

/// Node coordinates and values as CSV.
void write_grid_csv(std::ostream& os, const Grid& grid, const GridFunction& u);

}  // namespace kappa

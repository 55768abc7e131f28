#include <cmath>

#include <Eigen/SparseCholesky>

#include "kappa/errors.hpp"
#include "kappa/semigroup.hpp"

namespace kappa {

namespace {

// exp(tA) for A = W^{-1}K - diag(q), via the symmetric S = W^{-1/2} K W^{-1/2} - diag(q).
struct SymExp {
  Eigen::VectorXd sqw, lambda;
  Eigen::MatrixXd V;

  SymExp(const Eigen::MatrixXd& K, const Eigen::VectorXd& w, const Eigen::VectorXd& q) {
    sqw = w.cwiseSqrt();
    const Eigen::VectorXd isq = sqw.cwiseInverse();
    Eigen::MatrixXd S = isq.asDiagonal() * K * isq.asDiagonal();
    S.diagonal() -= q;
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw SolverError("dense eigendecomposition failed");
    lambda = es.eigenvalues();
    V = es.eigenvectors();
  }

  Eigen::MatrixXd matrix(double t) const {
    const Eigen::VectorXd e = (t * lambda).array().exp().matrix();
    return sqw.cwiseInverse().asDiagonal() * (V * e.asDiagonal() * V.transpose()) * sqw.asDiagonal();
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& f, double t) const {
    Eigen::VectorXd c = V.transpose() * sqw.cwiseProduct(f);
    c.array() *= (t * lambda).array().exp();
    return (V * c).cwiseQuotient(sqw);
  }
};

bool is_constant(const GridFunction& q) { return q.size() == 0 || (q.array() == q[0]).all(); }

}  // namespace

struct HeatPropagator::Dense {
  SymExp e;
};

struct HeatPropagator::Tensor {
  SymExp x, y;
  double c;
};

HeatPropagator::HeatPropagator(const Grid& grid, GridFunction potential)
    : HeatPropagator(grid, std::move(potential), Options{}) {}

HeatPropagator::HeatPropagator(const Grid& grid, GridFunction potential, Options opts)
    : grid_(grid), q_(std::move(potential)), opts_(opts) {
  if (q_.size() == 0) q_ = GridFunction::Zero(static_cast<Eigen::Index>(grid.size()));
  grid.check(q_);
  if (!q_.allFinite()) throw InvalidParameter("potential is not finite on the grid");
  if (grid.size() <= opts_.dense_limit) {
    dense_ = std::make_unique<Dense>(Dense{SymExp(Eigen::MatrixXd(grid.stiffness()), grid.weights(), q_)});
  } else if (grid.kind() == GridKind::Box && !grid.reweighted() && is_constant(q_)) {
    const Grid gx = Grid::interval(grid.lower()[0], grid.upper()[0], grid.n1());
    const Grid gy = Grid::interval(grid.lower()[1], grid.upper()[1], grid.n2());
    const Eigen::VectorXd zx = Eigen::VectorXd::Zero(grid.n1()), zy = Eigen::VectorXd::Zero(grid.n2());
    tensor_ = std::make_unique<Tensor>(Tensor{SymExp(Eigen::MatrixXd(gx.stiffness()), gx.weights(), zx),
                                              SymExp(Eigen::MatrixXd(gy.stiffness()), gy.weights(), zy), q_[0]});
  }
}

HeatPropagator::~HeatPropagator() = default;
HeatPropagator::HeatPropagator(HeatPropagator&&) noexcept = default;

GridFunction HeatPropagator::apply(const GridFunction& f, double t) const {
  grid_.check(f);
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidParameter("heat flow time must be nonnegative");
  if (t == 0.0) return f;
  if (dense_) return dense_->e.apply(f, t);
  if (tensor_) {
    // Row-major node order i*ny + j: F(i, j).
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> F(f.data(), grid_.n1(),
                                                                                                 grid_.n2());
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> U =
        tensor_->x.matrix(t) * F * tensor_->y.matrix(t).transpose();
    U *= std::exp(-tensor_->c * t);
    return Eigen::Map<const GridFunction>(U.data(), f.size());
  }
  return richardson(f, t);
}

GridFunction HeatPropagator::richardson(const GridFunction& f, double t) const {
  using SpMat = Eigen::SparseMatrix<double>;
  const SpMat& K = grid_.stiffness();
  const Eigen::VectorXd& w = grid_.weights();

  // N implicit Euler steps: (W - dt (K - W q)) u+ = W u.
  const auto euler = [&](long N) {
    const double dt = t / static_cast<double>(N);
    SpMat M = -dt * K;
    M.diagonal() += w + dt * w.cwiseProduct(q_);
    Eigen::SimplicialLDLT<SpMat> solver(M);
    if (solver.info() != Eigen::Success) throw SolverError("implicit Euler factorization failed");
    GridFunction u = f;
    for (long s = 0; s < N; ++s) {
      const GridFunction rhs = w.cwiseProduct(u);  // solve() must not alias its argument
      u = solver.solve(rhs);
      if (solver.info() != Eigen::Success) throw SolverError("implicit Euler solve failed");
    }
    return u;
  };

  // Romberg table on step counts N, 2N, 4N, ... ; the implicit Euler error
  // expands in powers of dt.
  long N = std::max(1L, static_cast<long>(std::ceil(t / opts_.dt0)));
  std::vector<GridFunction> prev{euler(N)};
  const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
  for (int level = 1; level <= opts_.max_doublings; ++level) {
    N *= 2;
    std::vector<GridFunction> row{euler(N)};
    for (size_t j = 1; j <= prev.size(); ++j) {
      const double fac = std::pow(2.0, static_cast<double>(j)) - 1.0;
      row.push_back(row[j - 1] + (row[j - 1] - prev[j - 1]) / fac);
    }
    const double diff = (row.back() - prev.back()).cwiseAbs().maxCoeff();
    if (diff <= opts_.tol * scale) return row.back();
    prev = std::move(row);
  }
  throw SolverError("heat solver step control did not converge within " + std::to_string(opts_.max_doublings) +
                    " doublings");
}

GridFunction neumann_heat(const Grid& grid, const GridFunction& f, double t) {
  HeatPropagator P(grid, GridFunction::Zero(static_cast<Eigen::Index>(grid.size())));
  return P.apply(f, t);
}

GridFunction schrodinger_heat(const Grid& grid, const GridFunction& f, const ScalarField& kappa, double t,
                              const ScalarField* beta) {
  GridFunction q = grid.sample(kappa);
  if (beta) q += grid.boundary_potential(*beta);
  HeatPropagator P(grid, std::move(q));
  return P.apply(f, t);
}

GridFunction gradient_norm(const Grid& grid, const GridFunction& u) {
  grid.check(u);
  const auto n = static_cast<Eigen::Index>(grid.size());
  GridFunction g(n);
  const auto at = [&](int i, int j) { return u[static_cast<Eigen::Index>(grid.index(i, j))]; };
  // Derivative along a line of m samples with spacing h.
  const auto d1 = [](auto&& v, int i, int m, double h) {
    if (i == 0) return (v(1) - v(0)) / h;
    if (i == m - 1) return (v(m - 1) - v(m - 2)) / h;
    return (v(i + 1) - v(i - 1)) / (2.0 * h);
  };
  switch (grid.kind()) {
    case GridKind::Interval:
    case GridKind::Radial: {
      const int m = grid.n1();
      for (int i = 0; i < m; ++i) {
        double d;
        if (grid.kind() == GridKind::Radial && i == 0 && grid.r0() == 0.0)
          d = (u[1] - u[0]) / (2.0 * grid.h1());  // mirror across the centre
        else
          d = d1([&](int k) { return u[k]; }, i, m, grid.h1());
        g[i] = std::abs(d);
      }
      break;
    }
    case GridKind::Box: {
      const int nx = grid.n1(), ny = grid.n2();
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
          const double dx = d1([&](int k) { return at(k, j); }, i, nx, grid.h1());
          const double dy = d1([&](int k) { return at(i, k); }, j, ny, grid.h2());
          g[static_cast<Eigen::Index>(grid.index(i, j))] = std::hypot(dx, dy);
        }
      break;
    }
    case GridKind::Polar: {
      const int nr = grid.n1(), nt = grid.n2();
      const double dr = grid.h1(), dth = grid.h2();
      for (int i = 0; i < nr; ++i) {
        const double rho = grid.r0() + (i + 0.5) * dr;
        for (int j = 0; j < nt; ++j) {
          double dr_u;
          if (i == 0 && grid.r0() == 0.0)
            dr_u = (at(1, j) - at(0, (j + nt / 2) % nt)) / (2.0 * dr);  // through the centre
          else
            dr_u = d1([&](int k) { return at(k, j); }, i, nr, dr);
          const double dt_u = (at(i, (j + 1) % nt) - at(i, (j + nt - 1) % nt)) / (2.0 * dth * rho);
          g[static_cast<Eigen::Index>(grid.index(i, j))] = std::hypot(dr_u, dt_u);
        }
      }
      break;
    }
  }
  return g;
}

}  // namespace kappa

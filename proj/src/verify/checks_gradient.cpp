#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kappa/errors.hpp"
#include "kappa/verify.hpp"
#include "support.hpp"

namespace kappa {

namespace detail {

double grid_spacing(const Grid& g) {
  switch (g.kind()) {
    case GridKind::Interval:
    case GridKind::Radial: return g.h1();
    case GridKind::Box: return std::max(g.h1(), g.h2());
    case GridKind::Polar: return std::max(g.h1(), g.R() * g.h2());
  }
  return g.h1();
}

std::vector<Vec> grid_gradient(const Grid& g, const GridFunction& u) {
  g.check(u);
  if (g.kind() != GridKind::Interval && g.kind() != GridKind::Box)
    throw UnsupportedGeometry("grid_gradient needs an Interval or Box grid");
  const auto d1 = [](auto&& v, int i, int m, double h) {
    if (i == 0) return (v(1) - v(0)) / h;
    if (i == m - 1) return (v(m - 1) - v(m - 2)) / h;
    return (v(i + 1) - v(i - 1)) / (2.0 * h);
  };
  std::vector<Vec> out(g.size());
  if (g.kind() == GridKind::Interval) {
    for (int i = 0; i < g.n1(); ++i) out[i] = Vec{d1([&](int k) { return u[k]; }, i, g.n1(), g.h1())};
    return out;
  }
  const auto at = [&](int i, int j) { return u[static_cast<Eigen::Index>(g.index(i, j))]; };
  for (int i = 0; i < g.n1(); ++i)
    for (int j = 0; j < g.n2(); ++j)
      out[g.index(i, j)] = Vec{d1([&](int k) { return at(k, j); }, i, g.n1(), g.h1()),
                               d1([&](int k) { return at(i, k); }, j, g.n2(), g.h2())};
  return out;
}

size_t probe_node(const Grid& g, const Point& p) {
  if (g.kind() == GridKind::Radial) {
    const double rho = distance(p, g.center());
    return g.nearest(g.center() + rho * Point::unit(g.dim(), 0));
  }
  return g.nearest(p);
}

std::string label_at(const Point& x) { return "x=" + x.str(); }

double mc_allowance(const CheckOptions& o, double grid_h) {
  return o.tolerance_scale * (std::sqrt(o.mc.h) + grid_h * grid_h);
}

nlohmann::json mc_params(const McParams& mc) {
  return {{"paths", mc.paths}, {"h", mc.h}, {"seed", mc.rng.seed}, {"antithetic", mc.antithetic},
          {"exponent_cap", mc.exponent_cap}};
}

}  // namespace detail

ClockPair ClockPair::from_semigroup(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("semigroup time must be positive");
  return {t, 2.0 * t};
}

ClockPair ClockPair::from_path(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidParameter("path horizon must be positive");
  return {0.5 * horizon, horizon};
}

void ClockPair::verify(const TamingResult& r) const {
  if (r.semigroup_time != semigroup_time || r.path_horizon != path_horizon) {
    std::ostringstream os;
    os << "clock mismatch: expected semigroup " << semigroup_time << " / path " << path_horizon << ", got "
       << r.semigroup_time << " / " << r.path_horizon;
    throw ClockError(os.str());
  }
}

std::string ClockPair::note() const {
  std::ostringstream os;
  os << "semigroup time " << semigroup_time << " (generator Δ) = path horizon " << path_horizon
     << " (generator Δ/2)";
  return os.str();
}

namespace {

Grid ge1_grid(const Domain& d, double t, int res) {
  switch (d.kind()) {
    case DomainKind::Interval: return Grid::interval(d.lower()[0], d.upper()[0], res ? res : 400);
    case DomainKind::Box:
      if (d.dim() != 2) break;
      return Grid::box(d.lower(), d.upper(), res ? res : 100, res ? res : 100);
    case DomainKind::Ball:
      if (d.dim() == 2) return Grid::polar(d.center(), 0.0, d.radius(), res ? res : 64, 2 * (res ? res : 64));
      if (d.dim() == 3) return Grid::radial(d.center(), 0.0, d.radius(), res ? res : 400, 3);
      break;
    case DomainKind::BallComplement: {
      // Far boundary well beyond the reach of the paths.
      const double R = d.radius() + std::max(d.radius(), 6.0 * std::sqrt(2.0 * t));
      if (d.dim() == 2) {
        const int nr = res ? res : 128;
        return Grid::polar(d.center(), d.radius(), R, nr, 2 * nr);
      }
      if (d.dim() == 3) return Grid::radial(d.center(), d.radius(), R, res ? res : 400, 3);
      break;
    }
    case DomainKind::HalfSpace: break;
  }
  throw UnsupportedGeometry("no PDE grid for " + d.name());
}

}  // namespace

Report check_ge1(const Domain& domain, const ScalarField& k, const ScalarField& ell, const ScalarField& f, double t,
                 const std::vector<Point>& probes, const CheckOptions& opts) {
  if (probes.empty()) throw InvalidParameter("check_ge1 needs probe points");
  const ClockPair clock = ClockPair::from_semigroup(t);
  const Grid grid = ge1_grid(domain, t, opts.grid);
  const GridFunction grad = gradient_norm(grid, neumann_heat(grid, grid.sample(f), clock.semigroup_time));

  std::vector<Point> x0s;
  std::vector<size_t> nodes;
  for (const auto& p : probes) {
    nodes.push_back(detail::probe_node(grid, p));
    x0s.push_back(grid.nodes()[nodes.back()]);
  }
  TamingSpec spec;
  spec.mode = TamingMode::GradientEstimate;
  spec.f = f;
  spec.k = k;
  spec.ell = ell;
  const TamingResult mc = taming_expectation(domain, spec, x0s, clock.semigroup_time, opts.mc);
  clock.verify(mc);

  Report r;
  r.check = "ge1";
  r.params = {{"domain", domain.name()},
              {"k", k.empty() ? "0" : k.describe()},
              {"ell", ell.empty() ? "0" : ell.describe()},
              {"f", f.describe()},
              {"t", t},
              {"grid_nodes", grid.size()},
              {"mc", detail::mc_params(opts.mc)}};
  r.clock_note = clock.note();
  r.warnings = mc.warnings;
  const double allow = detail::mc_allowance(opts, detail::grid_spacing(grid));
  for (size_t i = 0; i < x0s.size(); ++i) {
    const auto& e = mc.estimates[i];
    r.add(grad[static_cast<Eigen::Index>(nodes[i])], e.mean, e.se, allow, detail::label_at(x0s[i]));
  }
  r.poisoned = mc.poisoned();
  r.finalize();
  return r;
}

Report check_ge2(const Grid& grid, const ScalarField& k, double N, const ScalarField& f, double t,
                 double tolerance_scale) {
  if (grid.kind() != GridKind::Interval && grid.kind() != GridKind::Box)
    throw UnsupportedGeometry("check_ge2 needs an Interval or Box grid");
  if (!(N > 0.0)) throw InvalidParameter("dimension N must be positive");
  if (!(t > 0.0)) throw InvalidParameter("time must be positive");
  const GridFunction q = 2.0 * grid.sample(k);
  const double K1 = 0.5 * q.maxCoeff();

  const HeatPropagator heat(grid, GridFunction());
  const GridFunction u = heat.apply(grid.sample(f), t);
  const GridFunction g = gradient_norm(grid, u);
  const GridFunction lap = grid.apply_laplacian(u);
  const GridFunction lhs =
      g.cwiseProduct(g) + (2.0 * t / N) * std::exp(-2.0 * K1 * t) * lap.cwiseProduct(lap);

  GridFunction gam(static_cast<Eigen::Index>(grid.size()));
  for (size_t i = 0; i < grid.size(); ++i) gam[static_cast<Eigen::Index>(i)] = f.gamma(grid.nodes()[i]);
  const HeatPropagator taming(grid, q);
  const GridFunction rhs = taming.apply(gam, t);

  const double hg = detail::grid_spacing(grid);
  size_t worst = 0;
  double worst_adj = std::numeric_limits<double>::infinity(), raw_min = worst_adj;
  GridFunction allow(lhs.size());
  for (Eigen::Index i = 0; i < lhs.size(); ++i) {
    allow[i] = tolerance_scale * hg * hg * (1.0 + std::abs(rhs[i]));
    const double s = rhs[i] - lhs[i];
    raw_min = std::min(raw_min, s);
    if (s + allow[i] < worst_adj) {
      worst_adj = s + allow[i];
      worst = static_cast<size_t>(i);
    }
  }

  Report r;
  r.check = "ge2";
  r.params = {{"grid_nodes", grid.size()}, {"k", k.describe()}, {"N", N}, {"f", f.describe()}, {"t", t}};
  r.clock_note = "semigroup clock only (PDE on both sides)";
  const auto w = static_cast<Eigen::Index>(worst);
  r.add(lhs[w], rhs[w], 0.0, allow[w], "worst node " + detail::label_at(grid.nodes()[worst]));
  r.extra = {{"nodes_checked", grid.size()}, {"min_slack_raw", raw_min}, {"min_slack_after_allowance", worst_adj},
             {"K1", K1}};
  r.finalize();
  return r;
}

Report check_be1_weakform(const Grid& grid, const ScalarField& kappa, const ScalarField& f, const ScalarField& phi,
                          double tolerance_scale) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  GridFunction g(n), lapf(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& x = grid.nodes()[static_cast<size_t>(i)];
    g[i] = norm(f.grad(x));
    lapf[i] = f.laplacian(x);
  }
  const auto dg = detail::grid_gradient(grid, g);
  const auto dl = detail::grid_gradient(grid, lapf);

  const double floor = 1e-8;
  double bochner = 0.0, kterm = 0.0, mass = 0.0;
  size_t dropped = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& x = grid.nodes()[static_cast<size_t>(i)];
    const double p = phi(x);
    if (p < 0.0) throw InvalidParameter("test function must be nonnegative");
    if (p == 0.0) continue;
    if (g[i] < floor) {
      ++dropped;
      continue;
    }
    const double w = grid.weights()[i];
    const auto ii = static_cast<size_t>(i);
    bochner += w * (-dot(dg[ii], phi.grad(x)) - dot(f.grad(x), dl[ii]) / g[i] * p);
    kterm += w * kappa(x) * g[i] * p;
    mass += w * (p + norm(phi.grad(x)));
  }
  const double hg = detail::grid_spacing(grid);

  Report r;
  r.check = "be1_weakform";
  r.params = {{"grid_nodes", grid.size()}, {"kappa", kappa.describe()}, {"f", f.describe()}, {"phi", phi.describe()}};
  r.clock_note = "no clock (static inequality)";
  // lhs/rhs in Report terms: the κ side must not exceed the Bochner side.
  r.add(kterm, bochner, 0.0, tolerance_scale * hg * hg * mass, "integrated");
  r.extra = {{"bochner_side", bochner}, {"kappa_side", kterm}, {"dropped_nodes", dropped}};
  r.finalize();
  return r;
}

Report check_double_potential(const Domain& interval, const ScalarField& phi, const ScalarField& psi,
                              const ScalarField& f, double t, const std::vector<Point>& x0s,
                              const CheckOptions& opts) {
  if (interval.kind() != DomainKind::Interval) throw UnsupportedGeometry("check_double_potential needs an interval");
  const ClockPair clock = ClockPair::from_semigroup(t);
  const Grid grid = Grid::interval(interval.lower()[0], interval.upper()[0], opts.grid ? opts.grid : 1000);

  // Path weight exp(-∫φ ds + N^ψ) over horizon 2t is the Feynman-Kac weight of
  // the potential φ - Δψ/2 and the boundary rate -∂_ν ψ (inward normal).
  // In the semigroup clock the potential doubles.
  const ScalarField kappa =
      detail::pointwise([phi, psi](const Point& x) { return 2.0 * phi(x) - psi.laplacian(x); }, "2 phi - lap psi");
  const Domain d = interval;
  const ScalarField beta =
      detail::pointwise([psi, d](const Point& x) { return dot(psi.grad(x), d.grad_signed_distance(x)); },
                        "Gamma(psi, V)");
  const GridFunction pde = schrodinger_heat(grid, grid.sample(f), kappa, clock.semigroup_time, &beta);

  std::vector<Point> starts;
  std::vector<size_t> nodes;
  for (const auto& p : x0s) {
    nodes.push_back(grid.nearest(p));
    starts.push_back(grid.nodes()[nodes.back()]);
  }
  TamingSpec spec;
  spec.mode = TamingMode::DoublePotential;
  spec.f = f;
  spec.phi = phi;
  spec.psi = psi;
  const TamingResult mc = taming_expectation(interval, spec, starts, clock.semigroup_time, opts.mc);
  clock.verify(mc);

  Report r;
  r.check = "double_potential";
  r.params = {{"domain", interval.name()}, {"phi", phi.describe()}, {"psi", psi.describe()}, {"f", f.describe()},
              {"t", t}, {"grid_nodes", grid.size()}, {"mc", detail::mc_params(opts.mc)}};
  r.clock_note = clock.note();
  r.warnings = mc.warnings;
  for (size_t i = 0; i < starts.size(); ++i) {
    const double base = pde[static_cast<Eigen::Index>(nodes[i])];
    const auto& e = mc.estimates[i];
    const double allow = 0.02 * std::abs(base) * opts.tolerance_scale;
    r.add(e.mean, base, e.se, allow, detail::label_at(starts[i]) + " upper");
    r.add(base, e.mean, e.se, allow, detail::label_at(starts[i]) + " lower");
  }
  r.poisoned = mc.poisoned();
  r.finalize();
  return r;
}

}  // namespace kappa

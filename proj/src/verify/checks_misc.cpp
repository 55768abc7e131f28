#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "kappa/conformal.hpp"
#include "kappa/errors.hpp"
#include "kappa/parallel.hpp"
#include "kappa/verify.hpp"
#include "support.hpp"

namespace kappa {

namespace {

using std::numbers::pi;

struct IbpValue {
  double volume = 0.0, boundary = 0.0, h = 0.0;
};

IbpValue ibp_at(const Domain& d, const ScalarField& f, const ScalarField& g, int n) {
  IbpValue v;
  const auto volume_term = [&](const Point& x) { return dot(f.grad(x), g.grad(x)) + f.laplacian(x) * g(x); };
  const auto boundary_term = [&](const Point& x) { return dot(f.grad(x), d.grad_signed_distance(x)) * g(x); };
  if (d.kind() == DomainKind::Interval) {
    const Grid grid = Grid::interval(d.lower()[0], d.upper()[0], n);
    for (size_t i = 0; i < grid.size(); ++i) v.volume += grid.weights()[static_cast<Eigen::Index>(i)] * volume_term(grid.nodes()[i]);
    v.boundary = boundary_term(d.lower()) + boundary_term(d.upper());
    v.h = grid.h1();
    return v;
  }
  if (d.kind() == DomainKind::Ball && d.dim() == 2) {
    // Midpoint in ρ, periodic rectangle rule in θ.
    const Grid grid = Grid::polar(d.center(), 0.0, d.radius(), n, n);
    for (size_t i = 0; i < grid.size(); ++i) v.volume += grid.weights()[static_cast<Eigen::Index>(i)] * volume_term(grid.nodes()[i]);
    const double r = d.radius();
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * pi * k / n;
      v.boundary += (2.0 * pi * r / n) * boundary_term(d.center() + Point{r * std::cos(th), r * std::sin(th)});
    }
    v.h = grid.h1();
    return v;
  }
  throw UnsupportedGeometry("integration by parts needs an Interval or a disc, got " + d.name());
}

}  // namespace

Report check_integration_by_parts(const Domain& domain, const ScalarField& f, const ScalarField& g, int resolution,
                                  double boundary_factor, double tolerance_scale) {
  if (resolution < 16) throw InvalidParameter("integration by parts needs resolution >= 16");
  std::vector<IbpValue> vals;
  std::vector<double> err;
  for (int n : {resolution / 4, resolution / 2, resolution}) {
    vals.push_back(ibp_at(domain, f, g, n));
    err.push_back(std::abs(vals.back().volume - vals.back().boundary));
  }
  const IbpValue& v = vals.back();
  const double lhs = v.volume, rhs = boundary_factor * v.boundary;

  Report rep;
  rep.check = "integration_by_parts";
  rep.params = {{"domain", domain.name()}, {"f", f.describe()}, {"g", g.describe()}, {"resolution", resolution},
                {"boundary_factor", boundary_factor}};
  rep.clock_note = "no clock (static identity)";
  const double allow = tolerance_scale * 10.0 * v.h * v.h * std::max(1.0, std::abs(rhs));
  rep.add(lhs, rhs, 0.0, allow, "volume <= boundary");
  rep.add(rhs, lhs, 0.0, allow, "boundary <= volume");
  nlohmann::json order = nullptr;
  if (err[2] > 1e-13 && err[1] > 1e-13) order = std::log2(err[1] / err[2]);
  rep.extra = {{"volume", lhs},
               {"boundary", rhs},
               {"abs_error", std::abs(lhs - rhs)},
               {"errors_n4_n2_n", err},
               {"observed_order", order}};
  rep.finalize();
  return rep;
}

namespace {

// Maximum of |F| on [lo, hi]: dense sampling, then Brent around the best sample.
template <class F>
double sup_abs(F&& fn, double lo, double hi, int samples) {
  const double dx = (hi - lo) / samples;
  double best = -1.0, at = lo;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (i + 0.5) * dx;
    const double v = std::abs(fn(x));
    if (v > best) {
      best = v;
      at = x;
    }
  }
  const auto neg = [&](double x) { return -std::abs(fn(x)); };
  const auto res = boost::math::tools::brent_find_minima(neg, std::max(lo, at - dx), std::min(hi, at + dx),
                                                         std::numeric_limits<double>::digits);
  return std::max(best, -res.second);
}

double midpoint_abs(const std::function<double(double)>& fn, double lo, double hi, int n) {
  const double dx = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::abs(fn(lo + (i + 0.5) * dx));
  return s * dx;
}

}  // namespace

CantorWeight cantor_weight(int j, const Profile& bump) {
  CantorWeight out{Profile::cantor(j, bump), {}};
  const Profile& Phi = out.profile;

  const double bump_sup = sup_abs([&](double x) { return bump(x); }, -0.5, 0.5, 20000);
  const double bump_d1 = sup_abs([&](double x) { return bump.jet(x).d1; }, -0.5, 0.5, 20000);
  const double C = midpoint_abs([&](double x) { return bump.jet(x).d2; }, -0.5, 0.5, 200000);

  const double Phi_sup = sup_abs([&](double x) { return Phi(x); }, 0.0, 1.0, 100000);
  const double Phi_d1 = sup_abs([&](double x) { return Phi.jet(x).d1; }, 0.0, 1.0, 100000);
  // ∫|Φ''| over the removed intervals, each resolved by its own midpoint rule.
  double tv = 0.0;
  for (int n = 1; n <= j; ++n) {
    const double len = std::pow(3.0, -n);
    const long count = 1L << (n - 1);
    for (long k = 0; k < count; ++k) {
      // Left end of the k-th surviving interval of generation n-1.
      double a = 0.0;
      for (int b = 0; b < n - 1; ++b)
        if (k & (1L << (n - 2 - b))) a += 2.0 * std::pow(3.0, -(b + 1));
      tv += midpoint_abs([&](double x) { return Phi.jet(x).d2; }, a + len, a + 2.0 * len, 4000);
    }
  }
  const double target = C * (std::pow(2.0, j) - 1.0);

  Report& r = out.report;
  r.check = "cantor_weight";
  r.params = {{"j", j}, {"bump", bump.describe()}};
  r.clock_note = "no clock (construction)";
  r.add(Phi_sup, bump_sup / 3.0, 0.0, 1e-10, "sup|Phi| <= sup|bump| / 3");
  r.add(Phi_d1, bump_d1, 0.0, 1e-10, "sup|Phi'| <= sup|bump'|");
  r.add(tv, 1.01 * target, 0.0, 0.0, "int|Phi''| <= 1.01 C (2^j - 1)");
  r.add(0.99 * target, tv, 0.0, 0.0, "int|Phi''| >= 0.99 C (2^j - 1)");
  r.extra = {{"sup_phi", Phi_sup},  {"sup_bump", bump_sup}, {"sup_dphi", Phi_d1}, {"sup_dbump", bump_d1},
             {"C", C},              {"total_variation", tv}, {"target", target},
             {"ratio", target > 0.0 ? nlohmann::json(tv / target) : nlohmann::json(nullptr)}};
  r.finalize();
  return out;
}

Report cantor2_scenario(int j, double t, const CheckOptions& opts) {
  const ScalarField psi =
      ScalarField::separable(Profile::cantor(j, Profile::cos2_bump()), 0, Profile::cantor_eta(), 1);
  const CurvatureBoundSpec spec{ScalarField::constant(0.0), 2.0, std::numeric_limits<double>::infinity()};
  const auto kj = [psi, spec](const Point& x) { return timechange_curvature(spec, psi, x); };
  const Domain box = Domain::box(Point{0.0, -1.0}, Point{1.0, 1.0});

  double sup_k = 0.0, sup_psi = 0.0;
  {
    const int n1 = static_cast<int>(std::min(20.0 * std::pow(3.0, j), 2e5)), n2 = 41;
    for (int a = 0; a < n1; ++a)
      for (int b = 0; b < n2; ++b) {
        const Point x{(a + 0.5) / n1, -1.0 + 2.0 * (b + 0.5) / n2};
        sup_k = std::max(sup_k, std::abs(kj(x)));
        sup_psi = std::max(sup_psi, std::abs(psi(x)));
      }
  }

  // Conformal change in 2D: same Dirichlet form, measure e^{2ψ} dx, so the
  // generator is e^{-2ψ}Δ and |∇'u| = e^{-ψ}|∇u|.
  const ClockPair clock = ClockPair::from_semigroup(t);
  const int n = opts.grid ? opts.grid : 40;
  const Grid flat = Grid::box(box.lower(), box.upper(), n, 2 * n);
  const GridFunction psi_s = flat.sample(psi);
  const Grid grid = flat.reweighted((2.0 * psi_s).array().exp().matrix());
  const ScalarField f = ScalarField::affine(Vec{1.0, 0.5}, 0.0);
  const GridFunction grad = gradient_norm(grid, HeatPropagator(grid, GridFunction()).apply(grid.sample(f), t));

  const std::vector<Point> probes = {Point{0.5, 0.38}, Point{0.5, -0.38}, Point{0.2, 0.1}};
  const double h = opts.mc.h;
  const size_t m = step_count(clock.path_horizon, h);
  // Flat horizon long enough that σ(T) >= 2t.
  const double T_flat = h * std::ceil(1.05 * clock.path_horizon * std::exp(2.0 * sup_psi) / h + 1.0);

  Report r;
  r.check = "cantor2";
  r.params = {{"j", j}, {"t", t}, {"grid_nodes", grid.size()}, {"f", f.describe()}, {"mc", detail::mc_params(opts.mc)}};
  r.clock_note = clock.note() + ", in the time-changed clock";
  const double allow = detail::mc_allowance(opts, detail::grid_spacing(grid));
  size_t caps = 0;
  for (size_t p = 0; p < probes.size(); ++p) {
    const size_t node = grid.nearest(probes[p]);
    const Point x0 = grid.nodes()[node];
    const RngSpec stream = opts.mc.rng.derive(p);
    std::vector<double> vals(opts.mc.paths, std::nan(""));
    std::vector<unsigned char> capped(opts.mc.paths, 0);
    parallel_for(
        opts.mc.paths,
        [&](size_t i) {
          try {
            const PathSample tc = time_change_path(simulate_reflected(box, x0, T_flat, h, stream, i), psi);
            if (tc.steps() < m) throw ClockError("time-changed path shorter than the horizon");
            double ik = 0.0, prev = kj(tc.positions[0]);
            for (size_t s = 1; s <= m; ++s) {
              const double next = kj(tc.positions[s]);
              ik += 0.5 * (prev + next) * h;
              prev = next;
            }
            double e = -0.5 * ik;
            if (e > opts.mc.exponent_cap) {
              e = opts.mc.exponent_cap;
              capped[i] = 1;
            }
            const Point& xT = tc.positions[m];
            vals[i] = std::exp(e) * std::exp(-psi(xT)) * norm(f.grad(xT));
          } catch (const SingularityError&) {
          }
        },
        opts.mc.threads);
    std::vector<double> ok;
    for (size_t i = 0; i < vals.size(); ++i)
      if (!std::isnan(vals[i])) {
        ok.push_back(vals[i]);
        caps += capped[i];
      }
    const MeanEstimate me = mean_se(ok);
    if (me.used < vals.size()) r.warnings.push_back(std::to_string(vals.size() - me.used) + " paths rejected");
    const auto ni = static_cast<Eigen::Index>(node);
    r.add(std::exp(-psi_s[ni]) * grad[ni], me.mean, me.se, allow, detail::label_at(x0));
  }
  if (caps > 0) {
    r.poisoned = true;
    r.warnings.push_back(std::to_string(caps) + " paths hit the exponent cap");
  }
  r.extra = {{"sup_abs_k", sup_k}, {"sup_abs_psi", sup_psi}, {"flat_horizon", T_flat}};
  r.finalize();
  return r;
}

}  // namespace kappa

#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "kappa/errors.hpp"
#include "kappa/parallel.hpp"
#include "kappa/verify.hpp"
#include "support.hpp"

namespace kappa {

Report check_ball_decay(double r, int dim, double t, const CheckOptions& opts, std::optional<double> weight) {
  if (!(r > 0.0 && r < std::numbers::pi / 4)) throw InvalidParameter("ball decay needs 0 < r < pi/4");
  if (dim < 2 || dim > 3) throw InvalidParameter("ball decay needs dimension 2 or 3");
  const double cot = 1.0 / std::tan(r);
  const double w = weight.value_or(cot);
  const double bound = std::exp(1.0 - t * 0.5 * (dim - 1) * cot * cot);

  const Domain ball = Domain::ball(Point::zero(dim), r);
  const std::vector<Point> probes = {Point::zero(dim), 0.5 * r * Point::unit(dim, 0), r * Point::unit(dim, 0)};

  // E[exp(-w L_t)] is the gradient weight of ℓ = 2w against |∇x1| = 1.
  const ClockPair clock = ClockPair::from_path(t);
  TamingSpec spec;
  spec.mode = TamingMode::GradientEstimate;
  spec.f = ScalarField::affine(Point::unit(dim, 0), 0.0);
  spec.ell = ScalarField::constant(2.0 * w);
  const TamingResult mc = taming_expectation(ball, spec, probes, clock.semigroup_time, opts.mc);
  clock.verify(mc);

  Report rep;
  rep.check = "ball_decay";
  rep.params = {{"r", r}, {"dim", dim}, {"t", t}, {"weight", w}, {"mc", detail::mc_params(opts.mc)}};
  rep.clock_note = "path clock t = " + std::to_string(t) + "; " + clock.note();
  rep.warnings = mc.warnings;
  if (bound >= 1.0) rep.warnings.push_back("trivial bound: exp(1 - t (N-1)/2 cot^2 r) >= 1");
  for (size_t i = 0; i < probes.size(); ++i)
    rep.add(mc.estimates[i].mean, bound, mc.estimates[i].se, 0.0, detail::label_at(probes[i]));

  // First link of the chain: |∇P f|^2 / P|∇f|^2 for f = |x|^2 on the radial grid.
  const Grid g = Grid::radial(Point::zero(dim), 0.0, r, opts.grid ? opts.grid : 400, dim);
  const GridFunction u = neumann_heat(g, g.sample(ScalarField::radial(Profile::polynomial({0.0, 0.0, 1.0}),
                                                                      Point::zero(dim))),
                                      clock.semigroup_time);
  GridFunction grad2(static_cast<Eigen::Index>(g.size()));
  for (size_t i = 0; i < g.size(); ++i) {
    const double rho = distance(g.nodes()[i], g.center());
    grad2[static_cast<Eigen::Index>(i)] = 4.0 * rho * rho;
  }
  const GridFunction Pgrad2 = neumann_heat(g, grad2, clock.semigroup_time);
  const GridFunction gu = gradient_norm(g, u);
  nlohmann::json first = nlohmann::json::array();
  for (size_t i = 1; i < probes.size(); ++i) {
    const auto n = static_cast<Eigen::Index>(detail::probe_node(g, probes[i]));
    const double ratio = gu[n] * gu[n] / Pgrad2[n];
    first.push_back({{"x", probes[i].str()}, {"ratio", ratio}, {"mc", mc.estimates[i].mean},
                     {"holds", ratio <= mc.estimates[i].mean + 3.0 * mc.estimates[i].se}});
  }
  rep.extra = {{"bound", bound}, {"gradient_ratio", first}};
  rep.poisoned = mc.poisoned();
  rep.finalize();
  return rep;
}

Report check_cball(double r, double t, const CheckOptions& opts) {
  const Domain d = Domain::ball_complement(Point{0.0, 0.0, 0.0}, r);
  const ScalarField f = ScalarField::radial(Profile::rescaled(Profile::poly_bump(), 2.5 * r, 2.0 * r), d.center());
  const std::vector<Point> probes = {Point{r, 0.0, 0.0}, Point{1.5 * r, 0.0, 0.0}, Point{2.5 * r, 0.0, 0.0}};
  Report rep = check_ge1(d, ScalarField::constant(-1.0), boundary_curvature_bound(d), f, t, probes, opts);
  rep.check = "cball";

  // Growth of E[exp(L_t / r)] from the boundary, path clock.
  const std::vector<double> ts = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const size_t n = opts.mc.paths, m = ts.size();
  std::vector<size_t> idx;
  for (double s : ts) idx.push_back(step_count(s, opts.mc.h));
  const RngSpec stream = opts.mc.rng.derive(0xcba11);
  std::vector<double> expo(n * m, std::nan(""));
  parallel_for(
      n,
      [&](size_t i) {
        try {
          const PathSample p = simulate_reflected(d, probes[0], ts.back(), opts.mc.h, stream, i);
          for (size_t j = 0; j < m; ++j) expo[i * m + j] = p.localtime[idx[j]] / r;
        } catch (const SingularityError&) {
        }
      },
      opts.mc.threads);
  size_t caps = 0;
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  Eigen::MatrixXd A(static_cast<Eigen::Index>(m), 3);
  nlohmann::json table = nlohmann::json::array();
  for (size_t j = 0; j < m; ++j) {
    std::vector<double> v;
    for (size_t i = 0; i < n; ++i) {
      double e = expo[i * m + j];
      if (std::isnan(e)) continue;
      if (e > opts.mc.exponent_cap) {
        e = opts.mc.exponent_cap;
        ++caps;
      }
      v.push_back(std::exp(e));
    }
    const MeanEstimate me = mean_se(v);
    const auto jj = static_cast<Eigen::Index>(j);
    y[jj] = std::log(me.mean);
    A(jj, 0) = 1.0;
    A(jj, 1) = ts[j];
    A(jj, 2) = std::sqrt(ts[j]);
    table.push_back({{"t", ts[j]}, {"mean", me.mean}, {"se", me.se}});
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
  const double rms = std::sqrt((A * c - y).squaredNorm() / static_cast<double>(m));
  rep.extra["growth"] = {{"table", table},
                         {"fit", {{"a", c[0]}, {"b", c[1]}, {"c", c[2]}}},
                         {"rms_residual", rms},
                         {"cap_hits", caps},
                         {"note", "diagnostic fit of log E[exp(L_t / r)] = a + b t + c sqrt(t); no verdict"}};
  if (caps > 0) {
    rep.poisoned = true;
    rep.warnings.push_back(std::to_string(caps) + " growth paths hit the exponent cap");
  }
  rep.finalize();
  return rep;
}

Report check_spectral_gap(double r, int resolution, std::optional<double> bound) {
  if (!(r > 0.0 && r < std::numbers::pi / 4)) throw InvalidParameter("spectral gap check needs 0 < r < pi/4");
  const double cot = 1.0 / std::tan(r);
  const double b = bound.value_or(0.5 * cot * cot);
  const double lambda = spectral_gap(Domain::ball(Point{0.0, 0.0}, r), resolution);
  const double j = bessel_j_prime_zero(1, 1);
  const double exact = (j / r) * (j / r);

  Report rep;
  rep.check = "spectral_gap";
  rep.params = {{"r", r}, {"N", 2}, {"resolution", resolution}, {"bound", b}};
  rep.clock_note = "no clock (eigenvalue)";
  rep.add(b, lambda, 0.0, 0.0, "lambda_1 >= bound");
  rep.extra = {{"lambda_1", lambda}, {"bessel", exact}, {"relative_error", std::abs(lambda - exact) / exact}};
  rep.finalize();
  return rep;
}

}  // namespace kappa

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kappa/conformal.hpp"
#include "kappa/parallel.hpp"
#include "kappa/verify.hpp"
#include "support.hpp"

namespace kappa {

Report check_local_time_law(const CheckOptions& opts, size_t rate_paths) {
  const Domain line = Domain::half_space(1, 0, 0.0);
  const double target = std::sqrt(2.0 / std::numbers::pi);
  const MeanEstimate e = local_time_mean(line, Point{0.0}, 1.0, opts.mc.h, opts.mc.paths, opts.mc.rng, opts.mc.threads);

  Report r;
  r.check = "local_time_law";
  r.params = {{"domain", line.name()}, {"T", 1.0}, {"mc", detail::mc_params(opts.mc)}, {"rate_paths", rate_paths}};
  r.clock_note = "path clock T = 1";
  const double allow = 0.02 * opts.tolerance_scale;
  r.add(e.mean, target, e.se, allow, "E[L_1] <= sqrt(2/pi)");
  r.add(target, e.mean, e.se, allow, "E[L_1] >= sqrt(2/pi)");
  r.extra = {{"mean", e.mean}, {"se", e.se}, {"target", target}};

  if (rate_paths > 0) {
    nlohmann::json rows = nlohmann::json::array();
    std::vector<MeanEstimate> d;
    for (double h : {4e-3, 2e-3, 1e-3}) {
      d.push_back(local_time_refinement(line, Point{0.0}, 1.0, h, rate_paths, opts.mc.rng.derive(7), opts.mc.threads));
      rows.push_back({{"h", h}, {"d", d.back().mean}, {"se", d.back().se}});
    }
    const auto rate = [](const MeanEstimate& a, const MeanEstimate& b) { return std::log2(a.mean / b.mean); };
    const auto rate_se = [](const MeanEstimate& a, const MeanEstimate& b) {
      return std::hypot(a.se / a.mean, b.se / b.mean) / std::numbers::ln2;
    };
    r.add(0.4, rate(d[1], d[2]), rate_se(d[1], d[2]), 0.0, "bias rate at h = 2e-3 -> 1e-3 >= 0.4");
    r.extra["refinement"] = rows;
    r.extra["rates"] = {rate(d[0], d[1]), rate(d[1], d[2])};
  }
  r.finalize();
  return r;
}

Report check_decomposition(size_t paths, const RngSpec& rng, int threads) {
  const Domain d = Domain::ball(Point{0.0, 0.0}, 1.0);
  const std::vector<ScalarField> psis = {
      ScalarField::along_axis(Profile::sine(0.3, 1.0), 0),
      ScalarField::separable(Profile::cosine(0.7, 2.0), 0, Profile::sine(1.0, 1.0), 1),
      ScalarField::radial(Profile::polynomial({0.1, 0.0, 1.5, 0.0, -0.4}), Point{0.2, 0.1})};
  Report r;
  r.check = "decomposition";
  r.params = {{"domain", d.name()}, {"paths", paths}, {"T", 0.5}, {"h", 1e-3}, {"seed", rng.seed}};
  r.clock_note = "path clock T = 0.5";
  for (size_t k = 0; k < psis.size(); ++k) {
    std::vector<double> res(paths);
    const RngSpec stream = rng.derive(k);
    parallel_for(
        paths,
        [&](size_t i) {
          const PathSample p = simulate_reflected(d, Point{0.3, 0.1}, 0.5, 1e-3, stream, i, &psis[k]);
          res[i] = decomposition_identity(p, psis[k]);
        },
        threads);
    r.add(*std::max_element(res.begin(), res.end()), 1e-12, 0.0, 0.0, psis[k].describe());
  }
  r.finalize();
  return r;
}

Report check_evi(const std::string& which) {
  Report r;
  r.check = "evi_" + which;
  r.clock_note = "gradient-flow time";
  if (which == "quadratic") {
    const double lambda = 1.3;
    const auto V = ScalarField::radial(Profile::polynomial({0.0, 0.0, 0.5 * lambda}), Point{0.0, 0.0});
    const auto c = evi_contraction(V, ScalarField::constant(lambda), Point{1.0, 0.0}, Point{-0.2, 0.7}, 1.5, 0.05);
    r.params = {{"V", V.describe()}, {"lambda", lambda}, {"T", 1.5}, {"dt", 0.05}};
    for (size_t i = 0; i < c.t.size(); ++i) {
      const std::string at = "t=" + std::to_string(c.t[i]);
      r.add(c.distance[i], c.bound[i], 0.0, 1e-6, at + " upper");
      r.add(c.bound[i], c.distance[i], 0.0, 1e-6, at + " lower");
    }
    r.extra = {{"max_abs_gap", c.max_abs_gap()}};
  } else if (which == "quartic") {
    const auto V = ScalarField::radial(Profile::polynomial({0.0, 0.0, 0.0, 0.0, 0.25}), Point{0.0, 0.0});
    const auto ell = ScalarField::radial(Profile::polynomial({0.0, 0.0, 1.0}), Point{0.0, 0.0});
    const auto c = evi_contraction(V, ell, Point{2.0, 0.0}, Point{0.0, 1.9}, 0.1, 0.005);
    r.params = {{"V", V.describe()}, {"ell", ell.describe()}, {"T", 0.1}, {"dt", 0.005}};
    for (size_t i = 0; i < c.t.size(); ++i) r.add(c.distance[i], c.bound[i], 0.0, 0.0, "t=" + std::to_string(c.t[i]));
    r.extra = {{"min_slack", c.min_slack()}};
  } else {
    throw InvalidParameter("unknown contraction case '" + which + "'");
  }
  r.finalize();
  return r;
}

Report check_geodesic_circle() {
  const Point z{0.3, -0.2};
  const double rad = 0.8;
  const auto psi = ScalarField::log_radial(z, rad, -1.0);
  const auto g = geodesic(psi, z + Point{rad, 0.0}, z + Point{0.0, rad});
  double dev = 0.0;
  for (const auto& v : g.vertices()) dev = std::max(dev, std::abs(distance(v, z) - rad));
  Report r;
  r.check = "geodesic_circle";
  r.params = {{"psi", psi.describe()}, {"center", z.str()}, {"radius", rad}};
  r.clock_note = "no clock (geodesic)";
  r.add(dev, 1e-3 * rad, 0.0, 0.0, "max radial deviation");
  r.extra = {{"max_radial_deviation", dev}, {"length", conformal_length(psi, g)}};
  r.finalize();
  return r;
}

}  // namespace kappa

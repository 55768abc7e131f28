#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "kappa/conformal.hpp"
#include "kappa/errors.hpp"
#include "kappa/verify.hpp"

namespace kappa {

namespace {

using std::numbers::pi;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CheckOptions options(const SuiteOptions& o, const std::string& id, size_t paths, double h, int grid = 0) {
  CheckOptions c;
  c.mc.paths = o.paths.value_or(paths);
  c.mc.h = o.h.value_or(h);
  c.mc.rng = o.rng.derive(fnv1a(id));
  c.mc.threads = o.threads;
  c.grid = o.grid.value_or(grid);
  c.tolerance_scale = o.tolerance_scale;
  return c;
}

ScalarField x_axis(int dim, int axis) { return ScalarField::affine(Point::unit(dim, axis), 0.0); }

Report revuz(const SuiteOptions& o, const std::string& id, const Domain& d, const Point& x0) {
  const CheckOptions c = options(o, id, 10000, 1e-3);
  return local_time_consistency(d, x0, 0.5, c.mc.h, c.mc.paths, c.mc.rng, c.tolerance_scale, c.mc.threads);
}

Report double_potential(const SuiteOptions& o, const std::string& id, const ScalarField& psi) {
  const CheckOptions c = options(o, id, 10000, 1e-3);
  const Domain d = Domain::interval(0.0, pi);
  const ScalarField f = ScalarField::along_axis(Profile::cosine(0.5, 1.0), 0) + 1.0;
  return check_double_potential(d, ScalarField::constant(0.7), psi, f, 0.1, {Point{0.2}, Point{1.5}, Point{2.9}}, c);
}

Report ge1_ball(const SuiteOptions& o, const std::string& id, double ell) {
  const Domain d = Domain::ball(Point{0.0, 0.0}, 0.5);
  return check_ge1(d, ScalarField::constant(0.0), ScalarField::constant(ell), x_axis(2, 0), 0.05,
                   {Point{0.0, 0.5}, Point{0.0, 0.25}, Point{0.2, 0.1}}, options(o, id, 10000, 1e-3));
}

Report be1(double kappa, double scale) {
  const Grid g = Grid::interval(0.0, pi, 1000);
  const ScalarField phi = ScalarField::along_axis(Profile::rescaled(Profile::poly_bump(), pi / 2, 2.0), 0);
  Report r = check_be1_weakform(g, ScalarField::constant(kappa), ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0),
                                phi, scale);
  return r;
}

Report convexity(const ScalarField& psi) {
  const Domain d = Domain::ball_complement(Point{0.0, 0.0}, 1.0);
  PairSampler s;
  s.pairs = 12;
  s.max_separation = 1.2;
  return check_local_convexity(d, psi, s);
}

Report ibp_ball(const ScalarField& f, const ScalarField& g, double factor, const SuiteOptions& o) {
  return check_integration_by_parts(Domain::ball(Point{0.0, 0.0}, 1.0), f, g, o.grid.value_or(256), factor,
                                    o.tolerance_scale);
}

ScalarField ibp_f() { return ScalarField::separable(Profile::cosine(1.0, 1.3), 0, Profile::sine(1.0, 0.7, 0.4), 1); }
ScalarField ibp_g() { return ScalarField::affine(Vec{0.5, -0.3}, 1.0); }

std::vector<SuiteEntry> build() {
  using V = Verdict;
  std::vector<SuiteEntry> e;
  const auto add = [&](std::string id, std::string desc, V expected, std::function<Report(const SuiteOptions&)> fn) {
    e.push_back({std::move(id), std::move(desc), expected, std::move(fn)});
  };

  add("local_time_law", "E[L_1] on the half-line against sqrt(2/pi)", V::Pass,
      [](const SuiteOptions& o) { return check_local_time_law(options(o, "local_time_law", 20000, 1e-3)); });
  add("revuz_halfspace", "push-sum local time against the Revuz identity, half-plane", V::Pass,
      [](const SuiteOptions& o) { return revuz(o, "revuz_halfspace", Domain::half_space(2, 0, 0.0), Point{0.1, 0.0}); });
  add("revuz_ball", "push-sum local time against the Revuz identity, unit disc", V::Pass,
      [](const SuiteOptions& o) { return revuz(o, "revuz_ball", Domain::ball(Point{0.0, 0.0}, 1.0), Point{0.5, 0.0}); });
  add("revuz_complement", "push-sum local time against the Revuz identity, exterior of the unit ball in R^3",
      V::Pass, [](const SuiteOptions& o) {
        return revuz(o, "revuz_complement", Domain::ball_complement(Point{0.0, 0.0, 0.0}, 1.0), Point{1.2, 0.0, 0.0});
      });
  add("decomposition", "pathwise martingale / additive functional split", V::Pass, [](const SuiteOptions& o) {
    return check_decomposition(1000, o.rng.derive(fnv1a("decomposition")), o.threads);
  });
  add("double_potential", "taming semigroup with phi = 0.7, psi = 0.3 sin x against the PDE", V::Pass,
      [](const SuiteOptions& o) {
        return double_potential(o, "double_potential", ScalarField::along_axis(Profile::sine(0.3, 1.0), 0));
      });
  add("double_potential_constant", "taming semigroup with psi = 0 against exp(-2ct) P_t", V::Pass,
      [](const SuiteOptions& o) { return double_potential(o, "double_potential_constant", ScalarField::constant(0.0)); });

  add("ge1_interval", "gradient bound on [0, pi], f = cos x", V::Pass, [](const SuiteOptions& o) {
    return check_ge1(Domain::interval(0.0, pi), ScalarField::constant(0.0), ScalarField::constant(0.0),
                     ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0), 0.5, {Point{0.3}, Point{pi / 2}, Point{2.5}},
                     options(o, "ge1_interval", 10000, 1e-3));
  });
  add("ge1_ball", "gradient bound on the disc of radius 0.5, l = 1/r, f = x1", V::Pass,
      [](const SuiteOptions& o) { return ge1_ball(o, "ge1_ball", 2.0); });
  add("ge1_ball_radial", "gradient bound on the disc of radius 0.5, l = 1/r, f = |x|^2", V::Pass,
      [](const SuiteOptions& o) {
        const Domain d = Domain::ball(Point{0.0, 0.0}, 0.5);
        return check_ge1(d, ScalarField::constant(0.0), boundary_curvature_bound(d),
                         ScalarField::radial(Profile::polynomial({0.0, 0.0, 1.0}), Point{0.0, 0.0}), 0.5,
                         {Point{0.1, 0.0}, Point{0.3, 0.2}, Point{0.5, 0.0}}, options(o, "ge1_ball_radial", 10000, 1e-3));
      });
  add("ge1_ball_control", "control: l = 10/r overstates the boundary curvature", V::Fail,
      [](const SuiteOptions& o) { return ge1_ball(o, "ge1_ball_control", 20.0); });

  add("ge2_interval", "dimensional gradient bound, [0, pi], N = 1, t = 0.3", V::Pass, [](const SuiteOptions& o) {
    return check_ge2(Grid::interval(0.0, pi, o.grid.value_or(1000)), ScalarField::constant(0.0), 1.0,
                     ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0), 0.3, o.tolerance_scale);
  });
  add("ge2_box", "dimensional gradient bound, [0, pi]^2, N = 2, t = 0.3", V::Pass, [](const SuiteOptions& o) {
    const int n = o.grid.value_or(200);
    return check_ge2(Grid::box(Point{0.0, 0.0}, Point{pi, pi}, n, n), ScalarField::constant(0.0), 2.0,
                     ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0), 0.3, o.tolerance_scale);
  });
  add("be1_interval", "weak Bochner inequality on [0, pi], kappa = 0", V::Pass,
      [](const SuiteOptions& o) { return be1(0.0, o.tolerance_scale); });
  add("be1_control", "control: kappa = +1 on the flat interval", V::Fail,
      [](const SuiteOptions& o) { return be1(1.0, o.tolerance_scale); });

  add("ball_decay", "E[exp(-cot r L_t)] on the disc r = 0.5, t = 2", V::Pass,
      [](const SuiteOptions& o) { return check_ball_decay(0.5, 2, 2.0, options(o, "ball_decay", 10000, 1e-3)); });
  add("ball_decay_control", "control: boundary weight 0", V::Fail, [](const SuiteOptions& o) {
    return check_ball_decay(0.5, 2, 2.0, options(o, "ball_decay_control", 10000, 1e-3), 0.0);
  });
  add("cball", "gradient bound outside the unit ball in R^3 with k = -1, l = -1/r", V::Pass,
      [](const SuiteOptions& o) { return check_cball(1.0, 0.5, options(o, "cball", 10000, 1e-3)); });
  add("cball_control", "control: boundary term dropped outside the unit disc, f = x2", V::Fail,
      [](const SuiteOptions& o) {
        return check_ge1(Domain::ball_complement(Point{0.0, 0.0}, 1.0), ScalarField::constant(0.0),
                         ScalarField::constant(0.0), x_axis(2, 1), 0.5, {Point{1.0, 0.0}, Point{1.5, 0.0}},
                         options(o, "cball_control", 10000, 1e-3));
      });

  for (const char* r : {"0.3", "0.5", "0.7"}) {
    const double rad = std::stod(r);
    add(std::string("spectral_gap_r") + r, std::string("Neumann gap of the disc of radius ") + r, V::Pass,
        [rad](const SuiteOptions& o) { return check_spectral_gap(rad, o.grid.value_or(64)); });
  }
  add("ibp_ball", "integration by parts on the unit disc", V::Pass,
      [](const SuiteOptions& o) { return ibp_ball(ibp_f(), ibp_g(), 1.0, o); });
  add("ibp_ball_quadratic", "integration by parts on the unit disc, f = |x|^2/2, g = 1", V::Pass,
      [](const SuiteOptions& o) {
        return ibp_ball(ScalarField::radial(Profile::polynomial({0.0, 0.0, 0.5}), Point{0.0, 0.0}),
                        ScalarField::constant(1.0), 1.0, o);
      });
  add("ibp_interval", "integration by parts on [0, 2]", V::Pass, [](const SuiteOptions& o) {
    return check_integration_by_parts(Domain::interval(0.0, 2.0), ScalarField::along_axis(Profile::sine(1.0, 1.7), 0),
                                      ScalarField::along_axis(Profile::polynomial({1.0, 0.5, -0.2}), 0),
                                      o.grid.value_or(256), 1.0, o.tolerance_scale);
  });
  add("ibp_control", "control: boundary term scaled by 1.1", V::Fail,
      [](const SuiteOptions& o) { return ibp_ball(ibp_f(), ibp_g(), 1.1, o); });

  add("cantor", "Cantor weight j = 10: norm bounds and total variation", V::Pass,
      [](const SuiteOptions&) { return cantor_weight(10).report; });
  add("cantor2", "conformal Cantor scenario j = 1", V::Pass,
      [](const SuiteOptions& o) { return cantor2_scenario(1, 0.1, options(o, "cantor2", 10000, 1e-3)); });

  add("local_convexity", "exterior of the unit disc made convex by psi = (eps - l) V", V::Pass,
      [](const SuiteOptions&) {
        const Domain d = Domain::ball_complement(Point{0.0, 0.0}, 1.0);
        return convexity(convexification_weight(d, boundary_curvature_bound(d), 0.05));
      });
  add("local_convexity_control", "control: psi = 0 on the same pairs", V::Fail,
      [](const SuiteOptions&) { return convexity(ScalarField::constant(0.0)); });
  add("evi_quadratic", "contraction of the quadratic flow saturates", V::Pass,
      [](const SuiteOptions&) { return check_evi("quadratic"); });
  add("evi_quartic", "contraction of the quartic flow on the annulus", V::Pass,
      [](const SuiteOptions&) { return check_evi("quartic"); });
  add("geodesic_circle", "circle is a geodesic of -log(|x - z| / r)", V::Pass,
      [](const SuiteOptions&) { return check_geodesic_circle(); });
  return e;
}

std::string outcome(const SuiteRun& run, size_t i) {
  if (!run.errors[i].empty()) return "error";
  const Verdict v = run.reports[i].verdict;
  if (v == Verdict::Inconclusive) return "inconclusive";
  return v == run.expected[i] ? "ok" : "mismatch";
}

std::string fmt(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

const std::vector<SuiteEntry>& suite_entries() {
  static const std::vector<SuiteEntry> entries = build();
  return entries;
}

const SuiteEntry& suite_entry(const std::string& id) {
  for (const auto& e : suite_entries())
    if (e.id == id) return e;
  throw InvalidParameter("unknown check '" + id + "'");
}

SuiteRun run_suite(const std::vector<std::string>& ids, const SuiteOptions& opts) {
  std::vector<std::string> todo;
  for (const auto& id : ids) {
    if (id == "all") {
      for (const auto& e : suite_entries()) todo.push_back(e.id);
    } else {
      todo.push_back(suite_entry(id).id);
    }
  }
  SuiteRun run;
  for (const auto& id : todo) {
    const SuiteEntry& e = suite_entry(id);
    const auto t0 = std::chrono::steady_clock::now();
    Report r;
    std::string err;
    try {
      r = e.run(opts);
    } catch (const std::exception& ex) {
      err = ex.what();
      r.check = id;
      r.verdict = Verdict::Fail;
    }
    r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.ids.push_back(id);
    run.expected.push_back(e.expected);
    run.reports.push_back(std::move(r));
    run.errors.push_back(err);
  }
  return run;
}

void write_summary_csv(std::ostream& os, const SuiteRun& run) {
  os << "id,expected,verdict,min_slack,outcome\n";
  for (size_t i = 0; i < run.ids.size(); ++i) {
    const Report& r = run.reports[i];
    os << run.ids[i] << ',' << to_string(run.expected[i]) << ','
       << (run.errors[i].empty() ? to_string(r.verdict) : "ERROR") << ',' << fmt(r.min_slack) << ','
       << outcome(run, i) << '\n';
  }
}

nlohmann::json summary_json(const SuiteRun& run) {
  nlohmann::json a = nlohmann::json::array();
  for (size_t i = 0; i < run.ids.size(); ++i) {
    nlohmann::json j = {{"id", run.ids[i]},
                        {"expected", to_string(run.expected[i])},
                        {"verdict", run.errors[i].empty() ? to_string(run.reports[i].verdict) : "ERROR"},
                        {"min_slack", std::isfinite(run.reports[i].min_slack) ? nlohmann::json(run.reports[i].min_slack)
                                                                              : nlohmann::json(nullptr)},
                        {"outcome", outcome(run, i)}};
    if (!run.errors[i].empty()) j["error"] = run.errors[i];
    a.push_back(j);
  }
  return a;
}

int suite_exit_code(const SuiteRun& run) {
  bool inconclusive = false;
  for (size_t i = 0; i < run.ids.size(); ++i) {
    const std::string o = outcome(run, i);
    if (o == "error" || o == "mismatch") return 1;
    if (o == "inconclusive") inconclusive = true;
  }
  return inconclusive ? 2 : 0;
}

}  // namespace kappa

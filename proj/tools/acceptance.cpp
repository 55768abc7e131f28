// Full-scale acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance <path to the kappa CLI>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "kappa/conformal.hpp"
#include "kappa/parallel.hpp"
#include "kappa/stochastic.hpp"
#include "kappa/verify.hpp"

using namespace kappa;

namespace {

using std::numbers::pi;

const RngSpec kMaster{42};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

const char* word(bool b) { return b ? "PASS" : "FAIL"; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class F>
std::pair<Report, double> timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r = f();
  return {std::move(r), seconds_since(t0)};
}

CheckOptions mc(std::uint64_t stream, size_t paths, double h) {
  CheckOptions o;
  o.mc.paths = paths;
  o.mc.h = h;
  o.mc.rng = kMaster.derive(stream);
  return o;
}

Outcome local_time_law() {
  auto [r, s] = timed([] { return check_local_time_law(mc(1, 100000, 1e-4), 100000); });
  const double rate = r.extra["rates"][1].get<double>();
  const bool ok = r.passed() && rate >= 0.4 && s < 60.0;
  return {ok, "E[L1] = " + num(r.extra["mean"].get<double>(), 5) + " +- " + num(r.extra["se"].get<double>(), 2) +
                  " vs 0.79788, bias rate " + num(rate, 3) + ", " + num(s, 3) + " s"};
}

Outcome revuz() {
  bool ok = true;
  std::string d;
  const std::vector<std::pair<Domain, Point>> cases = {
      {Domain::half_space(2, 0, 0.0), Point{0.1, 0.0}},
      {Domain::ball(Point{0.0, 0.0}, 1.0), Point{0.5, 0.0}},
      {Domain::ball_complement(Point{0.0, 0.0, 0.0}, 1.0), Point{1.2, 0.0, 0.0}}};
  std::uint64_t stream = 20;
  for (const auto& [dom, x0] : cases) {
    const RngSpec rng = kMaster.derive(stream++);
    auto [r, s] = timed([&] { return local_time_consistency(dom, x0, 0.5, 1e-4, 100000, rng); });
    ok = ok && r.passed() && s < 120.0;
    d += dom.name() + " " + to_string(r.verdict) + " (diff " + num(r.extra["mean_difference"].get<double>(), 3) + ", " +
         num(s, 3) + " s); ";
  }
  return {ok, d};
}

Outcome decomposition() {
  const Report r = check_decomposition(1000, kMaster.derive(3));
  double worst = 0.0;
  for (double x : r.lhs) worst = std::max(worst, x);
  return {r.passed() && worst <= 1e-12, "max residual " + num(worst, 3) + " over 3 psi x 1000 paths"};
}

Outcome double_potential() {
  const Domain d = Domain::interval(0.0, pi);
  const ScalarField phi = ScalarField::constant(0.7);
  const ScalarField f = ScalarField::along_axis(Profile::cosine(0.5, 1.0), 0) + 1.0;
  const std::vector<Point> x0s = {Point{0.2}, Point{1.5}, Point{2.9}};
  const double t = 0.1;

  const Report smooth =
      check_double_potential(d, phi, ScalarField::along_axis(Profile::sine(0.3, 1.0), 0), f, t, x0s, mc(4, 100000, 1e-4));
  const Report flat = check_double_potential(d, phi, ScalarField::constant(0.0), f, t, x0s, mc(5, 100000, 1e-4));

  // Constant potential: the weight is exactly exp(-2ct) on every path.
  TamingSpec a, b;
  a.f = b.f = f;
  a.phi = phi;
  b.phi = ScalarField::constant(0.0);
  a.psi = b.psi = ScalarField::constant(0.0);
  McParams p;
  p.paths = 20000;
  p.h = 1e-4;
  p.rng = kMaster.derive(6);
  const TamingResult ra = taming_expectation(d, a, x0s, t, p), rb = taming_expectation(d, b, x0s, t, p);
  double rel = 0.0;
  for (size_t i = 0; i < x0s.size(); ++i)
    rel = std::max(rel, std::abs(ra.estimates[i].mean / (std::exp(-2.0 * 0.7 * t) * rb.estimates[i].mean) - 1.0));

  const bool ok = smooth.passed() && flat.passed() && rel <= 1e-12;
  return {ok, "smooth psi " + std::string(to_string(smooth.verdict)) + " (min slack " + num(smooth.min_slack, 3) +
                  "), constant control " + to_string(flat.verdict) + ", weight identity rel. error " + num(rel, 2)};
}

Outcome ge1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Report iv = check_ge1(Domain::interval(0.0, pi), ScalarField::constant(0.0), ScalarField::constant(0.0),
                              ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0), 0.5,
                              {Point{0.3}, Point{pi / 2}, Point{2.5}}, mc(7, 20000, 1e-4));
  const Domain ball = Domain::ball(Point{0.0, 0.0}, 0.5);
  const auto on_ball = [&](double ell, std::uint64_t stream) {
    return check_ge1(ball, ScalarField::constant(0.0), ScalarField::constant(ell), ScalarField::affine(Vec{1.0, 0.0}, 0.0),
                     0.05, {Point{0.0, 0.5}, Point{0.0, 0.25}, Point{0.2, 0.1}}, mc(stream, 20000, 1e-4));
  };
  const Report b = on_ball(2.0, 8), control = on_ball(20.0, 9);
  const double s = seconds_since(t0);
  const bool ok = iv.passed() && b.passed() && control.verdict == Verdict::Fail && s < 180.0;
  return {ok, "interval " + to_string(iv.verdict) + ", ball l = 1/r " + to_string(b.verdict) + " (min slack " +
                  num(b.min_slack, 3) + "), control l = 10/r " + to_string(control.verdict) + " (min slack " +
                  num(control.min_slack, 3) + "), " + num(s, 3) + " s"};
}

Outcome ge2() {
  bool ok = true;
  double worst = 1e300;
  const ScalarField f = ScalarField::along_axis(Profile::cosine(1.0, 1.0), 0);
  const Grid line = Grid::interval(0.0, pi, 1000), box = Grid::box(Point{0.0, 0.0}, Point{pi, pi}, 200, 200);
  for (double t : {0.1, 0.3, 1.0})
    for (const Report& r : {check_ge2(line, ScalarField::constant(0.0), 1.0, f, t),
                            check_ge2(box, ScalarField::constant(0.0), 2.0, f, t)}) {
      const double after = r.extra["min_slack_after_allowance"].get<double>();
      worst = std::min(worst, after);
      ok = ok && r.passed() && after >= -1e-6;
    }
  return {ok, "6 runs, worst nodewise slack after allowance " + num(worst, 3)};
}

Outcome ball_decay() {
  const Report r = check_ball_decay(0.5, 2, 2.0, mc(10, 20000, 1e-3));
  const Report c = check_ball_decay(0.5, 2, 2.0, mc(11, 20000, 1e-3), 0.0);
  double worst = 0.0;
  for (double x : r.lhs) worst = std::max(worst, x);
  return {r.passed() && c.verdict == Verdict::Fail,
          "max E[exp(-cot r L_2)] = " + num(worst, 3) + " <= " + num(r.extra["bound"].get<double>(), 4) +
              ", control w = 0 " + to_string(c.verdict)};
}

Outcome spectral() {
  bool ok = true;
  std::string d;
  for (double r : {0.3, 0.5, 0.7}) {
    const Report rep = check_spectral_gap(r, 128);
    const double rel = rep.extra["relative_error"].get<double>();
    ok = ok && rep.passed() && rel <= 5e-3;
    d += "r=" + num(r, 2) + ": " + num(rep.extra["lambda_1"].get<double>(), 6) + " >= " + num(rep.lhs[0], 4) +
         " (rel. err " + num(rel, 2) + "); ";
  }
  return {ok, d};
}

Outcome convexity() {
  const SuiteOptions o;
  const Report good = suite_entry("local_convexity").run(o);
  const Report none = suite_entry("local_convexity_control").run(o);
  const Report circle = check_geodesic_circle();
  const bool ok = good.passed() && none.verdict == Verdict::Fail && circle.passed();
  return {ok, "psi = (eps - l) V " + to_string(good.verdict) + ", psi = 0 " + to_string(none.verdict) +
                  ", circle deviation " + num(circle.lhs[0], 3)};
}

Outcome evi() {
  const Report q = check_evi("quadratic"), k = check_evi("quartic");
  return {q.passed() && k.passed() && k.min_slack >= 0.0,
          "quadratic max gap " + num(q.extra["max_abs_gap"].get<double>(), 3) + ", quartic min slack " +
              num(k.min_slack, 3)};
}

Outcome cantor() {
  bool ok = true;
  double worst = 0.0;
  for (int j = 0; j <= 10; ++j) {
    const CantorWeight w = cantor_weight(j);
    ok = ok && w.report.passed();
    if (j > 0) worst = std::max(worst, std::abs(w.report.extra["ratio"].get<double>() - 1.0));
  }
  return {ok, "j = 0..10, worst total-variation ratio error " + num(worst, 3)};
}

Outcome ibp() {
  const ScalarField f = ScalarField::separable(Profile::cosine(1.0, 1.3), 0, Profile::sine(1.0, 0.7, 0.4), 1);
  const ScalarField g = ScalarField::affine(Vec{0.5, -0.3}, 1.0);
  const Report r = check_integration_by_parts(Domain::ball(Point{0.0, 0.0}, 1.0), f, g, 256);
  const double err = r.extra["abs_error"].get<double>();
  const auto& order = r.extra["observed_order"];
  const bool ok = r.passed() && err <= 5e-3 && order.is_number() && order.get<double>() >= 1.9;
  return {ok, "|LHS - RHS| = " + num(err, 3) + ", order " + (order.is_number() ? num(order.get<double>(), 4) : "n/a")};
}

std::pair<int, std::string> run_cli(const std::string& cmd) {
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const std::string base = "'" + cli + "' verify all --seed 42";
  const auto a = run_cli(base + " --threads 1");
  const auto b = run_cli(base + " --threads 1");
  const auto c = run_cli(base + " --threads 4");
  const bool same = !a.second.empty() && a.second == b.second && a.second == c.second;
  return {same && a.first == 0, std::string("runs ") + (same ? "byte-identical" : "differ") + " (" +
                                    std::to_string(a.second.size()) + " bytes), exit codes " + std::to_string(a.first) +
                                    "/" + std::to_string(b.first) + "/" + std::to_string(c.first)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"half-space local time law", local_time_law},
      {"local time consistency", revuz},
      {"pathwise decomposition", decomposition},
      {"taming semigroup vs PDE", double_potential},
      {"first-order gradient estimate", ge1},
      {"dimensional gradient estimate", ge2},
      {"ball decay", ball_decay},
      {"spectral gap of the disc", spectral},
      {"convexification", convexity},
      {"gradient-flow contraction", evi},
      {"Cantor weight", cantor},
      {"integration by parts", ibp},
      {"determinism", [&] { return determinism(cli); }}};

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "[" << word(o.pass) << "] " << i + 1 << ". " << criteria[i].first << ": " << o.detail << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

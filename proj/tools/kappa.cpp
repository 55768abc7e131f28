#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "kappa/conformal.hpp"
#include "kappa/errors.hpp"
#include "kappa/parallel.hpp"
#include "kappa/semigroup.hpp"
#include "kappa/stochastic.hpp"
#include "kappa/verify.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kappa;
using namespace kappa::cli;

namespace {

// Flags that land in the config JSON before validation.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, grid, j;
  std::optional<std::string> out, format, domain, psi, f, V, x0, from, to, bump;
  std::optional<size_t> paths;
  std::optional<double> dt, tolerance_scale, radius, t;
};

json field_text(const std::string& s) {
  if (!s.empty() && (s[0] == '{' || s[0] == '[')) return json::parse(s);
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  return s;
}

json merged_config(const Overrides& o) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("cannot read config file '" + o.config_path + "'");
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + o.config_path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  }
  if (o.seed) j["seed"] = *o.seed;
  if (o.threads) j["threads"] = *o.threads;
  if (o.out) j["out"] = *o.out;
  if (o.format) j["format"] = *o.format;
  if (o.paths) j["paths"] = *o.paths;
  if (o.dt) j["dt"] = *o.dt;
  if (o.grid) j["grid"] = *o.grid;
  if (o.tolerance_scale) j["tolerance_scale"] = *o.tolerance_scale;
  if (o.t) j["t"] = *o.t;
  if (o.j) j["j"] = *o.j;
  if (o.bump) j["bump"] = *o.bump;
  if (o.x0) j["x0"] = *o.x0;
  if (o.from) j["from"] = *o.from;
  if (o.to) j["to"] = *o.to;
  if (o.psi) j["psi"] = field_text(*o.psi);
  if (o.f) j["f"] = field_text(*o.f);
  if (o.V) j["V"] = field_text(*o.V);
  if (o.domain) {
    const json d = field_text(*o.domain);
    j["domain"] = d.is_object() ? d : json{{"type", *o.domain}};
  }
  if (o.radius) {
    if (!j.contains("domain") || !j["domain"].is_object()) throw ConfigError("--radius needs a domain");
    j["domain"]["radius"] = *o.radius;
  }
  return j;
}

int verdict_code(Verdict v) { return v == Verdict::Pass ? 0 : v == Verdict::Inconclusive ? 2 : 1; }

json coords(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim(); ++i) a.push_back(p[i]);
  return a;
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

class Output {
 public:
  explicit Output(const RunConfig& c) : cfg_(c) {
    if (!c.out.empty()) fs::create_directories(c.out);
  }

  // Tables go to the output directory, or to stdout when there is none.
  void table(const std::string& name, const std::function<void(std::ostream&)>& write) {
    if (cfg_.out.empty()) {
      write(std::cout);
      tables_on_stdout_ = true;
      return;
    }
    std::ofstream os(fs::path(cfg_.out) / (name + ".csv"));
    write(os);
  }

  void summary(const std::string& name, const json& s) {
    if (!cfg_.out.empty()) std::ofstream(fs::path(cfg_.out) / (name + ".json")) << s.dump(2) << "\n";
    if (tables_on_stdout_) return;
    if (cfg_.format == "json") {
      std::cout << s.dump(2) << "\n";
      return;
    }
    // One header row, one value row; nested values as JSON text.
    std::string head, row;
    for (const auto& [k, v] : s.items()) {
      head += (head.empty() ? "" : ",") + k;
      std::string cell = csv_cell(v);
      if (cell.find_first_of(",\"") != std::string::npos) {
        std::string q = "\"";
        for (char ch : cell) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        cell = q + "\"";
      }
      row += (row.empty() ? "" : ",") + cell;
    }
    std::cout << head << "\n" << row << "\n";
  }

 private:
  const RunConfig& cfg_;
  bool tables_on_stdout_ = false;
};

Domain need_domain(const RunConfig& c) {
  if (c.domain.is_null()) throw ConfigError("this command needs a domain");
  return build_domain(c.domain);
}

std::optional<Domain> maybe_domain(const RunConfig& c) {
  if (c.domain.is_null()) return std::nullopt;
  return build_domain(c.domain);
}

ScalarField need_field(const RunConfig& c, const std::string& name) {
  if (!c.fields.contains(name)) throw ConfigError("this command needs the field '" + name + "'");
  return build_field(c.fields[name], maybe_domain(c));
}

Point need_point(const std::optional<Point>& p, const std::string& name) {
  if (!p) throw ConfigError("this command needs '" + name + "'");
  return *p;
}

int cmd_simulate(const RunConfig& c, bool dry) {
  const Domain d = need_domain(c);
  const Point x0 = need_point(c.x0, "x0");
  if (x0.dim() != d.dim()) throw ConfigError("x0 has the wrong dimension for " + d.name());
  const double T = c.t.value_or(1.0), h = c.dt.value_or(1e-3);
  const size_t n = c.paths.value_or(1000);
  step_count(T, h);
  if (dry) return 0;
  const RngSpec rng{c.seed};
  Output out(c);
  out.table("trace", [&](std::ostream& os) { write_trace_csv(os, simulate_reflected(d, x0, T, h, rng, 0)); });
  const MeanEstimate L = local_time_mean(d, x0, T, h, n, rng, c.threads.value_or(0));
  out.summary("simulate", {{"domain", d.name()}, {"x0", coords(x0)}, {"T", T}, {"h", h}, {"paths", n},
                           {"seed", c.seed}, {"mean_localtime", L.mean}, {"se", L.se}, {"rejected", n - L.used}});
  return 0;
}

int cmd_geodesic(const RunConfig& c, bool dry) {
  const ScalarField psi = need_field(c, "psi");
  const Point x = need_point(c.from, "from"), y = need_point(c.to, "to");
  if (x.dim() != y.dim()) throw ConfigError("from and to differ in dimension");
  const Domain d = c.domain.is_null() ? Domain::ball(Point::zero(x.dim()), 1.0) : build_domain(c.domain);
  GeodesicParams gp;
  if (c.grid) gp.vertices = *c.grid;
  if (dry) return 0;
  const Polyline g = geodesic(psi, x, y, gp);
  Output out(c);
  out.table("geodesic", [&](std::ostream& os) {
    os << "s";
    for (int i = 0; i < x.dim(); ++i) os << ",x" << i + 1;
    os << ",V,psi\n";
    os.precision(17);
    double s = 0.0;
    for (size_t k = 0; k < g.size(); ++k) {
      if (k > 0) s += std::exp(0.5 * (psi(g[k - 1]) + psi(g[k]))) * distance(g[k - 1], g[k]);
      os << s;
      for (int i = 0; i < x.dim(); ++i) os << "," << g[k][i];
      os << "," << d.signed_distance(g[k]) << "," << psi(g[k]) << "\n";
    }
  });
  json s = {{"psi", psi.describe()},
            {"from", coords(x)},
            {"to", coords(y)},
            {"vertices", g.size()},
            {"length", conformal_length(psi, g)},
            {"euclidean_length", g.euclidean_length()}};
  if (c.fields["psi"] == "log-annulus") {
    double dev = 0.0;
    for (const auto& v : g.vertices()) dev = std::max(dev, std::abs(norm(v) - norm(x)));
    s["max_radial_deviation"] = dev;
  }
  out.summary("geodesic", s);
  return 0;
}

int cmd_flow(const RunConfig& c, bool dry) {
  const ScalarField V = need_field(c, "V");
  const Point x0 = need_point(c.x0, "x0");
  const double T = c.t.value_or(1.0), dt = c.dt.value_or(0.01);
  if (dry) return 0;
  const Trajectory tr = evi_flow(V, x0, T, dt);
  Output out(c);
  out.table("flow", [&](std::ostream& os) {
    os << "t";
    for (int i = 0; i < x0.dim(); ++i) os << ",x" << i + 1;
    os << ",V\n";
    os.precision(17);
    for (size_t k = 0; k < tr.t.size(); ++k) {
      os << tr.t[k];
      for (int i = 0; i < x0.dim(); ++i) os << "," << tr.x[k][i];
      os << "," << V(tr.x[k]) << "\n";
    }
  });
  out.summary("flow", {{"V", V.describe()}, {"x0", coords(x0)}, {"T", T}, {"dt", dt}, {"samples", tr.t.size()},
                       {"x_T", coords(tr.x.back())}, {"V_T", V(tr.x.back())}});
  return 0;
}

Grid heat_grid(const Domain& d, std::optional<int> res) {
  switch (d.kind()) {
    case DomainKind::Interval: return Grid::interval(d.lower()[0], d.upper()[0], res.value_or(400));
    case DomainKind::Box:
      if (d.dim() == 2) return Grid::box(d.lower(), d.upper(), res.value_or(100), res.value_or(100));
      break;
    case DomainKind::Ball:
      if (d.dim() == 2) return Grid::polar(d.center(), 0.0, d.radius(), res.value_or(64), 2 * res.value_or(64));
      break;
    default: break;
  }
  throw ConfigError("heat supports an interval, a 2D box or a disc, not " + d.name());
}

int cmd_heat(const RunConfig& c, bool dry) {
  const Domain d = need_domain(c);
  const ScalarField f = need_field(c, "f");
  const Grid g = heat_grid(d, c.grid);
  const double t = c.t.value_or(0.1);
  if (dry) return 0;
  const GridFunction u0 = g.sample(f);
  const GridFunction u = neumann_heat(g, u0, t);
  Output out(c);
  out.table("heat", [&](std::ostream& os) { write_grid_csv(os, g, u); });
  out.summary("heat", {{"domain", d.name()}, {"f", f.describe()}, {"t", t}, {"grid_nodes", g.size()},
                       {"mass_initial", g.weights().dot(u0)}, {"mass_final", g.weights().dot(u)},
                       {"max_abs", u.cwiseAbs().maxCoeff()}});
  return 0;
}

int cmd_spectrum(const RunConfig& c, bool dry) {
  const Domain d = need_domain(c);
  const int res = c.grid.value_or(128);
  if (dry) return 0;
  const double lambda = spectral_gap(d, res);
  json s = {{"domain", d.name()}, {"resolution", res}, {"lambda_1", lambda}};
  if (d.kind() == DomainKind::Ball && d.dim() == 2) {
    const double r = d.radius(), jp = bessel_j_prime_zero(1, 1);
    s["radius"] = r;
    s["bessel"] = (jp / r) * (jp / r);
    s["relative_error"] = std::abs(lambda - (jp / r) * (jp / r)) / ((jp / r) * (jp / r));
    // (N - 1)/2 cot^2 r with N = 2, meaningful for r < pi/4.
    if (r < std::numbers::pi / 4) {
      const double b = 0.5 / (std::tan(r) * std::tan(r));
      s["bound"] = b;
      s["bound_holds"] = lambda >= b;
    } else {
      s["bound"] = nullptr;
    }
  }
  Output(c).summary("spectrum", s);
  return 0;
}

int cmd_cantor(const RunConfig& c, bool dry) {
  const int j = c.j.value_or(3);
  const Profile bump = build_bump(c.bump);
  if (j < 0 || j > 12) throw ConfigError("j must lie in 0..12");
  const int n = c.grid.value_or(2000);
  if (dry) return 0;
  const CantorWeight w = cantor_weight(j, bump);
  Output out(c);
  out.table("cantor", [&](std::ostream& os) {
    os << "x,phi,dphi,d2phi\n";
    os.precision(17);
    for (int i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) / n;
      const Jet q = w.profile.jet(x);
      os << x << "," << q.value << "," << q.d1 << "," << q.d2 << "\n";
    }
  });
  out.summary("cantor", w.report.to_json(false));
  return verdict_code(w.report.verdict);
}

int cmd_verify(const RunConfig& c, std::vector<std::string> ids, bool list, bool dry) {
  if (list) {
    for (const auto& e : suite_entries())
      std::cout << e.id << "," << to_string(e.expected) << "," << e.description << "\n";
    return 0;
  }
  if (ids.empty()) ids = {"all"};
  for (const auto& id : ids)
    if (id != "all") suite_entry(id);
  if (dry) return 0;
  SuiteOptions o;
  o.rng = RngSpec{c.seed};
  o.threads = c.threads.value_or(0);
  o.paths = c.paths;
  o.h = c.dt;
  o.grid = c.grid;
  o.tolerance_scale = c.tolerance_scale;
  const SuiteRun run = run_suite(ids, o);

  if (c.format == "csv")
    write_summary_csv(std::cout, run);
  else
    std::cout << summary_json(run).dump(2) << "\n";
  if (!c.out.empty()) {
    fs::create_directories(fs::path(c.out) / "reports");
    std::ofstream(fs::path(c.out) / "summary.json") << summary_json(run).dump(2) << "\n";
    std::ofstream csv(fs::path(c.out) / "summary.csv");
    write_summary_csv(csv, run);
    std::ofstream timings(fs::path(c.out) / "timings.csv");
    timings << "id,runtime_s\n";
    for (size_t i = 0; i < run.ids.size(); ++i) {
      timings << run.ids[i] << "," << run.reports[i].runtime_s << "\n";
      std::ofstream(fs::path(c.out) / "reports" / (run.ids[i] + ".json")) << run.reports[i].to_json(false).dump(2) << "\n";
    }
  }
  for (size_t i = 0; i < run.ids.size(); ++i)
    if (!run.errors[i].empty()) std::cerr << json{{"error", "check"}, {"id", run.ids[i]}, {"message", run.errors[i]}} << "\n";
  return suite_exit_code(run);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ricci lower bound verification engine"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  Overrides o;
  bool print_schema = false, dry = false, list = false;
  std::vector<std::string> ids;
  app.add_option("--config", o.config_path, "JSON config file (see --print-schema)");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--threads", o.threads, "worker count (default: KAPPA_THREADS, else 1)")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--format", o.format, "summary format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--paths", o.paths, "Monte-Carlo paths");
  app.add_option("--dt", o.dt, "time step");
  app.add_option("--grid", o.grid, "grid resolution");
  app.add_option("--tolerance-scale", o.tolerance_scale, "scale of the discretization allowances");
  app.add_option("--domain", o.domain, "domain type (interval, box, disc, ball, ball_complement, half_space) or JSON");
  app.add_option("--radius", o.radius, "radius of a disc or ball domain");
  app.add_option("--psi", o.psi, "conformal weight: number, preset or JSON");
  app.add_option("--f", o.f, "test function: number, preset or JSON");
  app.add_option("--V", o.V, "potential of the gradient flow: number, preset or JSON");
  app.add_option("--x0", o.x0, "start point, e.g. 0.5,0");
  app.add_option("--from", o.from, "geodesic start");
  app.add_option("--to", o.to, "geodesic end");
  app.add_option("--t", o.t, "time");
  app.add_option("--j", o.j, "Cantor level");
  app.add_option("--bump", o.bump, "Cantor bump (cos2, poly)");
  app.add_flag("--print-schema", print_schema, "print the config schema and exit");
  app.add_flag("--dry-run", dry, "validate the config without computing");

  auto* simulate = app.add_subcommand("simulate", "reflected paths: trace of one path, mean local time");
  auto* geo = app.add_subcommand("geodesic", "geodesic of the metric e^psi d");
  auto* flow = app.add_subcommand("flow", "gradient flow x' = -grad V");
  auto* heat = app.add_subcommand("heat", "Neumann heat semigroup P_t f on a grid");
  auto* spectrum = app.add_subcommand("spectrum", "first nonzero Neumann eigenvalue");
  auto* verify = app.add_subcommand("verify", "run verification checks (ids or 'all')");
  verify->add_option("ids", ids, "check ids");
  verify->add_flag("--list", list, "list the checks and exit");
  auto* cantor = app.add_subcommand("cantor", "Cantor weight Phi_j and its norm checks");
  for (auto* s : {simulate, geo, flow, heat, spectrum, verify, cantor}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (print_schema) {
      std::cout << config_schema().dump(2) << "\n";
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 1;
    }
    const RunConfig cfg = parse_config(merged_config(o));
    if (cfg.threads) set_default_threads(*cfg.threads);

    int code = 0;
    const auto* sub = app.get_subcommands().front();
    if (sub == simulate) code = cmd_simulate(cfg, dry);
    else if (sub == geo) code = cmd_geodesic(cfg, dry);
    else if (sub == flow) code = cmd_flow(cfg, dry);
    else if (sub == heat) code = cmd_heat(cfg, dry);
    else if (sub == spectrum) code = cmd_spectrum(cfg, dry);
    else if (sub == verify) code = cmd_verify(cfg, ids, list, dry);
    else if (sub == cantor) code = cmd_cantor(cfg, dry);
    if (dry) std::cout << json{{"valid", true}, {"command", sub->get_name()}, {"config", cfg.to_json()}}.dump(2) << "\n";
    return code;
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}} << "\n";
  } catch (const json::exception& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}} << "\n";
  } catch (const kappa::Error& e) {
    std::cerr << json{{"error", "module"}, {"message", e.what()}} << "\n";
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}} << "\n";
  }
  return 1;
}

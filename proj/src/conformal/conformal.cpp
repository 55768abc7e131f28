#include "kappa/conformal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "kappa/parallel.hpp"

namespace kappa {

Polyline::Polyline(std::vector<Point> vertices) : v_(std::move(vertices)) {
  if (v_.size() < 2) throw InvalidParameter("polyline needs at least two vertices");
  for (size_t i = 0; i + 1 < v_.size(); ++i)
    if (v_[i] == v_[i + 1]) throw InvalidParameter("polyline has repeated consecutive vertices");
}

Polyline Polyline::segment(const Point& x, const Point& y, int vertices) {
  if (vertices < 2) throw InvalidParameter("segment needs at least two vertices");
  std::vector<Point> v;
  v.reserve(static_cast<size_t>(vertices));
  for (int i = 0; i < vertices; ++i) {
    const double s = static_cast<double>(i) / (vertices - 1);
    v.push_back((1.0 - s) * x + s * y);
  }
  v.back() = y;
  return Polyline(std::move(v));
}

double Polyline::euclidean_length() const {
  double s = 0.0;
  for (size_t i = 0; i + 1 < v_.size(); ++i) s += distance(v_[i], v_[i + 1]);
  return s;
}

double conformal_length(const ScalarField& psi, const Polyline& curve) {
  const auto& v = curve.vertices();
  double total = 0.0;
  double prev = psi.eval(v[0]);
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    const double next = psi.eval(v[i + 1]);
    total += std::exp(0.5 * (prev + next)) * distance(v[i], v[i + 1]);
    prev = next;
  }
  return total;
}

double conformal_distance(const ScalarField& psi, const Point& x, const Point& y, const GeodesicParams& params) {
  return conformal_length(psi, geodesic(psi, x, y, params));
}

double CurvatureBoundSpec::gamma_coefficient() const {
  if (!(N >= 2.0)) throw InvalidParameter("time change requires N >= 2");
  if (std::isinf(N_prime)) return N - 2.0;
  if (!(N_prime > N)) throw InvalidParameter("time change requires N' > N");
  return (N - 2.0) * (N_prime - 2.0) / (N_prime - N);
}

double timechange_curvature(const CurvatureBoundSpec& spec, const ScalarField& psi, const Point& x) {
  const double c = spec.gamma_coefficient();
  return std::exp(-2.0 * psi.eval(x)) * (spec.k.eval(x) - psi.laplacian(x) - c * psi.gamma(x));
}

double timechange_curvature_phi(const CurvatureBoundSpec& spec, const ScalarField& phi, const Point& x) {
  const double c = spec.gamma_coefficient();
  const double p = phi.eval(x);
  if (!(p > 0.0)) throw InvalidParameter("phi must be positive");
  const double gamma_phi = phi.gamma(x);
  const double lap_phi2 = 2.0 * p * phi.laplacian(x) + 2.0 * gamma_phi;
  return spec.k.eval(x) * p * p + 0.5 * lap_phi2 - (2.0 + c) * gamma_phi;
}

ScalarField convexification_weight(const Domain& domain, const ScalarField& ell, double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("convexification requires eps > 0");
  const ScalarField V = ScalarField::signed_distance(domain);
  if (ell.is_constant()) {
    const double l = ell.eval(Point(domain.dim()));
    return (eps - l) * V;
  }
  return (ScalarField::constant(eps) - ell) * V;
}

std::vector<std::pair<Point, Point>> sample_boundary_pairs(const Domain& domain, const PairSampler& sampler) {
  std::mt19937_64 rng(sampler.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<Point, Point>> out;
  const int n = domain.dim();
  switch (domain.kind()) {
    case DomainKind::Ball:
    case DomainKind::BallComplement: {
      if (n < 2) throw UnsupportedGeometry("boundary pairs need dimension >= 2");
      const double r = domain.radius();
      const double sep_max = sampler.max_separation > 0 ? sampler.max_separation : 0.25 * r;
      const double depth_max = sampler.max_depth > 0 ? sampler.max_depth : sep_max / 8.0;
      const double sign = domain.kind() == DomainKind::Ball ? -1.0 : 1.0;
      for (int p = 0; p < sampler.pairs; ++p) {
        // Orthonormal frame (u, w) of a random plane through the center.
        Vec u(n), w(n);
        if (n == 2) {
          const double a = 2.0 * std::numbers::pi * unif(rng);
          u[0] = std::cos(a), u[1] = std::sin(a);
          w[0] = -u[1], w[1] = u[0];
        } else {
          std::normal_distribution<double> g;
          for (int i = 0; i < n; ++i) u[i] = g(rng);
          u = u / norm(u);
          for (int i = 0; i < n; ++i) w[i] = g(rng);
          w = w - dot(w, u) * u;
          w = w / norm(w);
        }
        const double s = sep_max * (0.05 + 0.95 * unif(rng));
        const double angle = 2.0 * std::asin(std::min(1.0, s / (2.0 * r)));
        const double ra = r + sign * depth_max * unif(rng);
        const double rb = r + sign * depth_max * unif(rng);
        const Point a = domain.center() + ra * u;
        const Point b = domain.center() + rb * (std::cos(angle) * u + std::sin(angle) * w);
        out.emplace_back(a, b);
      }
      return out;
    }
    case DomainKind::HalfSpace: {
      if (n < 2) throw UnsupportedGeometry("boundary pairs need dimension >= 2");
      const double sep_max = sampler.max_separation > 0 ? sampler.max_separation : 0.25;
      const double depth_max = sampler.max_depth > 0 ? sampler.max_depth : sep_max / 8.0;
      for (int p = 0; p < sampler.pairs; ++p) {
        Point a(n), b(n);
        int other = (domain.axis() + 1) % n;
        a[domain.axis()] = domain.level() + depth_max * unif(rng);
        b[domain.axis()] = domain.level() + depth_max * unif(rng);
        a[other] = 2.0 * unif(rng) - 1.0;
        b[other] = a[other] + sep_max * (0.05 + 0.95 * unif(rng));
        out.emplace_back(a, b);
      }
      return out;
    }
    default:
      throw UnsupportedGeometry("no boundary pair sampler for " + domain.name());
  }
}

Report check_local_convexity(const Domain& domain, const ScalarField& psi, const PairSampler& sampler,
                             double tolerance, const GeodesicParams& params) {
  const auto start = std::chrono::steady_clock::now();
  const bool ball_type = domain.kind() == DomainKind::Ball || domain.kind() == DomainKind::BallComplement;
  if (tolerance <= 0.0) tolerance = ball_type ? 1e-3 * domain.radius() : 1e-3;
  const auto pairs = sample_boundary_pairs(domain, sampler);

  struct PairResult {
    double max_violation = 0.0;
    bool converged = true;
    std::string note;
  };
  std::vector<PairResult> results(pairs.size());
  parallel_for(pairs.size(), [&](size_t i) {
    const auto& [a, b] = pairs[i];
    Polyline g;
    try {
      g = geodesic(psi, a, b, params);
    } catch (const GeodesicConvergenceError& e) {
      g = e.last_iterate();
      results[i].converged = false;
      results[i].note = e.what();
    }
    double worst_v = 0.0;
    for (const Point& v : g.vertices()) worst_v = std::max(worst_v, domain.signed_distance(v));
    results[i].max_violation = worst_v;
  });

  Report rep;
  rep.check = "local_convexity";
  rep.params = {{"domain", domain.name()}, {"psi", psi.describe()}, {"tolerance", tolerance},
                {"pairs", sampler.pairs}, {"seed", sampler.seed}, {"vertices", params.vertices}};
  int failures = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    rep.add(results[i].max_violation, tolerance, 0.0, 0.0,
            pairs[i].first.str() + "->" + pairs[i].second.str());
    if (!results[i].converged) {
      ++failures;
      rep.warnings.push_back("pair " + std::to_string(i) + ": " + results[i].note);
    }
  }
  rep.extra["geodesic_failures"] = failures;
  rep.finalize();
  if (failures > 0 && rep.verdict == Verdict::Pass) rep.verdict = Verdict::Inconclusive;
  rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace kappa

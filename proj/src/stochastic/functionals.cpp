#include <cmath>

#include "kappa/errors.hpp"
#include "kappa/parallel.hpp"
#include "kappa/stochastic.hpp"
#include "walker.hpp"

namespace kappa {

double fk_exponent(const PathSample& path, const ScalarField& k, const ScalarField& ell) {
  double ik = 0.0, il = 0.0;
  const size_t M = path.steps();
  if (M == 0) return 0.0;
  double kprev = k(path.positions[0]);
  for (size_t i = 0; i < M; ++i) {
    const double knext = k(path.positions[i + 1]);
    ik += 0.5 * (kprev + knext) * (path.times[i + 1] - path.times[i]);
    kprev = knext;
    if (path.pushes[i] > 0.0) il += ell(path.positions[i + 1]) * path.pushes[i];
  }
  return -0.5 * ik - 0.5 * il;
}

double additive_functional_N(const PathSample& path, const ScalarField& psi) {
  if (!path.has_functional()) throw MissingFunctional("path was simulated without a field attached");
  return psi(path.positions.back()) - psi(path.positions.front()) - path.stochint.back();
}

double decomposition_identity(const PathSample& path, const ScalarField& psi) {
  if (!path.has_functional()) throw MissingFunctional("path was simulated without a field attached");
  const double M = path.stochint.back();
  const double Q = path.quadvar.back();
  const double dpsi = psi(path.positions.back()) - psi(path.positions.front());
  const double lhs = std::exp(-M + 0.5 * Q) * std::exp(-0.5 * Q) * std::exp(dpsi);
  return std::abs(std::log(lhs) - additive_functional_N(path, psi));
}

double revuz_defect(const PathSample& path, const Domain& domain) {
  double drift = 0.0;
  for (size_t i = 0; i < path.steps(); ++i)
    drift += domain.laplacian_signed_distance(path.positions[i]) * (path.times[i + 1] - path.times[i]);
  const double rhs = domain.signed_distance(path.positions.front()) - domain.signed_distance(path.positions.back()) +
                     0.5 * drift;
  return path.localtime.back() - rhs;
}

MeanEstimate mean_se(const std::vector<double>& values) {
  MeanEstimate e;
  e.used = values.size();
  if (values.empty()) return e;
  const double n = static_cast<double>(values.size());
  e.mean = pairwise_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
    e.se = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return e;
}

namespace {

// Drops the NaN entries that mark rejected paths.
MeanEstimate mean_se_valid(const std::vector<double>& raw) {
  std::vector<double> v;
  v.reserve(raw.size());
  for (double x : raw)
    if (!std::isnan(x)) v.push_back(x);
  MeanEstimate e = mean_se(v);
  e.rejected = raw.size() - v.size();
  return e;
}

Report build_lt_report(const MeanEstimate& L, const MeanEstimate& R, const MeanEstimate& D, double h, double C,
                       size_t rejected) {
  Report rep;
  rep.check = "local_time_consistency";
  rep.params = {{"h", h}, {"bias_constant", C}, {"paths", D.used}};
  const double allow = C * std::sqrt(h);
  // Two-sided band |L - R| <= 3 se(D) + C sqrt(h), as two one-sided probes.
  rep.add(L.mean, R.mean, D.se, allow, "L <= revuz side");
  rep.add(R.mean, L.mean, D.se, allow, "revuz side <= L");
  rep.extra = {{"mean_localtime", L.mean},
               {"se_localtime", L.se},
               {"mean_revuz_side", R.mean},
               {"mean_difference", D.mean},
               {"se_difference", D.se},
               {"rejected_paths", rejected}};
  rep.clock_note = "path clock (generator Δ/2)";
  if (rejected > 0) rep.warnings.push_back(std::to_string(rejected) + " paths rejected at a singularity");
  rep.finalize();
  return rep;
}

}  // namespace

Report local_time_consistency(const std::vector<PathSample>& paths, const Domain& domain, double bias_constant,
                              size_t min_paths) {
  if (paths.size() < min_paths)
    throw StatisticalPowerError("local_time_consistency needs at least " + std::to_string(min_paths) +
                                " paths, got " + std::to_string(paths.size()));
  std::vector<double> L(paths.size()), D(paths.size()), R(paths.size());
  for (size_t i = 0; i < paths.size(); ++i) {
    D[i] = revuz_defect(paths[i], domain);
    L[i] = paths[i].localtime.back();
    R[i] = L[i] - D[i];
  }
  const double h = paths[0].steps() ? paths[0].times[1] - paths[0].times[0] : 0.0;
  return build_lt_report(mean_se(L), mean_se(R), mean_se(D), h, bias_constant, 0);
}

Report local_time_consistency(const Domain& domain, const Point& x0, double T, double h, size_t n,
                              const RngSpec& rng, double bias_constant, int threads) {
  if (n < 10000)
    throw StatisticalPowerError("local_time_consistency needs at least 10000 paths, got " + std::to_string(n));
  if (domain.signed_distance(x0) > 1e-12) throw InvalidParameter("start point " + x0.str() + " is outside Y");
  const size_t M = step_count(T, h);
  std::vector<double> L(n), D(n), R(n);
  parallel_for(
      n,
      [&](size_t i) {
        PathRng gen(rng, i);
        double lt = 0.0, drift = 0.0;
        try {
          const Point xT = detail::walk(domain, x0, M, h, gen, 1.0,
                                        [&](size_t, const Point& before, const Point&, const Vec&, double push) {
                                          drift += domain.laplacian_signed_distance(before) * h;
                                          lt += push;
                                        });
          const double rhs = domain.signed_distance(x0) - domain.signed_distance(xT) + 0.5 * drift;
          L[i] = lt;
          R[i] = rhs;
          D[i] = lt - rhs;
        } catch (const SingularityError&) {
          L[i] = R[i] = D[i] = std::nan("");
        }
      },
      threads);
  const MeanEstimate d = mean_se_valid(D);
  Report rep = build_lt_report(mean_se_valid(L), mean_se_valid(R), d, h, bias_constant, d.rejected);
  rep.params["T"] = T;
  rep.params["x0"] = x0.str();
  rep.params["domain"] = domain.name();
  return rep;
}

MeanEstimate local_time_mean(const Domain& domain, const Point& x0, double T, double h, size_t n, const RngSpec& rng,
                             int threads) {
  const size_t M = step_count(T, h);
  std::vector<double> L(n);
  parallel_for(
      n,
      [&](size_t i) {
        PathRng gen(rng, i);
        double lt = 0.0;
        try {
          detail::walk(domain, x0, M, h, gen, 1.0,
                       [&](size_t, const Point&, const Point&, const Vec&, double push) { lt += push; });
          L[i] = lt;
        } catch (const SingularityError&) {
          L[i] = std::nan("");
        }
      },
      threads);
  return mean_se_valid(L);
}

MeanEstimate local_time_refinement(const Domain& domain, const Point& x0, double T, double h, size_t n,
                                   const RngSpec& rng, int threads) {
  const size_t M = step_count(T, h);
  const int dim = x0.dim();
  const double sf = std::sqrt(0.5 * h);
  std::vector<double> diff(n);
  parallel_for(
      n,
      [&](size_t i) {
        PathRng gen(rng, i);
        Point xc = x0, xf = x0;
        double Lc = 0.0, Lf = 0.0;
        Vec a(dim), b(dim);
        try {
          for (size_t s = 0; s < M; ++s) {
            for (int c = 0; c < dim; ++c) a[c] = sf * gen.normal();
            for (int c = 0; c < dim; ++c) b[c] = sf * gen.normal();
            Reflection r = domain.reflect_into(xf + a);
            Lf += r.push;
            r = domain.reflect_into(r.point + b);
            Lf += r.push;
            xf = r.point;
            r = domain.reflect_into(xc + a + b);
            Lc += r.push;
            xc = r.point;
          }
          diff[i] = Lf - Lc;
        } catch (const SingularityError&) {
          diff[i] = std::nan("");
        }
      },
      threads);
  return mean_se_valid(diff);
}

}  // namespace kappa

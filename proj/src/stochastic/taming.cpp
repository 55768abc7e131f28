#include <cmath>
#include <sstream>

#include "kappa/errors.hpp"
#include "kappa/parallel.hpp"
#include "kappa/stochastic.hpp"
#include "walker.hpp"

namespace kappa {

bool TamingResult::poisoned() const {
  for (const auto& e : estimates)
    if (e.cap_hits > 0) return true;
  return false;
}

namespace {

struct PathValue {
  double value;
  bool capped;
};

PathValue run_path(const Domain& domain, const TamingSpec& spec, const Point& x0, size_t M, double h, PathRng& gen,
                   double sign, double cap) {
  double exponent = 0.0;
  Point xT;
  if (spec.mode == TamingMode::DoublePotential) {
    const bool has_psi = !spec.psi.empty();
    const bool has_phi = !spec.phi.empty();
    double iphi = 0.0, Mpsi = 0.0;
    double prev = has_phi ? spec.phi(x0) : 0.0;
    xT = detail::walk(domain, x0, M, h, gen, sign,
                      [&](size_t, const Point& before, const Point& after, const Vec& dW, double) {
                        if (has_phi) {
                          const double next = spec.phi(after);
                          iphi += 0.5 * (prev + next) * h;
                          prev = next;
                        }
                        if (has_psi) Mpsi += dot(spec.psi.grad(before), dW);
                      });
    const double N = has_psi ? spec.psi(xT) - spec.psi(x0) - Mpsi : 0.0;
    exponent = -iphi + N;
  } else {
    const bool has_k = !spec.k.empty();
    const bool has_l = !spec.ell.empty();
    double ik = 0.0, il = 0.0;
    double prev = has_k ? spec.k(x0) : 0.0;
    xT = detail::walk(domain, x0, M, h, gen, sign,
                      [&](size_t, const Point&, const Point& after, const Vec&, double push) {
                        if (has_k) {
                          const double next = spec.k(after);
                          ik += 0.5 * (prev + next) * h;
                          prev = next;
                        }
                        if (has_l && push > 0.0) il += spec.ell(after) * push;
                      });
    exponent = -0.5 * ik - 0.5 * il;
  }
  bool capped = false;
  if (exponent > cap) {
    exponent = cap;
    capped = true;
  }
  const double w = std::exp(exponent);
  const double g = spec.mode == TamingMode::DoublePotential ? spec.f(xT) : norm(spec.f.grad(xT));
  return {w * g, capped};
}

}  // namespace

TamingResult taming_expectation(const Domain& domain, const TamingSpec& spec, const std::vector<Point>& x0s,
                                double T_semigroup, const McParams& params) {
  if (spec.f.empty()) throw InvalidParameter("taming_expectation needs f");
  if (params.paths < 1000)
    throw StatisticalPowerError("taming_expectation needs at least 1000 paths, got " + std::to_string(params.paths));
  const double t = 2.0 * T_semigroup;
  const size_t M = step_count(t, params.h);

  TamingResult res;
  res.semigroup_time = T_semigroup;
  res.path_horizon = t;
  {
    std::ostringstream os;
    os << "semigroup time " << T_semigroup << " (generator Δ) = path horizon " << t << " (generator Δ/2)";
    res.clock_note = os.str();
  }

  for (size_t j = 0; j < x0s.size(); ++j) {
    const Point& x0 = x0s[j];
    if (domain.signed_distance(x0) > 1e-12) throw InvalidParameter("start point " + x0.str() + " is outside Y");
    const RngSpec stream = params.rng.derive(j);
    const size_t n = params.paths;
    std::vector<double> vals(n);
    std::vector<unsigned char> capped(n, 0);
    parallel_for(
        n,
        [&](size_t i) {
          const auto s = detail::path_stream(i, params.antithetic);
          PathRng gen(stream, s.index);
          try {
            const PathValue v = run_path(domain, spec, x0, M, params.h, gen, s.sign, params.exponent_cap);
            vals[i] = v.value;
            capped[i] = v.capped;
          } catch (const SingularityError&) {
            vals[i] = std::nan("");
          }
        },
        params.threads);

    std::vector<double> ok;
    ok.reserve(n);
    TamingEstimate e;
    e.x0 = x0;
    for (size_t i = 0; i < n; ++i) {
      if (std::isnan(vals[i])) {
        ++e.rejected;
        continue;
      }
      ok.push_back(vals[i]);
      e.cap_hits += capped[i];
    }
    const MeanEstimate m = mean_se(ok);
    e.mean = m.mean;
    // Antithetic pairs are dependent; the plain SE is then only indicative.
    e.se = m.se;
    e.used = m.used;
    if (e.rejected > 0)
      res.warnings.push_back(std::to_string(e.rejected) + " paths rejected at a singularity from " + x0.str());
    if (e.cap_hits > 0)
      res.warnings.push_back(std::to_string(e.cap_hits) + " paths hit the exponent cap from " + x0.str());
    if (params.precision > 0.0 && 3.0 * e.se > params.precision)
      res.warnings.push_back("statistical power: 3 SE = " + std::to_string(3.0 * e.se) + " exceeds requested " +
                             std::to_string(params.precision) + " at " + x0.str());
    res.estimates.push_back(e);
  }
  return res;
}

}  // namespace kappa

#include <algorithm>
#include <cmath>
#include <ostream>

#include "kappa/errors.hpp"
#include "kappa/parallel.hpp"
#include "kappa/stochastic.hpp"
#include "walker.hpp"

namespace kappa {

size_t step_count(double T, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidParameter("step h must be positive, got " + std::to_string(h));
  if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidParameter("horizon T must be nonnegative");
  const double q = T / h;
  const double n = std::round(q);
  if (std::abs(q - n) > 1e-8 * std::max(1.0, q))
    throw InvalidParameter("T/h must be an integer (T=" + std::to_string(T) + ", h=" + std::to_string(h) + ")");
  return static_cast<size_t>(n);
}

PathSample simulate_reflected(const Domain& domain, const Point& x0, double T, double h, const RngSpec& rng,
                              std::uint64_t path_index, const ScalarField* psi, const SimulateOptions& opts) {
  if (x0.dim() != domain.dim()) throw InvalidParameter("start point dimension does not match the domain");
  if (domain.signed_distance(x0) > 1e-12) throw InvalidParameter("start point " + x0.str() + " is outside Y");
  const size_t M = step_count(T, h);
  const bool with_psi = psi && !psi->empty();

  PathSample p;
  p.times.resize(M + 1);
  for (size_t i = 0; i <= M; ++i) p.times[i] = static_cast<double>(i) * h;
  p.positions.reserve(M + 1);
  p.positions.push_back(x0);
  p.localtime.reserve(M + 1);
  p.localtime.push_back(0.0);
  p.pushes.reserve(M);
  if (with_psi) {
    p.stochint.reserve(M + 1);
    p.stochint.push_back(0.0);
    p.quadvar.reserve(M + 1);
    p.quadvar.push_back(0.0);
  }

  const auto s = detail::path_stream(path_index, opts.antithetic);
  PathRng gen(rng, s.index, opts.stream);
  double L = 0.0, Mpsi = 0.0, Q = 0.0;
  detail::walk(domain, x0, M, h, gen, s.sign, [&](size_t, const Point& before, const Point& after, const Vec& dW,
                                                 double push) {
    if (with_psi) {
      const Vec g = psi->grad(before);
      Mpsi += dot(g, dW);
      Q += norm2(g) * h;
      p.stochint.push_back(Mpsi);
      p.quadvar.push_back(Q);
    }
    L += push;
    p.pushes.push_back(push);
    p.localtime.push_back(L);
    p.positions.push_back(after);
  });
  return p;
}

PathBatch simulate_batch(const Domain& domain, const Point& x0, double T, double h, const RngSpec& rng, size_t n,
                         const ScalarField* psi, const SimulateOptions& opts, int threads) {
  std::vector<std::optional<PathSample>> slots(n);
  parallel_for(
      n,
      [&](size_t i) {
        try {
          slots[i] = simulate_reflected(domain, x0, T, h, rng, i, psi, opts);
        } catch (const SingularityError&) {
          slots[i].reset();
        }
      },
      threads);
  PathBatch out;
  out.paths.reserve(n);
  for (auto& s : slots) {
    if (s)
      out.paths.push_back(std::move(*s));
    else
      ++out.rejected;
  }
  return out;
}

namespace {

double lerp(double a, double b, double th) { return a + th * (b - a); }

// Value of a piecewise-linear function given on a uniform grid t_i = i*dt.
double interp_uniform(const std::vector<double>& t, const std::vector<double>& v, double x) {
  const size_t M = t.size() - 1;
  if (M == 0) return v[0];
  const double dt = t[1] - t[0];
  double q = x / dt;
  if (q <= 0.0) return v[0];
  if (q >= static_cast<double>(M)) return v[M];
  const size_t i = std::min(static_cast<size_t>(q), M - 1);
  return lerp(v[i], v[i + 1], (x - t[i]) / (t[i + 1] - t[i]));
}

}  // namespace

PathSample time_change_path(const PathSample& path, const ScalarField& psi) {
  const size_t M = path.steps();
  if (M == 0) throw ClockError("time change needs at least one step");
  const double dt = path.times[1] - path.times[0];

  std::vector<double> sigma(M + 1, 0.0);
  double wprev = std::exp(2.0 * psi(path.positions[0]));
  for (size_t i = 0; i < M; ++i) {
    const double w = std::exp(2.0 * psi(path.positions[i + 1]));
    sigma[i + 1] = sigma[i] + 0.5 * (wprev + w) * (path.times[i + 1] - path.times[i]);
    if (!(sigma[i + 1] > sigma[i]) || !std::isfinite(sigma[i + 1]))
      throw ClockError("time change clock is not strictly increasing at step " + std::to_string(i));
    wprev = w;
  }

  const size_t m = static_cast<size_t>(std::floor(sigma[M] / dt + 1e-9));
  PathSample out;
  out.times.resize(m + 1);
  out.positions.resize(m + 1);
  out.localtime.resize(m + 1);
  out.source_times.resize(m + 1);
  const bool fn = path.has_functional();
  if (fn) {
    out.stochint.resize(m + 1);
    out.quadvar.resize(m + 1);
  }

  size_t i = 0;
  for (size_t j = 0; j <= m; ++j) {
    const double s = static_cast<double>(j) * dt;
    while (i + 1 < M && sigma[i + 1] < s) ++i;
    const double th = std::clamp((s - sigma[i]) / (sigma[i + 1] - sigma[i]), 0.0, 1.0);
    out.times[j] = s;
    out.source_times[j] = lerp(path.times[i], path.times[i + 1], th);
    out.positions[j] = path.positions[i] + th * (path.positions[i + 1] - path.positions[i]);
    out.localtime[j] = lerp(path.localtime[i], path.localtime[i + 1], th);
    if (fn) {
      out.stochint[j] = lerp(path.stochint[i], path.stochint[i + 1], th);
      out.quadvar[j] = lerp(path.quadvar[i], path.quadvar[i + 1], th);
    }
  }
  out.pushes.resize(m);
  for (size_t j = 0; j < m; ++j) out.pushes[j] = out.localtime[j + 1] - out.localtime[j];
  return out;
}

double round_trip_residual(const PathSample& once, const PathSample& twice) {
  if (once.source_times.empty() || twice.source_times.empty())
    throw InvalidParameter("round trip needs two time-changed paths");
  double worst = 0.0;
  for (size_t k = 0; k < twice.times.size(); ++k) {
    const double back = interp_uniform(once.times, once.source_times, twice.source_times[k]);
    worst = std::max(worst, std::abs(back - twice.times[k]));
  }
  return worst;
}

void write_trace_csv(std::ostream& os, const PathSample& path) {
  const int n = path.positions.empty() ? 0 : path.positions[0].dim();
  os << "t";
  for (int c = 0; c < n; ++c) os << ",x" << (c + 1);
  os << ",L,M,push\n";
  os.precision(17);
  for (size_t i = 0; i < path.times.size(); ++i) {
    os << path.times[i];
    for (int c = 0; c < n; ++c) os << ',' << path.positions[i][c];
    os << ',' << path.localtime[i] << ',' << (path.has_functional() ? path.stochint[i] : 0.0) << ','
       << (i < path.pushes.size() ? path.pushes[i] : 0.0) << '\n';
  }
}

}  // namespace kappa

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kappa/domain.hpp"
#include "kappa/point.hpp"
#include "kappa/report.hpp"
#include "kappa/rng.hpp"
#include "kappa/scalar_field.hpp"

namespace kappa {

/// One simulated reflected trajectory in path clock (generator Δ/2).
///
/// localtime[i] is the push-sum up to times[i]; pushes[i] is the push of
/// the step times[i] -> times[i+1]. When a field ψ was attached, stochint[i]
/// is the left-point Itô sum of ∇ψ·dW up to times[i] and quadvar[i] the
/// matching Riemann sum of Γ(ψ).
///
/// A time-changed path also carries source_times: for each entry, the time
/// in the clock of the path it was derived from.
struct PathSample {
  std::vector<double> times;
  std::vector<Point> positions;
  std::vector<double> localtime;
  std::vector<double> pushes;
  std::vector<double> stochint;
  std::vector<double> quadvar;
  std::vector<double> source_times;

  size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  bool has_functional() const { return !stochint.empty(); }
};

struct SimulateOptions {
  /// Pair path 2i+1 with path 2i by negating its normals.
  bool antithetic = false;
  std::uint64_t stream = 0;
};

/// Number of steps T/h, which must be an integer up to rounding.
size_t step_count(double T, double h);

/// Projected Euler scheme: x <- proj_Y(x + sqrt(h) ξ). Throws
/// SingularityError when a projection hits the skeleton of the domain.
PathSample simulate_reflected(const Domain& domain, const Point& x0, double T, double h, const RngSpec& rng,
                              std::uint64_t path_index, const ScalarField* psi = nullptr,
                              const SimulateOptions& opts = {});

/// Simulates n paths, dropping (and counting) those that hit a singularity.
struct PathBatch {
  std::vector<PathSample> paths;
  size_t rejected = 0;
};
PathBatch simulate_batch(const Domain& domain, const Point& x0, double T, double h, const RngSpec& rng, size_t n,
                         const ScalarField* psi = nullptr, const SimulateOptions& opts = {}, int threads = 0);

/// -1/2 (trapezoid of k) - 1/2 sum of l(projected point) * push.
double fk_exponent(const PathSample& path, const ScalarField& k, const ScalarField& ell);

/// N = ψ(B_T) - ψ(B_0) - M_T.
double additive_functional_N(const PathSample& path, const ScalarField& psi);

/// |log(e^{-M+<M>/2} e^{-∫Γψ/2} e^{ψ(B_T)-ψ(B_0)}) - N|.
double decomposition_identity(const PathSample& path, const ScalarField& psi);

/// Re-indexes a path to the clock σ(t) = ∫ e^{2ψ(B_s)} ds. The result lives
/// on a uniform grid of the new clock with the same step; positions, local
/// time and stochastic integrals are interpolated at τ = σ^{-1}.
PathSample time_change_path(const PathSample& path, const ScalarField& psi);

/// Maps the source_times of a twice time-changed path back to the clock of
/// the original path and returns the largest deviation from its own grid.
double round_trip_residual(const PathSample& once, const PathSample& twice);

/// Per-path Revuz defect D = L_T - (V(B_0) - V(B_T) + 1/2 sum ΔV(x_i) h).
double revuz_defect(const PathSample& path, const Domain& domain);

/// Mean push-sum local time against V(B_0) - V(B_T) + 1/2∫ΔV on the same
/// paths. Needs at least min_paths paths.
Report local_time_consistency(const std::vector<PathSample>& paths, const Domain& domain, double bias_constant = 1.0,
                              size_t min_paths = 10000);

/// Streaming version: simulates n paths without storing them.
Report local_time_consistency(const Domain& domain, const Point& x0, double T, double h, size_t n,
                              const RngSpec& rng, double bias_constant = 1.0, int threads = 0);

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  size_t used = 0;
  size_t rejected = 0;
};

/// Mean and standard error in fixed order.
MeanEstimate mean_se(const std::vector<double>& values);

/// E[L_T] by streaming simulation.
MeanEstimate local_time_mean(const Domain& domain, const Point& x0, double T, double h, size_t n, const RngSpec& rng,
                             int threads = 0);

/// E[L_T(h/2) - L_T(h)] on coupled paths: the coarse increment is the sum
/// of two fine increments.
MeanEstimate local_time_refinement(const Domain& domain, const Point& x0, double T, double h, size_t n,
                                   const RngSpec& rng, int threads = 0);

enum class TamingMode {
  DoublePotential,    ///< weight exp(-∫φ + N^ψ), integrand f(B_t)
  GradientEstimate,   ///< weight exp(fk_exponent), integrand |∇f|(B_t)
};

struct TamingSpec {
  TamingMode mode = TamingMode::DoublePotential;
  ScalarField f;
  ScalarField phi, psi;   // mode (a)
  ScalarField k, ell;     // mode (b)
};

struct McParams {
  size_t paths = 10000;
  double h = 1e-3;
  RngSpec rng{};
  bool antithetic = false;
  /// Exponents above this are clamped and flagged.
  double exponent_cap = 700.0;
  /// Requested half width of the 3 SE band; 0 disables the check.
  double precision = 0.0;
  int threads = 0;
};

struct TamingEstimate {
  Point x0;
  double mean = 0.0;
  double se = 0.0;
  size_t used = 0;
  size_t rejected = 0;
  size_t cap_hits = 0;
};

struct TamingResult {
  std::vector<TamingEstimate> estimates;
  double semigroup_time = 0.0;
  double path_horizon = 0.0;
  std::string clock_note;
  std::vector<std::string> warnings;
  bool poisoned() const;
};

/// Monte-Carlo taming semigroup at semigroup time T_semigroup, i.e. path
/// horizon 2 T_semigroup. Each start point uses its own derived stream.
TamingResult taming_expectation(const Domain& domain, const TamingSpec& spec, const std::vector<Point>& x0s,
                                double T_semigroup, const McParams& params);

/// CSV trace: t, x1..xn, L, M, push.
void write_trace_csv(std::ostream& os, const PathSample& path);

}  // namespace kappa

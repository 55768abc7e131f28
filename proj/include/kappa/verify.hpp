#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kappa/domain.hpp"
#include "kappa/profiles.hpp"
#include "kappa/report.hpp"
#include "kappa/scalar_field.hpp"
#include "kappa/semigroup.hpp"
#include "kappa/stochastic.hpp"

namespace kappa {

/// Knobs shared by the checks.
///
/// Discretization allowance of a Monte-Carlo-vs-PDE probe is
///   tolerance_scale * (sqrt(h) + h_grid^2)
/// with h the path step and h_grid the coarsest PDE cell size.
struct CheckOptions {
  McParams mc;
  int grid = 0;  // PDE resolution, 0 = the check's default
  double tolerance_scale = 1.0;
};

/// Semigroup time t (generator Δ) against path horizon 2t (generator Δ/2).
/// Every Monte-Carlo-vs-PDE comparison builds one of these and hands the
/// Monte-Carlo result to verify(), which raises ClockError unless the
/// mapping was applied exactly once.
struct ClockPair {
  double semigroup_time = 0.0;
  double path_horizon = 0.0;

  static ClockPair from_semigroup(double t);
  static ClockPair from_path(double horizon);
  void verify(const TamingResult& r) const;
  std::string note() const;
};

/// |∇P_t f| from the Neumann heat solver against the Monte-Carlo gradient
/// bound E[exp(-1/2∫k - 1/2∫ℓ dL) |∇f|(B_2t)], at the grid node nearest to
/// each probe. Interval and Box use their own grids, balls in R^2 a polar
/// grid, balls in R^3 a radial grid (f must then be radial).
Report check_ge1(const Domain& domain, const ScalarField& k, const ScalarField& ell, const ScalarField& f, double t,
                 const std::vector<Point>& probes, const CheckOptions& opts = {});

/// Γ(P_t f) + (2t/N) e^{-2 K t} (ΔP_t f)^2 <= P_t^{2k} Γ(f) nodewise, K = max k.
/// Only the worst node enters the probes; extra records the node count.
Report check_ge2(const Grid& grid, const ScalarField& k, double N, const ScalarField& f, double t,
                 double tolerance_scale = 1.0);

/// Weak Bochner inequality
///   -∫Γ(|∇f|, φ) - ∫ |∇f|^{-1} Γ(f, Δf) φ  >=  ∫ κ |∇f| φ
/// by grid quadrature on an Interval or Box grid. Nodes with |∇f| below
/// 1e-8 are dropped.
Report check_be1_weakform(const Grid& grid, const ScalarField& kappa, const ScalarField& f, const ScalarField& phi,
                          double tolerance_scale = 1.0);

/// E_x[exp(-w L_t)] (path clock) against exp(1 - t (N-1)/2 cot^2 r) on the
/// ball of radius r in R^dim, with w = cot r unless overridden (control).
Report check_ball_decay(double r, int dim, double t, const CheckOptions& opts = {},
                        std::optional<double> weight = std::nullopt);

/// Exterior of the ball of radius r in R^3: gradient bound with k = -1,
/// ℓ = -1/r for a radial f supported away from the boundary, plus a fit of
/// log E[exp(L_t / r)] against a + b t + c sqrt(t) (diagnostic, in extra).
Report check_cball(double r, double t, const CheckOptions& opts = {});

/// Neumann λ1 of the disc of radius r against (N-1)/2 cot^2 r, N = 2.
Report check_spectral_gap(double r, int resolution = 128, std::optional<double> bound = std::nullopt);

/// ∫Γ(f,g) + ∫Δf g against ∫_∂Y Γ(f,V) g dσ on an Interval or a disc.
/// boundary_factor scales the boundary term (1 = the identity). extra
/// holds the observed order from resolutions n/4, n/2, n.
Report check_integration_by_parts(const Domain& domain, const ScalarField& f, const ScalarField& g,
                                  int resolution = 256, double boundary_factor = 1.0, double tolerance_scale = 1.0);

struct CantorWeight {
  Profile profile;
  Report report;
};

/// Φ_j with norm checks ‖Φ_j‖ <= ‖φ‖/3, ‖Φ_j'‖ <= ‖φ'‖ and
/// ∫|Φ_j''| = (2^j - 1) ∫|φ''| within 1%.
CantorWeight cantor_weight(int j, const Profile& bump = Profile::cos2_bump());

/// ψ_j = Φ_j(x1) η(x2) on the box [0,1] x [-1,1]. Gradient bound of the
/// conformally changed space (Ricci k_j = -e^{-2ψ}Δψ) with the PDE side on
/// a reweighted grid and the path side on time-changed paths; sup|k_j| in
/// extra.
Report cantor2_scenario(int j, double t, const CheckOptions& opts = {});

/// Mode-(a) taming semigroup against the PDE with potential 2φ - Δψ and
/// the Robin term Γ(ψ, V) on the boundary, on an interval. Two-sided, with
/// a relative allowance of 2%.
Report check_double_potential(const Domain& interval, const ScalarField& phi, const ScalarField& psi,
                              const ScalarField& f, double t, const std::vector<Point>& x0s,
                              const CheckOptions& opts = {});

/// E[L_1] of reflected Brownian motion on the half-line started at 0
/// against sqrt(2/π), two-sided within 3 SE + 0.02. With rate_paths > 0 the
/// bias rate log2(d(2e-3)/d(1e-3)) of coupled refinements d(h) = E[L(h/2) - L(h)]
/// must be at least 0.4.
Report check_local_time_law(const CheckOptions& opts, size_t rate_paths = 0);

/// Largest pathwise residual of ψ(B_T) - ψ(B_0) = M + N against its
/// exponential form, over `paths` reflected paths on the unit disc for three
/// smooth ψ; PASS iff <= 1e-12.
Report check_decomposition(size_t paths, const RngSpec& rng, int threads = 0);

/// Contraction d(x_t, y_t) <= exp(-∫ℓ̄) d(x_0, y_0): "quadratic" demands
/// equality within 1e-6, "quartic" (annulus) nonnegative slack at every step.
Report check_evi(const std::string& which);

/// e^ψ d with ψ = -log(|x - z| / r): the geodesic between two points of the
/// circle stays on it within 1e-3 r.
Report check_geodesic_circle();

// Suite ---------------------------------------------------------------

struct SuiteOptions {
  RngSpec rng{};
  int threads = 0;
  std::optional<size_t> paths;
  std::optional<double> h;
  std::optional<int> grid;
  double tolerance_scale = 1.0;
};

struct SuiteEntry {
  std::string id;
  std::string description;
  /// Controls are expected to FAIL.
  Verdict expected = Verdict::Pass;
  std::function<Report(const SuiteOptions&)> run;
};

const std::vector<SuiteEntry>& suite_entries();
const SuiteEntry& suite_entry(const std::string& id);

struct SuiteRun {
  std::vector<std::string> ids;
  std::vector<Verdict> expected;
  std::vector<Report> reports;
  std::vector<std::string> errors;  // non-empty when a check threw
};

/// Runs the named checks in order ("all" expands to every entry). Each
/// check draws from rng.derive(hash of its id), so results do not depend
/// on which other checks ran.
SuiteRun run_suite(const std::vector<std::string>& ids, const SuiteOptions& opts);

/// id, expected, verdict, min_slack, outcome; no timings.
void write_summary_csv(std::ostream& os, const SuiteRun& run);
nlohmann::json summary_json(const SuiteRun& run);

/// 0 if every check met its expectation, 2 if some were inconclusive, 1 if
/// any missed its expectation or threw.
int suite_exit_code(const SuiteRun& run);

}  // namespace kappa

#ifndef RICCI_SOLVER_HPP
#define RICCI_SOLVER_HPP

#include <optional>
#include <vector>

#include "ricci/certificates.hpp"
#include "ricci/problem.hpp"
#include "ricci/structure.hpp"

namespace ricci {

/// Uniform discretization of [0, sigma] with an odd number of nodes (so the
/// interval count is even, as composite Simpson needs).
struct Grid {
  int N = 2001;
  double sigma = 0.0;

  Grid() = default;
  Grid(int N_, double sigma_);

  double spacing() const { return sigma / (N - 1); }
  double node(int j) const { return sigma * j / (N - 1); }
};

/// Discretized element (u1, u2) of the path space: u1 is an n-vector path
/// with its own derivative channel, u2 a scalar path.
struct PathPair {
  std::vector<double> mu;    // N*n, row-major
  std::vector<double> mu_p;  // N*n
  std::vector<double> nu;    // N

  static PathPair zero(int N, int n);
};

/// sup|u1| + sigma*sup|u1'| + sup|u2| with Euclidean norms on rows.
double b_norm(const PathPair& pp, int n, double sigma);

/// Background data cached on the grid: the linear interpolant f_bar, its
/// constant derivative, h_bar with its slope, and the profile samples.
struct Background {
  Grid grid;
  int n = 0;
  std::vector<double> f_bar;    // N*n
  std::vector<double> f_bar_p;  // n (constant in r)
  std::vector<double> h_bar;    // N
  std::vector<double> h_bar_p;  // N
  std::vector<double> phi;      // N*n
  std::vector<double> phi_p;    // N*n
};

/// f_bar(r) = a(sigma-r)/sigma + b r/sigma; h_bar solves
/// h' = K(h, f_bar, f_bar', phi') with h(0) = H(f_bar(0), f_bar'(0), phi(0)),
/// integrated by classical RK4 with 4 substeps per grid interval.
/// Throws HUndefined if H is undefined at the head, NonPositive if h_bar
/// loses positivity.
Background background(const ProblemData& p, const Grid& g);

/// One application of the integral map: xi solves xi'' = g_vec with
/// xi(0) = xi(sigma) = 0 via the exact double-integration representation
/// (cumulative Simpson quadrature), and zeta accumulates the h-correction.
/// When theta > 0 the a-priori bounds |xi| <= sigma^2 theta/8 and
/// |xi'| <= sigma theta/2 are asserted nodewise (BoundViolation beyond 5%).
PathPair apply_C(const PathPair& pp, const Background& bg,
                 const ProblemData& p, const Grid& g, double theta = 0.0);

enum class Provenance { GlobalFixedPoint, LocalShoot };

struct MetricSolution {
  Grid grid;
  std::vector<double> r;   // covered nodes, uniform spacing g.spacing()
  std::vector<double> f;   // r.size()*n
  std::vector<double> fp;  // r.size()*n
  std::vector<double> h;   // r.size()
  std::vector<double> hp;  // r.size()
  Provenance provenance = Provenance::GlobalFixedPoint;

  // local-shoot bookkeeping
  double tau = 0.0;
  double kappa = 0.0;
  double h_at_tau = 0.0;

  // fixed-point bookkeeping
  int iterations = 0;
  double ball_norm = 0.0;
  bool hartman_ok = true;
  bool ball_ok = true;

  int n() const { return r.empty() ? 0 : static_cast<int>(f.size() / r.size()); }
};

/// Damped Picard iteration of apply_C from the zero pair. Retries with
/// damping/2 and damping/4 before throwing NoConvergence. When the
/// certificate passed, ball membership b_norm <= sigma^2*Sigma is asserted
/// every iteration. h' of the result is recomputed as K(h, f, f', phi').
MetricSolution fixed_point_solve(const ProblemData& p,
                                 const CertificateReport& cert, const Grid& g,
                                 double tol = 1e-10, int max_iter = 200,
                                 double damping = 1.0);

struct LocalShootResult {
  MetricSolution sol;
  double kappa = 0.0;
  bool breakdown = false;  // positivity ended before the requested span
  double beta_used = 0.0;  // theorem_recipe only
};

/// Shoots the second-order system from the orbit at r = sigma*tau in both
/// directions with adaptive 5(4) stepping, landing exactly on grid nodes.
/// Stops at the interval ends, at span max_span, or when min(f_i, h) drops
/// below 1e-6; the output is clipped to the largest symmetric interval
/// around sigma*tau (a side that reached the interval end or the full span
/// counts as complete). Throws LocalHypothesisFailed if the solvability
/// inequality fails for od.
LocalShootResult local_shoot(const OrbitData& od, const ProblemData& p,
                             const Grid& g, double max_span);

/// Interpolated-orbit construction: a_tau,i = sqrt((1-tau) a_i + tau b_i),
/// delta_tau,i = beta; beta doubles (up to 2^20 times the start) until
/// check_local certifies, then local_shoot runs. Throws RecipeFailed with
/// the lhs trace if no beta in range certifies.
LocalShootResult theorem_recipe(double tau, double beta_param,
                                const ProblemData& p, const Grid& g,
                                double max_span);

struct ResidualReport {
  double max_sigma_defect = 0.0;           // max |sigma_bar - 1|
  std::vector<double> orbit_defect;        // per module, max |orbit_i - phi_i|
  double max_orbit_defect = 0.0;
  double max_bianchi = 0.0;
  double boundary_err_a = 0.0;
  double boundary_err_b = 0.0;
  double bc_h_defect = 0.0;
  bool hartman_ok = true;
  bool ball_ok = true;
  double ball_norm = 0.0;
  bool sigma_propagation_ok = true;
  std::optional<double> grid_ratio;  // residual(N) / residual(2N-1)
};

/// Independent residual check: f'' and h' are recomputed from the stored
/// f' and h channels by 4th-order finite differences (never from the ODE
/// right-hand sides), then the curvature components are evaluated nodewise
/// against the prescribed data. The solution must cover at least 5 nodes.
ResidualReport verify(const MetricSolution& sol, const ProblemData& p);

/// (coarse orbit+sigma residual) / (fine orbit+sigma residual); infinity
/// maps to a large finite value.
double grid_convergence_ratio(const ResidualReport& coarse,
                              const ResidualReport& fine);

}  // namespace ricci

#endif

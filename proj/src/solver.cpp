#include "ricci/solver.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"

namespace ricci {

Grid::Grid(int N_, double sigma_) : N(N_), sigma(sigma_) {
  if (N < 3 || N % 2 == 0)
    throw InvalidProblem("grid size must be odd and at least 3");
  if (!(sigma > 0.0)) throw InvalidProblem("grid needs a positive sigma");
}

PathPair PathPair::zero(int N, int n) {
  PathPair pp;
  pp.mu.assign(static_cast<std::size_t>(N) * n, 0.0);
  pp.mu_p.assign(static_cast<std::size_t>(N) * n, 0.0);
  pp.nu.assign(N, 0.0);
  return pp;
}

double b_norm(const PathPair& pp, int n, double sigma) {
  const int N = static_cast<int>(pp.nu.size());
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int j = 0; j < N; ++j) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i) {
      double u = pp.mu[static_cast<std::size_t>(j) * n + i];
      double up = pp.mu_p[static_cast<std::size_t>(j) * n + i];
      a += u * u;
      b += up * up;
    }
    s1 = std::max(s1, std::sqrt(a));
    s2 = std::max(s2, std::sqrt(b));
    s3 = std::max(s3, std::fabs(pp.nu[j]));
  }
  return s1 + sigma * s2 + s3;
}

namespace {

// Cumulative integral out[j] = int_0^{r_j} v. Even nodes accumulate full
// Simpson pairs; odd nodes add the quadratic half-interval rule. Needs an
// odd sample count (guaranteed by Grid).
void cumulative_simpson(std::span<const double> v, double dh,
                        std::vector<double>& out) {
  const int N = static_cast<int>(v.size());
  out.assign(N, 0.0);
  for (int j = 2; j < N; j += 2)
    out[j] = out[j - 2] + dh / 3.0 * (v[j - 2] + 4.0 * v[j - 1] + v[j]);
  for (int j = 1; j < N; j += 2)
    out[j] = out[j - 1] + dh / 12.0 * (5.0 * v[j - 1] + 8.0 * v[j] - v[j + 1]);
}

std::span<const double> row(const std::vector<double>& v, int j, int n) {
  return {v.data() + static_cast<std::size_t>(j) * n, static_cast<std::size_t>(n)};
}

}  // namespace

Background background(const ProblemData& p, const Grid& g) {
  if (std::fabs(g.sigma - p.sigma) > 1e-15 * std::max(1.0, p.sigma))
    throw InvalidProblem("grid sigma does not match the problem");
  const auto& s = p.structure;
  const int n = s.n, N = g.N;

  Background bg;
  bg.grid = g;
  bg.n = n;
  bg.f_bar.resize(static_cast<std::size_t>(N) * n);
  bg.f_bar_p.resize(n);
  bg.h_bar.resize(N);
  bg.h_bar_p.resize(N);
  bg.phi.resize(static_cast<std::size_t>(N) * n);
  bg.phi_p.resize(static_cast<std::size_t>(N) * n);

  for (int i = 0; i < n; ++i) bg.f_bar_p[i] = (p.b[i] - p.a[i]) / p.sigma;
  ProfilesOnR prof(p);
  std::vector<double> tmp(n);
  for (int j = 0; j < N; ++j) {
    double r = g.node(j);
    for (int i = 0; i < n; ++i)
      bg.f_bar[static_cast<std::size_t>(j) * n + i] =
          p.a[i] * (p.sigma - r) / p.sigma + p.b[i] * r / p.sigma;
    prof.values(r, tmp);
    std::copy(tmp.begin(), tmp.end(),
              bg.phi.begin() + static_cast<std::size_t>(j) * n);
    prof.derivatives(r, tmp);
    std::copy(tmp.begin(), tmp.end(),
              bg.phi_p.begin() + static_cast<std::size_t>(j) * n);
  }

  // Head value, then classical RK4 with 4 substeps per interval.
  bg.h_bar[0] = eval_H(row(bg.f_bar, 0, n), bg.f_bar_p, row(bg.phi, 0, n), s);
  std::vector<double> fr(n), pr(n);
  auto slope = [&](double r, double hval) {
    if (!(hval > 0.0)) throw NonPositive("h_bar crossed zero");
    for (int i = 0; i < n; ++i)
      fr[i] = p.a[i] * (p.sigma - r) / p.sigma + p.b[i] * r / p.sigma;
    prof.derivatives(r, pr);
    return eval_K(hval, fr, bg.f_bar_p, pr, s);
  };
  const double sub = g.spacing() / 4.0;
  for (int j = 0; j + 1 < N; ++j) {
    double hval = bg.h_bar[j];
    double r = g.node(j);
    for (int m = 0; m < 4; ++m) {
      double k1 = slope(r, hval);
      double k2 = slope(r + sub / 2.0, hval + sub / 2.0 * k1);
      double k3 = slope(r + sub / 2.0, hval + sub / 2.0 * k2);
      double k4 = slope(r + sub, hval + sub * k3);
      hval += sub / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      r += sub;
    }
    bg.h_bar[j + 1] = hval;
  }
  for (int j = 0; j < N; ++j) {
    if (!(bg.h_bar[j] > 0.0)) throw NonPositive("h_bar crossed zero");
    bg.h_bar_p[j] = eval_K(bg.h_bar[j], row(bg.f_bar, j, n),
                           bg.f_bar_p, row(bg.phi_p, j, n), s);
  }
  return bg;
}

PathPair apply_C(const PathPair& pp, const Background& bg,
                 const ProblemData& p, const Grid& g, double theta) {
  const auto& s = p.structure;
  const int n = bg.n, N = g.N;
  const double sigma = p.sigma, dh = g.spacing();

  // Right-hand side at the displaced path.
  std::vector<double> gv(static_cast<std::size_t>(N) * n);
  std::vector<double> x(n), y(n), zz(n), ww(n), fpp(n);
  for (int j = 0; j < N; ++j) {
    double ph = bg.h_bar[j] + pp.nu[j];
    if (!(ph > 0.0)) throw NonPositive("h path crossed zero in apply_C");
    for (int i = 0; i < n; ++i) {
      x[i] = bg.f_bar[static_cast<std::size_t>(j) * n + i] +
             pp.mu[static_cast<std::size_t>(j) * n + i];
      y[i] = bg.f_bar_p[i] + pp.mu_p[static_cast<std::size_t>(j) * n + i];
      zz[i] = bg.phi[static_cast<std::size_t>(j) * n + i];
      ww[i] = bg.phi_p[static_cast<std::size_t>(j) * n + i];
    }
    eval_F_tilde(ph, x, y, zz, ww, s, fpp);
    for (int i = 0; i < n; ++i)
      gv[static_cast<std::size_t>(j) * n + i] = fpp[i];
  }

  // xi'' = g with xi(0) = xi(sigma) = 0, by the double-integration formula
  // xi(r) = r*G(r) - S(r) - (r/sigma)(sigma*G(sigma) - S(sigma)),
  // G = int g, S = int s*g(s).
  PathPair out = PathPair::zero(N, n);
  std::vector<double> col(N), scol(N), G, S;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < N; ++j) {
      col[j] = gv[static_cast<std::size_t>(j) * n + i];
      scol[j] = g.node(j) * col[j];
    }
    cumulative_simpson(col, dh, G);
    cumulative_simpson(scol, dh, S);
    const double corr = (sigma * G[N - 1] - S[N - 1]) / sigma;
    for (int j = 0; j < N; ++j) {
      double r = g.node(j);
      out.mu[static_cast<std::size_t>(j) * n + i] = r * G[j] - S[j] - r * corr;
      out.mu_p[static_cast<std::size_t>(j) * n + i] = G[j] - corr;
    }
  }
  for (int i = 0; i < n; ++i) {
    out.mu[i] = 0.0;
    out.mu[static_cast<std::size_t>(N - 1) * n + i] = 0.0;
  }

  if (theta > 0.0) {
    const double bx = sigma * sigma * theta / 8.0;
    const double bxp = sigma * theta / 2.0;
    for (int j = 0; j < N; ++j) {
      double a = 0.0, b = 0.0;
      for (int i = 0; i < n; ++i) {
        double u = out.mu[static_cast<std::size_t>(j) * n + i];
        double up = out.mu_p[static_cast<std::size_t>(j) * n + i];
        a += u * u;
        b += up * up;
      }
      if (std::sqrt(a) > 1.05 * bx || std::sqrt(b) > 1.05 * bxp)
        throw BoundViolation("a-priori bound on the centered path failed at r=" +
                             std::to_string(g.node(j)));
    }
  }

  // zeta: head from the boundary identity, tail by cumulative quadrature of
  // the K-increment along the updated f-path.
  for (int i = 0; i < n; ++i) {
    x[i] = bg.f_bar[i];
    y[i] = bg.f_bar_p[i] + out.mu_p[i];
    zz[i] = bg.phi[i];
  }
  const double head = -bg.h_bar[0] + eval_H(x, y, zz, s);
  std::vector<double> integrand(N), Z;
  for (int j = 0; j < N; ++j) {
    double ph = bg.h_bar[j] + pp.nu[j];
    for (int i = 0; i < n; ++i) {
      x[i] = bg.f_bar[static_cast<std::size_t>(j) * n + i] +
             out.mu[static_cast<std::size_t>(j) * n + i];
      y[i] = bg.f_bar_p[i] + out.mu_p[static_cast<std::size_t>(j) * n + i];
      ww[i] = bg.phi_p[static_cast<std::size_t>(j) * n + i];
    }
    integrand[j] = eval_K(ph, x, y, ww, s) - bg.h_bar_p[j];
  }
  cumulative_simpson(integrand, dh, Z);
  for (int j = 0; j < N; ++j) out.nu[j] = head + Z[j];
  return out;
}

MetricSolution fixed_point_solve(const ProblemData& p,
                                 const CertificateReport& cert, const Grid& g,
                                 double tol, int max_iter, double damping) {
  if (!(tol > 0.0) || max_iter < 1 || !(damping > 0.0) || damping > 1.0)
    throw InvalidProblem("bad solver parameters");
  Background bg = background(p, g);
  const auto& s = p.structure;
  const int n = s.n, N = g.N;
  const bool certified = cert.all_pass();
  const double L = cert.ball_radius;

  PathPair pp = PathPair::zero(N, n);
  bool converged = false;
  int iters_used = 0;
  double last_delta = 0.0;
  const double ladder[3] = {damping, damping / 2.0, damping / 4.0};
  for (double d : ladder) {
    pp = PathPair::zero(N, n);
    for (int it = 1; it <= max_iter; ++it) {
      PathPair img = apply_C(pp, bg, p, g, certified ? cert.theta : 0.0);
      if (certified && b_norm(img, n, p.sigma) > L * (1.0 + 1e-9) + 1e-300)
        throw BoundViolation("iterate left the invariant ball");
      PathPair diff = PathPair::zero(N, n);
      for (std::size_t k = 0; k < pp.mu.size(); ++k) {
        diff.mu[k] = d * (img.mu[k] - pp.mu[k]);
        diff.mu_p[k] = d * (img.mu_p[k] - pp.mu_p[k]);
        pp.mu[k] += diff.mu[k];
        pp.mu_p[k] += diff.mu_p[k];
      }
      for (int j = 0; j < N; ++j) {
        diff.nu[j] = d * (img.nu[j] - pp.nu[j]);
        pp.nu[j] += diff.nu[j];
      }
      iters_used = it;
      last_delta = b_norm(diff, n, p.sigma);
      if (last_delta <= tol) {
        converged = true;
        break;
      }
    }
    if (converged) break;
  }
  if (!converged) throw NoConvergence(iters_used, last_delta);

  MetricSolution sol;
  sol.grid = g;
  sol.provenance = Provenance::GlobalFixedPoint;
  sol.iterations = iters_used;
  sol.ball_norm = b_norm(pp, n, p.sigma);
  sol.ball_ok = !certified || sol.ball_norm <= L * (1.0 + 1e-9) + 1e-300;
  sol.r.resize(N);
  sol.f.resize(static_cast<std::size_t>(N) * n);
  sol.fp.resize(static_cast<std::size_t>(N) * n);
  sol.h.resize(N);
  sol.hp.resize(N);
  std::vector<double> x(n), y(n), ww(n);
  for (int j = 0; j < N; ++j) {
    sol.r[j] = g.node(j);
    sol.h[j] = bg.h_bar[j] + pp.nu[j];
    if (!(sol.h[j] > 0.0)) throw NonPositive("h at r=" + std::to_string(sol.r[j]));
    for (int i = 0; i < n; ++i) {
      std::size_t k = static_cast<std::size_t>(j) * n + i;
      sol.f[k] = bg.f_bar[k] + pp.mu[k];
      sol.fp[k] = bg.f_bar_p[i] + pp.mu_p[k];
      if (!(sol.f[k] > 0.0))
        throw NonPositive("f_" + std::to_string(i + 1) + " at r=" +
                          std::to_string(sol.r[j]));
      x[i] = sol.f[k];
      y[i] = sol.fp[k];
      ww[i] = bg.phi_p[k];
    }
    sol.hp[j] = eval_K(sol.h[j], x, y, ww, s);
  }
  return sol;
}

namespace {

constexpr double kBreakdownFloor = 1e-6;

// State layout: y[0] = h, y[1..n] = f, y[n+1..2n] = f'.
struct ShootSystem {
  const HomogeneousStructure& s;
  const ProfilesOnR& prof;
  int n;
  mutable std::vector<double> phi, phip, fpp;

  void operator()(double r, const std::vector<double>& y,
                  std::vector<double>& dy) const {
    if (!(y[0] > 0.0)) throw NonPositive("h");
    for (int i = 0; i < n; ++i)
      if (!(y[1 + i] > 0.0)) throw NonPositive("f");
    prof.values(r, const_cast<std::vector<double>&>(phi));
    prof.derivatives(r, const_cast<std::vector<double>&>(phip));
    std::span<const double> f(y.data() + 1, static_cast<std::size_t>(n));
    std::span<const double> fp(y.data() + 1 + n, static_cast<std::size_t>(n));
    eval_F_tilde(y[0], f, fp, phi, phip, s, const_cast<std::vector<double>&>(fpp));
    dy.resize(y.size());
    dy[0] = eval_K(y[0], f, fp, phip, s);
    for (int i = 0; i < n; ++i) {
      dy[1 + i] = fp[i];
      dy[1 + n + i] = fpp[i];
    }
  }
};

// One adaptive Dormand-Prince 5(4) transit from r0 to r1 (either direction).
// Returns false when positivity breaks down before reaching r1.
bool dopri_transit(const ShootSystem& sys, double r0, double r1,
                   std::vector<double>& y) {
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176,
       -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double B5[7] = {35.0 / 384,      0.0,        500.0 / 1113,
                               125.0 / 192,     -2187.0 / 6784,
                               11.0 / 84,       0.0};
  static const double B4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695,
                               393.0 / 640,     -92097.0 / 339200,
                               187.0 / 2100,    1.0 / 40};
  static const double C[7] = {0.0, 0.2, 0.3, 0.8, 8.0 / 9, 1.0, 1.0};

  const double span = r1 - r0;
  if (span == 0.0) return true;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  const double tol_abs = 1e-12, tol_rel = 1e-12;
  const std::size_t m = y.size();
  double r = r0;
  double step = dir * std::fabs(span) / 8.0;
  std::vector<double> k[7], yt(m), ynew(m);
  const double min_step = std::fabs(span) * 1e-14 + 1e-300;

  while (dir * (r1 - r) > 0.0) {
    if (std::fabs(step) > std::fabs(r1 - r)) step = r1 - r;
    bool stage_ok = true;
    try {
      for (int st = 0; st < 7; ++st) {
        for (std::size_t q = 0; q < m; ++q) {
          double acc = y[q];
          for (int u = 0; u < st; ++u) acc += step * A[st][u] * k[u][q];
          yt[q] = acc;
        }
        std::vector<double> dy;
        sys(r + C[st] * step, yt, dy);
        k[st] = std::move(dy);
      }
    } catch (const Error&) {
      stage_ok = false;
    }
    double err = 0.0;
    if (stage_ok) {
      for (std::size_t q = 0; q < m; ++q) {
        double y5 = y[q], y4 = y[q];
        for (int st = 0; st < 7; ++st) {
          y5 += step * B5[st] * k[st][q];
          y4 += step * B4[st] * k[st][q];
        }
        ynew[q] = y5;
        double sc = tol_abs + tol_rel * std::max(std::fabs(y[q]), std::fabs(y5));
        double e = (y5 - y4) / sc;
        err += e * e;
      }
      err = std::sqrt(err / m);
      if (!std::isfinite(err)) stage_ok = false;
    }
    if (stage_ok && err <= 1.0) {
      bool positive = ynew[0] >= kBreakdownFloor;
      for (std::size_t q = 1; q < 1 + static_cast<std::size_t>(sys.n); ++q)
        positive = positive && ynew[q] >= kBreakdownFloor;
      if (!positive) return false;
      r += step;
      y = ynew;
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      step *= std::clamp(fac, 0.2, 5.0);
    } else {
      step *= stage_ok ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.5;
      if (std::fabs(step) < min_step) return false;
    }
  }
  return true;
}

}  // namespace

LocalShootResult local_shoot(const OrbitData& od, const ProblemData& p,
                             const Grid& g, double max_span) {
  if (std::fabs(g.sigma - p.sigma) > 1e-15 * std::max(1.0, p.sigma))
    throw InvalidProblem("grid sigma does not match the problem");
  if (!(max_span > 0.0)) throw InvalidProblem("max_span must be positive");
  validate_problem(p, g.N);
  const auto& s = p.structure;
  const int n = s.n;

  LocalCheck lc = check_local(od, p);
  if (!lc.verdict) throw LocalHypothesisFailed(lc.lhs);

  ProfilesOnR prof(p);
  const double r0 = p.sigma * od.tau;
  std::vector<double> phi0(n), delta_a(n);
  prof.values(r0, phi0);
  for (int i = 0; i < n; ++i) delta_a[i] = od.delta_tau[i] / od.a_tau[i];
  const double bracket = eval_H2(od.a_tau, phi0, s) + 1.0 -
                         eval_H1(od.a_tau, delta_a, s);
  if (!(bracket > 0.0)) throw LocalHypothesisFailed(-bracket);
  const double h0 = 1.0 / std::sqrt(bracket);

  std::vector<double> y0(1 + 2 * n);
  y0[0] = h0;
  for (int i = 0; i < n; ++i) {
    y0[1 + i] = od.a_tau[i];
    y0[1 + n + i] = -h0 * delta_a[i];
  }

  ShootSystem sys{s, prof, n, std::vector<double>(n), std::vector<double>(n),
                  std::vector<double>(n)};

  const double node_tol = 1e-9 * std::max(p.sigma, 1.0);
  struct NodeSample {
    int j;
    std::vector<double> y;
  };
  std::vector<NodeSample> fwd, bwd;
  bool at_node = false;
  int j0 = static_cast<int>(std::lround(r0 / g.spacing()));
  if (j0 >= 0 && j0 < g.N && std::fabs(g.node(j0) - r0) <= node_tol)
    at_node = true;

  auto sweep = [&](int dir, std::vector<NodeSample>& out, bool& complete,
                   double& span_reached) {
    std::vector<double> y = y0;
    double r = r0;
    const double limit = dir > 0 ? std::min(p.sigma, r0 + max_span)
                                 : std::max(0.0, r0 - max_span);
    complete = true;
    span_reached = 0.0;
    int j = at_node ? j0 + dir
                    : (dir > 0 ? j0 + (g.node(j0) > r0 ? 0 : 1)
                               : j0 - (g.node(j0) < r0 ? 0 : 1));
    while (j >= 0 && j < g.N &&
           (dir > 0 ? g.node(j) <= limit + node_tol
                    : g.node(j) >= limit - node_tol)) {
      if (!dopri_transit(sys, r, g.node(j), y)) {
        complete = false;
        return;
      }
      r = g.node(j);
      span_reached = std::fabs(r - r0);
      out.push_back({j, y});
      j += dir;
    }
  };
  bool fwd_ok = true, bwd_ok = true;
  double span_f = 0.0, span_b = 0.0;
  sweep(+1, fwd, fwd_ok, span_f);
  sweep(-1, bwd, bwd_ok, span_b);

  const double eff_f = fwd_ok ? max_span : span_f;
  const double eff_b = bwd_ok ? max_span : span_b;
  const double kappa = std::min({eff_f, eff_b, max_span});

  LocalShootResult res;
  res.kappa = kappa;
  res.breakdown = !fwd_ok || !bwd_ok;

  MetricSolution& sol = res.sol;
  sol.grid = g;
  sol.provenance = Provenance::LocalShoot;
  sol.tau = od.tau;
  sol.kappa = kappa;
  sol.h_at_tau = h0;

  std::vector<const NodeSample*> picked;
  for (auto it = bwd.rbegin(); it != bwd.rend(); ++it)
    if (std::fabs(g.node(it->j) - r0) <= kappa + node_tol)
      picked.push_back(&*it);
  NodeSample center{j0, y0};
  if (at_node) picked.push_back(&center);
  for (const auto& nsm : fwd)
    if (std::fabs(g.node(nsm.j) - r0) <= kappa + node_tol)
      picked.push_back(&nsm);
  if (picked.empty())
    throw NonPositive("breakdown before the first grid node; kappa=" +
                      std::to_string(kappa));

  const int M = static_cast<int>(picked.size());
  sol.r.resize(M);
  sol.f.resize(static_cast<std::size_t>(M) * n);
  sol.fp.resize(static_cast<std::size_t>(M) * n);
  sol.h.resize(M);
  sol.hp.resize(M);
  std::vector<double> x(n), yv(n), ww(n);
  for (int m = 0; m < M; ++m) {
    const auto& nsm = *picked[m];
    sol.r[m] = g.node(nsm.j);
    sol.h[m] = nsm.y[0];
    for (int i = 0; i < n; ++i) {
      sol.f[static_cast<std::size_t>(m) * n + i] = nsm.y[1 + i];
      sol.fp[static_cast<std::size_t>(m) * n + i] = nsm.y[1 + n + i];
      x[i] = nsm.y[1 + i];
      yv[i] = nsm.y[1 + n + i];
    }
    prof.derivatives(sol.r[m], ww);
    sol.hp[m] = eval_K(sol.h[m], x, yv, ww, s);
  }
  return res;
}

LocalShootResult theorem_recipe(double tau, double beta_param,
                                const ProblemData& p, const Grid& g,
                                double max_span) {
  if (tau < 0.0 || tau > 1.0) throw InvalidProblem("tau must lie in [0,1]");
  if (!(beta_param > 0.0)) throw InvalidProblem("beta_param must be positive");
  const int n = p.structure.n;

  OrbitData od;
  od.tau = tau;
  od.a_tau.resize(n);
  for (int i = 0; i < n; ++i)
    od.a_tau[i] = std::sqrt((1.0 - tau) * p.a[i] + tau * p.b[i]);

  double beta = beta_param;
  std::string trace;
  for (int k = 0; k <= 20; ++k, beta *= 2.0) {
    od.delta_tau.assign(n, beta);
    LocalCheck lc = check_local(od, p);
    trace += (k ? ", " : "") + std::to_string(beta) + " -> " +
             std::to_string(lc.lhs);
    if (lc.verdict) {
      LocalShootResult res = local_shoot(od, p, g, max_span);
      res.beta_used = beta;
      return res;
    }
  }
  throw RecipeFailed("no beta certified the orbit; lhs trace: " + trace);
}

namespace {

// 4th-order first derivative of uniformly spaced samples.
void fd_derivative(std::span<const double> v, double dh,
                   std::vector<double>& out) {
  const int M = static_cast<int>(v.size());
  out.assign(M, 0.0);
  const double w = 1.0 / (12.0 * dh);
  out[0] = w * (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]);
  out[1] = w * (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]);
  for (int j = 2; j < M - 2; ++j)
    out[j] = w * (v[j - 2] - 8 * v[j - 1] + 8 * v[j + 1] - v[j + 2]);
  out[M - 2] = -w * (-3 * v[M - 1] - 10 * v[M - 2] + 18 * v[M - 3] -
                     6 * v[M - 4] + v[M - 5]);
  out[M - 1] = -w * (-25 * v[M - 1] + 48 * v[M - 2] - 36 * v[M - 3] +
                     16 * v[M - 4] - 3 * v[M - 5]);
}

}  // namespace

ResidualReport verify(const MetricSolution& sol, const ProblemData& p) {
  const auto& s = p.structure;
  const int n = s.n;
  const int M = static_cast<int>(sol.r.size());
  if (M < 5) throw DomainError("solution covers fewer than 5 grid nodes");
  const double dh = sol.r[1] - sol.r[0];

  // f'' from the stored f' channel, h' from the stored h values: the check
  // never reuses the ODE right-hand sides.
  std::vector<double> fpp(static_cast<std::size_t>(M) * n), col(M), der;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < M; ++j)
      col[j] = sol.fp[static_cast<std::size_t>(j) * n + i];
    fd_derivative(col, dh, der);
    for (int j = 0; j < M; ++j)
      fpp[static_cast<std::size_t>(j) * n + i] = der[j];
  }
  std::vector<double> hp_fd;
  fd_derivative(sol.h, dh, hp_fd);

  ProfilesOnR prof(p);
  ResidualReport rep;
  rep.orbit_defect.assign(n, 0.0);
  rep.hartman_ok = sol.hartman_ok;
  rep.ball_ok = sol.ball_ok;
  rep.ball_norm = sol.ball_norm;

  std::vector<double> sigma_bar(M), phi(n);
  MetricJet jet;
  jet.f.resize(n);
  jet.fp.resize(n);
  jet.fpp.resize(n);
  for (int j = 0; j < M; ++j) {
    jet.h = sol.h[j];
    jet.hp = hp_fd[j];
    for (int i = 0; i < n; ++i) {
      jet.f[i] = sol.f[static_cast<std::size_t>(j) * n + i];
      jet.fp[i] = sol.fp[static_cast<std::size_t>(j) * n + i];
      jet.fpp[i] = fpp[static_cast<std::size_t>(j) * n + i];
    }
    RicciComponents rc = ricci_components(jet, s);
    sigma_bar[j] = rc.sigma_bar;
    rep.max_sigma_defect =
        std::max(rep.max_sigma_defect, std::fabs(rc.sigma_bar - 1.0));
    prof.values(sol.r[j], phi);
    for (int i = 0; i < n; ++i)
      rep.orbit_defect[i] =
          std::max(rep.orbit_defect[i], std::fabs(rc.orbit[i] - phi[i]));
  }
  for (int i = 0; i < n; ++i)
    rep.max_orbit_defect = std::max(rep.max_orbit_defect, rep.orbit_defect[i]);

  std::vector<double> sigma_bar_p, phip(n);
  fd_derivative(sigma_bar, dh, sigma_bar_p);
  for (int j = 0; j < M; ++j) {
    jet.h = sol.h[j];
    jet.hp = hp_fd[j];
    for (int i = 0; i < n; ++i) {
      jet.f[i] = sol.f[static_cast<std::size_t>(j) * n + i];
      jet.fp[i] = sol.fp[static_cast<std::size_t>(j) * n + i];
    }
    prof.derivatives(sol.r[j], phip);
    rep.max_bianchi = std::max(
        rep.max_bianchi,
        std::fabs(bianchi_residual(jet, sigma_bar[j], sigma_bar_p[j], phip, s)));
  }

  const double node_tol = 1e-9 * std::max(p.sigma, 1.0);
  if (std::fabs(sol.r.front()) <= node_tol)
    for (int i = 0; i < n; ++i)
      rep.boundary_err_a = std::max(rep.boundary_err_a,
                                    std::fabs(sol.f[i] - p.a[i]));
  if (std::fabs(sol.r.back() - p.sigma) <= node_tol)
    for (int i = 0; i < n; ++i)
      rep.boundary_err_b = std::max(
          rep.boundary_err_b,
          std::fabs(sol.f[static_cast<std::size_t>(M - 1) * n + i] - p.b[i]));

  // Head identity H1(f, f') = h^2 H2(f, phi) at the left edge.
  {
    std::vector<double> f0(n), fp0(n);
    for (int i = 0; i < n; ++i) {
      f0[i] = sol.f[i];
      fp0[i] = sol.fp[i];
    }
    prof.values(sol.r.front(), phi);
    rep.bc_h_defect = std::fabs(eval_H1(f0, fp0, s) -
                                sol.h[0] * sol.h[0] * eval_H2(f0, phi, s));
  }

  rep.sigma_propagation_ok =
      rep.max_sigma_defect <=
      10.0 * (rep.max_orbit_defect + rep.max_bianchi + 1e-9);
  return rep;
}

double grid_convergence_ratio(const ResidualReport& coarse,
                              const ResidualReport& fine) {
  double c = coarse.max_sigma_defect + coarse.max_orbit_defect;
  double f = fine.max_sigma_defect + fine.max_orbit_defect;
  return std::min(c / std::max(f, 1e-300), 1e6);
}

}  // namespace ricci

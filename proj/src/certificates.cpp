#include "ricci/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"

namespace ricci {

std::string to_string(CertificateMode m) {
  switch (m) {
    case CertificateMode::Standard:
      return "standard";
    case CertificateMode::Abelian:
      return "abelian";
    case CertificateMode::Indefinite:
      return "indefinite";
  }
  return "?";
}

double compute_rho0(double w1, double w2, const HomogeneousStructure& s,
                    const BoundsEnvelope& env, CertificateMode mode) {
  if (mode == CertificateMode::Abelian) return env.rho_bar;
  double acc = 0.0;
  const double q2 = w2 * w2, p2 = w1 * w1;
  const double q6 = q2 * q2 * q2, p6 = p2 * p2 * p2;
  for (int k = 0; k < s.n; ++k) {
    double term = s.beta[k] * q2 / (2.0 * p2);
    for (int l = 0; l < s.n; ++l)
      for (int m = 0; m < s.n; ++m)
        term += s.gamma_at(k, l, m) * q6 / (4.0 * p6);
    acc += s.dims[k] * term;
  }
  return 2.0 * acc;
}

std::pair<double, double> compute_rho1_sigma1(double alpha, double w1,
                                              double w2, double rho0_val,
                                              const HomogeneousStructure& s) {
  if (!(rho0_val > 0.0))
    throw DegenerateCertificate(
        "rho0 <= 0; an all-zero beta/gamma structure requires abelian mode");
  double inner = 0.0;
  for (int k = 0; k < s.n; ++k) {
    double term = alpha / (w1 * w1);
    for (int l = 0; l < s.n; ++l)
      for (int m = 0; m < s.n; ++m) {
        double w24 = w2 * w2 * w2 * w2;
        double w16 = w1 * w1 * w1 * w1 * w1 * w1;
        term += s.gamma_at(k, l, m) * w24 / (2.0 * w16);
      }
    inner += s.dims[k] * term;
  }
  double rho1 = std::max(4.0 * std::sqrt(inner),
                         2.25 / std::sqrt(rho0_val / (2.0 * w2 * w2)));
  const int d = s.total_dim();
  double sigma1 = std::min(
      {1.0, w1 / (4.0 * d),
       2.0 * w1 * w1 /
           ((2.0 * rho1 * rho1 * w1 + rho1 * rho1 * rho1 * rho1) * (d - 1))});
  return {rho1, sigma1};
}

std::pair<std::vector<double>, double> compute_theta(
    double alpha, double w1, double w2, double rho1,
    const HomogeneousStructure& s) {
  const int d = s.total_dim();
  std::vector<double> theta_vec(s.n);
  double norm2 = 0.0;
  for (int i = 0; i < s.n; ++i) {
    double gsum = 0.0;
    for (int k = 0; k < s.n; ++k)
      for (int l = 0; l < s.n; ++l) gsum += s.gamma_at(i, k, l);
    double w24 = w2 * w2 * w2 * w2;
    double w15 = w1 * w1 * w1 * w1 * w1;
    double v = 4.0 * s.beta[i] * rho1 * rho1 / w1 +
               1536.0 * rho1 * rho1 * gsum * w24 / w15 + 2.0 * w1 +
               (2.0 * w1 + 2.0 * w1 * w1 + 8.0 * rho1 * rho1) * (d - 1) +
               8.0 * alpha * rho1 * rho1 / w1;
    theta_vec[i] = v;
    norm2 += v * v;
  }
  return {theta_vec, std::sqrt(norm2)};
}

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

LipschitzConstants estimate_lipschitz(const HomogeneousStructure& s,
                                      const BoundsEnvelope& env,
                                      double rho0_val, double rho1,
                                      double eps0,
                                      const SamplingOptions& opts) {
  const int n = s.n;
  double dz_cap = 0.0;
  for (int k = 0; k < n; ++k) dz_cap += s.dims[k] * env.alpha;
  if (dz_cap < rho0_val)
    throw EmptyBox("sum_k d_k z_k >= rho0 is infeasible within [0,alpha]^n");

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * unit(rng);
  };

  std::vector<double> x(n), y(n), z(n), w(n);
  double sup1 = 0.0;

  // theta_1: gradient bounds for H over its box. H depends on y only
  // through the products y_k y_l, which also yields the pairwise-product
  // form of the estimate.
  for (int it = 0; it < opts.points; ++it) {
    double dz = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = uniform(env.omega1, env.omega2);
      y[i] = uniform(-eps0, eps0);
      z[i] = uniform(0.0, env.alpha);
      dz += s.dims[i] * z[i];
    }
    if (dz < rho0_val) {
      // Move toward the all-alpha corner until the constraint is tight.
      double t = (rho0_val * (1.0 + 1e-12) - dz) / (dz_cap - dz);
      for (int i = 0; i < n; ++i) z[i] += t * (env.alpha - z[i]);
    }
    double h1 = eval_H1(x, y, s);
    double h2 = eval_H2(x, z, s);
    if (!(h1 > 0.0) || !(h2 > 0.0)) continue;  // outside H's domain
    double denom = 2.0 * std::sqrt(h1 * h2);

    double sfac = 0.0;
    for (int k = 0; k < n; ++k) sfac += s.dims[k] * y[k] / x[k];
    double g2 = 0.0;
    for (int j = 0; j < n; ++j) {
      double dH1 = -2.0 * sfac * s.dims[j] / x[j] +
                   2.0 * s.dims[j] * y[j] / (x[j] * x[j]);
      g2 += dH1 * dH1;
    }
    sup1 = std::max(sup1, std::sqrt(g2) / denom);

    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double coeff = -static_cast<double>(s.dims[k]) * s.dims[l] /
                       (x[k] * x[l]);
        if (k == l) coeff += s.dims[k] / (x[k] * x[k]);
        sup1 = std::max(sup1, std::fabs(coeff) / denom);
      }
  }

  // theta_2: K is Lipschitz in (p,x,y) uniformly over w.
  double sup2 = 0.0;
  for (int it = 0; it < opts.points; ++it) {
    double p = uniform(1.0 / (2.0 * rho1), 2.0 * rho1);
    for (int i = 0; i < n; ++i) {
      x[i] = uniform(env.omega1 / 2.0, 2.0 * env.omega2);
      y[i] = uniform(-eps0, eps0);
      w[i] = uniform(-1.0, 1.0);
    }
    double dKdp = 0.0, gx = 0.0, gy = 0.0;
    for (int i = 0; i < n; ++i) {
      dKdp += s.dims[i] * (y[i] / x[i] -
                           3.0 * p * p * w[i] / (2.0 * x[i] * x[i]));
      double dxi = s.dims[i] * (-p * y[i] / (x[i] * x[i]) +
                                p * p * p * w[i] / (x[i] * x[i] * x[i]));
      gx += dxi * dxi;
      double dyi = s.dims[i] * p / x[i];
      gy += dyi * dyi;
    }
    sup2 = std::max({sup2, std::fabs(dKdp), std::sqrt(gx), std::sqrt(gy)});
  }

  LipschitzConstants out;
  out.theta1 = opts.safety * sup1;
  out.theta2 = opts.safety * sup2;

  if (opts.estimate_theta3) {
    double sup3 = 0.0;
    std::vector<double> f0, f1;
    const double w1h = env.omega1 / 2.0;
    for (int it = 0; it < opts.points / 10 + 1; ++it) {
      double p = uniform(1.0 / (2.0 * rho1), 2.0 * rho1);
      for (int i = 0; i < n; ++i) {
        x[i] = uniform(w1h, 2.0 * env.omega2);
        y[i] = uniform(-w1h, w1h);
        z[i] = uniform(0.0, env.alpha);
        w[i] = uniform(-1.0, 1.0);
      }
      auto probe = [&](auto&& bump) {
        const double step = 1e-6;
        bump(step);
        eval_F_tilde(p, x, y, z, w, s, f1);
        bump(-2.0 * step);
        eval_F_tilde(p, x, y, z, w, s, f0);
        bump(step);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          double d = (f1[i] - f0[i]) / (2.0 * step);
          acc += d * d;
        }
        return acc;
      };
      double frob = probe([&](double dp) { p += dp; });
      for (int j = 0; j < n; ++j)
        frob = std::max(frob, probe([&, j](double dp) { x[j] += dp; }));
      for (int j = 0; j < n; ++j)
        frob = std::max(frob, probe([&, j](double dp) { y[j] += dp; }));
      sup3 = std::max(sup3, std::sqrt(frob));
    }
    out.theta3 = opts.safety * sup3;
  }
  return out;
}

SmallnessConstants compute_sigma0(double w1, int total_dim, double theta,
                                  double theta1, double theta2, double rho1,
                                  double sigma1, int n) {
  SmallnessConstants out;
  out.eps0 = w1 / (2.0 * total_dim);
  out.big_sigma = theta + theta1 * n * n * (theta + theta * theta) +
                  theta2 * (w1 + theta);
  out.sigma0 = std::min({sigma1, std::sqrt(w1 / theta), out.eps0 / theta,
                         w1 / (2.0 * out.big_sigma),
                         1.0 / (2.0 * rho1 * out.big_sigma)});
  return out;
}

CertificateReport check_global(const ProblemData& p, const BoundsEnvelope& env,
                               const SamplingOptions& opts,
                               const IndefiniteThresholds& thresholds,
                               int grid_points) {
  validate_problem(p, grid_points);
  const auto& s = p.structure;

  CertificateReport rep;
  rep.mode = p.sign_indefinite ? CertificateMode::Indefinite
             : s.abelian       ? CertificateMode::Abelian
                               : CertificateMode::Standard;
  rep.c1 = env.c1;
  rep.c2 = env.c2;

  // The constant pipeline uses the abelian rho_bar whenever the structure
  // constants all vanish; otherwise the standard formula.
  CertificateMode pipeline_mode =
      s.abelian ? CertificateMode::Abelian : CertificateMode::Standard;
  rep.rho0 = compute_rho0(env.omega1, env.omega2, s, env, pipeline_mode);
  auto [rho1, sigma1] =
      compute_rho1_sigma1(env.alpha, env.omega1, env.omega2, rep.rho0, s);
  rep.rho1 = rho1;
  rep.sigma1 = sigma1;
  auto [theta_vec, theta] =
      compute_theta(env.alpha, env.omega1, env.omega2, rho1, s);
  rep.theta_vec = theta_vec;
  rep.theta = theta;
  rep.eps0 = env.omega1 / (2.0 * s.total_dim());
  auto lip = estimate_lipschitz(s, env, rep.rho0, rho1, rep.eps0, opts);
  rep.theta1 = lip.theta1;
  rep.theta2 = lip.theta2;
  rep.theta3 = lip.theta3;
  auto small = compute_sigma0(env.omega1, s.total_dim(), theta, lip.theta1,
                              lip.theta2, rho1, sigma1, s.n);
  rep.big_sigma = small.big_sigma;
  rep.sigma0 = small.sigma0;
  rep.ball_radius = p.sigma * p.sigma * rep.big_sigma;

  // Hypothesis sweeps over t in [0,1].
  double min_phi_sum = 0.0, min_indef_lhs = 0.0, max_deriv = 0.0;
  for (int j = 0; j < grid_points; ++j) {
    double t = static_cast<double>(j) / (grid_points - 1);
    double phi_sum = 0.0, indef = 0.0;
    for (int i = 0; i < s.n; ++i) {
      double v = p.phi[i].value(t);
      phi_sum += s.dims[i] * v;
      indef += s.dims[i] * (std::max(v, 0.0) / (env.omega2 * env.omega2) +
                            std::min(v, 0.0) / (env.omega1 * env.omega1));
      max_deriv = std::max(max_deriv, std::fabs(p.phi[i].derivative(t)));
    }
    if (j == 0 || phi_sum < min_phi_sum) min_phi_sum = phi_sum;
    if (j == 0 || indef < min_indef_lhs) min_indef_lhs = indef;
  }
  rep.indefinite_lhs = min_indef_lhs;

  const double sigma2 = p.sigma * p.sigma;
  double max_gap = 0.0;
  for (int i = 0; i < s.n; ++i)
    max_gap = std::max(max_gap, std::fabs(p.a[i] - p.b[i]));
  rep.boundary_gap_check = {max_gap <= sigma2, sigma2 - max_gap};
  rep.phi_derivative_check = {max_deriv <= sigma2, sigma2 - max_deriv};

  if (rep.mode == CertificateMode::Indefinite) {
    if (thresholds.rho_threshold) {
      rep.phi_sum_check = {min_indef_lhs > *thresholds.rho_threshold,
                           min_indef_lhs - *thresholds.rho_threshold};
    } else {
      rep.phi_sum_check = {false, 0.0};
      rep.conditional = true;
    }
    if (thresholds.sigma_threshold) {
      rep.sigma_check = {p.sigma < *thresholds.sigma_threshold,
                         *thresholds.sigma_threshold - p.sigma};
    } else {
      rep.sigma_check = {false, 0.0};
      rep.conditional = true;
    }
  } else {
    rep.phi_sum_check = {min_phi_sum > rep.rho0, min_phi_sum - rep.rho0};
    rep.sigma_check = {p.sigma < rep.sigma0, rep.sigma0 - p.sigma};
  }
  return rep;
}

LocalCheck check_local(const OrbitData& od, const ProblemData& p) {
  const auto& s = p.structure;
  validate_orbit_data(od, s.n);
  const auto& a = od.a_tau;
  const auto& del = od.delta_tau;
  double lhs = 0.0;
  for (int k = 0; k < s.n; ++k) {
    double ak2 = a[k] * a[k];
    double term = s.beta[k] / (2.0 * ak2);
    for (int l = 0; l < s.n; ++l)
      for (int m = 0; m < s.n; ++m) {
        double ak4 = ak2 * ak2;
        double al4 = a[l] * a[l] * a[l] * a[l];
        term += s.gamma_at(k, l, m) * (ak4 - 2.0 * al4) /
                (4.0 * ak2 * a[l] * a[l] * a[m] * a[m]);
      }
    for (int l = 0; l < s.n; ++l)
      term -= s.dims[l] * del[k] * del[l] / (ak2 * a[l] * a[l]);
    term += del[k] * del[k] / (ak2 * ak2);
    term -= p.phi[k].value(od.tau) / ak2;
    lhs += s.dims[k] * term;
  }
  return {lhs < 0.0, lhs};
}

}  // namespace ricci

#include "ricci/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ricci/errors.hpp"

namespace ricci {

SmoothProfile SmoothProfile::constant(double value) {
  SmoothProfile p;
  p.kind_ = Kind::Constant;
  p.coeffs_ = {value};
  return p;
}

SmoothProfile SmoothProfile::polynomial(std::vector<double> coeffs,
                                        double center) {
  if (coeffs.empty()) throw InvalidProblem("polynomial profile needs coefficients");
  SmoothProfile p;
  p.kind_ = Kind::Polynomial;
  p.coeffs_ = std::move(coeffs);
  p.center_ = center;
  return p;
}

SmoothProfile SmoothProfile::spline(std::vector<double> samples) {
  if (samples.size() < 2)
    throw InvalidProblem("spline profile needs at least 2 samples");
  SmoothProfile p;
  p.kind_ = Kind::Spline;
  const int n = static_cast<int>(samples.size());
  p.coeffs_ = std::move(samples);
  // Natural cubic spline second derivatives via the Thomas algorithm on the
  // uniform grid t_j = j/(n-1).
  p.second_derivs_.assign(n, 0.0);
  if (n > 2) {
    const double h = 1.0 / (n - 1);
    std::vector<double> diag(n - 2, 4.0), rhs(n - 2);
    for (int j = 1; j <= n - 2; ++j)
      rhs[j - 1] = 6.0 *
                   (p.coeffs_[j - 1] - 2.0 * p.coeffs_[j] + p.coeffs_[j + 1]) /
                   (h * h);
    for (int j = 1; j < n - 2; ++j) {
      double w = 1.0 / diag[j - 1];
      diag[j] -= w;
      rhs[j] -= w * rhs[j - 1];
    }
    for (int j = n - 3; j >= 0; --j) {
      double upper = (j + 1 < n - 2) ? p.second_derivs_[j + 2] : 0.0;
      p.second_derivs_[j + 1] = (rhs[j] - upper) / diag[j];
    }
  }
  return p;
}

double SmoothProfile::value(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return coeffs_[0];
    case Kind::Polynomial: {
      double acc = 0.0;
      const double u = t - center_;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * u + *it;
      return acc;
    }
    case Kind::Spline: {
      const int n = static_cast<int>(coeffs_.size());
      const double h = 1.0 / (n - 1);
      int j = std::clamp(static_cast<int>(std::floor(t * (n - 1))), 0, n - 2);
      double A = (h * (j + 1) - t) / h;
      double B = 1.0 - A;
      return A * coeffs_[j] + B * coeffs_[j + 1] +
             ((A * A * A - A) * second_derivs_[j] +
              (B * B * B - B) * second_derivs_[j + 1]) *
                 h * h / 6.0;
    }
  }
  return 0.0;
}

double SmoothProfile::derivative(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return 0.0;
    case Kind::Polynomial: {
      double acc = 0.0;
      const double u = t - center_;
      for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 1; --k)
        acc = acc * u + k * coeffs_[k];
      return acc;
    }
    case Kind::Spline: {
      const int n = static_cast<int>(coeffs_.size());
      const double h = 1.0 / (n - 1);
      int j = std::clamp(static_cast<int>(std::floor(t * (n - 1))), 0, n - 2);
      double A = (h * (j + 1) - t) / h;
      double B = 1.0 - A;
      return (coeffs_[j + 1] - coeffs_[j]) / h -
             (3.0 * A * A - 1.0) / 6.0 * h * second_derivs_[j] +
             (3.0 * B * B - 1.0) / 6.0 * h * second_derivs_[j + 1];
    }
  }
  return 0.0;
}

void validate_problem(const ProblemData& p, int grid_points) {
  validate_structure(p.structure);
  const int n = p.structure.n;
  if (static_cast<int>(p.phi.size()) != n)
    throw InvalidProblem("phi has wrong length");
  if (static_cast<int>(p.a.size()) != n || static_cast<int>(p.b.size()) != n)
    throw InvalidProblem("a or b has wrong length");
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
    throw InvalidProblem("sigma must be positive");
  for (int i = 0; i < n; ++i) {
    if (!(p.a[i] > 0.0)) throw InvalidProblem("a entries must be positive");
    if (!(p.b[i] > 0.0)) throw InvalidProblem("b entries must be positive");
  }
  if (!p.sign_indefinite) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < grid_points; ++j) {
        double t = static_cast<double>(j) / (grid_points - 1);
        if (!(p.phi[i].value(t) > 0.0))
          throw InvalidProblem("phi_" + std::to_string(i + 1) +
                               " is not strictly positive on [0,1]");
      }
  }
}

void validate_orbit_data(const OrbitData& od, int n) {
  if (static_cast<int>(od.a_tau.size()) != n ||
      static_cast<int>(od.delta_tau.size()) != n)
    throw InvalidProblem("orbit data vectors have wrong length");
  if (od.tau < 0.0 || od.tau > 1.0)
    throw InvalidProblem("tau must lie in [0,1]");
  for (double v : od.a_tau)
    if (!(v > 0.0)) throw InvalidProblem("a_tau entries must be positive");
}

BoundsEnvelope tightest_envelope(const ProblemData& p, double rho_bar,
                                 int grid_points) {
  validate_problem(p, grid_points);
  const int n = p.structure.n;
  BoundsEnvelope env;
  env.rho_bar = rho_bar;

  double alpha = 0.0, max_deriv = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < grid_points; ++j) {
      double t = static_cast<double>(j) / (grid_points - 1);
      double v = p.phi[i].value(t);
      alpha = std::max(alpha, p.sign_indefinite ? std::fabs(v) : v);
      max_deriv = std::max(max_deriv, std::fabs(p.phi[i].derivative(t)));
    }
  env.alpha = alpha;

  double w1 = p.a[0], w2 = p.a[0], gap = 0.0;
  for (int i = 0; i < n; ++i) {
    w1 = std::min({w1, p.a[i], p.b[i]});
    w2 = std::max({w2, p.a[i], p.b[i]});
    gap = std::max(gap, std::fabs(p.a[i] - p.b[i]));
  }
  env.omega1 = w1;
  env.omega2 = w2;
  env.c1 = std::max(gap / (p.sigma * p.sigma), 1e-30);
  env.c2 = std::max(max_deriv / (p.sigma * p.sigma), 1e-30);
  return env;
}

ProfilesOnR::ProfilesOnR(const ProblemData& p)
    : profiles_(p.phi), sigma_(p.sigma) {}

double ProfilesOnR::check(double r) const {
  const double slack = 1e-12 * std::max(1.0, sigma_);
  if (r < -slack || r > sigma_ + slack)
    throw DomainError("r=" + std::to_string(r) + " outside [0, sigma]");
  return std::clamp(r / sigma_, 0.0, 1.0);
}

double ProfilesOnR::value(int i, double r) const {
  return profiles_[i].value(check(r));
}

double ProfilesOnR::derivative(int i, double r) const {
  return profiles_[i].derivative(check(r)) / sigma_;
}

void ProfilesOnR::values(double r, std::vector<double>& out) const {
  double t = check(r);
  out.resize(profiles_.size());
  for (std::size_t i = 0; i < profiles_.size(); ++i)
    out[i] = profiles_[i].value(t);
}

void ProfilesOnR::derivatives(double r, std::vector<double>& out) const {
  double t = check(r);
  out.resize(profiles_.size());
  for (std::size_t i = 0; i < profiles_.size(); ++i)
    out[i] = profiles_[i].derivative(t) / sigma_;
}

}  // namespace ricci

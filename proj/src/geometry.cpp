#include "ricci/geometry.hpp"

#include <cmath>

#include "ricci/errors.hpp"

namespace ricci {

namespace {

void require_positive(std::span<const double> x) {
  for (double v : x)
    if (!(v > 0.0)) throw DomainError("x entries must be positive");
}

}  // namespace

double eval_H1(std::span<const double> x, std::span<const double> y,
               const HomogeneousStructure& s) {
  require_positive(x);
  double acc = 0.0;
  for (int k = 0; k < s.n; ++k) {
    double inner = 0.0;
    for (int l = 0; l < s.n; ++l)
      inner += s.dims[l] * y[k] * y[l] / (x[k] * x[l]);
    acc += s.dims[k] * (inner - y[k] * y[k] / (x[k] * x[k]));
  }
  return 1.0 - acc;
}

double eval_H2(std::span<const double> x, std::span<const double> z,
               const HomogeneousStructure& s) {
  require_positive(x);
  double acc = 0.0;
  for (int k = 0; k < s.n; ++k) {
    double term = z[k] / (x[k] * x[k]) - s.beta[k] / (2.0 * x[k] * x[k]);
    for (int l = 0; l < s.n; ++l)
      for (int m = 0; m < s.n; ++m) {
        double xk4 = x[k] * x[k] * x[k] * x[k];
        double xl4 = x[l] * x[l] * x[l] * x[l];
        term -= s.gamma_at(k, l, m) * (xk4 - 2.0 * xl4) /
                (4.0 * x[k] * x[k] * x[l] * x[l] * x[m] * x[m]);
      }
    acc += s.dims[k] * term;
  }
  return acc;
}

double eval_H(std::span<const double> x, std::span<const double> y,
              std::span<const double> z, const HomogeneousStructure& s) {
  double h1 = eval_H1(x, y, s);
  double h2 = eval_H2(x, z, s);
  if (h2 == 0.0 || h1 / h2 < 0.0) throw HUndefined(h1, h2);
  return std::sqrt(h1 / h2);
}

void eval_F(double p, double q, std::span<const double> x,
            std::span<const double> y, std::span<const double> z,
            const HomogeneousStructure& s, std::vector<double>& out) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  require_positive(x);
  out.resize(s.n);
  double ysum = 0.0;
  for (int k = 0; k < s.n; ++k) ysum += s.dims[k] * y[k] / x[k];
  for (int i = 0; i < s.n; ++i) {
    double v = s.beta[i] * p * p / (2.0 * x[i]);
    for (int k = 0; k < s.n; ++k)
      for (int l = 0; l < s.n; ++l) {
        double xi4 = x[i] * x[i] * x[i] * x[i];
        double xk4 = x[k] * x[k] * x[k] * x[k];
        v += p * p * s.gamma_at(i, k, l) * (xi4 - 2.0 * xk4) /
             (4.0 * x[i] * x[k] * x[k] * x[l] * x[l]);
      }
    v += -y[i] * ysum + y[i] * y[i] / x[i] + q * y[i] / p -
         p * p * z[i] / x[i];
    out[i] = v;
  }
}

double eval_K(double p, std::span<const double> x, std::span<const double> y,
              std::span<const double> w, const HomogeneousStructure& s) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  require_positive(x);
  double acc = 0.0;
  for (int i = 0; i < s.n; ++i)
    acc += s.dims[i] *
           (p * y[i] / x[i] - p * p * p * w[i] / (2.0 * x[i] * x[i]));
  return acc;
}

void eval_F_tilde(double p, std::span<const double> x,
                  std::span<const double> y, std::span<const double> z,
                  std::span<const double> w, const HomogeneousStructure& s,
                  std::vector<double>& out) {
  eval_F(p, eval_K(p, x, y, w, s), x, y, z, s, out);
}

RicciComponents ricci_components(const MetricJet& j,
                                 const HomogeneousStructure& s) {
  if (!(j.h > 0.0)) throw DomainError("h must be positive");
  require_positive(j.f);
  RicciComponents out;
  out.orbit.resize(s.n);

  double sb = 0.0;
  for (int k = 0; k < s.n; ++k)
    sb += s.dims[k] *
          (j.fpp[k] / j.f[k] - j.hp * j.fp[k] / (j.h * j.f[k]));
  out.sigma_bar = -sb;

  double fsum = 0.0;
  for (int k = 0; k < s.n; ++k)
    fsum += s.dims[k] * j.fp[k] / (j.h * j.f[k]);

  const double h2 = j.h * j.h;
  for (int i = 0; i < s.n; ++i) {
    double v = s.beta[i] / 2.0;
    for (int k = 0; k < s.n; ++k)
      for (int l = 0; l < s.n; ++l) {
        double fi4 = j.f[i] * j.f[i] * j.f[i] * j.f[i];
        double fk4 = j.f[k] * j.f[k] * j.f[k] * j.f[k];
        v += s.gamma_at(i, k, l) * (fi4 - 2.0 * fk4) /
             (4.0 * j.f[k] * j.f[k] * j.f[l] * j.f[l]);
      }
    v += -(j.f[i] * j.fp[i] / j.h) * fsum + j.fp[i] * j.fp[i] / h2 -
         j.f[i] * j.fpp[i] / h2 + j.f[i] * j.hp * j.fp[i] / (h2 * j.h);
    out.orbit[i] = v;
  }
  return out;
}

double bianchi_residual(const MetricJet& j, double sigma_bar,
                        double sigma_bar_p, std::span<const double> phi_p,
                        const HomogeneousStructure& s) {
  if (!(j.h > 0.0)) throw DomainError("h must be positive");
  require_positive(j.f);
  const double h2 = j.h * j.h;
  double acc = sigma_bar_p / (2.0 * h2) - sigma_bar * j.hp / (h2 * j.h);
  for (int k = 0; k < s.n; ++k)
    acc -= s.dims[k] * (phi_p[k] / (2.0 * j.f[k] * j.f[k]) -
                        sigma_bar * j.fp[k] / (h2 * j.f[k]));
  return acc;
}

}  // namespace ricci

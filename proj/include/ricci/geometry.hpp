#ifndef RICCI_GEOMETRY_HPP
#define RICCI_GEOMETRY_HPP

#include <span>
#include <vector>

#include "ricci/structure.hpp"

namespace ricci {

/// 2-jet of the metric functions (h, f_1..f_n) at one value of r.
struct MetricJet {
  double h = 1.0;
  double hp = 0.0;
  std::vector<double> f;
  std::vector<double> fp;
  std::vector<double> fpp;
};

/// Ricci components of the invariant metric: the dr(x)dr coefficient and
/// the coefficient of Q on each module.
struct RicciComponents {
  double sigma_bar = 0.0;
  std::vector<double> orbit;
};

// Pointwise algebraic kernels. All are pure functions; x entries must be
// strictly positive (DomainError otherwise).

double eval_H1(std::span<const double> x, std::span<const double> y,
               const HomogeneousStructure& s);

double eval_H2(std::span<const double> x, std::span<const double> z,
               const HomogeneousStructure& s);

/// H(x,y,z) = sqrt(H1(x,y)/H2(x,z)). Throws HUndefined carrying (H1,H2)
/// when H2 = 0 or the ratio is negative; that signals hypothesis failure
/// in the caller's data, not a fault.
double eval_H(std::span<const double> x, std::span<const double> y,
              std::span<const double> z, const HomogeneousStructure& s);

void eval_F(double p, double q, std::span<const double> x,
            std::span<const double> y, std::span<const double> z,
            const HomogeneousStructure& s, std::vector<double>& out);

double eval_K(double p, std::span<const double> x, std::span<const double> y,
              std::span<const double> w, const HomogeneousStructure& s);

/// F with the first-order transverse coefficient eliminated through K:
/// F_tilde(p,x,y,z,w) = F(p, K(p,x,y,w), x, y, z).
void eval_F_tilde(double p, std::span<const double> x,
                  std::span<const double> y, std::span<const double> z,
                  std::span<const double> w, const HomogeneousStructure& s,
                  std::vector<double>& out);

RicciComponents ricci_components(const MetricJet& j,
                                 const HomogeneousStructure& s);

/// Residual of the contracted-second-Bianchi identity at one point; zero
/// iff the identity holds there.
double bianchi_residual(const MetricJet& j, double sigma_bar,
                        double sigma_bar_p, std::span<const double> phi_p,
                        const HomogeneousStructure& s);

}  // namespace ricci

#endif

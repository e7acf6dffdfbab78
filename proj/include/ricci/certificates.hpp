#ifndef RICCI_CERTIFICATES_HPP
#define RICCI_CERTIFICATES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ricci/problem.hpp"
#include "ricci/structure.hpp"

namespace ricci {

enum class CertificateMode { Standard, Abelian, Indefinite };

std::string to_string(CertificateMode m);

struct HypothesisCheck {
  bool verdict = false;
  double margin = 0.0;  // positive means the inequality holds by this much
};

/// All explicit constants of the sufficiency argument together with the
/// hypothesis verdicts.
struct CertificateReport {
  CertificateMode mode = CertificateMode::Standard;
  double rho0 = 0.0;
  double rho1 = 0.0;
  double sigma1 = 0.0;
  double eps0 = 0.0;
  std::vector<double> theta_vec;
  double theta = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::optional<double> theta3;
  double big_sigma = 0.0;
  double sigma0 = 0.0;
  double ball_radius = 0.0;  // L = sigma^2 * big_sigma

  HypothesisCheck phi_sum_check;
  HypothesisCheck sigma_check;
  HypothesisCheck boundary_gap_check;
  HypothesisCheck phi_derivative_check;
  double indefinite_lhs = 0.0;  // indefinite mode only
  bool conditional = false;     // indefinite checks lack a built-in threshold
  double c1 = 0.0;
  double c2 = 0.0;

  bool all_pass() const {
    return phi_sum_check.verdict && sigma_check.verdict &&
           boundary_gap_check.verdict && phi_derivative_check.verdict;
  }
};

struct SamplingOptions {
  std::uint64_t seed = 20240817;
  int points = 100000;
  bool estimate_theta3 = false;
  double safety = 1.5;
};

/// rho_0(w1,w2); in abelian mode the free constant rho_bar is used instead.
double compute_rho0(double w1, double w2, const HomogeneousStructure& s,
                    const BoundsEnvelope& env, CertificateMode mode);

/// (rho_1, sigma_1). Throws DegenerateCertificate when rho0_val <= 0.
std::pair<double, double> compute_rho1_sigma1(double alpha, double w1,
                                              double w2, double rho0_val,
                                              const HomogeneousStructure& s);

/// (Theta_1..Theta_n, Theta).
std::pair<std::vector<double>, double> compute_theta(
    double alpha, double w1, double w2, double rho1,
    const HomogeneousStructure& s);

struct LipschitzConstants {
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::optional<double> theta3;
};

/// Numerically estimated Lipschitz constants of H, K (and optionally
/// F_tilde) over their hypothesis boxes, by sampling partial derivatives
/// at quasi-random points and applying a safety factor. Deterministic for
/// a fixed seed. Throws EmptyBox when the z-box constraint is infeasible.
LipschitzConstants estimate_lipschitz(const HomogeneousStructure& s,
                                      const BoundsEnvelope& env,
                                      double rho0_val, double rho1,
                                      double eps0,
                                      const SamplingOptions& opts = {});

struct SmallnessConstants {
  double eps0 = 0.0;
  double big_sigma = 0.0;
  double sigma0 = 0.0;
};

SmallnessConstants compute_sigma0(double w1, int total_dim, double theta,
                                  double theta1, double theta2, double rho1,
                                  double sigma1, int n);

struct IndefiniteThresholds {
  std::optional<double> rho_threshold;
  std::optional<double> sigma_threshold;
};

/// Runs the whole constant pipeline and evaluates the hypothesis checks on
/// a grid of `grid_points` profile samples.
CertificateReport check_global(const ProblemData& p, const BoundsEnvelope& env,
                               const SamplingOptions& opts = {},
                               const IndefiniteThresholds& thresholds = {},
                               int grid_points = 2001);

struct LocalCheck {
  bool verdict = false;
  double lhs = 0.0;
};

/// Evaluates the local solvability inequality for the given orbit data.
LocalCheck check_local(const OrbitData& od, const ProblemData& p);

}  // namespace ricci

#endif

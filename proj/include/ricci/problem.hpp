#ifndef RICCI_PROBLEM_HPP
#define RICCI_PROBLEM_HPP

#include <vector>

#include "ricci/structure.hpp"

namespace ricci {

/// A smooth scalar function on [0,1] with exact value and first-derivative
/// evaluation. One of: constant, polynomial (optionally centered), or a
/// natural cubic spline through uniformly spaced samples.
class SmoothProfile {
 public:
  static SmoothProfile constant(double value);
  static SmoothProfile polynomial(std::vector<double> coeffs,
                                  double center = 0.0);
  static SmoothProfile spline(std::vector<double> samples);

  double value(double t) const;
  double derivative(double t) const;

  bool is_constant() const { return kind_ == Kind::Constant; }

 private:
  enum class Kind { Constant, Polynomial, Spline };
  Kind kind_ = Kind::Constant;
  std::vector<double> coeffs_;  // polynomial coefficients or spline samples
  double center_ = 0.0;
  std::vector<double> second_derivs_;  // spline only

  SmoothProfile() = default;
};

/// The prescribed data of the boundary-value problem: the transverse
/// length sigma, the orbit-tensor profiles phi_i on [0,1], and the
/// boundary coefficient vectors a, b.
struct ProblemData {
  HomogeneousStructure structure;
  double sigma = 0.0;
  std::vector<SmoothProfile> phi;  // size n, on [0,1]
  std::vector<double> a;           // size n, positive
  std::vector<double> b;           // size n, positive
  bool sign_indefinite = false;
};

/// Per-orbit data of the local problem: the orbit parameter, the metric
/// coefficients of R^tau, and the second-fundamental-form coefficients.
struct OrbitData {
  double tau = 0.0;
  std::vector<double> a_tau;
  std::vector<double> delta_tau;
};

/// Hypothesis constants: the profile bound alpha, the boundary bounds
/// omega_1 <= a_i, b_i <= omega_2, the scalings c_1, c_2, and the free
/// abelian-mode constant rho_bar.
struct BoundsEnvelope {
  double alpha = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double rho_bar = 1.0;
};

/// Throws InvalidProblem if any ProblemData invariant fails. Positivity of
/// the profiles is checked on a grid of `grid_points` samples unless
/// sign_indefinite is set.
void validate_problem(const ProblemData& p, int grid_points = 2001);

void validate_orbit_data(const OrbitData& od, int n);

/// Extracts the tightest envelope the data admits: alpha from the profile
/// maxima, omega_1/omega_2 from a and b, c_1 and c_2 from the boundary gap
/// and profile derivatives (clamped up from zero to stay positive).
BoundsEnvelope tightest_envelope(const ProblemData& p, double rho_bar = 1.0,
                                 int grid_points = 2001);

/// Evaluators of phi_i and phi_i' in the coordinate r = sigma t on
/// [0, sigma].
class ProfilesOnR {
 public:
  explicit ProfilesOnR(const ProblemData& p);
  double value(int i, double r) const;
  double derivative(int i, double r) const;
  void values(double r, std::vector<double>& out) const;
  void derivatives(double r, std::vector<double>& out) const;
  int size() const { return static_cast<int>(profiles_.size()); }

 private:
  std::vector<SmoothProfile> profiles_;
  double sigma_;
  double check(double r) const;
};

}  // namespace ricci

#endif

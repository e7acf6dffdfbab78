#ifndef RICCI_ERRORS_HPP
#define RICCI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ricci {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidStructure : Error {
  explicit InvalidStructure(const std::string& detail)
      : Error("invalid structure: " + detail) {}
};

struct NotIsotypic : Error {
  double spread;
  explicit NotIsotypic(double spread_, const std::string& detail)
      : Error("module assignment does not define constants: " + detail),
        spread(spread_) {}
};

struct InvalidProblem : Error {
  explicit InvalidProblem(const std::string& detail)
      : Error("invalid problem data: " + detail) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& detail)
      : Error("domain error: " + detail) {}
};

/// H(x,y,z) probed outside its domain. Signals hypothesis failure, not a bug.
struct HUndefined : Error {
  double h1;
  double h2;
  HUndefined(double h1_, double h2_)
      : Error("H undefined: H1=" + std::to_string(h1_) +
              " H2=" + std::to_string(h2_)),
        h1(h1_),
        h2(h2_) {}
};

struct DegenerateCertificate : Error {
  explicit DegenerateCertificate(const std::string& detail)
      : Error("degenerate certificate: " + detail) {}
};

struct EmptyBox : Error {
  explicit EmptyBox(const std::string& detail)
      : Error("empty sampling box: " + detail) {}
};

struct NoConvergence : Error {
  int iterations;
  double last_delta;
  NoConvergence(int iters, double delta)
      : Error("fixed-point iteration did not converge after " +
              std::to_string(iters) +
              " iterations, last delta=" + std::to_string(delta)),
        iterations(iters),
        last_delta(delta) {}
};

struct NonPositive : Error {
  explicit NonPositive(const std::string& detail)
      : Error("positivity lost: " + detail) {}
};

struct BoundViolation : Error {
  explicit BoundViolation(const std::string& detail)
      : Error("bound violated: " + detail) {}
};

struct LocalHypothesisFailed : Error {
  double lhs;
  explicit LocalHypothesisFailed(double lhs_)
      : Error("local solvability inequality fails: lhs=" +
              std::to_string(lhs_)),
        lhs(lhs_) {}
};

struct RecipeFailed : Error {
  explicit RecipeFailed(const std::string& detail)
      : Error("interpolated-orbit recipe failed: " + detail) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& detail)
      : Error("parse error: " + detail) {}
};

}  // namespace ricci

#endif

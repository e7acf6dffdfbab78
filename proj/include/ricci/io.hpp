#ifndef RICCI_IO_HPP
#define RICCI_IO_HPP

#include <optional>
#include <string>

#include "ricci/certificates.hpp"
#include "ricci/problem.hpp"
#include "ricci/solver.hpp"
#include "ricci/structure.hpp"

namespace ricci {

/// Everything a run needs, parsed from one JSON config file.
struct RunConfig {
  std::optional<HomogeneousStructure> structure;  // inline constants
  std::optional<BracketTable> bracket_table;      // or raw bracket data
  ProblemData problem;                            // structure filled in later
  bool has_problem = false;

  double rho_bar = 1.0;
  IndefiniteThresholds thresholds;

  int grid_n = 2001;
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 1.0;
  SamplingOptions sampling;

  // local subproblem
  std::optional<double> tau;
  std::optional<std::vector<double>> a_tau;
  std::optional<std::vector<double>> delta;
  std::optional<double> beta_param;
  double max_span = 1.0;
};

/// Parses a config file. Throws ParseError on malformed or inconsistent
/// input; the resulting problem.structure is resolved (from the inline
/// constants or by compute_constants on the bracket table).
RunConfig load_config(const std::string& path);

/// Solution CSV: header `r,h,hp,f1..fn,fp1..fpn`, one row per node, floats
/// with 17 significant digits. Writes are atomic (temp file + rename).
void write_solution_csv(const MetricSolution& sol, const std::string& path);

/// Reads a solution CSV back. Throws ParseError on malformed or truncated
/// input; the grid is reconstructed from the row spacing.
MetricSolution read_solution_csv(const std::string& path, double sigma);

std::string certificate_to_json(const CertificateReport& rep);
std::string residuals_to_json(const ResidualReport& rep);
std::string constants_to_json(const ConstantsResult& res);

void write_text_atomic(const std::string& text, const std::string& path);

}  // namespace ricci

#endif

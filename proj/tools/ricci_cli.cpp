#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ricci/certificates.hpp"
#include "ricci/errors.hpp"
#include "ricci/io.hpp"
#include "ricci/problem.hpp"
#include "ricci/solver.hpp"
#include "ricci/structure.hpp"

// Exit codes: 0 ok, 2 invalid input, 3 certificate/hypothesis failure,
// 4 non-convergence, 5 residual-target miss, 6 breakdown.
namespace {

constexpr int kOk = 0;
constexpr int kInvalidInput = 2;
constexpr int kHypothesisFailure = 3;
constexpr int kNoConvergence = 4;
constexpr int kResidualMiss = 5;
constexpr int kBreakdown = 6;

constexpr double kResidualTarget = 1e-6;

struct Options {
  std::string config;
  std::string out_dir = ".";
  std::optional<int> grid;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::string solution;  // verify only
};

ricci::RunConfig load(const Options& opt) {
  ricci::RunConfig cfg = ricci::load_config(opt.config);
  if (opt.grid) cfg.grid_n = *opt.grid;
  if (opt.seed) cfg.sampling.seed = *opt.seed;
  if (opt.tol) cfg.tol = *opt.tol;
  if (opt.max_iter) cfg.max_iter = *opt.max_iter;
  return cfg;
}

void emit(const std::string& text, const std::string& dir,
          const std::string& name) {
  std::filesystem::create_directories(dir);
  ricci::write_text_atomic(text, (std::filesystem::path(dir) / name).string());
  std::cout << text;
}

int cmd_constants(const Options& opt) {
  ricci::RunConfig cfg = load(opt);
  ricci::ConstantsResult res;
  if (cfg.bracket_table) {
    ricci::validate_bracket_table(*cfg.bracket_table);
    res = ricci::compute_constants(*cfg.bracket_table);
  } else {
    res.structure = ricci::validate_structure(*cfg.structure);
  }
  emit(ricci::constants_to_json(res), opt.out_dir, "constants.json");
  return kOk;
}

ricci::CertificateReport run_check(const ricci::RunConfig& cfg) {
  if (!cfg.has_problem) throw ricci::InvalidProblem("config has no problem section");
  ricci::BoundsEnvelope env = ricci::tightest_envelope(cfg.problem, cfg.rho_bar);
  return ricci::check_global(cfg.problem, env, cfg.sampling, cfg.thresholds);
}

int cmd_check(const Options& opt) {
  ricci::RunConfig cfg = load(opt);
  ricci::CertificateReport rep = run_check(cfg);
  emit(ricci::certificate_to_json(rep), opt.out_dir, "certificate.json");
  return rep.all_pass() ? kOk : kHypothesisFailure;
}

int cmd_solve_global(const Options& opt) {
  ricci::RunConfig cfg = load(opt);
  ricci::CertificateReport cert = run_check(cfg);
  ricci::Grid g(cfg.grid_n, cfg.problem.sigma);
  ricci::MetricSolution sol = ricci::fixed_point_solve(
      cfg.problem, cert, g, cfg.tol, cfg.max_iter, cfg.damping);
  ricci::ResidualReport rep = ricci::verify(sol, cfg.problem);

  // Order check against the refined grid.
  ricci::Grid g2(2 * cfg.grid_n - 1, cfg.problem.sigma);
  ricci::MetricSolution sol2 = ricci::fixed_point_solve(
      cfg.problem, cert, g2, cfg.tol, cfg.max_iter, cfg.damping);
  rep.grid_ratio =
      ricci::grid_convergence_ratio(rep, ricci::verify(sol2, cfg.problem));

  std::filesystem::create_directories(opt.out_dir);
  ricci::write_solution_csv(
      sol, (std::filesystem::path(opt.out_dir) / "solution.csv").string());
  emit(ricci::certificate_to_json(cert), opt.out_dir, "certificate.json");
  emit(ricci::residuals_to_json(rep), opt.out_dir, "report.json");
  bool ok = rep.max_sigma_defect <= kResidualTarget &&
            rep.max_orbit_defect <= kResidualTarget;
  return ok ? kOk : kResidualMiss;
}

int cmd_solve_local(const Options& opt) {
  ricci::RunConfig cfg = load(opt);
  if (!cfg.has_problem) throw ricci::InvalidProblem("config has no problem section");
  if (!cfg.tau) throw ricci::InvalidProblem("local.tau is required");
  ricci::Grid g(cfg.grid_n, cfg.problem.sigma);

  ricci::LocalShootResult res;
  if (cfg.delta) {
    ricci::OrbitData od;
    od.tau = *cfg.tau;
    od.a_tau = cfg.a_tau ? *cfg.a_tau : cfg.problem.a;
    od.delta_tau = *cfg.delta;
    res = ricci::local_shoot(od, cfg.problem, g, cfg.max_span);
  } else {
    res = ricci::theorem_recipe(*cfg.tau, cfg.beta_param.value_or(1.0),
                                cfg.problem, g, cfg.max_span);
  }

  nlohmann::json j;
  j["tau"] = res.sol.tau;
  j["kappa"] = res.kappa;
  j["breakdown"] = res.breakdown;
  j["h_at_tau"] = res.sol.h_at_tau;
  if (res.beta_used > 0.0) j["beta_used"] = res.beta_used;
  if (res.sol.r.size() >= 5) {
    ricci::ResidualReport rep = ricci::verify(res.sol, cfg.problem);
    j["max_sigma_defect"] = rep.max_sigma_defect;
    j["max_orbit_defect"] = rep.max_orbit_defect;
    j["max_bianchi"] = rep.max_bianchi;
  }
  std::filesystem::create_directories(opt.out_dir);
  ricci::write_solution_csv(
      res.sol, (std::filesystem::path(opt.out_dir) / "solution.csv").string());
  emit(j.dump(2) + "\n", opt.out_dir, "report.json");
  return res.breakdown ? kBreakdown : kOk;
}

int cmd_verify(const Options& opt) {
  ricci::RunConfig cfg = load(opt);
  if (!cfg.has_problem) throw ricci::InvalidProblem("config has no problem section");
  ricci::MetricSolution sol =
      ricci::read_solution_csv(opt.solution, cfg.problem.sigma);
  ricci::ResidualReport rep = ricci::verify(sol, cfg.problem);
  emit(ricci::residuals_to_json(rep), opt.out_dir, "report.json");
  bool ok = rep.max_sigma_defect <= kResidualTarget &&
            rep.max_orbit_defect <= kResidualTarget;
  return ok ? kOk : kResidualMiss;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"G-invariant prescribed-Ricci boundary-value solver"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    sub->add_option("--config", opt.config, "JSON config file")
        ->required(needs_config);
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--grid", opt.grid, "grid size N (odd)");
    sub->add_option("--seed", opt.seed, "sampling seed");
    sub->add_option("--tol", opt.tol, "fixed-point tolerance");
    sub->add_option("--max-iter", opt.max_iter, "iteration cap");
  };

  auto* constants = app.add_subcommand("constants", "structure constants");
  add_common(constants);
  auto* check = app.add_subcommand("check", "certificate pipeline");
  add_common(check);
  auto* solve_global = app.add_subcommand("solve-global", "fixed-point solve");
  add_common(solve_global);
  auto* solve_local = app.add_subcommand("solve-local", "local shooting");
  add_common(solve_local);
  auto* verify = app.add_subcommand("verify", "re-verify a solution CSV");
  add_common(verify);
  verify->add_option("--solution", opt.solution, "solution CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kInvalidInput;
  }

  try {
    if (constants->parsed()) return cmd_constants(opt);
    if (check->parsed()) return cmd_check(opt);
    if (solve_global->parsed()) return cmd_solve_global(opt);
    if (solve_local->parsed()) return cmd_solve_local(opt);
    if (verify->parsed()) return cmd_verify(opt);
  } catch (const ricci::NoConvergence& e) {
    std::cerr << e.what() << "\n";
    return kNoConvergence;
  } catch (const ricci::LocalHypothesisFailed& e) {
    std::cerr << e.what() << "\n";
    return kHypothesisFailure;
  } catch (const ricci::RecipeFailed& e) {
    std::cerr << e.what() << "\n";
    return kHypothesisFailure;
  } catch (const ricci::DegenerateCertificate& e) {
    std::cerr << e.what() << "\n";
    return kHypothesisFailure;
  } catch (const ricci::HUndefined& e) {
    std::cerr << e.what() << "\n";
    return kHypothesisFailure;
  } catch (const ricci::EmptyBox& e) {
    std::cerr << e.what() << "\n";
    return kHypothesisFailure;
  } catch (const ricci::NonPositive& e) {
    std::cerr << e.what() << "\n";
    return kBreakdown;
  } catch (const ricci::BoundViolation& e) {
    std::cerr << e.what() << "\n";
    return kResidualMiss;
  } catch (const ricci::Error& e) {
    std::cerr << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}

#include "ricci/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ricci/errors.hpp"

namespace ricci {

using nlohmann::json;

namespace {

std::vector<double> as_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(std::string(what) + " must be numeric");
    out.push_back(v.get<double>());
  }
  return out;
}

SmoothProfile parse_profile(const json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw ParseError("profile needs a type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant")
    return SmoothProfile::constant(j.at("value").get<double>());
  if (type == "polynomial")
    return SmoothProfile::polynomial(as_vector(j.at("coeffs"), "coeffs"),
                                     j.value("center", 0.0));
  if (type == "spline")
    return SmoothProfile::spline(as_vector(j.at("samples"), "samples"));
  throw ParseError("unknown profile type: " + type);
}

HomogeneousStructure parse_structure(const json& j) {
  HomogeneousStructure s;
  auto dims = j.at("dims");
  for (const auto& d : dims) s.dims.push_back(d.get<int>());
  s.n = static_cast<int>(s.dims.size());
  s.beta = as_vector(j.at("beta"), "beta");
  s.gamma.assign(static_cast<std::size_t>(s.n) * s.n * s.n, 0.0);
  if (j.contains("gamma")) {
    const auto& gm = j.at("gamma");
    if (static_cast<int>(gm.size()) != s.n)
      throw ParseError("gamma must be an n x n x n array");
    for (int k = 0; k < s.n; ++k)
      for (int l = 0; l < s.n; ++l)
        for (int m = 0; m < s.n; ++m)
          s.gamma_at(k, l, m) = gm.at(k).at(l).at(m).get<double>();
  }
  bool all_zero = true;
  for (double v : s.beta) all_zero = all_zero && v == 0.0;
  for (double v : s.gamma) all_zero = all_zero && v == 0.0;
  s.abelian = all_zero;
  return s;
}

BracketTable parse_bracket_table(const json& j) {
  BracketTable b;
  b.dim_g = j.at("dim").get<int>();
  if (b.dim_g < 1) throw ParseError("bracket table dim must be positive");
  b.brackets.assign(
      static_cast<std::size_t>(b.dim_g) * b.dim_g * b.dim_g, 0.0);
  for (const auto& e : j.at("brackets")) {
    if (!e.is_array() || e.size() != 4)
      throw ParseError("bracket entries are [i, j, s, value]");
    int i = e.at(0).get<int>(), jj = e.at(1).get<int>(), ss = e.at(2).get<int>();
    double v = e.at(3).get<double>();
    if (i < 0 || i >= b.dim_g || jj < 0 || jj >= b.dim_g || ss < 0 ||
        ss >= b.dim_g)
      throw ParseError("bracket index out of range");
    b.c(i, jj, ss) = v;
    b.c(jj, i, ss) = -v;
  }
  for (const auto& k : j.at("k_indices")) b.k_indices.push_back(k.get<int>());
  for (const auto& [key, val] : j.at("modules").items())
    b.module_assignment[std::stoi(key)] = val.get<int>();
  return b;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  try {
    if (j.contains("structure")) cfg.structure = parse_structure(j["structure"]);
    if (j.contains("bracket_table"))
      cfg.bracket_table = parse_bracket_table(j["bracket_table"]);
    if (!cfg.structure && !cfg.bracket_table)
      throw ParseError("config needs a structure or a bracket_table");

    HomogeneousStructure s;
    if (cfg.structure) {
      s = *cfg.structure;
    } else {
      validate_bracket_table(*cfg.bracket_table);
      s = compute_constants(*cfg.bracket_table).structure;
    }
    validate_structure(s);

    if (j.contains("problem")) {
      const auto& pj = j["problem"];
      cfg.problem.structure = s;
      cfg.problem.sigma = pj.at("sigma").get<double>();
      cfg.problem.a = as_vector(pj.at("a"), "a");
      cfg.problem.b = as_vector(pj.at("b"), "b");
      cfg.problem.sign_indefinite = pj.value("sign_indefinite", false);
      for (const auto& prof : pj.at("phi"))
        cfg.problem.phi.push_back(parse_profile(prof));
      if (static_cast<int>(cfg.problem.phi.size()) != s.n ||
          static_cast<int>(cfg.problem.a.size()) != s.n ||
          static_cast<int>(cfg.problem.b.size()) != s.n)
        throw ParseError("phi, a, b must all have one entry per module");
      cfg.has_problem = true;
    } else {
      cfg.problem.structure = s;
    }

    if (j.contains("envelope")) {
      const auto& ej = j["envelope"];
      cfg.rho_bar = ej.value("rho_bar", 1.0);
      if (ej.contains("rho_threshold"))
        cfg.thresholds.rho_threshold = ej["rho_threshold"].get<double>();
      if (ej.contains("sigma_threshold"))
        cfg.thresholds.sigma_threshold = ej["sigma_threshold"].get<double>();
    }
    cfg.grid_n = j.value("grid", 2001);
    if (j.contains("solver")) {
      const auto& sj = j["solver"];
      cfg.tol = sj.value("tol", 1e-10);
      cfg.max_iter = sj.value("max_iter", 200);
      cfg.damping = sj.value("damping", 1.0);
    }
    if (j.contains("sampling")) {
      const auto& sj = j["sampling"];
      cfg.sampling.seed = sj.value("seed", cfg.sampling.seed);
      cfg.sampling.points = sj.value("points", cfg.sampling.points);
    }
    if (j.contains("local")) {
      const auto& lj = j["local"];
      if (lj.contains("tau")) cfg.tau = lj["tau"].get<double>();
      if (lj.contains("a_tau")) cfg.a_tau = as_vector(lj["a_tau"], "a_tau");
      if (lj.contains("delta")) cfg.delta = as_vector(lj["delta"], "delta");
      if (lj.contains("beta_param"))
        cfg.beta_param = lj["beta_param"].get<double>();
      cfg.max_span = lj.value("max_span", 1.0);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

void write_text_atomic(const std::string& text, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ParseError("cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_solution_csv(const MetricSolution& sol, const std::string& path) {
  const int n = sol.n();
  const int M = static_cast<int>(sol.r.size());
  std::ostringstream out;
  out << "r,h,hp";
  for (int i = 1; i <= n; ++i) out << ",f" << i;
  for (int i = 1; i <= n; ++i) out << ",fp" << i;
  out << "\n";
  for (int j = 0; j < M; ++j) {
    out << fmt17(sol.r[j]) << ',' << fmt17(sol.h[j]) << ',' << fmt17(sol.hp[j]);
    for (int i = 0; i < n; ++i)
      out << ',' << fmt17(sol.f[static_cast<std::size_t>(j) * n + i]);
    for (int i = 0; i < n; ++i)
      out << ',' << fmt17(sol.fp[static_cast<std::size_t>(j) * n + i]);
    out << "\n";
  }
  write_text_atomic(out.str(), path);
}

MetricSolution read_solution_csv(const std::string& path, double sigma) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open solution file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty solution file");

  int n = 0;
  {
    std::stringstream hs(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(hs, col, ',')) cols.push_back(col);
    if (cols.size() < 5 || cols[0] != "r" || cols[1] != "h" || cols[2] != "hp")
      throw ParseError("unexpected CSV header");
    n = static_cast<int>((cols.size() - 3) / 2);
    if (cols.size() != static_cast<std::size_t>(3 + 2 * n))
      throw ParseError("unexpected CSV column count");
  }

  MetricSolution sol;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw ParseError("non-numeric CSV cell: " + cell);
      }
      if (used != cell.size())
        throw ParseError("non-numeric CSV cell: " + cell);
      vals.push_back(v);
    }
    if (vals.size() != static_cast<std::size_t>(3 + 2 * n))
      throw ParseError("truncated CSV row");
    sol.r.push_back(vals[0]);
    sol.h.push_back(vals[1]);
    sol.hp.push_back(vals[2]);
    for (int i = 0; i < n; ++i) sol.f.push_back(vals[3 + i]);
    for (int i = 0; i < n; ++i) sol.fp.push_back(vals[3 + n + i]);
  }
  if (sol.r.size() < 2) throw ParseError("solution file has too few rows");
  sol.grid.sigma = sigma;
  double spacing = sol.r[1] - sol.r[0];
  if (!(spacing > 0.0)) throw ParseError("CSV rows are not increasing in r");
  sol.grid.N = static_cast<int>(std::lround(sigma / spacing)) + 1;
  return sol;
}

namespace {

json check_json(const HypothesisCheck& c) {
  return {{"verdict", c.verdict}, {"margin", c.margin}};
}

}  // namespace

std::string certificate_to_json(const CertificateReport& rep) {
  json j;
  j["mode"] = to_string(rep.mode);
  j["rho0"] = rep.rho0;
  j["rho1"] = rep.rho1;
  j["sigma1"] = rep.sigma1;
  j["eps0"] = rep.eps0;
  j["theta_vec"] = rep.theta_vec;
  j["theta"] = rep.theta;
  j["theta1"] = rep.theta1;
  j["theta2"] = rep.theta2;
  if (rep.theta3) j["theta3"] = *rep.theta3;
  j["big_sigma"] = rep.big_sigma;
  j["sigma0"] = rep.sigma0;
  j["ball_radius"] = rep.ball_radius;
  j["c1"] = rep.c1;
  j["c2"] = rep.c2;
  j["checks"] = {{"phi_sum", check_json(rep.phi_sum_check)},
                 {"sigma", check_json(rep.sigma_check)},
                 {"boundary_gap", check_json(rep.boundary_gap_check)},
                 {"phi_derivative", check_json(rep.phi_derivative_check)}};
  if (rep.mode == CertificateMode::Indefinite)
    j["indefinite_lhs"] = rep.indefinite_lhs;
  j["conditional"] = rep.conditional;
  j["all_pass"] = rep.all_pass();
  return j.dump(2) + "\n";
}

std::string residuals_to_json(const ResidualReport& rep) {
  json j;
  j["max_sigma_defect"] = rep.max_sigma_defect;
  j["orbit_defect"] = rep.orbit_defect;
  j["max_orbit_defect"] = rep.max_orbit_defect;
  j["max_bianchi"] = rep.max_bianchi;
  j["boundary_err_a"] = rep.boundary_err_a;
  j["boundary_err_b"] = rep.boundary_err_b;
  j["bc_h_defect"] = rep.bc_h_defect;
  j["hartman_ok"] = rep.hartman_ok;
  j["ball_ok"] = rep.ball_ok;
  j["ball_norm"] = rep.ball_norm;
  j["sigma_propagation_ok"] = rep.sigma_propagation_ok;
  if (rep.grid_ratio) j["grid_ratio"] = *rep.grid_ratio;
  return j.dump(2) + "\n";
}

std::string constants_to_json(const ConstantsResult& res) {
  json j;
  const auto& s = res.structure;
  j["n"] = s.n;
  j["dims"] = s.dims;
  j["beta"] = s.beta;
  json gm = json::array();
  for (int k = 0; k < s.n; ++k) {
    json gk = json::array();
    for (int l = 0; l < s.n; ++l) {
      json gl = json::array();
      for (int m = 0; m < s.n; ++m) gl.push_back(s.gamma_at(k, l, m));
      gk.push_back(gl);
    }
    gm.push_back(gk);
  }
  j["gamma"] = gm;
  j["abelian"] = s.abelian;
  j["max_spread"] = res.max_spread;
  return j.dump(2) + "\n";
}

}  // namespace ricci

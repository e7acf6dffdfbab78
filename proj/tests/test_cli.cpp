#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(CLI_BINARY) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("ricci_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string config(const char* name) {
  return (fs::path(CONFIG_DIR) / name).string();
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string dump_config(const json& j, const char* name) {
  fs::path p = work_dir() / name;
  std::ofstream out(p);
  out << j.dump(2);
  return p.string();
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("constants subcommand") {
  auto out = (work_dir() / "const_torus").string();
  CHECK(run("constants --config " + config("torus.json") + " --out " + out) ==
        0);
  auto j = load_json(fs::path(out) / "constants.json");
  CHECK(j["abelian"] == true);
  CHECK(j["beta"][0] == 0.0);

  auto out2 = (work_dir() / "const_sphere").string();
  CHECK(run("constants --config " + config("sphere-su2.json") + " --out " +
            out2) == 0);
  auto j2 = load_json(fs::path(out2) / "constants.json");
  CHECK(j2["n"] == 1);
  CHECK(j2["dims"][0] == 2);
  CHECK(std::fabs(j2["beta"][0].get<double>() - 2.0) <= 1e-12);
  CHECK(j2["max_spread"].get<double>() <= 1e-12);
}

TEST_CASE("constants rejects a malformed bracket table") {
  json j;
  j["bracket_table"] = {{"dim", 3},
                        {"brackets", json::array({json::array({0, 1, 0, 1.0})})},
                        {"k_indices", json::array()},
                        {"modules", {{"0", 1}, {"1", 2}, {"2", 3}}}};
  auto cfg = dump_config(j, "bad_table.json");
  auto out = (work_dir() / "const_bad").string();
  CHECK(run("constants --config " + cfg + " --out " + out) == 2);
}

TEST_CASE("check subcommand verdicts") {
  auto out = (work_dir() / "check_ok").string();
  CHECK(run("check --config " + config("torus.json") + " --out " + out) == 0);
  auto cert = load_json(fs::path(out) / "certificate.json");
  CHECK(cert["all_pass"] == true);
  CHECK(cert["mode"] == "abelian");

  auto j = load_json(config("torus.json"));
  j["problem"]["sigma"] = 0.5;
  auto cfg = dump_config(j, "torus_big_sigma.json");
  auto out2 = (work_dir() / "check_fail").string();
  CHECK(run("check --config " + cfg + " --out " + out2) == 3);
  auto cert2 = load_json(fs::path(out2) / "certificate.json");
  CHECK(cert2["checks"]["sigma"]["verdict"] == false);
  CHECK(cert2["checks"]["phi_sum"]["verdict"] == true);
}

TEST_CASE("check in sign-indefinite mode is conditional") {
  auto out = (work_dir() / "check_indef").string();
  CHECK(run("check --config " + config("torus-indefinite.json") + " --out " +
            out) == 3);
  auto cert = load_json(fs::path(out) / "certificate.json");
  CHECK(cert["mode"] == "indefinite");
  CHECK(cert["conditional"] == true);
}

TEST_CASE("solve-global produces a verified solution") {
  auto out = (work_dir() / "global").string();
  CHECK(run("solve-global --config " + config("torus.json") + " --grid 201" +
            " --out " + out) == 0);
  auto rows = read_csv(fs::path(out) / "solution.csv");
  REQUIRE(rows.size() == 201);
  CHECK(rows.front()[3] == 1.0);  // f1(0) = a1
  CHECK(rows.front()[4] == 1.0);
  CHECK(rows.back()[3] == 1.0);  // f1(sigma) = b1
  CHECK(rows.back()[4] == 1.0);
  auto rep = load_json(fs::path(out) / "report.json");
  CHECK(rep["max_sigma_defect"].get<double>() <= 1e-6);
  CHECK(rep["max_orbit_defect"].get<double>() <= 1e-6);
  CHECK(rep["ball_ok"] == true);
  CHECK(rep.contains("grid_ratio"));
}

TEST_CASE("solve-global reports non-convergence") {
  auto out = (work_dir() / "global_cap").string();
  CHECK(run("solve-global --config " + config("torus.json") + " --grid 201" +
            " --tol 1e-30 --max-iter 1 --out " + out) == 4);
}

TEST_CASE("solve-local from the configured orbit data") {
  auto out = (work_dir() / "local").string();
  CHECK(run("solve-local --config " + config("torus.json") + " --grid 201" +
            " --out " + out) == 0);
  auto rep = load_json(fs::path(out) / "report.json");
  CHECK(std::fabs(rep["h_at_tau"].get<double>() - std::sqrt(0.5)) <= 1e-12);
  CHECK(rep["breakdown"] == false);
  auto rows = read_csv(fs::path(out) / "solution.csv");
  for (const auto& row : rows)
    CHECK(std::fabs(row[1] - std::sqrt(0.5)) <= 1e-9);
}

TEST_CASE("solve-local rejects infeasible orbit data") {
  auto j = load_json(config("torus.json"));
  j["problem"]["phi"] = json::array(
      {{{"type", "constant"}, {"value", 0.5}},
       {{"type", "constant"}, {"value", 0.5}}});
  j["local"]["delta"] = {1.0, -1.0};
  auto cfg = dump_config(j, "torus_bad_local.json");
  auto out = (work_dir() / "local_fail").string();
  CHECK(run("solve-local --config " + cfg + " --grid 201 --out " + out) == 3);
}

TEST_CASE("solve-local can use the interpolated-orbit recipe") {
  auto j = load_json(config("torus.json"));
  j["local"].erase("delta");
  j["local"]["tau"] = 0.5;
  j["local"]["beta_param"] = 1.0;
  auto cfg = dump_config(j, "torus_recipe.json");
  auto out = (work_dir() / "local_recipe").string();
  CHECK(run("solve-local --config " + cfg + " --grid 201 --out " + out) == 0);
  auto rep = load_json(fs::path(out) / "report.json");
  CHECK(rep["beta_used"].get<double>() == 1.0);
}

TEST_CASE("verify round-trips the solver output") {
  auto out = (work_dir() / "global2").string();
  REQUIRE(run("solve-global --config " + config("torus.json") + " --grid 201" +
              " --out " + out) == 0);
  auto solve_rep = load_json(fs::path(out) / "report.json");

  auto vout = (work_dir() / "verify_ok").string();
  CHECK(run("verify --config " + config("torus.json") + " --solution " +
            (fs::path(out) / "solution.csv").string() + " --out " + vout) == 0);
  auto rep = load_json(fs::path(vout) / "report.json");
  for (const char* key :
       {"max_sigma_defect", "max_orbit_defect", "max_bianchi"})
    CHECK(std::fabs(rep[key].get<double>() - solve_rep[key].get<double>()) <=
          1e-12);
}

TEST_CASE("verify flags a perturbed solution") {
  auto src = work_dir() / "global2" / "solution.csv";
  REQUIRE(fs::exists(src));
  std::ifstream in(src);
  std::string line;
  std::getline(in, line);
  std::ostringstream tampered;
  tampered << line << "\n";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    for (int i : {3, 4}) cells[i] = std::to_string(std::stod(cells[i]) * 1.01);
    for (std::size_t i = 0; i < cells.size(); ++i)
      tampered << (i ? "," : "") << cells[i];
    tampered << "\n";
  }
  auto bad = work_dir() / "tampered.csv";
  std::ofstream(bad) << tampered.str();
  auto vout = (work_dir() / "verify_bad").string();
  CHECK(run("verify --config " + config("torus.json") + " --solution " +
            bad.string() + " --out " + vout) == 5);
}

TEST_CASE("verify rejects a truncated solution file") {
  auto src = work_dir() / "global2" / "solution.csv";
  REQUIRE(fs::exists(src));
  std::ifstream in(src);
  std::ostringstream cut;
  std::string line;
  for (int j = 0; j < 8 && std::getline(in, line); ++j) {
    if (j == 5) line = line.substr(0, line.rfind(','));
    cut << line << "\n";
  }
  auto bad = work_dir() / "truncated.csv";
  std::ofstream(bad) << cut.str();
  auto vout = (work_dir() / "verify_trunc").string();
  CHECK(run("verify --config " + config("torus.json") + " --solution " +
            bad.string() + " --out " + vout) == 2);
}

TEST_CASE("missing config file") {
  CHECK(run("check --config /nonexistent.json") == 2);
}

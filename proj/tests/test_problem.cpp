#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ricci/errors.hpp"
#include "ricci/problem.hpp"

using namespace ricci;

namespace {

HomogeneousStructure torus() {
  HomogeneousStructure s;
  s.n = 2;
  s.dims = {1, 1};
  s.beta = {0.0, 0.0};
  s.gamma.assign(8, 0.0);
  s.abelian = true;
  return s;
}

ProblemData torus_problem(double sigma = 0.1) {
  ProblemData p;
  p.structure = torus();
  p.sigma = sigma;
  p.a = {1.0, 1.0};
  p.b = {1.0, 1.0};
  p.phi = {SmoothProfile::constant(1.0), SmoothProfile::constant(1.0)};
  return p;
}

}  // namespace

TEST_CASE("tightest envelope for constant torus data") {
  auto env = tightest_envelope(torus_problem());
  CHECK(env.alpha == 1.0);
  CHECK(env.omega1 == 1.0);
  CHECK(env.omega2 == 1.0);
  CHECK(env.c1 == 1e-30);
  CHECK(env.c2 == 1e-30);
  CHECK(env.rho_bar == 1.0);
}

TEST_CASE("envelope scalings from a boundary gap and a sloped profile") {
  auto p = torus_problem(0.1);
  p.b = {1.002, 1.0};
  auto env = tightest_envelope(p);
  CHECK(env.c1 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(env.omega2 == doctest::Approx(1.002));

  auto q = torus_problem(0.1);
  q.phi[0] = SmoothProfile::polynomial({1.0, 0.5});
  auto env2 = tightest_envelope(q);
  CHECK(env2.alpha == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(env2.c2 == doctest::Approx(0.5 / 0.01).epsilon(1e-12));
}

TEST_CASE("profiles on [0, sigma] use the chain rule") {
  auto p = torus_problem(2.0);
  p.phi[0] = SmoothProfile::polynomial({0.0, 1.0});  // t
  ProfilesOnR prof(p);
  CHECK(prof.value(0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(prof.derivative(0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));

  auto q = torus_problem(1.0);
  q.phi[0] = SmoothProfile::polynomial({1.0, 0.0, 1.0});  // 1 + t^2
  ProfilesOnR prof2(q);
  CHECK(prof2.derivative(0, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(prof2.value(0, 0.0) == 1.0);

  CHECK_THROWS_AS(prof2.value(0, 1.5), DomainError);
  CHECK_THROWS_AS(prof2.value(0, -0.5), DomainError);
}

TEST_CASE("profile round trip and derivative consistency") {
  auto p = torus_problem(0.7);
  p.phi[0] = SmoothProfile::polynomial({2.0, -1.0, 0.5, 0.25}, 0.3);
  std::vector<double> samples;
  for (int j = 0; j <= 40; ++j) {
    double t = j / 40.0;
    samples.push_back(1.0 + 0.2 * std::sin(3.0 * t));
  }
  p.phi[1] = SmoothProfile::spline(samples);
  ProfilesOnR prof(p);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j <= 100; ++j) {
      double t = j / 100.0;
      CHECK(prof.value(i, p.sigma * t) ==
            doctest::Approx(p.phi[i].value(t)).epsilon(1e-14));
    }
  // derivative matches a central difference
  const double eps = 1e-6;
  for (int i = 0; i < 2; ++i)
    for (int j = 1; j < 20; ++j) {
      double t = j / 20.0;
      double fd = (p.phi[i].value(t + eps) - p.phi[i].value(t - eps)) /
                  (2.0 * eps);
      CHECK(p.phi[i].derivative(t) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("spline interpolates its samples exactly") {
  std::vector<double> samples = {1.0, 2.0, 1.5, 3.0, 2.5};
  auto sp = SmoothProfile::spline(samples);
  for (int j = 0; j < 5; ++j)
    CHECK(sp.value(j / 4.0) == doctest::Approx(samples[j]).epsilon(1e-13));
}

TEST_CASE("problem validation") {
  SUBCASE("valid torus data passes") { CHECK_NOTHROW(validate_problem(torus_problem())); }
  SUBCASE("nonpositive boundary data") {
    auto p = torus_problem();
    p.a[0] = 0.0;
    CHECK_THROWS_AS(validate_problem(p), InvalidProblem);
  }
  SUBCASE("profile must stay positive unless sign-indefinite") {
    auto p = torus_problem();
    p.phi[0] = SmoothProfile::constant(-1.0);
    CHECK_THROWS_AS(validate_problem(p), InvalidProblem);
    p.sign_indefinite = true;
    CHECK_NOTHROW(validate_problem(p));
  }
  SUBCASE("length mismatches") {
    auto p = torus_problem();
    p.b.pop_back();
    CHECK_THROWS_AS(validate_problem(p), InvalidProblem);
  }
  SUBCASE("orbit data") {
    OrbitData od{0.5, {1.0, 1.0}, {0.0, 0.0}};
    CHECK_NOTHROW(validate_orbit_data(od, 2));
    od.tau = 1.5;
    CHECK_THROWS_AS(validate_orbit_data(od, 2), InvalidProblem);
    od.tau = 0.5;
    od.a_tau[1] = -1.0;
    CHECK_THROWS_AS(validate_orbit_data(od, 2), InvalidProblem);
  }
}

TEST_CASE("indefinite envelope uses the absolute profile bound") {
  auto p = torus_problem();
  p.sign_indefinite = true;
  p.phi[0] = SmoothProfile::constant(-2.0);
  auto env = tightest_envelope(p);
  CHECK(env.alpha == doctest::Approx(2.0));
}

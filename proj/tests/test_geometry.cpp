#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"
#include "ricci/structure.hpp"

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

HomogeneousStructure sphere() {
  HomogeneousStructure s;
  s.n = 1;
  s.dims = {2};
  s.beta = {2.0};
  s.gamma = {0.0};
  return s;
}

HomogeneousStructure su2_trivial() {
  HomogeneousStructure s;
  s.n = 3;
  s.dims = {1, 1, 1};
  s.beta = {2.0, 2.0, 2.0};
  s.gamma.assign(27, 0.0);
  int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                     {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (auto& p : perms) s.gamma_at(p[0], p[1], p[2]) = 1.0;
  return s;
}

std::vector<HomogeneousStructure> shipped() {
  return {torus(), sphere(), su2_trivial()};
}

}  // namespace

TEST_CASE("H1 pointwise values") {
  auto t = torus();
  CHECK(eval_H1(std::vector<double>{1.3, 0.4}, std::vector<double>{0.0, 0.0},
                t) == 1.0);
  HomogeneousStructure single;
  single.n = 1;
  single.dims = {1};
  single.beta = {1.0};
  single.gamma = {0.0};
  CHECK(eval_H1(std::vector<double>{2.0}, std::vector<double>{5.0}, single) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_H1(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 1.0},
                t) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(
      eval_H1(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 0.0}, t),
      DomainError);
}

TEST_CASE("H2 pointwise values") {
  auto t = torus();
  CHECK(eval_H2(std::vector<double>{2.0, 3.0}, std::vector<double>{0.0, 0.0},
                t) == 0.0);
  CHECK(eval_H2(std::vector<double>{1.0, 2.0}, std::vector<double>{4.0, 4.0},
                t) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(eval_H2(std::vector<double>{1.0}, std::vector<double>{2.0}, sphere()) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("H values and domain") {
  auto t = torus();
  CHECK(eval_H(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0},
               std::vector<double>{1.0, 1.0}, t) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(eval_H(std::vector<double>{1.0}, std::vector<double>{0.0},
               std::vector<double>{2.0}, sphere()) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(eval_H(std::vector<double>{1.0, 1.0},
                         std::vector<double>{0.0, 0.0},
                         std::vector<double>{0.0, 0.0}, t),
                  HUndefined);
}

TEST_CASE("F pointwise values") {
  auto t = torus();
  std::vector<double> out;
  eval_F(1.0, 0.0, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0},
         std::vector<double>{0.0, 0.0}, t, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  eval_F(1.0, 0.0, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0},
         std::vector<double>{1.0, 2.0}, t, out);
  CHECK(out[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(-2.0).epsilon(1e-15));
  eval_F(1.0, 0.0, std::vector<double>{1.0}, std::vector<double>{0.0},
         std::vector<double>{0.0}, sphere(), out);
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("K pointwise values") {
  HomogeneousStructure one;
  one.n = 1;
  one.dims = {1};
  one.beta = {1.0};
  one.gamma = {0.0};
  CHECK(eval_K(1.0, std::vector<double>{2.0}, std::vector<double>{0.0},
               std::vector<double>{0.0}, one) == 0.0);
  CHECK(eval_K(1.0, std::vector<double>{2.0}, std::vector<double>{3.0},
               std::vector<double>{0.0}, one) ==
        doctest::Approx(1.5).epsilon(1e-15));
  CHECK(eval_K(1.0, std::vector<double>{1.0}, std::vector<double>{0.0},
               std::vector<double>{2.0}, sphere()) ==
        doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("F_tilde composes F with K") {
  auto t = torus();
  std::vector<double> out;
  eval_F_tilde(1.0, std::vector<double>{1.0, 1.0},
               std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0},
               std::vector<double>{0.7, -0.3}, t, out);
  CHECK(out[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(-1.0).epsilon(1e-15));
  eval_F_tilde(1.0, std::vector<double>{1.0}, std::vector<double>{1.0},
               std::vector<double>{0.0}, std::vector<double>{0.0}, sphere(),
               out);
  CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("flat torus and round sphere curvature oracles") {
  MetricJet flat;
  flat.h = 1.0;
  flat.hp = 0.0;
  flat.f = {1.0, 2.0};
  flat.fp = {0.0, 0.0};
  flat.fpp = {0.0, 0.0};
  auto rc = ricci_components(flat, torus());
  CHECK(rc.sigma_bar == 0.0);
  CHECK(rc.orbit[0] == 0.0);
  CHECK(rc.orbit[1] == 0.0);

  for (int j = 0; j <= 50; ++j) {
    double r = 0.3 + j * (3.14159265358979 - 0.6) / 50.0;
    MetricJet s3;
    s3.h = 1.0;
    s3.hp = 0.0;
    s3.f = {std::sin(r)};
    s3.fp = {std::cos(r)};
    s3.fpp = {-std::sin(r)};
    auto rs = ricci_components(s3, sphere());
    CHECK(rs.sigma_bar == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rs.orbit[0] ==
          doctest::Approx(2.0 * std::sin(r) * std::sin(r)).epsilon(1e-12));
  }
}

TEST_CASE("inversion identity: F_tilde and K reproduce the prescribed orbit") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> half(0.5, 2.0), unit(-1.0, 1.0),
      two(-2.0, 2.0);
  for (const auto& s : shipped()) {
    const int n = s.n;
    std::vector<double> f(n), fp(n), z(n), w(n), fpp;
    for (int it = 0; it < 1000; ++it) {
      double h = half(rng);
      for (int i = 0; i < n; ++i) {
        f[i] = half(rng);
        fp[i] = unit(rng);
        z[i] = two(rng);
        w[i] = unit(rng);
      }
      MetricJet j;
      j.h = h;
      j.hp = eval_K(h, f, fp, w, s);
      j.f = f;
      j.fp = fp;
      eval_F_tilde(h, f, fp, z, w, s, fpp);
      j.fpp = fpp;
      auto rc = ricci_components(j, s);
      for (int i = 0; i < n; ++i) {
        double scale = std::max(1.0, std::fabs(z[i]));
        CHECK(std::fabs(rc.orbit[i] - z[i]) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("transverse equation is equivalent to the scaled-H2 identity") {
  // With f'' eliminated through F, sigma_bar - 1 = h^2 H2(f,z) - H1(f,f').
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> half(0.5, 2.0), unit(-1.0, 1.0),
      two(-2.0, 2.0);
  for (const auto& s : shipped()) {
    const int n = s.n;
    std::vector<double> f(n), fp(n), z(n), fpp;
    for (int it = 0; it < 1000; ++it) {
      double h = half(rng), q = unit(rng);
      for (int i = 0; i < n; ++i) {
        f[i] = half(rng);
        fp[i] = unit(rng);
        z[i] = two(rng);
      }
      MetricJet j;
      j.h = h;
      j.hp = q;
      j.f = f;
      j.fp = fp;
      eval_F(h, q, f, fp, z, s, fpp);
      j.fpp = fpp;
      auto rc = ricci_components(j, s);
      double rhs = h * h * eval_H2(f, z, s) - eval_H1(f, fp, s);
      CHECK(std::fabs((rc.sigma_bar - 1.0) - rhs) <=
            1e-12 * std::max(1.0, std::fabs(rhs)));
    }
  }
}

TEST_CASE("Bianchi residual closes under the K-slope and unit sigma_bar") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> half(0.5, 2.0), unit(-1.0, 1.0);
  for (const auto& s : shipped()) {
    const int n = s.n;
    std::vector<double> f(n), fp(n), phip(n);
    for (int it = 0; it < 1000; ++it) {
      double h = half(rng);
      for (int i = 0; i < n; ++i) {
        f[i] = half(rng);
        fp[i] = unit(rng);
        phip[i] = unit(rng);
      }
      MetricJet j;
      j.h = h;
      j.hp = eval_K(h, f, fp, phip, s);
      j.f = f;
      j.fp = fp;
      j.fpp.assign(n, 0.0);
      CHECK(std::fabs(bianchi_residual(j, 1.0, 0.0, phip, s)) <= 1e-12);
    }
  }
}

TEST_CASE("Bianchi residual direct substitution") {
  HomogeneousStructure one;
  one.n = 1;
  one.dims = {1};
  one.beta = {1.0};
  one.gamma = {0.0};
  MetricJet j;
  j.h = 1.0;
  j.hp = 0.0;
  j.f = {1.0};
  j.fp = {1.0};
  j.fpp = {0.0};
  CHECK(bianchi_residual(j, 1.0, 0.0, std::vector<double>{0.0}, one) ==
        doctest::Approx(1.0).epsilon(1e-15));
  j.fp = {0.0};
  CHECK(bianchi_residual(j, 1.0, 0.0, std::vector<double>{0.0}, one) == 0.0);
}

TEST_CASE("whenever H is defined, H^2 H2 = H1") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> half(0.5, 2.0), small(-0.3, 0.3),
      pos(0.5, 2.5);
  auto t = torus();
  std::vector<double> x(2), y(2), z(2);
  for (int it = 0; it < 1000; ++it) {
    for (int i = 0; i < 2; ++i) {
      x[i] = half(rng);
      y[i] = small(rng);
      z[i] = pos(rng);
    }
    double H = eval_H(x, y, z, t);
    double lhs = H * H * eval_H2(x, z, t);
    double rhs = eval_H1(x, y, t);
    CHECK(std::fabs(lhs - rhs) <= 1e-14 * std::max(1.0, std::fabs(rhs)));
  }
}

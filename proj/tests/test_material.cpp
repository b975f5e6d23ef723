#include <doctest.h>

#include <cmath>

#include "slidemesh/material.hpp"

using namespace slidemesh;

namespace {

struct CarreauRef {
  double gamma_dot;
  double eta;
};

// Reference table produced by 50-digit arbitrary-precision evaluation of the
// Carreau law eta = etaInf + (eta0 - etaInf) (1 + (lambda g)^2)^((n-1)/2).
constexpr CarreauRef kCarreauSetA[] = {
    {0.0, 1290.0},
    {1e-6, 1289.9999999999964},
    {0.01, 1289.9996431924651},
    {0.1, 1289.9643219503016},
    {1.0, 1286.4589844096506},
    {3.7, 1245.699962631757},
    {10.0, 1078.3168214612237},
    {55.0, 575.29901880088996},
    {420.0, 236.04149568609186},
    {1e4, 58.328993965353641},
};

constexpr CarreauRef kCarreauSetB[] = {
    {0.05, 798.10309556555507},
    {2.0, 349.85646189248929},
    {150.0, 31.725002465161957},
    {9e3, 13.737391998018703},
    {1e6, 12.552704753337327},
};

struct CrossWlfRef {
  double gamma_dot;
  double T;
  double eta;
};

// Same precision for the Cross law with WLF zero-shear viscosity.
constexpr CrossWlfRef kCrossWlf[] = {
    {0.01, 390.0, 5409.4476623692564},
    {1.0, 420.0, 2980.7648800864751},
    {12.0, 450.0, 1243.3203725986163},
    {250.0, 480.0, 220.45069802728622},
    {5400.0, 510.0, 25.75702850557269},
};

constexpr CarreauParams kSetA{1290.0, 0.0, 0.112, 0.559};
constexpr CarreauParams kSetB{800.0, 12.5, 1.7, 0.33};
constexpr CrossWlfParams kWlf{1.21e14, 25680.0, 0.2923, 28.32, 51.6, 117.0};

}  // namespace

TEST_CASE("kinematic helpers: strain rate, shear rate, dissipation, stress") {
  Mat2 grad_u;
  grad_u << 0.0, 2.0, 0.0, 0.0;  // simple shear u = (2y, 0)
  const Mat2 eps = strain_rate(grad_u);
  CHECK(eps(0, 0) == doctest::Approx(0.0));
  CHECK(eps(0, 1) == doctest::Approx(1.0));
  CHECK(eps(1, 0) == doctest::Approx(1.0));
  // shear_rate = sqrt(2 eps:eps) = sqrt(2 * 2) = 2 = |du/dy|
  CHECK(shear_rate(grad_u) == doctest::Approx(2.0).epsilon(1e-15));
  // Dissipation for simple shear: eta * gammadot^2.
  const double eta = 0.37;
  CHECK(viscous_dissipation(grad_u, eta) == doctest::Approx(eta * 4.0).epsilon(1e-14));

  // Rigid rotation produces no strain, no dissipation.
  Mat2 spin;
  spin << 0.0, -3.0, 3.0, 0.0;
  CHECK(shear_rate(spin) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(viscous_dissipation(spin, eta) == doctest::Approx(0.0).epsilon(1e-14));

  // Pure extension grad_u = diag(a, -a): dissipation 4 eta a^2 >= 0.
  Mat2 ext;
  ext << 1.5, 0.0, 0.0, -1.5;
  CHECK(viscous_dissipation(ext, eta) == doctest::Approx(4.0 * eta * 1.5 * 1.5).epsilon(1e-14));

  const Mat2 sigma = cauchy_stress(grad_u, 5.0, eta);
  CHECK(sigma(0, 0) == doctest::Approx(-5.0));
  CHECK(sigma(1, 1) == doctest::Approx(-5.0));
  CHECK(sigma(0, 1) == doctest::Approx(2.0 * eta * 1.0));
  CHECK(sigma(1, 0) == doctest::Approx(sigma(0, 1)));
  // Hydrostatic state: zero velocity gradient leaves -p I.
  const Mat2 hydro = cauchy_stress(Mat2::Zero(), 2.5, eta);
  CHECK((hydro + 2.5 * Mat2::Identity()).norm() == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("Carreau viscosity matches the high-precision reference to 1e-12") {
  const MaterialModel a = MaterialModel::carreau(kSetA);
  for (const auto& ref : kCarreauSetA) {
    const double eta = a.viscosity(ref.gamma_dot);
    CHECK(std::abs(eta - ref.eta) <= 1e-12 * ref.eta);
  }
  const MaterialModel b = MaterialModel::carreau(kSetB);
  for (const auto& ref : kCarreauSetB) {
    const double eta = b.viscosity(ref.gamma_dot);
    CHECK(std::abs(eta - ref.eta) <= 1e-12 * ref.eta);
  }
}

TEST_CASE("Cross-WLF viscosity matches the high-precision reference to 1e-12") {
  const MaterialModel m = MaterialModel::cross_wlf(kWlf);
  for (const auto& ref : kCrossWlf) {
    const double eta = m.viscosity(ref.gamma_dot, ref.T);
    CHECK(std::abs(eta - ref.eta) <= 1e-12 * ref.eta);
  }
}

TEST_CASE("shear-thinning monotonicity and asymptotic limits") {
  const MaterialModel a = MaterialModel::carreau(kSetA);
  const MaterialModel b = MaterialModel::carreau(kSetB);
  double prev_a = a.viscosity(0.0);
  double prev_b = b.viscosity(0.0);
  for (double g = 1e-4; g <= 1e8; g *= 10.0) {
    const double cur_a = a.viscosity(g);
    const double cur_b = b.viscosity(g);
    CHECK(cur_a < prev_a);
    CHECK(cur_b < prev_b);
    CHECK(cur_a > 0.0);
    prev_a = cur_a;
    prev_b = cur_b;
  }
  // Low-shear plateau and infinite-shear plateau.
  CHECK(a.viscosity(0.0) == doctest::Approx(kSetA.eta0).epsilon(1e-15));
  CHECK(b.viscosity(1e12) == doctest::Approx(kSetB.eta_inf).epsilon(1e-3));
  CHECK(b.viscosity(1e12) >= kSetB.eta_inf);
  // Viscosity depends on |gamma_dot| only.
  CHECK(a.viscosity(-3.7) == doctest::Approx(a.viscosity(3.7)).epsilon(1e-15));

  const MaterialModel wlf = MaterialModel::cross_wlf(kWlf);
  // Decreasing in shear rate at fixed T.
  double prev = wlf.viscosity(1e-3, 450.0);
  for (double g = 1e-2; g <= 1e6; g *= 10.0) {
    const double cur = wlf.viscosity(g, 450.0);
    CHECK(cur < prev);
    prev = cur;
  }
  // Decreasing in temperature at fixed shear rate (A1 > 0).
  CHECK(wlf.viscosity(1.0, 500.0) < wlf.viscosity(1.0, 420.0));
  // gamma_dot -> 0 recovers the WLF zero-shear viscosity.
  const double dT = 450.0 - kWlf.T_ref;
  const double eta0 = kWlf.D1 * std::exp(-kWlf.A1 * dT / (kWlf.A2 + dT));
  CHECK(wlf.viscosity(0.0, 450.0) == doctest::Approx(eta0).epsilon(1e-14));
}

TEST_CASE("Newtonian model is constant and validated") {
  const MaterialModel m = MaterialModel::newtonian(0.125);
  CHECK(m.viscosity(0.0) == doctest::Approx(0.125));
  CHECK(m.viscosity(1e5, 900.0) == doctest::Approx(0.125));
  CHECK(!m.depends_on_temperature());
  CHECK_THROWS_AS(MaterialModel::newtonian(0.0), ConfigError);
  CHECK_THROWS_AS(MaterialModel::newtonian(-1.0), ConfigError);
}

TEST_CASE("parameter validation rejects ill-posed models") {
  CHECK_THROWS_AS(MaterialModel::carreau({0.0, 0.0, 1.0, 0.5}), ConfigError);
  CHECK_THROWS_AS(MaterialModel::carreau({1.0, 2.0, 1.0, 0.5}), ConfigError);  // eta0 < etaInf
  CHECK_THROWS_AS(MaterialModel::carreau({1.0, 0.0, 0.0, 0.5}), ConfigError);  // lambda = 0
  CHECK_THROWS_AS(MaterialModel::carreau({1.0, 0.0, 1.0, 0.0}), ConfigError);  // n = 0
  CHECK_THROWS_AS(MaterialModel::cross_wlf({0.0, 1.0, 0.5, 1.0, 1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(MaterialModel::cross_wlf({1.0, 1.0, 1.5, 1.0, 1.0, 0.0}), ConfigError);  // n >= 1
  CHECK_THROWS_AS(MaterialModel::cross_wlf({1.0, 1.0, 0.5, 1.0, 0.0, 0.0}), ConfigError);  // A2 = 0
}

TEST_CASE("WLF evaluation outside its temperature window raises a range error") {
  const MaterialModel wlf = MaterialModel::cross_wlf(kWlf);
  CHECK(wlf.depends_on_temperature());
  // The window requires T - Tref > 1 - A2. Evaluate clearly below the limit;
  // the limit itself is ambiguous under floating-point rounding.
  const double limit = kWlf.T_ref - kWlf.A2 + 1.0;
  CHECK_THROWS_AS(wlf.viscosity(1.0, limit - 1e-6), MaterialRangeError);
  CHECK_THROWS_AS(wlf.viscosity(1.0, limit - 50.0), MaterialRangeError);
  CHECK_NOTHROW(wlf.viscosity(1.0, limit + 1.0));
}

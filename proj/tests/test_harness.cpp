#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "slidemesh/errors.hpp"
#include "slidemesh/forms.hpp"
#include "slidemesh/harness.hpp"

using namespace slidemesh;

namespace {

Vec2 fd_gradient(const std::function<double(const Vec2&)>& f, const Vec2& x,
                 double eps = 1e-6) {
  return Vec2((f(x + Vec2(eps, 0)) - f(x - Vec2(eps, 0))) / (2 * eps),
              (f(x + Vec2(0, eps)) - f(x - Vec2(0, eps))) / (2 * eps));
}

double fd_laplacian(const std::function<double(const Vec2&)>& f, const Vec2& x,
                    double eps = 1e-4) {
  return (f(x + Vec2(eps, 0)) + f(x - Vec2(eps, 0)) + f(x + Vec2(0, eps)) + f(x - Vec2(0, eps)) -
          4.0 * f(x)) /
         (eps * eps);
}

}  // namespace

TEST_CASE("vortex reference: divergence-free, gradient consistent, momentum balanced") {
  const TaylorGreen tg{0.1};
  std::mt19937 rng(4242u);
  std::uniform_real_distribution<double> dist(0.0, 1.0);

  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 x(dist(rng), dist(rng));
    const double t = 0.013;

    const Mat2 grad = tg.velocity_gradient(x, t);
    CHECK(std::abs(grad.trace()) <= 1e-10);

    // Rows of the gradient against finite differences of the components.
    for (int i = 0; i < 2; ++i) {
      const Vec2 fd =
          fd_gradient([&](const Vec2& y) { return tg.velocity(y, t)[i]; }, x);
      CHECK((grad.row(i).transpose() - fd).norm() <= 1e-7);
    }

    // Steady variant: the manufactured force balances the momentum equation
    // exactly; the viscous divergence of the vortex is -8 pi^2 eta u.
    {
      const Vec2 u = tg.velocity(x, 0.0);
      const Vec2 visc_div = -8.0 * kPi * kPi * tg.eta * u;
      const Vec2 grad_p =
          fd_gradient([&](const Vec2& y) { return tg.pressure(y, 0.0); }, x);
      const Vec2 res =
          strong_residual_mom(1.0, Vec2::Zero(), u, tg.velocity_gradient(x, 0.0), grad_p,
                              visc_div, tg.steady_body_force(x));
      CHECK(res.norm() <= 1e-6);  // limited by the FD pressure gradient
    }

    // Transient variant: free decay with du/dt = -8 pi^2 eta u and no force.
    {
      const Vec2 u = tg.velocity(x, t);
      const Vec2 udot = -8.0 * kPi * kPi * tg.eta * u;
      const Vec2 visc_div = -8.0 * kPi * kPi * tg.eta * u;
      const Vec2 grad_p =
          fd_gradient([&](const Vec2& y) { return tg.pressure(y, t); }, x);
      const Vec2 res = strong_residual_mom(1.0, udot, u, tg.velocity_gradient(x, t), grad_p,
                                           visc_div, Vec2::Zero());
      CHECK(res.norm() <= 1e-6);
    }
  }

  // Spot values fix the orientation conventions.
  CHECK((tg.velocity(Vec2(0.25, 0.0), 0.0) - Vec2(0.0, 1.0)).norm() <= 1e-14);
  CHECK(tg.velocity(Vec2(0.0, 0.0), 0.0).norm() <= 1e-14);
  const Vec2 body = tg.steady_body_force(Vec2(0.25, 0.0));
  CHECK((body - 8.0 * kPi * kPi * tg.eta * Vec2(0.0, 1.0)).norm() <= 1e-12);
  // Decay factors of velocity and pressure.
  const double decay_u = tg.velocity(Vec2(0.25, 0.0), 0.5).norm();
  CHECK(decay_u == doctest::Approx(std::exp(-8.0 * kPi * kPi * tg.eta * 0.5)).epsilon(1e-12));
  const double p_ratio = tg.pressure(Vec2(0.1, 0.2), 0.5) / tg.pressure(Vec2(0.1, 0.2), 0.0);
  CHECK(p_ratio == doctest::Approx(std::exp(-16.0 * kPi * kPi * tg.eta * 0.5)).epsilon(1e-12));
}

TEST_CASE("two-material conduction reference: continuity, flux match, harmonicity") {
  const TwoMaterialConduction ref(2.0, 5.0);

  for (double x : {0.1, 0.37, 0.62, 0.9}) {
    // Temperature continuity across y = 1/2.
    const double below = ref.temperature(Vec2(x, 0.5));
    const double above = ref.temperature(Vec2(x, 0.5 + 1e-13));
    CHECK(above == doctest::Approx(below).epsilon(1e-9));

    // Normal-flux continuity: kappa dT/dy evaluated one-sided on both strips.
    const double eps = 1e-7;
    const double dy_below =
        (ref.temperature(Vec2(x, 0.5)) - ref.temperature(Vec2(x, 0.5 - eps))) / eps;
    const double dy_above =
        (ref.temperature(Vec2(x, 0.5 + eps)) - ref.temperature(Vec2(x, 0.5))) / eps;
    CHECK(ref.kappa_bottom * dy_below ==
          doctest::Approx(ref.kappa_top * dy_above).epsilon(1e-5));
  }

  // Zero on the bottom and side walls.
  for (double x : {0.0, 0.3, 1.0}) CHECK(std::abs(ref.temperature(Vec2(x, 0.0))) <= 1e-14);
  for (double y : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(ref.temperature(Vec2(0.0, y))) <= 1e-14);
    CHECK(std::abs(ref.temperature(Vec2(1.0, y))) <= 1e-13);
  }

  // Harmonic in the interior of each strip.
  std::mt19937 rng(11u);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  for (int trial = 0; trial < 40; ++trial) {
    Vec2 x(dist(rng), dist(rng));
    if (std::abs(x[1] - 0.5) < 0.01) x[1] += 0.02;  // keep the stencil on one strip
    const double lap =
        fd_laplacian([&](const Vec2& y) { return ref.temperature(y); }, x);
    CHECK(std::abs(lap) <= 1e-4);
  }
}

TEST_CASE("annular drag-flow reference: wall values, direction, radial pressure") {
  const double ri = 0.5, ro = 1.0, omega = 0.8, rho = 1.3;
  const AnnularCouette ref(ri, ro, omega, rho);

  CHECK(ref.u_theta(ri) == doctest::Approx(omega * ri).epsilon(1e-13));
  CHECK(ref.u_theta(ro) == doctest::Approx(0.0).epsilon(1e-13));

  // The velocity is azimuthal: u . x = 0 and |u| = |u_theta|.
  std::mt19937 rng(17u);
  std::uniform_real_distribution<double> rad(ri, ro);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 20; ++trial) {
    const double r = rad(rng), th = ang(rng);
    const Vec2 x(r * std::cos(th), r * std::sin(th));
    const Vec2 u = ref.velocity(x);
    CHECK(std::abs(u.dot(x)) <= 1e-12);
    CHECK(u.norm() == doctest::Approx(std::abs(ref.u_theta(r))).epsilon(1e-12));

    // Centrifugal balance dp/dr = rho u_theta^2 / r.
    const double eps = 1e-6;
    const Vec2 er = x / r;
    const double dpdr = (ref.pressure(x + eps * er) - ref.pressure(x - eps * er)) / (2 * eps);
    CHECK(dpdr == doctest::Approx(rho * ref.u_theta(r) * ref.u_theta(r) / r).epsilon(1e-5));
  }
  CHECK(std::abs(ref.pressure(Vec2(ro, 0.0))) <= 1e-13);
}

TEST_CASE("rate fitting recovers exact power laws and windows late samples") {
  std::vector<double> h{0.2, 0.1, 0.05, 0.025};
  std::vector<double> err;
  for (double hi : h) err.push_back(3.0 * std::pow(hi, 2.35));
  CHECK(fit_rate(h, err, 3) == doctest::Approx(2.35).epsilon(1e-10));
  CHECK(fit_rate(h, err, 4) == doctest::Approx(2.35).epsilon(1e-10));

  // A corrupt first sample must not affect a window of the last three.
  std::vector<double> polluted = err;
  polluted[0] = 1e3;
  CHECK(fit_rate(h, polluted, 3) == doctest::Approx(2.35).epsilon(1e-10));

  CHECK_THROWS_AS(fit_rate({0.1}, {1.0}, 3), ConfigError);
  CHECK_THROWS_AS(fit_rate({0.1, 0.2}, {1.0}, 3), ConfigError);

  // Uniformly tiny errors mean "discretely exact": the report returns rate 0.
  ErrorReport report;
  for (int level = 0; level < 3; ++level) {
    ErrorRow row;
    row.level = level;
    row.h = 0.1 / (1 << level);
    row.err_u = 1e-15;
    report.rows.push_back(row);
  }
  report.fit_rates();
  CHECK(report.rate_u == 0.0);
}

TEST_CASE("domain error norms: interpolated exact fields register as exact") {
  CoupledProblem prob;
  Subdomain sub;
  sub.name = "box";
  sub.mesh = build_structured_quad_mesh({0.0, 0.0, 1.0, 1.0}, 3, 3, 0);
  prob.subdomains.push_back(std::move(sub));
  for (const char* tag : {"left", "right", "top", "bottom"}) prob.bcs[tag] = BoundaryCondition{};
  CoupledSolver solver(prob);

  const auto exact_u = [](const Vec2& x) { return Vec2(x.y(), 0.5 * x.x()); };
  const auto exact_p = [](const Vec2& x) { return 2.0 * x.x() - x.y(); };
  const auto exact_T = [](const Vec2& x) { return 1.0 + x.x() + 2.0 * x.y(); };
  solver.set_initial([&](int, const Vec2& x) { return exact_u(x); },
                     [&](int, const Vec2& x) { return exact_p(x); },
                     [&](int, const Vec2& x) { return exact_T(x); });

  const DomainErrors errs = l2_domain_errors(solver, exact_u, exact_p, exact_T);
  CHECK(errs.err_u <= 1e-12);
  CHECK(errs.err_p <= 1e-12);
  CHECK(errs.err_T <= 1e-12);
  CHECK(errs.norm_u == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-12));
  CHECK(errs.norm_p == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(errs.norm_T == doctest::Approx(std::sqrt(20.0 / 3.0)).epsilon(1e-12));

  // Errors are absolute: a unit constant offset integrates to one.
  const DomainErrors off = l2_domain_errors(
      solver, [&](const Vec2& x) -> Vec2 { return exact_u(x) + Vec2(1.0, 0.0); }, nullptr,
      nullptr);
  CHECK(off.err_u == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("four-quadrant vortex problem wiring") {
  const TaylorGreen tg{0.1};
  const CoupledProblem steady = make_taylor_green_problem(1, true, 30.0, tg);
  REQUIRE(steady.subdomains.size() == 4);
  CHECK(steady.subdomains[0].mesh.n_elements() == 8 * 8);
  CHECK(steady.subdomains[1].mesh.n_elements() == 6 * 6);
  CHECK(steady.subdomains[2].mesh.n_elements() == 6 * 6);
  CHECK(steady.subdomains[3].mesh.n_elements() == 8 * 8);
  CHECK(steady.interfaces.size() == 4);
  CHECK(steady.bcs.count("outer") == 1);
  CHECK(steady.anchor.has_value());
  CHECK(steady.stab.alpha == 30.0);
  CHECK(steady.stab.recovery);
  CHECK(steady.time.steady);
  CHECK_FALSE(steady.solve_temp);

  const CoupledProblem transient = make_taylor_green_problem(0, false, 10.0, tg);
  CHECK_FALSE(transient.time.steady);
  CHECK(transient.time.dt == 2.5e-4);
  CHECK(transient.time.steps == 10);
  CHECK_FALSE(transient.stab.recovery);
  CHECK(transient.stab.alpha == 10.0);

  // The coupled problem validates and builds its interface cuts.
  CoupledSolver solver(make_taylor_green_problem(0, true, 30.0, tg));
  CHECK(solver.interfaces().size() == 4);
  for (const auto& iface : solver.interfaces()) {
    CHECK(iface.covered_measure() == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("steady vortex study: errors and jumps shrink from level 0 to 1") {
  StudyOptions opt;
  opt.levels = 2;
  opt.alpha = 30.0;
  const ErrorReport report = taylor_green_steady_study(opt);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].h == doctest::Approx(0.5 / 4.0).epsilon(1e-12));
  CHECK(report.rows[1].h == doctest::Approx(0.5 / 8.0).epsilon(1e-12));
  for (const ErrorRow& row : report.rows) {
    CHECK(row.err_u > 0.0);
    CHECK(row.err_p > 0.0);
    CHECK(row.jump_u > 0.0);
  }
  CHECK(report.rows[1].err_u < report.rows[0].err_u);
  CHECK(report.rows[1].err_p < report.rows[0].err_p);
  CHECK(report.rows[1].jump_u < report.rows[0].jump_u);
}

TEST_CASE("node-matching interfaces reproduce the merged single-mesh solution") {
  const MatchingOracleReport report = matching_interface_oracle(30.0);
  CHECK(report.norm_u > 0.0);
  CHECK(report.norm_T > 0.0);
  CHECK(report.du_rel <= 1e-6);
  CHECK(report.dT_rel <= 1e-6);
}

#include "slidemesh/nitsche.hpp"

#include <cmath>

namespace slidemesh {

InterfaceWeights weights_from_coefficients(double ci, double cj) {
  if (!(ci > 0.0) || !(cj > 0.0)) {
    throw SolverError("interface weights: coefficients must be positive");
  }
  InterfaceWeights w;
  w.ki = cj / (ci + cj);
  w.kj = ci / (ci + cj);
  return w;
}

double interface_penalty(double ci, double cj, double hi, double hj, double alpha) {
  return 0.5 * alpha * (ci * cj / (ci + cj)) * (1.0 / hi + 1.0 / hj);
}

namespace {

struct TraceState {
  MappedBasis basis;
  Vec2 u = Vec2::Zero();
  Vec2 u_ale = Vec2::Zero();
  Mat2 grad_u = Mat2::Zero();
  double p = 0.0;
  double T = 0.0;
  Vec2 grad_T = Vec2::Zero();
  double eta = 0.0;
  double h = 0.0;
};

TraceState evaluate_trace(const ElementInputs& in, const Vec2& ref, const Vec2& normal,
                          const MaterialModel& model) {
  TraceState s;
  s.basis = map_basis(in.coords, ref);
  for (int a = 0; a < 4; ++a) {
    const double N = s.basis.values[a];
    const Vec2& g = s.basis.gradients[a];
    s.u += N * in.u[a];
    s.u_ale += N * in.u_ale[a];
    s.grad_u += in.u[a] * g.transpose();
    s.p += N * in.p[a];
    s.T += N * in.T[a];
    s.grad_T += in.T[a] * g;
  }
  s.eta = model.viscosity(shear_rate(s.grad_u), s.T);
  s.h = directional_width(s.basis.metric, normal);
  return s;
}

/// [2 eta eps(N_c e_k) n]_i = eta * (dik * (g_c . n) + n_k * g_c[i])
inline double viscous_flux_derivative(double eta, const Vec2& gc, const Vec2& n, int i, int k) {
  const double gcn = gc.dot(n);
  return eta * (((i == k) ? gcn : 0.0) + n[k] * gc[i]);
}

}  // namespace

void interface_residual_flow(const CutRecord& cut, const ElementInputs& side_a,
                             const ElementInputs& side_b, const PhysicalParams& phys_a,
                             const PhysicalParams& phys_b, const MaterialModel& model_a,
                             const MaterialModel& model_b, const StabilizationConfig& stab,
                             TwoSideLocal& out) {
  using namespace interface_terms;
  const unsigned mask = stab.interface_mask;
  const double rho_m = 0.5 * (phys_a.rho + phys_b.rho);

  for (const CutPoint& pt : cut.points) {
    const Vec2& n = pt.normal;
    const TraceState sa = evaluate_trace(side_a, pt.ref_a, n, model_a);
    const TraceState sb = evaluate_trace(side_b, pt.ref_b, n, model_b);
    const double w = pt.weight;

    const InterfaceWeights kw = weights_from_coefficients(sa.eta, sb.eta);
    const double tau = interface_penalty(sa.eta, sb.eta, sa.h, sb.h, stab.alpha);

    const Vec2 jump_u = sa.u - sb.u;
    const double p_avg = kw.ki * sa.p + kw.kj * sb.p;
    const Vec2 flux_avg = kw.ki * (2.0 * sa.eta * strain_rate(sa.grad_u) * n) +
                          kw.kj * (2.0 * sb.eta * strain_rate(sb.grad_u) * n);
    const Vec2 u_mean = 0.5 * (sa.u + sb.u);
    const Vec2 ale_mean = 0.5 * (sa.u_ale + sb.u_ale);
    const double beta = rho_m * (u_mean - ale_mean).dot(n);

    // Residual rows. Side s contributes with jump sign js (+1 for a, -1 for b)
    // and mean weight 1/2 on both sides.
    for (int side = 0; side < 2; ++side) {
      const TraceState& ts = side == 0 ? sa : sb;
      const double js = side == 0 ? 1.0 : -1.0;
      const double kk = side == 0 ? kw.ki : kw.kj;
      const int row0 = side == 0 ? 0 : 16;
      for (int a = 0; a < 4; ++a) {
        const double Na = ts.basis.values[a];
        const Vec2& ga = ts.basis.gradients[a];
        const double gan = ga.dot(n);
        for (int i = 0; i < 2; ++i) {
          double r = 0.0;
          if (mask & kPressureConsistency) r += js * Na * p_avg * n[i];
          if (mask & kViscousConsistency) r -= js * Na * flux_avg[i];
          if (mask & kViscousAdjoint) {
            r -= kk * ts.eta * (gan * jump_u[i] + n[i] * ga.dot(jump_u));
          }
          if (mask & kPenalty) r += js * tau * Na * jump_u[i];
          if (mask & kUpwindCentered) r += 0.5 * Na * beta * jump_u[i];
          if (mask & kUpwindJump) r -= js * 0.5 * std::abs(beta) * Na * jump_u[i];
          out.res(row0 + 4 * a + i) += w * r;
        }
        if (mask & kPressureAdjoint) {
          out.res(row0 + 4 * a + 2) -= w * kk * Na * n.dot(jump_u);
        }
      }
    }

    // Jacobian blocks: trial side t with jump sign jt.
    for (int side = 0; side < 2; ++side) {
      const TraceState& ts = side == 0 ? sa : sb;
      const double js = side == 0 ? 1.0 : -1.0;
      const double kk = side == 0 ? kw.ki : kw.kj;
      const int row0 = side == 0 ? 0 : 16;
      for (int trial = 0; trial < 2; ++trial) {
        const TraceState& tt = trial == 0 ? sa : sb;
        const double jt = trial == 0 ? 1.0 : -1.0;
        const double kt = trial == 0 ? kw.ki : kw.kj;
        const int col0 = trial == 0 ? 0 : 16;
        for (int a = 0; a < 4; ++a) {
          const double Na = ts.basis.values[a];
          const Vec2& ga = ts.basis.gradients[a];
          const double gan = ga.dot(n);
          for (int c = 0; c < 4; ++c) {
            const double Nc = tt.basis.values[c];
            const Vec2& gc = tt.basis.gradients[c];
            for (int i = 0; i < 2; ++i) {
              // momentum rows vs pressure column
              if (mask & kPressureConsistency) {
                out.jac(row0 + 4 * a + i, col0 + 4 * c + 2) += w * js * Na * kt * Nc * n[i];
              }
              for (int k = 0; k < 2; ++k) {
                double j = 0.0;
                if (mask & kViscousConsistency) {
                  j -= js * Na * kt * viscous_flux_derivative(tt.eta, gc, n, i, k);
                }
                if (mask & kViscousAdjoint) {
                  j -= kk * ts.eta * (gan * ((i == k) ? 1.0 : 0.0) + n[i] * ga[k]) * jt * Nc;
                }
                if (mask & kPenalty) j += js * tau * Na * jt * Nc * ((i == k) ? 1.0 : 0.0);
                if (mask & kUpwindCentered) {
                  j += 0.5 * Na * beta * jt * Nc * ((i == k) ? 1.0 : 0.0);
                }
                if (mask & kUpwindJump) {
                  j -= js * 0.5 * std::abs(beta) * Na * jt * Nc * ((i == k) ? 1.0 : 0.0);
                }
                out.jac(row0 + 4 * a + i, col0 + 4 * c + k) += w * j;
              }
            }
            // continuity rows vs velocity columns
            if (mask & kPressureAdjoint) {
              for (int k = 0; k < 2; ++k) {
                out.jac(row0 + 4 * a + 2, col0 + 4 * c + k) -= w * kk * Na * n[k] * jt * Nc;
              }
            }
          }
        }
      }
    }
  }
}

void interface_residual_temp(const CutRecord& cut, const ElementInputs& side_a,
                             const ElementInputs& side_b, const PhysicalParams& phys_a,
                             const PhysicalParams& phys_b, const MaterialModel& model_a,
                             const MaterialModel& model_b, const StabilizationConfig& stab,
                             TwoSideLocal& out) {
  using namespace interface_terms;
  const unsigned mask = stab.interface_mask;
  const double rho_cp_m = 0.5 * (phys_a.rho * phys_a.cp + phys_b.rho * phys_b.cp);

  for (const CutPoint& pt : cut.points) {
    const Vec2& n = pt.normal;
    const TraceState sa = evaluate_trace(side_a, pt.ref_a, n, model_a);
    const TraceState sb = evaluate_trace(side_b, pt.ref_b, n, model_b);
    const double w = pt.weight;

    const InterfaceWeights kw = weights_from_coefficients(phys_a.kappa, phys_b.kappa);
    const double tau = interface_penalty(phys_a.kappa, phys_b.kappa, sa.h, sb.h, stab.alpha);

    const double jump_T = sa.T - sb.T;
    const double flux_avg = kw.ki * phys_a.kappa * sa.grad_T.dot(n) +
                            kw.kj * phys_b.kappa * sb.grad_T.dot(n);
    const Vec2 u_mean = 0.5 * (sa.u + sb.u);
    const Vec2 ale_mean = 0.5 * (sa.u_ale + sb.u_ale);
    const double beta = rho_cp_m * (u_mean - ale_mean).dot(n);

    for (int side = 0; side < 2; ++side) {
      const TraceState& ts = side == 0 ? sa : sb;
      const double js = side == 0 ? 1.0 : -1.0;
      const double kk = side == 0 ? kw.ki : kw.kj;
      const double kap = side == 0 ? phys_a.kappa : phys_b.kappa;
      const int row0 = side == 0 ? 0 : 16;
      for (int a = 0; a < 4; ++a) {
        const double Na = ts.basis.values[a];
        const double gan = ts.basis.gradients[a].dot(n);
        double r = 0.0;
        if (mask & kViscousConsistency) r -= js * Na * flux_avg;
        if (mask & kViscousAdjoint) r -= kk * kap * gan * jump_T;
        if (mask & kPenalty) r += js * tau * Na * jump_T;
        if (mask & kUpwindCentered) r += 0.5 * Na * beta * jump_T;
        if (mask & kUpwindJump) r -= js * 0.5 * std::abs(beta) * Na * jump_T;
        out.res(row0 + 4 * a + 3) += w * r;
      }
    }

    for (int side = 0; side < 2; ++side) {
      const TraceState& ts = side == 0 ? sa : sb;
      const double js = side == 0 ? 1.0 : -1.0;
      const double kk = side == 0 ? kw.ki : kw.kj;
      const double kap = side == 0 ? phys_a.kappa : phys_b.kappa;
      const int row0 = side == 0 ? 0 : 16;
      for (int trial = 0; trial < 2; ++trial) {
        const TraceState& tt = trial == 0 ? sa : sb;
        const double jt = trial == 0 ? 1.0 : -1.0;
        const double kt = trial == 0 ? kw.ki : kw.kj;
        const double kap_t = trial == 0 ? phys_a.kappa : phys_b.kappa;
        const int col0 = trial == 0 ? 0 : 16;
        for (int a = 0; a < 4; ++a) {
          const double Na = ts.basis.values[a];
          const double gan = ts.basis.gradients[a].dot(n);
          for (int c = 0; c < 4; ++c) {
            const double Nc = tt.basis.values[c];
            const double gcn = tt.basis.gradients[c].dot(n);
            double j = 0.0;
            if (mask & kViscousConsistency) j -= js * Na * kt * kap_t * gcn;
            if (mask & kViscousAdjoint) j -= kk * kap * gan * jt * Nc;
            if (mask & kPenalty) j += js * tau * Na * jt * Nc;
            if (mask & kUpwindCentered) j += 0.5 * Na * beta * jt * Nc;
            if (mask & kUpwindJump) j -= js * 0.5 * std::abs(beta) * Na * jt * Nc;
            out.jac(row0 + 4 * a + 3, col0 + 4 * c + 3) += w * j;
          }
        }
      }
    }
  }
}

void weak_dirichlet_flow(const SignedFacetQuadrature& quad, const ElementInputs& elem,
                         const std::function<Vec2(const Vec2&)>& dirichlet_value,
                         const PhysicalParams&, const MaterialModel& model,
                         const StabilizationConfig& stab, LocalSystem& out) {
  for (const auto& pt : quad.points) {
    const Vec2& n = pt.normal;
    const TraceState s = evaluate_trace(elem, pt.ref, n, model);
    const double w = pt.weight;
    const Vec2 mismatch = s.u - dirichlet_value(pt.physical);
    const Vec2 flux = 2.0 * s.eta * strain_rate(s.grad_u) * n;
    const double penalty = stab.alpha * s.eta / s.h;

    for (int a = 0; a < 4; ++a) {
      const double Na = s.basis.values[a];
      const Vec2& ga = s.basis.gradients[a];
      const double gan = ga.dot(n);
      for (int i = 0; i < 2; ++i) {
        double r = Na * s.p * n[i];
        r -= Na * flux[i];
        r -= s.eta * (gan * mismatch[i] + n[i] * ga.dot(mismatch));
        r += penalty * Na * mismatch[i];
        out.res(4 * a + i) += w * r;
      }
      out.res(4 * a + 2) -= w * Na * n.dot(mismatch);

      for (int c = 0; c < 4; ++c) {
        const double Nc = s.basis.values[c];
        const Vec2& gc = s.basis.gradients[c];
        for (int i = 0; i < 2; ++i) {
          out.jac(4 * a + i, 4 * c + 2) += w * Na * Nc * n[i];
          for (int k = 0; k < 2; ++k) {
            double j = -Na * viscous_flux_derivative(s.eta, gc, n, i, k);
            j -= s.eta * (gan * ((i == k) ? 1.0 : 0.0) + n[i] * ga[k]) * Nc;
            j += penalty * Na * Nc * ((i == k) ? 1.0 : 0.0);
            out.jac(4 * a + i, 4 * c + k) += w * j;
          }
        }
        for (int k = 0; k < 2; ++k) {
          out.jac(4 * a + 2, 4 * c + k) -= w * Na * n[k] * Nc;
        }
      }
    }
  }
}

void weak_dirichlet_temp(const SignedFacetQuadrature& quad, const ElementInputs& elem,
                         const std::function<double(const Vec2&)>& dirichlet_value,
                         const PhysicalParams& phys, const MaterialModel& model,
                         const StabilizationConfig& stab, LocalSystem& out) {
  for (const auto& pt : quad.points) {
    const Vec2& n = pt.normal;
    const TraceState s = evaluate_trace(elem, pt.ref, n, model);
    const double w = pt.weight;
    const double mismatch = s.T - dirichlet_value(pt.physical);
    const double flux = phys.kappa * s.grad_T.dot(n);
    const double penalty = stab.alpha * phys.kappa / s.h;

    for (int a = 0; a < 4; ++a) {
      const double Na = s.basis.values[a];
      const double gan = s.basis.gradients[a].dot(n);
      double r = -Na * flux;
      r -= phys.kappa * gan * mismatch;
      r += penalty * Na * mismatch;
      out.res(4 * a + 3) += w * r;

      for (int c = 0; c < 4; ++c) {
        const double Nc = s.basis.values[c];
        const double gcn = s.basis.gradients[c].dot(n);
        double j = -Na * phys.kappa * gcn;
        j -= phys.kappa * gan * Nc;
        j += penalty * Na * Nc;
        out.jac(4 * a + 3, 4 * c + 3) += w * j;
      }
    }
  }
}

}  // namespace slidemesh

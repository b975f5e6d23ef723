#include "slidemesh/forms.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace slidemesh {

namespace {

constexpr double kCI = 36.0;

Taus standard_taus(const TauInputs& in) {
  const double transient = in.steady ? 0.0 : (2.0 / in.dt) * (2.0 / in.dt);
  const double advective = in.u_rel.dot(in.metric * in.u_rel);
  const double metric_sq = in.metric.cwiseProduct(in.metric).sum();
  const double nu = in.eta / in.rho;
  const double diffusive = kCI * nu * nu * metric_sq;
  const double sum_mom = transient + advective + diffusive;
  if (!(sum_mom > 0.0)) {
    throw GeometryError("compute_taus: degenerate element metric, all tau contributions vanish");
  }
  Taus taus;
  taus.mom = 1.0 / (in.rho * std::sqrt(sum_mom));
  taus.cont = 1.0 / (taus.mom * in.metric.trace());
  const double alpha_t = in.kappa / (in.rho * in.cp);
  const double sum_temp = transient + advective + kCI * alpha_t * alpha_t * metric_sq;
  if (!(sum_temp > 0.0)) {
    throw GeometryError("compute_taus: degenerate element metric for the thermal tau");
  }
  taus.temp = 1.0 / (in.rho * in.cp * std::sqrt(sum_temp));
  return taus;
}

std::map<std::string, TauFunction>& tau_registry() {
  static std::map<std::string, TauFunction> registry = {
      {"standard", standard_taus},
      {"none", [](const TauInputs&) { return Taus{}; }},
  };
  return registry;
}

}  // namespace

void register_tau_variant(const std::string& name, TauFunction fn) {
  tau_registry()[name] = std::move(fn);
}

Taus compute_taus(const TauInputs& inputs, const std::string& variant) {
  const auto& registry = tau_registry();
  const auto it = registry.find(variant);
  if (it == registry.end()) {
    throw ConfigError("compute_taus: unknown tau variant '" + variant + "'");
  }
  return it->second(inputs);
}

Vec2 strong_residual_mom(double rho, const Vec2& udot, const Vec2& u_rel, const Mat2& grad_u,
                         const Vec2& grad_p, const Vec2& recovered_div, const Vec2& body_force) {
  return rho * (udot + grad_u * u_rel) + grad_p - recovered_div - rho * body_force;
}

double strong_residual_temp(double rho_cp, double Tdot, const Vec2& u_rel, const Vec2& grad_T,
                            double dissipation) {
  return rho_cp * (Tdot + u_rel.dot(grad_T)) - dissipation;
}

MappedBasis map_basis(const std::array<Vec2, 4>& coords, const Vec2& ref) {
  MappedBasis basis;
  basis.values = ReferenceElement::shape_values(ref);
  const auto ref_grads = ReferenceElement::shape_gradients(ref);
  Mat2 jac = Mat2::Zero();
  for (int a = 0; a < 4; ++a) jac += coords[a] * ref_grads[a].transpose();
  basis.jacobian = jac;
  basis.det = jac.determinant();
  if (!(basis.det > 0.0)) {
    throw GeometryError("map_basis: non-positive Jacobian determinant");
  }
  const Mat2 inv = jac.inverse();  // dxi/dx
  for (int a = 0; a < 4; ++a) basis.gradients[a] = inv.transpose() * ref_grads[a];
  basis.metric = inv.transpose() * inv;
  return basis;
}

namespace {

/// Field values interpolated at one element point.
struct PointState {
  Vec2 u = Vec2::Zero();
  Vec2 u_prev = Vec2::Zero();
  Vec2 u_ale = Vec2::Zero();
  Vec2 u_rel = Vec2::Zero();
  Vec2 udot = Vec2::Zero();
  Mat2 grad_u = Mat2::Zero();
  double p = 0.0;
  Vec2 grad_p = Vec2::Zero();
  double T = 0.0;
  double Tdot = 0.0;
  Vec2 grad_T = Vec2::Zero();
  Vec2 rec_div = Vec2::Zero();
  double eta = 0.0;
};

PointState evaluate_point(const ElementInputs& in, const MappedBasis& basis,
                          const MaterialModel& model, const TimeContext& time) {
  PointState s;
  for (int a = 0; a < 4; ++a) {
    const double N = basis.values[a];
    const Vec2& g = basis.gradients[a];
    s.u += N * in.u[a];
    s.u_prev += N * in.u_prev[a];
    s.u_ale += N * in.u_ale[a];
    s.grad_u += in.u[a] * g.transpose();
    s.p += N * in.p[a];
    s.grad_p += in.p[a] * g;
    s.T += N * in.T[a];
    s.grad_T += in.T[a] * g;
    if (!time.steady) s.Tdot += N * (in.T[a] - in.T_prev[a]) / time.dt;
  }
  s.u_rel = s.u - s.u_ale;
  if (!time.steady) s.udot = (s.u - s.u_prev) / time.dt;
  if (in.has_recovery) s.rec_div = recovered_divergence(in.recovered, basis);
  s.eta = model.viscosity(shear_rate(s.grad_u), s.T);
  return s;
}

}  // namespace

void element_residual_flow(const ElementInputs& in, const PhysicalParams& phys,
                           const MaterialModel& model, const StabilizationConfig& stab,
                           const TimeContext& time, LocalSystem& out) {
  const QuadRule2d rule = tensor_gauss(stab.volume_points);
  const double rho = phys.rho;
  const double inv_dt = time.steady ? 0.0 : 1.0 / time.dt;

  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const MappedBasis basis = map_basis(in.coords, rule.points[q]);
    const double jxw = rule.weights[q] * basis.det;
    const PointState s = evaluate_point(in, basis, model, time);

    TauInputs tau_in;
    tau_in.metric = basis.metric;
    tau_in.u_rel = s.u_rel;
    tau_in.rho = rho;
    tau_in.cp = phys.cp;
    tau_in.kappa = phys.kappa;
    tau_in.eta = s.eta;
    tau_in.dt = time.dt;
    tau_in.steady = time.steady;
    const Taus taus = compute_taus(tau_in, stab.tau_variant);

    Vec2 x_phys = Vec2::Zero();
    for (int a = 0; a < 4; ++a) x_phys += basis.values[a] * in.coords[a];
    const Vec2 body = phys.body_force_at(x_phys);

    const Mat2 eps = strain_rate(s.grad_u);
    const double div_u = s.grad_u.trace();
    const Vec2 r_mom =
        strong_residual_mom(rho, s.udot, s.u_rel, s.grad_u, s.grad_p, s.rec_div, body);
    const Vec2 conv = s.grad_u * s.u_rel;  // (u_rel . grad) u

    std::array<double, 4> adv_test{};  // u_rel . grad N_a
    for (int a = 0; a < 4; ++a) adv_test[a] = s.u_rel.dot(basis.gradients[a]);

    for (int a = 0; a < 4; ++a) {
      const double Na = basis.values[a];
      const Vec2& ga = basis.gradients[a];
      for (int i = 0; i < 2; ++i) {
        double r = Na * rho * (s.udot[i] + conv[i]);          // Galerkin inertia + convection
        r += 2.0 * s.eta * eps.row(i).dot(ga);                // viscous
        r -= ga[i] * s.p;                                     // pressure
        r += rho * adv_test[a] * taus.mom * r_mom[i];         // SUPG
        r += ga[i] * taus.cont * div_u;                       // grad-div
        r -= Na * rho * body[i];
        out.res(4 * a + i) += jxw * r;
      }
      // continuity row: Galerkin divergence + PSPG
      out.res(4 * a + 2) += jxw * (Na * div_u + taus.mom * ga.dot(r_mom));
    }

    for (int a = 0; a < 4; ++a) {
      const double Na = basis.values[a];
      const Vec2& ga = basis.gradients[a];
      for (int b = 0; b < 4; ++b) {
        const double Nb = basis.values[b];
        const Vec2& gb = basis.gradients[b];
        const double adv_b = adv_test[b];  // u_rel . grad N_b
        const double lap = ga.dot(gb);

        for (int i = 0; i < 2; ++i) {
          for (int k = 0; k < 2; ++k) {
            double j = 0.0;
            const double dik = (i == k) ? 1.0 : 0.0;
            // d r_mom_i / d u_bk with viscosity, tau and recovery frozen
            const double dr = rho * (dik * (Nb * inv_dt + adv_b) + Nb * s.grad_u(i, k));
            j += Na * dr;                                    // Galerkin
            j += s.eta * (dik * lap + ga[k] * gb[i]);        // viscous
            j += rho * adv_test[a] * taus.mom * dr;          // SUPG state derivative
            j += rho * Nb * ga[k] * taus.mom * r_mom[i];     // SUPG test derivative
            j += ga[i] * taus.cont * gb[k];                  // grad-div
            out.jac(4 * a + i, 4 * b + k) += jxw * j;

            // continuity row vs velocity (one pass per k)
            if (i == 0) {
              double jc = Na * gb[k];
              jc += taus.mom * ga[k] * rho * (Nb * inv_dt + adv_b);
              jc += taus.mom * rho * Nb * s.grad_u.col(k).dot(ga);
              out.jac(4 * a + 2, 4 * b + k) += jxw * jc;
            }
          }
          // momentum row vs pressure
          out.jac(4 * a + i, 4 * b + 2) +=
              jxw * (-ga[i] * Nb + rho * adv_test[a] * taus.mom * gb[i]);
        }
        // continuity row vs pressure (PSPG)
        out.jac(4 * a + 2, 4 * b + 2) += jxw * taus.mom * lap;
      }
    }
  }
}

void element_residual_temp(const ElementInputs& in, const PhysicalParams& phys,
                           const MaterialModel& model, const StabilizationConfig& stab,
                           const TimeContext& time, LocalSystem& out) {
  const QuadRule2d rule = tensor_gauss(stab.volume_points);
  const double rho_cp = phys.rho * phys.cp;
  const double inv_dt = time.steady ? 0.0 : 1.0 / time.dt;

  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const MappedBasis basis = map_basis(in.coords, rule.points[q]);
    const double jxw = rule.weights[q] * basis.det;
    const PointState s = evaluate_point(in, basis, model, time);

    TauInputs tau_in;
    tau_in.metric = basis.metric;
    tau_in.u_rel = s.u_rel;
    tau_in.rho = phys.rho;
    tau_in.cp = phys.cp;
    tau_in.kappa = phys.kappa;
    tau_in.eta = s.eta;
    tau_in.dt = time.dt;
    tau_in.steady = time.steady;
    const Taus taus = compute_taus(tau_in, stab.tau_variant);

    const Mat2 eps = strain_rate(s.grad_u);
    const double phi = viscous_dissipation(s.grad_u, s.eta);
    const double r_temp = strong_residual_temp(rho_cp, s.Tdot, s.u_rel, s.grad_T, phi);

    std::array<double, 4> adv_test{};
    for (int a = 0; a < 4; ++a) adv_test[a] = s.u_rel.dot(basis.gradients[a]);

    for (int a = 0; a < 4; ++a) {
      const double Na = basis.values[a];
      const Vec2& ga = basis.gradients[a];
      double r = Na * rho_cp * (s.Tdot + s.u_rel.dot(s.grad_T));
      r += phys.kappa * ga.dot(s.grad_T);
      r += rho_cp * adv_test[a] * taus.temp * r_temp;
      r -= Na * phi;
      out.res(4 * a + 3) += jxw * r;

      for (int b = 0; b < 4; ++b) {
        const double Nb = basis.values[b];
        const Vec2& gb = basis.gradients[b];
        const double drT = rho_cp * (Nb * inv_dt + adv_test[b]);
        double j = Na * drT + phys.kappa * ga.dot(gb);
        j += rho_cp * adv_test[a] * taus.temp * drT;
        out.jac(4 * a + 3, 4 * b + 3) += jxw * j;

        // coupling to velocity: convection of T, dissipation source, SUPG
        for (int k = 0; k < 2; ++k) {
          const double dphi = 4.0 * s.eta * eps.row(k).dot(gb);
          const double drU = rho_cp * Nb * s.grad_T[k] - dphi;
          double ju = Na * rho_cp * Nb * s.grad_T[k] - Na * dphi;
          ju += rho_cp * adv_test[a] * taus.temp * drU;
          ju += rho_cp * Nb * ga[k] * taus.temp * r_temp;
          out.jac(4 * a + 3, 4 * b + k) += jxw * ju;
        }
      }
    }
  }
}

namespace {

struct EdgeQuadratureContext {
  Vec2 ref;
  double jxw;
  MappedBasis basis;
  Vec2 physical;
};

template <typename Callback>
void for_each_edge_point(const ElementInputs& in, int local_edge, int rule_points,
                         Callback&& callback) {
  const GaussRule1d gauss = gauss_legendre(rule_points);
  for (std::size_t q = 0; q < gauss.points.size(); ++q) {
    EdgeQuadratureContext ctx;
    ctx.ref = ReferenceElement::edge_point(local_edge, gauss.points[q]);
    ctx.basis = map_basis(in.coords, ctx.ref);
    const Vec2 tangent = ctx.basis.jacobian * ReferenceElement::edge_direction(local_edge);
    ctx.jxw = gauss.weights[q] * tangent.norm();
    ctx.physical = Vec2::Zero();
    for (int a = 0; a < 4; ++a) ctx.physical += ctx.basis.values[a] * in.coords[a];
    callback(ctx);
  }
}

}  // namespace

void facet_neumann_flow(const ElementInputs& in, int local_edge,
                        const std::function<Vec2(const Vec2&)>& traction, int rule_points,
                        LocalSystem& out) {
  for_each_edge_point(in, local_edge, rule_points, [&](const EdgeQuadratureContext& ctx) {
    const Vec2 h = traction(ctx.physical);
    for (int a = 0; a < 4; ++a) {
      for (int i = 0; i < 2; ++i) {
        out.res(4 * a + i) -= ctx.jxw * ctx.basis.values[a] * h[i];
      }
    }
  });
}

void facet_neumann_temp(const ElementInputs& in, int local_edge,
                        const std::function<double(const Vec2&)>& flux, int rule_points,
                        LocalSystem& out) {
  for_each_edge_point(in, local_edge, rule_points, [&](const EdgeQuadratureContext& ctx) {
    const double h = flux(ctx.physical);
    for (int a = 0; a < 4; ++a) {
      out.res(4 * a + 3) -= ctx.jxw * ctx.basis.values[a] * h;
    }
  });
}

RecoveredStressField recover_stress_divergence(const Mesh& mesh, const std::vector<Vec2>& nodal_u,
                                               const std::vector<double>& nodal_T,
                                               const MaterialModel& model, int volume_points,
                                               bool enabled) {
  RecoveredStressField field;
  field.enabled = enabled;
  field.nodal.assign(mesh.node_coords.size(), Eigen::Vector3d::Zero());
  if (!enabled) return field;

  std::vector<double> lumped_mass(mesh.node_coords.size(), 0.0);
  const QuadRule2d rule = tensor_gauss(volume_points);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    std::array<Vec2, 4> coords;
    for (int a = 0; a < 4; ++a) coords[a] = mesh.node_coords[conn[a]];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const MappedBasis basis = map_basis(coords, rule.points[q]);
      const double jxw = rule.weights[q] * basis.det;
      Mat2 grad_u = Mat2::Zero();
      double T = 0.0;
      for (int a = 0; a < 4; ++a) {
        grad_u += nodal_u[conn[a]] * basis.gradients[a].transpose();
        T += basis.values[a] * nodal_T[conn[a]];
      }
      const double eta = model.viscosity(shear_rate(grad_u), T);
      const Mat2 stress = 2.0 * eta * strain_rate(grad_u);
      const Eigen::Vector3d flat(stress(0, 0), stress(1, 1), stress(0, 1));
      for (int a = 0; a < 4; ++a) {
        field.nodal[conn[a]] += jxw * basis.values[a] * flat;
        lumped_mass[conn[a]] += jxw * basis.values[a];
      }
    }
  }
  for (std::size_t i = 0; i < field.nodal.size(); ++i) {
    if (lumped_mass[i] > 0.0) field.nodal[i] /= lumped_mass[i];
  }
  return field;
}

Vec2 recovered_divergence(const std::array<Eigen::Vector3d, 4>& nodal_stress,
                          const MappedBasis& basis) {
  Vec2 div = Vec2::Zero();
  for (int a = 0; a < 4; ++a) {
    const Vec2& g = basis.gradients[a];
    div[0] += g[0] * nodal_stress[a][0] + g[1] * nodal_stress[a][2];
    div[1] += g[0] * nodal_stress[a][2] + g[1] * nodal_stress[a][1];
  }
  return div;
}

}  // namespace slidemesh

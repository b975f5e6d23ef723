#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "slidemesh/material.hpp"
#include "slidemesh/mesh.hpp"
#include "slidemesh/types.hpp"

namespace slidemesh {

/// Interface term groups; tests may assemble subsets.
namespace interface_terms {
constexpr unsigned kPressureConsistency = 1u << 0;
constexpr unsigned kViscousConsistency = 1u << 1;
constexpr unsigned kPressureAdjoint = 1u << 2;
constexpr unsigned kViscousAdjoint = 1u << 3;
constexpr unsigned kPenalty = 1u << 4;
constexpr unsigned kUpwindCentered = 1u << 5;
constexpr unsigned kUpwindJump = 1u << 6;
constexpr unsigned kAll = (1u << 7) - 1;
}  // namespace interface_terms

struct StabilizationConfig {
  double alpha = 30.0;               // Nitsche penalty scaling
  std::string tau_variant = "standard";
  bool recovery = true;              // least-squares stress recovery feeds the strong residual
  int volume_points = 2;             // tensor Gauss points per direction
  int edge_points = 2;
  int cut_points = 3;                // Gauss points per interface cut
  unsigned interface_mask = interface_terms::kAll;
};

struct TimeContext {
  bool steady = true;
  double dt = 0.0;
};

struct Taus {
  double mom = 0.0;
  double cont = 0.0;
  double temp = 0.0;
};

struct TauInputs {
  Mat2 metric = Mat2::Zero();
  Vec2 u_rel = Vec2::Zero();
  double rho = 1.0;
  double cp = 1.0;
  double kappa = 1.0;
  double eta = 1.0;
  double dt = 0.0;
  bool steady = true;
};

using TauFunction = std::function<Taus(const TauInputs&)>;

/// Registered tau definitions, keyed by name ("standard", "none"). Unknown
/// names raise ConfigError.
void register_tau_variant(const std::string& name, TauFunction fn);
Taus compute_taus(const TauInputs& inputs, const std::string& variant = "standard");

/// Strong momentum residual at a point:
/// rho (du/dt + (u_rel . grad) u) + grad p - div(2 eta eps) - rho b,
/// with the viscous divergence supplied from the recovery field (zero when
/// recovery is off).
Vec2 strong_residual_mom(double rho, const Vec2& udot, const Vec2& u_rel, const Mat2& grad_u,
                         const Vec2& grad_p, const Vec2& recovered_div, const Vec2& body_force);

/// Strong temperature residual at a point (conductive term dropped for
/// bilinear elements): rho cp (dT/dt + u_rel . grad T) - dissipation.
double strong_residual_temp(double rho_cp, double Tdot, const Vec2& u_rel, const Vec2& grad_T,
                            double dissipation);

/// Four zeroed Eigen vectors; Eigen's default constructor leaves coefficients
/// uninitialized, so aggregate members need explicit zero values.
template <typename V>
std::array<V, 4> zero_nodal() {
  return {V::Zero(), V::Zero(), V::Zero(), V::Zero()};
}

/// Shape data mapped to one physical element point.
struct MappedBasis {
  std::array<double, 4> values{};
  std::array<Vec2, 4> gradients = zero_nodal<Vec2>();  // physical gradients
  Mat2 jacobian = Mat2::Zero();                        // dx/dxi
  double det = 0.0;
  Mat2 metric = Mat2::Zero();  // (dxi/dx)^T (dxi/dx)
};

MappedBasis map_basis(const std::array<Vec2, 4>& coords, const Vec2& ref);

/// Nodal state of one element, gathered by the caller.
struct ElementInputs {
  std::array<Vec2, 4> coords = zero_nodal<Vec2>();
  std::array<Vec2, 4> u = zero_nodal<Vec2>();
  std::array<Vec2, 4> u_prev = zero_nodal<Vec2>();
  std::array<Vec2, 4> u_ale = zero_nodal<Vec2>();
  std::array<double, 4> p{};
  std::array<double, 4> T{};
  std::array<double, 4> T_prev{};
  // 2 eta eps nodal components (xx, yy, xy).
  std::array<Eigen::Vector3d, 4> recovered = zero_nodal<Eigen::Vector3d>();
  bool has_recovery = false;
};

/// Local 16x16 contribution; dof ordering (ux, uy, p, T) per node.
struct LocalSystem {
  Eigen::Matrix<double, 16, 16> jac = Eigen::Matrix<double, 16, 16>::Zero();
  Eigen::Matrix<double, 16, 1> res = Eigen::Matrix<double, 16, 1>::Zero();
};

/// Galerkin + SUPG + PSPG + grad-div contributions of the momentum and
/// continuity equations. Viscosity is evaluated at the current state and
/// frozen in the Jacobian.
void element_residual_flow(const ElementInputs& in, const PhysicalParams& phys,
                           const MaterialModel& model, const StabilizationConfig& stab,
                           const TimeContext& time, LocalSystem& out);

/// Advection-diffusion energy equation with viscous dissipation source and
/// SUPG stabilization.
void element_residual_temp(const ElementInputs& in, const PhysicalParams& phys,
                           const MaterialModel& model, const StabilizationConfig& stab,
                           const TimeContext& time, LocalSystem& out);

/// Boundary traction term -(w, h) on one local edge.
void facet_neumann_flow(const ElementInputs& in, int local_edge,
                        const std::function<Vec2(const Vec2&)>& traction, int rule_points,
                        LocalSystem& out);

/// Boundary flux term -(v, h) on one local edge.
void facet_neumann_temp(const ElementInputs& in, int local_edge,
                        const std::function<double(const Vec2&)>& flux, int rule_points,
                        LocalSystem& out);

/// Lumped-mass L2 projection of 2 eta eps(u) to the nodes of one mesh.
/// Disabled fields carry zeros.
struct RecoveredStressField {
  bool enabled = false;
  std::vector<Eigen::Vector3d> nodal;  // (xx, yy, xy)
};

RecoveredStressField recover_stress_divergence(const Mesh& mesh, const std::vector<Vec2>& nodal_u,
                                               const std::vector<double>& nodal_T,
                                               const MaterialModel& model, int volume_points,
                                               bool enabled);

/// Divergence of the recovered nodal stress at a mapped point.
Vec2 recovered_divergence(const std::array<Eigen::Vector3d, 4>& nodal_stress,
                          const MappedBasis& basis);

}  // namespace slidemesh

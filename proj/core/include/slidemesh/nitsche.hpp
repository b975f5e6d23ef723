#pragma once

#include <functional>

#include "slidemesh/forms.hpp"
#include "slidemesh/geometry_cut.hpp"
#include "slidemesh/material.hpp"
#include "slidemesh/types.hpp"

namespace slidemesh {

/// Coefficient-weighted interface averages: side i carries k_i = c_j/(c_i+c_j).
struct InterfaceWeights {
  double ki = 0.5;
  double kj = 0.5;
};

InterfaceWeights weights_from_coefficients(double ci, double cj);

/// Interface penalty (alpha/2) * harmonic-mean(c) * (1/h_i + 1/h_j), shared by
/// the flow (c = viscosity) and thermal (c = conductivity) couplings.
double interface_penalty(double ci, double cj, double hi, double hj, double alpha);

/// Two coupled element contributions: side a occupies local dofs 0..15,
/// side b 16..31; dof ordering (ux, uy, p, T) per node.
struct TwoSideLocal {
  Eigen::Matrix<double, 32, 32> jac = Eigen::Matrix<double, 32, 32>::Zero();
  Eigen::Matrix<double, 32, 1> res = Eigen::Matrix<double, 32, 1>::Zero();
};

/// Nitsche coupling of momentum and continuity across one cut: consistency,
/// adjoint consistency, penalty and interface upwinding. The stabilization
/// mask selects term groups (tests only; defaults to all).
void interface_residual_flow(const CutRecord& cut, const ElementInputs& side_a,
                             const ElementInputs& side_b, const PhysicalParams& phys_a,
                             const PhysicalParams& phys_b, const MaterialModel& model_a,
                             const MaterialModel& model_b, const StabilizationConfig& stab,
                             TwoSideLocal& out);

/// Conductivity-weighted Nitsche coupling of the energy equation with thermal
/// upwinding.
void interface_residual_temp(const CutRecord& cut, const ElementInputs& side_a,
                             const ElementInputs& side_b, const PhysicalParams& phys_a,
                             const PhysicalParams& phys_b, const MaterialModel& model_a,
                             const MaterialModel& model_b, const StabilizationConfig& stab,
                             TwoSideLocal& out);

/// Nitsche-weak velocity Dirichlet data over a signed facet quadrature
/// (uncovered interface strips or ordinary boundary facets, where the cover
/// is empty and the rule reduces to the plain facet rule).
void weak_dirichlet_flow(const SignedFacetQuadrature& quad, const ElementInputs& elem,
                         const std::function<Vec2(const Vec2&)>& dirichlet_value,
                         const PhysicalParams& phys, const MaterialModel& model,
                         const StabilizationConfig& stab, LocalSystem& out);

/// Weak temperature Dirichlet data, penalty alpha * kappa / h.
void weak_dirichlet_temp(const SignedFacetQuadrature& quad, const ElementInputs& elem,
                         const std::function<double(const Vec2&)>& dirichlet_value,
                         const PhysicalParams& phys, const MaterialModel& model,
                         const StabilizationConfig& stab, LocalSystem& out);

}  // namespace slidemesh

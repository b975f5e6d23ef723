#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "slidemesh/solver.hpp"

namespace slidemesh {

/// Periodic vortex solution of the incompressible Navier-Stokes equations on
/// the unit square (unit density). The steady variant balances the decay term
/// with an equal and opposite body force.
struct TaylorGreen {
  double eta = 0.1;

  Vec2 velocity(const Vec2& x, double t) const;
  Mat2 velocity_gradient(const Vec2& x, double t) const;
  double pressure(const Vec2& x, double t) const;
  Vec2 steady_body_force(const Vec2& x) const;
};

/// Steady two-material conduction field: harmonic in each horizontal strip,
/// continuous with continuous normal flux across the interface at y = 1/2.
struct TwoMaterialConduction {
  TwoMaterialConduction(double kappa_bottom, double kappa_top);

  double kappa_bottom;
  double kappa_top;
  double a = 0.0;  // top-strip sinh coefficient
  double b = 0.0;  // top-strip cosh coefficient

  double temperature(const Vec2& x) const;
};

/// Azimuthal annular Couette profile between a rotating inner wall (angular
/// velocity omega at radius r_inner) and a fixed outer wall.
struct AnnularCouette {
  AnnularCouette(double r_inner, double r_outer, double omega, double rho = 1.0);

  double r_inner;
  double r_outer;
  double omega;
  double rho;
  double A = 0.0;
  double B = 0.0;

  double u_theta(double r) const;
  Vec2 velocity(const Vec2& x) const;
  /// Radial pressure from the centrifugal balance, zero at the outer wall.
  double pressure(const Vec2& x) const;
};

struct DomainErrors {
  double err_u = 0.0;
  double err_p = 0.0;
  double err_T = 0.0;
  double norm_u = 0.0;
  double norm_p = 0.0;
  double norm_T = 0.0;
};

/// L2 errors of the discrete fields against analytic references over all
/// subdomains; null references skip the corresponding field.
DomainErrors l2_domain_errors(const CoupledSolver& solver,
                              const std::function<Vec2(const Vec2&)>& exact_u,
                              const std::function<double(const Vec2&)>& exact_p,
                              const std::function<double(const Vec2&)>& exact_T,
                              int quad_points = 4);

struct JumpNorms {
  double u = 0.0;
  double p = 0.0;
  double T = 0.0;
};

/// L2 norms of the inter-subdomain jumps over all covered interface cuts.
JumpNorms interface_jump_norms(const CoupledSolver& solver);

/// Net volume flux defect across all interfaces: integral of (u_a - u_b) . n.
double interface_flux_defect(const CoupledSolver& solver);

/// Net discrete flux integral of u . n over the facets carrying `tag`.
double boundary_flux(const CoupledSolver& solver, int sub, const std::string& tag);

/// Net flux through the uncovered (weakly walled) interface strips, summed as
/// |Q_a| + |Q_b| over the two sides.
double strip_leakage(const CoupledSolver& solver);

/// Least-squares slope of log(err) against log(h) over the last `use_last`
/// points (err ~ C h^rate).
double fit_rate(const std::vector<double>& h, const std::vector<double>& err, int use_last = 3);

struct ErrorRow {
  int level = 0;
  double h = 0.0;
  double err_u = 0.0;
  double err_p = 0.0;
  double err_T = 0.0;
  double jump_u = 0.0;
  double jump_p = 0.0;
  double jump_T = 0.0;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  double rate_u = 0.0;
  double rate_p = 0.0;
  double rate_T = 0.0;
  double rate_jump_u = 0.0;
  double rate_jump_p = 0.0;
  double rate_jump_T = 0.0;

  void fit_rates(int use_last = 3);
};

struct StudyOptions {
  int levels = 5;
  double alpha = 30.0;
  std::ostream* log = nullptr;
};

/// Four independently meshed quadrants of the unit square with non-matching
/// interfaces along x = 1/2 and y = 1/2: diagonal quadrants carry n = 4 * 2^l
/// elements per direction, off-diagonal m = 3 * 2^l.
CoupledProblem make_taylor_green_problem(int level, bool steady, double alpha,
                                         const TaylorGreen& tg);

/// Steady vortex study (eta = 0.1, manufactured forcing).
ErrorReport taylor_green_steady_study(const StudyOptions& opt);

/// Transient vortex study (eta = 1e-4, 10 implicit Euler steps, dt = 2.5e-4,
/// exact initial condition; errors at the final time).
ErrorReport taylor_green_convective_study(const StudyOptions& opt);

/// Two stacked strips with different conductivities, non-matching meshes and
/// the harmonic flux-continuous reference field.
CoupledProblem make_conduction_problem(int level, double alpha, const TwoMaterialConduction& ref);

ErrorReport two_material_conduction_study(const StudyOptions& opt);

struct ChannelRow {
  int level = 0;
  double h = 0.0;
  double inflow = 0.0;
  double outflow = 0.0;
  double balance_rel = 0.0;
  double leakage = 0.0;
};

struct ChannelReport {
  double offset = 0.0;
  std::vector<ChannelRow> rows;
  double leakage_rate = 0.0;
};

/// Two channel segments meeting at a vertical interface with vertical offset
/// `offset`; the non-overlapping strips carry weak no-slip walls.
CoupledProblem make_channel_problem(int level, double offset, double alpha,
                                    bool analytic_outlet_traction);

/// Mass-balance and strip-leakage study for the offset channel.
ChannelReport overlapping_channel_study(double offset, const StudyOptions& opt);

/// Full-overlap limit against the parabolic profile: returns the relative
/// L2 velocity error on the given level.
double channel_poiseuille_error(int level, const StudyOptions& opt);

/// Fully offset (sealed) limit: returns the net interface flux magnitude.
double sealed_channel_flux(const StudyOptions& opt);

/// Rotating inner ring coupled to a fixed outer ring across a circular
/// sliding interface at the common radius.
CoupledProblem make_annulus_problem(int level, double omega, double alpha, bool transient,
                                    double dt, int steps);

struct AnnulusSteadyReport {
  double profile_err_rel = 0.0;
  JumpNorms jumps;
};

/// Static-mesh steady solve with a spinning inner wall, compared against the
/// annular Couette profile.
AnnulusSteadyReport annulus_steady_case(int level, const StudyOptions& opt);

struct AnnulusRevolutionReport {
  int steps = 0;
  std::vector<double> jump_u_history;
  std::vector<double> jump_p_history;
  double profile_err_rel_final = 0.0;
  /// max_t |jump_u(t) - mean| / mean over the sampled revolution
  double max_rel_fluctuation_u = 0.0;
};

/// One full revolution of the inner ring with per-step cut rebuilds, started
/// from the analytic profile; samples the interface jump norms every step.
AnnulusRevolutionReport annulus_revolution_case(int level, int steps, const StudyOptions& opt);

struct MatchingOracleReport {
  double du_rel = 0.0;   // coupled vs merged velocity difference, relative L2
  double dT_rel = 0.0;   // same for the conduction variant
  double norm_u = 0.0;
  double norm_T = 0.0;
};

/// Node-matching two-subdomain problems solved against their merged
/// single-mesh twins: a linear shear flow and a linear conduction profile.
MatchingOracleReport matching_interface_oracle(double alpha = 30.0);

}  // namespace slidemesh

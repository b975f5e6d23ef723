#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slidemesh/forms.hpp"
#include "slidemesh/geometry_cut.hpp"
#include "slidemesh/material.hpp"
#include "slidemesh/mesh.hpp"
#include "slidemesh/nitsche.hpp"

namespace slidemesh {

enum class BcKind { StrongDirichlet, WeakDirichlet, Neumann };

/// Velocity boundary data; `value` is Dirichlet data or traction depending on
/// the kind, evaluated at the current facet position and time.
struct FlowBc {
  BcKind kind = BcKind::StrongDirichlet;
  std::function<Vec2(const Vec2&, double)> value = [](const Vec2&, double) {
    return Vec2::Zero().eval();
  };
};

struct TempBc {
  BcKind kind = BcKind::StrongDirichlet;
  std::function<double(const Vec2&, double)> value = [](const Vec2&, double) { return 0.0; };
};

/// Per-tag boundary data; an unset field means natural (do-nothing).
struct BoundaryCondition {
  std::optional<FlowBc> flow;
  std::optional<TempBc> temp;
};

struct MotionSpec {
  Vec2 center = Vec2::Zero();
  double omega = 0.0;  // rad per unit time

  bool moving() const { return omega != 0.0; }
};

struct Subdomain {
  std::string name;
  Mesh mesh;
  MotionSpec motion;
  PhysicalParams phys;
  MaterialModel material = MaterialModel::newtonian(1.0);
};

struct InterfaceSpec {
  int sub_a = -1;
  std::string tag_a;
  int sub_b = -1;
  std::string tag_b;
  InterfaceParameterization::Kind kind = InterfaceParameterization::Kind::Line;
  Vec2 circle_center = Vec2::Zero();
  /// Dirichlet data applied weakly on uncovered strips (rigid backing walls).
  std::function<Vec2(const Vec2&, double)> uncovered_flow = [](const Vec2&, double) {
    return Vec2::Zero().eval();
  };
  std::function<double(const Vec2&, double)> uncovered_temp = [](const Vec2&, double) {
    return 0.0;
  };
};

struct PressureAnchor {
  int sub = 0;
  Vec2 location = Vec2::Zero();
  std::function<double(double)> value = [](double) { return 0.0; };
};

struct NonlinearSettings {
  double tol_abs = 1e-9;
  double tol_rel = 1e-8;
  int max_iter = 25;
};

struct TimeSettings {
  bool steady = true;
  double dt = 0.0;
  int steps = 0;
};

struct CoupledProblem {
  std::vector<Subdomain> subdomains;
  std::vector<InterfaceSpec> interfaces;
  std::map<std::string, BoundaryCondition> bcs;
  StabilizationConfig stab;
  NonlinearSettings nonlinear;
  TimeSettings time;
  std::optional<PressureAnchor> anchor;
  bool solve_flow = true;
  bool solve_temp = true;
};

/// Interleaved global numbering: (ux, uy, p, T) per node, subdomains
/// concatenated in order.
class SystemNumbering {
 public:
  SystemNumbering() = default;
  explicit SystemNumbering(const std::vector<Subdomain>& subs);

  int dof(int sub, int node, int field) const { return offsets_[sub] + 4 * node + field; }
  int subdomain_offset(int sub) const { return offsets_[sub]; }
  int size() const { return total_; }
  int n_subdomains() const { return static_cast<int>(offsets_.size()); }

 private:
  std::vector<int> offsets_;
  int total_ = 0;
};

/// Direct sparse solve with a residual check (relative residual below 1e-10).
/// Throws LinearSolveError on factorization failure or an unreliable solution.
Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& matrix,
                             const Eigen::VectorXd& rhs);

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  NewtonReport newton;
};

struct AssembledSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd residual;
};

class CoupledSolver {
 public:
  explicit CoupledSolver(CoupledProblem problem);

  const CoupledProblem& problem() const { return problem_; }
  CoupledProblem& problem() { return problem_; }
  const SystemNumbering& numbering() const { return numbering_; }
  const std::vector<SlidingInterface>& interfaces() const { return interfaces_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  Eigen::VectorXd& state() { return state_; }
  const Eigen::VectorXd& state() const { return state_; }
  const Eigen::VectorXd& previous_state() const { return state_prev_; }

  Vec2 velocity(int sub, int node) const;
  double pressure(int sub, int node) const;
  double temperature(int sub, int node) const;
  void set_initial(
      const std::function<Vec2(int, const Vec2&)>& u0,
      const std::function<double(int, const Vec2&)>& p0 = nullptr,
      const std::function<double(int, const Vec2&)>& T0 = nullptr);

  /// Rebuilds all sliding-interface cuts from scratch and re-checks per-facet
  /// measure conservation.
  void rebuild_interfaces();

  /// Assembles residual and Jacobian at the current state and time.
  AssembledSystem assemble();

  /// Newton iteration with Picard-frozen viscosity, stabilization parameters
  /// and interface transport. Throws SolverError with the residual history on
  /// divergence.
  NewtonReport nonlinear_solve();

  /// Rotates moving subdomains by omega*dt and rebuilds the interface cuts.
  void advance_configuration(double dt);

  /// One implicit Euler step: move the configuration, then solve at the new
  /// time level.
  StepRecord bdf1_step();

  /// Runs problem().time.steps transient steps (or one steady solve).
  std::vector<StepRecord> run();

  const RecoveredStressField& recovered_stress(int sub) const { return recovery_[sub]; }

  std::ostream* log = nullptr;

 private:
  struct Constraint {
    enum class Kind { Flow, Temp, Frozen, Anchor };
    Kind kind = Kind::Frozen;
    int sub = 0;
    int node = 0;
    int field = 0;
    const BoundaryCondition* bc = nullptr;
  };

  void validate_problem() const;
  void build_constraints();
  void update_recovery();
  ElementInputs gather_element(int sub, int element) const;
  void check_finite(const LocalSystem& local, int sub, int element) const;

  CoupledProblem problem_;
  SystemNumbering numbering_;
  std::vector<SlidingInterface> interfaces_;
  std::vector<RecoveredStressField> recovery_;
  std::map<int, Constraint> constraints_;  // dof -> constraint
  Eigen::VectorXd state_;
  Eigen::VectorXd state_prev_;
  double time_ = 0.0;
  int step_count_ = 0;
};

}  // namespace slidemesh

#include "slidemesh/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "slidemesh/errors.hpp"

namespace slidemesh {

SystemNumbering::SystemNumbering(const std::vector<Subdomain>& subs) {
  offsets_.reserve(subs.size());
  for (const auto& sub : subs) {
    offsets_.push_back(total_);
    total_ += 4 * sub.mesh.n_nodes();
  }
}

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& matrix,
                             const Eigen::VectorXd& rhs) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(matrix);
  lu.factorize(matrix);
  if (lu.info() != Eigen::Success) {
    throw LinearSolveError("sparse LU factorization failed (matrix singular or invalid): " +
                           lu.lastErrorMessage());
  }
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) {
    throw LinearSolveError("sparse LU back-substitution failed");
  }
  const double scale = std::max(1.0, rhs.norm());
  const double defect = (matrix * x - rhs).norm();
  if (!(defect <= 1e-10 * scale)) {
    std::ostringstream oss;
    oss << "direct solve unreliable: relative residual " << defect / scale;
    throw LinearSolveError(oss.str());
  }
  return x;
}

CoupledSolver::CoupledSolver(CoupledProblem problem) : problem_(std::move(problem)) {
  validate_problem();
  numbering_ = SystemNumbering(problem_.subdomains);
  state_ = Eigen::VectorXd::Zero(numbering_.size());
  state_prev_ = state_;
  recovery_.resize(problem_.subdomains.size());
  build_constraints();
  rebuild_interfaces();
}

void CoupledSolver::validate_problem() const {
  if (problem_.subdomains.empty()) {
    throw ConfigError("problem has no subdomains");
  }
  if (!problem_.time.steady && !(problem_.time.dt > 0.0)) {
    throw ConfigError("transient runs require a positive time step");
  }
  for (const auto& sub : problem_.subdomains) {
    sub.mesh.validate();
  }

  const int n_subs = static_cast<int>(problem_.subdomains.size());
  std::vector<std::set<std::string>> interface_tags(n_subs);
  for (const auto& spec : problem_.interfaces) {
    for (const auto& [sub, tag] : {std::pair{spec.sub_a, spec.tag_a}, {spec.sub_b, spec.tag_b}}) {
      if (sub < 0 || sub >= n_subs) {
        throw ConfigError("interface references subdomain " + std::to_string(sub) +
                          " which does not exist");
      }
      const auto& facets = problem_.subdomains[sub].mesh.boundary_facets;
      const bool found = std::any_of(facets.begin(), facets.end(),
                                     [&](const BoundaryFacet& f) { return f.tag == tag; });
      if (!found) {
        throw ConfigError("interface tag '" + tag + "' not present on subdomain '" +
                          problem_.subdomains[sub].name + "'");
      }
      if (problem_.bcs.count(tag) > 0) {
        throw ConfigError("tag '" + tag + "' is claimed by both an interface and a boundary "
                          "condition");
      }
      interface_tags[sub].insert(tag);
    }
  }
  for (int s = 0; s < n_subs; ++s) {
    for (const auto& facet : problem_.subdomains[s].mesh.boundary_facets) {
      if (interface_tags[s].count(facet.tag) > 0) continue;
      if (problem_.bcs.count(facet.tag) == 0) {
        throw ConfigError("boundary tag '" + facet.tag + "' on subdomain '" +
                          problem_.subdomains[s].name +
                          "' has neither a boundary condition nor an interface");
      }
    }
  }
}

void CoupledSolver::build_constraints() {
  constraints_.clear();
  const int n_subs = static_cast<int>(problem_.subdomains.size());

  std::vector<std::set<std::string>> interface_tags(n_subs);
  for (const auto& spec : problem_.interfaces) {
    interface_tags[spec.sub_a].insert(spec.tag_a);
    interface_tags[spec.sub_b].insert(spec.tag_b);
  }

  for (int s = 0; s < n_subs; ++s) {
    const Mesh& mesh = problem_.subdomains[s].mesh;
    for (const auto& facet : mesh.boundary_facets) {
      if (interface_tags[s].count(facet.tag) > 0) continue;
      const BoundaryCondition& bc = problem_.bcs.at(facet.tag);
      const auto& conn = mesh.elements[facet.element];
      const int n0 = conn[facet.local_edge];
      const int n1 = conn[(facet.local_edge + 1) % 4];
      for (int node : {n0, n1}) {
        if (bc.flow && bc.flow->kind == BcKind::StrongDirichlet && problem_.solve_flow) {
          for (int f : {0, 1}) {
            constraints_[numbering_.dof(s, node, f)] =
                Constraint{Constraint::Kind::Flow, s, node, f, &bc};
          }
        }
        if (bc.temp && bc.temp->kind == BcKind::StrongDirichlet && problem_.solve_temp) {
          constraints_[numbering_.dof(s, node, 3)] =
              Constraint{Constraint::Kind::Temp, s, node, 3, &bc};
        }
      }
    }
  }

  // Fields that are not being solved stay frozen at their current values.
  for (int s = 0; s < n_subs; ++s) {
    const int n_nodes = problem_.subdomains[s].mesh.n_nodes();
    for (int node = 0; node < n_nodes; ++node) {
      if (!problem_.solve_flow) {
        for (int f : {0, 1, 2}) {
          constraints_[numbering_.dof(s, node, f)] =
              Constraint{Constraint::Kind::Frozen, s, node, f, nullptr};
        }
      }
      if (!problem_.solve_temp) {
        constraints_[numbering_.dof(s, node, 3)] =
            Constraint{Constraint::Kind::Frozen, s, node, 3, nullptr};
      }
    }
  }

  if (problem_.anchor && problem_.solve_flow) {
    const PressureAnchor& anchor = *problem_.anchor;
    if (anchor.sub < 0 || anchor.sub >= n_subs) {
      throw ConfigError("pressure anchor references a missing subdomain");
    }
    const Mesh& mesh = problem_.subdomains[anchor.sub].mesh;
    int best = 0;
    double best_dist = std::numeric_limits<double>::max();
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      const double d = (mesh.node_coords[node] - anchor.location).squaredNorm();
      if (d < best_dist) {
        best_dist = d;
        best = node;
      }
    }
    constraints_[numbering_.dof(anchor.sub, best, 2)] =
        Constraint{Constraint::Kind::Anchor, anchor.sub, best, 2, nullptr};
  }
}

void CoupledSolver::rebuild_interfaces() {
  interfaces_.clear();
  interfaces_.reserve(problem_.interfaces.size());
  for (const auto& spec : problem_.interfaces) {
    const Mesh& mesh_a = problem_.subdomains[spec.sub_a].mesh;
    const Mesh& mesh_b = problem_.subdomains[spec.sub_b].mesh;
    InterfaceParameterization par =
        spec.kind == InterfaceParameterization::Kind::Circle
            ? fit_circle_parameterization(mesh_a, spec.tag_a, spec.circle_center)
            : fit_line_parameterization(mesh_a, spec.tag_a);
    SlidingInterface iface =
        build_interface_quadrature(mesh_a, spec.tag_a, mesh_b, spec.tag_b, par,
                                   problem_.stab.cut_points);

    // Bookkeeping re-check after every rebuild: per side, covered plus net
    // uncovered must reproduce the facet measures.
    for (const auto* unc : {&iface.uncovered_a, &iface.uncovered_b}) {
      double total_facets = 0.0;
      double total_net = 0.0;
      for (const auto& sq : *unc) {
        total_facets += sq.facet_measure;
        const double net = sq.net_measure();
        if (net < -1e-9 * std::max(1.0, sq.facet_measure)) {
          throw GeometryError("interface cover exceeds facet measure after rebuild");
        }
        total_net += net;
      }
      const double defect =
          std::abs(total_net + iface.covered_measure() - total_facets);
      if (defect > 1e-9 * std::max(1.0, total_facets)) {
        std::ostringstream oss;
        oss << "interface measure bookkeeping broken after rebuild: defect " << defect;
        throw GeometryError(oss.str());
      }
    }
    interfaces_.push_back(std::move(iface));
  }
}

Vec2 CoupledSolver::velocity(int sub, int node) const {
  return Vec2(state_[numbering_.dof(sub, node, 0)], state_[numbering_.dof(sub, node, 1)]);
}

double CoupledSolver::pressure(int sub, int node) const {
  return state_[numbering_.dof(sub, node, 2)];
}

double CoupledSolver::temperature(int sub, int node) const {
  return state_[numbering_.dof(sub, node, 3)];
}

void CoupledSolver::set_initial(const std::function<Vec2(int, const Vec2&)>& u0,
                                const std::function<double(int, const Vec2&)>& p0,
                                const std::function<double(int, const Vec2&)>& T0) {
  for (std::size_t s = 0; s < problem_.subdomains.size(); ++s) {
    const Mesh& mesh = problem_.subdomains[s].mesh;
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      const Vec2& x = mesh.node_coords[node];
      const int si = static_cast<int>(s);
      if (u0) {
        const Vec2 u = u0(si, x);
        state_[numbering_.dof(si, node, 0)] = u[0];
        state_[numbering_.dof(si, node, 1)] = u[1];
      }
      if (p0) state_[numbering_.dof(si, node, 2)] = p0(si, x);
      if (T0) state_[numbering_.dof(si, node, 3)] = T0(si, x);
    }
  }
  state_prev_ = state_;
}

ElementInputs CoupledSolver::gather_element(int sub, int element) const {
  const Mesh& mesh = problem_.subdomains[sub].mesh;
  const auto& conn = mesh.elements[element];
  ElementInputs in;
  const RecoveredStressField& rec = recovery_[sub];
  in.has_recovery = rec.enabled;
  for (int a = 0; a < 4; ++a) {
    const int node = conn[a];
    in.coords[a] = mesh.node_coords[node];
    in.u[a] = Vec2(state_[numbering_.dof(sub, node, 0)], state_[numbering_.dof(sub, node, 1)]);
    in.u_prev[a] = Vec2(state_prev_[numbering_.dof(sub, node, 0)],
                        state_prev_[numbering_.dof(sub, node, 1)]);
    in.u_ale[a] = mesh.node_velocity.empty() ? Vec2(Vec2::Zero()) : mesh.node_velocity[node];
    in.p[a] = state_[numbering_.dof(sub, node, 2)];
    in.T[a] = state_[numbering_.dof(sub, node, 3)];
    in.T_prev[a] = state_prev_[numbering_.dof(sub, node, 3)];
    in.recovered[a] = rec.enabled ? rec.nodal[node] : Eigen::Vector3d::Zero().eval();
  }
  return in;
}

void CoupledSolver::check_finite(const LocalSystem& local, int sub, int element) const {
  if (local.res.allFinite() && local.jac.allFinite()) return;
  throw AssemblyError("non-finite contribution from element " + std::to_string(element) +
                      " of subdomain '" + problem_.subdomains[sub].name + "'");
}

void CoupledSolver::update_recovery() {
  for (std::size_t s = 0; s < problem_.subdomains.size(); ++s) {
    const Subdomain& sub = problem_.subdomains[s];
    const Mesh& mesh = sub.mesh;
    std::vector<Vec2> u(mesh.n_nodes());
    std::vector<double> T(mesh.n_nodes());
    const int si = static_cast<int>(s);
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      u[node] = Vec2(state_[numbering_.dof(si, node, 0)], state_[numbering_.dof(si, node, 1)]);
      T[node] = state_[numbering_.dof(si, node, 3)];
    }
    recovery_[s] = recover_stress_divergence(mesh, u, T, sub.material,
                                             problem_.stab.volume_points,
                                             problem_.stab.recovery && problem_.solve_flow);
  }
}

AssembledSystem CoupledSolver::assemble() {
  const int n = numbering_.size();
  AssembledSystem out;
  out.residual = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * 40);

  update_recovery();
  const TimeContext time{problem_.time.steady, problem_.time.dt};
  const double t_now = time_;

  const auto constrained = [&](int dof) { return constraints_.count(dof) > 0; };

  const auto scatter16 = [&](int sub, const std::array<int, 4>& conn, const LocalSystem& local) {
    std::array<int, 16> dofs;
    for (int a = 0; a < 4; ++a) {
      for (int f = 0; f < 4; ++f) dofs[4 * a + f] = numbering_.dof(sub, conn[a], f);
    }
    for (int i = 0; i < 16; ++i) {
      if (constrained(dofs[i])) continue;
      out.residual[dofs[i]] += local.res[i];
      for (int j = 0; j < 16; ++j) {
        if (local.jac(i, j) != 0.0) trips.emplace_back(dofs[i], dofs[j], local.jac(i, j));
      }
    }
  };

  // Element interiors.
  for (std::size_t s = 0; s < problem_.subdomains.size(); ++s) {
    const Subdomain& sub = problem_.subdomains[s];
    const int si = static_cast<int>(s);
    for (int e = 0; e < sub.mesh.n_elements(); ++e) {
      const ElementInputs in = gather_element(si, e);
      LocalSystem local;
      if (problem_.solve_flow) {
        element_residual_flow(in, sub.phys, sub.material, problem_.stab, time, local);
      }
      if (problem_.solve_temp) {
        element_residual_temp(in, sub.phys, sub.material, problem_.stab, time, local);
      }
      check_finite(local, si, e);
      scatter16(si, sub.mesh.elements[e], local);
    }
  }

  // Boundary facets carrying Neumann or weakly imposed Dirichlet data.
  std::vector<std::set<std::string>> interface_tags(problem_.subdomains.size());
  for (const auto& spec : problem_.interfaces) {
    interface_tags[spec.sub_a].insert(spec.tag_a);
    interface_tags[spec.sub_b].insert(spec.tag_b);
  }
  for (std::size_t s = 0; s < problem_.subdomains.size(); ++s) {
    const Subdomain& sub = problem_.subdomains[s];
    const int si = static_cast<int>(s);
    for (std::size_t f = 0; f < sub.mesh.boundary_facets.size(); ++f) {
      const BoundaryFacet& facet = sub.mesh.boundary_facets[f];
      if (interface_tags[s].count(facet.tag) > 0) continue;
      const BoundaryCondition& bc = problem_.bcs.at(facet.tag);
      const bool need_flow = problem_.solve_flow && bc.flow &&
                             bc.flow->kind != BcKind::StrongDirichlet;
      const bool need_temp = problem_.solve_temp && bc.temp &&
                             bc.temp->kind != BcKind::StrongDirichlet;
      if (!need_flow && !need_temp) continue;

      const ElementInputs in = gather_element(si, facet.element);
      LocalSystem local;
      if (need_flow) {
        if (bc.flow->kind == BcKind::Neumann) {
          facet_neumann_flow(in, facet.local_edge,
                             [&](const Vec2& x) { return bc.flow->value(x, t_now); },
                             problem_.stab.edge_points, local);
        } else {
          const SignedFacetQuadrature quad =
              plain_facet_quadrature(sub.mesh, static_cast<int>(f), problem_.stab.edge_points);
          weak_dirichlet_flow(quad, in,
                              [&](const Vec2& x) { return bc.flow->value(x, t_now); }, sub.phys,
                              sub.material, problem_.stab, local);
        }
      }
      if (need_temp) {
        if (bc.temp->kind == BcKind::Neumann) {
          facet_neumann_temp(in, facet.local_edge,
                             [&](const Vec2& x) { return bc.temp->value(x, t_now); },
                             problem_.stab.edge_points, local);
        } else {
          const SignedFacetQuadrature quad =
              plain_facet_quadrature(sub.mesh, static_cast<int>(f), problem_.stab.edge_points);
          weak_dirichlet_temp(quad, in,
                              [&](const Vec2& x) { return bc.temp->value(x, t_now); }, sub.phys,
                              sub.material, problem_.stab, local);
        }
      }
      check_finite(local, si, facet.element);
      scatter16(si, sub.mesh.elements[facet.element], local);
    }
  }

  // Sliding-interface coupling terms.
  for (std::size_t i = 0; i < interfaces_.size(); ++i) {
    const InterfaceSpec& spec = problem_.interfaces[i];
    const SlidingInterface& iface = interfaces_[i];
    const Subdomain& sub_a = problem_.subdomains[spec.sub_a];
    const Subdomain& sub_b = problem_.subdomains[spec.sub_b];

    for (const auto& cut : iface.cuts) {
      const int facet_index_a = iface.side_a.facet_indices[cut.facet_a];
      const int facet_index_b = iface.side_b.facet_indices[cut.facet_b];
      const int elem_a = sub_a.mesh.boundary_facets[facet_index_a].element;
      const int elem_b = sub_b.mesh.boundary_facets[facet_index_b].element;
      const ElementInputs in_a = gather_element(spec.sub_a, elem_a);
      const ElementInputs in_b = gather_element(spec.sub_b, elem_b);
      TwoSideLocal tl;
      if (problem_.solve_flow) {
        interface_residual_flow(cut, in_a, in_b, sub_a.phys, sub_b.phys, sub_a.material,
                                sub_b.material, problem_.stab, tl);
      }
      if (problem_.solve_temp) {
        interface_residual_temp(cut, in_a, in_b, sub_a.phys, sub_b.phys, sub_a.material,
                                sub_b.material, problem_.stab, tl);
      }
      if (!tl.res.allFinite() || !tl.jac.allFinite()) {
        throw AssemblyError("non-finite interface contribution between subdomains '" +
                            sub_a.name + "' and '" + sub_b.name + "'");
      }

      std::array<int, 32> dofs;
      const auto& conn_a = sub_a.mesh.elements[elem_a];
      const auto& conn_b = sub_b.mesh.elements[elem_b];
      for (int a = 0; a < 4; ++a) {
        for (int fld = 0; fld < 4; ++fld) {
          dofs[4 * a + fld] = numbering_.dof(spec.sub_a, conn_a[a], fld);
          dofs[16 + 4 * a + fld] = numbering_.dof(spec.sub_b, conn_b[a], fld);
        }
      }
      for (int r = 0; r < 32; ++r) {
        if (constrained(dofs[r])) continue;
        out.residual[dofs[r]] += tl.res[r];
        for (int c = 0; c < 32; ++c) {
          if (tl.jac(r, c) != 0.0) trips.emplace_back(dofs[r], dofs[c], tl.jac(r, c));
        }
      }
    }

    // Uncovered strips see the rigid backing wall as a weak Dirichlet value.
    const auto apply_uncovered = [&](const InterfaceSide& side,
                                     const std::vector<SignedFacetQuadrature>& quads,
                                     const Subdomain& sub, int sub_index) {
      for (const auto& sq : quads) {
        if (std::abs(sq.net_measure()) <= 1e-12 * std::max(1.0, sq.facet_measure)) continue;
        const int facet_index = side.facet_indices[sq.facet];
        const int elem = sub.mesh.boundary_facets[facet_index].element;
        const ElementInputs in = gather_element(sub_index, elem);
        LocalSystem local;
        if (problem_.solve_flow) {
          weak_dirichlet_flow(sq, in,
                              [&](const Vec2& x) { return spec.uncovered_flow(x, t_now); },
                              sub.phys, sub.material, problem_.stab, local);
        }
        if (problem_.solve_temp) {
          weak_dirichlet_temp(sq, in,
                              [&](const Vec2& x) { return spec.uncovered_temp(x, t_now); },
                              sub.phys, sub.material, problem_.stab, local);
        }
        check_finite(local, sub_index, elem);
        scatter16(sub_index, sub.mesh.elements[elem], local);
      }
    };
    apply_uncovered(iface.side_a, iface.uncovered_a, sub_a, spec.sub_a);
    apply_uncovered(iface.side_b, iface.uncovered_b, sub_b, spec.sub_b);
  }

  // Constrained rows: identity Jacobian, residual x - g.
  for (const auto& [dof, c] : constraints_) {
    double target = 0.0;
    switch (c.kind) {
      case Constraint::Kind::Flow: {
        const Vec2& x = problem_.subdomains[c.sub].mesh.node_coords[c.node];
        target = c.bc->flow->value(x, t_now)[c.field];
        break;
      }
      case Constraint::Kind::Temp: {
        const Vec2& x = problem_.subdomains[c.sub].mesh.node_coords[c.node];
        target = c.bc->temp->value(x, t_now);
        break;
      }
      case Constraint::Kind::Frozen:
        target = state_[dof];
        break;
      case Constraint::Kind::Anchor:
        target = problem_.anchor->value(t_now);
        break;
    }
    out.residual[dof] = state_[dof] - target;
    trips.emplace_back(dof, dof, 1.0);
  }

  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  out.matrix.makeCompressed();
  return out;
}

NewtonReport CoupledSolver::nonlinear_solve() {
  NewtonReport rep;
  const NonlinearSettings& nl = problem_.nonlinear;
  double r0 = 0.0;

  for (int it = 0; it <= nl.max_iter; ++it) {
    AssembledSystem sys = assemble();
    const double rnorm = sys.residual.norm();
    rep.residual_history.push_back(rnorm);
    if (log) {
      (*log) << "    newton it=" << it << " res=" << std::scientific << std::setprecision(6)
             << rnorm << std::defaultfloat << "\n";
    }
    if (!std::isfinite(rnorm)) {
      throw SolverError("nonlinear residual is not finite", rep.residual_history);
    }
    if (it == 0) r0 = rnorm;
    if (rnorm <= nl.tol_abs || (it > 0 && rnorm <= nl.tol_rel * r0)) {
      rep.converged = true;
      rep.iterations = it;
      return rep;
    }
    if (rnorm > 1e8 * std::max(r0, 1.0)) {
      throw SolverError("nonlinear iteration diverged", rep.residual_history);
    }
    if (it == nl.max_iter) break;
    const Eigen::VectorXd delta = linear_solve(sys.matrix, -sys.residual);
    state_ += delta;
  }
  throw SolverError("nonlinear iteration exceeded " + std::to_string(nl.max_iter) +
                    " iterations without converging", rep.residual_history);
}

void CoupledSolver::advance_configuration(double dt) {
  for (auto& sub : problem_.subdomains) {
    if (sub.motion.moving()) {
      rigid_rotate_subdomain(sub.mesh, sub.motion.center, sub.motion.omega, dt);
    }
  }
  rebuild_interfaces();
}

StepRecord CoupledSolver::bdf1_step() {
  ++step_count_;
  state_prev_ = state_;
  time_ += problem_.time.dt;
  advance_configuration(problem_.time.dt);
  StepRecord rec;
  rec.step = step_count_;
  rec.time = time_;
  rec.newton = nonlinear_solve();
  if (log) {
    (*log) << "  step=" << rec.step << " t=" << rec.time
           << " newton_iters=" << rec.newton.iterations << " res=" << std::scientific
           << std::setprecision(6) << rec.newton.residual_history.back() << std::defaultfloat
           << "\n";
  }
  return rec;
}

std::vector<StepRecord> CoupledSolver::run() {
  std::vector<StepRecord> records;
  if (problem_.time.steady) {
    StepRecord rec;
    rec.step = 0;
    rec.time = time_;
    rec.newton = nonlinear_solve();
    records.push_back(std::move(rec));
  } else {
    records.reserve(static_cast<std::size_t>(problem_.time.steps));
    for (int s = 0; s < problem_.time.steps; ++s) {
      records.push_back(bdf1_step());
    }
  }
  return records;
}

}  // namespace slidemesh

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "slidemesh/harness.hpp"
#include "slidemesh/solver.hpp"

namespace slidemesh {

/// Deterministic decimal rendering with 17 significant digits (round-trip
/// exact for doubles).
std::string format_double(double v);

/// Convergence table as CSV: a commented header naming the columns, one row
/// per level, and a trailing comment carrying the fitted rates.
void write_error_report_csv(std::ostream& os, const ErrorReport& report);

void write_channel_report_csv(std::ostream& os, const ChannelReport& report);

/// Per-subdomain nodal fields prepared for serialization.
struct VtkFields {
  const Mesh* mesh = nullptr;
  std::vector<Vec2> velocity;
  std::vector<double> pressure;
  std::vector<double> temperature;
  std::vector<double> viscosity;
};

/// Nodal sampling of one subdomain, including a mass-lumped projection of the
/// viscosity field.
VtkFields sample_vtk_fields(const CoupledSolver& solver, int sub);

/// Legacy ASCII VTK unstructured grid (cell type 9) with velocity, pressure,
/// temperature and viscosity point data; multiple blocks are concatenated and
/// labelled with a per-cell subdomain id.
void write_vtk(std::ostream& os, const std::vector<VtkFields>& blocks, const std::string& title);

/// Writes <base>_<subdomain-name>.vtk per subdomain plus <base>_all.vtk into
/// `dir` (created if missing). Throws IoError on filesystem failures.
void write_solution_vtk_files(const CoupledSolver& solver, const std::string& dir,
                              const std::string& base);

/// Step log as CSV: step, time, newton iterations, final residual.
void write_step_records_csv(std::ostream& os, const std::vector<StepRecord>& records);

}  // namespace slidemesh

#include "slidemesh/writers.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <system_error>

#include "slidemesh/errors.hpp"
#include "slidemesh/forms.hpp"
#include "slidemesh/material.hpp"

namespace slidemesh {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::scientific, 16);
  if (res.ec != std::errc()) throw IoError("failed to format floating point value");
  return std::string(buf.data(), res.ptr);
}

void write_error_report_csv(std::ostream& os, const ErrorReport& report) {
  os << "# columns: level,h,err_u,err_p,err_T,jump_u,jump_p,jump_T\n";
  for (const auto& row : report.rows) {
    os << row.level << ',' << format_double(row.h) << ',' << format_double(row.err_u) << ','
       << format_double(row.err_p) << ',' << format_double(row.err_T) << ','
       << format_double(row.jump_u) << ',' << format_double(row.jump_p) << ','
       << format_double(row.jump_T) << '\n';
  }
  os << "# rate_u=" << format_double(report.rate_u) << " rate_p=" << format_double(report.rate_p)
     << " rate_T=" << format_double(report.rate_T)
     << " rate_jump_u=" << format_double(report.rate_jump_u)
     << " rate_jump_p=" << format_double(report.rate_jump_p)
     << " rate_jump_T=" << format_double(report.rate_jump_T) << '\n';
}

void write_channel_report_csv(std::ostream& os, const ChannelReport& report) {
  os << "# offset=" << format_double(report.offset) << '\n';
  os << "# columns: level,h,inflow,outflow,balance_rel,leakage\n";
  for (const auto& row : report.rows) {
    os << row.level << ',' << format_double(row.h) << ',' << format_double(row.inflow) << ','
       << format_double(row.outflow) << ',' << format_double(row.balance_rel) << ','
       << format_double(row.leakage) << '\n';
  }
  os << "# leakage_rate=" << format_double(report.leakage_rate) << '\n';
}

VtkFields sample_vtk_fields(const CoupledSolver& solver, int sub) {
  const Subdomain& subdomain = solver.problem().subdomains[sub];
  const Mesh& mesh = subdomain.mesh;
  VtkFields out;
  out.mesh = &mesh;
  out.velocity.resize(mesh.n_nodes());
  out.pressure.resize(mesh.n_nodes());
  out.temperature.resize(mesh.n_nodes());
  out.viscosity.assign(mesh.n_nodes(), 0.0);
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    out.velocity[node] = solver.velocity(sub, node);
    out.pressure[node] = solver.pressure(sub, node);
    out.temperature[node] = solver.temperature(sub, node);
  }

  // Mass-lumped projection of the viscosity evaluated at the volume rule.
  std::vector<double> lump(mesh.n_nodes(), 0.0);
  const QuadRule2d rule = tensor_gauss(2);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& conn = mesh.elements[e];
    std::array<Vec2, 4> coords;
    for (int a = 0; a < 4; ++a) coords[a] = mesh.node_coords[conn[a]];
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const MappedBasis basis = map_basis(coords, rule.points[q]);
      Mat2 grad_u = Mat2::Zero();
      double T = 0.0;
      for (int a = 0; a < 4; ++a) {
        grad_u.row(0) += out.velocity[conn[a]][0] * basis.gradients[a].transpose();
        grad_u.row(1) += out.velocity[conn[a]][1] * basis.gradients[a].transpose();
        T += basis.values[a] * out.temperature[conn[a]];
      }
      const double eta = subdomain.material.viscosity(shear_rate(strain_rate(grad_u)), T);
      const double jxw = rule.weights[q] * basis.det;
      for (int a = 0; a < 4; ++a) {
        out.viscosity[conn[a]] += jxw * basis.values[a] * eta;
        lump[conn[a]] += jxw * basis.values[a];
      }
    }
  }
  for (int node = 0; node < mesh.n_nodes(); ++node) {
    if (lump[node] > 0.0) out.viscosity[node] /= lump[node];
  }
  return out;
}

void write_vtk(std::ostream& os, const std::vector<VtkFields>& blocks, const std::string& title) {
  std::size_t n_points = 0;
  std::size_t n_cells = 0;
  for (const auto& block : blocks) {
    n_points += static_cast<std::size_t>(block.mesh->n_nodes());
    n_cells += static_cast<std::size_t>(block.mesh->n_elements());
  }

  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n_points << " double\n";
  for (const auto& block : blocks) {
    for (const auto& x : block.mesh->node_coords) {
      os << format_double(x[0]) << ' ' << format_double(x[1]) << " 0\n";
    }
  }

  os << "CELLS " << n_cells << ' ' << 5 * n_cells << '\n';
  std::size_t offset = 0;
  for (const auto& block : blocks) {
    for (const auto& conn : block.mesh->elements) {
      os << "4 " << conn[0] + offset << ' ' << conn[1] + offset << ' ' << conn[2] + offset << ' '
         << conn[3] + offset << '\n';
    }
    offset += static_cast<std::size_t>(block.mesh->n_nodes());
  }
  os << "CELL_TYPES " << n_cells << '\n';
  for (std::size_t c = 0; c < n_cells; ++c) os << "9\n";

  os << "POINT_DATA " << n_points << '\n';
  os << "VECTORS velocity double\n";
  for (const auto& block : blocks) {
    for (const auto& u : block.velocity) {
      os << format_double(u[0]) << ' ' << format_double(u[1]) << " 0\n";
    }
  }
  const auto scalar = [&](const char* name, const std::vector<double> VtkFields::* member) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const auto& block : blocks) {
      for (double v : block.*member) os << format_double(v) << '\n';
    }
  };
  scalar("pressure", &VtkFields::pressure);
  scalar("temperature", &VtkFields::temperature);
  scalar("viscosity", &VtkFields::viscosity);

  os << "CELL_DATA " << n_cells << '\n';
  os << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (const auto& block : blocks) {
    for (int c = 0; c < block.mesh->n_elements(); ++c) os << block.mesh->subdomain_id << '\n';
  }
}

void write_solution_vtk_files(const CoupledSolver& solver, const std::string& dir,
                              const std::string& base) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());

  std::vector<VtkFields> all;
  for (std::size_t s = 0; s < solver.problem().subdomains.size(); ++s) {
    const VtkFields fields = sample_vtk_fields(solver, static_cast<int>(s));
    const std::string name = solver.problem().subdomains[s].name;
    const std::string path = dir + "/" + base + "_" + name + ".vtk";
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_vtk(os, {fields}, base + " " + name);
    all.push_back(fields);
  }
  const std::string path = dir + "/" + base + "_all.vtk";
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_vtk(os, all, base + " combined");
}

void write_step_records_csv(std::ostream& os, const std::vector<StepRecord>& records) {
  os << "# columns: step,time,newton_iterations,final_residual\n";
  for (const auto& rec : records) {
    const double final_res =
        rec.newton.residual_history.empty() ? 0.0 : rec.newton.residual_history.back();
    os << rec.step << ',' << format_double(rec.time) << ',' << rec.newton.iterations << ','
       << format_double(final_res) << '\n';
  }
}

}  // namespace slidemesh

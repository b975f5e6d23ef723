#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slidemesh/config.hpp"
#include "slidemesh/errors.hpp"
#include "slidemesh/harness.hpp"
#include "slidemesh/solver.hpp"
#include "slidemesh/writers.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitGeometry = 4;
constexpr int kExitIo = 5;

std::ofstream open_output(const std::string& dir, const std::string& file) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw slidemesh::IoError("cannot create output directory '" + dir + "': " + ec.message());
  }
  const std::string path = dir + "/" + file;
  std::ofstream os(path);
  if (!os) throw slidemesh::IoError("cannot open '" + path + "' for writing");
  return os;
}

int run_command(const std::string& config_path, const std::string& out_dir) {
  using namespace slidemesh;
  const RunConfig cfg = parse_config_file(config_path);
  const std::string dir = out_dir.empty() ? cfg.output.directory : out_dir;

  std::cout << "# effective configuration\n";
  print_config(std::cout, cfg);
  {
    std::ofstream echo = open_output(dir, "effective_config.txt");
    print_config(echo, cfg);
  }

  CoupledProblem prob = build_problem(cfg);
  CoupledSolver solver(std::move(prob));
  solver.log = &std::cout;
  const std::vector<StepRecord> records = solver.run();

  std::ofstream steps = open_output(dir, "steps.csv");
  write_step_records_csv(steps, records);
  write_solution_vtk_files(solver, dir, "solution");
  std::cout << "wrote " << dir << "/steps.csv and VTK solution files\n";
  return 0;
}

int convergence_command(const std::string& case_name, int levels, double alpha,
                        const std::string& out_dir) {
  using namespace slidemesh;
  StudyOptions opt;
  opt.levels = levels;
  opt.alpha = alpha;
  opt.log = &std::cout;

  const auto write_report = [&](const ErrorReport& rep, const std::string& file) {
    std::ofstream os = open_output(out_dir, file);
    write_error_report_csv(os, rep);
    write_error_report_csv(std::cout, rep);
  };

  if (case_name == "tg-steady") {
    write_report(taylor_green_steady_study(opt), "tg_steady.csv");
  } else if (case_name == "tg-convective") {
    write_report(taylor_green_convective_study(opt), "tg_convective.csv");
  } else if (case_name == "conduction") {
    write_report(two_material_conduction_study(opt), "conduction.csv");
  } else if (case_name == "channel") {
    const ChannelReport rep = overlapping_channel_study(0.3, opt);
    std::ofstream os = open_output(out_dir, "channel.csv");
    write_channel_report_csv(os, rep);
    write_channel_report_csv(std::cout, rep);
  } else if (case_name == "annulus") {
    const int level = std::min(levels - 1, 2);
    const AnnulusSteadyReport steady = annulus_steady_case(level, opt);
    std::cout << "annulus steady profile relative L2 error: " << steady.profile_err_rel << "\n";
    const AnnulusRevolutionReport rev = annulus_revolution_case(std::min(levels - 1, 2), 64, opt);
    std::cout << "annulus revolution: final profile error " << rev.profile_err_rel_final
              << ", jump fluctuation " << rev.max_rel_fluctuation_u << "\n";
    std::ofstream os = open_output(out_dir, "annulus_jumps.csv");
    os << "# columns: step,jump_u,jump_p\n";
    for (std::size_t s = 0; s < rev.jump_u_history.size(); ++s) {
      os << s + 1 << ',' << format_double(rev.jump_u_history[s]) << ','
         << format_double(rev.jump_p_history[s]) << '\n';
    }
  } else {
    throw ConfigError("unknown convergence case '" + case_name +
                      "' (expected tg-steady, tg-convective, conduction, channel or annulus)");
  }
  return 0;
}

int cut_test_command(const std::string& config_path, const std::string& out_dir) {
  using namespace slidemesh;
  const RunConfig cfg = parse_config_file(config_path);
  if (cfg.interfaces.empty()) {
    throw ConfigError("cut-test needs at least one interface block");
  }
  const std::string dir = out_dir.empty() ? cfg.output.directory : out_dir;

  std::map<std::string, Mesh> meshes;
  for (std::size_t i = 0; i < cfg.meshes.size(); ++i) {
    const MeshSpec& spec = cfg.meshes[i];
    const int id = static_cast<int>(i);
    switch (spec.kind) {
      case MeshSpec::Kind::Rect:
        meshes[spec.name] = build_structured_quad_mesh(
            spec.rect, spec.nx, spec.ny, id,
            SideTags{spec.rect_tags[0], spec.rect_tags[1], spec.rect_tags[2],
                     spec.rect_tags[3]});
        break;
      case MeshSpec::Kind::Annulus:
        meshes[spec.name] = build_annulus_mesh(spec.r_in, spec.r_out, spec.nx, spec.ny, id,
                                               spec.inner_tag, spec.outer_tag);
        break;
      case MeshSpec::Kind::File:
        meshes[spec.name] = read_mesh_file(spec.path, id);
        break;
    }
  }

  std::ofstream os = open_output(dir, "cuts.csv");
  os << "# columns: interface,facet_a,facet_b,param_begin,param_end,measure,points\n";
  for (const auto& ic : cfg.interfaces) {
    if (meshes.count(ic.mesh_a) == 0 || meshes.count(ic.mesh_b) == 0) {
      throw ConfigError("interface '" + ic.name + "' references an unknown mesh");
    }
    const Mesh& mesh_a = meshes.at(ic.mesh_a);
    const Mesh& mesh_b = meshes.at(ic.mesh_b);
    const InterfaceParameterization par =
        ic.circle ? fit_circle_parameterization(mesh_a, ic.tag_a, ic.center)
                  : fit_line_parameterization(mesh_a, ic.tag_a);
    const SlidingInterface iface =
        build_interface_quadrature(mesh_a, ic.tag_a, mesh_b, ic.tag_b, par, cfg.cut_points);
    for (const auto& cut : iface.cuts) {
      os << ic.name << ',' << cut.facet_a << ',' << cut.facet_b << ','
         << format_double(cut.param_begin) << ',' << format_double(cut.param_end) << ','
         << format_double(cut.measure) << ',' << cut.points.size() << '\n';
    }
    double uncovered_a = 0.0;
    double uncovered_b = 0.0;
    for (const auto& sq : iface.uncovered_a) uncovered_a += sq.net_measure();
    for (const auto& sq : iface.uncovered_b) uncovered_b += sq.net_measure();
    std::cout << "interface " << ic.name << ": " << iface.cuts.size() << " cuts, covered "
              << iface.covered_measure() << ", uncovered side a " << uncovered_a << ", side b "
              << uncovered_b << "\n";
  }
  std::cout << "wrote " << dir << "/cuts.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-mesh stabilized finite element solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string case_name;
  int levels = 5;
  double alpha = 30.0;

  CLI::App* run = app.add_subcommand("run", "Solve a configured problem");
  run->add_option("config", config_path, "Run configuration file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  CLI::App* conv = app.add_subcommand("convergence", "Run a predefined verification study");
  conv->add_option("--case", case_name, "tg-steady|tg-convective|conduction|channel|annulus")
      ->required();
  conv->add_option("--levels", levels, "Number of refinement levels");
  conv->add_option("--alpha", alpha, "Interface penalty scaling");
  conv->add_option("--out", out_dir, "Output directory")->default_val("out");

  CLI::App* cut = app.add_subcommand("cut-test", "Build interface cuts and dump them as CSV");
  cut->add_option("config", config_path, "Configuration with mesh and interface blocks")
      ->required();
  cut->add_option("--out", out_dir, "Output directory");

  CLI::App* version = app.add_subcommand("version", "Print the version");

  CLI11_PARSE(app, argc, argv);

  try {
    if (version->parsed()) {
      std::cout << "slidemesh " << kVersion << "\n";
      return 0;
    }
    if (run->parsed()) return run_command(config_path, out_dir);
    if (conv->parsed()) return convergence_command(case_name, levels, alpha, out_dir);
    if (cut->parsed()) return cut_test_command(config_path, out_dir);
  } catch (const slidemesh::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const slidemesh::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return kExitGeometry;
  } catch (const slidemesh::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    if (!e.residual_history.empty()) {
      std::cerr << "residual history:";
      for (double r : e.residual_history) std::cerr << ' ' << r;
      std::cerr << "\n";
    }
    return kExitSolver;
  } catch (const slidemesh::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const slidemesh::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

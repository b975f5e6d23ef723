#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slidemesh/solver.hpp"

namespace slidemesh {

/// Named value recipe used by boundary data and forcing entries:
///   constant V... | parabolic_x U Y0 Y1 | rigid_rotation CX CY OMEGA |
///   linear A BX CY | vortex ETA
struct ValueSpec {
  std::string kind = "constant";
  std::vector<double> params;
};

struct BcFlowSpec {
  BcKind kind = BcKind::StrongDirichlet;
  ValueSpec value;
};

struct BcTempSpec {
  BcKind kind = BcKind::StrongDirichlet;
  ValueSpec value;
};

struct BcSpec {
  std::optional<BcFlowSpec> flow;
  std::optional<BcTempSpec> temp;
};

struct MaterialSpec {
  std::string kind = "newtonian";
  std::vector<double> params{1.0};
};

struct PhysicsSpec {
  double rho = 1.0;
  double cp = 1.0;
  double kappa = 1.0;
};

struct MeshSpec {
  enum class Kind { Rect, Annulus, File };

  std::string name;
  Kind kind = Kind::Rect;
  Rect rect{0.0, 0.0, 1.0, 1.0};
  int nx = 1;
  int ny = 1;
  double r_in = 0.5;
  double r_out = 1.0;
  std::string path;
  std::array<std::string, 4> rect_tags{"left", "right", "bottom", "top"};
  std::string inner_tag = "inner";
  std::string outer_tag = "outer";
  MotionSpec motion;
  std::optional<PhysicsSpec> physics;
  std::optional<MaterialSpec> material;
};

struct InterfaceConfigSpec {
  std::string name;
  std::string mesh_a;
  std::string tag_a;
  std::string mesh_b;
  std::string tag_b;
  bool circle = false;
  Vec2 center = Vec2::Zero();
  std::optional<ValueSpec> uncovered_flow;
  std::optional<ValueSpec> uncovered_temp;
};

struct AnchorSpec {
  std::string mesh;
  Vec2 at = Vec2::Zero();
  double value = 0.0;
};

struct OutputSpec {
  std::string directory = "out";
};

struct RunConfig {
  TimeSettings time;
  NonlinearSettings nonlinear;
  double alpha = 30.0;
  std::string tau_variant = "standard";
  bool recovery = true;
  int volume_points = 2;
  int edge_points = 2;
  int cut_points = 3;
  bool solve_flow = true;
  bool solve_temp = true;
  PhysicsSpec physics;
  MaterialSpec material;
  std::vector<MeshSpec> meshes;
  std::vector<InterfaceConfigSpec> interfaces;
  std::map<std::string, BcSpec> bcs;
  std::optional<AnchorSpec> anchor;
  OutputSpec output;
};

/// Parses the block-structured run configuration; see docs/config-format.md.
/// Raises ConfigError with "<name>:<line>: ..." on malformed input.
RunConfig parse_config(std::istream& in, const std::string& stream_name = "<config>");
RunConfig parse_config_file(const std::string& path);

/// Materializes meshes, materials, boundary conditions and couplings.
CoupledProblem build_problem(const RunConfig& cfg);

/// Canonical echo of the effective configuration (parse -> print -> parse is
/// a fixed point).
void print_config(std::ostream& os, const RunConfig& cfg);

MaterialModel make_material(const MaterialSpec& spec);

}  // namespace slidemesh

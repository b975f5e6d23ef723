#include "slidemesh/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "slidemesh/errors.hpp"
#include "slidemesh/harness.hpp"

namespace slidemesh {

namespace {

struct TokenLine {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<TokenLine> tokenize(std::istream& in) {
  std::vector<TokenLine> out;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream iss(raw);
    TokenLine line;
    line.number = number;
    std::string tok;
    while (iss >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

class Parser {
 public:
  Parser(std::istream& in, std::string name) : name_(std::move(name)), lines_(tokenize(in)) {}

  RunConfig parse() {
    RunConfig cfg;
    while (pos_ < lines_.size()) {
      const TokenLine& line = lines_[pos_];
      require_block_header(line);
      const std::string& section = line.tokens.front();
      if (section == "time") {
        parse_keyed_block(1, [&](const TokenLine& l) { time_entry(cfg, l); });
      } else if (section == "nonlinear") {
        parse_keyed_block(1, [&](const TokenLine& l) { nonlinear_entry(cfg, l); });
      } else if (section == "stabilization") {
        parse_keyed_block(1, [&](const TokenLine& l) { stabilization_entry(cfg, l); });
      } else if (section == "solve") {
        parse_keyed_block(1, [&](const TokenLine& l) { solve_entry(cfg, l); });
      } else if (section == "physics") {
        parse_physics_block(1, cfg.physics);
      } else if (section == "material") {
        cfg.material = parse_material_block(1);
      } else if (section == "mesh") {
        cfg.meshes.push_back(parse_mesh_block(line));
      } else if (section == "interface") {
        cfg.interfaces.push_back(parse_interface_block(line));
      } else if (section == "bc") {
        parse_bc_block(line, cfg);
      } else if (section == "anchor") {
        cfg.anchor = parse_anchor_block(line);
      } else if (section == "output") {
        parse_keyed_block(1, [&](const TokenLine& l) {
          if (l.tokens.front() == "directory" && l.tokens.size() == 2) {
            cfg.output.directory = l.tokens[1];
          } else {
            fail(l, "unknown output key '" + l.tokens.front() + "'");
          }
        });
      } else {
        fail(line, "unknown section '" + section + "'");
      }
    }
    return cfg;
  }

 private:
  [[noreturn]] void fail(const TokenLine& line, const std::string& msg) const {
    throw ConfigError(name_ + ":" + std::to_string(line.number) + ": " + msg);
  }

  void require_block_header(const TokenLine& line) const {
    if (line.tokens.back() != "{") {
      fail(line, "expected a block header ending in '{', got '" + line.tokens.back() + "'");
    }
  }

  const TokenLine& advance() { return lines_[pos_++]; }

  bool at_block_end() const {
    return pos_ < lines_.size() && lines_[pos_].tokens.size() == 1 &&
           lines_[pos_].tokens.front() == "}";
  }

  /// Consumes the header (at `header_tokens` + "{") and iterates entries until
  /// the closing brace.
  template <typename Fn>
  void parse_keyed_block(std::size_t header_tokens, Fn&& entry) {
    const TokenLine& header = lines_[pos_];
    if (header.tokens.size() != header_tokens + 1) fail(header, "malformed block header");
    ++pos_;
    while (pos_ < lines_.size() && !at_block_end()) {
      const TokenLine& line = advance();
      if (line.tokens.back() == "{") fail(line, "unexpected nested block");
      entry(line);
    }
    expect_close(header);
  }

  void expect_close(const TokenLine& header) {
    if (pos_ >= lines_.size()) fail(header, "unterminated block");
    ++pos_;  // consume "}"
  }

  double to_double(const TokenLine& line, const std::string& tok) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      fail(line, "expected a number, got '" + tok + "'");
    }
  }

  int to_int(const TokenLine& line, const std::string& tok) const {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      fail(line, "expected an integer, got '" + tok + "'");
    }
  }

  bool to_bool(const TokenLine& line, const std::string& tok) const {
    if (tok == "on" || tok == "true") return true;
    if (tok == "off" || tok == "false") return false;
    fail(line, "expected on/off, got '" + tok + "'");
  }

  void expect_count(const TokenLine& line, std::size_t count) const {
    if (line.tokens.size() != count) {
      fail(line, "expected " + std::to_string(count - 1) + " value(s) after '" +
                     line.tokens.front() + "'");
    }
  }

  void time_entry(RunConfig& cfg, const TokenLine& l) {
    const std::string& key = l.tokens.front();
    if (key == "mode") {
      expect_count(l, 2);
      if (l.tokens[1] == "steady") {
        cfg.time.steady = true;
      } else if (l.tokens[1] == "transient") {
        cfg.time.steady = false;
      } else {
        fail(l, "time mode must be steady or transient");
      }
    } else if (key == "dt") {
      expect_count(l, 2);
      cfg.time.dt = to_double(l, l.tokens[1]);
    } else if (key == "steps") {
      expect_count(l, 2);
      cfg.time.steps = to_int(l, l.tokens[1]);
    } else {
      fail(l, "unknown time key '" + key + "'");
    }
  }

  void nonlinear_entry(RunConfig& cfg, const TokenLine& l) {
    const std::string& key = l.tokens.front();
    expect_count(l, 2);
    if (key == "tol_abs") {
      cfg.nonlinear.tol_abs = to_double(l, l.tokens[1]);
    } else if (key == "tol_rel") {
      cfg.nonlinear.tol_rel = to_double(l, l.tokens[1]);
    } else if (key == "max_iter") {
      cfg.nonlinear.max_iter = to_int(l, l.tokens[1]);
    } else {
      fail(l, "unknown nonlinear key '" + key + "'");
    }
  }

  void stabilization_entry(RunConfig& cfg, const TokenLine& l) {
    const std::string& key = l.tokens.front();
    expect_count(l, 2);
    if (key == "alpha") {
      cfg.alpha = to_double(l, l.tokens[1]);
    } else if (key == "tau") {
      cfg.tau_variant = l.tokens[1];
    } else if (key == "recovery") {
      cfg.recovery = to_bool(l, l.tokens[1]);
    } else if (key == "volume_points") {
      cfg.volume_points = to_int(l, l.tokens[1]);
    } else if (key == "edge_points") {
      cfg.edge_points = to_int(l, l.tokens[1]);
    } else if (key == "cut_points") {
      cfg.cut_points = to_int(l, l.tokens[1]);
    } else {
      fail(l, "unknown stabilization key '" + key + "'");
    }
  }

  void solve_entry(RunConfig& cfg, const TokenLine& l) {
    expect_count(l, 2);
    const std::string& key = l.tokens.front();
    if (key == "flow") {
      cfg.solve_flow = to_bool(l, l.tokens[1]);
    } else if (key == "temp") {
      cfg.solve_temp = to_bool(l, l.tokens[1]);
    } else {
      fail(l, "unknown solve key '" + key + "'");
    }
  }

  void parse_physics_block(std::size_t header_tokens, PhysicsSpec& phys) {
    parse_keyed_block(header_tokens, [&](const TokenLine& l) {
      const std::string& key = l.tokens.front();
      expect_count(l, 2);
      if (key == "rho") {
        phys.rho = to_double(l, l.tokens[1]);
      } else if (key == "cp") {
        phys.cp = to_double(l, l.tokens[1]);
      } else if (key == "kappa") {
        phys.kappa = to_double(l, l.tokens[1]);
      } else {
        fail(l, "unknown physics key '" + key + "'");
      }
    });
  }

  MaterialSpec parse_material_block(std::size_t header_tokens) {
    MaterialSpec spec;
    bool seen = false;
    parse_keyed_block(header_tokens, [&](const TokenLine& l) {
      if (seen) fail(l, "material block holds a single model line");
      seen = true;
      spec.kind = l.tokens.front();
      spec.params.clear();
      for (std::size_t i = 1; i < l.tokens.size(); ++i) {
        spec.params.push_back(to_double(l, l.tokens[i]));
      }
    });
    return spec;
  }

  MeshSpec parse_mesh_block(const TokenLine& header) {
    if (header.tokens.size() != 3) fail(header, "expected: mesh <name> {");
    MeshSpec spec;
    spec.name = header.tokens[1];
    ++pos_;
    while (pos_ < lines_.size() && !at_block_end()) {
      const TokenLine& l = lines_[pos_];
      const std::string& key = l.tokens.front();
      if (l.tokens.back() == "{") {
        if (key == "physics") {
          PhysicsSpec phys;
          parse_physics_block(1, phys);
          spec.physics = phys;
        } else if (key == "material") {
          spec.material = parse_material_block(1);
        } else {
          fail(l, "unknown mesh sub-block '" + key + "'");
        }
        continue;
      }
      ++pos_;
      if (key == "rect") {
        expect_count(l, 5);
        spec.kind = MeshSpec::Kind::Rect;
        spec.rect = Rect{to_double(l, l.tokens[1]), to_double(l, l.tokens[2]),
                         to_double(l, l.tokens[3]), to_double(l, l.tokens[4])};
      } else if (key == "annulus") {
        expect_count(l, 3);
        spec.kind = MeshSpec::Kind::Annulus;
        spec.r_in = to_double(l, l.tokens[1]);
        spec.r_out = to_double(l, l.tokens[2]);
      } else if (key == "file") {
        expect_count(l, 2);
        spec.kind = MeshSpec::Kind::File;
        spec.path = l.tokens[1];
      } else if (key == "resolution") {
        expect_count(l, 3);
        spec.nx = to_int(l, l.tokens[1]);
        spec.ny = to_int(l, l.tokens[2]);
      } else if (key == "tags") {
        if (l.tokens.size() == 5) {
          for (int i = 0; i < 4; ++i) spec.rect_tags[i] = l.tokens[i + 1];
        } else if (l.tokens.size() == 3) {
          spec.inner_tag = l.tokens[1];
          spec.outer_tag = l.tokens[2];
        } else {
          fail(l, "tags takes 4 names (rect: left right bottom top) or 2 (annulus: inner outer)");
        }
      } else if (key == "motion") {
        expect_count(l, 4);
        spec.motion.center = Vec2(to_double(l, l.tokens[1]), to_double(l, l.tokens[2]));
        spec.motion.omega = to_double(l, l.tokens[3]);
      } else {
        fail(l, "unknown mesh key '" + key + "'");
      }
    }
    expect_close(header);
    return spec;
  }

  ValueSpec parse_value(const TokenLine& l, std::size_t from) const {
    if (from >= l.tokens.size()) fail(l, "missing value specification");
    ValueSpec v;
    v.kind = l.tokens[from];
    for (std::size_t i = from + 1; i < l.tokens.size(); ++i) {
      v.params.push_back(to_double(l, l.tokens[i]));
    }
    return v;
  }

  BcKind parse_bc_kind(const TokenLine& l, const std::string& tok) const {
    if (tok == "strong") return BcKind::StrongDirichlet;
    if (tok == "weak") return BcKind::WeakDirichlet;
    if (tok == "neumann") return BcKind::Neumann;
    fail(l, "boundary kind must be strong, weak or neumann, got '" + tok + "'");
  }

  InterfaceConfigSpec parse_interface_block(const TokenLine& header) {
    if (header.tokens.size() != 3) fail(header, "expected: interface <name> {");
    InterfaceConfigSpec spec;
    spec.name = header.tokens[1];
    parse_keyed_block(2, [&](const TokenLine& l) {
      const std::string& key = l.tokens.front();
      if (key == "sides") {
        expect_count(l, 5);
        spec.mesh_a = l.tokens[1];
        spec.tag_a = l.tokens[2];
        spec.mesh_b = l.tokens[3];
        spec.tag_b = l.tokens[4];
      } else if (key == "curve") {
        if (l.tokens.size() == 2 && l.tokens[1] == "line") {
          spec.circle = false;
        } else if (l.tokens.size() == 4 && l.tokens[1] == "circle") {
          spec.circle = true;
          spec.center = Vec2(to_double(l, l.tokens[2]), to_double(l, l.tokens[3]));
        } else {
          fail(l, "curve must be 'line' or 'circle CX CY'");
        }
      } else if (key == "uncovered_flow") {
        spec.uncovered_flow = parse_value(l, 1);
      } else if (key == "uncovered_temp") {
        spec.uncovered_temp = parse_value(l, 1);
      } else {
        fail(l, "unknown interface key '" + key + "'");
      }
    });
    return spec;
  }

  void parse_bc_block(const TokenLine& header, RunConfig& cfg) {
    if (header.tokens.size() != 3) fail(header, "expected: bc <tag> {");
    const std::string tag = header.tokens[1];
    BcSpec spec;
    parse_keyed_block(2, [&](const TokenLine& l) {
      const std::string& key = l.tokens.front();
      if (key == "flow") {
        if (l.tokens.size() < 3) fail(l, "expected: flow <kind> <value...>");
        BcFlowSpec flow;
        flow.kind = parse_bc_kind(l, l.tokens[1]);
        flow.value = parse_value(l, 2);
        spec.flow = flow;
      } else if (key == "temp") {
        if (l.tokens.size() < 3) fail(l, "expected: temp <kind> <value...>");
        BcTempSpec temp;
        temp.kind = parse_bc_kind(l, l.tokens[1]);
        temp.value = parse_value(l, 2);
        spec.temp = temp;
      } else if (key == "natural") {
        expect_count(l, 1);
      } else {
        fail(l, "unknown bc key '" + key + "'");
      }
    });
    cfg.bcs[tag] = spec;
  }

  AnchorSpec parse_anchor_block(const TokenLine&) {
    AnchorSpec spec;
    parse_keyed_block(1, [&](const TokenLine& l) {
      const std::string& key = l.tokens.front();
      if (key == "subdomain") {
        expect_count(l, 2);
        spec.mesh = l.tokens[1];
      } else if (key == "at") {
        expect_count(l, 3);
        spec.at = Vec2(to_double(l, l.tokens[1]), to_double(l, l.tokens[2]));
      } else if (key == "value") {
        expect_count(l, 2);
        spec.value = to_double(l, l.tokens[1]);
      } else {
        fail(l, "unknown anchor key '" + key + "'");
      }
    });
    return spec;
  }

  std::string name_;
  std::vector<TokenLine> lines_;
  std::size_t pos_ = 0;
};

std::function<Vec2(const Vec2&, double)> flow_value_fn(const ValueSpec& v) {
  const auto need = [&](std::size_t count) {
    if (v.params.size() != count) {
      throw ConfigError("value '" + v.kind + "' takes " + std::to_string(count) +
                        " parameter(s), got " + std::to_string(v.params.size()));
    }
  };
  if (v.kind == "constant") {
    need(2);
    const Vec2 c(v.params[0], v.params[1]);
    return [c](const Vec2&, double) { return c; };
  }
  if (v.kind == "parabolic_x") {
    need(3);
    const double peak = v.params[0];
    const double y0 = v.params[1];
    const double y1 = v.params[2];
    const double width = y1 - y0;
    return [=](const Vec2& x, double) {
      return Vec2(4.0 * peak * (x[1] - y0) * (y1 - x[1]) / (width * width), 0.0);
    };
  }
  if (v.kind == "rigid_rotation") {
    need(3);
    const Vec2 center(v.params[0], v.params[1]);
    const double omega = v.params[2];
    return [=](const Vec2& x, double) {
      const Vec2 r = x - center;
      return Vec2(-omega * r[1], omega * r[0]);
    };
  }
  if (v.kind == "vortex") {
    need(1);
    const TaylorGreen tg{v.params[0]};
    return [tg](const Vec2& x, double t) { return tg.velocity(x, t); };
  }
  throw ConfigError("unknown flow value kind '" + v.kind + "'");
}

std::function<double(const Vec2&, double)> temp_value_fn(const ValueSpec& v) {
  if (v.kind == "constant") {
    if (v.params.size() != 1) {
      throw ConfigError("temperature value 'constant' takes 1 parameter");
    }
    const double c = v.params[0];
    return [c](const Vec2&, double) { return c; };
  }
  if (v.kind == "linear") {
    if (v.params.size() != 3) {
      throw ConfigError("temperature value 'linear' takes 3 parameters (a bx cy)");
    }
    const double a = v.params[0];
    const double bx = v.params[1];
    const double cy = v.params[2];
    return [=](const Vec2& x, double) { return a + bx * x[0] + cy * x[1]; };
  }
  throw ConfigError("unknown temperature value kind '" + v.kind + "'");
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& stream_name) {
  Parser parser(in, stream_name);
  return parser.parse();
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

MaterialModel make_material(const MaterialSpec& spec) {
  const auto need = [&](std::size_t count) {
    if (spec.params.size() != count) {
      throw ConfigError("material '" + spec.kind + "' takes " + std::to_string(count) +
                        " parameter(s), got " + std::to_string(spec.params.size()));
    }
  };
  if (spec.kind == "newtonian") {
    need(1);
    return MaterialModel::newtonian(spec.params[0]);
  }
  if (spec.kind == "carreau") {
    need(4);
    CarreauParams p;
    p.eta0 = spec.params[0];
    p.eta_inf = spec.params[1];
    p.lambda = spec.params[2];
    p.n = spec.params[3];
    return MaterialModel::carreau(p);
  }
  if (spec.kind == "cross_wlf") {
    need(6);
    CrossWlfParams p;
    p.D1 = spec.params[0];
    p.A1 = spec.params[1];
    p.A2 = spec.params[2];
    p.T_ref = spec.params[3];
    p.tau_star = spec.params[4];
    p.n = spec.params[5];
    return MaterialModel::cross_wlf(p);
  }
  throw ConfigError("unknown material kind '" + spec.kind + "'");
}

CoupledProblem build_problem(const RunConfig& cfg) {
  if (cfg.meshes.empty()) throw ConfigError("configuration declares no meshes");
  CoupledProblem prob;
  std::map<std::string, int> mesh_index;
  for (std::size_t i = 0; i < cfg.meshes.size(); ++i) {
    const MeshSpec& spec = cfg.meshes[i];
    if (mesh_index.count(spec.name) > 0) {
      throw ConfigError("duplicate mesh name '" + spec.name + "'");
    }
    mesh_index[spec.name] = static_cast<int>(i);

    Subdomain sub;
    sub.name = spec.name;
    const int id = static_cast<int>(i);
    switch (spec.kind) {
      case MeshSpec::Kind::Rect:
        sub.mesh = build_structured_quad_mesh(
            spec.rect, spec.nx, spec.ny, id,
            SideTags{spec.rect_tags[0], spec.rect_tags[1], spec.rect_tags[2],
                     spec.rect_tags[3]});
        break;
      case MeshSpec::Kind::Annulus:
        sub.mesh = build_annulus_mesh(spec.r_in, spec.r_out, spec.nx, spec.ny, id,
                                      spec.inner_tag, spec.outer_tag);
        break;
      case MeshSpec::Kind::File:
        sub.mesh = read_mesh_file(spec.path, id);
        break;
    }
    sub.motion = spec.motion;
    const PhysicsSpec& phys = spec.physics ? *spec.physics : cfg.physics;
    sub.phys.rho = phys.rho;
    sub.phys.cp = phys.cp;
    sub.phys.kappa = phys.kappa;
    sub.material = make_material(spec.material ? *spec.material : cfg.material);
    prob.subdomains.push_back(std::move(sub));
  }

  const auto lookup = [&](const std::string& name) {
    const auto it = mesh_index.find(name);
    if (it == mesh_index.end()) throw ConfigError("unknown mesh name '" + name + "'");
    return it->second;
  };

  for (const auto& ic : cfg.interfaces) {
    InterfaceSpec spec;
    spec.sub_a = lookup(ic.mesh_a);
    spec.tag_a = ic.tag_a;
    spec.sub_b = lookup(ic.mesh_b);
    spec.tag_b = ic.tag_b;
    spec.kind = ic.circle ? InterfaceParameterization::Kind::Circle
                          : InterfaceParameterization::Kind::Line;
    spec.circle_center = ic.center;
    if (ic.uncovered_flow) spec.uncovered_flow = flow_value_fn(*ic.uncovered_flow);
    if (ic.uncovered_temp) spec.uncovered_temp = temp_value_fn(*ic.uncovered_temp);
    prob.interfaces.push_back(std::move(spec));
  }

  for (const auto& [tag, bc_spec] : cfg.bcs) {
    BoundaryCondition bc;
    if (bc_spec.flow) {
      bc.flow = FlowBc{bc_spec.flow->kind, flow_value_fn(bc_spec.flow->value)};
    }
    if (bc_spec.temp) {
      bc.temp = TempBc{bc_spec.temp->kind, temp_value_fn(bc_spec.temp->value)};
    }
    prob.bcs[tag] = std::move(bc);
  }

  if (cfg.anchor) {
    PressureAnchor anchor;
    anchor.sub = lookup(cfg.anchor->mesh);
    anchor.location = cfg.anchor->at;
    const double value = cfg.anchor->value;
    anchor.value = [value](double) { return value; };
    prob.anchor = anchor;
  }

  prob.time = cfg.time;
  prob.nonlinear = cfg.nonlinear;
  prob.stab.alpha = cfg.alpha;
  prob.stab.tau_variant = cfg.tau_variant;
  prob.stab.recovery = cfg.recovery;
  prob.stab.volume_points = cfg.volume_points;
  prob.stab.edge_points = cfg.edge_points;
  prob.stab.cut_points = cfg.cut_points;
  prob.solve_flow = cfg.solve_flow;
  prob.solve_temp = cfg.solve_temp;

  // A floating additive constant makes every linear system singular, which a
  // direct solver cannot survive; reject such configurations up front.
  if (cfg.solve_flow) {
    // Pressure is fixed by an anchor, by a prescribed traction, or by a
    // do-nothing boundary (a tagged facet without a flow condition).
    bool pinned = cfg.anchor.has_value();
    for (const auto& [tag, bc_spec] : cfg.bcs) {
      if (bc_spec.flow && bc_spec.flow->kind == BcKind::Neumann) pinned = true;
    }
    if (!pinned) {
      std::set<std::string> interface_tags;
      for (const auto& ic : cfg.interfaces) {
        interface_tags.insert(ic.tag_a);
        interface_tags.insert(ic.tag_b);
      }
      for (const auto& sub : prob.subdomains) {
        for (const auto& facet : sub.mesh.boundary_facets) {
          if (interface_tags.count(facet.tag) > 0) continue;
          const auto it = cfg.bcs.find(facet.tag);
          if (it == cfg.bcs.end() || !it->second.flow) {
            pinned = true;
            break;
          }
        }
        if (pinned) break;
      }
    }
    if (!pinned) {
      throw ConfigError(
          "nothing fixes the pressure level: add an anchor block, a neumann flow boundary, or "
          "leave one boundary without a flow condition");
    }
  }
  if (cfg.solve_temp && cfg.time.steady) {
    // A steady temperature solve needs Dirichlet data somewhere; transient
    // runs are fine because the time derivative fixes the level.
    bool pinned = false;
    for (const auto& [tag, bc_spec] : cfg.bcs) {
      if (bc_spec.temp && (bc_spec.temp->kind == BcKind::StrongDirichlet ||
                           bc_spec.temp->kind == BcKind::WeakDirichlet)) {
        pinned = true;
      }
    }
    for (const auto& ic : cfg.interfaces) {
      if (ic.uncovered_temp) pinned = true;
    }
    if (!pinned) {
      throw ConfigError(
          "nothing fixes the steady temperature level: add a strong or weak temperature boundary "
          "(or interface uncovered_temp data), or turn the temperature solve off");
    }
  }
  return prob;
}

namespace {

void print_value(std::ostream& os, const ValueSpec& v) {
  os << v.kind;
  for (double p : v.params) os << ' ' << p;
}

const char* kind_name(BcKind kind) {
  switch (kind) {
    case BcKind::StrongDirichlet: return "strong";
    case BcKind::WeakDirichlet: return "weak";
    case BcKind::Neumann: return "neumann";
  }
  return "strong";
}

void print_material(std::ostream& os, const MaterialSpec& m, const char* indent) {
  os << indent << "material {\n" << indent << "  " << m.kind;
  for (double p : m.params) os << ' ' << p;
  os << '\n' << indent << "}\n";
}

void print_physics(std::ostream& os, const PhysicsSpec& p, const char* indent) {
  os << indent << "physics {\n";
  os << indent << "  rho " << p.rho << '\n';
  os << indent << "  cp " << p.cp << '\n';
  os << indent << "  kappa " << p.kappa << '\n';
  os << indent << "}\n";
}

}  // namespace

void print_config(std::ostream& os, const RunConfig& cfg) {
  os << "time {\n  mode " << (cfg.time.steady ? "steady" : "transient") << '\n';
  if (!cfg.time.steady) {
    os << "  dt " << cfg.time.dt << "\n  steps " << cfg.time.steps << '\n';
  }
  os << "}\n";
  os << "nonlinear {\n  tol_abs " << cfg.nonlinear.tol_abs << "\n  tol_rel "
     << cfg.nonlinear.tol_rel << "\n  max_iter " << cfg.nonlinear.max_iter << "\n}\n";
  os << "stabilization {\n  alpha " << cfg.alpha << "\n  tau " << cfg.tau_variant
     << "\n  recovery " << (cfg.recovery ? "on" : "off") << "\n  volume_points "
     << cfg.volume_points << "\n  edge_points " << cfg.edge_points << "\n  cut_points "
     << cfg.cut_points << "\n}\n";
  os << "solve {\n  flow " << (cfg.solve_flow ? "on" : "off") << "\n  temp "
     << (cfg.solve_temp ? "on" : "off") << "\n}\n";
  print_physics(os, cfg.physics, "");
  print_material(os, cfg.material, "");
  for (const auto& m : cfg.meshes) {
    os << "mesh " << m.name << " {\n";
    switch (m.kind) {
      case MeshSpec::Kind::Rect:
        os << "  rect " << m.rect.x0 << ' ' << m.rect.y0 << ' ' << m.rect.x1 << ' ' << m.rect.y1
           << '\n';
        os << "  resolution " << m.nx << ' ' << m.ny << '\n';
        os << "  tags " << m.rect_tags[0] << ' ' << m.rect_tags[1] << ' ' << m.rect_tags[2]
           << ' ' << m.rect_tags[3] << '\n';
        break;
      case MeshSpec::Kind::Annulus:
        os << "  annulus " << m.r_in << ' ' << m.r_out << '\n';
        os << "  resolution " << m.nx << ' ' << m.ny << '\n';
        os << "  tags " << m.inner_tag << ' ' << m.outer_tag << '\n';
        break;
      case MeshSpec::Kind::File:
        os << "  file " << m.path << '\n';
        break;
    }
    if (m.motion.moving()) {
      os << "  motion " << m.motion.center[0] << ' ' << m.motion.center[1] << ' '
         << m.motion.omega << '\n';
    }
    if (m.physics) print_physics(os, *m.physics, "  ");
    if (m.material) print_material(os, *m.material, "  ");
    os << "}\n";
  }
  for (const auto& ic : cfg.interfaces) {
    os << "interface " << ic.name << " {\n";
    os << "  sides " << ic.mesh_a << ' ' << ic.tag_a << ' ' << ic.mesh_b << ' ' << ic.tag_b
       << '\n';
    if (ic.circle) {
      os << "  curve circle " << ic.center[0] << ' ' << ic.center[1] << '\n';
    } else {
      os << "  curve line\n";
    }
    if (ic.uncovered_flow) {
      os << "  uncovered_flow ";
      print_value(os, *ic.uncovered_flow);
      os << '\n';
    }
    if (ic.uncovered_temp) {
      os << "  uncovered_temp ";
      print_value(os, *ic.uncovered_temp);
      os << '\n';
    }
    os << "}\n";
  }
  for (const auto& [tag, bc] : cfg.bcs) {
    os << "bc " << tag << " {\n";
    if (!bc.flow && !bc.temp) os << "  natural\n";
    if (bc.flow) {
      os << "  flow " << kind_name(bc.flow->kind) << ' ';
      print_value(os, bc.flow->value);
      os << '\n';
    }
    if (bc.temp) {
      os << "  temp " << kind_name(bc.temp->kind) << ' ';
      print_value(os, bc.temp->value);
      os << '\n';
    }
    os << "}\n";
  }
  if (cfg.anchor) {
    os << "anchor {\n  subdomain " << cfg.anchor->mesh << "\n  at " << cfg.anchor->at[0] << ' '
       << cfg.anchor->at[1] << "\n  value " << cfg.anchor->value << "\n}\n";
  }
  os << "output {\n  directory " << cfg.output.directory << "\n}\n";
}

}  // namespace slidemesh

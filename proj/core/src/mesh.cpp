#include "slidemesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace slidemesh {

GaussRule1d gauss_legendre(int n_points) {
  GaussRule1d rule;
  switch (n_points) {
    case 1:
      rule.points = {0.0};
      rule.weights = {2.0};
      break;
    case 2:
      rule.points = {-0.57735026918962576451, 0.57735026918962576451};
      rule.weights = {1.0, 1.0};
      break;
    case 3:
      rule.points = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
      rule.weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    case 4:
      rule.points = {-0.86113631159405257522, -0.33998104358485626480, 0.33998104358485626480,
                     0.86113631159405257522};
      rule.weights = {0.34785484513745385737, 0.65214515486254614263, 0.65214515486254614263,
                      0.34785484513745385737};
      break;
    case 5:
      rule.points = {-0.90617984593866399280, -0.53846931010568309104, 0.0,
                     0.53846931010568309104, 0.90617984593866399280};
      rule.weights = {0.23692688505618908751, 0.47862867049936646804, 0.56888888888888888889,
                      0.47862867049936646804, 0.23692688505618908751};
      break;
    case 6:
      rule.points = {-0.93246951420315202781, -0.66120938646626451366, -0.23861918608319690863,
                     0.23861918608319690863, 0.66120938646626451366, 0.93246951420315202781};
      rule.weights = {0.17132449237917034504, 0.36076157304813860757, 0.46791393457269104739,
                      0.46791393457269104739, 0.36076157304813860757, 0.17132449237917034504};
      break;
    default:
      throw ConfigError("gauss_legendre: unsupported point count " + std::to_string(n_points));
  }
  return rule;
}

QuadRule2d tensor_gauss(int n_per_direction) {
  const GaussRule1d line = gauss_legendre(n_per_direction);
  QuadRule2d rule;
  rule.points.reserve(line.points.size() * line.points.size());
  rule.weights.reserve(rule.points.capacity());
  for (std::size_t j = 0; j < line.points.size(); ++j) {
    for (std::size_t i = 0; i < line.points.size(); ++i) {
      rule.points.emplace_back(line.points[i], line.points[j]);
      rule.weights.push_back(line.weights[i] * line.weights[j]);
    }
  }
  return rule;
}

std::array<double, 4> ReferenceElement::shape_values(const Vec2& xi) {
  const double x = xi.x();
  const double y = xi.y();
  return {0.25 * (1.0 - x) * (1.0 - y), 0.25 * (1.0 + x) * (1.0 - y),
          0.25 * (1.0 + x) * (1.0 + y), 0.25 * (1.0 - x) * (1.0 + y)};
}

std::array<Vec2, 4> ReferenceElement::shape_gradients(const Vec2& xi) {
  const double x = xi.x();
  const double y = xi.y();
  return {Vec2(-0.25 * (1.0 - y), -0.25 * (1.0 - x)), Vec2(0.25 * (1.0 - y), -0.25 * (1.0 + x)),
          Vec2(0.25 * (1.0 + y), 0.25 * (1.0 + x)), Vec2(-0.25 * (1.0 + y), 0.25 * (1.0 - x))};
}

Vec2 ReferenceElement::edge_point(int edge, double t) {
  switch (edge) {
    case 0: return {t, -1.0};
    case 1: return {1.0, t};
    case 2: return {-t, 1.0};
    case 3: return {-1.0, -t};
    default: throw GeometryError("edge_point: local edge out of range");
  }
}

Vec2 ReferenceElement::edge_direction(int edge) {
  switch (edge) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    case 3: return {0.0, -1.0};
    default: throw GeometryError("edge_direction: local edge out of range");
  }
}

Vec2 ReferenceElement::edge_reference_normal(int edge) {
  switch (edge) {
    case 0: return {0.0, -1.0};
    case 1: return {1.0, 0.0};
    case 2: return {0.0, 1.0};
    case 3: return {-1.0, 0.0};
    default: throw GeometryError("edge_reference_normal: local edge out of range");
  }
}

FacetGeometry Mesh::facet_geometry(const BoundaryFacet& facet) const {
  const auto& conn = elements.at(facet.element);
  const int a = conn[facet.local_edge];
  const int b = conn[(facet.local_edge + 1) % 4];
  FacetGeometry geom;
  geom.p0 = node_coords[a];
  geom.p1 = node_coords[b];
  const Vec2 d = geom.p1 - geom.p0;
  geom.measure = d.norm();
  if (geom.measure <= 0.0) {
    throw GeometryError("facet_geometry: zero-length facet on element " +
                        std::to_string(facet.element));
  }
  // Element nodes run counterclockwise, so the outward normal is the edge
  // tangent rotated by -90 degrees.
  geom.normal = Vec2(d.y(), -d.x()) / geom.measure;
  return geom;
}

FacetGeometry Mesh::facet_geometry(int facet_index) const {
  return facet_geometry(boundary_facets.at(facet_index));
}

double Mesh::min_edge_length() const {
  double h = std::numeric_limits<double>::max();
  for (const auto& conn : elements) {
    for (int k = 0; k < 4; ++k) {
      const double len = (node_coords[conn[(k + 1) % 4]] - node_coords[conn[k]]).norm();
      h = std::min(h, len);
    }
  }
  return h;
}

void Mesh::validate() const {
  const int nn = n_nodes();
  if (node_velocity.size() != node_coords.size()) {
    throw GeometryError("mesh: node_velocity size does not match node count");
  }
  for (int e = 0; e < n_elements(); ++e) {
    for (int k = 0; k < 4; ++k) {
      const int id = elements[e][k];
      if (id < 0 || id >= nn) {
        throw GeometryError("mesh: element " + std::to_string(e) + " references node " +
                            std::to_string(id));
      }
    }
    // Positive Jacobian at all four corners catches inverted and twisted cells.
    for (const double sx : {-1.0, 1.0}) {
      for (const double sy : {-1.0, 1.0}) {
        const auto grads = ReferenceElement::shape_gradients(Vec2(sx, sy));
        Mat2 jac = Mat2::Zero();
        for (int a = 0; a < 4; ++a) {
          jac += node_coords[elements[e][a]] * grads[a].transpose();
        }
        if (jac.determinant() <= 0.0) {
          throw GeometryError("mesh: element " + std::to_string(e) +
                              " has non-positive Jacobian");
        }
      }
    }
  }
  for (const auto& facet : boundary_facets) {
    if (facet.element < 0 || facet.element >= n_elements() || facet.local_edge < 0 ||
        facet.local_edge > 3) {
      throw GeometryError("mesh: boundary facet references element " +
                          std::to_string(facet.element) + " edge " +
                          std::to_string(facet.local_edge));
    }
    if (facet.tag.empty()) {
      throw GeometryError("mesh: boundary facet with empty tag on element " +
                          std::to_string(facet.element));
    }
  }
}

Mesh build_structured_quad_mesh(const Rect& rect, int nx, int ny, int subdomain_id,
                                const SideTags& tags) {
  if (nx < 1 || ny < 1) {
    throw ConfigError("build_structured_quad_mesh: element counts must be positive");
  }
  if (rect.width() <= 0.0 || rect.height() <= 0.0) {
    throw ConfigError("build_structured_quad_mesh: rectangle has non-positive extent");
  }
  Mesh mesh;
  mesh.subdomain_id = subdomain_id;
  mesh.node_coords.reserve((nx + 1) * (ny + 1));
  const double dx = rect.width() / nx;
  const double dy = rect.height() / ny;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.node_coords.emplace_back(rect.x0 + i * dx, rect.y0 + j * dy);
    }
  }
  mesh.node_velocity.assign(mesh.node_coords.size(), Vec2::Zero());
  const auto node = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.elements.reserve(nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.elements.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
    }
  }
  const auto elem = [nx](int i, int j) { return j * nx + i; };
  for (int i = 0; i < nx; ++i) {
    mesh.boundary_facets.push_back({elem(i, 0), 0, tags.bottom});
    mesh.boundary_facets.push_back({elem(i, ny - 1), 2, tags.top});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_facets.push_back({elem(0, j), 3, tags.left});
    mesh.boundary_facets.push_back({elem(nx - 1, j), 1, tags.right});
  }
  return mesh;
}

Mesh build_annulus_mesh(double r_in, double r_out, int n_theta, int n_r, int subdomain_id,
                        const std::string& inner_tag, const std::string& outer_tag) {
  if (!(0.0 < r_in && r_in < r_out)) {
    throw ConfigError("build_annulus_mesh: need 0 < r_in < r_out");
  }
  if (n_theta < 3 || n_r < 1) {
    throw ConfigError("build_annulus_mesh: need n_theta >= 3 and n_r >= 1");
  }
  Mesh mesh;
  mesh.subdomain_id = subdomain_id;
  const double dr = (r_out - r_in) / n_r;
  const double dtheta = 2.0 * kPi / n_theta;
  mesh.node_coords.reserve((n_r + 1) * n_theta);
  for (int k = 0; k <= n_r; ++k) {
    const double r = r_in + k * dr;
    for (int l = 0; l < n_theta; ++l) {
      const double theta = l * dtheta;
      mesh.node_coords.emplace_back(r * std::cos(theta), r * std::sin(theta));
    }
  }
  mesh.node_velocity.assign(mesh.node_coords.size(), Vec2::Zero());
  const auto node = [n_theta](int k, int l) { return k * n_theta + (l % n_theta); };
  mesh.elements.reserve(n_r * n_theta);
  for (int k = 0; k < n_r; ++k) {
    for (int l = 0; l < n_theta; ++l) {
      // Counterclockwise: radial edge out, outer arc forward in theta,
      // radial edge back in, inner arc backward.
      mesh.elements.push_back({node(k, l), node(k + 1, l), node(k + 1, l + 1), node(k, l + 1)});
    }
  }
  const auto elem = [n_theta](int k, int l) { return k * n_theta + l; };
  for (int l = 0; l < n_theta; ++l) {
    mesh.boundary_facets.push_back({elem(0, l), 3, inner_tag});
    mesh.boundary_facets.push_back({elem(n_r - 1, l), 1, outer_tag});
  }
  return mesh;
}

namespace {

[[noreturn]] void mesh_parse_error(int line, const std::string& what) {
  throw IoError("mesh text line " + std::to_string(line) + ": " + what);
}

std::string next_content_line(std::istream& in, int& line_number) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return line;
  }
  mesh_parse_error(line_number, "unexpected end of file");
}

}  // namespace

Mesh read_mesh_text(std::istream& in, int subdomain_id) {
  Mesh mesh;
  mesh.subdomain_id = subdomain_id;
  int line_number = 0;

  auto expect_count = [&](const std::string& keyword) {
    std::istringstream ls(next_content_line(in, line_number));
    std::string word;
    long count = -1;
    if (!(ls >> word >> count) || word != keyword || count < 0) {
      mesh_parse_error(line_number, "expected '" + keyword + " <count>'");
    }
    return count;
  };

  const long n_nodes = expect_count("nodes");
  for (long i = 0; i < n_nodes; ++i) {
    std::istringstream ls(next_content_line(in, line_number));
    double x, y;
    if (!(ls >> x >> y)) mesh_parse_error(line_number, "expected 'x y'");
    mesh.node_coords.emplace_back(x, y);
  }
  const long n_elements = expect_count("elements");
  for (long e = 0; e < n_elements; ++e) {
    std::istringstream ls(next_content_line(in, line_number));
    std::array<int, 4> conn;
    if (!(ls >> conn[0] >> conn[1] >> conn[2] >> conn[3])) {
      mesh_parse_error(line_number, "expected four node ids");
    }
    mesh.elements.push_back(conn);
  }
  const long n_facets = expect_count("facets");
  for (long f = 0; f < n_facets; ++f) {
    std::istringstream ls(next_content_line(in, line_number));
    BoundaryFacet facet;
    if (!(ls >> facet.element >> facet.local_edge >> facet.tag)) {
      mesh_parse_error(line_number, "expected 'element localEdge tagName'");
    }
    mesh.boundary_facets.push_back(facet);
  }
  mesh.node_velocity.assign(mesh.node_coords.size(), Vec2::Zero());
  mesh.validate();
  return mesh;
}

Mesh read_mesh_file(const std::string& path, int subdomain_id) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  return read_mesh_text(in, subdomain_id);
}

void write_mesh_text(std::ostream& out, const Mesh& mesh) {
  const auto old_precision = out.precision(17);  // round-trip exact for doubles
  out << "nodes " << mesh.n_nodes() << "\n";
  for (const auto& x : mesh.node_coords) out << x.x() << " " << x.y() << "\n";
  out << "elements " << mesh.n_elements() << "\n";
  for (const auto& conn : mesh.elements) {
    out << conn[0] << " " << conn[1] << " " << conn[2] << " " << conn[3] << "\n";
  }
  out << "facets " << mesh.boundary_facets.size() << "\n";
  for (const auto& facet : mesh.boundary_facets) {
    out << facet.element << " " << facet.local_edge << " " << facet.tag << "\n";
  }
  out.precision(old_precision);
}

Mat2 element_metric_tensor(const Mesh& mesh, int element, const Vec2& ref_point) {
  const auto& conn = mesh.elements.at(element);
  const auto grads = ReferenceElement::shape_gradients(ref_point);
  Mat2 jac = Mat2::Zero();  // d x / d xi
  for (int a = 0; a < 4; ++a) {
    jac += mesh.node_coords[conn[a]] * grads[a].transpose();
  }
  const double det = jac.determinant();
  if (!(std::abs(det) > 1e-300)) {
    throw GeometryError("element_metric_tensor: singular mapping on element " +
                        std::to_string(element));
  }
  const Mat2 inv = jac.inverse();  // d xi / d x
  return inv.transpose() * inv;
}

double directional_width(const Mat2& metric, const Vec2& direction) {
  const Vec2 n = direction.normalized();
  const double q = n.dot(metric * n);
  if (!(q > 0.0)) {
    throw GeometryError("directional_width: metric not positive along direction");
  }
  return 2.0 / std::sqrt(q);
}

void rigid_rotate_subdomain(Mesh& mesh, const Vec2& center, double omega, double dt) {
  const double angle = omega * dt;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (std::size_t i = 0; i < mesh.node_coords.size(); ++i) {
    const Vec2 r = mesh.node_coords[i] - center;
    const Vec2 rotated(c * r.x() - s * r.y(), s * r.x() + c * r.y());
    mesh.node_coords[i] = center + rotated;
    mesh.node_velocity[i] = omega * Vec2(-rotated.y(), rotated.x());
  }
}

}  // namespace slidemesh

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "slidemesh/errors.hpp"
#include "slidemesh/types.hpp"

namespace slidemesh {

/// 1D Gauss-Legendre rule on [-1, 1]. Supported sizes: 1..6 points.
struct GaussRule1d {
  std::vector<double> points;
  std::vector<double> weights;
};

GaussRule1d gauss_legendre(int n_points);

/// Tensor-product rule on the reference square [-1,1]^2.
struct QuadRule2d {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

QuadRule2d tensor_gauss(int n_per_direction);

/// Four-node bilinear quadrilateral on [-1,1]^2. Node order is counterclockwise:
/// (-1,-1), (1,-1), (1,1), (-1,1). Local edge k connects node k to node (k+1)%4.
class ReferenceElement {
 public:
  explicit ReferenceElement(int volume_points = 2, int edge_points = 2)
      : volume_rule_(tensor_gauss(volume_points)), edge_rule_(gauss_legendre(edge_points)) {}

  static std::array<double, 4> shape_values(const Vec2& xi);
  /// Gradients with respect to the reference coordinates.
  static std::array<Vec2, 4> shape_gradients(const Vec2& xi);

  /// Reference coordinates of a point on local edge `edge` at edge parameter
  /// t in [-1,1], oriented from the edge's first node to its second.
  static Vec2 edge_point(int edge, double t);
  /// d(xi)/dt along the edge parameterization above.
  static Vec2 edge_direction(int edge);
  /// Outward unit normal of the reference square on local edge `edge`.
  static Vec2 edge_reference_normal(int edge);

  const QuadRule2d& volume_rule() const { return volume_rule_; }
  const GaussRule1d& edge_rule() const { return edge_rule_; }

 private:
  QuadRule2d volume_rule_;
  GaussRule1d edge_rule_;
};

struct BoundaryFacet {
  int element = -1;
  int local_edge = -1;
  std::string tag;
};

/// Facet endpoints, outward unit normal and length, all in physical coordinates.
struct FacetGeometry {
  Vec2 p0 = Vec2::Zero();
  Vec2 p1 = Vec2::Zero();
  Vec2 normal = Vec2::Zero();
  double measure = 0.0;
};

struct Mesh {
  std::vector<Vec2> node_coords;
  std::vector<std::array<int, 4>> elements;  // counterclockwise node ids
  std::vector<BoundaryFacet> boundary_facets;
  int subdomain_id = 0;
  /// Mesh (ALE) velocity carried at nodes; zero for static subdomains.
  std::vector<Vec2> node_velocity;

  int n_nodes() const { return static_cast<int>(node_coords.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }

  FacetGeometry facet_geometry(const BoundaryFacet& facet) const;
  FacetGeometry facet_geometry(int facet_index) const;

  /// Minimum element edge length over the whole mesh.
  double min_edge_length() const;

  /// Throws GeometryError on inverted elements, out-of-range connectivity or
  /// facet tags referring to missing elements.
  void validate() const;
};

/// Tag names assigned to the four sides of a structured rectangle mesh.
struct SideTags {
  std::string left = "left";
  std::string right = "right";
  std::string bottom = "bottom";
  std::string top = "top";
};

Mesh build_structured_quad_mesh(const Rect& rect, int nx, int ny, int subdomain_id,
                                const SideTags& tags = {});

/// Annulus of quadrilaterals between radii r_in < r_out, n_theta elements around,
/// n_r through the thickness. The periodic seam shares node ids. Boundary facets
/// are tagged `inner_tag` / `outer_tag`.
Mesh build_annulus_mesh(double r_in, double r_out, int n_theta, int n_r, int subdomain_id,
                        const std::string& inner_tag = "inner",
                        const std::string& outer_tag = "outer");

/// Plain-text mesh reader; see docs/config-format.md for the grammar.
Mesh read_mesh_text(std::istream& in, int subdomain_id = 0);
Mesh read_mesh_file(const std::string& path, int subdomain_id = 0);
void write_mesh_text(std::ostream& out, const Mesh& mesh);

/// Covariant element metric G = (d xi/d x)^T (d xi/d x) at a reference point.
Mat2 element_metric_tensor(const Mesh& mesh, int element, const Vec2& ref_point);

/// Directional element width h = 2 (n^T G n)^{-1/2}.
double directional_width(const Mat2& metric, const Vec2& direction);

/// Rotates all nodes by omega*dt about `center` and stores the rigid-body
/// velocity omega x (x - center), evaluated at the new coordinates, in
/// node_velocity.
void rigid_rotate_subdomain(Mesh& mesh, const Vec2& center, double omega, double dt);

}  // namespace slidemesh

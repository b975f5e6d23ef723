#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slidemesh/mesh.hpp"
#include "slidemesh/types.hpp"

namespace slidemesh {

/// Overlap of [a0,a1] and [b0,b1]. Returns std::nullopt when the overlap
/// length is below rel_tol * max(interval lengths); touching intervals count
/// as empty.
std::optional<std::array<double, 2>> intersect_intervals(double a0, double a1, double b0,
                                                         double b1, double rel_tol = 1e-10);

/// Counterclockwise convex polygon. The constructor validates orientation and
/// convexity and rejects repeated vertices.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  double area() const;
  bool contains(const Vec2& p, double tol = 1e-12) const;

 private:
  std::vector<Vec2> vertices_;
};

/// Half-plane clipping; returns std::nullopt when the intersection area is
/// below an absolute tolerance scaled by the input areas.
std::optional<ConvexPolygon> intersect_convex_polygons(const ConvexPolygon& p,
                                                       const ConvexPolygon& q);

using Triangle = std::array<Vec2, 3>;

/// Fan triangulation from vertex 0; returns size()-2 triangles.
std::vector<Triangle> triangulate_convex(const ConvexPolygon& poly);

struct PolygonQuadrature {
  std::vector<Vec2> points;
  std::vector<double> weights;
};

/// Quadrature over a convex polygon via fan triangulation, exact for 2D
/// polynomials up to `degree` (supported: 1, 2, 4).
PolygonQuadrature polygon_quadrature(const ConvexPolygon& poly, int degree);

/// Shared interface curve; facet endpoints of both sides must lie on it.
/// Lines are parameterized by arclength, circles by angle (measure r*dtheta).
struct InterfaceParameterization {
  enum class Kind { Line, Circle };

  static InterfaceParameterization line(const Vec2& origin, const Vec2& direction);
  static InterfaceParameterization circle(const Vec2& center, double radius);

  Kind kind = Kind::Line;
  Vec2 origin = Vec2::Zero();     // line point
  Vec2 direction = Vec2::UnitX(); // unit line direction
  Vec2 center = Vec2::Zero();
  double radius = 1.0;

  double parameter_of(const Vec2& x) const;
  Vec2 point_at(double s) const;
  /// Length of curve per unit parameter (1 for lines, radius for circles).
  double measure_scale() const;
  /// Distance from the curve; used to validate facet endpoints.
  double distance(const Vec2& x) const;
  /// Unit normal at parameter s: for lines the direction rotated by -90
  /// degrees, for circles the outward radial direction.
  Vec2 curve_normal(double s) const;
};

/// One quadrature point of an interface cut. Reference coordinates address the
/// parent elements of the two facets; the normal points from side a to side b.
struct CutPoint {
  Vec2 ref_a = Vec2::Zero();
  Vec2 ref_b = Vec2::Zero();
  Vec2 physical = Vec2::Zero();
  Vec2 normal = Vec2::Zero();
  double weight = 0.0;
  double parameter = 0.0;
};

/// Overlap of one side-a facet with one side-b facet, with its quadrature.
struct CutRecord {
  int facet_a = -1;  // index into SlidingInterface::facets_a
  int facet_b = -1;
  double measure = 0.0;
  double param_begin = 0.0;
  double param_end = 0.0;
  std::vector<CutPoint> points;
};

/// Per-facet signed quadrature for the uncovered part of an interface side:
/// the full facet rule with positive weights plus every covering cut's rule
/// with negated weights.
struct SignedFacetQuadrature {
  struct Point {
    Vec2 ref = Vec2::Zero();       // parent element reference coordinates
    Vec2 physical = Vec2::Zero();
    Vec2 normal = Vec2::Zero();    // outward for this side
    double weight = 0.0;
  };
  int facet = -1;  // index into the side's facet list
  std::vector<Point> points;
  double facet_measure = 0.0;

  double net_measure() const;
};

/// Facets of one mesh participating in an interface, with their parameter
/// intervals along the shared curve.
struct InterfaceSide {
  const Mesh* mesh = nullptr;
  std::vector<int> facet_indices;             // into mesh->boundary_facets
  std::vector<std::array<double, 2>> params;  // endpoint parameters per facet
};

struct SlidingInterface {
  InterfaceParameterization parameterization;
  InterfaceSide side_a;
  InterfaceSide side_b;
  std::vector<CutRecord> cuts;
  std::vector<SignedFacetQuadrature> uncovered_a;
  std::vector<SignedFacetQuadrature> uncovered_b;

  double covered_measure() const;
};

/// Facet pairs whose padded axis-aligned bounding boxes overlap.
std::vector<std::pair<int, int>> detect_candidate_pairs(const std::vector<FacetGeometry>& side_a,
                                                        const std::vector<FacetGeometry>& side_b,
                                                        double padding);

/// Builds the cut set between two tagged facet families. Validates that all
/// endpoints lie on the parameterization (tolerance 1e-8), computes per-cut
/// Gauss rules with `rule_points` points, and checks measure conservation.
SlidingInterface build_interface_quadrature(const Mesh& mesh_a, const std::string& tag_a,
                                            const Mesh& mesh_b, const std::string& tag_b,
                                            const InterfaceParameterization& parameterization,
                                            int rule_points = 3);

/// Fills uncovered_a / uncovered_b with the signed facet quadratures.
void build_uncovered_quadrature(SlidingInterface& interface);

/// Signed facet quadrature with empty cover: the plain Gauss rule on one
/// boundary facet, used for weakly imposed boundary data.
SignedFacetQuadrature plain_facet_quadrature(const Mesh& mesh, int facet_index, int n_points);

/// Fits a line parameterization through the tagged facets of a mesh.
InterfaceParameterization fit_line_parameterization(const Mesh& mesh, const std::string& tag);

/// Circle parameterization about `center`; the radius is taken from the first
/// tagged facet endpoint.
InterfaceParameterization fit_circle_parameterization(const Mesh& mesh, const std::string& tag,
                                                      const Vec2& center);

}  // namespace slidemesh

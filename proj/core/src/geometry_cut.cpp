#include "slidemesh/geometry_cut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slidemesh {

std::optional<std::array<double, 2>> intersect_intervals(double a0, double a1, double b0,
                                                         double b1, double rel_tol) {
  if (a1 < a0) std::swap(a0, a1);
  if (b1 < b0) std::swap(b0, b1);
  const double lo = std::max(a0, b0);
  const double hi = std::min(a1, b1);
  const double tol = rel_tol * std::max(a1 - a0, b1 - b0);
  if (hi - lo <= tol) return std::nullopt;
  return std::array<double, 2>{lo, hi};
}

namespace {

double shoelace_area(const std::vector<Vec2>& v) {
  double twice = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double bbox_scale(const std::vector<Vec2>& v) {
  Vec2 lo = v.front(), hi = v.front();
  for (const auto& p : v) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return std::max((hi - lo).maxCoeff(), 1e-300);
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw GeometryError("ConvexPolygon: fewer than three vertices");
  }
  const double scale = bbox_scale(vertices_);
  const double tol = 1e-12 * scale * scale;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[(i + 1) % n];
    const Vec2& r = vertices_[(i + 2) % n];
    if ((q - p).norm() < 1e-14 * scale) {
      throw GeometryError("ConvexPolygon: repeated vertex");
    }
    if (cross2(q - p, r - q) < -tol) {
      throw GeometryError("ConvexPolygon: vertices not counterclockwise convex");
    }
  }
  if (shoelace_area(vertices_) <= 0.0) {
    throw GeometryError("ConvexPolygon: non-positive area");
  }
}

double ConvexPolygon::area() const { return shoelace_area(vertices_); }

bool ConvexPolygon::contains(const Vec2& p, double tol) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    if (cross2(b - a, p - a) < -tol) return false;
  }
  return true;
}

std::optional<ConvexPolygon> intersect_convex_polygons(const ConvexPolygon& p,
                                                       const ConvexPolygon& q) {
  // Sutherland-Hodgman: clip q against every half-plane of p.
  std::vector<Vec2> poly = q.vertices();
  const auto& clip = p.vertices();
  const std::size_t np = clip.size();
  std::vector<Vec2> next;
  for (std::size_t i = 0; i < np && !poly.empty(); ++i) {
    const Vec2& a = clip[i];
    const Vec2& b = clip[(i + 1) % np];
    next.clear();
    const std::size_t m = poly.size();
    for (std::size_t j = 0; j < m; ++j) {
      const Vec2& cur = poly[j];
      const Vec2& nxt = poly[(j + 1) % m];
      const double sc = cross2(b - a, cur - a);
      const double sn = cross2(b - a, nxt - a);
      if (sc >= 0.0) next.push_back(cur);
      if ((sc > 0.0 && sn < 0.0) || (sc < 0.0 && sn > 0.0)) {
        const double t = sc / (sc - sn);
        next.push_back(cur + t * (nxt - cur));
      }
    }
    poly = next;
  }
  if (poly.size() < 3) return std::nullopt;

  // Drop collapsed vertices produced by grazing clips.
  const double scale = bbox_scale(poly);
  std::vector<Vec2> cleaned;
  for (const auto& v : poly) {
    if (cleaned.empty() || (v - cleaned.back()).norm() > 1e-12 * scale) cleaned.push_back(v);
  }
  while (cleaned.size() > 1 && (cleaned.front() - cleaned.back()).norm() < 1e-12 * scale) {
    cleaned.pop_back();
  }
  if (cleaned.size() < 3) return std::nullopt;
  const double area = shoelace_area(cleaned);
  const double area_tol = 1e-12 * std::max(p.area(), q.area());
  if (area <= area_tol) return std::nullopt;
  return ConvexPolygon(std::move(cleaned));
}

std::vector<Triangle> triangulate_convex(const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  std::vector<Triangle> tris;
  tris.reserve(v.size() - 2);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    tris.push_back({v[0], v[i], v[i + 1]});
  }
  return tris;
}

namespace {

struct TriangleRule {
  // Barycentric coordinates and weights summing to one.
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
};

TriangleRule triangle_rule(int degree) {
  TriangleRule rule;
  if (degree <= 1) {
    rule.bary = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    rule.weights = {1.0};
  } else if (degree == 2) {
    rule.bary = {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                 {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
                 {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}};
    rule.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  } else if (degree <= 4) {
    const double a1 = 0.445948490915965;
    const double w1 = 0.223381589678011;
    const double a2 = 0.091576213509771;
    const double w2 = 0.109951743655322;
    for (const auto& [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
      rule.bary.push_back({1.0 - 2.0 * a, a, a});
      rule.bary.push_back({a, 1.0 - 2.0 * a, a});
      rule.bary.push_back({a, a, 1.0 - 2.0 * a});
      rule.weights.insert(rule.weights.end(), 3, w);
    }
  } else {
    throw ConfigError("polygon_quadrature: unsupported degree " + std::to_string(degree));
  }
  return rule;
}

}  // namespace

PolygonQuadrature polygon_quadrature(const ConvexPolygon& poly, int degree) {
  const TriangleRule rule = triangle_rule(degree);
  PolygonQuadrature quad;
  for (const Triangle& tri : triangulate_convex(poly)) {
    const double area =
        0.5 * std::abs(cross2(tri[1] - tri[0], tri[2] - tri[0]));
    for (std::size_t k = 0; k < rule.bary.size(); ++k) {
      const auto& l = rule.bary[k];
      quad.points.push_back(l[0] * tri[0] + l[1] * tri[1] + l[2] * tri[2]);
      quad.weights.push_back(rule.weights[k] * area);
    }
  }
  return quad;
}

InterfaceParameterization InterfaceParameterization::line(const Vec2& origin,
                                                          const Vec2& direction) {
  InterfaceParameterization p;
  p.kind = Kind::Line;
  p.origin = origin;
  const double len = direction.norm();
  if (!(len > 0.0)) throw GeometryError("interface line: zero direction");
  p.direction = direction / len;
  return p;
}

InterfaceParameterization InterfaceParameterization::circle(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw GeometryError("interface circle: non-positive radius");
  InterfaceParameterization p;
  p.kind = Kind::Circle;
  p.center = center;
  p.radius = radius;
  return p;
}

double InterfaceParameterization::parameter_of(const Vec2& x) const {
  if (kind == Kind::Line) return (x - origin).dot(direction);
  double theta = std::atan2(x.y() - center.y(), x.x() - center.x());
  if (theta < 0.0) theta += 2.0 * kPi;
  return theta;
}

Vec2 InterfaceParameterization::point_at(double s) const {
  if (kind == Kind::Line) return origin + s * direction;
  return center + radius * Vec2(std::cos(s), std::sin(s));
}

double InterfaceParameterization::measure_scale() const {
  return kind == Kind::Line ? 1.0 : radius;
}

double InterfaceParameterization::distance(const Vec2& x) const {
  if (kind == Kind::Line) {
    const Vec2 d = x - origin;
    return std::abs(d.x() * direction.y() - d.y() * direction.x());
  }
  return std::abs((x - center).norm() - radius);
}

Vec2 InterfaceParameterization::curve_normal(double s) const {
  if (kind == Kind::Line) return {direction.y(), -direction.x()};
  return {std::cos(s), std::sin(s)};
}

std::vector<std::pair<int, int>> detect_candidate_pairs(const std::vector<FacetGeometry>& side_a,
                                                        const std::vector<FacetGeometry>& side_b,
                                                        double padding) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t ia = 0; ia < side_a.size(); ++ia) {
    const Vec2 alo = side_a[ia].p0.cwiseMin(side_a[ia].p1).array() - padding;
    const Vec2 ahi = side_a[ia].p0.cwiseMax(side_a[ia].p1).array() + padding;
    for (std::size_t ib = 0; ib < side_b.size(); ++ib) {
      const Vec2 blo = side_b[ib].p0.cwiseMin(side_b[ib].p1);
      const Vec2 bhi = side_b[ib].p0.cwiseMax(side_b[ib].p1);
      const bool overlap = alo.x() <= bhi.x() && blo.x() <= ahi.x() && alo.y() <= bhi.y() &&
                           blo.y() <= ahi.y();
      if (overlap) pairs.emplace_back(static_cast<int>(ia), static_cast<int>(ib));
    }
  }
  return pairs;
}

double SignedFacetQuadrature::net_measure() const {
  double sum = 0.0;
  for (const auto& pt : points) sum += pt.weight;
  return sum;
}

double SlidingInterface::covered_measure() const {
  double sum = 0.0;
  for (const auto& cut : cuts) sum += cut.measure;
  return sum;
}

namespace {

Vec2 map_to_physical(const Mesh& mesh, int element, const Vec2& ref) {
  const auto values = ReferenceElement::shape_values(ref);
  Vec2 x = Vec2::Zero();
  for (int a = 0; a < 4; ++a) x += values[a] * mesh.node_coords[mesh.elements[element][a]];
  return x;
}

InterfaceSide collect_side(const Mesh& mesh, const std::string& tag,
                           const InterfaceParameterization& par, double endpoint_tol) {
  InterfaceSide side;
  side.mesh = &mesh;
  for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
    if (mesh.boundary_facets[f].tag != tag) continue;
    const FacetGeometry geom = mesh.facet_geometry(static_cast<int>(f));
    for (const Vec2& p : {geom.p0, geom.p1}) {
      if (par.distance(p) > endpoint_tol) {
        throw GeometryError("interface: facet endpoint of subdomain " +
                            std::to_string(mesh.subdomain_id) + " tag '" + tag +
                            "' lies off the interface curve (distance " +
                            std::to_string(par.distance(p)) + ")");
      }
    }
    double s0 = par.parameter_of(geom.p0);
    double s1 = par.parameter_of(geom.p1);
    if (par.kind == InterfaceParameterization::Kind::Circle) {
      // Choose the branch of s1 closest to s0 so short facets never wrap.
      if (s1 - s0 > kPi) s1 -= 2.0 * kPi;
      if (s0 - s1 > kPi) s1 += 2.0 * kPi;
    }
    side.facet_indices.push_back(static_cast<int>(f));
    side.params.push_back({s0, s1});
  }
  if (side.facet_indices.empty()) {
    throw GeometryError("interface: no facets tagged '" + tag + "' on subdomain " +
                        std::to_string(mesh.subdomain_id));
  }
  return side;
}

Vec2 element_ref_on_facet(const Mesh& mesh, int facet_index, double fraction) {
  const BoundaryFacet& facet = mesh.boundary_facets[facet_index];
  return ReferenceElement::edge_point(facet.local_edge, -1.0 + 2.0 * fraction);
}

}  // namespace

SlidingInterface build_interface_quadrature(const Mesh& mesh_a, const std::string& tag_a,
                                            const Mesh& mesh_b, const std::string& tag_b,
                                            const InterfaceParameterization& parameterization,
                                            int rule_points) {
  const double scale = parameterization.measure_scale();
  const double endpoint_tol = 1e-8 * std::max(1.0, scale);

  SlidingInterface interface;
  interface.parameterization = parameterization;
  interface.side_a = collect_side(mesh_a, tag_a, parameterization, endpoint_tol);
  interface.side_b = collect_side(mesh_b, tag_b, parameterization, endpoint_tol);

  std::vector<FacetGeometry> geom_a, geom_b;
  for (int f : interface.side_a.facet_indices) geom_a.push_back(mesh_a.facet_geometry(f));
  for (int f : interface.side_b.facet_indices) geom_b.push_back(mesh_b.facet_geometry(f));

  double max_len = 0.0;
  for (const auto& g : geom_a) max_len = std::max(max_len, g.measure);
  for (const auto& g : geom_b) max_len = std::max(max_len, g.measure);
  const auto candidates = detect_candidate_pairs(geom_a, geom_b, 0.5 * max_len);

  const bool is_circle = parameterization.kind == InterfaceParameterization::Kind::Circle;
  double max_param_extent = 0.0;
  for (const auto& p : interface.side_a.params) {
    max_param_extent = std::max(max_param_extent, std::abs(p[1] - p[0]));
  }
  for (const auto& p : interface.side_b.params) {
    max_param_extent = std::max(max_param_extent, std::abs(p[1] - p[0]));
  }
  // Chord sagitta bound: how far a straight facet may sit from the circle.
  const double coincidence_tol =
      is_circle ? scale * (1.0 - std::cos(0.5 * max_param_extent)) + 1e-9 : 1e-9;

  const GaussRule1d gauss = gauss_legendre(rule_points);

  for (const auto& [ia, ib] : candidates) {
    const auto& pa = interface.side_a.params[ia];
    const auto& pb = interface.side_b.params[ib];
    const double a0 = std::min(pa[0], pa[1]);
    const double a1 = std::max(pa[0], pa[1]);
    double b0 = std::min(pb[0], pb[1]);
    double b1 = std::max(pb[0], pb[1]);
    double shift = 0.0;
    if (is_circle) {
      // The two facets may live on different 2*pi branches.
      const double mid_a = 0.5 * (a0 + a1);
      const double mid_b = 0.5 * (b0 + b1);
      if (mid_b - mid_a > kPi) shift = -2.0 * kPi;
      if (mid_a - mid_b > kPi) shift = 2.0 * kPi;
    }
    const auto overlap = intersect_intervals(a0, a1, b0 + shift, b1 + shift);
    if (!overlap) continue;

    CutRecord cut;
    cut.facet_a = ia;
    cut.facet_b = ib;
    cut.param_begin = (*overlap)[0];
    cut.param_end = (*overlap)[1];
    const double ds = cut.param_end - cut.param_begin;
    cut.measure = ds * scale;

    const FacetGeometry& ga = geom_a[ia];
    const int facet_a = interface.side_a.facet_indices[ia];
    const int facet_b = interface.side_b.facet_indices[ib];
    const int elem_a = mesh_a.boundary_facets[facet_a].element;
    const int elem_b = mesh_b.boundary_facets[facet_b].element;

    for (std::size_t q = 0; q < gauss.points.size(); ++q) {
      CutPoint pt;
      pt.parameter = cut.param_begin + 0.5 * (gauss.points[q] + 1.0) * ds;
      pt.weight = gauss.weights[q] * 0.5 * ds * scale;
      pt.physical = parameterization.point_at(pt.parameter);
      Vec2 normal = parameterization.curve_normal(pt.parameter);
      if (normal.dot(ga.normal) < 0.0) normal = -normal;
      pt.normal = normal;

      const double fa = (pt.parameter - pa[0]) / (pa[1] - pa[0]);
      const double fb = (pt.parameter - shift - pb[0]) / (pb[1] - pb[0]);
      pt.ref_a = element_ref_on_facet(mesh_a, facet_a, fa);
      pt.ref_b = element_ref_on_facet(mesh_b, facet_b, fb);

      const Vec2 xa = map_to_physical(mesh_a, elem_a, pt.ref_a);
      const Vec2 xb = map_to_physical(mesh_b, elem_b, pt.ref_b);
      if ((xa - pt.physical).norm() > coincidence_tol ||
          (xb - pt.physical).norm() > coincidence_tol) {
        throw GeometryError("interface: cut point maps inconsistently between sides (gap " +
                            std::to_string(std::max((xa - pt.physical).norm(),
                                                    (xb - pt.physical).norm())) +
                            ")");
      }
      cut.points.push_back(pt);
    }

    if (!cut.points.empty()) {
      const Vec2 nb = geom_b[ib].normal;
      if (cut.points.front().normal.dot(nb) > -0.5) {
        throw GeometryError("interface: side normals are not opposed between subdomains " +
                            std::to_string(mesh_a.subdomain_id) + " and " +
                            std::to_string(mesh_b.subdomain_id));
      }
    }
    double weight_sum = 0.0;
    for (const auto& pt : cut.points) weight_sum += pt.weight;
    if (std::abs(weight_sum - cut.measure) > 1e-12 * std::max(1.0, cut.measure)) {
      throw GeometryError("interface: cut weights do not sum to the cut measure");
    }
    interface.cuts.push_back(std::move(cut));
  }

  std::sort(interface.cuts.begin(), interface.cuts.end(), [](const CutRecord& l, const CutRecord& r) {
    return std::tie(l.facet_a, l.facet_b) < std::tie(r.facet_a, r.facet_b);
  });

  // Per-facet cover must never exceed the facet's own parameter extent.
  std::vector<double> cover_a(interface.side_a.facet_indices.size(), 0.0);
  std::vector<double> cover_b(interface.side_b.facet_indices.size(), 0.0);
  for (const auto& cut : interface.cuts) {
    cover_a[cut.facet_a] += cut.measure;
    cover_b[cut.facet_b] += cut.measure;
  }
  for (std::size_t i = 0; i < cover_a.size(); ++i) {
    const double facet_measure = std::abs(interface.side_a.params[i][1] -
                                          interface.side_a.params[i][0]) * scale;
    if (cover_a[i] > facet_measure + 1e-10) {
      throw GeometryError("interface: cuts over-cover a side-a facet");
    }
  }
  for (std::size_t i = 0; i < cover_b.size(); ++i) {
    const double facet_measure = std::abs(interface.side_b.params[i][1] -
                                          interface.side_b.params[i][0]) * scale;
    if (cover_b[i] > facet_measure + 1e-10) {
      throw GeometryError("interface: cuts over-cover a side-b facet");
    }
  }

  build_uncovered_quadrature(interface);
  return interface;
}

namespace {

std::vector<SignedFacetQuadrature> uncovered_for_side(const SlidingInterface& interface,
                                                      bool is_side_a, int rule_points) {
  const InterfaceSide& side = is_side_a ? interface.side_a : interface.side_b;
  const Mesh& mesh = *side.mesh;
  const double scale = interface.parameterization.measure_scale();
  const GaussRule1d gauss = gauss_legendre(rule_points);

  std::vector<SignedFacetQuadrature> result;
  result.reserve(side.facet_indices.size());
  for (std::size_t i = 0; i < side.facet_indices.size(); ++i) {
    SignedFacetQuadrature sq;
    sq.facet = static_cast<int>(i);
    const int facet_index = side.facet_indices[i];
    const FacetGeometry geom = mesh.facet_geometry(facet_index);
    const auto& par = side.params[i];
    const double s0 = par[0];
    const double s1 = par[1];
    sq.facet_measure = std::abs(s1 - s0) * scale;

    for (std::size_t q = 0; q < gauss.points.size(); ++q) {
      SignedFacetQuadrature::Point pt;
      const double frac = 0.5 * (gauss.points[q] + 1.0);
      const double s = s0 + frac * (s1 - s0);
      pt.ref = element_ref_on_facet(mesh, facet_index, frac);
      pt.physical = interface.parameterization.point_at(s);
      Vec2 normal = interface.parameterization.curve_normal(s);
      if (normal.dot(geom.normal) < 0.0) normal = -normal;
      pt.normal = normal;
      pt.weight = gauss.weights[q] * 0.5 * std::abs(s1 - s0) * scale;
      sq.points.push_back(pt);
    }

    for (const auto& cut : interface.cuts) {
      const int cut_facet = is_side_a ? cut.facet_a : cut.facet_b;
      if (cut_facet != static_cast<int>(i)) continue;
      for (const auto& cp : cut.points) {
        SignedFacetQuadrature::Point pt;
        pt.ref = is_side_a ? cp.ref_a : cp.ref_b;
        pt.physical = cp.physical;
        pt.normal = is_side_a ? cp.normal : Vec2(-cp.normal);
        pt.weight = -cp.weight;
        sq.points.push_back(pt);
      }
    }
    result.push_back(std::move(sq));
  }
  return result;
}

}  // namespace

void build_uncovered_quadrature(SlidingInterface& interface) {
  int rule_points = 3;
  if (!interface.cuts.empty()) {
    rule_points = static_cast<int>(interface.cuts.front().points.size());
  }
  interface.uncovered_a = uncovered_for_side(interface, true, rule_points);
  interface.uncovered_b = uncovered_for_side(interface, false, rule_points);
}

SignedFacetQuadrature plain_facet_quadrature(const Mesh& mesh, int facet_index, int n_points) {
  const BoundaryFacet& facet = mesh.boundary_facets.at(static_cast<std::size_t>(facet_index));
  const FacetGeometry geom = mesh.facet_geometry(facet_index);
  const GaussRule1d gauss = gauss_legendre(n_points);

  SignedFacetQuadrature sq;
  sq.facet = facet_index;
  sq.facet_measure = geom.measure;
  for (std::size_t q = 0; q < gauss.points.size(); ++q) {
    SignedFacetQuadrature::Point pt;
    const double t = gauss.points[q];
    pt.ref = ReferenceElement::edge_point(facet.local_edge, t);
    pt.physical = geom.p0 + 0.5 * (t + 1.0) * (geom.p1 - geom.p0);
    pt.normal = geom.normal;
    pt.weight = gauss.weights[q] * 0.5 * geom.measure;
    sq.points.push_back(pt);
  }
  return sq;
}

InterfaceParameterization fit_line_parameterization(const Mesh& mesh, const std::string& tag) {
  for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
    if (mesh.boundary_facets[f].tag != tag) continue;
    const FacetGeometry geom = mesh.facet_geometry(static_cast<int>(f));
    return InterfaceParameterization::line(geom.p0, geom.p1 - geom.p0);
  }
  throw GeometryError("fit_line_parameterization: no facets tagged '" + tag + "'");
}

InterfaceParameterization fit_circle_parameterization(const Mesh& mesh, const std::string& tag,
                                                      const Vec2& center) {
  for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
    if (mesh.boundary_facets[f].tag != tag) continue;
    const FacetGeometry geom = mesh.facet_geometry(static_cast<int>(f));
    return InterfaceParameterization::circle(center, (geom.p0 - center).norm());
  }
  throw GeometryError("fit_circle_parameterization: no facets tagged '" + tag + "'");
}

}  // namespace slidemesh

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "slidemesh/geometry_cut.hpp"
#include "slidemesh/mesh.hpp"

using namespace slidemesh;

namespace {

// Independent area oracle: horizontal scanline rasterization. Each row resolves
// the two polygon cross-sections exactly from edge crossings, so the only
// discretization error is the midpoint rule in y across rows containing
// vertices.
struct ScanInterval {
  bool empty = true;
  double lo = 0.0;
  double hi = 0.0;
};

ScanInterval cross_section(const std::vector<Vec2>& poly, double y) {
  ScanInterval out;
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  const std::size_t n = poly.size();
  int crossings = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    if ((p.y() <= y && q.y() >= y) || (q.y() <= y && p.y() >= y)) {
      if (p.y() == q.y()) {
        lo = std::min({lo, p.x(), q.x()});
        hi = std::max({hi, p.x(), q.x()});
        crossings += 2;
      } else {
        const double x = p.x() + (y - p.y()) * (q.x() - p.x()) / (q.y() - p.y());
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        ++crossings;
      }
    }
  }
  if (crossings >= 2 && hi > lo) {
    out.empty = false;
    out.lo = lo;
    out.hi = hi;
  }
  return out;
}

double rasterized_intersection_area(const ConvexPolygon& p, const ConvexPolygon& q, int rows) {
  double ylo = std::numeric_limits<double>::max();
  double yhi = std::numeric_limits<double>::lowest();
  for (const auto& v : p.vertices()) {
    ylo = std::min(ylo, v.y());
    yhi = std::max(yhi, v.y());
  }
  double qlo = std::numeric_limits<double>::max();
  double qhi = std::numeric_limits<double>::lowest();
  for (const auto& v : q.vertices()) {
    qlo = std::min(qlo, v.y());
    qhi = std::max(qhi, v.y());
  }
  ylo = std::max(ylo, qlo);
  yhi = std::min(yhi, qhi);
  if (yhi <= ylo) return 0.0;
  const double dy = (yhi - ylo) / rows;
  double area = 0.0;
  for (int r = 0; r < rows; ++r) {
    const double y = ylo + (r + 0.5) * dy;
    const ScanInterval a = cross_section(p.vertices(), y);
    const ScanInterval b = cross_section(q.vertices(), y);
    if (a.empty || b.empty) continue;
    const double lo = std::max(a.lo, b.lo);
    const double hi = std::min(a.hi, b.hi);
    if (hi > lo) area += (hi - lo) * dy;
  }
  return area;
}

// Random convex polygon: positive-determinant affine image of a regular m-gon.
ConvexPolygon random_convex_polygon(std::mt19937& rng) {
  std::uniform_int_distribution<int> m_dist(3, 8);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> scale(0.4, 1.3);
  std::uniform_real_distribution<double> shift(-0.5, 0.5);
  const int m = m_dist(rng);
  const double phi1 = angle(rng), phi2 = angle(rng);
  const double s1 = scale(rng), s2 = scale(rng);
  const Vec2 offset(shift(rng), shift(rng));
  Mat2 rot1, rot2;
  rot1 << std::cos(phi1), -std::sin(phi1), std::sin(phi1), std::cos(phi1);
  rot2 << std::cos(phi2), -std::sin(phi2), std::sin(phi2), std::cos(phi2);
  Mat2 map = rot1 * Eigen::DiagonalMatrix<double, 2>(s1, s2) * rot2;
  std::vector<Vec2> verts;
  for (int k = 0; k < m; ++k) {
    const double theta = 2.0 * kPi * k / m;
    verts.push_back(map * Vec2(std::cos(theta), std::sin(theta)) + offset);
  }
  return ConvexPolygon(std::move(verts));
}

// Green's theorem moment oracle: integral of x^a y^b over a polygon as an edge
// integral of x^{a+1} y^b / (a+1) dy, each edge resolved with Gauss points.
double polygon_moment_oracle(const ConvexPolygon& poly, int a, int b) {
  const GaussRule1d gauss = gauss_legendre(6);
  const auto& v = poly.vertices();
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& p0 = v[i];
    const Vec2& p1 = v[(i + 1) % v.size()];
    const double dy_dt = 0.5 * (p1.y() - p0.y());
    for (std::size_t g = 0; g < gauss.points.size(); ++g) {
      const double t = gauss.points[g];
      const Vec2 x = p0 + 0.5 * (t + 1.0) * (p1 - p0);
      total += gauss.weights[g] * std::pow(x.x(), a + 1) * std::pow(x.y(), b) * dy_dt;
    }
  }
  return total / (a + 1);
}

}  // namespace

TEST_CASE("interval intersection handles order, gaps and tolerance") {
  auto r = intersect_intervals(0.0, 1.0, 0.5, 2.0);
  REQUIRE(r.has_value());
  CHECK((*r)[0] == doctest::Approx(0.5));
  CHECK((*r)[1] == doctest::Approx(1.0));

  auto swapped = intersect_intervals(1.0, 0.0, 2.0, 0.5);  // endpoints reversed
  REQUIRE(swapped.has_value());
  CHECK((*swapped)[0] == doctest::Approx(0.5));
  CHECK((*swapped)[1] == doctest::Approx(1.0));

  CHECK(!intersect_intervals(0.0, 1.0, 2.0, 3.0).has_value());
  CHECK(!intersect_intervals(0.0, 1.0, 1.0, 2.0).has_value());  // touching counts as empty
  // Overlap below rel_tol * max length is discarded, above it survives.
  CHECK(!intersect_intervals(0.0, 1.0, 1.0 - 5e-11, 2.0).has_value());
  CHECK(intersect_intervals(0.0, 1.0, 1.0 - 1e-8, 2.0).has_value());
}

TEST_CASE("convex polygon validation and point containment") {
  const ConvexPolygon square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(square.area() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(square.contains({0.5, 0.5}));
  CHECK(square.contains({0.0, 0.5}));  // boundary counts as inside
  CHECK(!square.contains({1.5, 0.5}));
  CHECK(!square.contains({0.5, -0.1}));

  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), GeometryError);  // clockwise
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), GeometryError);                  // too few
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), GeometryError);  // repeated
  // Reflex vertex at (0.5, 0.5).
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {0.5, 0.5}, {1, 1}, {0, 1}}), GeometryError);
}

TEST_CASE("polygon clipping: shifted squares, idempotence, disjoint input") {
  const ConvexPolygon unit({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const ConvexPolygon shifted({{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}});
  const auto overlap = intersect_convex_polygons(unit, shifted);
  REQUIRE(overlap.has_value());
  CHECK(overlap->area() == doctest::Approx(0.25).epsilon(1e-13));
  for (const auto& v : overlap->vertices()) {
    CHECK(v.x() >= 0.5 - 1e-12);
    CHECK(v.x() <= 1.0 + 1e-12);
    CHECK(v.y() >= 0.5 - 1e-12);
    CHECK(v.y() <= 1.0 + 1e-12);
  }

  const auto self = intersect_convex_polygons(unit, unit);
  REQUIRE(self.has_value());
  CHECK(self->area() == doctest::Approx(1.0).epsilon(1e-12));

  const ConvexPolygon far_away({{5, 5}, {6, 5}, {6, 6}, {5, 6}});
  CHECK(!intersect_convex_polygons(unit, far_away).has_value());

  const ConvexPolygon tri({{0.2, 0.2}, {0.8, 0.2}, {0.5, 0.7}});
  const auto inside = intersect_convex_polygons(unit, tri);
  REQUIRE(inside.has_value());
  CHECK(inside->area() == doctest::Approx(tri.area()).epsilon(1e-13));
}

TEST_CASE("clipped areas agree with the scanline rasterization oracle") {
  std::mt19937 rng(20240817u);
  int tested = 0;
  int attempts = 0;
  while (tested < 12 && attempts < 400) {
    ++attempts;
    const ConvexPolygon p = random_convex_polygon(rng);
    const ConvexPolygon q = random_convex_polygon(rng);
    const auto clipped = intersect_convex_polygons(p, q);
    const double oracle = rasterized_intersection_area(p, q, 4000);
    if (!clipped.has_value()) {
      CHECK(oracle <= 1e-3 * std::max(p.area(), q.area()));
      continue;
    }
    // Skip slivers where the relative comparison is ill-posed.
    if (clipped->area() < 0.05 * std::max(p.area(), q.area())) continue;
    ++tested;
    CHECK(std::abs(clipped->area() - oracle) <= 1e-3 * clipped->area());
    // Clip result is symmetric in its arguments.
    const auto reversed = intersect_convex_polygons(q, p);
    REQUIRE(reversed.has_value());
    CHECK(reversed->area() == doctest::Approx(clipped->area()).epsilon(1e-10));
  }
  CHECK(tested == 12);
}

TEST_CASE("fan triangulation covers a regular hexagon") {
  std::vector<Vec2> verts;
  for (int k = 0; k < 6; ++k) {
    const double theta = 2.0 * kPi * k / 6;
    verts.emplace_back(std::cos(theta), std::sin(theta));
  }
  const ConvexPolygon hex(verts);
  const auto tris = triangulate_convex(hex);
  CHECK(tris.size() == 4);
  double total = 0.0;
  for (const auto& tri : tris) {
    const double area =
        0.5 * ((tri[1] - tri[0]).x() * (tri[2] - tri[0]).y() -
               (tri[1] - tri[0]).y() * (tri[2] - tri[0]).x());
    CHECK(area >= 0.0);
    total += area;
  }
  CHECK(total == doctest::Approx(hex.area()).epsilon(1e-13));
  CHECK(hex.area() == doctest::Approx(1.5 * std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("polygon quadrature integrates monomials exactly up to the rule degree") {
  const ConvexPolygon quad({{0.1, -0.2}, {1.3, 0.0}, {1.1, 0.9}, {-0.1, 0.7}});
  for (const int degree : {1, 2, 4}) {
    const PolygonQuadrature rule = polygon_quadrature(quad, degree);
    double weight_sum = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      weight_sum += w;
    }
    CHECK(weight_sum == doctest::Approx(quad.area()).epsilon(1e-13));
    for (int a = 0; a + 0 <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0.0;
        for (std::size_t k = 0; k < rule.points.size(); ++k) {
          sum += rule.weights[k] * std::pow(rule.points[k].x(), a) *
                 std::pow(rule.points[k].y(), b);
        }
        const double exact = polygon_moment_oracle(quad, a, b);
        CHECK(std::abs(sum - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
      }
    }
  }
  CHECK_THROWS_AS(polygon_quadrature(quad, 5), ConfigError);
}

TEST_CASE("line parameterization and circle parameterization round-trip") {
  const auto line = InterfaceParameterization::line({1.0, 2.0}, {3.0, 0.0});
  CHECK(line.measure_scale() == doctest::Approx(1.0));
  CHECK(line.parameter_of({2.5, 2.0}) == doctest::Approx(1.5));
  CHECK((line.point_at(1.5) - Vec2(2.5, 2.0)).norm() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(line.distance({2.0, 2.7}) == doctest::Approx(0.7));
  CHECK((line.curve_normal(0.0) - Vec2(0.0, -1.0)).norm() == doctest::Approx(0.0).epsilon(1e-13));

  const auto circle = InterfaceParameterization::circle({1.0, -1.0}, 2.0);
  CHECK(circle.measure_scale() == doctest::Approx(2.0));
  CHECK(circle.parameter_of({1.0, 1.0}) == doctest::Approx(kPi / 2));
  CHECK(circle.parameter_of({1.0, -3.0}) == doctest::Approx(1.5 * kPi));  // wrapped to [0, 2pi)
  CHECK((circle.point_at(kPi) - Vec2(-1.0, -1.0)).norm() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(circle.distance({4.0, -1.0}) == doctest::Approx(1.0));
  CHECK((circle.curve_normal(kPi / 2) - Vec2(0.0, 1.0)).norm() ==
        doctest::Approx(0.0).epsilon(1e-13));
  CHECK_THROWS_AS(InterfaceParameterization::circle({0, 0}, 0.0), GeometryError);
  CHECK_THROWS_AS(InterfaceParameterization::line({0, 0}, {0, 0}), GeometryError);
}

TEST_CASE("candidate pair detection keys on padded bounding boxes") {
  FacetGeometry a;
  a.p0 = {0.0, 0.0};
  a.p1 = {1.0, 0.0};
  FacetGeometry b;
  b.p0 = {1.5, 0.0};
  b.p1 = {2.5, 0.0};
  CHECK(detect_candidate_pairs({a}, {b}, 0.1).empty());
  const auto pairs = detect_candidate_pairs({a}, {b}, 0.6);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<int, int>(0, 0));
}

TEST_CASE("non-matching line interface: 3 vs 4 facets produce six exact cuts") {
  const Mesh bottom = build_structured_quad_mesh({0, 0, 1, 0.5}, 3, 1, 0, {"l", "r", "b", "ifc_a"});
  const Mesh top = build_structured_quad_mesh({0, 0.5, 1, 1}, 4, 1, 1, {"l", "r", "ifc_b", "t"});
  const auto par = fit_line_parameterization(bottom, "ifc_a");
  const SlidingInterface interface =
      build_interface_quadrature(bottom, "ifc_a", top, "ifc_b", par, 3);

  CHECK(interface.side_a.facet_indices.size() == 3);
  CHECK(interface.side_b.facet_indices.size() == 4);
  CHECK(interface.cuts.size() == 6);  // union of breakpoints {k/3} and {k/4}
  CHECK(interface.covered_measure() == doctest::Approx(1.0).epsilon(1e-12));

  double measure_sum = 0.0;
  double moment3 = 0.0;
  double moment5 = 0.0;
  for (const auto& cut : interface.cuts) {
    CHECK(cut.points.size() == 3);
    double weight_sum = 0.0;
    for (const auto& pt : cut.points) {
      weight_sum += pt.weight;
      // The physical point lies on the interface line.
      CHECK(pt.physical.y() == doctest::Approx(0.5).epsilon(1e-13));
      // Both parent elements map the stored reference point to the same spot.
      const auto& facet_a =
          bottom.boundary_facets[interface.side_a.facet_indices[cut.facet_a]];
      const auto vals = ReferenceElement::shape_values(pt.ref_a);
      Vec2 xa = Vec2::Zero();
      for (int k = 0; k < 4; ++k) {
        xa += vals[k] * bottom.node_coords[bottom.elements[facet_a.element][k]];
      }
      CHECK((xa - pt.physical).norm() == doctest::Approx(0.0).epsilon(1e-12));
      // Normal points from side a (below) to side b (above).
      CHECK((pt.normal - Vec2(0.0, 1.0)).norm() == doctest::Approx(0.0).epsilon(1e-13));
      moment3 += pt.weight * std::pow(pt.physical.x(), 3);
      moment5 += pt.weight * std::pow(pt.physical.x(), 5);
    }
    CHECK(weight_sum == doctest::Approx(cut.measure).epsilon(1e-12));
    measure_sum += cut.measure;
  }
  CHECK(measure_sum == doctest::Approx(1.0).epsilon(1e-12));
  // Three-point Gauss per cut integrates polynomials up to degree five exactly.
  CHECK(moment3 == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(moment5 == doctest::Approx(1.0 / 6.0).epsilon(1e-13));

  // Fully covered sides leave no net uncovered measure.
  for (const auto& sq : interface.uncovered_a) {
    CHECK(sq.net_measure() == doctest::Approx(0.0).epsilon(1e-12));
  }
  for (const auto& sq : interface.uncovered_b) {
    CHECK(sq.net_measure() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("partial overlap leaves signed uncovered strips with exact moments") {
  const Mesh bottom = build_structured_quad_mesh({0, 0, 1, 0.5}, 2, 1, 0, {"l", "r", "b", "ifc_a"});
  const Mesh top =
      build_structured_quad_mesh({0.25, 0.5, 0.85, 1.0}, 3, 1, 1, {"l", "r", "ifc_b", "t"});
  const auto par = fit_line_parameterization(bottom, "ifc_a");
  const SlidingInterface interface =
      build_interface_quadrature(bottom, "ifc_a", top, "ifc_b", par, 3);

  CHECK(interface.covered_measure() == doctest::Approx(0.6).epsilon(1e-12));

  // Side a: [0, 0.5] keeps [0, 0.25] uncovered, [0.5, 1] keeps [0.85, 1].
  REQUIRE(interface.uncovered_a.size() == 2);
  std::vector<double> nets;
  double signed_moment_x = 0.0;
  for (const auto& sq : interface.uncovered_a) {
    nets.push_back(sq.net_measure());
    for (const auto& pt : sq.points) signed_moment_x += pt.weight * pt.physical.x();
  }
  std::sort(nets.begin(), nets.end());
  CHECK(nets[0] == doctest::Approx(0.15).epsilon(1e-10));
  CHECK(nets[1] == doctest::Approx(0.25).epsilon(1e-10));
  // integral of x over [0, 0.25] plus [0.85, 1].
  CHECK(signed_moment_x == doctest::Approx(0.25 * 0.25 / 2 + (1.0 - 0.85 * 0.85) / 2)
                               .epsilon(1e-10));

  // Side b is fully covered.
  for (const auto& sq : interface.uncovered_b) {
    CHECK(sq.net_measure() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("signed uncovered measure obeys inclusion-exclusion on random covers") {
  std::mt19937 rng(555u);
  std::uniform_real_distribution<double> left(0.02, 0.45);
  std::uniform_real_distribution<double> right(0.55, 0.98);
  std::uniform_int_distribution<int> pieces(1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const double x0 = left(rng);
    const double x1 = right(rng);
    const int nb = pieces(rng);
    const Mesh a = build_structured_quad_mesh({0, 0, 1, 0.5}, 1, 1, 0, {"l", "r", "b", "ifc_a"});
    const Mesh b =
        build_structured_quad_mesh({x0, 0.5, x1, 1.0}, nb, 1, 1, {"l", "r", "ifc_b", "t"});
    const auto par = fit_line_parameterization(a, "ifc_a");
    const SlidingInterface interface = build_interface_quadrature(a, "ifc_a", b, "ifc_b", par, 3);
    REQUIRE(interface.uncovered_a.size() == 1);
    const double expected = 1.0 - (x1 - x0);
    CHECK(std::abs(interface.uncovered_a[0].net_measure() - expected) <= 1e-10);
    CHECK(interface.uncovered_a[0].facet_measure == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& sq : interface.uncovered_b) {
      CHECK(std::abs(sq.net_measure()) <= 1e-10);
    }
  }
}

TEST_CASE("swapping interface sides mirrors cuts and flips normals") {
  const Mesh bottom = build_structured_quad_mesh({0, 0, 1, 0.5}, 3, 1, 0, {"l", "r", "b", "ifc_a"});
  const Mesh top = build_structured_quad_mesh({0, 0.5, 1, 1}, 4, 1, 1, {"l", "r", "ifc_b", "t"});
  const auto par = fit_line_parameterization(bottom, "ifc_a");
  const SlidingInterface ab = build_interface_quadrature(bottom, "ifc_a", top, "ifc_b", par, 3);
  const SlidingInterface ba = build_interface_quadrature(top, "ifc_b", bottom, "ifc_a", par, 3);

  REQUIRE(ab.cuts.size() == ba.cuts.size());
  CHECK(ab.covered_measure() == doctest::Approx(ba.covered_measure()).epsilon(1e-13));

  auto spans = [](const SlidingInterface& s) {
    std::vector<std::pair<double, double>> out;
    for (const auto& cut : s.cuts) out.emplace_back(cut.param_begin, cut.param_end);
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto sa = spans(ab);
  const auto sb = spans(ba);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    CHECK(sa[i].first == doctest::Approx(sb[i].first).epsilon(1e-12));
    CHECK(sa[i].second == doctest::Approx(sb[i].second).epsilon(1e-12));
  }
  // The a-to-b normal flips when the sides swap roles.
  CHECK((ab.cuts[0].points[0].normal + ba.cuts[0].points[0].normal).norm() ==
        doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("facet endpoints off the declared curve are rejected") {
  const Mesh bottom = build_structured_quad_mesh({0, 0, 1, 0.5}, 3, 1, 0, {"l", "r", "b", "ifc_a"});
  const Mesh top =
      build_structured_quad_mesh({0, 0.5 + 1e-4, 1, 1}, 4, 1, 1, {"l", "r", "ifc_b", "t"});
  const auto par = fit_line_parameterization(bottom, "ifc_a");
  CHECK_THROWS_AS(build_interface_quadrature(bottom, "ifc_a", top, "ifc_b", par, 3),
                  GeometryError);
}

TEST_CASE("same-orientation facet families are rejected as unopposed") {
  const Mesh one = build_structured_quad_mesh({0, 0, 1, 0.5}, 3, 1, 0, {"l", "r", "b", "ifc_a"});
  const Mesh two = build_structured_quad_mesh({0, 0, 1, 0.5}, 4, 1, 1, {"l", "r", "b", "ifc_b"});
  const auto par = fit_line_parameterization(one, "ifc_a");
  CHECK_THROWS_AS(build_interface_quadrature(one, "ifc_a", two, "ifc_b", par, 3), GeometryError);
}

TEST_CASE("missing tags raise geometry errors") {
  const Mesh mesh = build_structured_quad_mesh({0, 0, 1, 1}, 2, 2, 0);
  CHECK_THROWS_AS(fit_line_parameterization(mesh, "nope"), GeometryError);
  CHECK_THROWS_AS(fit_circle_parameterization(mesh, "nope", Vec2(0, 0)), GeometryError);
  const auto par = fit_line_parameterization(mesh, "top");
  CHECK_THROWS_AS(build_interface_quadrature(mesh, "top", mesh, "nope", par, 3), GeometryError);
}

TEST_CASE("plain facet quadrature reduces to the Gauss rule on one facet") {
  const Mesh mesh = build_structured_quad_mesh({0, 0, 2, 1}, 2, 2, 0);
  int facet_index = -1;
  for (std::size_t f = 0; f < mesh.boundary_facets.size(); ++f) {
    if (mesh.boundary_facets[f].tag == "right") {
      facet_index = static_cast<int>(f);
      break;
    }
  }
  REQUIRE(facet_index >= 0);
  const SignedFacetQuadrature sq = plain_facet_quadrature(mesh, facet_index, 3);
  CHECK(sq.facet == facet_index);
  CHECK(sq.facet_measure == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(sq.net_measure() == doctest::Approx(0.5).epsilon(1e-13));
  const FacetGeometry geom = mesh.facet_geometry(facet_index);
  double moment_y = 0.0;
  for (const auto& pt : sq.points) {
    CHECK((pt.normal - Vec2(1, 0)).norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(pt.physical.x() == doctest::Approx(2.0).epsilon(1e-14));
    moment_y += pt.weight * pt.physical.y();
  }
  const double mid_y = 0.5 * (geom.p0.y() + geom.p1.y());
  CHECK(moment_y == doctest::Approx(mid_y * geom.measure).epsilon(1e-13));
}

TEST_CASE("circular sliding interface: full cover, rotation invariance") {
  const double r = 0.75;
  Mesh inner = build_annulus_mesh(0.5, r, 16, 1, 0, "hub", "ifc_a");
  const Mesh outer = build_annulus_mesh(r, 1.0, 24, 1, 1, "ifc_b", "rim");
  const auto par = fit_circle_parameterization(inner, "ifc_a", Vec2(0, 0));
  CHECK(par.radius == doctest::Approx(r).epsilon(1e-14));

  const SlidingInterface aligned = build_interface_quadrature(inner, "ifc_a", outer, "ifc_b", par, 3);
  // Breakpoints at multiples of 2pi/16 and 2pi/24: 24 + 16 - 8 shared = 32 arcs.
  CHECK(aligned.cuts.size() == 32);
  CHECK(aligned.covered_measure() == doctest::Approx(2.0 * kPi * r).epsilon(1e-9));
  for (const auto& sq : aligned.uncovered_a) {
    CHECK(std::abs(sq.net_measure()) <= 1e-9);
  }
  for (const auto& sq : aligned.uncovered_b) {
    CHECK(std::abs(sq.net_measure()) <= 1e-9);
  }
  // Interface normal points radially outward (from the inner side a to side b).
  for (const auto& cut : aligned.cuts) {
    for (const auto& pt : cut.points) {
      CHECK(pt.normal.dot(pt.physical) > 0.0);
    }
  }

  rigid_rotate_subdomain(inner, Vec2(0, 0), 1.0, 0.07);  // generic misalignment
  const SlidingInterface rotated = build_interface_quadrature(inner, "ifc_a", outer, "ifc_b", par, 3);
  CHECK(rotated.cuts.size() == 40);  // all 16 + 24 breakpoints now distinct
  CHECK(rotated.covered_measure() == doctest::Approx(2.0 * kPi * r).epsilon(1e-9));
  for (const auto& sq : rotated.uncovered_a) {
    CHECK(std::abs(sq.net_measure()) <= 1e-9);
  }
}

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "dtnlab/errors.hpp"
#include "dtnlab/mesh.hpp"

using namespace dtnlab;

namespace {

int euler(const Mesh& m) {
  return static_cast<int>(m.num_vertices()) - static_cast<int>(m.num_edges()) + static_cast<int>(m.num_triangles());
}

bool has_vertex(const Mesh& m, Point p) {
  for (int v : m.boundary_vertices()) {
    if (distance(m.vertices()[v], p) < 1e-12) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("structured square counts") {
  const Mesh m1 = build_structured_square(1);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_triangles() == 2);
  CHECK(m1.h_max() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const Mesh m2 = build_structured_square(2);
  CHECK(m2.num_vertices() == 9);
  CHECK(m2.num_triangles() == 8);

  for (int n : {1, 3, 7, 16}) {
    const Mesh m = build_structured_square(n);
    CHECK(m.num_vertices() == static_cast<std::size_t>((n + 1) * (n + 1)));
    CHECK(m.num_triangles() == static_cast<std::size_t>(2 * n * n));
    CHECK(m.boundary_edges().size() == static_cast<std::size_t>(4 * n));
    CHECK(m.h_max() == doctest::Approx(std::sqrt(2.0) / n).epsilon(1e-14));
    CHECK(m.area() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.boundary_length() == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(euler(m) == 1);
    CHECK(m.boundary_loop_count() == 1);
    CHECK_NOTHROW(m.validate());
  }
  CHECK_THROWS_AS(build_structured_square(0), InvalidInput);
}

TEST_CASE("structured square is nonobtuse with outward normals") {
  const Mesh m = build_structured_square(4);
  const QualityReport q = m.quality();
  CHECK(q.nonobtuse);
  CHECK(q.max_angle_deg <= 90.0 + 1e-9);
  CHECK(q.min_angle_deg == doctest::Approx(45.0));
  for (const auto& e : m.boundary_edges()) {
    const Point mid = m.edge_midpoint(e);
    const Point probe = mid + 1e-3 * e.normal;
    CHECK_FALSE((probe.x > 0.0 && probe.x < 1.0 && probe.y > 0.0 && probe.y < 1.0));
    CHECK(std::hypot(e.normal.x, e.normal.y) == doctest::Approx(1.0));
  }
}

TEST_CASE("polygon meshes") {
  SUBCASE("unit square, h = 0.5") {
    const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Mesh m = build_polygon_mesh(sq, 0.5);
    CHECK_NOTHROW(m.validate());
    CHECK(euler(m) == 1);
    CHECK(m.area() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.h_max() <= 2.0 * 0.5);
  }
  SUBCASE("16-gon, h = 0.3") {
    const auto poly = regular_polygon(16, 1.0);
    const Mesh m = build_polygon_mesh(poly, 0.3);
    CHECK_NOTHROW(m.validate());
    CHECK(euler(m) == 1);
    CHECK(m.h_max() <= 0.6);
    const double exact = 0.5 * 16 * std::sin(2.0 * M_PI / 16);
    CHECK(m.area() == doctest::Approx(exact).epsilon(1e-12));
  }
  SUBCASE("L-shape, h = 0.25, corners kept") {
    const auto poly = l_shape_polygon();
    const Mesh m = build_polygon_mesh(poly, 0.25);
    CHECK_NOTHROW(m.validate());
    CHECK(euler(m) == 1);
    CHECK(m.area() == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(m.boundary_length() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(m.h_max() <= 0.5);
    for (const Point& p : poly) CHECK(has_vertex(m, p));
    std::set<int> sides;
    for (const auto& e : m.boundary_edges()) sides.insert(e.side);
    CHECK(sides == std::set<int>{0, 1, 2, 3, 4, 5});
  }
  SUBCASE("clockwise input is accepted") {
    auto poly = l_shape_polygon();
    std::reverse(poly.begin(), poly.end());
    const Mesh m = build_polygon_mesh(poly, 0.2);
    CHECK_NOTHROW(m.validate());
    CHECK(m.area() == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("self-intersecting polygon is rejected") {
    const std::vector<Point> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    CHECK_FALSE(polygon_is_simple(bowtie));
    CHECK_THROWS_AS(build_polygon_mesh(bowtie, 0.2), InvalidInput);
  }
  SUBCASE("h must be positive") {
    const auto poly = l_shape_polygon();
    CHECK_THROWS_AS(build_polygon_mesh(poly, 0.0), InvalidInput);
  }
}

TEST_CASE("red refinement") {
  const Mesh m1 = build_structured_square(1);
  const Mesh r1 = refine(m1);
  CHECK(r1.num_triangles() == 8);
  CHECK(r1.h_max() == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  const Mesh r2 = refine(r1);
  CHECK(r2.num_triangles() == 32);

  Mesh m = build_structured_square(3);
  const double h0 = m.h_max();
  for (int k = 1; k <= 3; ++k) {
    m = refine(m);
    CHECK(m.h_max() == doctest::Approx(h0 / std::pow(2.0, k)).epsilon(1e-14));
    CHECK_NOTHROW(m.validate());
    CHECK(euler(m) == 1);
    CHECK(m.quality().nonobtuse);
  }
}

TEST_CASE("refinement carries the partition") {
  const auto poly = l_shape_polygon();
  const Mesh m = build_polygon_mesh(poly, 0.25);
  const std::vector<int> g0{2, 3};
  const BoundaryPartition p = partition_by_sides(m, g0);
  const auto [rm, rp] = refine(m, p);
  CHECK(gamma0_length(rm, rp) == doctest::Approx(gamma0_length(m, p)).epsilon(1e-14));
  CHECK(gamma0_length(m, p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rp.gamma0_edges.size() == 2 * p.gamma0_edges.size());
  for (int e : rp.gamma0_edges) {
    const int side = rm.boundary_edges()[e].side;
    CHECK((side == 2 || side == 3));
  }
}

TEST_CASE("boundary partitions") {
  const Mesh m = build_structured_square(2);
  SUBCASE("x = 0 side") {
    const auto p = partition_boundary(m, [](Point q) { return q.x < 1e-12; });
    CHECK(p.gamma0_edges.size() == 2);
    CHECK(p.constrained_vertices.size() == 3);
    CHECK(p.gamma1_edges.size() == 6);
  }
  SUBCASE("empty Γ0") {
    const auto p = partition_boundary(m, [](Point) { return false; });
    CHECK(p.gamma0_edges.empty());
    CHECK(p.constrained_vertices.empty());
    CHECK(p.gamma1_edges.size() == 8);
  }
  SUBCASE("Γ0 = ∂Ω is rejected") {
    CHECK_THROWS_AS(partition_boundary(m, [](Point) { return true; }), InvalidInput);
  }
  SUBCASE("interface corners are constrained") {
    const std::vector<int> bottom{0};
    const auto p = partition_by_sides(m, bottom);
    for (int v : {0, 1, 2}) CHECK(p.is_constrained(v));
    CHECK_FALSE(p.is_constrained(3));
    std::set<int> all(p.gamma0_edges.begin(), p.gamma0_edges.end());
    for (int e : p.gamma1_edges) CHECK(all.insert(e).second);
    CHECK(all.size() == m.boundary_edges().size());
  }
}

TEST_CASE("mesh text round trip") {
  const auto poly = l_shape_polygon();
  const Mesh m = build_polygon_mesh(poly, 0.3);
  const std::vector<int> g0{0};
  const BoundaryPartition p = partition_by_sides(m, g0);
  std::stringstream s;
  write_mesh(s, m, &p);
  CHECK(s.str().rfind("DTNLAB-MESH v1\n", 0) == 0);
  const auto [back, bp] = read_mesh(s);
  REQUIRE(bp.has_value());
  CHECK(back.num_vertices() == m.num_vertices());
  CHECK(back.num_triangles() == m.num_triangles());
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    CHECK(back.vertices()[i].x == m.vertices()[i].x);
    CHECK(back.vertices()[i].y == m.vertices()[i].y);
  }
  CHECK(bp->gamma0_edges.size() == p.gamma0_edges.size());
  CHECK(bp->constrained_vertices == p.constrained_vertices);

  std::stringstream bad("DTNLAB-MESH v2\n");
  CHECK_THROWS_AS(read_mesh(bad), InvalidInput);
}

TEST_CASE("invalid meshes are rejected") {
  const std::vector<Point> v{{0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(Mesh(v, {{0, 2, 1}}), InvalidMesh);  // clockwise
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 5}}), InvalidMesh);
}

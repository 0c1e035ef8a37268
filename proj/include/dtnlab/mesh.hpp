#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dtnlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
double distance(Point a, Point b);

// Boundary edge oriented so that the domain lies to its left; `side` is the
// index of the generating polygon side (inherited through refinement).
struct BoundaryEdge {
  std::array<int, 2> v{};
  Point normal;  // outward unit normal
  int side = -1;
};

struct QualityReport {
  double min_angle_deg = 0.0;
  double max_angle_deg = 0.0;
  double min_area = 0.0;
  bool nonobtuse = false;
};

class Mesh {
public:
  Mesh() = default;
  // Builds boundary edges from triangle adjacency and validates. `side_of`
  // assigns a side tag to each boundary edge given its vertex indices.
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
       const std::function<int(int, int)>& side_of = {});

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  double h_max() const { return h_max_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  double triangle_area(std::size_t t) const;
  double area() const;
  double boundary_length() const;
  Point edge_midpoint(const BoundaryEdge& e) const;
  double edge_length(const BoundaryEdge& e) const;
  // Sorted list of vertices lying on the boundary.
  std::vector<int> boundary_vertices() const;
  QualityReport quality() const;

  // Throws InvalidMesh when an invariant fails: positive areas, edge incidence
  // (boundary edges once, interior edges twice), closed boundary loops.
  void validate() const;
  // Number of closed boundary loops.
  int boundary_loop_count() const;

private:
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::size_t num_edges_ = 0;
  double h_max_ = 0.0;
};

// Split of the boundary edges into Γ0 (Dirichlet-constrained) and Γ1.
struct BoundaryPartition {
  std::vector<int> gamma0_edges;
  std::vector<int> gamma1_edges;
  std::vector<int> constrained_vertices;  // sorted; every vertex touching a Γ0 edge

  bool is_constrained(int vertex) const;
};

using EdgeSelector = std::function<bool(Point midpoint)>;

// Unit square [0,1]^2 with n×n cells, each split along the (0,0)-(1,1)
// diagonal direction into two right-isosceles triangles. Side tags: 0 bottom,
// 1 right, 2 top, 3 left.
Mesh build_structured_square(int n);

// Conforming Delaunay triangulation of a simple polygon (counter-clockwise or
// clockwise vertex loop) with target edge length h. Side tag = polygon side.
Mesh build_polygon_mesh(std::span<const Point> polygon, double h_target);

// Red refinement: every triangle split into four by its edge midpoints.
Mesh refine(const Mesh& mesh);
// Refines and carries the Γ0/Γ1 labels over to the child edges.
std::pair<Mesh, BoundaryPartition> refine(const Mesh& mesh, const BoundaryPartition& part);

// Γ0 = boundary edges whose midpoint satisfies `in_gamma0`.
BoundaryPartition partition_boundary(const Mesh& mesh, const EdgeSelector& in_gamma0);
// Γ0 = boundary edges whose side tag is listed.
BoundaryPartition partition_by_sides(const Mesh& mesh, std::span<const int> gamma0_sides);
// Builds a partition from explicit per-edge flags (true = Γ0).
BoundaryPartition partition_from_flags(const Mesh& mesh, const std::vector<bool>& in_gamma0);

double gamma0_length(const Mesh& mesh, const BoundaryPartition& part);

// Plain-text mesh I/O (header line `DTNLAB-MESH v1`).
void write_mesh(std::ostream& out, const Mesh& mesh, const BoundaryPartition* part = nullptr);
std::pair<Mesh, std::optional<BoundaryPartition>> read_mesh(std::istream& in);

// Polygon helpers used by the mesher and configuration layer.
std::vector<Point> regular_polygon(int sides, double radius, Point center = {0.0, 0.0});
std::vector<Point> l_shape_polygon();
bool polygon_is_simple(std::span<const Point> polygon);
bool point_in_polygon(std::span<const Point> polygon, Point p);

}  // namespace dtnlab

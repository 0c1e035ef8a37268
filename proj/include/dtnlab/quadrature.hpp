#pragma once

#include <array>
#include <cstddef>

#include "dtnlab/mesh.hpp"

namespace dtnlab {

struct QuadPoint {
  Point point;
  double weight = 0.0;
  std::array<double, 3> bary{};  // P1 basis values at the point (edge rules use the first two)
};

// Degree-2 three-point rule at barycentric (2/3, 1/6, 1/6) and permutations.
std::array<QuadPoint, 3> triangle_quadrature(const Mesh& mesh, std::size_t triangle);

// Two-point Gauss–Legendre rule on a boundary edge.
std::array<QuadPoint, 2> edge_quadrature(const Mesh& mesh, const BoundaryEdge& edge);

}  // namespace dtnlab

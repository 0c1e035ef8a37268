#include "dtnlab/quadrature.hpp"

#include <cmath>

namespace dtnlab {

std::array<QuadPoint, 3> triangle_quadrature(const Mesh& mesh, std::size_t triangle) {
  const auto& t = mesh.triangles()[triangle];
  const auto& v = mesh.vertices();
  const double w = mesh.triangle_area(triangle) / 3.0;
  std::array<QuadPoint, 3> out;
  for (int q = 0; q < 3; ++q) {
    std::array<double, 3> b{1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    b[q] = 2.0 / 3.0;
    out[q].bary = b;
    out[q].weight = w;
    out[q].point = {b[0] * v[t[0]].x + b[1] * v[t[1]].x + b[2] * v[t[2]].x,
                    b[0] * v[t[0]].y + b[1] * v[t[1]].y + b[2] * v[t[2]].y};
  }
  return out;
}

std::array<QuadPoint, 2> edge_quadrature(const Mesh& mesh, const BoundaryEdge& edge) {
  const Point a = mesh.vertices()[edge.v[0]];
  const Point b = mesh.vertices()[edge.v[1]];
  const double len = distance(a, b);
  const double g = 0.5 / std::sqrt(3.0);
  std::array<QuadPoint, 2> out;
  const double s[2] = {0.5 - g, 0.5 + g};
  for (int q = 0; q < 2; ++q) {
    out[q].point = a + s[q] * (b - a);
    out[q].weight = 0.5 * len;
    out[q].bary = {1.0 - s[q], s[q], 0.0};
  }
  return out;
}

}  // namespace dtnlab

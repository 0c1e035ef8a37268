#include "dtnlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "dtnlab/errors.hpp"

namespace dtnlab {

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

double signed_area(Point a, Point b, Point c) { return 0.5 * cross(b - a, c - a); }

double polygon_signed_area(std::span<const Point> poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    s += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * s;
}

double point_segment_distance(Point p, Point a, Point b) {
  const Point d = b - a;
  const double len2 = d.x * d.x + d.y * d.y;
  double t = len2 > 0.0 ? ((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * d);
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  auto orient = [](Point a, Point b, Point c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](Point a, Point b, Point c) {
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
  };
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
           const std::function<int(int, int)>& side_of)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = static_cast<int>(vertices_.size());
  for (const auto& t : triangles_) {
    for (int v : t) {
      if (v < 0 || v >= nv) throw InvalidMesh("triangle references a missing vertex");
    }
  }
  // Directed edges in triangle orientation; a boundary edge appears once.
  std::map<EdgeKey, std::pair<int, std::array<int, 2>>> edges;
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      auto [it, inserted] = edges.try_emplace(edge_key(a, b), 0, std::array<int, 2>{a, b});
      ++it->second.first;
      h_max_ = std::max(h_max_, distance(vertices_[a], vertices_[b]));
    }
  }
  num_edges_ = edges.size();

  // Order boundary edges loop by loop, each loop starting at its smallest vertex.
  std::map<int, std::array<int, 2>> next;
  for (const auto& [key, info] : edges) {
    if (info.first == 1) {
      if (!next.emplace(info.second[0], info.second).second) {
        throw InvalidMesh("boundary vertex with two outgoing boundary edges");
      }
    } else if (info.first != 2) {
      throw InvalidMesh("edge shared by more than two triangles");
    }
  }
  std::map<int, bool> used;
  for (const auto& [start, first_edge] : next) {
    if (used[start]) continue;
    int v = start;
    while (!used[v]) {
      used[v] = true;
      auto it = next.find(v);
      if (it == next.end()) throw InvalidMesh("boundary is not a closed loop");
      const auto e = it->second;
      const Point d = vertices_[e[1]] - vertices_[e[0]];
      const double len = std::hypot(d.x, d.y);
      BoundaryEdge be;
      be.v = e;
      be.normal = {d.y / len, -d.x / len};
      be.side = side_of ? side_of(e[0], e[1]) : -1;
      boundary_edges_.push_back(be);
      v = e[1];
    }
  }
  validate();
}

double Mesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  return signed_area(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
}

double Mesh::area() const {
  double s = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) s += triangle_area(t);
  return s;
}

double Mesh::boundary_length() const {
  double s = 0.0;
  for (const auto& e : boundary_edges_) s += edge_length(e);
  return s;
}

Point Mesh::edge_midpoint(const BoundaryEdge& e) const {
  return 0.5 * (vertices_[e.v[0]] + vertices_[e.v[1]]);
}

double Mesh::edge_length(const BoundaryEdge& e) const {
  return distance(vertices_[e.v[0]], vertices_[e.v[1]]);
}

std::vector<int> Mesh::boundary_vertices() const {
  std::vector<int> out;
  for (const auto& e : boundary_edges_) out.push_back(e.v[0]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QualityReport Mesh::quality() const {
  QualityReport q;
  q.min_angle_deg = 180.0;
  q.max_angle_deg = 0.0;
  q.min_area = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const Point p = vertices_[tri[k]];
      const Point u = vertices_[tri[(k + 1) % 3]] - p;
      const Point w = vertices_[tri[(k + 2) % 3]] - p;
      const double ang = std::atan2(std::abs(cross(u, w)), u.x * w.x + u.y * w.y) * 180.0 /
                         std::numbers::pi;
      q.min_angle_deg = std::min(q.min_angle_deg, ang);
      q.max_angle_deg = std::max(q.max_angle_deg, ang);
    }
    q.min_area = std::min(q.min_area, triangle_area(t));
  }
  q.nonobtuse = q.max_angle_deg <= 90.0 + 1e-9;
  return q;
}

void Mesh::validate() const {
  if (triangles_.empty()) throw InvalidMesh("mesh has no triangles");
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    if (!(triangle_area(t) > 0.0)) {
      throw InvalidMesh("triangle " + std::to_string(t) + " has non-positive signed area");
    }
  }
  std::map<EdgeKey, int> count;
  for (const auto& t : triangles_) {
    for (int k = 0; k < 3; ++k) ++count[edge_key(t[k], t[(k + 1) % 3])];
  }
  std::size_t nb = 0;
  for (const auto& [key, c] : count) {
    if (c == 1) ++nb;
    if (c > 2) throw InvalidMesh("edge shared by more than two triangles");
  }
  if (nb != boundary_edges_.size()) throw InvalidMesh("boundary edge list is inconsistent");
  std::map<int, int> out_deg, in_deg;
  for (const auto& e : boundary_edges_) {
    if (count[edge_key(e.v[0], e.v[1])] != 1) throw InvalidMesh("listed boundary edge is interior");
    ++out_deg[e.v[0]];
    ++in_deg[e.v[1]];
  }
  for (const auto& [v, d] : out_deg) {
    if (d != 1 || in_deg[v] != 1) throw InvalidMesh("boundary edges do not form closed loops");
  }
  if (out_deg.size() != in_deg.size()) throw InvalidMesh("boundary edges do not form closed loops");
}

int Mesh::boundary_loop_count() const {
  // Edges are stored loop by loop.
  int loops = 0;
  int loop_start = -1;
  for (const auto& e : boundary_edges_) {
    if (loop_start < 0) loop_start = e.v[0];
    if (e.v[1] == loop_start) {
      ++loops;
      loop_start = -1;
    }
  }
  return loops;
}

bool BoundaryPartition::is_constrained(int vertex) const {
  return std::binary_search(constrained_vertices.begin(), constrained_vertices.end(), vertex);
}

Mesh build_structured_square(int n) {
  if (n < 1) throw InvalidInput("structured square needs n >= 1");
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      verts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  auto side_of = [n](int a, int b) {
    const int ia = a % (n + 1), ja = a / (n + 1);
    const int ib = b % (n + 1), jb = b / (n + 1);
    if (ja == 0 && jb == 0) return 0;
    if (ia == n && ib == n) return 1;
    if (ja == n && jb == n) return 2;
    if (ia == 0 && ib == 0) return 3;
    return -1;
  };
  return Mesh(std::move(verts), std::move(tris), side_of);
}

std::vector<Point> regular_polygon(int sides, double radius, Point center) {
  if (sides < 3 || !(radius > 0.0)) throw InvalidInput("regular polygon needs >= 3 sides and radius > 0");
  std::vector<Point> poly;
  for (int k = 0; k < sides; ++k) {
    const double th = 2.0 * std::numbers::pi * k / sides;
    poly.push_back({center.x + radius * std::cos(th), center.y + radius * std::sin(th)});
  }
  return poly;
}

std::vector<Point> l_shape_polygon() {
  return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.5}, {0.5, 0.5}, {0.5, 1.0}, {0.0, 1.0}};
}

bool polygon_is_simple(std::span<const Point> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(poly[i], poly[(i + 1) % n]) == 0.0) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return std::abs(polygon_signed_area(poly)) > 0.0;
}

bool point_in_polygon(std::span<const Point> poly, Point p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

struct DelaunayTri {
  std::array<int, 3> v;
  Point cc;
  double r2;
};

DelaunayTri make_tri(const std::vector<Point>& pts, int a, int b, int c) {
  if (signed_area(pts[a], pts[b], pts[c]) < 0.0) std::swap(b, c);
  const Point A = pts[a], B = pts[b], C = pts[c];
  const double d = 2.0 * (A.x * (B.y - C.y) + B.x * (C.y - A.y) + C.x * (A.y - B.y));
  const double a2 = A.x * A.x + A.y * A.y;
  const double b2 = B.x * B.x + B.y * B.y;
  const double c2 = C.x * C.x + C.y * C.y;
  Point cc{(a2 * (B.y - C.y) + b2 * (C.y - A.y) + c2 * (A.y - B.y)) / d,
           (a2 * (C.x - B.x) + b2 * (A.x - C.x) + c2 * (B.x - A.x)) / d};
  const double dx = A.x - cc.x, dy = A.y - cc.y;
  return {{a, b, c}, cc, dx * dx + dy * dy};
}

// Bowyer–Watson over `pts`; the last three points must form a super triangle.
std::vector<std::array<int, 3>> bowyer_watson(const std::vector<Point>& pts, int num_real) {
  std::vector<DelaunayTri> tris;
  tris.push_back(make_tri(pts, num_real, num_real + 1, num_real + 2));
  for (int p = 0; p < num_real; ++p) {
    const Point P = pts[p];
    std::map<EdgeKey, std::pair<int, std::array<int, 2>>> cavity;
    std::vector<DelaunayTri> keep;
    keep.reserve(tris.size() + 2);
    for (const auto& t : tris) {
      const double dx = P.x - t.cc.x, dy = P.y - t.cc.y;
      if (dx * dx + dy * dy < t.r2 * (1.0 - 1e-12)) {
        for (int k = 0; k < 3; ++k) {
          const int a = t.v[k], b = t.v[(k + 1) % 3];
          auto [it, ins] = cavity.try_emplace(edge_key(a, b), 0, std::array<int, 2>{a, b});
          ++it->second.first;
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [key, info] : cavity) {
      if (info.first == 1) keep.push_back(make_tri(pts, info.second[0], info.second[1], p));
    }
    tris = std::move(keep);
  }
  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (t.v[0] < num_real && t.v[1] < num_real && t.v[2] < num_real) out.push_back(t.v);
  }
  return out;
}

}  // namespace

Mesh build_polygon_mesh(std::span<const Point> polygon_in, double h) {
  if (!(h > 0.0)) throw InvalidInput("polygon mesh needs h_target > 0");
  if (!polygon_is_simple(polygon_in)) throw InvalidInput("polygon is not simple");
  const std::size_t ns = polygon_in.size();
  std::vector<Point> poly(polygon_in.begin(), polygon_in.end());
  std::vector<int> side_tag(ns);
  for (std::size_t i = 0; i < ns; ++i) side_tag[i] = static_cast<int>(i);
  if (polygon_signed_area(poly) < 0.0) {
    std::reverse(poly.begin(), poly.end());
    for (std::size_t k = 0; k < ns; ++k) {
      side_tag[k] = static_cast<int>((2 * ns - 2 - k) % ns);
    }
  }

  // Boundary points and segments; every side subdivided uniformly.
  std::vector<Point> pts;
  struct Segment {
    int a, b, side;
  };
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < ns; ++i) {
    const Point a = poly[i], b = poly[(i + 1) % ns];
    const int m = std::max(1, static_cast<int>(std::ceil(distance(a, b) / h - 1e-9)));
    const int first = static_cast<int>(pts.size());
    for (int k = 0; k < m; ++k) pts.push_back(a + (static_cast<double>(k) / m) * (b - a));
    for (int k = 0; k < m; ++k) {
      const int nxt = (k + 1 < m) ? first + k + 1 : -1;  // patched below
      segs.push_back({first + k, nxt, side_tag[i]});
    }
  }
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (segs[s].b < 0) segs[s].b = segs[(s + 1) % segs.size()].a;
  }

  // Interior points on a triangular lattice, kept away from the boundary.
  double xmin = poly[0].x, xmax = poly[0].x, ymin = poly[0].y, ymax = poly[0].y;
  for (const auto& p : poly) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  std::vector<Point> interior;
  const double dy = h * std::sqrt(3.0) / 2.0;
  for (int j = 0; ymin + j * dy <= ymax; ++j) {
    const double y = ymin + j * dy;
    const double shift = (j % 2) ? 0.5 * h : 0.0;
    for (int i = 0; xmin + shift + i * h <= xmax; ++i) {
      const Point p{xmin + shift + i * h, y};
      if (!point_in_polygon(poly, p)) continue;
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < ns; ++s) {
        dmin = std::min(dmin, point_segment_distance(p, poly[s], poly[(s + 1) % ns]));
      }
      if (dmin >= 0.6 * h) interior.push_back(p);
    }
  }

  // Make every boundary segment Gabriel: split segments encroached by other
  // boundary points and drop interior points inside diametral circles.
  auto encroaches = [](Point p, Point a, Point b) {
    const Point c = 0.5 * (a + b);
    return distance(p, c) < 0.5 * distance(a, b) * 1.05;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < segs.size() && !changed; ++s) {
      const Point a = pts[segs[s].a], b = pts[segs[s].b];
      for (std::size_t q = 0; q < pts.size(); ++q) {
        if (static_cast<int>(q) == segs[s].a || static_cast<int>(q) == segs[s].b) continue;
        if (encroaches(pts[q], a, b)) {
          const int mid = static_cast<int>(pts.size());
          pts.push_back(0.5 * (a + b));
          const Segment second{mid, segs[s].b, segs[s].side};
          segs[s].b = mid;
          segs.insert(segs.begin() + static_cast<std::ptrdiff_t>(s) + 1, second);
          changed = true;
          break;
        }
      }
    }
  }
  std::erase_if(interior, [&](Point p) {
    for (const auto& s : segs) {
      if (encroaches(p, pts[s.a], pts[s.b])) return true;
    }
    return false;
  });

  pts.insert(pts.end(), interior.begin(), interior.end());
  const int num_real = static_cast<int>(pts.size());
  const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
  const double big = 20.0 * std::max(xmax - xmin, ymax - ymin);
  pts.push_back({cx - big, cy - big});
  pts.push_back({cx + big, cy - big});
  pts.push_back({cx, cy + big});

  auto tris = bowyer_watson(pts, num_real);
  pts.resize(static_cast<std::size_t>(num_real));
  std::erase_if(tris, [&](const std::array<int, 3>& t) {
    const Point c = (1.0 / 3.0) * (pts[t[0]] + pts[t[1]] + pts[t[2]]);
    return !point_in_polygon(poly, c);
  });

  std::map<EdgeKey, int> seg_side;
  for (const auto& s : segs) seg_side[edge_key(s.a, s.b)] = s.side;
  std::map<EdgeKey, int> tri_edges;
  for (const auto& t : tris) {
    for (int k = 0; k < 3; ++k) ++tri_edges[edge_key(t[k], t[(k + 1) % 3])];
  }
  for (const auto& [key, side] : seg_side) {
    auto it = tri_edges.find(key);
    if (it == tri_edges.end() || it->second != 1) {
      throw InvalidMesh("polygon mesher failed to recover a boundary segment");
    }
  }
  auto side_of = [&seg_side](int a, int b) {
    auto it = seg_side.find(edge_key(a, b));
    return it == seg_side.end() ? -1 : it->second;
  };
  Mesh mesh(std::move(pts), std::move(tris), side_of);
  if (mesh.boundary_edges().size() != segs.size()) {
    throw InvalidMesh("polygon mesher produced a spurious boundary");
  }
  return mesh;
}

namespace {

struct RefineResult {
  Mesh mesh;
  std::map<EdgeKey, int> parent_of_child;  // child boundary edge -> parent boundary edge index
};

RefineResult refine_impl(const Mesh& mesh) {
  std::vector<Point> verts = mesh.vertices();
  std::map<EdgeKey, int> midpoint;
  auto mid = [&](int a, int b) {
    auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), static_cast<int>(verts.size()));
    if (inserted) verts.push_back(0.5 * (verts[a] + verts[b]));
    return it->second;
  };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * mesh.num_triangles());
  for (const auto& t : mesh.triangles()) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    tris.push_back({a, ab, ca});
    tris.push_back({ab, b, bc});
    tris.push_back({ca, bc, c});
    tris.push_back({ab, bc, ca});
  }
  std::map<EdgeKey, int> parent;
  const auto& be = mesh.boundary_edges();
  for (std::size_t e = 0; e < be.size(); ++e) {
    const int m = midpoint.at(edge_key(be[e].v[0], be[e].v[1]));
    parent[edge_key(be[e].v[0], m)] = static_cast<int>(e);
    parent[edge_key(m, be[e].v[1])] = static_cast<int>(e);
  }
  auto side_of = [&](int a, int b) {
    auto it = parent.find(edge_key(a, b));
    return it == parent.end() ? -1 : be[static_cast<std::size_t>(it->second)].side;
  };
  Mesh fine(std::move(verts), std::move(tris), side_of);
  return {std::move(fine), std::move(parent)};
}

}  // namespace

Mesh refine(const Mesh& mesh) { return refine_impl(mesh).mesh; }

std::pair<Mesh, BoundaryPartition> refine(const Mesh& mesh, const BoundaryPartition& part) {
  auto r = refine_impl(mesh);
  std::vector<bool> parent_g0(mesh.boundary_edges().size(), false);
  for (int e : part.gamma0_edges) parent_g0[static_cast<std::size_t>(e)] = true;
  std::vector<bool> child_g0;
  for (const auto& e : r.mesh.boundary_edges()) {
    child_g0.push_back(parent_g0[static_cast<std::size_t>(r.parent_of_child.at(edge_key(e.v[0], e.v[1])))]);
  }
  auto fine_part = partition_from_flags(r.mesh, child_g0);
  return {std::move(r.mesh), std::move(fine_part)};
}

BoundaryPartition partition_from_flags(const Mesh& mesh, const std::vector<bool>& in_gamma0) {
  const auto& be = mesh.boundary_edges();
  if (in_gamma0.size() != be.size()) throw InvalidInput("partition flags do not match boundary edges");
  BoundaryPartition part;
  for (std::size_t e = 0; e < be.size(); ++e) {
    if (in_gamma0[e]) {
      part.gamma0_edges.push_back(static_cast<int>(e));
      part.constrained_vertices.push_back(be[e].v[0]);
      part.constrained_vertices.push_back(be[e].v[1]);
    } else {
      part.gamma1_edges.push_back(static_cast<int>(e));
    }
  }
  if (part.gamma1_edges.empty()) throw InvalidInput("Γ1 must be nonempty (Γ0 = ∂Ω is not allowed)");
  auto& cv = part.constrained_vertices;
  std::sort(cv.begin(), cv.end());
  cv.erase(std::unique(cv.begin(), cv.end()), cv.end());
  return part;
}

BoundaryPartition partition_boundary(const Mesh& mesh, const EdgeSelector& in_gamma0) {
  std::vector<bool> flags;
  for (const auto& e : mesh.boundary_edges()) flags.push_back(in_gamma0(mesh.edge_midpoint(e)));
  return partition_from_flags(mesh, flags);
}

BoundaryPartition partition_by_sides(const Mesh& mesh, std::span<const int> sides) {
  std::vector<bool> flags;
  for (const auto& e : mesh.boundary_edges()) {
    flags.push_back(std::find(sides.begin(), sides.end(), e.side) != sides.end());
  }
  return partition_from_flags(mesh, flags);
}

double gamma0_length(const Mesh& mesh, const BoundaryPartition& part) {
  double s = 0.0;
  for (int e : part.gamma0_edges) s += mesh.edge_length(mesh.boundary_edges()[static_cast<std::size_t>(e)]);
  return s;
}

void write_mesh(std::ostream& out, const Mesh& mesh, const BoundaryPartition* part) {
  std::vector<int> label(mesh.boundary_edges().size(), -1);
  if (part) {
    for (int e : part->gamma0_edges) label[static_cast<std::size_t>(e)] = 0;
    for (int e : part->gamma1_edges) label[static_cast<std::size_t>(e)] = 1;
  }
  const auto old_prec = out.precision(17);
  out << "DTNLAB-MESH v1\n";
  out << "vertices " << mesh.num_vertices() << '\n';
  for (const auto& p : mesh.vertices()) out << p.x << ' ' << p.y << '\n';
  out << "triangles " << mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "boundary_edges " << mesh.boundary_edges().size() << '\n';
  for (std::size_t e = 0; e < mesh.boundary_edges().size(); ++e) {
    const auto& be = mesh.boundary_edges()[e];
    out << be.v[0] << ' ' << be.v[1] << ' ' << be.side << ' ' << label[e] << '\n';
  }
  out.precision(old_prec);
}

std::pair<Mesh, std::optional<BoundaryPartition>> read_mesh(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "DTNLAB-MESH v1") {
    throw InvalidInput("mesh file must start with 'DTNLAB-MESH v1'");
  }
  auto section = [&](const std::string& name) {
    std::string tag;
    std::size_t count = 0;
    if (!(in >> tag >> count) || tag != name) throw InvalidInput("expected section '" + name + "'");
    return count;
  };
  std::vector<Point> verts(section("vertices"));
  for (auto& p : verts) {
    if (!(in >> p.x >> p.y)) throw InvalidInput("truncated vertex section");
  }
  std::vector<std::array<int, 3>> tris(section("triangles"));
  for (auto& t : tris) {
    if (!(in >> t[0] >> t[1] >> t[2])) throw InvalidInput("truncated triangle section");
  }
  const std::size_t nb = section("boundary_edges");
  std::map<EdgeKey, std::pair<int, int>> labels;
  for (std::size_t e = 0; e < nb; ++e) {
    int a, b, side, label;
    if (!(in >> a >> b >> side >> label)) throw InvalidInput("truncated boundary section");
    labels[edge_key(a, b)] = {side, label};
  }
  auto side_of = [&labels](int a, int b) {
    auto it = labels.find(edge_key(a, b));
    return it == labels.end() ? -1 : it->second.first;
  };
  Mesh mesh(std::move(verts), std::move(tris), side_of);
  if (mesh.boundary_edges().size() != nb) throw InvalidInput("boundary section does not match triangles");
  std::vector<bool> flags;
  bool labelled = true;
  for (const auto& e : mesh.boundary_edges()) {
    auto it = labels.find(edge_key(e.v[0], e.v[1]));
    if (it == labels.end()) throw InvalidInput("boundary section does not match triangles");
    if (it->second.second < 0) labelled = false;
    flags.push_back(it->second.second == 0);
  }
  std::optional<BoundaryPartition> part;
  if (labelled) part = partition_from_flags(mesh, flags);
  return {std::move(mesh), std::move(part)};
}

}  // namespace dtnlab

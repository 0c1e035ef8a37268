#include "dtnlab/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dtnlab/errors.hpp"
#include "dtnlab/quadrature.hpp"

namespace dtnlab {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(Eigen::Index n, const Triplets& t) {
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

AssembledSystem assemble(const Mesh& mesh, const BoundaryPartition& part, const CoefficientSet& c,
                         const AssembleOptions& options) {
  AssembledSystem sys;
  sys.options = options;
  sys.certificate = certify(c, mesh);
  sys.gamma0_edges = part.gamma0_edges;
  sys.mesh_nonobtuse = mesh.quality().nonobtuse;

  const std::size_t nv = mesh.num_vertices();
  sys.dof_map.assign(nv, kConstrained);
  for (std::size_t v = 0; v < nv; ++v) {
    if (!part.is_constrained(static_cast<int>(v))) {
      sys.dof_map[v] = static_cast<int>(sys.dof_vertex.size());
      sys.dof_vertex.push_back(static_cast<int>(v));
    }
  }
  const auto n = static_cast<Eigen::Index>(sys.dof_vertex.size());
  sys.boundary_vertices = mesh.boundary_vertices();
  std::vector<bool> on_boundary(nv, false);
  for (int v : sys.boundary_vertices) on_boundary[static_cast<std::size_t>(v)] = true;
  for (Eigen::Index d = 0; d < n; ++d) {
    const auto v = static_cast<std::size_t>(sys.dof_vertex[static_cast<std::size_t>(d)]);
    (on_boundary[v] ? sys.boundary_dofs : sys.interior_dofs).push_back(static_cast<int>(d));
  }

  Triplets ta, tm, tk, tb;
  sys.samples.reserve(3 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const Point p0 = mesh.vertices()[tri[0]];
    const Point p1 = mesh.vertices()[tri[1]];
    const Point p2 = mesh.vertices()[tri[2]];
    const double area = mesh.triangle_area(t);
    // Gradients of the barycentric coordinates.
    Eigen::Matrix<double, 2, 3> grad;
    grad << p1.y - p2.y, p2.y - p0.y, p0.y - p1.y,
            p2.x - p1.x, p0.x - p2.x, p1.x - p0.x;
    grad /= 2.0 * area;

    Eigen::Matrix3d ea = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d em = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d ep = Eigen::Matrix3d::Zero();
    for (const auto& q : triangle_quadrature(mesh, t)) {
      CoefficientSample s;
      try {
        s = c.at(q.point);
      } catch (const Error& e) {
        throw QuadratureFailure(std::string("coefficient evaluation failed: ") + e.what());
      }
      sys.samples.push_back(s);
      const Eigen::Vector3d phi(q.bary[0], q.bary[1], q.bary[2]);
      // ea(i,j) = a(φ_j, φ_i)
      ea += q.weight * (grad.transpose() * s.a.transpose() * grad);
      ea += q.weight * (phi * (s.drift.transpose() * grad));
      ea += q.weight * ((grad.transpose() * s.codrift) * phi.transpose());
      ep += q.weight * s.a0 * (phi * phi.transpose());
      em += q.weight * s.density * (phi * phi.transpose());
    }
    if (options.lump_potential) {
      const Eigen::Vector3d rows = ep.rowwise().sum();
      ep = rows.asDiagonal();
    }
    ea += ep;
    const Eigen::Matrix3d ek = area * (grad.transpose() * grad);
    for (int i = 0; i < 3; ++i) {
      const int di = sys.dof_map[static_cast<std::size_t>(tri[i])];
      if (di == kConstrained) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = sys.dof_map[static_cast<std::size_t>(tri[j])];
        if (dj == kConstrained) continue;
        ta.emplace_back(di, dj, ea(i, j));
        tm.emplace_back(di, dj, em(i, j));
        tk.emplace_back(di, dj, ek(i, j));
      }
    }
  }

  for (int e : part.gamma1_edges) {
    const auto& be = mesh.boundary_edges()[static_cast<std::size_t>(e)];
    const double len = mesh.edge_length(be);
    const int d0 = sys.dof_map[static_cast<std::size_t>(be.v[0])];
    const int d1 = sys.dof_map[static_cast<std::size_t>(be.v[1])];
    const std::array<int, 2> d{d0, d1};
    for (int i = 0; i < 2; ++i) {
      if (d[i] == kConstrained) continue;
      for (int j = 0; j < 2; ++j) {
        if (d[j] == kConstrained) continue;
        double v;
        if (options.lump_boundary_mass) {
          v = (i == j) ? 0.5 * len : 0.0;
        } else {
          v = (i == j) ? len / 3.0 : len / 6.0;
        }
        if (v != 0.0) tb.emplace_back(d[i], d[j], v);
      }
    }
  }

  sys.A = from_triplets(n, ta);
  sys.M = from_triplets(n, tm);
  sys.K = from_triplets(n, tk);
  sys.B = from_triplets(n, tb);
  return sys;
}

bool AssembledSystem::constant_coefficients() const {
  for (const auto& s : samples) {
    const auto& f = samples.front();
    if (s.a != f.a || s.drift != f.drift || s.codrift != f.codrift || s.a0 != f.a0 || s.density != f.density) {
      return false;
    }
  }
  return true;
}

SparseMatrix robin_matrix(const AssembledSystem& sys, double mu) {
  SparseMatrix r = sys.A - mu * sys.B;
  r.makeCompressed();
  return r;
}

DirichletSystem dirichlet_system(const AssembledSystem& sys) {
  if (sys.interior_dofs.empty()) throw EmptyInterior("mesh has no interior dofs");
  return {submatrix(dense(sys.A), sys.interior_dofs, sys.interior_dofs),
          submatrix(dense(sys.M), sys.interior_dofs, sys.interior_dofs)};
}

MatrixXd dense(const SparseMatrix& m) { return MatrixXd(m); }

MatrixXd submatrix(const MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
    }
  }
  return out;
}

VectorXd gather(const VectorXd& v, const std::vector<int>& idx) {
  VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

double max_abs(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double symmetry_defect(const MatrixXd& m) { return max_abs(m - m.transpose()); }

void write_matrix(std::ostream& out, const MatrixXd& m, const std::vector<std::string>& meta) {
  out << "DTNLAB-MAT v1\n";
  for (const auto& line : meta) out << "# " << line << '\n';
  Eigen::Index nnz = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) nnz += (m(i, j) != 0.0);
  }
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  char buf[96];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(i), static_cast<long>(j), m(i, j));
      out << buf;
    }
  }
}

MatrixXd read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "DTNLAB-MAT v1") {
    throw InvalidInput("matrix file must start with 'DTNLAB-MAT v1'");
  }
  while (in.peek() == '#') std::getline(in, line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(in >> rows >> cols >> nnz) || rows < 0 || cols < 0) throw InvalidInput("bad matrix size line");
  MatrixXd m = MatrixXd::Zero(rows, cols);
  for (long k = 0; k < nnz; ++k) {
    long i, j;
    double v;
    if (!(in >> i >> j >> v) || i < 0 || j < 0 || i >= rows || j >= cols) {
      throw InvalidInput("bad matrix entry");
    }
    m(i, j) = v;
  }
  return m;
}

}  // namespace dtnlab

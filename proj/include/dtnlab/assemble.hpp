#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtnlab/coeffs.hpp"
#include "dtnlab/mesh.hpp"

namespace dtnlab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr int kConstrained = -1;

struct AssembleOptions {
  bool lump_boundary_mass = false;  // diagonal Γ1 boundary mass
  bool lump_potential = false;      // row-sum lumped a0 term
};

// P1 system on the free dofs (vertices not on the closure of Γ0).
struct AssembledSystem {
  SparseMatrix A;  // form matrix, A(i,j) = a(φ_j, φ_i)
  SparseMatrix M;  // consistent mass (with the coefficient density)
  SparseMatrix B;  // Γ1 boundary mass, nonzero only on boundary dofs
  SparseMatrix K;  // unit-Laplacian stiffness, for the discrete H¹ norm

  std::vector<int> dof_map;          // vertex -> free dof or kConstrained
  std::vector<int> dof_vertex;       // free dof -> vertex
  std::vector<int> boundary_dofs;    // free dofs on Γ1, ascending
  std::vector<int> interior_dofs;    // free dofs off the boundary, ascending
  std::vector<int> boundary_vertices;  // every mesh boundary vertex (Γ0 ∪ Γ1), ascending
  std::vector<int> gamma0_edges;       // copied from the partition
  bool mesh_nonobtuse = false;
  int quadrature_order = 2;
  AssembleOptions options;

  // Coefficient samples at the quadrature nodes, triangle-major.
  std::vector<CoefficientSample> samples;
  Certificate certificate;

  Eigen::Index num_dofs() const { return A.rows(); }
  // True when every quadrature sample carries the same coefficients.
  bool constant_coefficients() const;
};

// Throws NonElliptic / QuadratureFailure from coefficient certification.
AssembledSystem assemble(const Mesh& mesh, const BoundaryPartition& part, const CoefficientSet& c,
                         const AssembleOptions& options = {});

// A − μB.
SparseMatrix robin_matrix(const AssembledSystem& sys, double mu);

struct DirichletSystem {
  MatrixXd A;
  MatrixXd M;
};
// Restriction to interior dofs; throws EmptyInterior when there are none.
DirichletSystem dirichlet_system(const AssembledSystem& sys);

// Dense helpers.
MatrixXd dense(const SparseMatrix& m);
MatrixXd submatrix(const MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols);
VectorXd gather(const VectorXd& v, const std::vector<int>& idx);
// Free-dof vector holding the nodal values f(vertex) (constrained vertices skipped).
template <class F>
VectorXd interpolate(const Mesh& mesh, const AssembledSystem& sys, F&& f) {
  VectorXd u(sys.num_dofs());
  for (std::size_t d = 0; d < sys.dof_vertex.size(); ++d) {
    u(static_cast<Eigen::Index>(d)) = f(mesh.vertices()[static_cast<std::size_t>(sys.dof_vertex[d])]);
  }
  return u;
}

double max_abs(const MatrixXd& m);
double symmetry_defect(const MatrixXd& m);  // max |m − mᵀ|

// Coordinate dump, header `DTNLAB-MAT v1`, row-major order. `meta` lines are
// written as `# key value` after the header.
void write_matrix(std::ostream& out, const MatrixXd& m, const std::vector<std::string>& meta = {});
MatrixXd read_matrix(std::istream& in);

}  // namespace dtnlab

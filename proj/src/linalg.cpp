#include "dtnlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dtnlab/errors.hpp"

namespace dtnlab {

Spectrum sym_geneig(const Eigen::MatrixXd& K, const Eigen::MatrixXd& G, int k) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || G.rows() != n || G.cols() != n) throw InvalidInput("sym_geneig: size mismatch");
  if (k < 0) k = static_cast<int>(n);
  if (k > n) throw InvalidInput("sym_geneig: requested " + std::to_string(k) + " of " + std::to_string(n) + " eigenpairs");
  Spectrum out;
  if (n == 0) return out;

  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("sym_geneig: G is not positive definite");
  // C = L⁻¹ K L⁻ᵀ, symmetrized against roundoff.
  Eigen::MatrixXd C = llt.matrixL().solve(K);
  C = llt.matrixL().solve(C.transpose()).transpose();
  C = 0.5 * (C + C.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("sym_geneig: eigensolver did not converge", NAN);

  out.eigenvalues = es.eigenvalues().head(k);
  out.eigenvectors = llt.matrixU().solve(es.eigenvectors().leftCols(k));
  const double knorm = std::max(K.cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < k; ++i) {
    const auto v = out.eigenvectors.col(i);
    const double r = (K * v - out.eigenvalues(i) * (G * v)).norm() / (knorm * std::max(v.norm(), 1e-300));
    out.residual_max = std::max(out.residual_max, r);
  }
  return out;
}

std::vector<std::vector<int>> clusters(const Eigen::VectorXd& v, double rel_tol) {
  std::vector<std::vector<int>> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!out.empty()) {
      const double prev = v(out.back().back());
      const double scale = std::max({std::abs(prev), std::abs(v(i)), 1.0});
      if (std::abs(v(i) - prev) <= rel_tol * scale) {
        out.back().push_back(static_cast<int>(i));
        continue;
      }
    }
    out.push_back({static_cast<int>(i)});
  }
  return out;
}

int count_below(const Eigen::VectorXd& v, double value) {
  int c = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) c += (v(i) < value);
  return c;
}

}  // namespace dtnlab

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dtnlab {

// k smallest eigenpairs of K v = λ G v with G-orthonormal eigenvectors.
struct Spectrum {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, vᵢᵀ G vⱼ = δᵢⱼ
  double residual_max = 0.0;     // max ‖K v − λ G v‖ / (‖K‖ ‖v‖)
};

// Cholesky reduction to a standard symmetric problem. Throws
// NotPositiveDefinite when G is not SPD, InvalidInput for k out of range and
// ConvergenceFailure (with the achieved residual) when the solver fails.
// k < 0 means all eigenpairs.
Spectrum sym_geneig(const Eigen::MatrixXd& K, const Eigen::MatrixXd& G, int k = -1);

// Groups of consecutive indices whose values agree within
// rel_tol * max(|a|, |b|, 1).
std::vector<std::vector<int>> clusters(const Eigen::VectorXd& ascending, double rel_tol = 1e-6);

// Number of entries strictly below `value` (the counting function).
int count_below(const Eigen::VectorXd& ascending, double value);

}  // namespace dtnlab

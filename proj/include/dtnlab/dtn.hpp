#pragma once

#include <cstdint>
#include <optional>

#include "dtnlab/assemble.hpp"

namespace dtnlab {

// λ is declared to lie in the discrete Dirichlet spectrum once the interior
// block's condition estimate exceeds this.
inline constexpr double kDirichletConditionLimit = 1e12;

// Factorization of the interior block (A − λM)_II.
class InteriorSolver {
public:
  // Throws NearDirichletSpectrum when the block is numerically singular.
  InteriorSolver(const AssembledSystem& sys, double lambda);

  double lambda() const { return lambda_; }
  double condition() const { return cond_; }
  // (A − λM) as a dense matrix on all free dofs.
  const MatrixXd& shifted() const { return shifted_; }
  // Solves (A − λM)_II x = rhs.
  VectorXd solve(const VectorXd& rhs) const;
  MatrixXd solve(const MatrixXd& rhs) const;

private:
  double lambda_;
  double cond_ = 0.0;
  MatrixXd shifted_;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

struct HarmonicExtensionResult {
  VectorXd u;                     // on all free dofs
  double residual_interior = 0.0;  // max |(A − λM)u| over interior rows
};

// u_B = φ, u_I = −(A−λM)_II⁻¹ (A−λM)_IB φ.
HarmonicExtensionResult harmonic_extension(const AssembledSystem& sys, double lambda,
                                           const VectorXd& phi);
HarmonicExtensionResult harmonic_extension(const InteriorSolver& solver, const AssembledSystem& sys,
                                           const VectorXd& phi);

// The partial Dirichlet-to-Neumann operator at λ as the pair (S, Bb) on the
// Γ1 dofs: S = Schur complement of (A − λM) over the interior dofs.
struct DtnMatrix {
  MatrixXd S;
  MatrixXd Bb;
  double lambda = 0.0;
  double cond_interior = 0.0;
};

DtnMatrix dtn_matrix(const AssembledSystem& sys, double lambda);

// S embedded in the full boundary vertex set (Γ0 rows and columns zero),
// ordered like sys.boundary_vertices.
MatrixXd embed_in_boundary(const AssembledSystem& sys, const MatrixXd& s);

struct Decomposition {
  VectorXd u0;  // on all free dofs, zero on boundary dofs
  HarmonicExtensionResult harmonic;
};

// u = u0 + u1 with u0 vanishing on the boundary and u1 discrete-harmonic.
Decomposition decompose(const AssembledSystem& sys, double lambda, const VectorXd& u);

struct CoercivityReport {
  double w_est = 0.0;
  double delta_est = 0.0;
  double M_est = 0.0;
  int trials = 0;
};

// Random boundary vectors φ: w_est is the smallest w >= 0 keeping
// φᵀSφ + w φᵀBbφ >= 0 over the trials plus `w_margin`; delta_est is the
// largest δ with φᵀSφ + w φᵀBbφ >= δ ‖u_φ‖²_H1 where ‖u‖²_H1 = uᵀ(K+M)u; M_est
// is the largest continuity ratio over trial pairs. With `fixed_w` set, that
// w is used instead of the fitted one. Throws InvalidInput for trials < 1.
CoercivityReport coercivity_report(const AssembledSystem& sys, double lambda, int trials,
                                   std::uint64_t seed = 1, std::optional<double> fixed_w = {},
                                   double w_margin = 1.0);

struct SmoothnessReport {
  double second_difference = 0.0;   // ‖S(λ+h) − 2S(λ) + S(λ−h)‖_max / h²
  double derivative_norm = 0.0;      // ‖S(λ+h) − S(λ−h)‖_max / 2h
  double derivative_norm_fine = 0.0;  // same with h/10
  double richardson_ratio = 0.0;     // derivative_norm / derivative_norm_fine
  double derivative_max_eig = 0.0;   // largest eigenvalue of the symmetric derivative estimate
};

// Throws NearDirichletSpectrum if [λ−h, λ+h] meets the discrete Dirichlet
// spectrum.
SmoothnessReport smoothness_check(const AssembledSystem& sys, double lambda, double dlambda);

}  // namespace dtnlab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dtnlab/assemble.hpp"
#include "dtnlab/dtn.hpp"
#include "dtnlab/linalg.hpp"

namespace dtnlab {

inline constexpr double kClusterTol = 1e-6;

// Eigenproblems of the three realizations.
Spectrum dirichlet_spectrum(const AssembledSystem& sys, int k);
Spectrum robin_spectrum(const AssembledSystem& sys, double mu, int k);
// Generalized pair (S(λ), Bb) on the Γ1 dofs.
Spectrum steklov_spectrum(const AssembledSystem& sys, double lambda, int k);

struct DualityReport {
  double lambda = 0.0;
  int index = 0;              // 1-based Steklov index
  double mu = 0.0;            // μ_j
  double forward_residual = 0.0;  // ‖(A − λM − μB)u‖ / (‖A‖ ‖u‖)
  double reverse_residual = 0.0;  // ‖S v_B − μ Bb v_B‖ / (‖S‖ ‖v_B‖), v the Robin eigenvector at μ_j nearest λ
  int steklov_multiplicity = 0;   // size of the Steklov cluster containing μ_j
  int robin_multiplicity = 0;     // Robin branches crossing λ inside that cluster's μ window
  bool multiplicity_match = false;
};

// Steklov pair j at λ → Robin eigenvector at μ_j, and back.
DualityReport duality_check(const AssembledSystem& sys, double lambda, int j);
// Every Steklov pair at λ in one pass (shares the factorizations).
std::vector<DualityReport> duality_check_all(const AssembledSystem& sys, double lambda);

struct EigenCurve {
  std::vector<double> mu_grid;
  MatrixXd values;  // row k: λ_{k+1}^μ across the grid
  std::vector<std::vector<std::vector<int>>> clusters;  // per sample
  double max_increase = 0.0;       // largest λ_k(μ_{i+1}) − λ_k(μ_i), <= 0 when monotone
  double min_decrease_margin = 0.0;  // smallest observed decrease between samples
};

// Robin spectra on a uniform μ grid, paired by sorted index.
EigenCurve eigen_curves(const AssembledSystem& sys, double mu_min, double mu_max, int steps, int k);

struct LimitRow {
  double mu = 0.0;
  std::vector<double> gaps;  // λ_k^D − λ_k^μ
};

struct LimitTable {
  VectorXd dirichlet;
  std::vector<LimitRow> rows;
  std::vector<std::vector<double>> ratios;  // successive gap ratios per k
  bool all_positive = false;
  bool monotone = false;
};

LimitTable dirichlet_limit_study(const AssembledSystem& sys, int k, const std::vector<double>& mu_list);

struct ClusterMatch {
  int first_index = 0;  // 0-based
  int size_a = 0;
  int size_b = 0;
  bool ambiguous = false;
  double trace_angle_sin = 0.0;  // largest principal-angle sine of the Γ1 traces
};

struct MatchReport {
  VectorXd lambda_a;
  VectorXd lambda_b;
  VectorXd gaps;                   // λ_b − λ_a by index
  std::vector<bool> mismatch;      // |gap| > tol
  std::vector<ClusterMatch> clusters;
  MatrixXd U;                      // Ψ Φᵀ M_a (only on the computed subspace)
  double orthogonality_defect = 0.0;  // ‖(UΦ)ᵀ M_b (UΦ) − I‖_max
  double conjugation_residual = 0.0;  // ‖(UΦ)ᵀ L_b (UΦ) − diag(λ_a)‖_max / max(1, |λ|_max)
  bool counting_consistent = false;   // counting functions equal at the midpoints
  double max_gap() const { return gaps.size() ? gaps.cwiseAbs().maxCoeff() : 0.0; }
};

// Both systems must share the dof layout (same mesh and partition).
MatchReport match_and_unitary(const AssembledSystem& a, const AssembledSystem& b, double mu, int k,
                              double tol = 1e-8);

struct DtnEqualityReport {
  std::vector<double> lambdas;
  std::vector<double> defects;
  double max_defect = 0.0;
};

DtnEqualityReport dtn_equality_check(const AssembledSystem& a, const AssembledSystem& b,
                                     const std::vector<double>& lambda_list);

// λ values strictly inside gaps of the discrete Dirichlet spectrum (midpoints,
// starting below the first eigenvalue). Clusters are skipped over.
std::vector<double> spectral_gap_points(const AssembledSystem& sys, int count);

struct GaugeLevel {
  int level = 0;
  double h_max = 0.0;
  double dtn_defect = 0.0;
  double robin_gap = 0.0;
  std::vector<double> robin_gap_per_mu;
};

struct GaugeStudy {
  std::vector<GaugeLevel> levels;
  double identity_conjugation_residual = 0.0;  // b := a on the coarsest level
};

// a vs pullback(a, Φ) on successive red refinements of (mesh, part).
GaugeStudy gauge_study(const Mesh& mesh, const BoundaryPartition& part, const CoefficientSet& a,
                       const Diffeo& phi, int refinements, const std::vector<double>& lambda_list,
                       const std::vector<double>& mu_list, int k);

}  // namespace dtnlab

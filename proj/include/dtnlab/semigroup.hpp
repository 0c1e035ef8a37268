#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtnlab/assemble.hpp"
#include "dtnlab/linalg.hpp"

namespace dtnlab {

inline constexpr double kPositivityTol = 1e-8;

// e^{−tN} on the Γ1 dofs, extended by zero to every boundary vertex. N is the
// generalized pair (S(λ), Bb); the exponential is taken through its
// Bb-orthonormal eigendecomposition, so the semigroup law holds to roundoff.
class BoundarySemigroup {
public:
  explicit BoundarySemigroup(const AssembledSystem& sys, double lambda = 0.0);

  // phi0 is indexed like sys.boundary_vertices. Throws InvalidInput for t < 0.
  VectorXd evolve(const VectorXd& phi0, double t) const;
  // Matrix of e^{−tN} on the Γ1 dofs.
  MatrixXd matrix(double t) const;

  double w0() const { return spectrum_.eigenvalues(0); }
  const MatrixXd& S() const { return S_; }
  const MatrixXd& Bb() const { return Bb_; }
  double lambda() const { return lambda_; }
  bool lumped() const { return lumped_; }
  std::size_t full_size() const { return full_size_; }
  const std::vector<int>& gamma1_positions() const { return gamma1_pos_; }

  // Γ1 part of a full boundary vector and back.
  VectorXd restrict_to_gamma1(const VectorXd& full) const;
  VectorXd extend_by_zero(const VectorXd& gamma1) const;

  // Hypotheses shared by the order-property theorems.
  bool symmetric() const { return symmetric_; }
  double dirichlet_min() const { return dirichlet_min_; }  // min σ(L^D) − λ
  bool strict_setting() const { return strict_; }  // lumped Bb, nonobtuse mesh, constant coefficients
  double a0_min() const { return a0_min_; }
  double drift_max() const { return drift_max_; }

private:
  MatrixXd S_;
  MatrixXd Bb_;
  Spectrum spectrum_;
  double lambda_ = 0.0;
  bool lumped_ = false;
  bool symmetric_ = false;
  bool strict_ = false;
  double dirichlet_min_ = 0.0;
  double a0_min_ = 0.0;
  double drift_max_ = 0.0;
  std::size_t full_size_ = 0;
  std::vector<int> gamma1_pos_;
};

struct ReportRow {
  std::string check;
  double t = 0.0;
  int trial = 0;
  double min_entry = 0.0;
  double max_entry = 0.0;
  double violation = 0.0;  // relative to ‖φ‖∞, 0 when none
  std::string verdict;     // PASS, FAIL or WARN
};

struct OrderReport {
  std::vector<ReportRow> rows;
  double min_entry = 0.0;
  double max_violation = 0.0;
  // FAIL only for violations in the strict setting; violations elsewhere are WARN.
  std::string verdict;
  bool passed() const { return verdict != "FAIL"; }
};

// Order-property checks on random inputs. Each throws HypothesisViolation when
// the configuration is outside the theorem's hypotheses.
OrderReport positivity_report(const BoundarySemigroup& sg, const std::vector<double>& t_list, int trials,
                              std::uint64_t seed = 1);
OrderReport submarkov_report(const BoundarySemigroup& sg, const std::vector<double>& t_list, int trials,
                             std::uint64_t seed = 1);
// Γ0 ⊆ Γ̃0: 0 <= T̃_t φ <= T_t φ. `a` carries Γ0, `b` carries Γ̃0.
OrderReport domination_report(const AssembledSystem& a, const AssembledSystem& b,
                              const std::vector<double>& t_list, int trials, std::uint64_t seed = 1);
// a0 <= b0: 0 <= T^{b0}_t φ <= T^{a0}_t φ.
OrderReport potential_monotonicity_report(const AssembledSystem& a, const AssembledSystem& b,
                                          const std::vector<double>& t_list, int trials,
                                          std::uint64_t seed = 1);

struct LpRow {
  double p = 0.0;  // infinity for p = ∞
  double t = 0.0;
  double norm = 0.0;
  double bound = 0.0;
  std::string verdict;
};

// Weighted ℓ^p operator norms of T_t (weights: lumped boundary mass). p = 2 is
// measured in the Bb norm and bounded by e^{−w₀t}; p = 1 and ∞ by 1.
std::vector<LpRow> lp_contraction_report(const BoundarySemigroup& sg, const std::vector<double>& p_list,
                                         const std::vector<double>& t_list);

// max over trials and t of ‖T_t φ‖_Bb / (e^{−w₀t} ‖φ‖_Bb) − 1.
double growth_bound_excess(const BoundarySemigroup& sg, const std::vector<double>& t_list, int trials,
                           std::uint64_t seed = 1);

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace dtnlab

#include "dtnlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dtnlab/errors.hpp"
#include "dtnlab/parallel.hpp"

namespace dtnlab {

namespace {

void require_symmetric(const AssembledSystem& sys, const char* where) {
  if (!sys.certificate.symmetric) {
    throw InvalidInput(std::string(where) + " assumes symmetric coefficients (codrift = drift, a_kj = a_jk)");
  }
}

// Max row sum; bounds the spectral norm of a symmetric matrix.
double inf_norm(const MatrixXd& m) { return m.rows() ? m.cwiseAbs().rowwise().sum().maxCoeff() : 0.0; }

// The Robin pencil (A − μB, M) reduced once by the Cholesky factor of M:
// C(μ) = L⁻¹ (A − μB) L⁻ᵀ.
class RobinPencil {
public:
  explicit RobinPencil(const AssembledSystem& sys) {
    const MatrixXd m = dense(sys.M);
    llt_.compute(m);
    if (llt_.info() != Eigen::Success) throw NotPositiveDefinite("mass matrix is not positive definite");
    ca_ = reduce(dense(sys.A));
    cb_ = reduce(dense(sys.B));
  }

  MatrixXd reduced(double mu) const { return ca_ - mu * cb_; }

  VectorXd values(double mu) const {
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(reduced(mu), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("Robin eigensolver failed at μ = " + std::to_string(mu), NAN);
    return es.eigenvalues();
  }

  // The `count` eigenvectors of C(μ) with eigenvalues nearest `lambda`
  // (M-orthonormal after back-transformation), by subspace inverse iteration
  // with a Rayleigh–Ritz step.
  MatrixXd vectors_near(double mu, double lambda, int count) const {
    const MatrixXd c = reduced(mu);
    const auto n = c.rows();
    const int p = std::min<int>(static_cast<int>(n), count + 2);
    // Shift slightly off λ so the factorization is not exactly singular.
    const double shift = lambda + 1e-9 * std::max(1.0, std::abs(lambda));
    const Eigen::PartialPivLU<MatrixXd> lu(c - shift * MatrixXd::Identity(n, n));
    MatrixXd y = MatrixXd::Zero(n, p);
    for (int j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) y(i, j) = std::sin(1.0 + 0.7 * i + 1.3 * j * (i % 7));
    }
    for (int it = 0; it < 4; ++it) {
      y = lu.solve(y);
      y = Eigen::HouseholderQR<MatrixXd>(y).householderQ() * MatrixXd::Identity(n, p);
    }
    const MatrixXd h = y.transpose() * c * y;
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (h + h.transpose()));
    // Ritz values closest to λ.
    std::vector<int> order(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()(a) - lambda) < std::abs(es.eigenvalues()(b) - lambda);
    });
    MatrixXd out(n, count);
    for (int i = 0; i < count; ++i) out.col(i) = y * es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    return llt_.matrixU().solve(out);
  }

private:
  MatrixXd reduce(const MatrixXd& k) const {
    MatrixXd c = llt_.matrixL().solve(k);
    c = llt_.matrixL().solve(c.transpose()).transpose();
    return 0.5 * (c + c.transpose());
  }

  Eigen::LLT<MatrixXd> llt_;
  MatrixXd ca_;
  MatrixXd cb_;
};

// Orthonormal basis (in the Bb inner product) of the columns of x.
MatrixXd bb_orthonormal(const MatrixXd& x, const MatrixXd& bb) {
  const MatrixXd g = x.transpose() * bb * x;
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (g + g.transpose()));
  const double top = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 1e-12 * top && es.eigenvalues()(i) > 0.0) keep.push_back(static_cast<int>(i));
  }
  MatrixXd q(x.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    q.col(static_cast<Eigen::Index>(j)) =
        x * es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()(keep[j]));
  }
  return q;
}

}  // namespace

Spectrum dirichlet_spectrum(const AssembledSystem& sys, int k) {
  require_symmetric(sys, "dirichlet_spectrum");
  const auto dir = dirichlet_system(sys);
  return sym_geneig(dir.A, dir.M, k);
}

Spectrum robin_spectrum(const AssembledSystem& sys, double mu, int k) {
  require_symmetric(sys, "robin_spectrum");
  return sym_geneig(dense(robin_matrix(sys, mu)), dense(sys.M), k);
}

Spectrum steklov_spectrum(const AssembledSystem& sys, double lambda, int k) {
  require_symmetric(sys, "steklov_spectrum");
  const DtnMatrix dtn = dtn_matrix(sys, lambda);
  return sym_geneig(dtn.S, dtn.Bb, k);
}

std::vector<DualityReport> duality_check_all(const AssembledSystem& sys, double lambda) {
  require_symmetric(sys, "duality_check");
  const InteriorSolver solver(sys, lambda);
  const DtnMatrix dtn = dtn_matrix(sys, lambda);
  const Spectrum stek = sym_geneig(dtn.S, dtn.Bb);
  const RobinPencil pencil(sys);
  const MatrixXd a = dense(sys.A);
  const MatrixXd m = dense(sys.M);
  const MatrixXd b = dense(sys.B);
  const double a_norm = inf_norm(a);
  const double s_norm = std::max(inf_norm(dtn.S), 1e-300);

  const auto groups = clusters(stek.eigenvalues, kClusterTol);
  std::vector<DualityReport> out(static_cast<std::size_t>(stek.eigenvalues.size()));
  parallel_for(groups.size(), [&](std::size_t g) {
    const auto& group = groups[g];
    // Robin branches are non-increasing in μ, so the number of them crossing
    // λ inside the cluster window is a difference of counting functions.
    const double mu_lo = stek.eigenvalues(group.front());
    const double mu_hi = stek.eigenvalues(group.back());
    const double tau = 0.5 * kClusterTol * std::max({1.0, std::abs(mu_lo), std::abs(mu_hi)});
    const int mult = count_below(pencil.values(mu_hi + tau), lambda) - count_below(pencil.values(mu_lo - tau), lambda);

    for (int j : group) {
      DualityReport rep;
      rep.lambda = lambda;
      rep.index = j + 1;
      rep.mu = stek.eigenvalues(j);
      const auto ext = harmonic_extension(solver, sys, stek.eigenvectors.col(j));
      const VectorXd res = a * ext.u - lambda * (m * ext.u) - rep.mu * (b * ext.u);
      rep.forward_residual = res.norm() / (a_norm * ext.u.norm());
      // Robin eigenvector at μ_j with eigenvalue nearest λ, traced back to the boundary.
      const VectorXd vb = gather(pencil.vectors_near(rep.mu, lambda, 1).col(0), sys.boundary_dofs);
      rep.reverse_residual =
          (dtn.S * vb - rep.mu * (dtn.Bb * vb)).norm() / (s_norm * std::max(vb.norm(), 1e-300));
      rep.steklov_multiplicity = static_cast<int>(group.size());
      rep.robin_multiplicity = mult;
      rep.multiplicity_match = rep.steklov_multiplicity == rep.robin_multiplicity;
      out[static_cast<std::size_t>(j)] = rep;
    }
  });
  return out;
}

DualityReport duality_check(const AssembledSystem& sys, double lambda, int j) {
  const auto nb = static_cast<int>(sys.boundary_dofs.size());
  if (j < 1 || j > nb) {
    throw InvalidInput("Steklov index " + std::to_string(j) + " outside 1.." + std::to_string(nb));
  }
  return duality_check_all(sys, lambda)[static_cast<std::size_t>(j - 1)];
}

EigenCurve eigen_curves(const AssembledSystem& sys, double mu_min, double mu_max, int steps, int k) {
  require_symmetric(sys, "eigen_curves");
  if (steps < 2) throw InvalidInput("eigen_curves needs steps >= 2");
  if (!(mu_max > mu_min)) throw InvalidInput("eigen_curves needs mu_max > mu_min");
  if (k < 1 || k > sys.num_dofs()) throw InvalidInput("eigen_curves: k out of range");
  const RobinPencil pencil(sys);
  EigenCurve curve;
  curve.values.resize(k, steps);
  curve.clusters.resize(static_cast<std::size_t>(steps));
  for (int s = 0; s < steps; ++s) {
    curve.mu_grid.push_back(mu_min + (mu_max - mu_min) * s / (steps - 1));
  }
  parallel_for(static_cast<std::size_t>(steps), [&](std::size_t s) {
    VectorXd vals;
    try {
      vals = pencil.values(curve.mu_grid[s]);
    } catch (const Error& e) {
      throw Error("eigen_curves failed at μ = " + std::to_string(curve.mu_grid[s]) + ": " + e.what());
    }
    curve.values.col(static_cast<Eigen::Index>(s)) = vals.head(k);
    curve.clusters[s] = clusters(vals.head(k), kClusterTol);
  });
  curve.max_increase = -std::numeric_limits<double>::infinity();
  curve.min_decrease_margin = std::numeric_limits<double>::infinity();
  for (int r = 0; r < k; ++r) {
    for (int s = 0; s + 1 < steps; ++s) {
      const double d = curve.values(r, s + 1) - curve.values(r, s);
      curve.max_increase = std::max(curve.max_increase, d);
      curve.min_decrease_margin = std::min(curve.min_decrease_margin, -d);
    }
  }
  return curve;
}

LimitTable dirichlet_limit_study(const AssembledSystem& sys, int k, const std::vector<double>& mu_list) {
  LimitTable t;
  t.dirichlet = dirichlet_spectrum(sys, k).eigenvalues;
  const RobinPencil pencil(sys);
  t.all_positive = true;
  t.monotone = true;
  for (double mu : mu_list) {
    const VectorXd vals = pencil.values(mu);
    LimitRow row;
    row.mu = mu;
    for (int i = 0; i < k; ++i) {
      row.gaps.push_back(t.dirichlet(i) - vals(i));
      if (!(row.gaps.back() > 0.0)) t.all_positive = false;
    }
    t.rows.push_back(std::move(row));
  }
  t.ratios.assign(static_cast<std::size_t>(k), {});
  for (std::size_t r = 0; r + 1 < t.rows.size(); ++r) {
    for (int i = 0; i < k; ++i) {
      const double g0 = t.rows[r].gaps[static_cast<std::size_t>(i)];
      const double g1 = t.rows[r + 1].gaps[static_cast<std::size_t>(i)];
      t.ratios[static_cast<std::size_t>(i)].push_back(g0 / g1);
      if (!(g1 < g0)) t.monotone = false;
    }
  }
  return t;
}

MatchReport match_and_unitary(const AssembledSystem& a, const AssembledSystem& b, double mu, int k, double tol) {
  if (a.num_dofs() != b.num_dofs() || a.boundary_dofs != b.boundary_dofs || a.dof_vertex != b.dof_vertex) {
    throw InvalidInput("match_and_unitary: systems do not share the dof layout");
  }
  const Spectrum sa = robin_spectrum(a, mu, k);
  const Spectrum sb = robin_spectrum(b, mu, k);
  MatchReport rep;
  rep.lambda_a = sa.eigenvalues;
  rep.lambda_b = sb.eigenvalues;
  rep.gaps = sb.eigenvalues - sa.eigenvalues;
  for (int i = 0; i < k; ++i) {
    rep.mismatch.push_back(std::abs(rep.gaps(i)) > tol * std::max(1.0, std::abs(sa.eigenvalues(i))));
  }

  const MatrixXd ma = dense(a.M);
  const MatrixXd mb = dense(b.M);
  rep.U = sb.eigenvectors * sa.eigenvectors.transpose() * ma;
  const MatrixXd mapped = rep.U * sa.eigenvectors;
  rep.orthogonality_defect =
      max_abs(mapped.transpose() * mb * mapped - MatrixXd::Identity(k, k));
  const MatrixXd lb = dense(robin_matrix(b, mu));
  const MatrixXd conj = mapped.transpose() * lb * mapped;
  const double scale = std::max(1.0, sa.eigenvalues.cwiseAbs().maxCoeff());
  rep.conjugation_residual = max_abs(conj - MatrixXd(sa.eigenvalues.asDiagonal())) / scale;

  // Cluster alignment and Γ1 trace subspaces.
  const auto ca = clusters(sa.eigenvalues, kClusterTol);
  const auto cb = clusters(sb.eigenvalues, kClusterTol);
  const MatrixXd bb = submatrix(dense(a.B), a.boundary_dofs, a.boundary_dofs);
  std::size_t jb = 0;
  for (const auto& group : ca) {
    ClusterMatch cm;
    cm.first_index = group.front();
    cm.size_a = static_cast<int>(group.size());
    while (jb < cb.size() && cb[jb].front() < group.front()) ++jb;
    if (jb < cb.size() && cb[jb].front() == group.front()) {
      cm.size_b = static_cast<int>(cb[jb].size());
    }
    cm.ambiguous = cm.size_a != cm.size_b;
    const int m = cm.size_a;
    MatrixXd ta(static_cast<Eigen::Index>(a.boundary_dofs.size()), m);
    MatrixXd tb(ta.rows(), m);
    for (int c = 0; c < m; ++c) {
      ta.col(c) = gather(sa.eigenvectors.col(group.front() + c), a.boundary_dofs);
      tb.col(c) = gather(sb.eigenvectors.col(group.front() + c), b.boundary_dofs);
    }
    const MatrixXd qa = bb_orthonormal(ta, bb);
    const MatrixXd qb = bb_orthonormal(tb, bb);
    if (qa.cols() > 0 && qa.cols() == qb.cols()) {
      const Eigen::JacobiSVD<MatrixXd> svd(qa.transpose() * bb * qb);
      const double smin = std::min(1.0, svd.singularValues().minCoeff());
      cm.trace_angle_sin = std::sqrt(std::max(0.0, 1.0 - smin * smin));
    } else if (qa.cols() != qb.cols()) {
      cm.trace_angle_sin = 1.0;
    }
    rep.clusters.push_back(cm);
  }

  rep.counting_consistent = true;
  for (int i = 0; i + 1 < k; ++i) {
    const double probe = 0.5 * (sa.eigenvalues(i) + sa.eigenvalues(i + 1));
    if (count_below(sa.eigenvalues, probe) != count_below(sb.eigenvalues, probe)) rep.counting_consistent = false;
  }
  return rep;
}

DtnEqualityReport dtn_equality_check(const AssembledSystem& a, const AssembledSystem& b,
                                     const std::vector<double>& lambda_list) {
  if (a.boundary_dofs.size() != b.boundary_dofs.size()) throw InvalidInput("dtn_equality_check: boundary dof mismatch");
  DtnEqualityReport r;
  r.lambdas = lambda_list;
  r.defects.assign(lambda_list.size(), 0.0);
  parallel_for(lambda_list.size(), [&](std::size_t i) {
    r.defects[i] = max_abs(dtn_matrix(a, lambda_list[i]).S - dtn_matrix(b, lambda_list[i]).S);
  });
  for (double d : r.defects) r.max_defect = std::max(r.max_defect, d);
  return r;
}

std::vector<double> spectral_gap_points(const AssembledSystem& sys, int count) {
  if (count < 1) return {};
  const auto dir = dirichlet_system(sys);
  const Spectrum sp = sym_geneig(dir.A, dir.M);
  const auto groups = clusters(sp.eigenvalues, kClusterTol);
  std::vector<double> out;
  const double first = sp.eigenvalues(0);
  out.push_back(first > 0.0 ? 0.5 * first : first - 1.0);
  for (std::size_t g = 0; g + 1 < groups.size() && static_cast<int>(out.size()) < count; ++g) {
    out.push_back(0.5 * (sp.eigenvalues(groups[g].back()) + sp.eigenvalues(groups[g + 1].front())));
  }
  return out;
}

GaugeStudy gauge_study(const Mesh& mesh, const BoundaryPartition& part, const CoefficientSet& a,
                       const Diffeo& phi, int refinements, const std::vector<double>& lambda_list,
                       const std::vector<double>& mu_list, int k) {
  if (refinements < 0) throw InvalidInput("gauge_study needs refinements >= 0");
  const CoefficientSet b = pullback(a, phi);
  GaugeStudy study;
  Mesh m = mesh;
  BoundaryPartition p = part;
  for (int level = 0; level <= refinements; ++level) {
    validate_diffeo(phi, m);
    const AssembledSystem sa = assemble(m, p, a);
    const AssembledSystem sb = assemble(m, p, b);
    GaugeLevel lv;
    lv.level = level;
    lv.h_max = m.h_max();
    lv.dtn_defect = dtn_equality_check(sa, sb, lambda_list).max_defect;
    for (double mu : mu_list) {
      const VectorXd la = robin_spectrum(sa, mu, k).eigenvalues;
      const VectorXd lb = robin_spectrum(sb, mu, k).eigenvalues;
      lv.robin_gap_per_mu.push_back((la - lb).cwiseAbs().maxCoeff());
      lv.robin_gap = std::max(lv.robin_gap, lv.robin_gap_per_mu.back());
    }
    if (level == 0) {
      const double mu0 = mu_list.empty() ? 0.0 : mu_list.front();
      study.identity_conjugation_residual = match_and_unitary(sa, sa, mu0, k).conjugation_residual;
    }
    study.levels.push_back(std::move(lv));
    if (level < refinements) std::tie(m, p) = refine(m, p);
  }
  return study;
}

}  // namespace dtnlab

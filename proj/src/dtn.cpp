#include "dtnlab/dtn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dtnlab/errors.hpp"
#include "dtnlab/linalg.hpp"

namespace dtnlab {

InteriorSolver::InteriorSolver(const AssembledSystem& sys, double lambda) : lambda_(lambda) {
  shifted_ = dense(sys.A) - lambda * dense(sys.M);
  if (sys.interior_dofs.empty()) {
    cond_ = 1.0;
    return;
  }
  const MatrixXd block = submatrix(shifted_, sys.interior_dofs, sys.interior_dofs);
  lu_.compute(block);
  const double rcond = lu_.rcond();
  cond_ = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!std::isfinite(cond_) || cond_ > kDirichletConditionLimit) {
    throw NearDirichletSpectrum("λ = " + std::to_string(lambda) +
                                    " is numerically in the Dirichlet spectrum (condition estimate " +
                                    std::to_string(cond_) + ")",
                                lambda);
  }
}

VectorXd InteriorSolver::solve(const VectorXd& rhs) const {
  if (rhs.size() == 0) return rhs;
  return lu_.solve(rhs);
}

MatrixXd InteriorSolver::solve(const MatrixXd& rhs) const {
  if (rhs.rows() == 0) return rhs;
  return lu_.solve(rhs);
}

HarmonicExtensionResult harmonic_extension(const InteriorSolver& solver, const AssembledSystem& sys,
                                           const VectorXd& phi) {
  if (phi.size() != static_cast<Eigen::Index>(sys.boundary_dofs.size())) {
    throw InvalidInput("boundary vector has the wrong length");
  }
  const MatrixXd& s = solver.shifted();
  const MatrixXd ib = submatrix(s, sys.interior_dofs, sys.boundary_dofs);
  const VectorXd ui = -solver.solve(VectorXd(ib * phi));
  HarmonicExtensionResult r;
  r.u = VectorXd::Zero(sys.num_dofs());
  for (std::size_t i = 0; i < sys.boundary_dofs.size(); ++i) r.u(sys.boundary_dofs[i]) = phi(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < sys.interior_dofs.size(); ++i) r.u(sys.interior_dofs[i]) = ui(static_cast<Eigen::Index>(i));
  const VectorXd res = s * r.u;
  for (int d : sys.interior_dofs) r.residual_interior = std::max(r.residual_interior, std::abs(res(d)));
  return r;
}

HarmonicExtensionResult harmonic_extension(const AssembledSystem& sys, double lambda, const VectorXd& phi) {
  return harmonic_extension(InteriorSolver(sys, lambda), sys, phi);
}

DtnMatrix dtn_matrix(const AssembledSystem& sys, double lambda) {
  const InteriorSolver solver(sys, lambda);
  const MatrixXd& s = solver.shifted();
  const auto& bd = sys.boundary_dofs;
  const auto& id = sys.interior_dofs;
  DtnMatrix out;
  out.lambda = lambda;
  out.cond_interior = solver.condition();
  out.S = submatrix(s, bd, bd);
  if (!id.empty()) {
    const MatrixXd ib = submatrix(s, id, bd);
    const MatrixXd bi = submatrix(s, bd, id);
    out.S -= bi * solver.solve(ib);
  }
  out.Bb = submatrix(dense(sys.B), bd, bd);
  return out;
}

MatrixXd embed_in_boundary(const AssembledSystem& sys, const MatrixXd& s) {
  const auto nb = static_cast<Eigen::Index>(sys.boundary_vertices.size());
  std::vector<int> pos;  // position of each Γ1 dof within boundary_vertices
  for (int d : sys.boundary_dofs) {
    const int v = sys.dof_vertex[static_cast<std::size_t>(d)];
    const auto it = std::lower_bound(sys.boundary_vertices.begin(), sys.boundary_vertices.end(), v);
    pos.push_back(static_cast<int>(it - sys.boundary_vertices.begin()));
  }
  MatrixXd out = MatrixXd::Zero(nb, nb);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = 0; j < pos.size(); ++j) {
      out(pos[i], pos[j]) = s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

Decomposition decompose(const AssembledSystem& sys, double lambda, const VectorXd& u) {
  if (u.size() != sys.num_dofs()) throw InvalidInput("free-dof vector has the wrong length");
  Decomposition d;
  d.harmonic = harmonic_extension(sys, lambda, gather(u, sys.boundary_dofs));
  d.u0 = u - d.harmonic.u;
  for (int b : sys.boundary_dofs) d.u0(b) = 0.0;
  return d;
}

CoercivityReport coercivity_report(const AssembledSystem& sys, double lambda, int trials,
                                   std::uint64_t seed, std::optional<double> fixed_w, double w_margin) {
  if (trials < 1) throw InvalidInput("coercivity_report needs at least one trial");
  const InteriorSolver solver(sys, lambda);
  const DtnMatrix dtn = dtn_matrix(sys, lambda);
  const MatrixXd h1 = dense(sys.K) + dense(sys.M);
  const auto nb = dtn.S.rows();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<VectorXd> phis;
  std::vector<double> q, b, n;
  for (int t = 0; t < trials; ++t) {
    VectorXd phi(nb);
    for (Eigen::Index i = 0; i < nb; ++i) phi(i) = normal(rng);
    const auto ext = harmonic_extension(solver, sys, phi);
    q.push_back(phi.dot(dtn.S * phi));
    b.push_back(phi.dot(dtn.Bb * phi));
    n.push_back(ext.u.dot(h1 * ext.u));
    phis.push_back(std::move(phi));
  }

  CoercivityReport r;
  r.trials = trials;
  if (fixed_w) {
    r.w_est = *fixed_w;
  } else {
    double w = 0.0;
    for (int t = 0; t < trials; ++t) w = std::max(w, -q[t] / b[t]);
    r.w_est = w + w_margin;
  }
  r.delta_est = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) r.delta_est = std::min(r.delta_est, (q[t] + r.w_est * b[t]) / n[t]);
  for (int t = 0; t < trials; ++t) {
    for (int s = t + 1; s < trials; ++s) {
      const double num = std::abs(phis[t].dot(dtn.S * phis[s]));
      const double den = std::sqrt((q[t] + r.w_est * b[t]) * (q[s] + r.w_est * b[s]));
      r.M_est = std::max(r.M_est, num / den);
    }
  }
  if (trials == 1) r.M_est = std::abs(q[0]) / (q[0] + r.w_est * b[0]);
  return r;
}

SmoothnessReport smoothness_check(const AssembledSystem& sys, double lambda, double dlambda) {
  if (!(dlambda > 0.0)) throw InvalidInput("smoothness_check needs dlambda > 0");
  if (!sys.interior_dofs.empty()) {
    const auto dir = dirichlet_system(sys);
    const Spectrum sp = sym_geneig(dir.A, dir.M);
    const double lo = lambda - dlambda, hi = lambda + dlambda;
    for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) {
      const double ev = sp.eigenvalues(i);
      if (ev >= lo - 1e-9 * std::max(1.0, std::abs(ev)) && ev <= hi + 1e-9 * std::max(1.0, std::abs(ev))) {
        throw NearDirichletSpectrum("[λ−h, λ+h] contains the Dirichlet eigenvalue " + std::to_string(ev), ev);
      }
    }
  }
  const MatrixXd s0 = dtn_matrix(sys, lambda).S;
  auto deriv = [&](double h) {
    const MatrixXd sp = dtn_matrix(sys, lambda + h).S;
    const MatrixXd sm = dtn_matrix(sys, lambda - h).S;
    return std::pair<MatrixXd, MatrixXd>{(sp - sm) / (2.0 * h), (sp - 2.0 * s0 + sm) / (h * h)};
  };
  const auto [d1, d2] = deriv(dlambda);
  const MatrixXd d1f = deriv(dlambda / 10.0).first;
  SmoothnessReport r;
  r.second_difference = max_abs(d2);
  r.derivative_norm = max_abs(d1);
  r.derivative_norm_fine = max_abs(d1f);
  r.richardson_ratio = r.derivative_norm / r.derivative_norm_fine;
  if (d1.rows() > 0) {
    const MatrixXd sym = 0.5 * (d1 + d1.transpose());
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    r.derivative_max_eig = es.eigenvalues().maxCoeff();
  }
  return r;
}

}  // namespace dtnlab

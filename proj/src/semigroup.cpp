#include "dtnlab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "dtnlab/dtn.hpp"
#include "dtnlab/errors.hpp"

namespace dtnlab {

BoundarySemigroup::BoundarySemigroup(const AssembledSystem& sys, double lambda)
    : lambda_(lambda), lumped_(sys.options.lump_boundary_mass), symmetric_(sys.certificate.symmetric) {
  const DtnMatrix dtn = dtn_matrix(sys, lambda);
  S_ = 0.5 * (dtn.S + dtn.S.transpose());
  Bb_ = dtn.Bb;
  spectrum_ = sym_geneig(S_, Bb_);

  full_size_ = sys.boundary_vertices.size();
  for (int d : sys.boundary_dofs) {
    const int v = sys.dof_vertex[static_cast<std::size_t>(d)];
    const auto it = std::lower_bound(sys.boundary_vertices.begin(), sys.boundary_vertices.end(), v);
    gamma1_pos_.push_back(static_cast<int>(it - sys.boundary_vertices.begin()));
  }

  dirichlet_min_ = std::numeric_limits<double>::infinity();
  if (!sys.interior_dofs.empty()) {
    const auto dir = dirichlet_system(sys);
    dirichlet_min_ = sym_geneig(dir.A, dir.M, 1).eigenvalues(0) - lambda;
  }
  a0_min_ = std::numeric_limits<double>::infinity();
  for (const auto& s : sys.samples) {
    a0_min_ = std::min(a0_min_, s.a0);
    drift_max_ = std::max({drift_max_, s.drift.cwiseAbs().maxCoeff(), s.codrift.cwiseAbs().maxCoeff()});
  }
  strict_ = lumped_ && sys.mesh_nonobtuse && sys.constant_coefficients();
}

MatrixXd BoundarySemigroup::matrix(double t) const {
  if (t < 0.0) throw InvalidInput("semigroup time must be nonnegative");
  const VectorXd decay = (-t * spectrum_.eigenvalues.array()).exp();
  const MatrixXd& v = spectrum_.eigenvectors;
  return v * decay.asDiagonal() * v.transpose() * Bb_;
}

VectorXd BoundarySemigroup::restrict_to_gamma1(const VectorXd& full) const {
  if (full.size() != static_cast<Eigen::Index>(full_size_)) throw InvalidInput("boundary vector has the wrong length");
  VectorXd out(static_cast<Eigen::Index>(gamma1_pos_.size()));
  for (std::size_t i = 0; i < gamma1_pos_.size(); ++i) out(static_cast<Eigen::Index>(i)) = full(gamma1_pos_[i]);
  return out;
}

VectorXd BoundarySemigroup::extend_by_zero(const VectorXd& g1) const {
  VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(full_size_));
  for (std::size_t i = 0; i < gamma1_pos_.size(); ++i) out(gamma1_pos_[i]) = g1(static_cast<Eigen::Index>(i));
  return out;
}

VectorXd BoundarySemigroup::evolve(const VectorXd& phi0, double t) const {
  if (t < 0.0) throw InvalidInput("semigroup time must be nonnegative");
  const VectorXd g = restrict_to_gamma1(phi0);
  const MatrixXd& v = spectrum_.eigenvectors;
  const VectorXd coeff = v.transpose() * (Bb_ * g);
  const VectorXd decay = (-t * spectrum_.eigenvalues.array()).exp();
  return extend_by_zero(v * decay.cwiseProduct(coeff));
}

namespace {

void require_positivity_hypotheses(const BoundarySemigroup& sg) {
  if (!sg.symmetric()) throw HypothesisViolation("order properties need symmetric coefficients");
  if (sg.dirichlet_min() < -1e-10) {
    throw HypothesisViolation("L^D − λ is not accretive (smallest Dirichlet eigenvalue " +
                              std::to_string(sg.dirichlet_min()) + ")");
  }
}

void require_submarkov_hypotheses(const BoundarySemigroup& sg) {
  require_positivity_hypotheses(sg);
  if (sg.a0_min() - sg.lambda() < 0.0) throw HypothesisViolation("sub-Markov property needs a0 − λ >= 0");
  if (sg.drift_max() != 0.0) throw HypothesisViolation("sub-Markov property needs zero drift");
}

// Nonnegative random boundary data: indicators, [0,1] noise, and sparse noise.
VectorXd random_nonnegative(std::mt19937_64& rng, std::size_t size, const std::vector<int>& support, int trial) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  VectorXd phi = VectorXd::Zero(static_cast<Eigen::Index>(size));
  if (support.empty()) return phi;
  switch (trial % 3) {
    case 0: {
      std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
      phi(support[pick(rng)]) = 1.0;
      break;
    }
    case 1:
      for (std::size_t i = 0; i < size; ++i) phi(static_cast<Eigen::Index>(i)) = unif(rng);
      break;
    default:
      for (std::size_t i = 0; i < size; ++i) {
        phi(static_cast<Eigen::Index>(i)) = unif(rng) < 0.3 ? unif(rng) : 0.0;
      }
      break;
  }
  if (phi.maxCoeff() == 0.0) phi(support.front()) = 1.0;
  return phi;
}

std::string verdict_for(double violation, bool strict) {
  if (violation <= kPositivityTol) return "PASS";
  return strict ? "FAIL" : "WARN";
}

void finish(OrderReport& r) {
  r.verdict = "PASS";
  r.min_entry = std::numeric_limits<double>::infinity();
  for (const auto& row : r.rows) {
    r.min_entry = std::min(r.min_entry, row.min_entry);
    r.max_violation = std::max(r.max_violation, row.violation);
    if (row.verdict == "FAIL") r.verdict = "FAIL";
    if (row.verdict == "WARN" && r.verdict == "PASS") r.verdict = "WARN";
  }
}

// Full boundary indices covered by Γ1 of `sg`.
std::vector<int> support_of(const BoundarySemigroup& sg) { return sg.gamma1_positions(); }

}  // namespace

OrderReport positivity_report(const BoundarySemigroup& sg, const std::vector<double>& t_list, int trials,
                              std::uint64_t seed) {
  require_positivity_hypotheses(sg);
  std::mt19937_64 rng(seed);
  OrderReport r;
  for (int trial = 0; trial < trials; ++trial) {
    const VectorXd phi = random_nonnegative(rng, sg.full_size(), support_of(sg), trial);
    const double scale = phi.cwiseAbs().maxCoeff();
    for (double t : t_list) {
      const VectorXd out = sg.evolve(phi, t);
      ReportRow row{"positivity", t, trial, out.minCoeff(), out.maxCoeff(), 0.0, ""};
      row.violation = std::max(0.0, -row.min_entry) / scale;
      row.verdict = verdict_for(row.violation, sg.strict_setting());
      r.rows.push_back(row);
    }
  }
  finish(r);
  return r;
}

OrderReport submarkov_report(const BoundarySemigroup& sg, const std::vector<double>& t_list, int trials,
                             std::uint64_t seed) {
  require_submarkov_hypotheses(sg);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  OrderReport r;
  for (int trial = 0; trial < trials; ++trial) {
    VectorXd phi(static_cast<Eigen::Index>(sg.full_size()));
    if (trial == 0) {
      phi.setOnes();
    } else {
      for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = unif(rng);
    }
    for (double t : t_list) {
      const VectorXd out = sg.evolve(phi, t);
      ReportRow row{"submarkov", t, trial, out.minCoeff(), out.maxCoeff(), 0.0, ""};
      row.violation = std::max({0.0, -row.min_entry, row.max_entry - 1.0});
      row.verdict = verdict_for(row.violation, sg.strict_setting());
      r.rows.push_back(row);
    }
  }
  finish(r);
  return r;
}

namespace {

OrderReport compare_semigroups(const char* name, const BoundarySemigroup& upper, const BoundarySemigroup& lower,
                               const std::vector<double>& t_list, int trials, std::uint64_t seed) {
  if (upper.full_size() != lower.full_size()) throw InvalidInput("semigroups live on different boundaries");
  std::mt19937_64 rng(seed);
  OrderReport r;
  const bool strict = upper.strict_setting() && lower.strict_setting();
  for (int trial = 0; trial < trials; ++trial) {
    const VectorXd phi = random_nonnegative(rng, upper.full_size(), support_of(upper), trial);
    const double scale = phi.cwiseAbs().maxCoeff();
    for (double t : t_list) {
      const VectorXd hi = upper.evolve(phi, t);
      const VectorXd lo = lower.evolve(phi, t);
      ReportRow row{name, t, trial, lo.minCoeff(), (lo - hi).maxCoeff(), 0.0, ""};
      row.violation = std::max({0.0, -lo.minCoeff(), (lo - hi).maxCoeff()}) / scale;
      row.verdict = verdict_for(row.violation, strict);
      r.rows.push_back(row);
    }
  }
  finish(r);
  return r;
}

}  // namespace

OrderReport domination_report(const AssembledSystem& a, const AssembledSystem& b, const std::vector<double>& t_list,
                              int trials, std::uint64_t seed) {
  if (a.boundary_vertices != b.boundary_vertices || a.dof_map.size() != b.dof_map.size()) {
    throw InvalidInput("domination_report: systems are not on the same mesh");
  }
  if (!std::includes(b.gamma0_edges.begin(), b.gamma0_edges.end(), a.gamma0_edges.begin(), a.gamma0_edges.end())) {
    throw InvalidInput("domination_report: partitions are not nested (Γ0 ⊄ Γ̃0)");
  }
  const BoundarySemigroup sa(a), sb(b);
  require_positivity_hypotheses(sa);
  require_positivity_hypotheses(sb);
  return compare_semigroups("domination", sa, sb, t_list, trials, seed);
}

OrderReport potential_monotonicity_report(const AssembledSystem& a, const AssembledSystem& b,
                                          const std::vector<double>& t_list, int trials, std::uint64_t seed) {
  if (a.samples.size() != b.samples.size() || a.dof_vertex != b.dof_vertex) {
    throw InvalidInput("potential_monotonicity_report: systems are not on the same mesh and partition");
  }
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const auto& sa = a.samples[i];
    const auto& sb = b.samples[i];
    if (sa.a != sb.a) throw HypothesisViolation("potential monotonicity needs identical principal parts");
    if (sa.drift.cwiseAbs().maxCoeff() != 0.0 || sb.drift.cwiseAbs().maxCoeff() != 0.0 ||
        sa.codrift.cwiseAbs().maxCoeff() != 0.0 || sb.codrift.cwiseAbs().maxCoeff() != 0.0) {
      throw HypothesisViolation("potential monotonicity needs zero drift");
    }
    if (sb.a0 < sa.a0) throw HypothesisViolation("potential ordering a0 <= b0 fails at a quadrature node");
  }
  const BoundarySemigroup ga(a), gb(b);
  require_positivity_hypotheses(ga);
  require_positivity_hypotheses(gb);
  return compare_semigroups("potential", ga, gb, t_list, trials, seed);
}

std::vector<LpRow> lp_contraction_report(const BoundarySemigroup& sg, const std::vector<double>& p_list,
                                         const std::vector<double>& t_list) {
  require_submarkov_hypotheses(sg);
  const VectorXd w = sg.Bb().rowwise().sum();
  const Eigen::LLT<MatrixXd> llt(sg.Bb());
  std::vector<LpRow> rows;
  for (double p : p_list) {
    for (double t : t_list) {
      const MatrixXd tm = sg.matrix(t);
      LpRow row;
      row.p = p;
      row.t = t;
      if (p == 1.0) {
        // max_j Σ_i w_i |T_ij| / w_j
        double best = 0.0;
        for (Eigen::Index j = 0; j < tm.cols(); ++j) {
          best = std::max(best, w.cwiseProduct(tm.col(j).cwiseAbs()).sum() / w(j));
        }
        row.norm = best;
        row.bound = 1.0;
      } else if (std::isinf(p)) {
        row.norm = tm.cwiseAbs().rowwise().sum().maxCoeff();
        row.bound = 1.0;
      } else if (p == 2.0) {
        // ‖Lᵀ T L⁻ᵀ‖₂ with Bb = L Lᵀ.
        const MatrixXd lt = llt.matrixU();
        const MatrixXd x = lt * tm * lt.inverse();
        row.norm = Eigen::JacobiSVD<MatrixXd>(x).singularValues()(0);
        row.bound = std::exp(-sg.w0() * t);
      } else {
        throw InvalidInput("lp_contraction_report supports p in {1, 2, inf}");
      }
      row.verdict = row.norm <= row.bound + kPositivityTol ? "PASS" : (sg.strict_setting() ? "FAIL" : "WARN");
      rows.push_back(row);
    }
  }
  return rows;
}

double growth_bound_excess(const BoundarySemigroup& sg, const std::vector<double>& t_list, int trials,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    VectorXd phi(static_cast<Eigen::Index>(sg.full_size()));
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = normal(rng);
    const VectorXd g = sg.restrict_to_gamma1(phi);
    const double n0 = std::sqrt(g.dot(sg.Bb() * g));
    for (double t : t_list) {
      const VectorXd out = sg.restrict_to_gamma1(sg.evolve(phi, t));
      const double n1 = std::sqrt(out.dot(sg.Bb() * out));
      worst = std::max(worst, n1 / (std::exp(-sg.w0() * t) * n0) - 1.0);
    }
  }
  return worst;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "check,t,trial,min_entry,max_entry,violation,verdict\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%d,%.17g,%.17g,%.17g,%s\n", r.check.c_str(), r.t, r.trial,
                  r.min_entry, r.max_entry, r.violation, r.verdict.c_str());
    out << buf;
  }
}

}  // namespace dtnlab

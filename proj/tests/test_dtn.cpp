#include <cmath>
#include <random>

#include "doctest.h"
#include "dtnlab/dtn.hpp"
#include "dtnlab/errors.hpp"
#include "dtnlab/spectral.hpp"

using namespace dtnlab;

namespace {

AssembledSystem square(int n, std::vector<int> g0, const CoefficientSet& c = CoefficientSet()) {
  const Mesh m = build_structured_square(n);
  return assemble(m, partition_by_sides(m, g0), c);
}

CoefficientSet variable_set() {
  const std::array<std::array<std::string, 2>, 2> a{{{"1 + 0.5*x*y", "0.2*sin(pi*x)"},
                                                      {"0.2*sin(pi*x)", "2 + cos(pi*y)"}}};
  const std::array<std::string, 2> drift{"0.3*y", "0"};
  return CoefficientSet::from_exprs(coefficient_exprs(a, drift, nullptr, "x - y"));
}

VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  VectorXd v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("harmonic extension") {
  const Mesh m = build_structured_square(6);
  const AssembledSystem s = assemble(m, partition_by_sides(m, std::vector<int>{3}), CoefficientSet());
  const auto nb = static_cast<Eigen::Index>(s.boundary_dofs.size());

  const HarmonicExtensionResult zero = harmonic_extension(s, 0.0, VectorXd::Zero(nb));
  CHECK(zero.u.cwiseAbs().maxCoeff() == 0.0);

  // u = x vanishes on Γ0 and is reproduced exactly
  const VectorXd x = interpolate(m, s, [](Point p) { return p.x; });
  const HarmonicExtensionResult h = harmonic_extension(s, 0.0, gather(x, s.boundary_dofs));
  CHECK((h.u - x).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(h.residual_interior < 1e-12);

  CHECK_THROWS_AS(harmonic_extension(s, 0.0, VectorXd::Zero(nb + 1)), InvalidInput);

  const Spectrum d = dirichlet_spectrum(s, 1);
  CHECK_THROWS_AS(harmonic_extension(s, d.eigenvalues(0), VectorXd::Ones(nb)), NearDirichletSpectrum);
}

TEST_CASE("D-t-N matrix") {
  SUBCASE("constants have zero conormal derivative") {
    const AssembledSystem s = square(5, {});
    const DtnMatrix d = dtn_matrix(s, 0.0);
    CHECK((d.S * VectorXd::Ones(d.S.rows())).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(symmetry_defect(d.S) <= 1e-12 * max_abs(d.S));
    CHECK(max_abs(d.Bb - submatrix(dense(s.B), s.boundary_dofs, s.boundary_dofs)) == 0.0);
  }
  SUBCASE("conormal derivative of x") {
    const Mesh m = build_structured_square(8);
    const AssembledSystem s = assemble(m, partition_by_sides(m, std::vector<int>{3}), CoefficientSet());
    const DtnMatrix d = dtn_matrix(s, 0.0);
    const VectorXd phi = gather(interpolate(m, s, [](Point p) { return p.x; }), s.boundary_dofs);
    const VectorXd psi = gather(interpolate(m, s, [](Point p) { return p.y * p.y; }), s.boundary_dofs);
    // ∫_{x=1} y² dy with the P1 interpolant of y²: trapezoid error h²/6
    const double h = 1.0 / 8.0;
    CHECK(psi.dot(d.S * phi) == doctest::Approx(1.0 / 3.0 + h * h / 6.0).epsilon(1e-12));
  }
  SUBCASE("Schur identity") {
    const AssembledSystem s = square(6, {0}, variable_set());
    std::mt19937_64 rng(5);
    for (double lambda : {-3.0, 4.0, 30.0}) {
      const DtnMatrix d = dtn_matrix(s, lambda);
      CHECK(symmetry_defect(d.S) <= 1e-12 * max_abs(d.S));
      for (int t = 0; t < 5; ++t) {
        const VectorXd phi = random_vector(rng, d.S.rows());
        const VectorXd u = harmonic_extension(s, lambda, phi).u;
        const MatrixXd shifted = dense(s.A) - lambda * dense(s.M);
        const double form = u.dot(shifted * u);
        CHECK(phi.dot(d.S * phi) == doctest::Approx(form).epsilon(1e-10));
      }
    }
  }
  SUBCASE("embedding in the full boundary") {
    const AssembledSystem s = square(4, {0});
    const DtnMatrix d = dtn_matrix(s, 1.0);
    const MatrixXd e = embed_in_boundary(s, d.S);
    CHECK(e.rows() == static_cast<Eigen::Index>(s.boundary_vertices.size()));
    CHECK(max_abs(e) == doctest::Approx(max_abs(d.S)));
    // five vertices of the bottom side carry zero rows
    int zero_rows = 0;
    for (Eigen::Index i = 0; i < e.rows(); ++i) zero_rows += e.row(i).cwiseAbs().maxCoeff() == 0.0;
    CHECK(zero_rows == 5);
  }
}

TEST_CASE("decomposition") {
  const AssembledSystem s = square(6, {0, 2}, variable_set());
  const double lambda = 2.0;
  std::mt19937_64 rng(9);
  const MatrixXd shifted = dense(s.A) - lambda * dense(s.M);
  for (int t = 0; t < 10; ++t) {
    const VectorXd u = random_vector(rng, s.num_dofs());
    const Decomposition d = decompose(s, lambda, u);
    CHECK((d.u0 + d.harmonic.u - u).cwiseAbs().maxCoeff() <= 1e-12 * u.cwiseAbs().maxCoeff());
    for (int b : s.boundary_dofs) CHECK(d.u0(b) == 0.0);
    const VectorXd r = shifted * d.harmonic.u;
    CHECK(gather(r, s.interior_dofs).cwiseAbs().maxCoeff() <= 1e-10 * max_abs(shifted) * u.cwiseAbs().maxCoeff());
  }

  const VectorXd harmonic = harmonic_extension(s, lambda, VectorXd::Ones(static_cast<Eigen::Index>(s.boundary_dofs.size()))).u;
  CHECK(decompose(s, lambda, harmonic).u0.cwiseAbs().maxCoeff() < 1e-13);

  VectorXd inner = VectorXd::Zero(s.num_dofs());
  for (int i : s.interior_dofs) inner(i) = 1.0;
  CHECK(decompose(s, lambda, inner).harmonic.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coercivity report") {
  const AssembledSystem s = square(6, {3});
  const CoercivityReport r = coercivity_report(s, 0.0, 100, 1);
  CHECK(r.trials == 100);
  CHECK(r.delta_est > 0.0);
  CHECK(r.w_est >= 0.0);
  CHECK(std::isfinite(r.M_est));
  CHECK(r.M_est > 0.0);

  // doubling a dominates the form: δ does not drop at equal w
  const AssembledSystem s2 = square(6, {3}, CoefficientSet().scaled_principal(2.0));
  const CoercivityReport r2 = coercivity_report(s2, 0.0, 100, 1, r.w_est);
  const CoercivityReport r1 = coercivity_report(s, 0.0, 100, 1, r.w_est);
  CHECK(r2.delta_est >= r1.delta_est);

  CHECK_THROWS_AS(coercivity_report(s, 0.0, 0), InvalidInput);
}

TEST_CASE("smoothness in λ") {
  const AssembledSystem s = square(6, {0});
  const SmoothnessReport a = smoothness_check(s, 0.0, 1e-2);
  const SmoothnessReport b = smoothness_check(s, 0.0, 1e-3);
  CHECK(std::isfinite(a.second_difference));
  CHECK(a.derivative_norm == doctest::Approx(b.derivative_norm).epsilon(1e-2));
  CHECK(std::abs(a.richardson_ratio - 1.0) < 0.05);
  // the quadratic form decreases in λ
  CHECK(a.derivative_max_eig <= 1e-10);

  const double l1 = dirichlet_spectrum(s, 1).eigenvalues(0);
  CHECK_THROWS_AS(smoothness_check(s, l1 - 0.5, 1.0), NearDirichletSpectrum);
  CHECK_THROWS_AS(smoothness_check(s, 0.0, 0.0), InvalidInput);
}

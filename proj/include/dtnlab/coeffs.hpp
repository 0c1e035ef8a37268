#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dtnlab/expr.hpp"
#include "dtnlab/mesh.hpp"

namespace dtnlab {

// Coefficients of the form
//   a(u,v) = ∫ Σ a_kj ∂_k u ∂_j v + (drift·∇u) v + u (codrift·∇v) + a0 u v dx
// evaluated at one point, plus the density of the L² inner product (1 unless
// the set was produced by a pullback).
struct CoefficientSample {
  Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
  Eigen::Vector2d drift = Eigen::Vector2d::Zero();
  Eigen::Vector2d codrift = Eigen::Vector2d::Zero();
  double a0 = 0.0;
  double density = 1.0;
};

// Expression-level description, the shape of a coefficient config block.
struct CoefficientExprs {
  std::array<std::array<Expr, 2>, 2> a{{{Expr::constant(1.0), Expr::constant(0.0)},
                                        {Expr::constant(0.0), Expr::constant(1.0)}}};
  std::array<Expr, 2> drift{Expr::constant(0.0), Expr::constant(0.0)};
  std::array<Expr, 2> codrift{Expr::constant(0.0), Expr::constant(0.0)};
  Expr a0 = Expr::constant(0.0);
};

class CoefficientSet {
public:
  using Evaluator = std::function<CoefficientSample(Point)>;

  CoefficientSet();  // identity principal part, everything else zero
  CoefficientSet(Evaluator eval, std::string description);
  static CoefficientSet from_exprs(const CoefficientExprs& exprs);
  static CoefficientSet constant(const CoefficientSample& sample);

  // Throws EvalDomainError from the underlying expressions.
  CoefficientSample at(Point p) const { return eval_(p); }
  const std::string& description() const { return description_; }

  // Principal part multiplied by s (lower-order terms untouched).
  CoefficientSet scaled_principal(double s) const;
  // Potential shifted by a constant.
  CoefficientSet shifted_potential(double shift) const;

private:
  Evaluator eval_;
  std::string description_;
};

struct Certificate {
  double eta = 0.0;
  bool symmetric = false;
};

// Samples at the 3-point quadrature nodes of every triangle. eta is the
// smallest eigenvalue of the symmetrized principal part over the samples.
// Throws NonElliptic if eta <= 0, QuadratureFailure on evaluation errors.
Certificate certify(const CoefficientSet& c, const Mesh& mesh);

// Boundary-fixing change of variables y = Φ(x).
struct Diffeo {
  std::array<Expr, 2> map;
  std::array<std::array<Expr, 2>, 2> jacobian;  // jacobian[i][j] = ∂Φ_i/∂x_j
  bool boundary_fixed = false;

  Point forward(Point x) const;
  Eigen::Matrix2d jac(Point x) const;
  // Newton iteration from the initial guess y; throws SingularJacobian if
  // det DΦ <= 0 is met or the iteration stalls.
  Point inverse(Point y) const;

  static Diffeo identity();
};

// Φ(x, y) = (x + ε sin³(πx) sin³(πy), y) on the unit square: the boundary is
// fixed with DΦ = I there, the area element changes inside. Injective for
// |ε| < 0.27 (det DΦ >= 1 − 3.63|ε|).
Diffeo square_bump_diffeo(double eps);

// Checks det DΦ > 0 at every quadrature node and, when boundary_fixed is set,
// Φ(x) = x at the boundary Gauss points. Returns the smallest determinant.
double validate_diffeo(const Diffeo& phi, const Mesh& mesh);

// Coefficients b with b_form(u∘Φ⁻¹, v∘Φ⁻¹) = a_form(u, v): at y = Φ(x),
//   B = J A Jᵀ / det J, drift_b = J drift / det J, codrift_b = J codrift / det J,
//   a0_b = a0 / det J, density_b = density / det J.
// The inverse map is evaluated per point by Newton iteration.
CoefficientSet pullback(const CoefficientSet& c, const Diffeo& phi);

// Parses a JSON-like block given as expression strings. An absent codrift
// means codrift = drift (the symmetric case).
CoefficientExprs coefficient_exprs(const std::array<std::array<std::string, 2>, 2>& a,
                                   const std::array<std::string, 2>& drift,
                                   const std::array<std::string, 2>* codrift,
                                   const std::string& a0);

}  // namespace dtnlab

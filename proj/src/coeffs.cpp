#include "dtnlab/coeffs.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "dtnlab/errors.hpp"
#include "dtnlab/quadrature.hpp"

namespace dtnlab {

CoefficientSet::CoefficientSet()
    : eval_([](Point) { return CoefficientSample{}; }), description_("identity") {}

CoefficientSet::CoefficientSet(Evaluator eval, std::string description)
    : eval_(std::move(eval)), description_(std::move(description)) {}

CoefficientSet CoefficientSet::from_exprs(const CoefficientExprs& e) {
  std::ostringstream desc;
  desc << "a=[[" << e.a[0][0].to_string() << ", " << e.a[0][1].to_string() << "], ["
       << e.a[1][0].to_string() << ", " << e.a[1][1].to_string() << "]] drift=["
       << e.drift[0].to_string() << ", " << e.drift[1].to_string() << "] codrift=["
       << e.codrift[0].to_string() << ", " << e.codrift[1].to_string()
       << "] a0=" << e.a0.to_string();
  return CoefficientSet(
      [e](Point p) {
        CoefficientSample s;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) s.a(i, j) = e.a[i][j].eval(p.x, p.y);
          s.drift(i) = e.drift[i].eval(p.x, p.y);
          s.codrift(i) = e.codrift[i].eval(p.x, p.y);
        }
        s.a0 = e.a0.eval(p.x, p.y);
        return s;
      },
      desc.str());
}

CoefficientSet CoefficientSet::constant(const CoefficientSample& sample) {
  std::ostringstream desc;
  desc << "constant a=[[" << sample.a(0, 0) << ", " << sample.a(0, 1) << "], [" << sample.a(1, 0)
       << ", " << sample.a(1, 1) << "]] a0=" << sample.a0;
  return CoefficientSet([sample](Point) { return sample; }, desc.str());
}

CoefficientSet CoefficientSet::scaled_principal(double s) const {
  auto base = eval_;
  return CoefficientSet(
      [base, s](Point p) {
        auto c = base(p);
        c.a *= s;
        return c;
      },
      description_ + " (principal x" + std::to_string(s) + ")");
}

CoefficientSet CoefficientSet::shifted_potential(double shift) const {
  auto base = eval_;
  return CoefficientSet(
      [base, shift](Point p) {
        auto c = base(p);
        c.a0 += shift;
        return c;
      },
      description_ + " (a0 + " + std::to_string(shift) + ")");
}

Certificate certify(const CoefficientSet& c, const Mesh& mesh) {
  Certificate cert;
  cert.eta = std::numeric_limits<double>::infinity();
  cert.symmetric = true;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (const auto& q : triangle_quadrature(mesh, t)) {
      CoefficientSample s;
      try {
        s = c.at(q.point);
      } catch (const EvalDomainError& e) {
        throw QuadratureFailure(std::string("coefficient evaluation failed: ") + e.what());
      }
      const Eigen::Matrix2d sym = 0.5 * (s.a + s.a.transpose());
      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sym, Eigen::EigenvaluesOnly);
      cert.eta = std::min(cert.eta, es.eigenvalues()(0));
      const double scale = std::max(1.0, s.a.cwiseAbs().maxCoeff());
      if (std::abs(s.a(0, 1) - s.a(1, 0)) > 1e-14 * scale ||
          (s.drift - s.codrift).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, s.drift.cwiseAbs().maxCoeff())) {
        cert.symmetric = false;
      }
    }
  }
  if (!(cert.eta > 0.0)) {
    throw NonElliptic("coefficient matrix is not uniformly elliptic: eta = " + std::to_string(cert.eta));
  }
  return cert;
}

Point Diffeo::forward(Point x) const { return {map[0].eval(x.x, x.y), map[1].eval(x.x, x.y)}; }

Eigen::Matrix2d Diffeo::jac(Point x) const {
  Eigen::Matrix2d j;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) j(r, c) = jacobian[r][c].eval(x.x, x.y);
  }
  return j;
}

Point Diffeo::inverse(Point y) const {
  Point x = y;
  for (int it = 0; it < 60; ++it) {
    const Point f = forward(x);
    const Eigen::Vector2d r(f.x - y.x, f.y - y.y);
    if (r.norm() <= 1e-15 * (1.0 + std::hypot(y.x, y.y))) return x;
    const Eigen::Matrix2d j = jac(x);
    if (!(j.determinant() > 0.0)) throw SingularJacobian("det DΦ <= 0 during inversion");
    const Eigen::Vector2d dx = j.partialPivLu().solve(r);
    x = {x.x - dx(0), x.y - dx(1)};
    if (dx.norm() <= 1e-16 * (1.0 + std::hypot(x.x, x.y))) return x;
  }
  const Point f = forward(x);
  if (std::hypot(f.x - y.x, f.y - y.y) <= 1e-12) return x;
  throw SingularJacobian("Newton inversion of Φ did not converge");
}

Diffeo Diffeo::identity() {
  Diffeo d;
  d.map = {parse_expr("x"), parse_expr("y")};
  d.jacobian = {{{Expr::constant(1.0), Expr::constant(0.0)}, {Expr::constant(0.0), Expr::constant(1.0)}}};
  d.boundary_fixed = true;
  return d;
}

Diffeo square_bump_diffeo(double eps) {
  if (!(std::abs(eps) < 0.27)) throw InvalidInput("square_bump_diffeo needs |eps| < 0.27");
  char e[40], e3[40];
  std::snprintf(e, sizeof e, "%.17g", eps);
  std::snprintf(e3, sizeof e3, "%.17g", 3.0 * eps);
  Diffeo d;
  d.map = {parse_expr(std::string("x + ") + e + "*sin(pi*x)^3*sin(pi*y)^3"), parse_expr("y")};
  d.jacobian = {{{parse_expr(std::string("1 + ") + e3 + "*pi*sin(pi*x)^2*cos(pi*x)*sin(pi*y)^3"),
                  parse_expr(std::string(e3) + "*pi*sin(pi*x)^3*sin(pi*y)^2*cos(pi*y)")},
                 {Expr::constant(0.0), Expr::constant(1.0)}}};
  d.boundary_fixed = true;
  return d;
}

double validate_diffeo(const Diffeo& phi, const Mesh& mesh) {
  double det_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (const auto& q : triangle_quadrature(mesh, t)) {
      det_min = std::min(det_min, phi.jac(q.point).determinant());
    }
  }
  if (!(det_min > 0.0)) throw SingularJacobian("det DΦ <= 0 at a quadrature node");
  if (phi.boundary_fixed) {
    for (const auto& e : mesh.boundary_edges()) {
      for (const auto& q : edge_quadrature(mesh, e)) {
        const Point y = phi.forward(q.point);
        if (distance(y, q.point) > 1e-12) {
          throw InvalidInput("diffeomorphism flagged boundary-fixed moves a boundary point");
        }
      }
    }
  }
  return det_min;
}

CoefficientSet pullback(const CoefficientSet& c, const Diffeo& phi) {
  if (!phi.boundary_fixed) throw InvalidInput("pullback needs a boundary-fixed diffeomorphism");
  return CoefficientSet(
      [c, phi](Point y) {
        const Point x = phi.inverse(y);
        const CoefficientSample s = c.at(x);
        const Eigen::Matrix2d j = phi.jac(x);
        const double det = j.determinant();
        if (!(det > 0.0)) throw SingularJacobian("det DΦ <= 0");
        CoefficientSample b;
        b.a = j * s.a * j.transpose() / det;
        b.drift = j * s.drift / det;
        b.codrift = j * s.codrift / det;
        b.a0 = s.a0 / det;
        b.density = s.density / det;
        return b;
      },
      "pullback of (" + c.description() + ") by Φ = (" + phi.map[0].to_string() + ", " +
          phi.map[1].to_string() + ")");
}

CoefficientExprs coefficient_exprs(const std::array<std::array<std::string, 2>, 2>& a,
                                   const std::array<std::string, 2>& drift,
                                   const std::array<std::string, 2>* codrift,
                                   const std::string& a0) {
  CoefficientExprs e;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) e.a[i][j] = parse_expr(a[i][j]);
    e.drift[i] = parse_expr(drift[i]);
    e.codrift[i] = codrift ? parse_expr((*codrift)[i]) : e.drift[i];
  }
  e.a0 = parse_expr(a0);
  return e;
}

}  // namespace dtnlab

#include "checks.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <optional>
#include <string>
#include <tuple>

#include "dtnlab/assemble.hpp"
#include "dtnlab/dtn.hpp"
#include "dtnlab/errors.hpp"
#include "dtnlab/expr.hpp"
#include "dtnlab/linalg.hpp"
#include "dtnlab/mesh.hpp"
#include "dtnlab/semigroup.hpp"
#include "dtnlab/spectral.hpp"
#include "oracles.hpp"

namespace checks {

using namespace dtnlab;

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

struct Case {
  std::string name;
  Mesh mesh;
  BoundaryPartition part;
  CoefficientSet coeffs;
};

CoefficientSet anisotropic() {
  CoefficientSample s;
  s.a << 2.0, 0.5, 0.5, 1.0;
  s.a0 = 1.0;
  return CoefficientSet::constant(s);
}

CoefficientSet variable_symmetric() {
  const std::array<std::string, 2> drift{"0.3*y", "0"};
  return CoefficientSet::from_exprs(coefficient_exprs(
      {{{"1 + 0.5*x*y", "0.2*sin(pi*x)"}, {"0.2*sin(pi*x)", "2 + cos(pi*y)"}}}, drift, nullptr, "x - y"));
}

CoefficientSet nonsymmetric() {
  const std::array<std::string, 2> drift{"1", "0.5*x"};
  const std::array<std::string, 2> codrift{"0", "0"};
  return CoefficientSet::from_exprs(
      coefficient_exprs({{{"1", "0"}, {"0", "1"}}}, drift, &codrift, "1"));
}

BoundaryPartition sides(const Mesh& m, std::vector<int> s) { return partition_by_sides(m, s); }

// Square and L-shape, several Γ0 choices, three coefficient sets.
std::vector<Case> duality_cases() {
  std::vector<Case> out;
  const Mesh square = build_structured_square(16);
  const auto lpoly = l_shape_polygon();
  const Mesh lshape = build_polygon_mesh(lpoly, 1.0 / 16.0);
  const std::vector<std::pair<std::string, CoefficientSet>> coeffs{
      {"identity", CoefficientSet()}, {"anisotropic", anisotropic()}, {"variable", variable_symmetric()}};
  const std::vector<std::pair<std::string, std::vector<int>>> square_g0{
      {"none", {}}, {"bottom", {0}}, {"bottom+left", {0, 3}}, {"bottom+top", {0, 2}}};
  const std::vector<std::pair<std::string, std::vector<int>>> l_g0{{"none", {}}, {"left", {5}}, {"bottom+top", {0, 4}}};
  for (const auto& [cn, c] : coeffs) {
    for (const auto& [gn, g] : square_g0) out.push_back({"square/" + gn + "/" + cn, square, sides(square, g), c});
    for (const auto& [gn, g] : l_g0) out.push_back({"lshape/" + gn + "/" + cn, lshape, sides(lshape, g), c});
  }
  return out;
}

Result begin(int id, const char* title) {
  Result r;
  r.id = id;
  r.title = title;
  r.passed = true;
  return r;
}

void require(Result& r, bool ok, const std::string& line) {
  r.details.push_back(std::string(ok ? "ok   " : "FAIL ") + line);
  if (!ok) r.passed = false;
}

template <typename F>
Result guarded(int id, const char* title, F&& body) {
  const Timer timer;
  Result r = begin(id, title);
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.details.push_back(std::string("FAIL exception: ") + e.what());
  }
  r.seconds = timer.seconds();
  return r;
}

}  // namespace

Result duality(const Options&) {
  return guarded(1, "duality: Steklov pairs extend to Robin eigenvectors", [](Result& r) {
    const Timer timer;
    const auto cases = duality_cases();
    int configs = 0, pairs = 0;
    double worst_fwd = 0.0, worst_rev = 0.0;
    for (const auto& c : cases) {
      const AssembledSystem sys = assemble(c.mesh, c.part, c.coeffs);
      const auto lambdas = spectral_gap_points(sys, 3);
      ++configs;
      double fwd = 0.0, rev = 0.0;
      bool mult = true;
      for (double lambda : lambdas) {
        for (const auto& rep : duality_check_all(sys, lambda)) {
          fwd = std::max(fwd, rep.forward_residual);
          rev = std::max(rev, rep.reverse_residual);
          mult = mult && rep.multiplicity_match;
          ++pairs;
        }
      }
      worst_fwd = std::max(worst_fwd, fwd);
      worst_rev = std::max(worst_rev, rev);
      require(r, fwd <= 1e-8 && rev <= 1e-8 && mult && lambdas.size() == 3,
              fmt("%-28s λ=%.4g,%.4g,%.4g forward %.2e reverse %.2e multiplicities %s", c.name.c_str(),
                  lambdas[0], lambdas[1], lambdas[2], fwd, rev, mult ? "match" : "DIFFER"));
    }
    const double secs = timer.seconds();
    require(r, configs >= 20, fmt("%d configurations, %d Steklov pairs", configs, pairs));
    require(r, secs <= 120.0, fmt("runtime %.1f s (limit 120 s)", secs));
    r.details.push_back(fmt("worst forward %.2e, worst reverse %.2e", worst_fwd, worst_rev));
  });
}

Result monotonicity(const Options&) {
  return guarded(2, "monotonicity: λ_k(μ) non-increasing, below λ_k^D", [](Result& r) {
    const Mesh square = build_structured_square(16);
    const std::vector<std::pair<std::string, CoefficientSet>> sets{{"identity", CoefficientSet()},
                                                                   {"variable", variable_symmetric()}};
    for (const auto& [name, c] : sets) {
      for (const auto& g0 : std::vector<std::vector<int>>{{}, {0}}) {
        const AssembledSystem sys = assemble(square, sides(square, g0), c);
        const EigenCurve curve = eigen_curves(sys, -50.0, 50.0, 101, 5);
        const VectorXd dir = dirichlet_spectrum(sys, 5).eigenvalues;
        double above = -INFINITY;
        for (Eigen::Index k = 0; k < 5; ++k) {
          above = std::max(above, (curve.values.row(k).array() - dir(k)).maxCoeff());
        }
        const double l1_0 = curve.values(0, 50), l1_50 = curve.values(0, 100);
        const std::string label = name + (g0.empty() ? "/Γ0=∅" : "/Γ0=bottom");
        require(r, curve.max_increase <= 1e-8,
                fmt("%-18s max increase %.2e, min decrease margin %.3e", label.c_str(), curve.max_increase,
                    curve.min_decrease_margin));
        require(r, l1_50 < l1_0 - 1.0, fmt("%-18s λ1(50) = %.4f < λ1(0) − 1 = %.4f", label.c_str(), l1_50, l1_0 - 1.0));
        require(r, above <= 1e-10, fmt("%-18s max λ_k^μ − λ_k^D = %.4e", label.c_str(), above));
      }
    }
  });
}

Result dirichlet_limit(const Options&) {
  return guarded(3, "Dirichlet limit: gaps shrink ≥5× per decade", [](Result& r) {
    const Mesh square = build_structured_square(16);
    const AssembledSystem sys = assemble(square, sides(square, {}), CoefficientSet());
    const LimitTable t = dirichlet_limit_study(sys, 4, {-1e2, -1e3, -1e4});
    require(r, t.all_positive, "all gaps λ_k^D − λ_k^μ positive");
    for (std::size_t k = 0; k < t.ratios.size(); ++k) {
      double worst = INFINITY;
      for (double q : t.ratios[k]) worst = std::min(worst, q);
      require(r, worst >= 5.0,
              fmt("k=%zu gaps %.3e %.3e %.3e, ratios %.2f %.2f", k + 1, t.rows[0].gaps[k], t.rows[1].gaps[k],
                  t.rows[2].gaps[k], t.ratios[k][0], t.ratios[k][1]));
    }
  });
}

Result analytic_spectra(const Options&) {
  return guarded(4, "analytic spectra: square and 64-gon", [](Result& r) {
    const Mesh square = build_structured_square(32);
    const AssembledSystem sys = assemble(square, sides(square, {}), CoefficientSet());
    const VectorXd dir = dirichlet_spectrum(sys, 3).eigenvalues;
    const auto exact = oracle::square_dirichlet(3);
    for (int k = 0; k < 3; ++k) {
      const double rel = std::abs(dir(k) - exact[k]) / exact[k];
      require(r, rel <= 0.02, fmt("Dirichlet λ%d = %.5f vs %.5f (rel %.2e)", k + 1, dir(k), exact[k], rel));
    }
    const VectorXd mixed = robin_spectrum(sys, 0.0, 2).eigenvalues;
    require(r, std::abs(mixed(0)) <= 1e-10, fmt("mixed λ1 = %.3e", mixed(0)));
    const double rel2 = std::abs(mixed(1) - kPi * kPi) / (kPi * kPi);
    require(r, rel2 <= 0.02, fmt("mixed λ2 = %.5f vs π² (rel %.2e)", mixed(1), rel2));

    const auto poly = regular_polygon(64, 1.0);
    const Mesh disk = build_polygon_mesh(poly, 2.0 * kPi / 64.0);
    const AssembledSystem ds = assemble(disk, sides(disk, {}), CoefficientSet());
    const VectorXd stek = steklov_spectrum(ds, 0.0, 5).eigenvalues;
    const double target[5] = {0.0, 1.0, 1.0, 2.0, 2.0};
    require(r, std::abs(stek(0)) <= 1e-8, fmt("64-gon Steklov μ1 = %.3e", stek(0)));
    for (int k = 1; k < 5; ++k) {
      const double rel = std::abs(stek(k) - target[k]) / target[k];
      require(r, rel <= 0.05, fmt("64-gon Steklov μ%d = %.5f vs %g (rel %.2e)", k + 1, stek(k), target[k], rel));
    }
  });
}

Result semigroup(const Options& o) {
  return guarded(5, "semigroup: positivity, sub-Markov, domination, potentials", [&](Result& r) {
    const Mesh square = build_structured_square(8);
    AssembleOptions opt;
    opt.lump_boundary_mass = true;
    opt.lump_potential = true;
    const std::vector<double> times{0.1, 1.0, 10.0};
    auto potential = [](double a0) {
      CoefficientSample s;
      s.a0 = a0;
      return CoefficientSet::constant(s);
    };
    const std::vector<std::pair<std::vector<int>, double>> settings{{{}, 0.0}, {{0}, 1.0}};
    for (const auto& [g0, a0] : settings) {
      const std::string label = fmt("Γ0=%s a0=%g", g0.empty() ? "∅" : "bottom", a0);
      const AssembledSystem sys = assemble(square, sides(square, g0), potential(a0), opt);
      const BoundarySemigroup sg(sys);
      require(r, sg.strict_setting(), label + ": lumped, nonobtuse, constant coefficients");
      const auto pos = positivity_report(sg, times, 50, o.seed);
      require(r, pos.verdict == "PASS", fmt("%s positivity: min entry %.3e over %zu rows", label.c_str(),
                                            pos.min_entry, pos.rows.size()));
      const auto sub = submarkov_report(sg, times, 50, o.seed);
      require(r, sub.verdict == "PASS", fmt("%s sub-Markov: max violation %.3e", label.c_str(), sub.max_violation));
      double lp_worst = -INFINITY;
      for (const auto& row : lp_contraction_report(sg, {1.0, 2.0, INFINITY}, times)) {
        lp_worst = std::max(lp_worst, row.norm - row.bound);
      }
      require(r, lp_worst <= 1e-8, fmt("%s ℓp norms minus bounds: max %.3e", label.c_str(), lp_worst));
      const double excess = growth_bound_excess(sg, times, 50, o.seed);
      require(r, excess <= 1e-10, fmt("%s growth bound excess %.3e (w0 = %.6f)", label.c_str(), excess, sg.w0()));
    }
    const std::vector<std::pair<std::vector<int>, std::vector<int>>> nests{{{}, {0}}, {{0}, {0, 1}}};
    for (const auto& [g0, g0t] : nests) {
      const AssembledSystem a = assemble(square, sides(square, g0), potential(0.0), opt);
      const AssembledSystem b = assemble(square, sides(square, g0t), potential(0.0), opt);
      const auto rep = domination_report(a, b, times, 50, o.seed);
      require(r, rep.verdict == "PASS", fmt("domination %zu ⊆ %zu sides: max violation %.3e", g0.size(),
                                            g0t.size(), rep.max_violation));
    }
    const std::vector<std::tuple<std::vector<int>, double, double>> pots{{{0}, 0.0, 5.0}, {{}, 1.0, 2.0}};
    for (const auto& [g0, a0, b0] : pots) {
      const AssembledSystem a = assemble(square, sides(square, g0), potential(a0), opt);
      const AssembledSystem b = assemble(square, sides(square, g0), potential(b0), opt);
      const auto rep = potential_monotonicity_report(a, b, times, 50, o.seed);
      require(r, rep.verdict == "PASS",
              fmt("potential a0=%g ≤ b0=%g: max violation %.3e", a0, b0, rep.max_violation));
    }
  });
}

Result gauge(const Options&) {
  return guarded(6, "gauge: D-t-N and Robin spectra converge under Φ", [](Result& r) {
    const Mesh coarse = build_structured_square(4);
    const BoundaryPartition part = sides(coarse, {0});
    const Diffeo phi = square_bump_diffeo(0.15);
    const double det_min = validate_diffeo(phi, refine(refine(refine(coarse))));
    require(r, det_min < 0.9, fmt("Φ distorts area: min det DΦ = %.3f", det_min));
    const GaugeStudy st = gauge_study(coarse, part, CoefficientSet(), phi, 3, {1.0, 5.0}, {-5.0, 0.0, 5.0}, 6);
    for (std::size_t l = 0; l < st.levels.size(); ++l) {
      const auto& lv = st.levels[l];
      if (l == 0) {
        r.details.push_back(fmt("ok   level 0 h=%.4f D-t-N defect %.3e Robin gap %.3e", lv.h_max, lv.dtn_defect,
                                lv.robin_gap));
        continue;
      }
      const auto& prev = st.levels[l - 1];
      const double qd = prev.dtn_defect / lv.dtn_defect;
      const double qr = prev.robin_gap / lv.robin_gap;
      require(r, qd >= 2.0 && qr >= 2.0,
              fmt("level %zu h=%.4f D-t-N defect %.3e (÷%.2f) Robin gap %.3e (÷%.2f)", l, lv.h_max,
                  lv.dtn_defect, qd, lv.robin_gap, qr));
    }
    require(r, st.identity_conjugation_residual <= 1e-10,
            fmt("b := a conjugation residual %.3e", st.identity_conjugation_residual));
  });
}

Result decomposition(const Options& o) {
  return guarded(7, "decomposition and coercivity", [&](Result& r) {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> normal;
    auto cases = duality_cases();
    const Mesh square = build_structured_square(16);
    cases.push_back({"square/bottom/nonsymmetric", square, sides(square, {0}), nonsymmetric()});
    cases.push_back({"square/none/nonsymmetric", square, sides(square, {}), nonsymmetric()});
    double recon = 0.0, harm = 0.0, delta_min = INFINITY;
    int vectors = 0, configs = 0;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
      const auto& c = cases[ci];
      const AssembledSystem sys = assemble(c.mesh, c.part, c.coeffs);
      std::vector<double> lambdas{1.0, 5.0};
      if (sys.certificate.symmetric) lambdas = spectral_gap_points(sys, 3);
      for (double lambda : lambdas) {
        const auto rep = coercivity_report(sys, lambda, 20, o.seed);
        delta_min = std::min(delta_min, rep.delta_est);
        ++configs;
        if (!(rep.delta_est > 0.0)) {
          require(r, false, fmt("%s λ=%.4g δ_est = %.3e", c.name.c_str(), lambda, rep.delta_est));
        }
      }
      for (int t = 0; t < 100; ++t) {
        VectorXd u(sys.num_dofs());
        for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
        const double lambda = lambdas[static_cast<std::size_t>(t) % lambdas.size()];
        const Decomposition d = decompose(sys, lambda, u);
        recon = std::max(recon, (d.u0 + d.harmonic.u - u).cwiseAbs().maxCoeff());
        harm = std::max(harm, d.harmonic.residual_interior);
        double u0_boundary = 0.0;
        for (int b : sys.boundary_dofs) u0_boundary = std::max(u0_boundary, std::abs(d.u0(b)));
        recon = std::max(recon, u0_boundary);
        ++vectors;
      }
    }
    require(r, recon <= 1e-12, fmt("%d vectors (100 per config): reconstruction error %.2e", vectors, recon));
    require(r, harm <= 1e-10, fmt("harmonic part interior residual %.2e", harm));
    require(r, delta_min > 0.0, fmt("%d (config, λ) pairs: min δ_est = %.3e", configs, delta_min));
  });
}

Result infrastructure(const Options& o) {
  return guarded(8, "infrastructure: eigensolver, exprlang, CLI determinism", [&](Result& r) {
    std::mt19937_64 rng(o.seed);
    double worst = 0.0;
    std::uniform_int_distribution<int> size(2, 60);
    for (int t = 0; t < 50; ++t) {
      const int n = t == 0 ? 60 : size(rng);
      const auto [k, g] = oracle::random_pair(rng, n);
      const VectorXd mine = sym_geneig(k, g).eigenvalues;
      const VectorXd ref = oracle::jacobi_geneig(k, g);
      const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
      worst = std::max(worst, (mine - ref).cwiseAbs().maxCoeff() / scale);
    }
    require(r, worst <= 1e-10, fmt("sym_geneig vs Jacobi oracle, 50 pairs up to 60×60: max rel diff %.2e", worst));

    int round_trip_fail = 0, eval_fail = 0, domain = 0;
    const double pts[3][2] = {{0.3, 0.7}, {-1.25, 2.5}, {0.0, 0.0}};
    for (int t = 0; t < 1000; ++t) {
      const std::string text = oracle::random_expression(rng, 5);
      const Expr e = parse_expr(text);
      const Expr again = parse_expr(e.to_string());
      if (!(again == e) || again.to_string() != e.to_string()) ++round_trip_fail;
      for (const auto& p : pts) {
        const auto ref = oracle::reference_eval(text, p[0], p[1]);
        std::optional<double> got;
        try {
          got = e.eval(p[0], p[1]);
        } catch (const EvalDomainError&) {
        }
        if (!ref) ++domain;
        const bool same = ref.has_value() == got.has_value() &&
                          (!ref || std::memcmp(&*ref, &*got, sizeof(double)) == 0);
        if (!same) ++eval_fail;
      }
    }
    require(r, round_trip_fail == 0, fmt("1000 random expressions: %d round-trip failures", round_trip_fail));
    require(r, eval_fail == 0,
            fmt("3000 evaluations vs reference evaluator: %d mismatches (%d domain errors agreed)", eval_fail, domain));

    if (o.cli_determinism) {
      std::string detail;
      const bool same = o.cli_determinism(detail);
      require(r, same, "CLI determinism: " + detail);
    } else {
      require(r, false, "CLI determinism: no runner supplied");
    }
  });
}

std::vector<Result> run_all(const Options& o, const std::function<void(const Result&)>& on_result) {
  std::vector<Result> out;
  for (auto* f : {duality, monotonicity, dirichlet_limit, analytic_spectra, semigroup, gauge, decomposition,
                  infrastructure}) {
    out.push_back(f(o));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format_line(const Result& r) {
  return fmt("%s criterion %d: %s (%.1f s)", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
}

}  // namespace checks

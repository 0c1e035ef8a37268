#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "checks.hpp"
#include "config.hpp"
#include "dtnlab/assemble.hpp"
#include "dtnlab/dtn.hpp"
#include "dtnlab/errors.hpp"
#include "dtnlab/semigroup.hpp"
#include "dtnlab/spectral.hpp"

namespace dtnlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Context {
  std::string command;
  ExperimentConfig cfg;
  fs::path out;
  bool quiet = false;

  std::string header() const {
    return "# dtnlab " + std::string(kVersion) + " config=" + cfg.hash() + " seed=" + std::to_string(cfg.seed) +
           " command=" + command;
  }

  std::ofstream open(const std::string& file) const {
    std::ofstream f(out / file, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + (out / file).string());
    f << header() << '\n';
    return f;
  }

  void say(const std::string& line) const {
    if (!quiet) std::cout << line << '\n';
  }

  void write_resolved() const {
    std::ofstream f(out / "resolved_config.json", std::ios::binary);
    f << "// dtnlab " << kVersion << " config=" << cfg.hash() << '\n' << cfg.resolved().dump(2) << '\n';
  }
};

struct Problem {
  Mesh mesh;
  BoundaryPartition part;
  AssembledSystem sys;
};

Problem setup(const ExperimentConfig& cfg) {
  Problem p;
  p.mesh = build_domain(cfg.domain);
  p.part = build_partition(p.mesh, cfg.gamma0);
  AssembleOptions opt;
  opt.lump_boundary_mass = cfg.lump_boundary_mass;
  opt.lump_potential = cfg.lump_potential;
  p.sys = assemble(p.mesh, p.part, build_coefficients(cfg.coefficients), opt);
  return p;
}

std::vector<double> lambdas(const ExperimentConfig& cfg, const AssembledSystem& sys) {
  return cfg.lambda.empty() ? spectral_gap_points(sys, cfg.lambda_gaps) : cfg.lambda;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

int cmd_validate(const Context& c) {
  const Mesh mesh = build_domain(c.cfg.domain);
  const BoundaryPartition part = build_partition(mesh, c.cfg.gamma0);
  const QualityReport q = mesh.quality();
  const Certificate cert = certify(build_coefficients(c.cfg.coefficients), mesh);
  auto f = c.open("validate.csv");
  f << "quantity,value\n";
  const std::vector<std::pair<std::string, std::string>> rows{
      {"vertices", std::to_string(mesh.num_vertices())},
      {"triangles", std::to_string(mesh.num_triangles())},
      {"h_max", num(mesh.h_max())},
      {"min_angle_deg", num(q.min_angle_deg)},
      {"max_angle_deg", num(q.max_angle_deg)},
      {"nonobtuse", q.nonobtuse ? "true" : "false"},
      {"gamma0_edges", std::to_string(part.gamma0_edges.size())},
      {"gamma1_edges", std::to_string(part.gamma1_edges.size())},
      {"gamma0_length", num(gamma0_length(mesh, part))},
      {"eta", num(cert.eta)},
      {"symmetric", cert.symmetric ? "true" : "false"}};
  for (const auto& [k, v] : rows) {
    f << k << ',' << v << '\n';
    c.say(k + " = " + v);
  }
  if (c.cfg.coefficients_b) {
    const Certificate cb = certify(build_coefficients(*c.cfg.coefficients_b), mesh);
    f << "eta_b," << num(cb.eta) << "\nsymmetric_b," << (cb.symmetric ? "true" : "false") << '\n';
    c.say("eta_b = " + num(cb.eta) + ", symmetric_b = " + (cb.symmetric ? "true" : "false"));
  }
  return 0;
}

int cmd_spectrum(const Context& c) {
  const Problem p = setup(c.cfg);
  auto f = c.open("spectrum.csv");
  f << "kind,parameter,index,value\n";
  auto emit = [&](const char* kind, const std::string& param, const VectorXd& v) {
    std::string line = std::string(kind) + (param.empty() ? "" : " " + param) + ":";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      f << kind << ',' << param << ',' << i + 1 << ',' << num(v(i)) << '\n';
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.6g", v(i));
      line += buf;
    }
    c.say(line);
  };
  if (!p.sys.interior_dofs.empty()) {
    const int kd = std::min<int>(c.cfg.k, static_cast<int>(p.sys.interior_dofs.size()));
    emit("dirichlet", "", dirichlet_spectrum(p.sys, kd).eigenvalues);
  }
  for (double mu : c.cfg.mu) emit("robin", num(mu), robin_spectrum(p.sys, mu, c.cfg.k).eigenvalues);
  const int ks = std::min<int>(c.cfg.k, static_cast<int>(p.sys.boundary_dofs.size()));
  for (double lambda : lambdas(c.cfg, p.sys)) emit("steklov", num(lambda), steklov_spectrum(p.sys, lambda, ks).eigenvalues);
  return 0;
}

int cmd_curves(const Context& c) {
  const Problem p = setup(c.cfg);
  const EigenCurve curve = eigen_curves(p.sys, c.cfg.mu_min, c.cfg.mu_max, c.cfg.mu_steps, c.cfg.k);
  VectorXd dir;
  if (!p.sys.interior_dofs.empty()) dir = dirichlet_spectrum(p.sys, c.cfg.k).eigenvalues;
  auto f = c.open("curves.csv");
  f << "mu,index,value,dirichlet\n";
  double above = -INFINITY;
  for (std::size_t s = 0; s < curve.mu_grid.size(); ++s) {
    for (int k = 0; k < c.cfg.k; ++k) {
      const double v = curve.values(k, static_cast<Eigen::Index>(s));
      f << num(curve.mu_grid[s]) << ',' << k + 1 << ',' << num(v) << ',' << (dir.size() ? num(dir(k)) : "") << '\n';
      if (dir.size()) above = std::max(above, v - dir(k));
    }
  }
  const bool ok = curve.max_increase <= 1e-8 && above <= 1e-10;
  c.say("max increase " + num(curve.max_increase) + ", min decrease margin " + num(curve.min_decrease_margin) +
        ", max λ_k^μ − λ_k^D " + num(above));
  c.say(std::string(verdict(ok)) + " curves");
  return ok ? 0 : 1;
}

int cmd_duality(const Context& c) {
  const Problem p = setup(c.cfg);
  auto f = c.open("duality.csv");
  f << "lambda,index,mu,forward_residual,reverse_residual,steklov_multiplicity,robin_multiplicity,verdict\n";
  bool all_ok = true;
  double worst = 0.0;
  for (double lambda : lambdas(c.cfg, p.sys)) {
    for (const auto& r : duality_check_all(p.sys, lambda)) {
      const bool ok = r.forward_residual <= 1e-8 && r.reverse_residual <= 1e-8 && r.multiplicity_match;
      all_ok = all_ok && ok;
      worst = std::max({worst, r.forward_residual, r.reverse_residual});
      f << num(r.lambda) << ',' << r.index << ',' << num(r.mu) << ',' << num(r.forward_residual) << ','
        << num(r.reverse_residual) << ',' << r.steklov_multiplicity << ',' << r.robin_multiplicity << ','
        << verdict(ok) << '\n';
    }
  }
  c.say("worst residual " + num(worst));
  c.say(std::string(verdict(all_ok)) + " duality");
  return all_ok ? 0 : 1;
}

int cmd_limit(const Context& c) {
  const Problem p = setup(c.cfg);
  std::vector<double> mus;
  for (const auto& v : c.cfg.limit["mu"]) mus.push_back(v.get<double>());
  const int k = c.cfg.limit["k"].get<int>();
  const LimitTable t = dirichlet_limit_study(p.sys, k, mus);
  auto f = c.open("limit.csv");
  f << "mu,index,dirichlet,gap,ratio\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::string line = "mu = " + num(t.rows[r].mu) + ":";
    for (int i = 0; i < k; ++i) {
      const std::string ratio = r ? num(t.ratios[static_cast<std::size_t>(i)][r - 1]) : "";
      f << num(t.rows[r].mu) << ',' << i + 1 << ',' << num(t.dirichlet(i)) << ',' << num(t.rows[r].gaps[i]) << ','
        << ratio << '\n';
      char buf[48];
      std::snprintf(buf, sizeof buf, " %.3e", t.rows[r].gaps[i]);
      line += buf;
    }
    c.say(line);
  }
  const bool ok = t.all_positive && t.monotone;
  c.say(std::string(verdict(ok)) + " limit");
  return ok ? 0 : 1;
}

int cmd_semigroup(const Context& c) {
  const Problem p = setup(c.cfg);
  const BoundarySemigroup sg(p.sys);
  std::vector<ReportRow> rows;
  bool ok = true;
  auto take = [&](const char* what, const OrderReport& r) {
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    ok = ok && r.passed();
    c.say(std::string(what) + ": " + r.verdict + ", max violation " + num(r.max_violation));
  };
  c.say(std::string("strict setting (lumped, nonobtuse, constant coefficients): ") +
        (sg.strict_setting() ? "yes" : "no"));
  take("positivity", positivity_report(sg, c.cfg.t, c.cfg.trials, c.cfg.seed));
  bool markov = true;
  try {
    take("sub-Markov", submarkov_report(sg, c.cfg.t, c.cfg.trials, c.cfg.seed));
  } catch (const HypothesisViolation& e) {
    markov = false;
    c.say(std::string("sub-Markov: skipped (") + e.what() + ")");
  }
  AssembleOptions opt;
  opt.lump_boundary_mass = c.cfg.lump_boundary_mass;
  opt.lump_potential = c.cfg.lump_potential;
  if (c.cfg.semigroup.contains("domination_sides")) {
    const json g = {{"sides", c.cfg.semigroup["domination_sides"]}};
    const AssembledSystem b = assemble(p.mesh, build_partition(p.mesh, g), build_coefficients(c.cfg.coefficients), opt);
    take("domination", domination_report(p.sys, b, c.cfg.t, c.cfg.trials, c.cfg.seed));
  }
  if (c.cfg.semigroup.contains("potential_shift")) {
    const double shift = c.cfg.semigroup["potential_shift"].get<double>();
    const AssembledSystem b =
        assemble(p.mesh, p.part, build_coefficients(c.cfg.coefficients).shifted_potential(shift), opt);
    take("potential monotonicity", potential_monotonicity_report(p.sys, b, c.cfg.t, c.cfg.trials, c.cfg.seed));
  }
  const double excess = growth_bound_excess(sg, c.cfg.t, c.cfg.trials, c.cfg.seed);
  const bool growth_ok = excess <= 1e-10;
  ok = ok && growth_ok;
  rows.push_back({"growth_bound", 0.0, 0, sg.w0(), sg.w0(), std::max(0.0, excess), verdict(growth_ok)});
  c.say("growth bound excess " + num(excess) + " (w0 = " + num(sg.w0()) + ")");
  auto f = c.open("semigroup.csv");
  write_report_csv(f, rows);
  if (markov) {
    auto g = c.open("lp.csv");
    g << "p,t,norm,bound,verdict\n";
    for (const auto& r : lp_contraction_report(sg, {1.0, 2.0, INFINITY}, c.cfg.t)) {
      g << (std::isinf(r.p) ? std::string("inf") : num(r.p)) << ',' << num(r.t) << ',' << num(r.norm) << ','
        << num(r.bound) << ',' << r.verdict << '\n';
      ok = ok && r.verdict != "FAIL";
    }
  }
  c.say(std::string(verdict(ok)) + " semigroup");
  return ok ? 0 : 1;
}

int cmd_gauge(const Context& c) {
  const json& g = c.cfg.gauge;
  const Mesh mesh = build_domain(g["domain"]);
  const BoundaryPartition part = build_partition(mesh, g["gamma0"]);
  std::vector<double> lam, mus;
  for (const auto& v : g["lambda"]) lam.push_back(v.get<double>());
  for (const auto& v : g["mu"]) mus.push_back(v.get<double>());
  const GaugeStudy st = gauge_study(mesh, part, build_coefficients(c.cfg.coefficients), build_diffeo(g),
                                    c.cfg.refinements, lam, mus, g["k"].get<int>());
  auto f = c.open("gauge.csv");
  f << "level,h_max,dtn_defect,dtn_ratio,robin_gap,robin_ratio\n";
  bool ok = st.identity_conjugation_residual <= 1e-10;
  for (std::size_t l = 0; l < st.levels.size(); ++l) {
    const auto& lv = st.levels[l];
    std::string qd, qr;
    if (l > 0) {
      const double a = st.levels[l - 1].dtn_defect / lv.dtn_defect;
      const double b = st.levels[l - 1].robin_gap / lv.robin_gap;
      ok = ok && a >= 2.0 && b >= 2.0;
      qd = num(a);
      qr = num(b);
    }
    f << lv.level << ',' << num(lv.h_max) << ',' << num(lv.dtn_defect) << ',' << qd << ',' << num(lv.robin_gap)
      << ',' << qr << '\n';
    char buf[160];
    std::snprintf(buf, sizeof buf, "level %d  h=%.4f  D-t-N defect %.3e  Robin gap %.3e", lv.level, lv.h_max,
                  lv.dtn_defect, lv.robin_gap);
    c.say(buf);
  }
  c.say("identity conjugation residual " + num(st.identity_conjugation_residual));
  c.say(std::string(verdict(ok)) + " gauge");
  return ok ? 0 : 1;
}

bool same_files(const fs::path& a, const fs::path& b, std::string& detail) {
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
  std::sort(names.begin(), names.end());
  for (const auto& n : names) {
    std::ifstream fa(a / n, std::ios::binary), fb(b / n, std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (!fb || sa.str() != sb.str()) {
      detail = n.string() + " differs";
      return false;
    }
  }
  detail = std::to_string(names.size()) + " files byte-identical across two runs";
  return !names.empty();
}

int cmd_all(const Context& c) {
  checks::Options o;
  o.seed = c.cfg.seed;
  o.cli_determinism = [&](std::string& detail) {
    const fs::path base = c.out / "determinism";
    const std::string seed = std::to_string(c.cfg.seed);
    for (const char* run_dir : {"a", "b"}) {
      for (const char* sub : {"curves", "semigroup", "duality"}) {
        const std::string out = (base / run_dir).string();
        const char* argv[] = {"dtnlab", sub, "--out", out.c_str(), "--seed", seed.c_str(), "--quiet"};
        run(7, argv);
      }
    }
    return same_files(base / "a", base / "b", detail);
  };
  auto f = c.open("acceptance.csv");
  f << "criterion,verdict,seconds,title\n";
  bool ok = true;
  checks::run_all(o, [&](const checks::Result& r) {
    ok = ok && r.passed;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
    f << r.id << ',' << verdict(r.passed) << ',' << secs << ",\"" << r.title << "\"\n";
    c.say(checks::format_line(r));
    for (const auto& d : r.details) c.say("    " + d);
  });
  return ok ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"dtnlab: numerical lab for partial Dirichlet-to-Neumann operators", "dtnlab"};
  app.set_version_flag("--version", kVersion);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> k, refinements;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (default: config 'output')");
  app.add_option("--seed", seed, "seed for randomized trials");
  app.add_option("--k", k, "number of eigenpairs")->check(CLI::PositiveNumber);
  app.add_option("--refinements", refinements, "mesh refinements for gauge")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet, "print nothing but errors");
  app.require_subcommand(1);
  app.fallthrough();
  const std::vector<std::pair<const char*, const char*>> commands{
      {"validate", "check the config and certify the coefficients"},
      {"spectrum", "Dirichlet, Robin and Steklov eigenvalue tables"},
      {"curves", "Robin eigenvalue curves over the μ grid"},
      {"duality", "Steklov/Robin duality residuals"},
      {"limit", "Robin → Dirichlet limit study"},
      {"semigroup", "order properties of the boundary semigroup"},
      {"gauge", "pullback invariance across refinements"},
      {"all", "full acceptance suite"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Context c;
  c.command = app.get_subcommands().front()->get_name();
  c.quiet = quiet;
  try {
    c.cfg = load_config(config_path);
    if (seed) c.cfg.seed = *seed;
    if (k) c.cfg.k = *k;
    if (refinements) c.cfg.refinements = *refinements;
    c.out = out_dir.empty() ? fs::path(c.cfg.output) : fs::path(out_dir);
    fs::create_directories(c.out);
    c.write_resolved();
    if (c.command == "validate") return cmd_validate(c);
    if (c.command == "spectrum") return cmd_spectrum(c);
    if (c.command == "curves") return cmd_curves(c);
    if (c.command == "duality") return cmd_duality(c);
    if (c.command == "limit") return cmd_limit(c);
    if (c.command == "semigroup") return cmd_semigroup(c);
    if (c.command == "gauge") return cmd_gauge(c);
    return cmd_all(c);
  } catch (const Error& e) {
    std::cerr << "dtnlab " << c.command << ": " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "dtnlab " << c.command << ": config: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "dtnlab " << c.command << ": " << e.what() << '\n';
    return 2;
  }
}

}  // namespace dtnlab::cli

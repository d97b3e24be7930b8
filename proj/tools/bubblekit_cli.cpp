// bubblekit command-line front-end: every study as a reproducible subcommand.
// Exit codes: 0 = pass, 2 = audit/check failure, 1 = crash or bad input.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bubblekit/bubble.hpp"
#include "bubblekit/energy.hpp"
#include "bubblekit/io.hpp"
#include "bubblekit/pohozaev.hpp"
#include "bubblekit/potential.hpp"
#include "bubblekit/quadrature.hpp"
#include "bubblekit/reduction.hpp"

using json = nlohmann::ordered_json;
using namespace bubblekit;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 2;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int dim = 7;
  std::string potential_spec = "builtin:appendix_d";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "INI-style config file");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--dim", o.dim, "ambient dimension N");
  cmd->add_option("--potential", o.potential_spec,
                  "builtin:appendix_d or a polynomial in r and y5..yN");
}

// flags override config file values; config overrides defaults
void apply_config(CommonOpts& o) {
  if (o.config_path.empty()) return;
  const Config cfg = Config::parse_file(o.config_path);
  o.dim = static_cast<int>(cfg.get_long("run.dim", o.dim));
  o.seed = static_cast<std::uint64_t>(cfg.get_long("run.seed", static_cast<long>(o.seed)));
  o.out_dir = cfg.get_string("run.out", o.out_dir);
  o.potential_spec = cfg.get_string("potential.expr", o.potential_spec);
}

Potential make_potential(const CommonOpts& o) {
  if (o.potential_spec == "builtin:appendix_d") return builtin_example_potential(o.dim);
  return parse_potential(o.potential_spec, o.dim);
}

void default_guess(const Potential& p, double* r_guess, Vec* tail_guess) {
  *r_guess = p.nbhd_r;
  *tail_guess = p.nbhd_tail;
}

void write_outputs(const std::string& out_dir, const std::string& stem, const json& summary,
                   const CsvWriter* csv) {
  atomic_write(out_dir + "/" + stem + ".json", summary.dump(2) + "\n");
  if (csv) atomic_write(out_dir + "/" + stem + ".csv", csv->str());
}

int cmd_audit(const CommonOpts& o, const std::string& face, int m) {
  const Potential pot = make_potential(o);
  double r_guess;
  Vec tail_guess;
  default_guess(pot, &r_guess, &tail_guess);

  json summary;
  CsvWriter csv({"quantity", "value"});
  bool pass = false;
  try {
    const AuditReport rep = audit_potential(pot, r_guess, tail_guess, m);
    summary["r_star"] = rep.critical_point.r;
    summary["tail_star"] = rep.critical_point.tail;
    summary["V_at_critical_point"] = rep.V_at_cp;
    summary["hessian_eigenvalues"] = rep.hessian_eigenvalues;
    summary["local_degree"] = rep.degree_defined ? json(rep.local_degree) : json(nullptr);
    summary["det_A_plus"] = rep.det_A_plus;
    summary["det_A_minus"] = rep.det_A_minus;
    summary["det_threshold"] = rep.det_threshold;
    summary["assumption_V"] = rep.assumption_V;
    summary["assumption_tilde_V"] = rep.assumption_tilde_V;
    csv.add_row({"r_star", format_double(rep.critical_point.r)});
    csv.add_row({"V_at_critical_point", format_double(rep.V_at_cp)});
    csv.add_row({"det_A_plus", format_double(rep.det_A_plus)});
    csv.add_row({"det_A_minus", format_double(rep.det_A_minus)});
    pass = rep.assumption_V && rep.assumption_tilde_V;

    std::cout << std::setprecision(12) << "critical point: r = " << rep.critical_point.r
              << ", V = " << rep.V_at_cp << "\n";
    std::cout << "eigenvalues:";
    for (double e : rep.hessian_eigenvalues) std::cout << ' ' << e;
    std::cout << "\nlocal degree: "
              << (rep.degree_defined ? std::to_string(rep.local_degree) : "undefined") << "\n";
    const double det_face = face == "minus" ? rep.det_A_minus : rep.det_A_plus;
    std::cout << "det_A (" << face << " face) = " << det_face
              << "  [threshold " << rep.det_threshold << "]\n";
  } catch (const std::exception& e) {
    summary["error"] = std::string("no critical point found (") + e.what() + ")";
    std::cout << "audit failed: no critical point found (" << e.what() << ")\n";
    pass = false;
  }
  summary["pass"] = pass;
  write_outputs(o.out_dir, "audit", summary, &csv);
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitPass : kExitCheckFailed;
}

int cmd_constants(const CommonOpts& o, int order, const std::string& cache) {
  const auto C = compute_constants_cached(o.dim, cache, order);
  const std::string fp = "radial_gauss#" + std::to_string(order);
  json summary;
  summary["dim"] = C.dim;
  summary["A1"] = C.A1;
  summary["A2"] = C.A2;
  summary["A3"] = C.A3;
  summary["A1_error"] = C.A1_err;
  summary["A2_error"] = C.A2_err;
  summary["A3_error"] = C.A3_err;
  summary["quadrature_fingerprint"] = fp;
  CsvWriter csv({"name", "dim", "value", "error", "fingerprint"});
  csv.add_row({"A1", std::to_string(o.dim), format_double(C.A1), format_double(C.A1_err), fp});
  csv.add_row({"A2", std::to_string(o.dim), format_double(C.A2), format_double(C.A2_err), fp});
  csv.add_row({"A3", std::to_string(o.dim), format_double(C.A3), format_double(C.A3_err), fp});
  write_outputs(o.out_dir, "constants", summary, &csv);
  std::cout << "A1 = " << C.A1 << "\nA2 = " << C.A2 << "\nA3 = " << C.A3 << "\n";
  return kExitPass;
}

int cmd_scaling(const CommonOpts& o, std::vector<int> n_values) {
  const Potential pot = make_potential(o);
  double r_guess;
  Vec tail_guess;
  default_guess(pot, &r_guess, &tail_guess);
  AuditReport rep;
  try {
    rep = audit_potential(pot, r_guess, tail_guess);
  } catch (const std::exception& e) {
    std::cout << "refusing: potential failed audit (" << e.what() << ")\n";
    return kExitCheckFailed;
  }
  if (!rep.assumption_V || !rep.assumption_tilde_V) {
    std::cout << "refusing: potential failed audit\n";
    return kExitCheckFailed;
  }
  if (n_values.empty())
    for (int n = 64; n <= 4096; n *= 2) n_values.push_back(n);
  const auto C = compute_constants(o.dim);
  const auto study =
      scaling_study(pot, C, n_values, rep.critical_point.r, rep.critical_point.tail);

  CsvWriter csv({"n", "mu_star"});
  CsvWriter full({"n", "t_star", "ystar", "mu_star", "grad_norm", "classification"});
  for (const auto& r : study.rows) {
    csv.add_row({std::to_string(r.n), format_double(r.mu_star)});
    std::string ys;
    for (std::size_t k = 0; k < r.tail_star.size(); ++k)
      ys += (k ? ";" : "") + format_double(r.tail_star[k]);
    full.add_row({std::to_string(r.n), format_double(r.t_star), ys, format_double(r.mu_star),
                  format_double(r.grad_norm), to_string(r.classification)});
  }
  json summary;
  summary["dim"] = o.dim;
  summary["fitted_exponent"] = study.fitted_exponent;
  summary["target_exponent"] = study.predicted_exponent;
  summary["fit_residual"] = study.fit_residual;
  const bool pass = std::abs(study.fitted_exponent - study.predicted_exponent) < 0.05;
  summary["pass"] = pass;
  write_outputs(o.out_dir, "scaling", summary, &csv);
  atomic_write(o.out_dir + "/scaling_full.csv", full.str());
  std::cout << "fitted exponent " << study.fitted_exponent << " (target "
            << study.predicted_exponent << ")\n"
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitPass : kExitCheckFailed;
}

int cmd_reduced(const CommonOpts& o, int n) {
  const Potential pot = make_potential(o);
  double r_guess;
  Vec tail_guess;
  default_guess(pot, &r_guess, &tail_guess);
  AuditReport rep;
  try {
    rep = audit_potential(pot, r_guess, tail_guess);
  } catch (const std::exception& e) {
    std::cout << "refusing: potential failed audit (" << e.what() << ")\n";
    return kExitCheckFailed;
  }
  if (!rep.assumption_V) {
    std::cout << "refusing: potential failed audit\n";
    return kExitCheckFailed;
  }
  const auto C = compute_constants(o.dim);
  const auto cp =
      find_reduced_critical_point(C, pot, n, rep.critical_point.r, rep.critical_point.tail);
  CsvWriter csv({"n", "t_star", "ystar", "mu_star", "grad_norm", "classification"});
  std::string ys;
  for (std::size_t k = 0; k < cp.tail.size(); ++k)
    ys += (k ? ";" : "") + format_double(cp.tail[k]);
  csv.add_row({std::to_string(n), format_double(cp.t), ys, format_double(cp.mu_star),
               format_double(cp.grad_norm), to_string(cp.classification)});
  json summary;
  summary["n"] = n;
  summary["t_star"] = cp.t;
  summary["ystar"] = cp.tail;
  summary["mu_star"] = cp.mu_star;
  summary["grad_norm"] = cp.grad_norm;
  summary["classification"] = to_string(cp.classification);
  write_outputs(o.out_dir, "reduced", summary, &csv);
  std::cout << "t* = " << cp.t << ", mu* = " << cp.mu_star << " ("
            << to_string(cp.classification) << ")\n";
  return kExitPass;
}

int cmd_residual(const CommonOpts& o, int n, double mu_base, int ladder) {
  const Potential pot = make_potential(o);
  std::vector<double> mus;
  for (int i = 0; i < ladder; ++i) mus.push_back(mu_base * std::pow(2.0, i));
  const double r0 = pot.nbhd_r;
  const auto study = residual_decay_study(pot, n, mus, r0, pot.nbhd_tail);
  CsvWriter csv({"mu", "residual_norm"});
  for (const auto& r : study.rows)
    csv.add_row({format_double(r.mu), format_double(r.norm)});
  json summary;
  summary["n"] = n;
  summary["fitted_slope"] = study.fitted_slope;
  summary["strictly_decreasing"] = study.strictly_decreasing;
  const bool pass = study.strictly_decreasing && study.fitted_slope <= -1.0;
  summary["pass"] = pass;
  write_outputs(o.out_dir, "residual", summary, &csv);
  std::cout << "slope " << study.fitted_slope
            << (study.strictly_decreasing ? " (strictly decreasing)" : " (not monotone)")
            << "\n"
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitPass : kExitCheckFailed;
}

int cmd_pohozaev(const CommonOpts& o, const std::string& preset, int order, double tol) {
  CsvWriter csv({"identity", "domain", "N", "order", "lhs", "rhs", "correction",
                 "discrepancy"});
  json summary;
  double worst_rel = 0.0;

  auto record = [&](const std::string& name, const std::string& domain, int N, int q,
                    const IdentityCheck& c) {
    csv.add_row({name, domain, std::to_string(N), std::to_string(q), format_double(c.lhs),
                 format_double(c.rhs), format_double(c.residual_correction),
                 format_double(c.discrepancy)});
    summary[name]["lhs"] = c.lhs;
    summary[name]["rhs"] = c.rhs;
    summary[name]["correction"] = c.residual_correction;
    summary[name]["relative_discrepancy"] = c.relative_discrepancy;
    worst_rel = std::max(worst_rel, c.relative_discrepancy);
  };

  if (preset == "gaussian-ball-3d") {
    const int N = 3;
    // u is off-center: a centered pair satisfies the identity trivially (0 = 0)
    auto gaussian = [N](double a, double c0) {
      ScalarField f;
      auto shifted = [c0](const Vec& y) {
        Vec z = y;
        z[0] -= c0;
        return z;
      };
      f.value = [a, shifted](const Vec& y) { return std::exp(-a * norm2(shifted(y))); };
      f.gradient = [a, shifted](const Vec& y) {
        Vec g = shifted(y);
        const double v = std::exp(-a * norm2(g));
        for (auto& x : g) x *= -2.0 * a * v;
        return g;
      };
      f.laplacian = [a, N, shifted](const Vec& y) {
        const double r2 = norm2(shifted(y));
        return (4.0 * a * a * r2 - 2.0 * a * N) * std::exp(-a * r2);
      };
      return f;
    };
    const ScalarField u = gaussian(1.0, 0.3);
    const ScalarField eta = gaussian(2.0, 0.0);
    auto V = [](const Vec&) { return 1.0; };
    auto Vi = [](const Vec&) { return 0.0; };
    auto gradV = [N](const Vec&) { return Vec(N, 0.0); };
    const Boundary ball = Boundary::make_ball(N, 1.0);
    record("translation", "ball", N, order,
           translation_identity_check(u, eta, V, Vi, 0, ball, order));
    record("dilation", "ball", N, order,
           dilation_identity_check(u, eta, V, gradV, Vec{0.3, 0.0, 0.0}, ball, order));
  } else if (preset == "bubble-ball-5d") {
    const int N = 5;
    BubbleParams b(N, Vec(N, 0.0), 1.0);
    const ScalarField u = b.field();
    const ScalarField eta = b.translation_derivative_field(0);
    auto V = [](const Vec&) { return 0.0; };
    auto Vi = [](const Vec&) { return 0.0; };
    auto gradV = [N](const Vec&) { return Vec(N, 0.0); };
    const Boundary ball = Boundary::make_ball(N, 2.0);
    record("translation", "ball", N, order,
           translation_identity_check(u, eta, V, Vi, 0, ball, order));
    const ScalarField eta2 = b.scale_derivative_field();
    record("dilation", "ball", N, order,
           dilation_identity_check(u, eta2, V, gradV, Vec(N, 0.0), ball, order));
  } else {
    std::cerr << "unknown preset: " << preset << "\n";
    return 1;
  }

  const bool pass = worst_rel < tol;
  summary["worst_relative_discrepancy"] = worst_rel;
  summary["pass"] = pass;
  write_outputs(o.out_dir, "pohozaev", summary, &csv);
  std::cout << "worst relative discrepancy " << worst_rel << "\n"
            << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bubblekit: multi-bubble construction and audit toolkit"};
  app.require_subcommand(1);

  CommonOpts audit_o, const_o, scaling_o, reduced_o, residual_o, poho_o;
  std::string face = "plus";
  int audit_m = 8;
  int const_order = 200;
  std::string const_cache;
  std::vector<int> n_values;
  int reduced_n = 64;
  int residual_n = 8;
  double mu_base = 60.0;
  int mu_ladder = 4;
  std::string preset = "gaussian-ball-3d";
  int poho_order = 40;
  double poho_tol = 1e-6;

  auto* a = app.add_subcommand("audit", "verify assumptions (V) and the matrix determinant");
  add_common(a, audit_o);
  a->add_option("--face", face, "sector face: plus or minus");
  a->add_option("--m", audit_m, "ring bubble count for the matrix");

  auto* c = app.add_subcommand("constants", "compute the expansion constants A1, A2, A3");
  add_common(c, const_o);
  c->add_option("--order", const_order, "radial Gauss order");
  c->add_option("--cache", const_cache, "constants cache file");

  auto* s = app.add_subcommand("scaling", "fit the concentration-rate power law");
  add_common(s, scaling_o);
  s->add_option("--n-values", n_values, "ring sizes (default 64..4096)");

  auto* r = app.add_subcommand("reduced", "find the reduced critical point for one n");
  add_common(r, reduced_o);
  r->add_option("--n", reduced_n, "ring size");

  auto* d = app.add_subcommand("residual", "residual norm decay across a mu ladder");
  add_common(d, residual_o);
  d->add_option("--n", residual_n, "inner ring size");
  d->add_option("--mu-base", mu_base, "base concentration scale");
  d->add_option("--mu-ladder", mu_ladder, "number of doublings");

  auto* p = app.add_subcommand("pohozaev", "corrected identity checks");
  add_common(p, poho_o);
  p->add_option("--preset", preset, "gaussian-ball-3d or bubble-ball-5d");
  p->add_option("--order", poho_order, "quadrature order");
  p->add_option("--tol", poho_tol, "relative discrepancy tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (a->parsed()) {
      apply_config(audit_o);
      return cmd_audit(audit_o, face, audit_m);
    }
    if (c->parsed()) {
      apply_config(const_o);
      return cmd_constants(const_o, const_order, const_cache);
    }
    if (s->parsed()) {
      apply_config(scaling_o);
      return cmd_scaling(scaling_o, n_values);
    }
    if (r->parsed()) {
      apply_config(reduced_o);
      return cmd_reduced(reduced_o, reduced_n);
    }
    if (d->parsed()) {
      apply_config(residual_o);
      return cmd_residual(residual_o, residual_n, mu_base, mu_ladder);
    }
    if (p->parsed()) {
      apply_config(poho_o);
      return cmd_pohozaev(poho_o, preset, poho_order, poho_tol);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

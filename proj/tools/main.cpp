#include <iostream>

#include "CLI11.hpp"
#include "vexlab/harness.hpp"

using namespace vexlab;

namespace {

CaseSpec load_case(const std::string& path) {
  return case_from_json(json::parse(read_text(path)));
}

void apply_overrides(CaseSpec& spec, double h, int seed) {
  if (h > 0) spec.h = h;
  if (seed >= 0) spec.seed = unsigned(seed);
}

int cmd_solve(const std::string& case_file, double h, int seed, double tol,
              const std::string& out_prefix) {
  CaseSpec spec = load_case(case_file);
  apply_overrides(spec, h, seed);
  CaseSetup cs = build_case(spec);
  SolveOptions opts;
  if (tol > 0) opts.tol = tol;
  SolveResult r = solve_dirichlet(cs.model, cs.mu, cs.mask, opts);
  json meta = to_json(r);
  meta["case"] = case_to_json(spec);
  if (!out_prefix.empty()) {
    save_grid_function(out_prefix + "_u.field", r.u);
    save_grid_function(out_prefix + "_dumag.field", r.Du.magnitude_field());
    save_mask(out_prefix + "_mask.bin", *cs.mask);
    write_text(out_prefix + "_solve.json", meta.dump(2) + "\n");
  }
  std::cout << meta.dump(2) << "\n";
  return r.converged ? 0 : 1;
}

int cmd_certify(const std::string& mask_file, double r0, int dirs, int radii) {
  MaskPtr mask = load_mask(mask_file);
  auto cert = certify_reifenberg(*mask, r0, dirs, radii);
  std::cout << to_json(cert).dump(2) << "\n";
  return 0;
}

int cmd_norm(const std::string& f_file, const std::string& p_file,
             const std::string& w_file) {
  auto [g, v] = load_field(f_file);
  auto mask = make_rect_domain(g.n, g.lo, g.hi, g.h);
  GridFunction f(mask);
  f.v = v;
  ExponentField p = load_exponent(p_file);
  json out;
  out["modular"] = modular(f, p);
  out["luxemburg"] = luxemburg_norm(f, p);
  if (!w_file.empty()) {
    WeightField w = load_weight(w_file);
    out["weighted_modular"] = weighted_modular(f, p, w.v);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_weights(const std::string& w_file, int samples, int seed, double ap_p) {
  WeightField w = load_weight(w_file);
  json out;
  auto fit = fit_ainfty_constants(w, samples, unsigned(seed));
  out["ainfty"] = to_json(fit);
  out["validate_pass_fraction"] = validate_ainfty(w, fit, samples, unsigned(seed) + 1);
  if (ap_p >= 1)
    out["ap_constant"] =
        ap_constant(w, ap_p, default_ball_sample(w.grid, 32, unsigned(seed)));
  std::cout << out.dump(2) << "\n";
  return fit.ok ? 0 : 1;
}

int cmd_maximal(const std::string& op, const std::string& mu_file,
                const std::string& f_file, const std::string& mask_file,
                const std::string& out_file) {
  MaskPtr mask = load_mask(mask_file);
  auto radii = dyadic_radii(mask->grid.h, mask->diameter);
  GridFunction result;
  if (op == "hl") {
    if (f_file.empty()) throw CLI::ValidationError("--f required for op hl");
    result = hl_maximal(load_grid_function(f_file, mask), radii);
  } else {
    if (mu_file.empty()) throw CLI::ValidationError("--mu required for op m1/i1");
    RadonMeasure mu = load_measure(mu_file, mask);
    result = op == "m1" ? frac_maximal_1(mu, mask, radii)
                        : riesz_potential_1(mu, mask);
  }
  if (!out_file.empty()) save_grid_function(out_file, result);
  json out{{"op", op}, {"max", result.max_abs()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_cascade(const std::string& case_file, double h, int seed, double cx, double cy,
                double R, bool boundary) {
  CaseSpec spec = load_case(case_file);
  apply_overrides(spec, h, seed);
  spec.do_cascade = true;
  spec.boundary = boundary;
  if (R > 0) spec.cascade_R = R;
  CaseSetup cs = build_case(spec);
  SolveOptions opts;
  opts.tol = 1e-7;
  SolveResult u = solve_dirichlet(cs.model, cs.mu, cs.mask, opts);
  ComparisonConfig cfg;
  cfg.R = spec.cascade_R;
  cfg.R0 = cfg.R_omega = cfg.R_a = cfg.K0_inv = 10 * cfg.R;
  cfg.center = {cx, cy, 0};
  CascadeResult cr =
      boundary ? run_boundary_cascade(cs.model, cs.mu, u, cfg, cfg.center, {0, 1, 0}, opts)
               : run_interior_cascade(cs.model, cs.mu, u, cfg, opts);
  std::cout << to_json(cr).dump(2) << "\n";
  return cr.complete ? 0 : 1;
}

int cmd_case_report(const std::string& case_file, double h, int seed,
                    const std::string& section) {
  CaseSpec spec = load_case(case_file);
  apply_overrides(spec, h, seed);
  CaseRow row = run_case(spec);
  if (!row.ok) {
    std::cerr << "case failed: " << row.error << "\n";
    return 1;
  }
  if (section == "goodlambda") {
    std::cout << row.detail["level_sets"].dump(2) << "\n";
  } else {
    json out{{"main", row.detail["main"]},
             {"dual", row.detail["dual"]},
             {"corollaries", row.detail["corollaries"]}};
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

int cmd_suite(const std::string& profile, int count, int seed,
              const std::string& out_dir) {
  auto cases = generate_suite(profile, count, unsigned(seed));
  SuiteResult suite = run_suite(cases);
  if (!out_dir.empty()) {
    write_text(out_dir + "/suite.csv", suite_csv(suite));
    json jcases = json::array();
    for (const auto& c : cases) jcases.push_back(case_to_json(c));
    write_text(out_dir + "/cases.json", jcases.dump(2) + "\n");
    for (std::size_t i = 0; i < suite.rows.size(); ++i)
      write_text(out_dir + "/" + suite.rows[i].id + ".json",
                 suite.rows[i].detail.dump(2) + "\n");
    write_text(out_dir + "/metadata.json", suite.metadata.dump(2) + "\n");
  }
  std::cout << suite.metadata.dump(2) << "\n";
  return suite.metadata["failures"].get<int>() == 0 ? 0 : 1;
}

int cmd_refine(const std::string& case_file, int seed,
               const std::vector<double>& h_list, const std::string& svg_out) {
  CaseSpec spec = load_case(case_file);
  apply_overrides(spec, 0, seed);
  RefinementStudy st = refinement_study(spec, h_list);
  json out;
  out["max_drift"] = st.max_drift;
  out["rows"] = json::array();
  std::vector<double> xs, main_r, bfit;
  for (const auto& r : st.rows) {
    out["rows"].push_back({{"h", r.h},
                           {"ok", r.row.ok},
                           {"ratio_main", r.row.ratio_main},
                           {"B_fit", r.row.B_fit},
                           {"ratio_lqw", r.row.ratio_lqw},
                           {"cascade_du_w", r.row.cascade_du_w}});
    xs.push_back(std::log10(1.0 / r.h));
    main_r.push_back(r.row.ratio_main);
    bfit.push_back(r.row.B_fit);
  }
  if (!svg_out.empty())
    write_text(svg_out, svg_line_chart(xs, {{"main ratio", main_r}, {"B fit", bfit}},
                                       "log10(1/h)", "ratio"));
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variable-exponent elliptic estimate laboratory"};
  app.require_subcommand(1);

  std::string case_file, mask_file, f_file, p_file, w_file, mu_file, out, op, profile;
  double h = 0, tol = 0, r0 = 0.25, R = 0, cx = 0.5, cy = 0.5, ap_p = 0;
  int seed = -1, dirs = 32, radii = 3, samples = 400, count = 5;
  bool boundary = false;
  std::vector<double> h_list;

  auto* solve = app.add_subcommand("solve", "solve a case");
  solve->add_option("--case", case_file)->required();
  solve->add_option("--h", h);
  solve->add_option("--seed", seed);
  solve->add_option("--tol", tol);
  solve->add_option("--out", out);

  auto* certify = app.add_subcommand("certify-domain", "Reifenberg certificate");
  certify->add_option("--mask", mask_file)->required();
  certify->add_option("--r0", r0)->required();
  certify->add_option("--dirs", dirs);
  certify->add_option("--radii", radii);

  auto* norm = app.add_subcommand("norm", "variable-exponent norms");
  norm->add_option("--f", f_file)->required();
  norm->add_option("--p", p_file)->required();
  norm->add_option("--w", w_file);

  auto* weights = app.add_subcommand("weights", "A_infinity / A_p fits");
  weights->add_option("--w", w_file)->required();
  weights->add_option("--samples", samples);
  weights->add_option("--seed", seed);
  weights->add_option("--ap", ap_p);

  auto* maximal = app.add_subcommand("maximal", "maximal operators");
  maximal->add_option("--op", op)->required()->check(CLI::IsMember({"m1", "hl", "i1"}));
  maximal->add_option("--mu", mu_file);
  maximal->add_option("--f", f_file);
  maximal->add_option("--mask", mask_file)->required();
  maximal->add_option("--out", out);

  auto* cascade = app.add_subcommand("cascade", "comparison cascade");
  cascade->add_option("--case", case_file)->required();
  cascade->add_option("--h", h);
  cascade->add_option("--seed", seed);
  cascade->add_option("--center-x", cx);
  cascade->add_option("--center-y", cy);
  cascade->add_option("--R", R);
  cascade->add_flag("--boundary", boundary);

  auto* gl = app.add_subcommand("goodlambda", "level sets and good-lambda fit");
  gl->add_option("--case", case_file)->required();
  gl->add_option("--h", h);
  gl->add_option("--seed", seed);

  auto* est = app.add_subcommand("estimate", "main estimate and corollaries");
  est->add_option("--case", case_file)->required();
  est->add_option("--h", h);
  est->add_option("--seed", seed);

  auto* suite = app.add_subcommand("suite", "generate and run a suite");
  suite->add_option("--profile", profile)->required();
  suite->add_option("--count", count);
  suite->add_option("--seed", seed);
  suite->add_option("--out", out);

  auto* refine = app.add_subcommand("refine", "refinement study");
  refine->add_option("--case", case_file)->required();
  refine->add_option("--seed", seed);
  refine->add_option("--h-list", h_list)->required()->expected(-1);
  refine->add_option("--svg", out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(case_file, h, seed, tol, out);
    if (*certify) return cmd_certify(mask_file, r0, dirs, radii);
    if (*norm) return cmd_norm(f_file, p_file, w_file);
    if (*weights) return cmd_weights(w_file, samples, seed < 0 ? 1 : seed, ap_p);
    if (*maximal) return cmd_maximal(op, mu_file, f_file, mask_file, out);
    if (*cascade) return cmd_cascade(case_file, h, seed, cx, cy, R, boundary);
    if (*gl) return cmd_case_report(case_file, h, seed, "goodlambda");
    if (*est) return cmd_case_report(case_file, h, seed, "estimate");
    if (*suite) return cmd_suite(profile, count, seed < 0 ? 1 : seed, out);
    if (*refine) return cmd_refine(case_file, seed, h_list, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

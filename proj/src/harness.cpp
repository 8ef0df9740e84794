#include "vexlab/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace vexlab {

json case_to_json(const CaseSpec& c) {
  json atoms = json::array();
  for (const auto& a : c.atoms)
    atoms.push_back({a.point[0], a.point[1], a.point[2], a.mass});
  return json{{"id", c.id},
              {"profile", c.profile},
              {"seed", c.seed},
              {"h", c.h},
              {"domain", c.domain},
              {"saw_amplitude", c.saw_amplitude},
              {"saw_period", c.saw_period},
              {"p_lo", c.p_lo},
              {"p_hi", c.p_hi},
              {"q_lo", c.q_lo},
              {"q_hi", c.q_hi},
              {"s", c.s},
              {"alpha", c.alpha},
              {"atoms", atoms},
              {"has_density", c.has_density},
              {"density_amp", c.density_amp},
              {"do_cascade", c.do_cascade},
              {"boundary", c.boundary},
              {"cascade_R", c.cascade_R}};
}

CaseSpec case_from_json(const json& j) {
  CaseSpec c;
  c.id = j.value("id", "");
  c.profile = j.value("profile", "");
  c.seed = j.value("seed", 1u);
  c.h = j.value("h", 1.0 / 64);
  c.domain = j.value("domain", "rect");
  c.saw_amplitude = j.value("saw_amplitude", 0.0);
  c.saw_period = j.value("saw_period", 0.0);
  c.p_lo = j.value("p_lo", 2.0);
  c.p_hi = j.value("p_hi", 2.0);
  c.q_lo = j.value("q_lo", 2.0);
  c.q_hi = j.value("q_hi", 2.0);
  c.s = j.value("s", 1.0);
  c.alpha = j.value("alpha", 0.0);
  for (const auto& a : j.value("atoms", json::array()))
    c.atoms.push_back({{a[0], a[1], a[2]}, a[3]});
  c.has_density = j.value("has_density", false);
  c.density_amp = j.value("density_amp", 0.0);
  c.do_cascade = j.value("do_cascade", false);
  c.boundary = j.value("boundary", false);
  c.cascade_R = j.value("cascade_R", 0.0);
  return c;
}

namespace {

ExponentField banded_field(const Grid& g, double lo, double hi, double diam,
                           double phase) {
  if (hi - lo < 1e-12) return ExponentField::constant(g, lo);
  double delta = hi - lo;
  auto f = [lo, delta, phase](const Vec& x) {
    double wgt =
        0.5 * (1.0 + std::sin(2 * M_PI * x[0] + phase) * std::sin(2 * M_PI * x[1]));
    return lo + delta * wgt;
  };
  // Lipschitz bound of the profile; the log modulus must dominate
  // min(delta, L r) for all r up to the diameter.
  double L = 5.0 * delta;
  double c_mod = 1.1 * delta * std::log(M_E + L / std::max(delta, 1e-12));
  c_mod = std::max(c_mod, 1.1 * delta * std::log(M_E + 1.0 / diam));
  auto table = log_modulus_table(c_mod, g.h / 4, 2 * diam);
  return ExponentField::from(g, f, lo, hi, table);
}

std::vector<std::size_t> strided_cells(const DomainMask& m, std::size_t cap) {
  std::vector<std::size_t> cells;
  for (std::size_t id = 0; id < m.inside.size(); ++id)
    if (m.inside[id]) cells.push_back(id);
  if (cells.size() <= cap) return cells;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cap; ++i) out.push_back(cells[i * cells.size() / cap]);
  return out;
}

Vec interior_center(const DomainMask& m) {
  Vec c{0, 0, 0};
  std::size_t cnt = 0;
  for (std::size_t id = 0; id < m.inside.size(); ++id)
    if (m.inside[id]) {
      c = c + m.grid.cell_center(id);
      ++cnt;
    }
  c = (1.0 / double(cnt)) * c;
  double best = 1e300;
  Vec out = c;
  for (std::size_t id = 0; id < m.inside.size(); ++id)
    if (m.inside[id]) {
      double d = norm(m.grid.cell_center(id) - c);
      if (d < best) {
        best = d;
        out = m.grid.cell_center(id);
      }
    }
  return out;
}

}  // namespace

CaseSetup build_case(const CaseSpec& spec) {
  CaseSetup cs;
  Vec lo{0, 0, 0}, hi{1, 1, 1};
  if (spec.domain == "rect")
    cs.mask = make_rect_domain(2, lo, hi, spec.h);
  else if (spec.domain == "sawtooth")
    cs.mask = make_sawtooth_domain(lo, hi, spec.h, spec.saw_amplitude, spec.saw_period);
  else
    throw std::invalid_argument("build_case: unknown domain " + spec.domain);
  const Grid& g = cs.mask->grid;
  double diam = cs.mask->diameter;

  Rng rng(spec.seed);
  double phase = 2 * M_PI * rng.uni();
  cs.p = banded_field(g, spec.p_lo, spec.p_hi, diam, phase);
  cs.p.require_p_bounds(g.n);
  cs.q = banded_field(g, spec.q_lo, spec.q_hi, diam, phase + 1.0);

  cs.w = spec.alpha == 0 ? WeightField::constant(g, 1.0)
                         : power_weight(spec.alpha, {0.5, 0.5, 0}, g);

  cs.mu.atoms = spec.atoms;
  if (spec.has_density) {
    double amp = spec.density_amp;
    double k1 = 1 + rng.uni_int(0, 2), k2 = 1 + rng.uni_int(0, 2);
    cs.mu.density = GridFunction::from(cs.mask, [amp, k1, k2](const Vec& x) {
      return 0.5 * amp *
             (1.0 + std::sin(2 * M_PI * k1 * x[0]) * std::sin(2 * M_PI * k2 * x[1]));
    });
  }

  cs.model = NonlinearityModel::plaplace(cs.p, spec.s);

  cs.log_holder = check_log_holder(cs.p, diam, 2048, spec.seed);
  if (!cs.log_holder.dominated)
    throw std::runtime_error("build_case: exponent oscillation above its modulus");

  double R0 = std::min(diam / 4.0, 0.25);
  cs.certificate = certify_reifenberg(*cs.mask, R0, 32, 3, 32);

  cs.structure = verify_structure(cs.model, strided_cells(*cs.mask, 64), 6, 6);
  if (!cs.structure.monotone)
    throw std::runtime_error("build_case: nonlinearity failed monotonicity");
  cs.model.Lambda1 = std::max(1.0, cs.structure.Lambda1_fit) * 1.05;
  cs.model.Lambda2 = std::max(1e-6, std::min(1.0, cs.structure.Lambda2_fit) * 0.95);
  return cs;
}

CaseRow run_case(const CaseSpec& spec) {
  CaseRow row;
  row.id = spec.id;
  row.profile = spec.profile;
  row.h = spec.h;
  row.seed = spec.seed;
  try {
    CaseSetup cs = build_case(spec);
    const Grid& g = cs.mask->grid;

    SolveOptions opts;
    opts.tol = 1e-7;
    opts.max_iter = 60;
    SolveResult u = solve_dirichlet(cs.model, cs.mu, cs.mask, opts);
    row.converged = u.converged;
    row.residual = u.residual;
    row.detail["solve"] = to_json(u);
    row.detail["case"] = case_to_json(spec);
    row.detail["certificate_delta"] = cs.certificate.delta;

    Vec center = interior_center(*cs.mask);
    double R = std::max(cs.mask->diameter / 8.0, 6 * g.h);
    MaskPtr regionR = ball_region(cs.mask, center, R);
    MaskPtr region2R = ball_region(cs.mask, center, 2 * R);

    GoodLambdaConfig glc;
    LevelSetReport ls = level_sets(u, cs.mu, cs.q, cs.p, cs.w, glc, regionR, region2R);
    row.B_fit = ls.B_fit;
    double denom = std::max(ls.direct, 1e-300);
    row.layercake_err = std::abs(ls.layercake - ls.direct) / denom;
    row.detail["level_sets"] = to_json(ls);

    EstimateReport main = assemble_main_estimate(u, cs.mu, cs.q, cs.p, cs.w, glc, cs.mask);
    EstimateReport dual = assemble_dual_estimate(u, cs.mu, cs.q, cs.p, cs.w, glc, cs.mask);
    row.ratio_main = main.ratio;
    row.ratio_dual = dual.ratio;
    row.detail["main"] = to_json(main);
    row.detail["dual"] = to_json(dual);

    auto cors = assemble_corollaries(u, cs.mu, cs.q, cs.p, cs.w, glc, cs.mask);
    row.detail["corollaries"] = json::array();
    for (const auto& c : cors) {
      row.detail["corollaries"].push_back(to_json(c));
      if (c.skipped) continue;
      if (c.name == "sobolev-modular") row.ratio_sobolev = c.ratio;
      if (c.name == "lqw") row.ratio_lqw = c.ratio;
      if (c.name == "dual-weight") row.ratio_dualw = c.ratio;
      if (c.name == "morrey") row.ratio_morrey = c.ratio;
    }

    if (spec.do_cascade) {
      ComparisonConfig cfg;
      cfg.R = spec.cascade_R;
      cfg.R0 = cfg.R_omega = cfg.R_a = cfg.K0_inv = 10 * spec.cascade_R;
      CascadeResult cr;
      if (spec.boundary) {
        // Bottom boundary point nearest the horizontal middle.
        Vec target{0.5, 0.0, 0};
        double best = 1e300;
        Vec x0 = target;
        for (auto id : cs.mask->boundary_cells) {
          Vec x = g.cell_center(id);
          double d = std::abs(x[0] - 0.5) + x[1];
          if (d < best) {
            best = d;
            x0 = x;
          }
        }
        cfg.center = x0;
        cfg.delta = std::max(cs.certificate.delta, 0.05);
        cr = run_boundary_cascade(cs.model, cs.mu, u, cfg, x0, {0, 1, 0}, opts);
      } else {
        cfg.center = {0.5, 0.5, 0};
        cr = run_interior_cascade(cs.model, cs.mu, u, cfg, opts);
      }
      row.F_value = cr.F_value;
      row.cascade_du_w = cr.ratio_du_w;
      row.cascade_hw = cr.ratio_hw;
      row.cascade_linf = cr.ratio_linf;
      row.cascade_vh = cr.ratio_vh;
      row.detail["cascade"] = to_json(cr);
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::vector<CaseSpec> generate_suite(const std::string& profile, int count,
                                     unsigned seed) {
  if (profile != "smoke" && profile != "interior" && profile != "boundary" &&
      profile != "corollaries")
    throw std::invalid_argument("generate_suite: unknown profile " + profile);
  std::vector<CaseSpec> out;
  Rng rng(std::uint64_t(seed) * 0x9e3779b97f4a7c15ull + 1);
  for (int i = 0; i < count; ++i) {
    CaseSpec c;
    c.profile = profile;
    c.seed = seed * 1000 + unsigned(i);
    c.id = profile + "-" + std::to_string(seed) + "-" + std::to_string(i);
    if (profile == "smoke") {
      c.h = 1.0 / 32;
      double mid = rng.uni(1.95, 2.05), wid = rng.uni(0.0, 0.1);
      c.p_lo = mid - wid / 2;
      c.p_hi = mid + wid / 2;
      c.q_lo = c.q_hi = 2;
      int na = rng.uni_int(0, 2);
      for (int a = 0; a < na; ++a)
        c.atoms.push_back({{rng.uni(0.25, 0.75), rng.uni(0.25, 0.75), 0},
                           rng.uni(0.1, 0.5)});
    } else if (profile == "interior") {
      c.h = 1.0 / 64;
      double mid = rng.uni(1.9, 2.3), wid = rng.uni(0.0, 0.2);
      c.p_lo = std::max(1.8, mid - wid / 2);
      c.p_hi = std::min(2.4, mid + wid / 2);
      c.q_lo = c.q_hi = 2;
      c.do_cascade = true;
      c.cascade_R = 0.05;
      int na = rng.uni_int(1, 3);
      for (int a = 0; a < na; ++a)
        c.atoms.push_back({{rng.uni(0.2, 0.8), rng.uni(0.2, 0.8), 0},
                           rng.uni(0.1, 1.0)});
    } else if (profile == "boundary") {
      c.h = 1.0 / 64;
      c.domain = "sawtooth";
      c.saw_amplitude = rng.uni(0.02, 0.1);
      c.saw_period = 0.25;
      double mid = rng.uni(1.95, 2.2), wid = rng.uni(0.0, 0.15);
      c.p_lo = mid - wid / 2;
      c.p_hi = mid + wid / 2;
      c.q_lo = c.q_hi = 2;
      c.do_cascade = true;
      c.boundary = true;
      c.cascade_R = 0.06;
      int na = rng.uni_int(1, 2);
      for (int a = 0; a < na; ++a)
        c.atoms.push_back({{rng.uni(0.25, 0.75), rng.uni(0.35, 0.8), 0},
                           rng.uni(0.1, 0.8)});
    } else {  // corollaries
      c.h = 1.0 / 64;
      double lo = rng.uni(1.9, 2.3), wid = rng.uni(0.0, 0.2);
      c.p_lo = lo;
      c.p_hi = std::min(2.5, lo + wid);
      double qv = rng.uni(1.0, 3.0);
      c.q_lo = c.q_hi = qv;
      c.alpha = rng.uni(-0.5, 1.0);
      int kind = i % 5;
      if (kind == 0) {
        // μ = 0 row.
      } else if (kind % 2 == 1) {
        c.has_density = true;
        c.density_amp = rng.uni(0.5, 4.0);
      } else {
        int na = rng.uni_int(1, 3);
        for (int a = 0; a < na; ++a)
          c.atoms.push_back({{rng.uni(0.2, 0.8), rng.uni(0.2, 0.8), 0},
                             rng.uni(0.1, 1.0)});
      }
    }
    out.push_back(c);
  }
  return out;
}

SuiteResult run_suite(const std::vector<CaseSpec>& cases) {
  SuiteResult suite;
  suite.rows.resize(cases.size());
  int workers = 1;
  if (const char* env = std::getenv("VEXLAB_WORKERS"))
    workers = std::max(1, std::atoi(env));
  workers = std::min<int>(workers, std::max<std::size_t>(cases.size(), 1));

  auto work = [&](int t) {
    for (std::size_t i = std::size_t(t); i < cases.size(); i += std::size_t(workers))
      suite.rows[i] = run_case(cases[i]);
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  double max_B = 0, max_main = 0;
  int failures = 0;
  bool all_finite = true;
  for (const auto& r : suite.rows) {
    if (!r.ok) ++failures;
    max_B = std::max(max_B, r.B_fit);
    max_main = std::max(max_main, r.ratio_main);
    if (!std::isfinite(r.ratio_main) || !std::isfinite(r.B_fit)) all_finite = false;
  }
  suite.metadata = json{{"workers", workers},
                        {"case_count", cases.size()},
                        {"failures", failures},
                        {"max_B_fit", max_B},
                        {"max_ratio_main", max_main},
                        {"all_finite", all_finite}};
  return suite;
}

std::string suite_csv(const SuiteResult& suite) {
  std::ostringstream os;
  os.precision(12);
  os << "id,profile,h,seed,ok,converged,residual,B_fit,layercake_err,ratio_main,"
        "ratio_dual,ratio_sobolev,ratio_lqw,ratio_dualw,ratio_morrey,F_value,"
        "cascade_du_w,cascade_hw,cascade_linf,cascade_vh,error\n";
  for (const auto& r : suite.rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << r.id << ',' << r.profile << ',' << r.h << ',' << r.seed << ',' << r.ok << ','
       << r.converged << ',' << r.residual << ',' << r.B_fit << ',' << r.layercake_err
       << ',' << r.ratio_main << ',' << r.ratio_dual << ',' << r.ratio_sobolev << ','
       << r.ratio_lqw << ',' << r.ratio_dualw << ',' << r.ratio_morrey << ','
       << r.F_value << ',' << r.cascade_du_w << ',' << r.cascade_hw << ','
       << r.cascade_linf << ',' << r.cascade_vh << ',' << err << '\n';
  }
  return os.str();
}

RefinementStudy refinement_study(const CaseSpec& base,
                                 const std::vector<double>& h_list) {
  if (h_list.size() < 3)
    throw std::invalid_argument("refinement_study: need at least 3 grid sizes");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1]))
      throw std::invalid_argument("refinement_study: h values must decrease");
  RefinementStudy st;
  for (double h : h_list) {
    CaseSpec c = base;
    c.h = h;
    st.rows.push_back({h, run_case(c)});
  }
  auto drift = [&](auto get) {
    for (std::size_t i = 0; i + 1 < st.rows.size(); ++i) {
      double a = get(st.rows[i].row), b = get(st.rows[i + 1].row);
      if (a > 0 && b > 0) st.max_drift = std::max(st.max_drift, std::abs(b / a - 1.0));
    }
  };
  drift([](const CaseRow& r) { return r.ratio_main; });
  drift([](const CaseRow& r) { return r.B_fit; });
  drift([](const CaseRow& r) { return r.ratio_lqw; });
  drift([](const CaseRow& r) { return r.ratio_morrey; });
  drift([](const CaseRow& r) { return r.cascade_du_w; });
  drift([](const CaseRow& r) { return r.cascade_hw; });
  return st;
}

std::string svg_line_chart(
    const std::vector<double>& x,
    const std::vector<std::pair<std::string, std::vector<double>>>& series,
    const std::string& x_label, const std::string& y_label) {
  const int W = 640, H = 400, ML = 60, MR = 20, MT = 20, MB = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (double v : x) {
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  for (const auto& [name, ys] : series)
    for (double v : ys) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto px = [&](double v) {
    return ML + (v - xmin) / (xmax - xmin) * (W - ML - MR);
  };
  auto py = [&](double v) {
    return H - MB - (v - ymin) / (ymax - ymin) * (H - MT - MB);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                 "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
     << H - MB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
     << H - MB << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (W / 2) << "\" y=\"" << H - 12 << "\" font-size=\"13\">"
     << x_label << "</text>\n";
  os << "<text x=\"14\" y=\"" << (H / 2)
     << "\" font-size=\"13\" transform=\"rotate(-90 14 " << (H / 2) << ")\">" << y_label
     << "</text>\n";
  int ci = 0;
  for (const auto& [name, ys] : series) {
    const char* col = colors[ci % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < ys.size(); ++i)
      os << px(x[i]) << ',' << py(ys[i]) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << W - MR - 150 << "\" y=\"" << MT + 16 * (ci + 1)
       << "\" font-size=\"12\" fill=\"" << col << "\">" << name << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace vexlab

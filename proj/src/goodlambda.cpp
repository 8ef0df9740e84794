#include "vexlab/goodlambda.hpp"

#include <algorithm>

namespace vexlab {

namespace {

std::vector<std::size_t> cells_of(const DomainMask& m) {
  std::vector<std::size_t> out;
  for (std::size_t id = 0; id < m.inside.size(); ++id)
    if (m.inside[id]) out.push_back(id);
  return out;
}

double weighted_cell_sum(const std::vector<std::size_t>& cells, const WeightField& w) {
  double s = 0;
  for (auto id : cells) s += w.at(id);
  return s * w.grid.cell_volume();
}

}  // namespace

double default_sigma0(int n, double gamma1) {
  return 0.5 * std::min(double(n) * (gamma1 - 1.0) / (n - 1.0), double(n));
}

LevelSetReport level_sets(const SolveResult& u, const RadonMeasure& mu,
                          const ExponentField& q, const ExponentField& p,
                          const WeightField& w, GoodLambdaConfig& cfg,
                          const MaskPtr& regionR, const MaskPtr& region2R) {
  if (!(cfg.A0 > 1)) throw std::invalid_argument("level_sets: A0 must exceed 1");
  const Grid& g = regionR->grid;
  auto cellsR = cells_of(*regionR);
  auto cells2R = cells_of(*region2R);
  for (auto id : cellsR)
    if (!region2R->is_inside(id))
      throw std::invalid_argument("level_sets: regions not nested");

  cfg.q_minus = q.min_over(cells2R);
  cfg.q_plus = q.max_over(cells2R);
  if (cfg.sigma0 == 0) cfg.sigma0 = default_sigma0(g.n, p.gamma_lo);

  // Mf = M(|Du|^{q(x)/q_-} χ_{Ω_2R}), evaluated over Ω_2R, read on Ω_R.
  GridFunction chi(region2R);
  for (auto id : cells2R)
    chi.v[id] = std::pow(u.Du.magnitude(id), q.at(id) / cfg.q_minus);
  auto radii = dyadic_radii(g.h, region2R->diameter > 0 ? region2R->diameter : 1.0);
  GridFunction Mf = hl_maximal(chi, radii);

  GridFunction M1 = frac_maximal_1(mu, regionR, radii);

  LevelSetReport rep;
  double du_mod = 0;
  for (auto id : cells2R) du_mod += std::pow(u.Du.magnitude(id), 1.0 + cfg.sigma0);
  du_mod /= double(cells2R.size());
  cfg.lambda0 = du_mod / cfg.epsilon;

  double mmax = 0;
  for (auto id : cellsR) mmax = std::max(mmax, Mf.v[id]);
  if (cfg.lambda_grid.empty()) {
    double lo = std::max(cfg.lambda0 / 100.0, 1e-12);
    double hi = std::max(2.0 * mmax, lo * 2.0);
    int np = std::max(cfg.grid_points, 2);
    for (int i = 0; i < np; ++i)
      cfg.lambda_grid.push_back(lo * std::pow(hi / lo, double(i) / (np - 1)));
  }

  double prev_g = 1e300;
  bool any_g = false;
  for (double lam : cfg.lambda_grid) {
    double we = 0, wg = 0;
    for (auto id : cellsR) {
      bool inG = Mf.v[id] > lam;
      double barrier =
          std::pow(M1.v[id], q.at(id) / ((p.at(id) - 1.0) * cfg.q_minus)) + 1.0;
      bool inE = Mf.v[id] > cfg.A0 * lam && barrier <= lam;
      if (inE && !inG) rep.inclusion_ok = false;
      if (inE) we += w.at(id);
      if (inG) wg += w.at(id);
    }
    we *= g.cell_volume();
    wg *= g.cell_volume();
    if (wg > prev_g * (1 + 1e-12)) rep.monotone_ok = false;
    prev_g = wg;
    rep.lambdas.push_back(lam);
    rep.wE.push_back(we);
    rep.wG.push_back(wg);
    if (wg > 0) {
      any_g = true;
      rep.B_fit = std::max(rep.B_fit, we / (cfg.epsilon * wg));
    }
  }
  rep.all_empty = !any_g;

  // Layer-cake: ∫ Mf^{q_-} w over Ω_R against the λ-grid reconstruction
  // (exact head below the grid, trapezoid in w(G) between grid points).
  for (auto id : cellsR)
    rep.direct += std::pow(Mf.v[id], cfg.q_minus) * w.at(id) * g.cell_volume();
  if (!rep.lambdas.empty()) {
    rep.layercake = rep.wG.front() * std::pow(rep.lambdas.front(), cfg.q_minus);
    for (std::size_t i = 0; i + 1 < rep.lambdas.size(); ++i) {
      double seg = std::pow(rep.lambdas[i + 1], cfg.q_minus) -
                   std::pow(rep.lambdas[i], cfg.q_minus);
      rep.layercake += 0.5 * (rep.wG[i] + rep.wG[i + 1]) * seg;
    }
  }
  return rep;
}

CoveringCheck covering_lemma_check(const std::vector<std::size_t>& E_cells,
                                   const std::vector<std::size_t>& G_cells,
                                   const WeightField& w, const MaskPtr& mask, double R,
                                   double epsilon0) {
  const Grid& g = mask->grid;
  std::vector<std::uint8_t> inG(g.cell_count(), 0), inE(g.cell_count(), 0);
  for (auto id : G_cells) {
    if (!mask->is_inside(id))
      throw std::invalid_argument("covering_lemma_check: G not inside the region");
    inG[id] = 1;
  }
  for (auto id : E_cells) {
    if (!inG[id]) throw std::invalid_argument("covering_lemma_check: E not inside G");
    inE[id] = 1;
  }

  CoveringCheck chk;
  double wE = weighted_cell_sum(E_cells, w);
  double wG = weighted_cell_sum(G_cells, w);
  double wR = weighted_cell_sum(cells_of(*mask), w);
  if (!(wE < epsilon0 * wR)) chk.applicable = false;

  // Hypothesis (b) on sampled balls centered at E cells.
  std::vector<std::size_t> centers = E_cells;
  if (centers.size() > 64) {
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < 64; ++i) sub.push_back(centers[i * centers.size() / 64]);
    centers = sub;
  }
  std::vector<double> radii;
  for (double r = 2 * g.h; r < R; r *= 2) radii.push_back(r);
  for (auto cid : centers) {
    Vec y = g.cell_center(cid);
    for (double rho : radii) {
      double wEB = 0, wB = 0;
      bool subset = true;
      int rad = int(std::ceil(rho / g.h)) + 1;
      auto c0 = g.decode(cid);
      int klo = g.n == 3 ? std::max(0, c0[2] - rad) : 0;
      int khi = g.n == 3 ? std::min(g.dims[2] - 1, c0[2] + rad) : 0;
      for (int k = klo; k <= khi; ++k)
        for (int j = std::max(0, c0[1] - rad); j <= std::min(g.dims[1] - 1, c0[1] + rad);
             ++j)
          for (int i = std::max(0, c0[0] - rad);
               i <= std::min(g.dims[0] - 1, c0[0] + rad); ++i) {
            std::size_t id = g.index(i, j, k);
            if (norm(g.cell_center(id) - y) >= rho) continue;
            wB += w.at(id);
            if (inE[id]) wEB += w.at(id);
            if (mask->is_inside(id) && !inG[id]) subset = false;
          }
      if (wB > 0 && wEB >= epsilon0 * wB && !subset) chk.hypothesis_b = false;
    }
  }

  if (chk.applicable && chk.hypothesis_b) {
    if (wE == 0) {
      chk.pass = true;
      chk.c_fit = 0;
    } else if (wG > 0) {
      chk.c_fit = wE / (epsilon0 * wG);
      chk.pass = std::isfinite(chk.c_fit);
    }
  }
  return chk;
}

namespace {

double constant_term(const RadonMeasure& mu, const MaskPtr& mask,
                     const GoodLambdaConfig& cfg, const ExponentField& p,
                     double outer_exp) {
  double sigma0 = cfg.sigma0 > 0 ? cfg.sigma0 : default_sigma0(mask->grid.n, p.gamma_lo);
  double mass = mu.total_mass();
  double base = (mass > 0 ? std::pow(mass, sigma0 / (p.gamma_lo - 1.0)) : 0.0) +
                mask->volume();
  return std::pow(base, outer_exp);
}

GridFunction m1_field(const RadonMeasure& mu, const MaskPtr& mask) {
  auto radii = dyadic_radii(mask->grid.h, mask->diameter > 0 ? mask->diameter : 1.0);
  return frac_maximal_1(mu, mask, radii);
}

}  // namespace

EstimateReport assemble_main_estimate(const SolveResult& u, const RadonMeasure& mu,
                                      const ExponentField& q, const ExponentField& p,
                                      const WeightField& w, const GoodLambdaConfig& cfg,
                                      const MaskPtr& mask) {
  EstimateReport rep;
  rep.name = "main";
  const Grid& g = mask->grid;
  GridFunction M1 = m1_field(mu, mask);
  double hv = g.cell_volume();
  for (std::size_t id = 0; id < mask->inside.size(); ++id) {
    if (!mask->is_inside(id)) continue;
    rep.lhs += std::pow(u.Du.magnitude(id), q.at(id)) * w.at(id) * hv;
    rep.rhs += std::pow(M1.v[id], q.at(id) / (p.at(id) - 1.0)) * w.at(id) * hv;
  }
  rep.rhs += constant_term(mu, mask, cfg, p, g.n + 1);
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

EstimateReport assemble_dual_estimate(const SolveResult& u, const RadonMeasure& mu,
                                      const ExponentField& q, const ExponentField& p,
                                      const WeightField& w, const GoodLambdaConfig& cfg,
                                      const MaskPtr& mask) {
  EstimateReport rep;
  rep.name = "dual";
  const Grid& g = mask->grid;
  GridFunction M1 = m1_field(mu, mask);
  double hv = g.cell_volume();
  for (std::size_t id = 0; id < mask->inside.size(); ++id) {
    if (!mask->is_inside(id)) continue;
    rep.lhs += std::pow(u.Du.magnitude(id), (p.at(id) - 1.0) * q.at(id)) * w.at(id) * hv;
    rep.rhs += std::pow(M1.v[id], q.at(id)) * w.at(id) * hv;
  }
  rep.rhs += constant_term(mu, mask, cfg, p, g.n + 1);
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

std::vector<EstimateReport> assemble_corollaries(const SolveResult& u,
                                                 const RadonMeasure& mu,
                                                 const ExponentField& q,
                                                 const ExponentField& p,
                                                 const WeightField& w,
                                                 const GoodLambdaConfig& cfg,
                                                 const MaskPtr& mask,
                                                 double lambda_morrey) {
  std::vector<EstimateReport> out;
  const Grid& g = mask->grid;
  double hv = g.cell_volume();
  int n = g.n;
  bool const_q = q.gamma_hi - q.gamma_lo < 1e-12;
  double q0 = q.gamma_lo;
  GridFunction M1 = m1_field(mu, mask);
  GridFunction flux(mask);  // |Du|^{p(x)-1}
  for (std::size_t id = 0; id < flux.v.size(); ++id)
    if (mask->is_inside(id))
      flux.v[id] = std::pow(u.Du.magnitude(id), p.at(id) - 1.0);

  // Sobolev-exponent modular form, unit weight, q variable with γ bounds in (1, n).
  {
    EstimateReport rep;
    rep.name = "sobolev-modular";
    if (!(q.gamma_lo > 1 && q.gamma_hi < n)) {
      rep.skipped = true;
      rep.reason = "requires 1 < q bounds < n";
    } else if (!mu.atoms.empty()) {
      rep.skipped = true;
      rep.reason = "requires density data";
    } else {
      for (std::size_t id = 0; id < mask->inside.size(); ++id) {
        if (!mask->is_inside(id)) continue;
        double qs = n * q.at(id) / (n - q.at(id));
        rep.lhs += std::pow(flux.v[id], qs) * hv;
        rep.rhs += std::pow(M1.v[id], qs) * hv;
      }
      rep.rhs += constant_term(mu, mask, cfg, p, n + 1);
      rep.ratio = rep.lhs / rep.rhs;
    }
    out.push_back(rep);
  }

  // Constant-q weighted norm form.
  {
    EstimateReport rep;
    rep.name = "lqw";
    if (!const_q) {
      rep.skipped = true;
      rep.reason = "requires constant q";
    } else {
      double lq = 0, rq = 0;
      for (std::size_t id = 0; id < mask->inside.size(); ++id) {
        if (!mask->is_inside(id)) continue;
        lq += std::pow(flux.v[id], q0) * w.at(id) * hv;
        rq += std::pow(M1.v[id], q0) * w.at(id) * hv;
      }
      rep.lhs = std::pow(lq, 1.0 / q0);
      rep.rhs = constant_term(mu, mask, cfg, p, double(n + 1) / q0) + std::pow(rq, 1.0 / q0);
      rep.ratio = rep.lhs / rep.rhs;
    }
    out.push_back(rep);
  }

  // Dual-weight form under 1/r - 1/q = 1/n and w^q ∈ A_{1+q/r'}.
  {
    EstimateReport rep;
    rep.name = "dual-weight";
    double r = const_q ? n * q0 / (n + q0) : 0;
    if (!const_q) {
      rep.skipped = true;
      rep.reason = "requires constant q";
    } else if (!(r > 1)) {
      rep.skipped = true;
      rep.reason = "r = nq/(n+q) must exceed 1";
    } else if (!mu.atoms.empty() || !mu.density) {
      rep.skipped = true;
      rep.reason = "requires density data";
    } else {
      double rprime = r / (r - 1.0);
      WeightField wq = w, wr = w;
      for (auto& x : wq.v) x = std::pow(x, q0);
      for (auto& x : wr.v) x = std::pow(x, r);
      double apc = ap_constant(wq, 1.0 + q0 / rprime,
                               default_ball_sample(g, 24, 11));
      if (!(std::isfinite(apc) && apc < 1e6)) {
        rep.skipped = true;
        rep.reason = "w^q outside the required Muckenhoupt class";
      } else {
        double lq = 0, rr = 0;
        double f_l1 = 0;
        const GridFunction& f = *mu.density;
        for (std::size_t id = 0; id < mask->inside.size(); ++id) {
          if (!mask->is_inside(id)) continue;
          lq += std::pow(flux.v[id], q0) * wq.at(id) * hv;
          rr += std::pow(std::abs(f.v[id]), r) * wr.at(id) * hv;
          f_l1 += std::abs(f.v[id]) * hv;
        }
        double sigma0 =
            cfg.sigma0 > 0 ? cfg.sigma0 : default_sigma0(n, p.gamma_lo);
        double base =
            (f_l1 > 0 ? std::pow(f_l1, sigma0 / (p.gamma_lo - 1.0)) : 0.0) +
            mask->volume();
        rep.lhs = std::pow(lq, 1.0 / q0);
        rep.rhs = std::pow(base, double(n + 1) / q0) + std::pow(rr, 1.0 / r);
        rep.ratio = rep.lhs / rep.rhs;
      }
    }
    out.push_back(rep);
  }

  // Morrey form.
  {
    EstimateReport rep;
    rep.name = "morrey";
    if (!const_q) {
      rep.skipped = true;
      rep.reason = "requires constant q";
    } else if (!(lambda_morrey > 0 && lambda_morrey < n)) {
      rep.skipped = true;
      rep.reason = "Morrey parameter outside (0, n)";
    } else {
      rep.lhs = morrey_norm(flux, q0, lambda_morrey);
      rep.rhs = constant_term(mu, mask, cfg, p, double(n + 1) / q0) +
                morrey_norm(M1, q0, lambda_morrey);
      rep.ratio = rep.lhs / rep.rhs;
    }
    out.push_back(rep);
  }
  return out;
}

}  // namespace vexlab

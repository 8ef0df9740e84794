#include "vexlab/comparison.hpp"

#include <algorithm>

namespace vexlab {

namespace {

std::vector<std::size_t> region_cells(const DomainMask& m) {
  std::vector<std::size_t> out;
  for (std::size_t id = 0; id < m.inside.size(); ++id)
    if (m.inside[id]) out.push_back(id);
  return out;
}

std::vector<std::size_t> strided(const std::vector<std::size_t>& cells, std::size_t cap) {
  if (cells.size() <= cap) return cells;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cap; ++i) out.push_back(cells[i * cells.size() / cap]);
  return out;
}

double region_mass(const RadonMeasure& mu, const DomainMask& region) {
  double s = 0;
  const Grid& g = region.grid;
  for (const auto& a : mu.atoms) {
    long long id = g.locate(a.point);
    if (id >= 0 && region.is_inside(std::size_t(id))) s += a.mass;
  }
  if (mu.density) {
    const GridFunction& d = *mu.density;
    double hv = d.mask->grid.cell_volume();
    for (std::size_t id = 0; id < d.v.size(); ++id) {
      if (!d.mask->is_inside(id) || d.v[id] == 0) continue;
      long long rid = g.locate(d.mask->grid.cell_center(id));
      if (rid >= 0 && region.is_inside(std::size_t(rid))) s += d.v[id] * hv;
    }
  }
  return s;
}

double mean_grad_mag(const GradientField& Du, const DomainMask& region) {
  double s = 0;
  std::size_t cnt = 0;
  for (std::size_t id = 0; id < region.inside.size(); ++id)
    if (region.inside[id]) {
      s += Du.magnitude(id);
      ++cnt;
    }
  return cnt ? s / double(cnt) : 0.0;
}

double grad_diff_mag(const GradientField& A, const GradientField& B, std::size_t id, int n) {
  double s = 0;
  for (int d = 0; d < n; ++d) {
    double diff = A.comp[d][id] - B.comp[d][id];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double mean_grad_diff(const GradientField& A, const GradientField& B,
                      const DomainMask& region) {
  double s = 0;
  std::size_t cnt = 0;
  int n = region.grid.n;
  for (std::size_t id = 0; id < region.inside.size(); ++id)
    if (region.inside[id]) {
      s += grad_diff_mag(A, B, id, n);
      ++cnt;
    }
  return cnt ? s / double(cnt) : 0.0;
}

double lp_mean_grad_diff(const GradientField& A, const GradientField& B,
                         const DomainMask& region, double p) {
  double s = 0;
  std::size_t cnt = 0;
  int n = region.grid.n;
  for (std::size_t id = 0; id < region.inside.size(); ++id)
    if (region.inside[id]) {
      s += std::pow(grad_diff_mag(A, B, id, n), p);
      ++cnt;
    }
  return cnt ? std::pow(s / double(cnt), 1.0 / p) : 0.0;
}

MaskPtr full_rect_mask(const Grid& g) {
  auto m = std::make_shared<DomainMask>();
  m->grid = g;
  m->inside.assign(g.cell_count(), 1);
  m->finalize();
  return m;
}

}  // namespace

MaskPtr ball_region(const MaskPtr& mask, const Vec& center, double r) {
  const Grid& g = mask->grid;
  auto m = std::make_shared<DomainMask>();
  m->grid = g;
  m->inside.assign(g.cell_count(), 0);
  std::size_t cnt = 0;
  for (std::size_t id = 0; id < m->inside.size(); ++id)
    if (mask->is_inside(id) && norm(g.cell_center(id) - center) < r) {
      m->inside[id] = 1;
      ++cnt;
    }
  if (cnt == 0) throw std::invalid_argument("ball_region: empty region");
  m->finalize();
  return m;
}

double F_functional(const NonlinearityModel& m, const RadonMeasure& mu,
                    const SolveResult& u, const MaskPtr& region, double r) {
  auto cells = region_cells(*region);
  if (cells.empty()) throw std::invalid_argument("F_functional: empty region");
  double p_sup = m.p.max_over(cells);
  double md = region_mass(mu, *region) / std::pow(r, region->grid.n - 1);
  double term1 = md > 0 ? std::pow(md, 1.0 / (p_sup - 1.0)) : 0.0;
  double term2 = 0;
  if (p_sup <= 2.0) {
    double avg = 0;
    for (auto id : cells) avg += u.Du.magnitude(id) + 1.0;
    avg /= double(cells.size());
    term2 = md * std::pow(avg, 2.0 - p_sup);
  }
  return term1 + term2 + 1.0;
}

NonlinearityModel freeze_exponent(const NonlinearityModel& m, const MaskPtr& region,
                                  double R) {
  double thresh = m.Lambda2 / (2.0 * m.Lambda1);
  if (m.p.omega(4.0 * R) > thresh)
    throw std::invalid_argument("freeze_exponent: omega(4R) above Lambda2/(2 Lambda1)");
  auto cells = region_cells(*region);
  double p2 = m.p.max_over(cells);

  NonlinearityModel b = m;
  b.p = ExponentField::constant(m.p.grid, p2);
  b.Lambda1 = 3.0 * m.Lambda1;
  b.Lambda2 = m.Lambda2 / 2.0;

  auto sample = strided(cells, 32);
  StructureReport ra = verify_structure(m, sample, 6, 6);
  StructureReport rb = verify_structure(b, sample, 6, 6);
  bool ok = rb.monotone && rb.Lambda1_fit <= 3.0 * ra.Lambda1_fit * (1 + 1e-9) &&
            rb.Lambda2_fit >= ra.Lambda2_fit / 2.0 * (1 - 1e-9);
  if (!ok)
    throw std::runtime_error("freeze_exponent: structure check failed, region too large");
  return b;
}

NonlinearityModel average_nonlinearity(const NonlinearityModel& b, const MaskPtr& ball) {
  auto cells = region_cells(*ball);
  if (cells.empty()) throw std::invalid_argument("average_nonlinearity: empty ball");
  double cbar = 0;
  for (auto id : cells) cbar += b.c_at(id);
  cbar /= double(cells.size());
  NonlinearityModel out = b;
  out.coeff.assign(b.p.grid.cell_count(), cbar);
  return out;
}

CascadeResult run_interior_cascade(const NonlinearityModel& m, const RadonMeasure& mu,
                                   const SolveResult& u, const ComparisonConfig& cfg,
                                   const SolveOptions& opts) {
  cfg.validate();
  const MaskPtr& mask = u.u.mask;
  const Grid& g = mask->grid;

  // B_2R must be strictly interior: every grid cell of the ball is inside.
  {
    int rad = int(std::ceil(2 * cfg.R / g.h)) + 1;
    long long cid = g.locate(cfg.center);
    if (cid < 0) throw std::invalid_argument("run_interior_cascade: center outside grid");
    auto c0 = g.decode(std::size_t(cid));
    int klo = g.n == 3 ? c0[2] - rad : 0, khi = g.n == 3 ? c0[2] + rad : 0;
    for (int k = klo; k <= khi; ++k)
      for (int j = c0[1] - rad; j <= c0[1] + rad; ++j)
        for (int i = c0[0] - rad; i <= c0[0] + rad; ++i) {
          bool in = g.in_bounds(i, j, k) && mask->is_inside(g.index(i, j, k));
          if (!in) {
            Vec x{g.lo[0] + (i + 0.5) * g.h, g.lo[1] + (j + 0.5) * g.h, 0};
            if (g.n == 3) x[2] = g.lo[2] + (k + 0.5) * g.h;
            if (norm(x - cfg.center) < 2 * cfg.R)
              throw std::invalid_argument("run_interior_cascade: B_2R leaves the domain");
          }
        }
  }

  CascadeResult res;
  MaskPtr b2 = ball_region(mask, cfg.center, 2 * cfg.R);
  auto cells2 = region_cells(*b2);
  res.p1 = m.p.min_over(cells2);
  res.p2 = m.p.max_over(cells2);
  res.F_value = F_functional(m, mu, u, b2, 2 * cfg.R);
  res.du_mean = mean_grad_mag(u.Du, *b2);

  GridFunction zero2(b2);
  auto u_data = [&u](std::size_t id) { return u.u.v[id]; };
  res.w = solve_region(m, zero2, b2, mask, u_data, opts);
  res.ratio_du_w = mean_grad_diff(u.Du, res.w.Du, *b2) / res.F_value;

  double denom = res.F_value + res.du_mean;
  MaskPtr bR = ball_region(mask, cfg.center, cfg.R);
  NonlinearityModel bmod = freeze_exponent(m, b2, cfg.R);
  GridFunction zeroR(bR);
  auto w_data = [&res](std::size_t id) { return res.w.u.v[id]; };
  res.h = solve_region(bmod, zeroR, bR, b2, w_data, opts);
  res.ratio_hw = lp_mean_grad_diff(res.h.Du, res.w.Du, *bR, res.p2) / denom;

  NonlinearityModel vbar = average_nonlinearity(bmod, bR);
  MaskPtr bV = ball_region(mask, cfg.center, cfg.R - 1.5 * g.h);
  GridFunction zeroV(bV);
  auto h_data = [&res](std::size_t id) { return res.h.u.v[id]; };
  res.v = solve_region(vbar, zeroV, bV, bR, h_data, opts);

  double sup = 0;
  for (std::size_t id = 0; id < bV->inside.size(); ++id)
    if (bV->inside[id] && norm(g.cell_center(id) - cfg.center) < cfg.R / 2)
      sup = std::max(sup, res.v.Du.magnitude(id));
  res.ratio_linf = sup / denom;
  res.ratio_vh = lp_mean_grad_diff(res.v.Du, res.h.Du, *bV, res.p2) / denom;

  res.complete = res.w.converged && res.h.converged && res.v.converged;
  return res;
}

CascadeResult run_boundary_cascade(const NonlinearityModel& m, const RadonMeasure& mu,
                                   const SolveResult& u, const ComparisonConfig& cfg,
                                   const Vec& boundary_center, const Vec& normal,
                                   const SolveOptions& opts) {
  cfg.validate();
  const MaskPtr& mask = u.u.mask;
  const Grid& g = mask->grid;
  const Vec& x0 = boundary_center;

  CascadeResult res;
  // Two-sided sandwich at scale 2R with grid slack.
  {
    double slab = cfg.delta * 2 * cfg.R + 2 * g.h;
    for (std::size_t id = 0; id < mask->inside.size(); ++id) {
      Vec y = g.cell_center(id) - x0;
      if (norm(y) >= 2 * cfg.R) continue;
      double t = dot(y, normal);
      if (mask->is_inside(id) && t < -slab) res.sandwich_ok = false;
      if (!mask->is_inside(id) && t > slab) res.sandwich_ok = false;
    }
  }

  MaskPtr o2 = ball_region(mask, x0, 2 * cfg.R);
  auto cells2 = region_cells(*o2);
  res.p1 = m.p.min_over(cells2);
  res.p2 = m.p.max_over(cells2);
  res.F_value = F_functional(m, mu, u, o2, 2 * cfg.R);
  res.du_mean = mean_grad_mag(u.Du, *o2);
  double denom = res.F_value + res.du_mean;

  GridFunction zero2(o2);
  auto u_data = [&u](std::size_t id) { return u.u.v[id]; };
  res.w = solve_region(m, zero2, o2, mask, u_data, opts);
  res.ratio_du_w = mean_grad_diff(u.Du, res.w.Du, *o2) / res.F_value;

  MaskPtr oR = ball_region(mask, x0, cfg.R);
  NonlinearityModel bmod = freeze_exponent(m, o2, cfg.R);
  GridFunction zeroR(oR);
  auto w_data = [&res](std::size_t id) { return res.w.u.v[id]; };
  res.h = solve_region(bmod, zeroR, oR, o2, w_data, opts);
  res.ratio_hw = lp_mean_grad_diff(res.h.Du, res.w.Du, *oR, res.p2) / denom;

  // Half-ball region for v, independent of the mask; data is zero below the
  // plane and the zero-extension of h elsewhere.
  auto hv_mask = std::make_shared<DomainMask>();
  hv_mask->grid = g;
  hv_mask->inside.assign(g.cell_count(), 0);
  std::size_t cnt = 0;
  for (std::size_t id = 0; id < hv_mask->inside.size(); ++id) {
    Vec y = g.cell_center(id) - x0;
    if (norm(y) < cfg.R / 2 && dot(y, normal) > 0) {
      hv_mask->inside[id] = 1;
      ++cnt;
    }
  }
  if (cnt == 0) throw std::invalid_argument("run_boundary_cascade: empty half-region");
  hv_mask->finalize();
  MaskPtr halfv = hv_mask;
  MaskPtr everywhere = full_rect_mask(g);
  NonlinearityModel vbar = average_nonlinearity(bmod, oR);
  GridFunction zeroV(halfv);
  auto v_data = [&res, &oR, &g, &x0, &normal](std::size_t id) {
    if (dot(g.cell_center(id) - x0, normal) <= 0) return 0.0;
    return oR->is_inside(id) ? res.h.u.v[id] : 0.0;
  };
  res.v = solve_region(vbar, zeroV, halfv, everywhere, v_data, opts);

  double core_r = std::max(cfg.R / 8, 3 * g.h);
  double sup = 0;
  for (std::size_t id = 0; id < halfv->inside.size(); ++id)
    if (halfv->inside[id] && norm(g.cell_center(id) - x0) < core_r)
      sup = std::max(sup, res.v.Du.magnitude(id));
  res.ratio_linf = sup / denom;

  // ⨍_{Ω_{R/8}} |D(u - v)|^{p2}, v zero-extended off the half-region.
  {
    double s = 0;
    std::size_t n = 0;
    for (std::size_t id = 0; id < mask->inside.size(); ++id) {
      if (!mask->is_inside(id) || norm(g.cell_center(id) - x0) >= core_r) continue;
      double d2 = 0;
      for (int d = 0; d < g.n; ++d) {
        double vd = halfv->is_inside(id) ? res.v.Du.comp[d][id] : 0.0;
        double diff = u.Du.comp[d][id] - vd;
        d2 += diff * diff;
      }
      s += std::pow(std::sqrt(d2), res.p2);
      ++n;
    }
    res.ratio_vh = n ? std::pow(s / double(n), 1.0 / res.p2) / denom : 0.0;
  }

  res.complete = res.w.converged && res.h.converged && res.v.converged;
  return res;
}

double higher_integrability_probe(const NonlinearityModel& m, const SolveResult& w,
                                  const ComparisonConfig& cfg, double sigma, double q) {
  if (!(sigma >= 0 && sigma <= 0.1))
    throw std::invalid_argument("higher_integrability_probe: sigma outside [0, 0.1]");
  if (!(q > 0 && q <= 1))
    throw std::invalid_argument("higher_integrability_probe: q outside (0, 1]");
  const MaskPtr& mask = w.u.mask;
  MaskPtr bR = ball_region(mask, cfg.center, cfg.R);
  MaskPtr b2 = ball_region(mask, cfg.center, 2 * cfg.R);
  double left = 0, right = 0;
  std::size_t nl = 0, nr = 0;
  for (std::size_t id = 0; id < mask->inside.size(); ++id) {
    double mag = mask->is_inside(id) ? w.Du.magnitude(id) : 0.0;
    double p = m.p_at(id);
    if (bR->is_inside(id)) {
      left += std::pow(mag, p * (1 + sigma));
      ++nl;
    }
    if (b2->is_inside(id)) {
      right += std::pow(mag, q * p);
      ++nr;
    }
  }
  left = nl ? std::pow(left / double(nl), 1 + sigma) : 0.0;
  right = nr ? std::pow(right / double(nr), 1.0 / q) + 1.0 : 1.0;
  return left / right;
}

}  // namespace vexlab

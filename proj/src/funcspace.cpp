#include "vexlab/funcspace.hpp"

#include <algorithm>
#include <random>

namespace vexlab {

ExponentField ExponentField::constant(const Grid& g, double p0) {
  ExponentField e;
  e.grid = g;
  e.v.assign(g.cell_count(), p0);
  e.gamma_lo = e.gamma_hi = p0;
  e.modulus = {{g.h, 0.0}, {1.0, 0.0}};
  return e;
}

ExponentField ExponentField::from(const Grid& g, const std::function<double(const Vec&)>& f,
                                  double lo, double hi,
                                  std::vector<std::pair<double, double>> mod) {
  ExponentField e;
  e.grid = g;
  e.gamma_lo = lo;
  e.gamma_hi = hi;
  e.v.resize(g.cell_count());
  for (std::size_t id = 0; id < e.v.size(); ++id) {
    double val = f(g.cell_center(id));
    if (val < lo || val > hi)
      throw std::invalid_argument("ExponentField: value escapes [gamma_lo, gamma_hi]");
    e.v[id] = val;
  }
  if (mod.empty()) mod = {{g.h, hi - lo}, {1.0, hi - lo}};
  e.modulus = std::move(mod);
  return e;
}

double ExponentField::omega(double r) const {
  if (modulus.empty()) return 0;
  if (r <= modulus.front().first) return modulus.front().second;
  if (r >= modulus.back().first) return modulus.back().second;
  for (std::size_t i = 1; i < modulus.size(); ++i) {
    if (r <= modulus[i].first) {
      double t = (r - modulus[i - 1].first) / (modulus[i].first - modulus[i - 1].first);
      return modulus[i - 1].second + t * (modulus[i].second - modulus[i - 1].second);
    }
  }
  return modulus.back().second;
}

double ExponentField::min_over(const std::vector<std::size_t>& cells) const {
  double m = 1e300;
  for (auto id : cells) m = std::min(m, v[id]);
  return m;
}
double ExponentField::max_over(const std::vector<std::size_t>& cells) const {
  double m = -1e300;
  for (auto id : cells) m = std::max(m, v[id]);
  return m;
}

void ExponentField::require_p_bounds(int n) const {
  if (!(gamma_lo > 2.0 - 1.0 / n))
    throw std::invalid_argument("ExponentField: need gamma_lo > 2 - 1/n");
}

std::vector<std::pair<double, double>> log_modulus_table(double c, double r_min, double r_max,
                                                         int points) {
  std::vector<std::pair<double, double>> t;
  for (int i = 0; i < points; ++i) {
    double r = r_min * std::pow(r_max / r_min, double(i) / (points - 1));
    t.push_back({r, c / std::log(M_E + 1.0 / r)});
  }
  return t;
}

LogHolderReport check_log_holder(const ExponentField& p, double diameter_cap,
                                 int pair_samples, unsigned seed) {
  LogHolderReport rep;
  const Grid& g = p.grid;
  // sup_r omega(r) log(1/r) over tabulated r < 1, and the 1/2 threshold radius.
  rep.R_omega = diameter_cap;
  for (const auto& [r, w] : p.modulus) {
    if (r >= 1) continue;
    double val = w * std::log(1.0 / r);
    rep.bound = std::max(rep.bound, val);
    if (val > 0.5) rep.R_omega = std::min(rep.R_omega, r);
  }
  // Measured oscillation vs table on random pairs.
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.cell_count() - 1);
  for (int s = 0; s < pair_samples; ++s) {
    std::size_t a = pick(rng), b = pick(rng);
    if (a == b) continue;
    double dist = norm(g.cell_center(a) - g.cell_center(b));
    double osc = std::abs(p.v[a] - p.v[b]);
    double allowed = p.omega(dist) + 1e-12;
    if (osc > allowed) {
      rep.dominated = false;
      rep.worst_excess = std::max(rep.worst_excess, osc - allowed);
    }
  }
  return rep;
}

double modular(const GridFunction& f, const ExponentField& p) {
  const Grid& g = f.mask->grid;
  double s = 0, hv = g.cell_volume();
  for (std::size_t id = 0; id < f.v.size(); ++id)
    if (f.mask->is_inside(id)) s += std::pow(std::abs(f.v[id]), p.v[id]) * hv;
  return s;
}

double weighted_modular(const GridFunction& f, const ExponentField& q,
                        const std::vector<double>& w_full) {
  const Grid& g = f.mask->grid;
  double s = 0, hv = g.cell_volume();
  for (std::size_t id = 0; id < f.v.size(); ++id)
    if (f.mask->is_inside(id)) {
      if (!(w_full[id] > 0)) throw std::invalid_argument("weighted_modular: weight must be positive");
      s += std::pow(std::abs(f.v[id]), q.v[id]) * w_full[id] * hv;
    }
  return s;
}

double weighted_modular(const GridFunction& f, const ExponentField& q, const GridFunction& w) {
  return weighted_modular(f, q, w.v);
}

double luxemburg_norm(const GridFunction& f, const ExponentField& p, double tol) {
  double fm = f.max_abs();
  if (fm == 0) return 0;
  double vol = double(f.mask->inside_count()) * f.mask->grid.cell_volume();
  // modular(f/lam) is strictly decreasing in lam; bracket the unit level.
  double hi = fm * std::max(1.0, std::pow(std::max(vol, 1.0), 1.0 / p.gamma_lo)) * 2.0;
  double lo = hi * 1e-16;
  auto mod_at = [&](double lam) {
    double s = 0, hv = f.mask->grid.cell_volume();
    for (std::size_t id = 0; id < f.v.size(); ++id)
      if (f.mask->is_inside(id)) s += std::pow(std::abs(f.v[id]) / lam, p.v[id]) * hv;
    return s;
  };
  while (mod_at(lo) <= 1.0 && lo > 1e-300) lo *= 0.5;
  if (mod_at(hi) > 1.0)
    while (mod_at(hi) > 1.0) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > tol * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mod_at(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<bool, bool> check_unit_ball_equiv(const GridFunction& f, const ExponentField& p,
                                            double tol) {
  return {luxemburg_norm(f, p, tol) <= 1.0, modular(f, p) <= 1.0};
}

double morrey_norm(const GridFunction& f, double q, double lambda,
                   const std::vector<Vec>& centers, const std::vector<double>& radii) {
  if (!(q > 0) || !(lambda > 0) || lambda >= f.mask->grid.n)
    throw std::invalid_argument("morrey_norm: need q > 0 and 0 < lambda < n");
  const DomainMask& m = *f.mask;
  const Grid& g = m.grid;
  double best = 0, hv = g.cell_volume();
  for (const Vec& x : centers) {
    for (double r : radii) {
      double s = 0;
      bool hit = false;
      int rad = int(std::ceil(r / g.h)) + 1;
      long long id0 = g.locate(x);
      auto c0 = (id0 >= 0) ? g.decode(std::size_t(id0))
                           : std::array<int, 3>{int((x[0] - g.lo[0]) / g.h),
                                                int((x[1] - g.lo[1]) / g.h),
                                                g.n == 3 ? int((x[2] - g.lo[2]) / g.h) : 0};
      int klo = g.n == 3 ? c0[2] - rad : 0, khi = g.n == 3 ? c0[2] + rad : 0;
      for (int k = klo; k <= khi; ++k)
        for (int j = c0[1] - rad; j <= c0[1] + rad; ++j)
          for (int i = c0[0] - rad; i <= c0[0] + rad; ++i) {
            if (!m.is_inside(i, j, k)) continue;
            std::size_t id = g.index(i, j, k);
            if (norm(g.cell_center(id) - x) >= r) continue;
            hit = true;
            s += std::pow(std::abs(f.v[id]), q) * hv;
          }
      if (!hit) continue;  // empty intersection: skip sample
      best = std::max(best, std::pow(r, -lambda / q) * std::pow(s, 1.0 / q));
    }
  }
  return best;
}

double morrey_norm(const GridFunction& f, double q, double lambda, int max_centers) {
  const DomainMask& m = *f.mask;
  std::vector<Vec> centers;
  std::size_t nb = m.boundary_cells.size();
  std::size_t stride = std::max<std::size_t>(1, nb / std::size_t(std::max(1, max_centers / 2)));
  for (std::size_t i = 0; i < nb; i += stride)
    centers.push_back(m.grid.cell_center(m.boundary_cells[i]));
  // A few interior centers too.
  std::size_t nc = m.grid.cell_count();
  for (std::size_t i = 0; i < nc; i += std::max<std::size_t>(1, nc / std::size_t(std::max(1, max_centers / 2))))
    if (m.is_inside(i)) centers.push_back(m.grid.cell_center(i));
  std::vector<double> radii;
  for (double r = m.diameter; r >= 2 * m.grid.h; r /= 2) radii.push_back(r);
  return morrey_norm(f, q, lambda, centers, radii);
}

}  // namespace vexlab

#include "vexlab/pde.hpp"

#include <algorithm>
#include <cmath>

namespace vexlab {

NonlinearityModel NonlinearityModel::plaplace(const ExponentField& p, double s) {
  NonlinearityModel m;
  m.p = p;
  m.s = s;
  return m;
}

Vec eval_a(const NonlinearityModel& m, const Vec& xi, std::size_t cell) {
  double p = m.p_at(cell), c = m.c_at(cell);
  double t = m.s * m.s + dot(xi, xi);
  if (t == 0) return {0, 0, 0};  // limit value for every p > 1
  double fac = c * std::pow(t, (p - 2) / 2);
  return fac * xi;
}

StructureReport verify_structure(const NonlinearityModel& m,
                                 const std::vector<std::size_t>& cells, int n_mags,
                                 int n_angles) {
  StructureReport rep;
  rep.Lambda2_fit = 1e300;

  std::vector<double> mags{0.0};
  for (int i = 0; i < n_mags; ++i)
    mags.push_back(1e-3 * std::pow(1e6, double(i) / (n_mags - 1)));
  std::vector<Vec> dirs;
  for (int i = 0; i < n_angles; ++i) {
    double a = 2 * M_PI * i / n_angles;
    dirs.push_back({std::cos(a), std::sin(a), 0});
  }

  const double s2 = m.s * m.s;
  for (auto cell : cells) {
    double p = m.p_at(cell), c = m.c_at(cell);
    // Growth: |a| and (s²+|ξ|²)^{1/2}|D_ξ a| against (s²+|ξ|²)^{(p-1)/2}.
    for (double r : mags) {
      double t = s2 + r * r;
      if (t == 0) continue;
      double g = std::pow(t, (p - 2) / 2);
      double gp = (p - 2) / 2 * std::pow(t, (p - 4) / 2);
      double opnorm = c * std::max(std::abs(g + 2 * gp * r * r), g);
      double denom = std::pow(t, (p - 1) / 2);
      double term_a = c * g * r / denom;
      double term_D = std::sqrt(t) * opnorm / denom;
      rep.Lambda1_fit = std::max(rep.Lambda1_fit, std::max(term_a, term_D));
      rep.Lambda1_sum = std::max(rep.Lambda1_sum, term_a + term_D);
    }
    // Monotonicity and ellipticity on pairs.
    for (double rx : mags)
      for (double ry : mags)
        for (const Vec& dx : dirs)
          for (const Vec& dy : dirs) {
            Vec xi = rx * dx, eta = ry * dy;
            Vec d = xi - eta;
            double dd = dot(d, d);
            if (dd < 1e-28) continue;
            double ip = dot(eval_a(m, xi, cell) - eval_a(m, eta, cell), d);
            if (ip < -1e-12 * (1 + dd)) {
              rep.monotone = false;
              rep.witness_xi = xi;
              rep.witness_eta = eta;
            }
            double base = s2 + dot(xi, xi) + dot(eta, eta);
            if (base > 0) {
              double denom1 = std::pow(base, (p - 2) / 2) * dd;
              if (denom1 > 0) rep.Lambda2_fit = std::min(rep.Lambda2_fit, ip / denom1);
              if (dd <= base) {
                double denom2 = std::pow(std::sqrt(dd), p);
                if (denom2 > 0) rep.Lambda2_fit = std::min(rep.Lambda2_fit, ip / denom2);
              }
            }
          }
  }
  if (rep.Lambda2_fit > 1e299) rep.Lambda2_fit = 0;
  return rep;
}

BmoReport bmo_seminorm(const NonlinearityModel& m, const DomainMask& mask, double beta,
                       double R0, const std::vector<Vec>& centers,
                       const std::vector<double>& radii, const std::vector<Vec>& xi_sample) {
  if (beta < 1) throw std::invalid_argument("bmo_seminorm: beta must be >= 1");
  const Grid& g = mask.grid;
  BmoReport rep;
  rep.beta = beta;
  rep.R0 = R0;
  const double s2 = m.s * m.s;

  auto quotient = [&](const Vec& xi, std::size_t id) -> Vec {
    double t = s2 + dot(xi, xi);
    if (t == 0) return {0, 0, 0};
    double denom = std::pow(t, (m.p_at(id) - 1) / 2);
    return (1.0 / denom) * eval_a(m, xi, id);
  };

  for (const Vec& y : centers) {
    for (double r : radii) {
      if (r > R0) continue;
      std::vector<std::size_t> cells;
      int rad = int(std::ceil(r / g.h)) + 1;
      long long id0 = g.locate(y);
      auto c0 = id0 >= 0 ? g.decode(std::size_t(id0)) : std::array<int, 3>{0, 0, 0};
      int klo = g.n == 3 ? std::max(0, c0[2] - rad) : 0;
      int khi = g.n == 3 ? std::min(g.dims[2] - 1, c0[2] + rad) : 0;
      for (int k = klo; k <= khi; ++k)
        for (int j = std::max(0, c0[1] - rad); j <= std::min(g.dims[1] - 1, c0[1] + rad); ++j)
          for (int i = std::max(0, c0[0] - rad); i <= std::min(g.dims[0] - 1, c0[0] + rad); ++i) {
            std::size_t id = g.index(i, j, k);
            if (norm(g.cell_center(id) - y) < r) cells.push_back(id);
          }
      if (cells.empty()) continue;
      // Θ per cell: sup over the ξ sample of the deviation from the ball mean.
      std::vector<double> theta(cells.size(), 0.0);
      for (const Vec& xi : xi_sample) {
        Vec mean{0, 0, 0};
        std::vector<Vec> q(cells.size());
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
          q[ci] = quotient(xi, cells[ci]);
          mean = mean + q[ci];
        }
        mean = (1.0 / double(cells.size())) * mean;
        for (std::size_t ci = 0; ci < cells.size(); ++ci)
          theta[ci] = std::max(theta[ci], norm(q[ci] - mean));
      }
      double avg = 0;
      for (double t : theta) avg += std::pow(t, beta);
      avg /= double(cells.size());
      rep.value = std::max(rep.value, avg);
    }
  }
  return rep;
}

GridFunction mollify_measure(const RadonMeasure& mu, const MaskPtr& mask, double k) {
  const Grid& g = mask->grid;
  if (k < g.h) throw std::invalid_argument("mollify_measure: scale below grid resolution");
  GridFunction out(mask);
  double hv = g.cell_volume();
  int rad = int(std::ceil(k / g.h)) + 1;

  auto spread = [&](const Vec& src, double mass) {
    int ci = int(std::floor((src[0] - g.lo[0]) / g.h));
    int cj = int(std::floor((src[1] - g.lo[1]) / g.h));
    int ck = g.n == 3 ? int(std::floor((src[2] - g.lo[2]) / g.h)) : 0;
    std::vector<std::pair<std::size_t, double>> hits;
    double wsum = 0;
    int klo = g.n == 3 ? std::max(0, ck - rad) : 0;
    int khi = g.n == 3 ? std::min(g.dims[2] - 1, ck + rad) : 0;
    for (int kk = klo; kk <= khi; ++kk)
      for (int j = std::max(0, cj - rad); j <= std::min(g.dims[1] - 1, cj + rad); ++j)
        for (int i = std::max(0, ci - rad); i <= std::min(g.dims[0] - 1, ci + rad); ++i) {
          std::size_t id = g.index(i, j, kk);
          if (!mask->is_inside(id)) continue;
          double w = std::max(0.0, 1.0 - norm(g.cell_center(id) - src) / k);
          if (w > 0) {
            hits.push_back({id, w});
            wsum += w;
          }
        }
    if (wsum <= 0) throw std::runtime_error("mollify_measure: source sees no mask cells");
    for (auto& [id, w] : hits) out.v[id] += mass * w / (wsum * hv);
  };

  for (const auto& a : mu.atoms)
    if (a.mass > 0) spread(a.point, a.mass);
  if (mu.density) {
    const GridFunction& d = *mu.density;
    const Grid& gd = d.mask->grid;
    double hvd = gd.cell_volume();
    for (std::size_t id = 0; id < d.v.size(); ++id)
      if (d.mask->is_inside(id) && d.v[id] != 0) spread(gd.cell_center(id), d.v[id] * hvd);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kacanov solver internals
// ---------------------------------------------------------------------------
namespace {

struct LinearSystem {
  // Per unknown: diagonal, neighbor couplings, rhs.
  std::vector<double> diag, rhs;
  std::vector<std::array<int, 6>> nb;      // unknown index or -1
  std::vector<std::array<double, 6>> coef;  // off-diagonal (negative) couplings
};

struct RegionIndex {
  std::vector<std::size_t> cells;          // unknown -> cell id
  std::vector<long long> of_cell;          // cell id -> unknown or -1
};

RegionIndex build_index(const DomainMask& region) {
  RegionIndex idx;
  idx.of_cell.assign(region.grid.cell_count(), -1);
  for (std::size_t id = 0; id < region.inside.size(); ++id)
    if (region.inside[id]) {
      idx.of_cell[id] = (long long)idx.cells.size();
      idx.cells.push_back(id);
    }
  return idx;
}

double clamp_sigma(double sig, bool& floored) {
  if (!(sig > 1e-12)) {
    floored = true;
    return 1e-12;
  }
  if (sig > 1e12) {
    floored = true;
    return 1e12;
  }
  return sig;
}

// Conjugate gradients with Jacobi preconditioning.
int pcg(const LinearSystem& A, std::vector<double>& x, double tol, int max_iter) {
  std::size_t n = A.diag.size();
  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = A.diag[i] * v[i];
      for (int f = 0; f < 6; ++f)
        if (A.nb[i][f] >= 0) s += A.coef[i][f] * v[A.nb[i][f]];
      out[i] = s;
    }
  };
  std::vector<double> r(n), z(n), p(n), Ap(n);
  apply(x, r);
  double bnorm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = A.rhs[i] - r[i];
    bnorm += A.rhs[i] * A.rhs[i];
  }
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0) {
    std::fill(x.begin(), x.end(), 0.0);
    return 0;
  }
  double rz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = r[i] / A.diag[i];
    p[i] = z[i];
    rz += r[i] * z[i];
  }
  int it = 0;
  for (; it < max_iter; ++it) {
    double rn = 0;
    for (std::size_t i = 0; i < n; ++i) rn += r[i] * r[i];
    if (std::sqrt(rn) <= tol * bnorm) break;
    apply(p, Ap);
    double pAp = 0;
    for (std::size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (pAp <= 0) break;
    double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    double rz_new = 0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = r[i] / A.diag[i];
      rz_new += r[i] * z[i];
    }
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return it;
}

}  // namespace

double model_energy(const NonlinearityModel& m, const GridFunction& u,
                    const GradientField& Du, const GridFunction& f) {
  const Grid& g = u.mask->grid;
  double hv = g.cell_volume(), s2 = m.s * m.s, e = 0;
  for (std::size_t id = 0; id < u.v.size(); ++id) {
    if (!u.mask->is_inside(id)) continue;
    double p = m.p_at(id);
    double t = s2 + Du.magnitude(id) * Du.magnitude(id);
    e += (m.c_at(id) / p) * std::pow(t, p / 2) * hv;
    e -= f.v[id] * u.v[id] * hv;
  }
  return e;
}

SolveResult solve_region(const NonlinearityModel& m, const GridFunction& f,
                         const MaskPtr& region_mask, const MaskPtr& physical,
                         const std::function<double(std::size_t)>& dirichlet,
                         const SolveOptions& opts) {
  const DomainMask& region = *region_mask;
  const Grid& g = region.grid;
  const DomainMask* phys = physical ? physical.get() : &region;
  RegionIndex idx = build_index(region);
  const std::size_t N = idx.cells.size();

  SolveResult res;
  res.u = GridFunction(region_mask);

  auto data_lookup = [&](std::size_t id) -> double {
    if (phys->is_inside(id) && dirichlet) return dirichlet(id);
    return 0.0;
  };

  double pmax = 0;
  for (auto id : idx.cells) pmax = std::max(pmax, m.p_at(id));
  double theta0 = opts.damping > 0 ? opts.damping : (pmax <= 2.0 ? 1.0 : 0.5);

  // Data scale for the relative residual.
  double hv = g.cell_volume();
  double f_l1 = 0;
  for (auto id : idx.cells) f_l1 += std::abs(f.v[id]) * hv;
  double gmax = 0;
  for (auto id : idx.cells) {
    auto c = g.decode(id);
    for (int d = 0; d < g.n; ++d)
      for (int s = -1; s <= 1; s += 2) {
        int i = c[0] + (d == 0 ? s : 0), j = c[1] + (d == 1 ? s : 0),
            k = c[2] + (d == 2 ? s : 0);
        if (g.in_bounds(i, j, k)) {
          std::size_t nid = g.index(i, j, k);
          if (!region.inside[nid] && phys->is_inside(nid) && dirichlet)
            gmax = std::max(gmax, std::abs(dirichlet(nid)));
        }
      }
  }
  double scale = std::max(f_l1 + gmax, 1e-300);

  std::vector<double> sigma(g.cell_count(), 0.0);
  auto eval_sigma = [&]() {
    GradientField Du = gradient_with_data(res.u, data_lookup);
    double s2 = m.s * m.s;
    for (auto id : idx.cells) {
      double t = s2 + Du.magnitude(id) * Du.magnitude(id);
      double p = m.p_at(id);
      double sg = t > 0 ? m.c_at(id) * std::pow(t, (p - 2) / 2) : 0.0;
      sigma[id] = clamp_sigma(sg, res.sigma_floored);
    }
    return Du;
  };

  auto assemble = [&](LinearSystem& A) {
    A.diag.assign(N, 0.0);
    A.rhs.assign(N, 0.0);
    A.nb.assign(N, {-1, -1, -1, -1, -1, -1});
    A.coef.assign(N, {0, 0, 0, 0, 0, 0});
    double area = std::pow(g.h, g.n - 1);
    for (std::size_t ui = 0; ui < N; ++ui) {
      std::size_t id = idx.cells[ui];
      auto c = g.decode(id);
      A.rhs[ui] = f.v[id] * hv;
      int face = 0;
      for (int d = 0; d < g.n; ++d)
        for (int s = -1; s <= 1; s += 2, ++face) {
          int i = c[0] + (d == 0 ? s : 0), j = c[1] + (d == 1 ? s : 0),
              k = c[2] + (d == 2 ? s : 0);
          bool inb = g.in_bounds(i, j, k);
          std::size_t nid = inb ? g.index(i, j, k) : 0;
          if (inb && region.inside[nid]) {
            double sf = 2.0 * sigma[id] * sigma[nid] / (sigma[id] + sigma[nid]);
            double cpl = sf / g.h * area;
            A.diag[ui] += cpl;
            A.nb[ui][face] = int(idx.of_cell[nid]);
            A.coef[ui][face] = -cpl;
          } else if (inb && phys->is_inside(nid)) {
            // Dirichlet transfer cell at full distance.
            double cpl = sigma[id] / g.h * area;
            A.diag[ui] += cpl;
            A.rhs[ui] += cpl * data_lookup(nid);
          } else {
            // Physical wall: zero value at half-cell distance.
            double cpl = 2.0 * sigma[id] / g.h * area;
            A.diag[ui] += cpl;
          }
        }
    }
  };

  auto defect = [&]() {
    double worst = 0;
    double area = std::pow(g.h, g.n - 1);
    for (std::size_t ui = 0; ui < N; ++ui) {
      std::size_t id = idx.cells[ui];
      auto c = g.decode(id);
      double acc = -f.v[id] * hv;
      for (int d = 0; d < g.n; ++d)
        for (int s = -1; s <= 1; s += 2) {
          int i = c[0] + (d == 0 ? s : 0), j = c[1] + (d == 1 ? s : 0),
              k = c[2] + (d == 2 ? s : 0);
          bool inb = g.in_bounds(i, j, k);
          std::size_t nid = inb ? g.index(i, j, k) : 0;
          if (inb && region.inside[nid]) {
            double sf = 2.0 * sigma[id] * sigma[nid] / (sigma[id] + sigma[nid]);
            acc += sf * (res.u.v[id] - res.u.v[nid]) / g.h * area;
          } else if (inb && phys->is_inside(nid)) {
            acc += sigma[id] * (res.u.v[id] - data_lookup(nid)) / g.h * area;
          } else {
            acc += 2.0 * sigma[id] * res.u.v[id] / g.h * area;
          }
        }
      worst = std::max(worst, std::abs(acc));
    }
    return worst / scale;
  };

  // First pass uses the p = 2 coefficient as a warm start.
  for (auto id : idx.cells) sigma[id] = clamp_sigma(m.c_at(id), res.sigma_floored);

  LinearSystem A;
  std::vector<double> x(N, 0.0);
  GradientField Du = gradient_with_data(res.u, data_lookup);
  double energy = model_energy(m, res.u, Du, f);
  res.energy_trace.push_back(energy);

  for (int it = 0; it < opts.max_iter; ++it) {
    assemble(A);
    // warm start from current iterate
    for (std::size_t ui = 0; ui < N; ++ui) x[ui] = res.u.v[idx.cells[ui]];
    pcg(A, x, opts.lin_tol, opts.lin_max_iter);

    // Damped step; halve theta only on a material energy increase. The energy
    // uses central-gradient quadrature while the system uses face fluxes, so
    // tiny non-monotonicities near the fixed point are quadrature noise, not
    // divergence, and must not shrink the step.
    GridFunction prev = res.u;
    double theta = theta0;
    double new_energy = energy;
    for (int bt = 0; bt < 6; ++bt) {
      for (std::size_t ui = 0; ui < N; ++ui) {
        std::size_t id = idx.cells[ui];
        res.u.v[id] = (1 - theta) * prev.v[id] + theta * x[ui];
      }
      GradientField Dc = gradient_with_data(res.u, data_lookup);
      new_energy = model_energy(m, res.u, Dc, f);
      if (new_energy <= energy + 1e-6 * (1 + std::abs(energy))) break;
      theta *= 0.5;
    }
    energy = new_energy;
    res.energy_trace.push_back(energy);
    res.iterations = it + 1;

    Du = eval_sigma();
    res.residual = defect();
    if (res.residual <= opts.tol) {
      res.converged = true;
      break;
    }
  }
  res.Du = gradient_with_data(res.u, data_lookup);
  return res;
}

SolveResult solve_dirichlet(const NonlinearityModel& m, const RadonMeasure& mu,
                            const MaskPtr& mask, const SolveOptions& opts,
                            double mollify_scale) {
  double k = std::max(mollify_scale, 2 * mask->grid.h);
  GridFunction f;
  if (mu.empty())
    f = GridFunction(mask);
  else
    f = mollify_measure(mu, mask, k);
  return solve_region(m, f, mask, nullptr, nullptr, opts);
}

SolaSequence sola_sequence(const NonlinearityModel& m, const RadonMeasure& mu,
                           const MaskPtr& mask, const std::vector<double>& scales,
                           const SolveOptions& opts) {
  for (std::size_t i = 1; i < scales.size(); ++i)
    if (!(scales[i] < scales[i - 1]))
      throw std::invalid_argument("sola_sequence: scales must decrease");
  for (double s : scales)
    if (s < 2 * mask->grid.h)
      throw std::invalid_argument("sola_sequence: scales must stay >= 2h");
  SolaSequence seq;
  for (double s : scales) seq.steps.push_back({s, solve_dirichlet(m, mu, mask, opts, s)});
  double hv = mask->grid.cell_volume();
  for (std::size_t i = 0; i + 1 < seq.steps.size(); ++i) {
    const auto& A = seq.steps[i].result.Du;
    const auto& B = seq.steps[i + 1].result.Du;
    double s = 0;
    for (std::size_t id = 0; id < mask->inside.size(); ++id) {
      if (!mask->is_inside(id)) continue;
      double d2 = 0;
      for (int d = 0; d < mask->grid.n; ++d) {
        double diff = A.comp[d][id] - B.comp[d][id];
        d2 += diff * diff;
      }
      s += std::sqrt(d2) * hv;
    }
    seq.grad_l1_diffs.push_back(s);
  }
  return seq;
}

double weak_form_defect(const NonlinearityModel& m, const SolveResult& r,
                        const GridFunction& f,
                        const std::function<double(std::size_t)>& dirichlet) {
  // Re-evaluates the flux defect at the converged iterate.
  const DomainMask& region = *r.u.mask;
  const Grid& g = region.grid;
  double hv = g.cell_volume(), area = std::pow(g.h, g.n - 1), s2 = m.s * m.s;
  auto look = [&](std::size_t id) { return dirichlet ? dirichlet(id) : 0.0; };
  GradientField Du = gradient_with_data(r.u, look);
  std::vector<double> sigma(g.cell_count(), 0.0);
  bool floored = false;
  for (std::size_t id = 0; id < sigma.size(); ++id)
    if (region.is_inside(id)) {
      double t = s2 + Du.magnitude(id) * Du.magnitude(id);
      sigma[id] = t > 0 ? m.c_at(id) * std::pow(t, (m.p_at(id) - 2) / 2) : 0.0;
      if (!(sigma[id] > 1e-12)) {
        sigma[id] = 1e-12;
        floored = true;
      }
      if (sigma[id] > 1e12) sigma[id] = 1e12;
    }
  (void)floored;
  double f_l1 = 0;
  for (std::size_t id = 0; id < f.v.size(); ++id)
    if (region.is_inside(id)) f_l1 += std::abs(f.v[id]) * hv;
  double scale = std::max(f_l1, 1e-300);
  double worst = 0;
  for (std::size_t id = 0; id < region.inside.size(); ++id) {
    if (!region.is_inside(id)) continue;
    auto c = g.decode(id);
    double acc = -f.v[id] * hv;
    for (int d = 0; d < g.n; ++d)
      for (int s = -1; s <= 1; s += 2) {
        int i = c[0] + (d == 0 ? s : 0), j = c[1] + (d == 1 ? s : 0),
            k = c[2] + (d == 2 ? s : 0);
        bool inb = g.in_bounds(i, j, k);
        std::size_t nid = inb ? g.index(i, j, k) : 0;
        if (inb && region.inside[nid]) {
          double sf = 2.0 * sigma[id] * sigma[nid] / (sigma[id] + sigma[nid]);
          acc += sf * (r.u.v[id] - r.u.v[nid]) / g.h * area;
        } else if (inb && dirichlet) {
          acc += sigma[id] * (r.u.v[id] - look(nid)) / g.h * area;
        } else {
          acc += 2.0 * sigma[id] * r.u.v[id] / g.h * area;
        }
      }
    worst = std::max(worst, std::abs(acc));
  }
  return worst / scale;
}

}  // namespace vexlab

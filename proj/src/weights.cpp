#include "vexlab/weights.hpp"

#include <algorithm>
#include <random>

namespace vexlab {

WeightField WeightField::constant(const Grid& g, double c) {
  if (!(c > 0)) throw std::invalid_argument("WeightField: weight must be positive");
  WeightField w;
  w.grid = g;
  w.v.assign(g.cell_count(), c);
  w.family = "constant";
  return w;
}

double WeightField::mass(const DomainMask& mask) const {
  double s = 0, hv = grid.cell_volume();
  for (std::size_t id = 0; id < v.size(); ++id)
    if (mask.is_inside(id)) s += v[id] * hv;
  return s;
}

WeightField power_weight(double alpha, const Vec& center, const Grid& grid) {
  if (!(alpha > -grid.n))
    throw std::invalid_argument("power_weight: alpha <= -n is not locally integrable");
  WeightField w;
  w.grid = grid;
  w.family = "power";
  w.v.resize(grid.cell_count());
  for (std::size_t id = 0; id < w.v.size(); ++id) {
    double d = std::max(norm(grid.cell_center(id) - center), grid.h / 2);
    w.v[id] = std::pow(d, alpha);
  }
  return w;
}

namespace {

// Visit cells of B ∩ grid.
template <class F>
void for_ball_cells(const Grid& g, const Vec& x, double r, F&& f) {
  int rad = int(std::ceil(r / g.h)) + 1;
  int ci = int(std::floor((x[0] - g.lo[0]) / g.h));
  int cj = int(std::floor((x[1] - g.lo[1]) / g.h));
  int ck = g.n == 3 ? int(std::floor((x[2] - g.lo[2]) / g.h)) : 0;
  int klo = g.n == 3 ? std::max(0, ck - rad) : 0;
  int khi = g.n == 3 ? std::min(g.dims[2] - 1, ck + rad) : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = std::max(0, cj - rad); j <= std::min(g.dims[1] - 1, cj + rad); ++j)
      for (int i = std::max(0, ci - rad); i <= std::min(g.dims[0] - 1, ci + rad); ++i) {
        std::size_t id = g.index(i, j, k);
        if (norm(g.cell_center(id) - x) < r) f(id);
      }
}

struct SubsetSample {
  double wB = 0, wE = 0;
  std::size_t nB = 0, nE = 0;
};

std::vector<SubsetSample> draw_subset_samples(const WeightField& w, int samples,
                                              unsigned seed) {
  const Grid& g = w.grid;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0, 1);
  double box = 0;
  for (int d = 0; d < g.n; ++d) box = std::max(box, g.hi[d] - g.lo[d]);
  std::vector<SubsetSample> out;
  out.reserve(samples);
  while (int(out.size()) < samples) {
    Vec c{g.lo[0] + uni(rng) * (g.hi[0] - g.lo[0]), g.lo[1] + uni(rng) * (g.hi[1] - g.lo[1]),
          g.n == 3 ? g.lo[2] + uni(rng) * (g.hi[2] - g.lo[2]) : 0.0};
    double r = box * std::pow(2.0, -std::floor(uni(rng) * 5.0)) / 2.0;
    if (r < 3 * g.h) continue;
    std::vector<std::size_t> cells;
    for_ball_cells(g, c, r, [&](std::size_t id) { cells.push_back(id); });
    if (cells.size() < 8) continue;
    SubsetSample s;
    for (auto id : cells) s.wB += w.v[id];
    s.nB = cells.size();

    bool rect_mode = uni(rng) < 0.5;
    if (rect_mode) {
      // random sub-rectangle of the ball's bounding box
      Vec lo, hi;
      for (int d = 0; d < 3; ++d) {
        double a = c[d] - r + uni(rng) * 2 * r;
        double b = c[d] - r + uni(rng) * 2 * r;
        lo[d] = std::min(a, b);
        hi[d] = std::max(a, b);
      }
      for (auto id : cells) {
        Vec x = g.cell_center(id);
        bool in = true;
        for (int d = 0; d < g.n; ++d) in = in && x[d] >= lo[d] && x[d] <= hi[d];
        if (in) {
          s.wE += w.v[id];
          ++s.nE;
        }
      }
    } else {
      // superlevel set of w inside the ball at a random quantile
      std::vector<double> vals;
      vals.reserve(cells.size());
      for (auto id : cells) vals.push_back(w.v[id]);
      std::size_t q = std::size_t(uni(rng) * 0.9 * vals.size());
      std::nth_element(vals.begin(), vals.begin() + q, vals.end());
      double thr = vals[q];
      for (auto id : cells)
        if (w.v[id] > thr) {
          s.wE += w.v[id];
          ++s.nE;
        }
    }
    if (s.nE == 0 || s.wB <= 0) continue;
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<BallSample> default_ball_sample(const Grid& grid, int n_centers, unsigned seed,
                                            double r_min_cells) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0, 1);
  double box = 0;
  for (int d = 0; d < grid.n; ++d) box = std::max(box, grid.hi[d] - grid.lo[d]);
  std::vector<BallSample> balls;
  for (int i = 0; i < n_centers; ++i) {
    Vec c{grid.lo[0] + uni(rng) * (grid.hi[0] - grid.lo[0]),
          grid.lo[1] + uni(rng) * (grid.hi[1] - grid.lo[1]),
          grid.n == 3 ? grid.lo[2] + uni(rng) * (grid.hi[2] - grid.lo[2]) : 0.0};
    for (double r = box / 2; r >= r_min_cells * grid.h; r /= 2) balls.push_back({c, r});
  }
  return balls;
}

double ap_constant(const WeightField& w, double p, const std::vector<BallSample>& balls) {
  if (p < 1) throw std::invalid_argument("ap_constant: p must be >= 1");
  if (balls.empty()) throw std::invalid_argument("ap_constant: empty ball sample");
  const Grid& g = w.grid;
  double best = 0;
  for (const auto& b : balls) {
    double sw = 0, sdual = 0, wmin = 1e300;
    std::size_t cnt = 0;
    for_ball_cells(g, b.center, b.radius, [&](std::size_t id) {
      sw += w.v[id];
      wmin = std::min(wmin, w.v[id]);
      if (p > 1) sdual += std::pow(w.v[id], -1.0 / (p - 1.0));
      ++cnt;
    });
    if (cnt == 0) continue;
    double avg = sw / cnt;
    double val;
    if (p > 1)
      val = avg * std::pow(sdual / cnt, p - 1.0);
    else
      val = avg / wmin;
    best = std::max(best, val);
  }
  return best;
}

AInftyConstants fit_ainfty_constants(const WeightField& w, int samples, unsigned seed) {
  if (samples < 100) throw std::invalid_argument("fit_ainfty_constants: need samples >= 100");
  auto train = draw_subset_samples(w, samples, seed);

  std::vector<double> kappas;
  for (double k = 0.05; k < 0.96; k += 0.05) kappas.push_back(k);
  kappas.push_back(0.99);

  auto c_of = [&](double kappa) {
    double c = 1.0 + 1e-9;  // c_w > 1 by contract
    for (const auto& s : train) {
      double rw = s.wE / s.wB;
      double rm = double(s.nE) / double(s.nB);
      c = std::max(c, rw / std::pow(rm, kappa));
    }
    return c;
  };

  double cmin = 1e300;
  std::vector<double> cs(kappas.size());
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    cs[i] = c_of(kappas[i]);
    cmin = std::min(cmin, cs[i]);
  }

  AInftyConstants fit;
  fit.sample_count = int(train.size());
  if (cmin > 1e6) {
    fit.ok = false;
    fit.c_w = cmin;
    fit.kappa_w = kappas.front();
    return fit;
  }
  // Among near-minimal constants prefer the strongest decay exponent.
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (cs[i] <= cmin * 1.05 + 1e-12) {
      fit.kappa_w = kappas[i];
      fit.c_w = cs[i];
    }
  }
  for (const auto& s : train) {
    double resid = s.wE / s.wB -
                   fit.c_w * std::pow(double(s.nE) / double(s.nB), fit.kappa_w);
    fit.max_residual = std::max(fit.max_residual, resid);
  }
  return fit;
}

double validate_ainfty(const WeightField& w, const AInftyConstants& fit, int samples,
                       unsigned seed, double slack) {
  auto test = draw_subset_samples(w, samples, seed);
  std::size_t ok = 0;
  for (const auto& s : test) {
    double lhs = s.wE / s.wB;
    double rhs = slack * fit.c_w * std::pow(double(s.nE) / double(s.nB), fit.kappa_w);
    if (lhs <= rhs) ++ok;
  }
  return test.empty() ? 1.0 : double(ok) / double(test.size());
}

}  // namespace vexlab

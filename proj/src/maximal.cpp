#include <algorithm>

#include "vexlab/measure.hpp"

namespace vexlab {

namespace {

// Disk/ball of radius r decomposed into x-runs: for each (dj, dk) offset the
// half-width of the run and, summed, the total cell count of the ball.
struct BallRuns {
  struct Run {
    int dj, dk, half;
  };
  std::vector<Run> runs;
  std::size_t total_cells = 0;
};

BallRuns make_runs(const Grid& g, double r) {
  BallRuns b;
  double rc = r / g.h;  // radius in cells; offsets strictly inside
  int m = int(std::ceil(rc));
  int klo = g.n == 3 ? -m : 0, khi = g.n == 3 ? m : 0;
  for (int dk = klo; dk <= khi; ++dk)
    for (int dj = -m; dj <= m; ++dj) {
      double rem = rc * rc - double(dj) * dj - double(dk) * dk;
      if (rem <= 0) continue;
      int half = int(std::ceil(std::sqrt(rem))) - 1;  // largest di with di^2 < rem
      if (double(half + 1) * (half + 1) < rem) ++half;
      b.runs.push_back({dj, dk, half});
      b.total_cells += std::size_t(2 * half + 1);
    }
  return b;
}

// Row prefix sums of a full-grid array (zero outside mask already).
struct RowPrefix {
  const Grid* g;
  std::vector<double> P;  // P[row_base + i] = sum of f over [0..i] in the row

  explicit RowPrefix(const Grid& grid, const std::vector<double>& f) : g(&grid) {
    P.resize(f.size());
    std::size_t rows = std::size_t(grid.dims[1]) * grid.dims[2];
    for (std::size_t row = 0; row < rows; ++row) {
      std::size_t base = row * grid.dims[0];
      double acc = 0;
      for (int i = 0; i < grid.dims[0]; ++i) {
        acc += f[base + i];
        P[base + i] = acc;
      }
    }
  }
  double run_sum(int i0, int i1, int j, int k) const {  // clipped inclusive range
    if (j < 0 || j >= g->dims[1] || k < 0 || k >= g->dims[2]) return 0;
    i0 = std::max(i0, 0);
    i1 = std::min(i1, g->dims[0] - 1);
    if (i0 > i1) return 0;
    std::size_t base = (std::size_t(k) * g->dims[1] + j) * std::size_t(g->dims[0]);
    double hi = P[base + i1];
    double lo = i0 > 0 ? P[base + i0 - 1] : 0.0;
    return hi - lo;
  }
};

}  // namespace

GridFunction hl_maximal(const GridFunction& f, const std::vector<double>& radii) {
  for (std::size_t id = 0; id < f.v.size(); ++id)
    if (f.v[id] < 0) throw std::invalid_argument("hl_maximal: f must be nonnegative");
  const Grid& g = f.mask->grid;
  RowPrefix pre(g, f.v);
  std::vector<BallRuns> runs;
  runs.reserve(radii.size());
  for (double r : radii) runs.push_back(make_runs(g, r));

  GridFunction out(f.mask);
  for (std::size_t id = 0; id < out.v.size(); ++id) {
    if (!f.mask->is_inside(id)) continue;
    auto c = g.decode(id);
    double best = 0;
    for (const auto& b : runs) {
      if (b.total_cells == 0) continue;
      double s = 0;
      for (const auto& run : b.runs)
        s += pre.run_sum(c[0] - run.half, c[0] + run.half, c[1] + run.dj, c[2] + run.dk);
      best = std::max(best, s / double(b.total_cells));
    }
    out.v[id] = best;
  }
  return out;
}

GridFunction frac_maximal_1(const RadonMeasure& mu, const MaskPtr& mask,
                            const std::vector<double>& radii) {
  const Grid& g = mask->grid;
  GridFunction out(mask);
  if (mu.empty()) return out;

  std::optional<RowPrefix> pre;
  std::vector<BallRuns> runs;
  double hv = 0;
  if (mu.density) {
    const Grid& gd = mu.density->mask->grid;
    if (gd.cell_count() != g.cell_count())
      throw std::invalid_argument("frac_maximal_1: density must share the mask grid");
    pre.emplace(g, mu.density->v);
    hv = g.cell_volume();
    for (double r : radii) runs.push_back(make_runs(g, r));
  }

  for (std::size_t id = 0; id < out.v.size(); ++id) {
    if (!mask->is_inside(id)) continue;
    Vec x = g.cell_center(id);
    auto c = g.decode(id);
    double best = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      double r = radii[k];
      double m = 0;
      for (const auto& a : mu.atoms)
        if (norm(a.point - x) < r) m += a.mass;
      if (pre) {
        const auto& b = runs[k];
        double s = 0;
        for (const auto& run : b.runs)
          s += pre->run_sum(c[0] - run.half, c[0] + run.half, c[1] + run.dj, c[2] + run.dk);
        m += s * hv;
      }
      best = std::max(best, m / std::pow(r, g.n - 1));
    }
    out.v[id] = best;
  }
  return out;
}

GridFunction riesz_potential_1(const RadonMeasure& mu, const MaskPtr& mask) {
  const Grid& g = mask->grid;
  GridFunction out(mask);
  if (mu.empty()) return out;
  double floor_d = g.h / 2;
  std::vector<std::size_t> support;
  double hv = 0;
  if (mu.density) {
    hv = mu.density->mask->grid.cell_volume();
    for (std::size_t id = 0; id < mu.density->v.size(); ++id)
      if (mu.density->mask->is_inside(id) && mu.density->v[id] != 0) support.push_back(id);
  }
  const Grid* gd = mu.density ? &mu.density->mask->grid : nullptr;
  for (std::size_t id = 0; id < out.v.size(); ++id) {
    if (!mask->is_inside(id)) continue;
    Vec x = g.cell_center(id);
    double s = 0;
    for (const auto& a : mu.atoms)
      s += a.mass / std::pow(std::max(norm(a.point - x), floor_d), g.n - 1);
    for (auto sid : support) {
      double d = std::max(norm(gd->cell_center(sid) - x), floor_d);
      s += mu.density->v[sid] * hv / std::pow(d, g.n - 1);
    }
    out.v[id] = s;
  }
  return out;
}

}  // namespace vexlab

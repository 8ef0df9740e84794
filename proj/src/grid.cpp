#include "vexlab/grid.hpp"

#include <algorithm>

namespace vexlab {

Grid::Grid(int n_, const Vec& lo_, const Vec& hi_, double h_) : n(n_), lo(lo_), hi(hi_), h(h_) {
  if (n != 2 && n != 3) throw std::invalid_argument("Grid: dimension must be 2 or 3");
  if (!(h > 0)) throw std::invalid_argument("Grid: cell width must be positive");
  for (int d = 0; d < n; ++d) {
    if (!(hi[d] > lo[d])) throw std::invalid_argument("Grid: extent must have positive volume");
    dims[d] = std::max(1, int(std::llround((hi[d] - lo[d]) / h)));
    if (dims[d] < 8) throw std::invalid_argument("Grid: need at least 8 cells per axis");
  }
  if (n == 2) {
    lo[2] = hi[2] = 0;
    dims[2] = 1;
  } else {
    dims[2] = std::max(1, int(std::llround((hi[2] - lo[2]) / h)));
  }
}

long long Grid::locate(const Vec& x) const {
  int c[3] = {0, 0, 0};
  for (int d = 0; d < n; ++d) {
    c[d] = int(std::floor((x[d] - lo[d]) / h));
    if (c[d] < 0 || c[d] >= dims[d]) return -1;
  }
  return (long long)index(c[0], c[1], c[2]);
}

std::size_t DomainMask::inside_count() const {
  std::size_t c = 0;
  for (auto b : inside) c += (b != 0);
  return c;
}

void DomainMask::finalize() {
  boundary_cells.clear();
  const auto& g = grid;
  bool any = false;
  for (std::size_t id = 0; id < inside.size(); ++id) {
    if (!inside[id]) continue;
    any = true;
    auto c = g.decode(id);
    bool bdry = false;
    for (int d = 0; d < g.n && !bdry; ++d) {
      for (int s = -1; s <= 1 && !bdry; s += 2) {
        int i = c[0] + (d == 0 ? s : 0);
        int j = c[1] + (d == 1 ? s : 0);
        int k = c[2] + (d == 2 ? s : 0);
        if (!is_inside(i, j, k)) bdry = true;
      }
    }
    if (bdry) boundary_cells.push_back(id);
  }
  if (!any) throw std::invalid_argument("DomainMask: inside set is empty");
  // Diameter is attained at boundary cells.
  diameter = 0;
  for (std::size_t a = 0; a < boundary_cells.size(); ++a) {
    Vec xa = g.cell_center(boundary_cells[a]);
    for (std::size_t b = a + 1; b < boundary_cells.size(); ++b) {
      diameter = std::max(diameter, norm(xa - g.cell_center(boundary_cells[b])));
    }
  }
  if (boundary_cells.size() == 1) diameter = g.h;
}

MaskPtr make_rect_domain(int n, const Vec& lo, const Vec& hi, double h) {
  auto m = std::make_shared<DomainMask>();
  m->grid = Grid(n, lo, hi, h);
  m->inside.assign(m->grid.cell_count(), 1);
  m->finalize();
  return m;
}

MaskPtr make_sawtooth_domain(const Vec& lo, const Vec& hi, double h, double amplitude,
                             double period) {
  if (amplitude < 0 || amplitude >= 0.25)
    throw std::invalid_argument("make_sawtooth_domain: amplitude must be in [0, 1/4)");
  if (period < 4 * h)
    throw std::invalid_argument("make_sawtooth_domain: period must be at least 4h");
  auto m = std::make_shared<DomainMask>();
  m->grid = Grid(2, lo, hi, h);
  const Grid& g = m->grid;
  m->inside.assign(g.cell_count(), 0);
  const double peak = amplitude * period;
  for (std::size_t id = 0; id < g.cell_count(); ++id) {
    Vec x = g.cell_center(id);
    double t = (x[0] - lo[0]) / period;
    t -= std::floor(t);
    double tri = (t < 0.5) ? 2 * t : 2 * (1 - t);  // in [0,1]
    double floor_y = lo[1] + peak * tri;
    m->inside[id] = (amplitude == 0.0) ? 1 : (x[1] > floor_y ? 1 : 0);
  }
  m->finalize();
  return m;
}

MaskPtr make_disk_domain(int n, const Vec& center, double radius, double h, double pad) {
  auto m = std::make_shared<DomainMask>();
  double ext = radius + pad + 2 * h;
  Vec lo = center - Vec{ext, ext, n == 3 ? ext : 0.0};
  Vec hi = center + Vec{ext, ext, n == 3 ? ext : 0.0};
  m->grid = Grid(n, lo, hi, h);
  const Grid& g = m->grid;
  m->inside.assign(g.cell_count(), 0);
  for (std::size_t id = 0; id < g.cell_count(); ++id)
    m->inside[id] = norm(g.cell_center(id) - center) < radius ? 1 : 0;
  m->finalize();
  return m;
}

double density_ratio(const DomainMask& mask, const Vec& x, double r) {
  const Grid& g = mask.grid;
  if (!(r > 0) || r >= mask.diameter)
    throw std::invalid_argument("density_ratio: need 0 < r < diameter");
  long long id0 = g.locate(x);
  if (id0 < 0 || !mask.is_inside(std::size_t(id0)))
    throw std::invalid_argument("density_ratio: x must be an inside cell center");
  // Count ball cells on an unclipped index range around x, inside or not.
  std::size_t ball = 0, cap = 0;
  int rad = int(std::ceil(r / g.h)) + 1;
  auto c0 = g.decode(std::size_t(id0));
  int klo = g.n == 3 ? c0[2] - rad : 0, khi = g.n == 3 ? c0[2] + rad : 0;
  for (int k = klo; k <= khi; ++k)
    for (int j = c0[1] - rad; j <= c0[1] + rad; ++j)
      for (int i = c0[0] - rad; i <= c0[0] + rad; ++i) {
        Vec y{g.lo[0] + (i + 0.5) * g.h, g.lo[1] + (j + 0.5) * g.h,
              g.n == 3 ? g.lo[2] + (k + 0.5) * g.h : 0.0};
        if (norm(y - x) >= r) continue;
        ++ball;
        if (mask.is_inside(i, j, k)) ++cap;
      }
  if (cap == 0) throw std::runtime_error("density_ratio: B_r(x) ∩ Ω empty on grid");
  return double(ball) / double(cap);
}

}  // namespace vexlab
